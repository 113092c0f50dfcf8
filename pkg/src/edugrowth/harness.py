"""Single runs, ensembles and the segregation observables."""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import dynamics
from .dynamics import NewbornView, Population
from .economy import (
    EconParams, advance, closed_form_weight, density_from_distances, relative_weight, team_density,
)
from .topology import (
    Graph, NetworkKind, NetworkSpec, build_network, build_ring, build_square, lattice_distances,
    inverse_distance_sum, overlay_distances, path_lengths, refresh_shortcuts, shortest_distances,
)

log = logging.getLogger(__name__)

InitialWeight = Literal["equal-wages", "closed-form"]
Distance = Literal["auto", "lattice", "graph"]
CrgRole = Literal["collab", "both"]

OBSERVABLES = ("growth", "w", "s_s", "u", "partitions", "team")
SERIES_FIELDS = ("s_s", "j_s", "u", "growth", "output_growth", "w", "team", "partitions",
                 "walls", "r_w")


class Termination(str, enum.Enum):
    STEADY = "steady"
    COLLAPSED = "collapsed"
    POVERTY_TRAP = "poverty-trap"


class InvariantError(AssertionError):
    """A model identity failed during a run."""


@dataclass(frozen=True)
class SimConfig:
    network: NetworkSpec = field(default_factory=NetworkSpec)
    econ: EconParams = field(default_factory=EconParams)
    periods: int = 600
    window: int = 100
    runs: int = 1000
    base_seed: int = 0
    skilled_fraction: float = 0.5
    newborn_view: NewbornView = "promoted"
    initial_rw: InitialWeight = "equal-wages"
    distance: Distance = "auto"
    crg_role: CrgRole = "collab"

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be at least one generation, got {self.window}")
        if self.periods < 2 * self.window:
            raise ValueError(
                f"horizon of {self.periods} periods cannot hold a {self.window}-generation window")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.newborn_view not in ("promoted", "outgoing"):
            raise ValueError(f"unknown newborn_view {self.newborn_view!r}")
        if self.initial_rw not in ("equal-wages", "closed-form"):
            raise ValueError(f"unknown initial_rw {self.initial_rw!r}")
        if self.distance not in ("auto", "lattice", "graph"):
            raise ValueError(f"unknown distance {self.distance!r}")
        if self.crg_role not in ("collab", "both"):
            raise ValueError(f"unknown crg_role {self.crg_role!r}")

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class RunResult:
    seed: int
    termination: Termination
    series: dict[str, np.ndarray]
    summary: dict[str, float] | None
    log_a: float
    snapshots: dict[int, Population]
    graph: Graph

    @property
    def periods(self) -> int:
        return len(self.series["s_s"])


@dataclass
class EnsembleSummary:
    runs: int
    steady: int
    collapsed: int
    trapped: int
    mean: dict[str, float]
    stderr: dict[str, float]
    mean_series: dict[str, np.ndarray] | None = None
    diagnostic: str = ""


def count_partitions(pop: Population, graph: Graph) -> int:
    """Number of skilled/unskilled domains.

    On the ring: maximal same-class runs around the cycle. Otherwise: connected
    components of same-class agents under the regular edges (shortcuts excluded).
    """
    skilled = pop.skilled
    if graph.kind == NetworkKind.RING.value:
        return max(int(np.count_nonzero(skilled != np.roll(skilled, 1))), 1)
    reg = graph.regular_only().matrix.tocoo()
    keep = skilled[reg.row] == skilled[reg.col]
    sub = reg.copy()
    sub.data = sub.data * keep
    sub.eliminate_zeros()
    n_comp, _ = connected_components(sub, directed=False)
    return int(n_comp)


def count_walls(pop: Population) -> int:
    """Domain boundaries along the ring (0 when one class fills it)."""
    skilled = pop.skilled
    return int(np.count_nonzero(skilled != np.roll(skilled, 1)))


def wall_series(run: RunResult) -> np.ndarray:
    if run.graph.kind != NetworkKind.RING.value:
        raise ValueError("walls are defined on ring-based networks only")
    return run.series["walls"]


def _first_weight(config: SimConfig, u0: int) -> float:
    if config.initial_rw == "closed-form":
        return closed_form_weight(u0, config.econ)
    # no wage premium before the first period: w_s(0) = w_u(0) = A(0)
    return relative_weight(1.0, 1.0, config.econ.alpha_prime)


def resolve_metric(config: SimConfig, collab: Graph) -> str:
    """Distance used in the team density: ``"lattice"`` or ``"graph"``.

    ``"auto"`` measures lattice link lengths on a ring or square lattice
    without collaboration shortcuts, and counts hops on anything random.
    """
    if config.distance != "auto":
        return config.distance
    lattice = collab.kind in (NetworkKind.RING.value, NetworkKind.SQUARE.value)
    if lattice and not config.network.sw_mode.collaboration:
        return "lattice"
    return "graph"


def base_distances(collab: Graph, metric: str) -> np.ndarray:
    """All-pairs distances on the regular part of the collaboration graph."""
    if collab.kind in (NetworkKind.RING.value, NetworkKind.SQUARE.value):
        if metric == "lattice":
            return lattice_distances(collab)
        return _lattice_hops(collab.kind, collab.n, collab.degree)
    return path_lengths(collab) if metric == "lattice" else shortest_distances(collab)


@lru_cache(maxsize=16)
def _lattice_hops(kind: str, n: int, z: int) -> np.ndarray:
    g = build_ring(n, z) if kind == NetworkKind.RING.value else build_square(n, z)
    d = shortest_distances(g)
    d.setflags(write=False)
    return d


def run_single(
    config: SimConfig,
    seed: int,
    *,
    validate: bool = True,
    fast_forward: bool = True,
    snapshots: Iterable[int] = (),
) -> RunResult:
    """Simulate one economy for ``config.periods`` periods.

    Per period: the education weight from last period's wages, the
    synchronous population update on the influence graph, redrawing of the
    shortcut overlays, the team density on the collaboration graph, then
    ideas, output and wages. Stops early in an absorbing state.

    With ``fast_forward`` a run without random overlays stops simulating once
    the state vector repeats with period two and tiles that cycle up to the
    horizon, which gives the same series as a full simulation.
    """
    rng = np.random.default_rng(seed)
    spec, econ = config.network, config.econ
    base = collab_base = build_network(spec, rng)
    if spec.kind is NetworkKind.CRG and config.crg_role == "collab":
        # the random graph links collaborators only; decisions stay on the ring
        base = build_ring(spec.n_agents, spec.degree)
    n_short = spec.n_shortcuts
    use_inf = spec.sw_mode.influence and n_short > 0
    use_col = spec.sw_mode.collaboration and n_short > 0
    random_overlays = use_inf or use_col

    pop = dynamics.initialize(spec.n_agents, config.skilled_fraction, rng)
    want = set(snapshots) | {0}
    snaps: dict[int, Population] = {0: pop} if 0 in want else {}
    influence = refresh_shortcuts(base, n_short, rng) if use_inf else base

    metric = resolve_metric(config, collab_base)
    # hop counts on a redrawn overlay come from a fresh BFS each period
    need_base = econ.gamma > 0 and not (use_col and metric == "graph")
    base_dist = base_distances(collab_base, metric) if need_base else None

    ring = base.kind == NetworkKind.RING.value
    T = config.periods
    rec = {k: np.full(T, np.nan) for k in SERIES_FIELDS}
    c0 = dynamics.counts(pop)
    if validate:
        dynamics.check_population(pop)

    termination = Termination.STEADY
    if c0.u == 0:
        termination = Termination.COLLAPSED
    elif c0.ss == 0 and c0.js == 0:
        termination = Termination.POVERTY_TRAP

    r_w = _first_weight(config, c0.u)
    log_a = 0.0
    prev_u = c0.u
    # r_w(1) is not a function of the t=0 state, so cycles are detected from t=1 on
    history: list[np.ndarray] = []
    t_done = 0
    collab = collab_base
    while termination is Termination.STEADY and t_done < T:
        t = t_done + 1
        prev = pop
        pop = dynamics.step(pop, influence, r_w, config.newborn_view)
        if use_inf:
            influence = refresh_shortcuts(base, n_short, rng)
        c = dynamics.counts(pop)
        seniors = pop.skilled_seniors()
        if use_col:
            collab = refresh_shortcuts(collab_base, n_short, rng, eligible=seniors)

        d = 0.0
        if econ.gamma > 0:
            if use_col and metric == "graph":
                d = inverse_distance_sum(collab, seniors) / len(seniors) if len(seniors) else 0.0
            elif use_col:
                d = density_from_distances(overlay_distances(base_dist, seniors, collab.shortcuts))
            else:
                d = team_density(seniors, base_dist)
        # ideas stock in units of last period's stock; log A kept separately
        state = advance(1.0, c.ss, c.u, d, econ)
        wages = state.wages
        i = t - 1
        rec["s_s"][i] = c.ss
        rec["j_s"][i] = c.js
        rec["u"][i] = c.u
        rec["growth"][i] = state.growth
        rec["output_growth"][i] = state.a * c.u / prev_u - 1 if prev_u > 0 else np.nan
        rec["w"][i] = wages.relative
        rec["team"][i] = econ.gamma * d
        rec["partitions"][i] = count_partitions(pop, base)
        rec["walls"][i] = count_walls(pop) if ring else np.nan
        rec["r_w"][i] = r_w
        log_a += math.log1p(state.delta_a)

        if validate:
            _check_period(pop, prev, state, c, d, r_w, prev_u, config)
        if t in want:
            snaps[t] = pop
        t_done = t
        prev_u = c.u

        if wages.collapsed:
            termination = Termination.COLLAPSED
            break
        if c.ss == 0 and c.js == 0:
            termination = Termination.POVERTY_TRAP
            break
        r_w = relative_weight(wages.w_s, wages.w_u, econ.alpha_prime)

        history.append(pop.states)
        if fast_forward and not random_overlays and len(history) >= 3:
            if np.array_equal(history[-1], history[-3]):
                log_a += _tile_cycle(rec, t_done, T)
                for k in want:
                    if t_done < k <= T:
                        src = history[-1] if (k - t_done) % 2 == 0 else history[-2]
                        snaps[k] = Population(src, k)
                pop = Population(history[-1] if (T - t_done) % 2 == 0 else history[-2], T)
                t_done = T
                break
            del history[0]

    series = {k: v[:t_done].copy() for k, v in rec.items()}
    if T in want and termination is Termination.STEADY:
        snaps[T] = pop
    summary = None
    if termination is Termination.STEADY:
        tail = slice(t_done - 2 * config.window, t_done)
        summary = {k: float(np.mean(series[k][tail])) for k in OBSERVABLES}
        summary["walls"] = float(np.mean(series["walls"][tail])) if ring else math.nan
    return RunResult(seed, termination, series, summary, log_a, snaps, base)


def _tile_cycle(rec: dict[str, np.ndarray], t_done: int, T: int) -> float:
    """Fill periods after ``t_done`` by repeating the last two; return added log A."""
    if t_done >= T:
        return 0.0
    i0, i1 = t_done - 2, t_done - 1
    rest = np.arange(t_done, T)
    src = np.where((rest - t_done) % 2 == 0, i0, i1)
    for k in rec:
        rec[k][t_done:T] = rec[k][src]
    return float(np.sum(np.log1p(rec["growth"][t_done:T])))


def _check_period(pop, prev, state, c, d, r_w, prev_u, config: SimConfig) -> None:
    econ = config.econ
    try:
        dynamics.check_population(pop, prev)
    except dynamics.PopulationError as exc:
        raise InvariantError(str(exc)) from exc
    w = state.wages
    a_prev = state.a - state.delta_a
    tol = 1e-9 * max(1.0, abs(w.y))
    if abs(w.y - state.a * c.u) > tol:
        raise InvariantError(f"t={pop.t}: Y != A U")
    if abs(w.y_s + w.y_u - w.y) > tol:
        raise InvariantError(f"t={pop.t}: Y_s + Y_u != Y")
    if abs(w.w_u - a_prev) > 1e-12:
        raise InvariantError(f"t={pop.t}: w_u != A(t-1)")
    if c.ss > 0:
        expect = (econ.delta * c.ss + econ.gamma * d) * c.u / c.ss
        if abs(w.relative - expect) > 1e-9 * max(1.0, expect):
            raise InvariantError(f"t={pop.t}: relative wage {w.relative} != {expect}")
    if econ.gamma == 0 and (pop.t > 1 or config.initial_rw == "closed-form"):
        expect = closed_form_weight(prev_u, econ)
        if abs(r_w - expect) > 1e-9 * max(1.0, expect):
            raise InvariantError(f"t={pop.t}: r_w {r_w} != alpha' delta U(t-1) = {expect}")


def _run_summary_only(args):
    config, seed, keep_series = args
    res = run_single(config, seed, validate=False)
    series = None
    if keep_series and res.termination is Termination.STEADY:
        series = {k: res.series[k] for k in ("s_s", "u", "walls", "growth")}
    return res.termination, res.summary, series


def run_ensemble(
    config: SimConfig, *, workers: int = 1, keep_series: bool = False
) -> EnsembleSummary:
    """Run ``config.runs`` replicas with seeds ``base_seed + k``.

    Absorbed runs are counted but left out of the steady-state means.
    ``keep_series`` also averages the U, S_s and wall series of steady runs.
    """
    jobs = [(config, config.base_seed + k, keep_series) for k in range(config.runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_summary_only, jobs, chunksize=8))
    else:
        results = [_run_summary_only(j) for j in jobs]
    return summarize(results, config.runs)


def summarize(results, runs: int) -> EnsembleSummary:
    collapsed = sum(1 for term, _, _ in results if term is Termination.COLLAPSED)
    trapped = sum(1 for term, _, _ in results if term is Termination.POVERTY_TRAP)
    steady = [(s, ser) for term, s, ser in results if term is Termination.STEADY]
    keys = OBSERVABLES + ("walls",)
    mean = {k: math.nan for k in keys}
    stderr = {k: math.nan for k in keys}
    diagnostic = ""
    if steady:
        for k in keys:
            vals = np.array([s[k] for s, _ in steady])
            mean[k] = float(np.mean(vals))
            stderr[k] = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    else:
        diagnostic = f"all {runs} runs ended in an absorbing state"
        log.warning(diagnostic)
    mean_series = None
    series = [ser for _, ser in steady if ser is not None]
    if series:
        mean_series = {k: np.mean([ser[k] for ser in series], axis=0) for k in series[0]}
    return EnsembleSummary(runs, len(steady), collapsed, trapped, mean, stderr, mean_series,
                           diagnostic)
