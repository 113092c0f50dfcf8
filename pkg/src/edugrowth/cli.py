"""Command-line front end: presets, key=value configs and CSV output."""

from __future__ import annotations

import argparse
import hashlib
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .dynamics import format_states
from .economy import EconParams
from .harness import (
    EnsembleSummary, RunResult, SimConfig, run_ensemble, run_single,
)
from .meanfield import calibrate, mf_fixed_point, mf_iterate
from .presets import MEAN_FIELD_REPORTED, PRESETS, TABLE1, TABLE2, get_preset
from .topology import (
    NetworkKind, NetworkSpec, build_network, characteristic_path_length, clustering_coefficient,
    format_edge_list, refresh_shortcuts,
)

log = logging.getLogger("edugrowth")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# flat config keys in canonical order: getter from SimConfig, parser from text
_KEYS: dict[str, tuple[Callable[[SimConfig], object], Callable[[str], object]]] = {
    "network": (lambda c: c.network.kind.value, str),
    "n": (lambda c: c.network.n_agents, int),
    "z": (lambda c: c.network.degree, int),
    "sw": (lambda c: c.network.sw_mode.value, str),
    "p": (lambda c: c.network.shortcut_prob, float),
    "alpha_prime": (lambda c: c.econ.alpha_prime, float),
    "delta": (lambda c: c.econ.delta, float),
    "gamma": (lambda c: c.econ.gamma, float),
    "periods": (lambda c: c.periods, int),
    "window": (lambda c: c.window, int),
    "runs": (lambda c: c.runs, int),
    "seed": (lambda c: c.base_seed, int),
    "skilled_fraction": (lambda c: c.skilled_fraction, float),
    "newborn_view": (lambda c: c.newborn_view, str),
    "initial_rw": (lambda c: c.initial_rw, str),
    "distance": (lambda c: c.distance, str),
    "crg_role": (lambda c: c.crg_role, str),
}
CONFIG_KEYS = tuple(_KEYS)
_NETWORK_KEYS = ("network", "n", "z", "sw", "p")
_ECON_KEYS = ("alpha_prime", "delta", "gamma")


def _canon_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def config_items(config: SimConfig) -> dict[str, str]:
    """Flat key=value view of a config; floats use repr so parsing is exact."""
    out = {}
    for key, (get, _) in _KEYS.items():
        v = get(config)
        out[key] = repr(float(v)) if isinstance(v, float) else str(v)
    return out


def config_hash(config: SimConfig) -> str:
    text = "\n".join(f"{k}={v}" for k, v in config_items(config).items())
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def parse_kv(text: str, source: str = "config") -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"{source} line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _canon_key(key)
        if key in out:
            raise ConfigError(key, f"{source} line {lineno}: repeated key")
        out[key] = value
    return out


def build_config(values: dict[str, object], base: SimConfig | None = None) -> SimConfig:
    """Apply flat ``values`` (strings or typed) on top of ``base``."""
    base = base or SimConfig()
    flat: dict[str, object] = {}
    for key, (get, _) in _KEYS.items():
        flat[key] = get(base)
    for key, raw in values.items():
        key = _canon_key(key)
        if key == "preset":
            continue
        if key not in _KEYS:
            raise ConfigError(key, "unknown key")
        conv = _KEYS[key][1]
        try:
            flat[key] = conv(raw)
        except (TypeError, ValueError):
            raise ConfigError(key, f"malformed value {raw!r}") from None
        if isinstance(flat[key], float) and not math.isfinite(flat[key]):
            raise ConfigError(key, f"value must be finite, got {raw!r}")

    def attempt(keys, make):
        try:
            return make()
        except ValueError as exc:
            raise ConfigError(_blame(str(exc), keys), str(exc)) from None

    network = attempt(_NETWORK_KEYS, lambda: NetworkSpec(
        flat["network"], flat["n"], flat["z"], flat["sw"], flat["p"]))
    econ = attempt(_ECON_KEYS, lambda: EconParams(
        flat["delta"], flat["gamma"], flat["alpha_prime"]))
    rest = ("periods", "window", "runs", "skilled_fraction", "newborn_view", "initial_rw",
            "distance", "crg_role")
    config = attempt(rest, lambda: SimConfig(
        network, econ, flat["periods"], flat["window"], flat["runs"], flat["seed"],
        flat["skilled_fraction"], flat["newborn_view"], flat["initial_rw"], flat["distance"],
        flat["crg_role"]))
    if not 0 <= config.skilled_fraction <= 1:
        raise ConfigError("skilled_fraction", "must lie in [0, 1]")
    return config


# validation message fragment -> config key it refers to, first match wins
_BLAME = (
    ("NetworkKind", "network"), ("SWMode", "sw"), ("shortcut_prob", "p"), ("n_agents", "n"),
    ("degree", "z"), ("z=", "z"), ("perfect square", "n"), ("edges", "z"), ("delta", "delta"),
    ("gamma", "gamma"), ("alpha_prime", "alpha_prime"), ("window", "window"),
    ("horizon", "periods"), ("runs", "runs"), ("newborn_view", "newborn_view"),
    ("initial_rw", "initial_rw"), ("distance", "distance"), ("crg_role", "crg_role"),
)


def _blame(message: str, keys: Sequence[str]) -> str:
    for fragment, key in _BLAME:
        if fragment in message and key in keys:
            return key
    return keys[0]


def metadata_line(config: SimConfig, **extra: object) -> str:
    """One-line file header: version, hash, extras, then the resolved config."""
    fields = {"edugrowth": __version__, "config_hash": config_hash(config)}
    fields.update({k: str(v) for k, v in extra.items()})
    fields["partition_rule"] = partition_rule(config)
    fields.update(config_items(config))
    return "# " + " ".join(f"{k}={v}" for k, v in fields.items())


def parse_metadata(line: str) -> SimConfig:
    """Recover the config recorded by :func:`metadata_line`."""
    if not line.startswith("#"):
        raise ConfigError("metadata", "header line must start with '#'")
    pairs = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
    return build_config({k: v for k, v in pairs.items() if k in _KEYS})


def partition_rule(config: SimConfig) -> str:
    kind = config.network.kind
    if kind is NetworkKind.SQUARE:
        return "lattice-components"
    if kind is NetworkKind.CRG and config.crg_role == "both":
        return "crg-components"
    return "ring-order"


def fmt(x: float | int) -> str:
    """Fixed decimal with six significant digits; NaN becomes an empty field."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if not math.isfinite(x):
        return ""
    if x == 0:
        return "0.00000"
    # round to six significant digits first, then print without exponent
    x = float(f"{x:.5e}")
    decimals = max(0, 5 - math.floor(math.log10(abs(x))))
    return f"{x:.{decimals}f}"


def _csv(rows: Sequence[Sequence[object]]) -> str:
    return "".join(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n"
                   for row in rows)


ENSEMBLE_COLUMNS = ("scenario", "growth", "w", "s_s", "u", "partitions", "team_eff", "walls",
                    "steady", "collapsed", "trapped", "growth_se", "w_se", "s_s_se", "u_se",
                    "partitions_se", "team_eff_se", "walls_se")


def ensemble_row(name: str, s: EnsembleSummary) -> list:
    keys = ("growth", "w", "s_s", "u", "partitions", "team", "walls")
    return ([name] + [s.mean[k] for k in keys] + [s.steady, s.collapsed, s.trapped]
            + [s.stderr[k] for k in keys])


def ensemble_csv(config: SimConfig, rows: Sequence[list]) -> str:
    return metadata_line(config, seed=config.base_seed) + "\n" + _csv([ENSEMBLE_COLUMNS, *rows])


SERIES_COLUMNS = ("period", "s_s", "j_s", "u", "growth", "w", "team_eff", "partitions", "walls",
                  "r_w")


def _count(x: float) -> int | float:
    return int(x) if math.isfinite(x) else x


def series_csv(config: SimConfig, run: RunResult) -> str:
    s = run.series
    rows = [[t + 1, int(s["s_s"][t]), int(s["j_s"][t]), int(s["u"][t]), s["growth"][t],
             s["w"][t], s["team"][t], int(s["partitions"][t]), _count(s["walls"][t]), s["r_w"][t]]
            for t in range(run.periods)]
    head = metadata_line(config, seed=run.seed, termination=run.termination.value)
    return head + "\n" + _csv([SERIES_COLUMNS, *rows])


def mean_series_csv(config: SimConfig, s: EnsembleSummary) -> str:
    ms = s.mean_series or {}
    keys = [k for k in ("s_s", "u", "growth", "walls") if k in ms]
    n = len(next(iter(ms.values()))) if ms else 0
    rows = [[t + 1] + [ms[k][t] for k in keys] for t in range(n)]
    return (metadata_line(config, seed=config.base_seed, steady=s.steady) + "\n"
            + _csv([("period", *keys), *rows]))


def states_text(config: SimConfig, run: RunResult, t: int) -> str:
    return (metadata_line(config, seed=run.seed, period=t) + "\n"
            + format_states(run.snapshots[t]))


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


# --- argument handling -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--preset", choices=sorted(PRESETS), help="start from a named scenario")
    g.add_argument("--config", type=Path, help="key=value file (flags override it)")
    g.add_argument("--network", choices=[k.value for k in NetworkKind])
    g.add_argument("--n", type=int, help="number of agents")
    g.add_argument("--z", type=int, help="lattice coordination number")
    g.add_argument("--sw", choices=["none", "influence", "collab", "both"])
    g.add_argument("--p", type=float, help="shortcuts per regular link")
    g.add_argument("--alpha-prime", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--periods", type=int)
    g.add_argument("--window", type=int, help="tail window in generations")
    g.add_argument("--runs", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--skilled-fraction", type=float)
    c = p.add_argument_group("conventions")
    c.add_argument("--newborn-view", choices=["promoted", "outgoing"])
    c.add_argument("--initial-rw", choices=["equal-wages", "closed-form"])
    c.add_argument("--distance", choices=["auto", "lattice", "graph"])
    c.add_argument("--crg-role", choices=["collab", "both"])


def parse_config(args: argparse.Namespace) -> SimConfig:
    """Preset, then config file, then explicit flags, later ones winning."""
    values: dict[str, object] = {}
    preset = args.preset
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
        file_values = parse_kv(text, str(args.config))
        preset = preset or file_values.pop("preset", None)
        file_values.pop("preset", None)
        values.update(file_values)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    base = None
    if preset is not None:
        try:
            base = get_preset(preset).config
        except KeyError as exc:
            raise ConfigError("preset", str(exc.args[0])) from None
    return build_config(values, base)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edugrowth", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one economy, per-period series")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--snapshot", type=int, action="append", default=None,
                   help="also dump agent states at this period (repeatable)")

    p = sub.add_parser("ensemble", help="steady-state means over many runs")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mean-series", action="store_true",
                   help="also write run-averaged S_s, U, growth and wall series")

    p = sub.add_parser("tables", help="rerun the steady-state tables")
    p.add_argument("--table", choices=["1", "2", "all"], default="all")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("mf", help="mean-field fixed point and calibration")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--alpha-prime", type=float, default=0.45)
    p.add_argument("--delta", type=float, default=0.011)
    p.add_argument("--lam", type=float, help="lambda = delta alpha' (default: their product)")
    p.add_argument("--annual-growth", type=float, default=0.03)
    p.add_argument("--years", type=float, default=25.0, help="years per period")
    p.add_argument("--u-star", type=float, default=200.0)

    p = sub.add_parser("metrics", help="clustering and path length of a generated network")
    _add_config_flags(p)
    p.add_argument("--edges", type=Path, help="write the edge list here")
    return parser


# --- commands --------------------------------------------------------------

def _cmd_run(args) -> int:
    config = parse_config(args)
    snaps = set(args.snapshot or [config.periods])
    run = run_single(config, config.base_seed, snapshots=snaps)
    out: Path = args.out
    _write(out / f"series_{run.seed}.csv", series_csv(config, run))
    for t in sorted(snaps):
        if t in run.snapshots:
            _write(out / f"states_{run.seed}_{t}.txt", states_text(config, run, t))
        else:
            log.warning("no state at period %d (run ended at %d)", t, run.periods)
    print(f"termination: {run.termination.value} after {run.periods} periods")
    if run.summary:
        for k, v in run.summary.items():
            print(f"{k:>12s} {fmt(v)}")
    return EXIT_OK


def _cmd_ensemble(args) -> int:
    config = parse_config(args)
    s = run_ensemble(config, workers=args.workers, keep_series=args.mean_series)
    name = args.preset or "custom"
    _write(args.out / "ensemble.csv", ensemble_csv(config, [ensemble_row(name, s)]))
    if args.mean_series and s.mean_series:
        _write(args.out / "mean_series.csv", mean_series_csv(config, s))
    if s.steady == 0:
        print(f"warning: {s.diagnostic}", file=sys.stderr)
    _print_summary(name, s)
    return EXIT_OK


def _print_summary(name: str, s: EnsembleSummary) -> None:
    print(f"{name}: {s.steady} steady, {s.collapsed} collapsed, {s.trapped} trapped")
    for k in ("growth", "w", "s_s", "u", "partitions", "team"):
        print(f"{k:>12s} {fmt(s.mean[k]):>12s} +- {fmt(s.stderr[k])}")


TABLE_COLUMNS = ("scenario", "column", "growth", "w", "s_s", "u", "partitions", "team_eff",
                 "growth_se", "w_se", "s_s_se", "u_se", "partitions_se", "team_eff_se",
                 "steady", "collapsed", "trapped", "ref_growth", "ref_w", "ref_s_s", "ref_u",
                 "ref_partitions", "ref_team_eff")


def _cmd_tables(args) -> int:
    if args.runs < 1:
        raise ConfigError("runs", "must be >= 1")
    tables = {"1": [TABLE1], "2": [TABLE2], "all": [TABLE1, TABLE2]}[args.table]
    keys = ("growth", "w", "s_s", "u", "partitions", "team")
    for table in tables:
        rows = []
        first = None
        for name, sc in table.items():
            config = sc.config.with_(runs=args.runs, base_seed=args.seed)
            first = first or config
            s = run_ensemble(config, workers=args.workers)
            rows.append([name, sc.column] + [s.mean[k] for k in keys]
                        + [s.stderr[k] for k in keys] + [s.steady, s.collapsed, s.trapped]
                        + [sc.reported.get(k, math.nan) for k in keys])
            _print_summary(name, s)
        mf = MEAN_FIELD_REPORTED
        fp = _mean_field(first.network.n_agents)
        rows.append(["mean-field", "Mean Field", fp.growth, fp.w, fp.s_s, fp.u]
                    + [math.nan] * 8 + [0, 0, 0]
                    + [mf["growth"], mf["w"], mf["s_s"], mf["u"], math.nan, math.nan])
        number = 1 if table is TABLE1 else 2
        head = metadata_line(first, seed=args.seed, table=number)
        _write(args.out / f"table{number}.csv", head + "\n" + _csv([TABLE_COLUMNS, *rows]))
    return EXIT_OK


def _mean_field(n: int):
    cal = calibrate(0.03, 25, n / 2, n)
    return mf_fixed_point(0.005, n, alpha_prime=0.45, delta=cal.delta)


def _cmd_mf(args) -> int:
    lam = args.delta * args.alpha_prime if args.lam is None else args.lam
    try:
        fp = mf_fixed_point(lam, args.n, alpha_prime=args.alpha_prime)
        cal = calibrate(args.annual_growth, args.years, args.u_star, args.n)
    except ValueError as exc:
        raise ConfigError("mf", str(exc)) from None
    r_iter, steps, ok = mf_iterate(lam, args.n, 0.5)
    rows = [
        ("lambda", lam), ("R*", fp.r), ("w*", fp.w), ("U*", fp.u), ("S_s*", fp.s_s),
        ("growth*", fp.growth), ("R iterated", r_iter), ("iterations", steps),
        ("calibrated delta", cal.delta), ("calibrated alpha'", cal.alpha_prime),
        ("calibrated lambda", cal.lam), ("target growth", cal.growth),
    ]
    print("fixed point")
    for label, v in rows[:8]:
        print(f"  {label:<20s} {fmt(v)}")
    if not ok:
        print("  (iteration did not converge)")
    print(f"calibration ({args.annual_growth:g}/yr, {args.years:g} yr, U*={args.u_star:g})")
    for label, v in rows[8:]:
        print(f"  {label:<20s} {fmt(v)}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    config = parse_config(args)
    spec = config.network
    rng = np.random.default_rng(config.base_seed)
    g = build_network(spec, rng)
    if spec.n_shortcuts:
        g = refresh_shortcuts(g, spec.n_shortcuts, rng)
    print(f"nodes {g.n}  regular {len(g.regular)}  shortcuts {len(g.shortcuts)}")
    print(f"clustering coefficient {fmt(clustering_coefficient(g))}")
    try:
        print(f"characteristic path length {fmt(characteristic_path_length(g))}")
    except ValueError as exc:
        print(f"characteristic path length undefined: {exc}")
    if args.edges is not None:
        _write(args.edges, metadata_line(config) + "\n" + format_edge_list(g))
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "ensemble": _cmd_ensemble, "tables": _cmd_tables, "mf": _cmd_mf,
             "metrics": _cmd_metrics}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
