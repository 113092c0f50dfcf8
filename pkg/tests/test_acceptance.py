"""Acceptance criteria, each at its stated tolerance.

Every test reports one PASS/FAIL line (collected in the pytest terminal
summary) before asserting. Running this file as a script prints the same
lines without pytest.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest

from edugrowth.cli import main as cli_main
from edugrowth.economy import team_density
from edugrowth.harness import InvariantError, SimConfig, count_partitions, run_ensemble, run_single
from edugrowth.dynamics import Population
from edugrowth.meanfield import calibrate, mf_fixed_point
from edugrowth.presets import MEAN_FIELD_REPORTED, PRESETS
from edugrowth.topology import Graph, NetworkSpec, build_ring, build_square, shortest_distances

import oracles

ORDER_RUNS = 200


@lru_cache(maxsize=None)
def ensemble(name: str, runs: int, keep_series: bool = False):
    return run_ensemble(PRESETS[name].config.with_(runs=runs, base_seed=0),
                        keep_series=keep_series)


def _above(a, b, key):
    """a exceeds b with non-overlapping +-2 stderr intervals."""
    return a.mean[key] - 2 * a.stderr[key] > b.mean[key] + 2 * b.stderr[key]


def _pm(s, key):
    return f"{s.mean[key]:.4g}+-{2 * s.stderr[key]:.2g}"


# 1 ---------------------------------------------------------------------------

def test_ac1_mean_field_exactness(report):
    fp = mf_fixed_point(0.005, 400, alpha_prime=0.45)
    exact = (abs(fp.r - 1) <= 1e-12 and abs(fp.u - 200) <= 1e-12
             and abs(fp.s_s - 100) <= 1e-12 and abs(fp.w - 1 / 0.45) <= 1e-12)
    growth = mf_fixed_point(0.005, 400, alpha_prime=0.45, delta=0.010938).growth
    exact &= abs(growth - 1.0938) <= 1e-12
    ref = MEAN_FIELD_REPORTED
    table = (round(growth, 2) == ref["growth"] and round(fp.w, 2) == ref["w"]
             and fp.s_s == ref["s_s"] and fp.u == ref["u"])
    ok = report("AC1", exact and table,
                f"R*={fp.r!r} U*={fp.u!r} S_s*={fp.s_s!r} w*={fp.w!r} growth={growth!r}")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_ac2_calibration(report):
    cal = calibrate(0.03, 25, 200, 400)
    ok = abs(cal.delta - 0.010938) <= 1e-6 and abs(cal.alpha_prime - 0.4571) <= 1e-4
    ok &= round(cal.delta, 3) == 0.011 and round(cal.alpha_prime, 2) == 0.46
    ok = report("AC2", ok, f"delta={cal.delta:.7f} alpha'={cal.alpha_prime:.5f} "
                           f"(rounded baseline 0.011 / 0.45)")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_ac3_ring_baseline(report):
    cfg = PRESETS["ring-base"].config.with_(runs=500, base_seed=0)
    t0 = time.perf_counter()
    s = run_ensemble(cfg)
    elapsed = time.perf_counter() - t0
    targets = {"growth": (0.666, 0.15), "w": (3.05, 0.15), "s_s": (60.6, 0.15),
               "u": (277.5, 0.15), "partitions": (23.1, 0.25)}
    parts = []
    ok = s.steady > 0
    for key, (ref, tol) in targets.items():
        good = abs(s.mean[key] - ref) <= tol * ref
        ok &= good
        parts.append(f"{key}={s.mean[key]:.4g} (ref {ref}, {100 * tol:.0f}%)")
    ok &= elapsed <= 120
    ok = report("AC3", ok, ", ".join(parts)
                + f"; {s.steady}/500 steady; {elapsed:.1f}s")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_ac4_orderings(report):
    r = {name: ensemble(name, ORDER_RUNS) for name in (
        "ring-base", "ring-team", "sw-dec-p10-base", "sw-both-p03", "sw-both-p10",
        "crg-base", "crg-team", "ring4-base", "ring4-team", "sq-base", "sq-team")}
    checks = []

    a, b = r["ring-team"], r["ring-base"]
    checks.append(("team>base", _above(a, b, "growth") and _above(a, b, "s_s")
                   and _above(b, a, "u"),
                   f"growth {_pm(a, 'growth')} vs {_pm(b, 'growth')}, "
                   f"U {_pm(a, 'u')} vs {_pm(b, 'u')}"))

    a = r["sw-dec-p10-base"]
    checks.append(("sw-dec>ring", _above(a, b, "growth") and _above(b, a, "w"),
                   f"growth {_pm(a, 'growth')} vs {_pm(b, 'growth')}, "
                   f"w {_pm(a, 'w')} vs {_pm(b, 'w')}"))

    p10, p03, ring = r["sw-both-p10"], r["sw-both-p03"], r["ring-team"]
    checks.append(("sw-both p10>p03>ring", _above(p10, p03, "growth")
                   and _above(p03, ring, "growth"),
                   f"{_pm(p10, 'growth')} > {_pm(p03, 'growth')} > {_pm(ring, 'growth')}"))

    cb, rb = r["crg-base"], r["ring-base"]
    gap = abs(cb.mean["growth"] - rb.mean["growth"])
    band = 2 * (cb.stderr["growth"] + rb.stderr["growth"])
    ct = r["crg-team"]
    checks.append(("crg", gap <= band and _above(ct, ring, "growth")
                   and ct.mean["growth"] > 1.5 * ring.mean["growth"],
                   f"base {_pm(cb, 'growth')} vs ring {_pm(rb, 'growth')} (|diff| {gap:.3g} "
                   f"<= {band:.3g}); team {_pm(ct, 'growth')} vs ring {_pm(ring, 'growth')}"))

    sq, r4 = r["sq-team"], r["ring4-team"]
    sqb, r4b = r["sq-base"], r["ring4-base"]
    fewer = (_above(r4b, sqb, "partitions") and _above(r4, sq, "partitions")
             and sqb.mean["partitions"] < 0.5 * r4b.mean["partitions"])
    checks.append(("z=4 square vs ring", _above(sq, r4, "growth") and fewer,
                   f"team growth {_pm(sq, 'growth')} vs {_pm(r4, 'growth')}; base partitions "
                   f"{_pm(sqb, 'partitions')} vs {_pm(r4b, 'partitions')}"))

    all_ok = all(ok for _, ok, _ in checks)
    report("AC4", all_ok, f"{sum(ok for _, ok, _ in checks)}/{len(checks)} orderings hold, "
                          f"{ORDER_RUNS} runs each")
    for label, ok, detail in checks:
        report.note(f"      {'ok ' if ok else 'BAD'} {label}: {detail}")
    assert all_ok, [label for label, ok, _ in checks if not ok]


# 5 ---------------------------------------------------------------------------

def _invariant_configs():
    net = {
        "ring": NetworkSpec("ring", 400, 6),
        "square": NetworkSpec("square", 400, 4),
        "crg": NetworkSpec("crg", 400, 6),
        "small-world": NetworkSpec("ring", 400, 6, "both", 0.1),
    }
    base, team = PRESETS["ring-base"].config.econ, PRESETS["ring-team"].config.econ
    return {k: (SimConfig(v, base), SimConfig(v, team)) for k, v in net.items()}


def test_ac5_invariants(report):
    violations = {}
    runs = 0
    for kind, (base, team) in _invariant_configs().items():
        bad = 0
        for seed in range(50):
            cfg = base if seed % 2 == 0 else team
            # a small-world run is slow; a shorter horizon still checks every period
            if kind == "small-world":
                cfg = cfg.with_(periods=200, window=50)
            try:
                run_single(cfg, seed, validate=True, fast_forward=False)
            except InvariantError:
                bad += 1
            runs += 1
        violations[kind] = bad
    ok = report("AC5", sum(violations.values()) == 0,
                f"{runs} runs (50 per network kind, base and team alternating), "
                f"violations {violations}")
    assert ok


# 6 ---------------------------------------------------------------------------

def test_ac6_oracles(report):
    rng = np.random.default_rng(2024)
    bfs_bad = dens_bad = part_bad = 0
    for _ in range(200):
        n = int(rng.integers(1, 65))
        m = int(rng.integers(0, min(n * (n - 1) // 2, 3 * n) + 1))
        edges = oracles.random_simple_graph(rng, n, m)
        g = Graph(n, tuple(edges))
        fw = oracles.floyd_warshall(n, edges)
        bfs_bad += not np.array_equal(shortest_distances(g), fw)
        nodes = rng.choice(n, size=int(rng.integers(0, n + 1)), replace=False)
        got, want = team_density(nodes, g), oracles.density_double_loop(nodes, fw)
        dens_bad += not math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-15)
    for _ in range(200):
        states = rng.integers(0, 4, 64).astype(np.int8)
        cls = ((states == 0) | (states == 2)).tolist()
        if rng.random() < 0.5:
            z = int(rng.choice([2, 4, 6]))
            want = oracles.flood_fill_domains(cls, oracles.ring_neighbours(64, 2))
            got = count_partitions(Population(states), build_ring(64, z))
        else:
            z = int(rng.choice([4, 8]))
            want = oracles.flood_fill_domains(cls, oracles.torus_neighbours(8, z))
            got = count_partitions(Population(states), build_square(64, z))
        part_bad += got != want
    ok = report("AC6", bfs_bad == dens_bad == part_bad == 0,
                f"BFS vs Floyd-Warshall {200 - bfs_bad}/200, team density vs double loop "
                f"{200 - dens_bad}/200, partitions vs flood fill {200 - part_bad}/200")
    assert ok


# 7 ---------------------------------------------------------------------------

RELAXATION = 300  # longest relaxation time reported for the ring


def test_ac7_coarsening(report):
    base = ensemble("ring-base", ORDER_RUNS, True)
    team = ensemble("ring-team", ORDER_RUNS, True)
    wb, wt = base.mean_series["walls"], team.mean_series["walls"]
    monotone = bool(np.all(np.diff(wb[RELAXATION:]) <= 0))
    gen = wb.reshape(-1, 2).mean(axis=1)
    decays = wb[0] > 3 * wb[-1]
    tail = slice(-2 * PRESETS["ring-base"].config.window, None)
    below = wt[tail].mean() <= wb[tail].mean()
    first_flat = next(k for k in range(len(gen)) if np.all(np.diff(gen[k:]) <= 0))
    ok = report("AC7", monotone and decays and below,
                f"walls {wb[0]:.1f} -> {wb[-1]:.2f} (base), {wt[-1]:.2f} (team); "
                f"non-increasing from t={RELAXATION}: {monotone} "
                f"(generation averages non-increasing from t={2 * first_flat}); "
                f"team tail {wt[tail].mean():.2f} <= base {wb[tail].mean():.2f}: {below}")
    assert ok


# 8 ---------------------------------------------------------------------------

def test_ac8_determinism(report, tmp_path):
    jobs = [
        ["run", "--preset", "sw-both-p03", "--periods", "60", "--window", "10", "--seed", "5",
         "--snapshot", "60"],
        ["run", "--preset", "crg-team", "--seed", "11"],
        ["ensemble", "--preset", "sq-team", "--runs", "8", "--mean-series"],
    ]
    same = True
    files = 0
    for i, args in enumerate(jobs):
        dirs = [tmp_path / f"{i}{tag}" for tag in "ab"]
        for d in dirs:
            assert cli_main(args + ["--out", str(d)]) == 0
        names = sorted(p.name for p in dirs[0].iterdir())
        same &= names == sorted(p.name for p in dirs[1].iterdir())
        for name in names:
            same &= (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
            files += 1
    ok = report("AC8", same, f"{files} output files byte-identical across two invocations")
    assert ok


# N-scaling smoke check -------------------------------------------------------

def test_n_scaling_smoke(report):
    cfg = PRESETS["ring-base"].config.with_(runs=20)
    small = run_ensemble(cfg)
    big = run_ensemble(cfg.with_(network=NetworkSpec("ring", 1600, 6)))
    ok = report("N", big.mean["growth"] > small.mean["growth"],
                f"ring base growth N=400 {small.mean['growth']:.3f}, "
                f"N=1600 {big.mean['growth']:.3f} (directional only)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
