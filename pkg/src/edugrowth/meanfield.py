"""Representative-agent recursion, its fixed point, and calibration."""

from __future__ import annotations

import math
from typing import NamedTuple


class FixedPoint(NamedTuple):
    r: float
    w: float
    u: float
    s_s: float
    growth: float


class Calibration(NamedTuple):
    delta: float
    alpha_prime: float
    lam: float
    growth: float


def mf_step(r_prev: float, r_prev2: float, lam: float, n: int) -> float:
    """R(t) = lambda N/2 (1/(1+R(t-1)) + 1/(1+R(t-2))) R(t-1)."""
    if r_prev < 0 or r_prev2 < 0:
        raise ValueError("skilled/unskilled ratios must be non-negative")
    return lam * n / 2 * (1 / (1 + r_prev) + 1 / (1 + r_prev2)) * r_prev


def mf_iterate(
    lam: float, n: int, r0: float, r1: float | None = None,
    tol: float = 1e-12, max_steps: int = 100_000,
) -> tuple[float, int, bool]:
    """Iterate :func:`mf_step` until successive values differ by less than ``tol``.

    Returns ``(R, steps, converged)``.
    """
    older, prev = r0, r0 if r1 is None else r1
    for k in range(1, max_steps + 1):
        cur = mf_step(prev, older, lam, n)
        if abs(cur - prev) < tol:
            return cur, k, True
        older, prev = prev, cur
    return prev, max_steps, False


def mf_fixed_point(
    lam: float, n: int, *, alpha_prime: float | None = None, delta: float | None = None,
) -> FixedPoint:
    """Stationary values of the mean-field model.

    ``lam`` is delta * alpha'. Give ``alpha_prime`` or ``delta`` (or both,
    e.g. rounded published values) to get the wage and growth entries; a
    missing one is derived from ``lam``.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if alpha_prime is None and delta is None:
        raise ValueError("need alpha_prime or delta")
    if alpha_prime is None:
        alpha_prime = lam / delta
    if delta is None:
        delta = lam / alpha_prime
    if lam * n < 1:
        return FixedPoint(0.0, math.nan, float(n), 0.0, 0.0)
    s_s = n / 2 - 1 / (2 * lam)
    return FixedPoint(lam * n - 1, 1 / alpha_prime, 1 / lam, s_s, delta * s_s)


def calibrate(annual_growth: float, years_per_period: float, u_star: float, n: int) -> Calibration:
    """Parameters giving a target per-period growth at U* unskilled workers."""
    if annual_growth <= 0:
        raise ValueError("a positive growth target is needed to fix delta")
    if not 0 < u_star < n:
        raise ValueError(f"U* must lie in (0, N), got {u_star}")
    s_star = n / 2 - u_star / 2
    growth = (1 + annual_growth) ** years_per_period - 1
    lam = 1 / u_star
    delta = growth / s_star
    return Calibration(delta, lam / delta, lam, growth)
