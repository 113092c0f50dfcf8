"""Ideas stock, output, wages and the education weight."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .topology import Graph, path_lengths, shortest_distances


@dataclass(frozen=True)
class EconParams:
    delta: float = 0.011
    gamma: float = 0.0
    alpha_prime: float = 0.45

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if not self.alpha_prime > 0:
            raise ValueError(f"alpha_prime must be positive, got {self.alpha_prime}")


class Wages(NamedTuple):
    y: float
    y_s: float
    y_u: float
    w_s: float
    w_u: float
    poverty: bool
    collapsed: bool

    @property
    def relative(self) -> float:
        """w = w_s / w_u."""
        return self.w_s / self.w_u if self.w_u > 0 else 0.0


@dataclass(frozen=True)
class EconomyState:
    a: float
    delta_a: float
    wages: Wages

    @property
    def growth(self) -> float:
        """Growth of the ideas stock, dA / A(t-1)."""
        return self.delta_a / (self.a - self.delta_a)


def team_density(
    skilled_seniors: Sequence[int] | np.ndarray,
    collab: Graph | np.ndarray,
    metric: str = "graph",
) -> float:
    """D = (1/S_s) * sum over ordered pairs i != j of skilled seniors of 1/d_ij.

    ``collab`` is the collaboration graph or a precomputed full distance
    matrix. On a graph, ``metric="graph"`` uses hop counts and
    ``metric="lattice"`` uses link lengths (see :attr:`Graph.lengths`).
    Unreachable pairs add nothing.
    """
    idx = np.asarray(skilled_seniors, dtype=np.int64).ravel()
    k = len(idx)
    if k <= 1:
        return 0.0
    if isinstance(collab, Graph):
        if metric == "graph":
            d = shortest_distances(collab, idx)[:, idx]
        elif metric == "lattice":
            d = path_lengths(collab, idx)[:, idx]
        else:
            raise ValueError(f"unknown metric {metric!r}")
    else:
        d = np.asarray(collab)[np.ix_(idx, idx)]
    return density_from_distances(d)


def density_from_distances(d: np.ndarray) -> float:
    """Team density from the square distance matrix among skilled seniors."""
    k = len(d)
    if k <= 1:
        return 0.0
    with np.errstate(divide="ignore"):
        inv = 1.0 / d
    np.fill_diagonal(inv, 0.0)
    return float(inv.sum() / k)


def update_ideas(a_prev: float, s_s: int, d: float, params: EconParams) -> tuple[float, float]:
    """Return ``(A, dA)`` with dA = A(t-1) (delta S_s + gamma D)."""
    if not a_prev > 0:
        raise ValueError(f"ideas stock must be positive, got {a_prev}")
    delta_a = a_prev * (params.delta * s_s + params.gamma * d)
    return a_prev + delta_a, delta_a


def compute_wages(a_prev: float, delta_a: float, u: int, s_s: int) -> Wages:
    """Output split by the social pact Y_s = dA U, Y_u = A(t-1) U."""
    y_s = delta_a * u
    y_u = a_prev * u
    w_s = y_s / s_s if s_s > 0 else 0.0
    return Wages(y_s + y_u, y_s, y_u, w_s, a_prev, s_s == 0, u == 0)


def relative_weight(w_s_prev: float, w_u_prev: float, alpha_prime: float) -> float:
    """r_w(t) = alpha' w_s(t-1) / w_u(t-1), zero if no unskilled wage exists."""
    if w_u_prev <= 0:
        return 0.0
    return alpha_prime * w_s_prev / w_u_prev


def closed_form_weight(u_prev: int, params: EconParams) -> float:
    """r_w(t) = alpha' delta U(t-1), exact when gamma = 0."""
    return params.alpha_prime * params.delta * u_prev


def advance(a_prev: float, s_s: int, u: int, d: float, params: EconParams) -> EconomyState:
    a, delta_a = update_ideas(a_prev, s_s, d, params)
    return EconomyState(a, delta_a, compute_wages(a_prev, delta_a, u, s_s))
