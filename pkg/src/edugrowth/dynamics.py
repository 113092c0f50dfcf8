"""Agent population and the synchronous junior/senior/newborn update."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .topology import Graph

NewbornView = Literal["promoted", "outgoing"]


class AgentState(enum.IntEnum):
    SKILLED_JUNIOR = 0
    UNSKILLED_JUNIOR = 1
    SKILLED_SENIOR = 2
    UNSKILLED_SENIOR = 3


class PopulationError(ValueError):
    """Population counts break the overlapping-generations identities."""


class Counts(NamedTuple):
    js: int
    ju: int
    ss: int
    su: int
    u: int


@dataclass(frozen=True, eq=False)
class Population:
    states: np.ndarray
    t: int = 0

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.int8)
        if states.ndim != 1:
            raise ValueError("states must be a 1d vector")
        if states.size and (states.min() < 0 or states.max() > 3):
            raise ValueError("agent states must lie in 0..3")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.states, other.states)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def skilled(self) -> np.ndarray:
        """Boolean skill class per agent (juniors and seniors alike)."""
        return (self.states == 0) | (self.states == 2)

    def skilled_seniors(self) -> np.ndarray:
        return np.flatnonzero(self.states == AgentState.SKILLED_SENIOR)


def counts(pop: Population) -> Counts:
    tally = np.bincount(pop.states, minlength=4)
    js, ju, ss, su = (int(x) for x in tally)
    return Counts(js, ju, ss, su, su + ju)


def check_population(pop: Population, prev: Population | None = None) -> None:
    """Raise :class:`PopulationError` unless J_s+J_u = S_s+S_u = N/2 and,
    given the previous period, S_s(t) = J_s(t-1) and S_u(t) = J_u(t-1)."""
    c = counts(pop)
    half = pop.n / 2
    if c.js + c.ju != half or c.ss + c.su != half:
        raise PopulationError(
            f"t={pop.t}: juniors {c.js + c.ju}, seniors {c.ss + c.su}, expected {half:g} each")
    if prev is not None:
        p = counts(prev)
        if c.ss != p.js or c.su != p.ju:
            raise PopulationError(
                f"t={pop.t}: seniors ({c.ss}, {c.su}) differ from previous juniors ({p.js}, {p.ju})")


def initialize(n: int, skilled_fraction: float, rng: np.random.Generator) -> Population:
    """Random placement of ``skilled_fraction * n`` skilled agents.

    Each skill class is split evenly between juniors and seniors.
    """
    if n <= 0 or n % 2:
        raise ValueError(f"population size must be positive and even, got {n}")
    if not 0.0 <= skilled_fraction <= 1.0:
        raise ValueError(f"skilled_fraction must lie in [0, 1], got {skilled_fraction}")
    n_skilled = round(skilled_fraction * n)
    if abs(n_skilled - skilled_fraction * n) > 1e-9 or n_skilled % 2 or (n - n_skilled) % 2:
        raise ValueError(
            f"skilled_fraction={skilled_fraction} does not split N={n} into even skill classes")
    hs, hu = n_skilled // 2, (n - n_skilled) // 2
    states = np.repeat(np.array([0, 2, 1, 3], dtype=np.int8), [hs, hs, hu, hu])
    return Population(rng.permutation(states), 0)


def decide(r_w: float, s_neighbors: int, u_neighbors: int) -> AgentState:
    """Newborn choice: study iff ``r_w * s_neighbors > u_neighbors`` (strict)."""
    if r_w * s_neighbors > u_neighbors:
        return AgentState.SKILLED_JUNIOR
    return AgentState.UNSKILLED_JUNIOR


def senior_neighbor_counts(
    pop: Population, influence: Graph, view: NewbornView = "promoted"
) -> tuple[np.ndarray, np.ndarray]:
    """Skilled and unskilled senior neighbours seen by each site's newborn.

    ``"promoted"`` counts the seniors of the new period (last period's
    juniors); ``"outgoing"`` counts last period's seniors, who are being
    replaced in the same update.
    """
    st = pop.states
    if view == "promoted":
        skilled, unskilled = st == 0, st == 1
    elif view == "outgoing":
        skilled, unskilled = st == 2, st == 3
    else:
        raise ValueError(f"unknown newborn view {view!r}")
    m = influence.matrix
    s = m @ skilled.astype(np.float64)
    u = m @ unskilled.astype(np.float64)
    return s, u


def step(
    pop: Population, influence: Graph, r_w: float, view: NewbornView = "promoted"
) -> Population:
    """Advance one period: juniors age, seniors are replaced by newborns."""
    if influence.n != pop.n:
        raise ValueError(f"graph has {influence.n} nodes, population {pop.n}")
    st = pop.states
    s, u = senior_neighbor_counts(pop, influence, view)
    newborn = np.where(r_w * s > u, AgentState.SKILLED_JUNIOR, AgentState.UNSKILLED_JUNIOR)
    new = np.where(st < 2, st + 2, newborn).astype(np.int8)
    return Population(new, pop.t + 1)


def format_states(pop: Population) -> str:
    return " ".join(str(int(x)) for x in pop.states) + "\n"


def parse_states(text: str, t: int = 0) -> Population:
    return Population(np.array([int(x) for x in text.split()], dtype=np.int8), t)
