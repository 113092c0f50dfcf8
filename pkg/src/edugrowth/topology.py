"""Influence and collaboration networks.

Graphs are immutable values: a fixed set of ``regular`` edges (the mother
lattice or the random graph) plus an optional set of ``shortcut`` edges that
is redrawn wholesale every period by :func:`refresh_shortcuts`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

Edge = tuple[int, int]


class NetworkKind(str, enum.Enum):
    RING = "ring"
    SQUARE = "square"
    CRG = "crg"


class SWMode(str, enum.Enum):
    NONE = "none"
    INFLUENCE = "influence"
    COLLABORATION = "collab"
    BOTH = "both"

    @property
    def influence(self) -> bool:
        return self in (SWMode.INFLUENCE, SWMode.BOTH)

    @property
    def collaboration(self) -> bool:
        return self in (SWMode.COLLABORATION, SWMode.BOTH)


class ConnectivityError(RuntimeError):
    """A connected random graph could not be drawn within the attempt budget."""


class ShortcutWarning(UserWarning):
    """Fewer shortcuts than requested could be placed."""


@dataclass(frozen=True)
class NetworkSpec:
    kind: NetworkKind = NetworkKind.RING
    n_agents: int = 400
    degree: int = 6
    sw_mode: SWMode = SWMode.NONE
    shortcut_prob: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", NetworkKind(self.kind))
        object.__setattr__(self, "sw_mode", SWMode(self.sw_mode))
        if self.n_agents <= 0:
            raise ValueError(f"n_agents must be positive, got {self.n_agents}")
        if self.shortcut_prob < 0:
            raise ValueError(f"shortcut_prob must be >= 0, got {self.shortcut_prob}")
        if self.shortcut_prob > 0 and self.sw_mode is SWMode.NONE:
            raise ValueError("shortcut_prob > 0 requires a small-world mode")
        if self.kind is NetworkKind.RING:
            _check_ring(self.n_agents, self.degree)
        elif self.kind is NetworkKind.SQUARE:
            _check_square(self.n_agents, self.degree)
        elif self.n_regular_edges > self.n_agents * (self.n_agents - 1) // 2:
            raise ValueError("too many edges for a simple graph")

    @property
    def n_regular_edges(self) -> int:
        """L = N z / 2."""
        return self.n_agents * self.degree // 2

    @property
    def n_shortcuts(self) -> int:
        """L' = L P, rounded half up."""
        return int(math.floor(self.n_regular_edges * self.shortcut_prob + 0.5))


def _normalize(edges: Iterable[Edge]) -> tuple[Edge, ...]:
    return tuple(sorted((min(u, v), max(u, v)) for u, v in edges))


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with edges split into regular and shortcut classes.

    ``kind`` and ``degree`` describe the regular part (``"custom"`` for graphs
    assembled by hand); they drive lattice distances and partition counting.
    """

    n: int
    regular: tuple[Edge, ...]
    shortcuts: tuple[Edge, ...] = ()
    kind: str = "custom"
    degree: int = 0
    _edge_set: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        regular = _normalize(self.regular)
        shortcuts = _normalize(self.shortcuts)
        object.__setattr__(self, "regular", regular)
        object.__setattr__(self, "shortcuts", shortcuts)
        seen = set()
        for u, v in regular + shortcuts:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"multi-edge ({u}, {v})")
            seen.add((u, v))
        object.__setattr__(self, "_edge_set", frozenset(seen))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.regular, self.shortcuts, self.kind, self.degree) == (
            other.n, other.regular, other.shortcuts, other.kind, other.degree)

    def __hash__(self):
        return hash((self.n, self.regular, self.shortcuts, self.kind, self.degree))

    @property
    def n_edges(self) -> int:
        return len(self._edge_set)

    def edges(self) -> tuple[Edge, ...]:
        return self.regular + self.shortcuts

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges():
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def matrix(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix (float, for neighbour counting)."""
        edges = self.edges()
        if not edges:
            return sparse.csr_matrix((self.n, self.n))
        e = np.asarray(edges, dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def dense(self) -> np.ndarray:
        """Boolean adjacency matrix."""
        return self.matrix.toarray() > 0

    @cached_property
    def lengths(self) -> sparse.csr_matrix:
        """Link lengths in units of the lattice reach.

        A regular ring link spanning k sites has length k/(z/2); every other
        link (square lattice, random graph, shortcut) has length 1.
        """
        if self.kind != NetworkKind.RING.value or not self.regular:
            return self.matrix
        reach = self.degree // 2
        reg = np.asarray(self.regular, dtype=np.int64)
        off = np.abs(reg[:, 0] - reg[:, 1])
        w_reg = np.minimum(off, self.n - off) / reach
        e = np.asarray(self.edges(), dtype=np.int64)
        w = np.concatenate([w_reg, np.ones(len(self.shortcuts))])
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        return np.asarray([len(a) for a in self.adjacency])

    def with_shortcuts(self, shortcuts: Iterable[Edge]) -> "Graph":
        """Same regular edges, new shortcut set (checked against the regular part only)."""
        base = self.regular_only()
        sc = _normalize(shortcuts)
        sc_set = set(sc)
        if len(sc_set) != len(sc):
            raise ValueError("repeated shortcut")
        for u, v in sc:
            if u == v or (u, v) in base._edge_set or not (0 <= u and v < self.n):
                raise ValueError(f"invalid shortcut ({u}, {v})")
        if not sc:
            return base
        g = object.__new__(Graph)
        for name, value in (("n", self.n), ("regular", base.regular), ("shortcuts", sc),
                            ("kind", self.kind), ("degree", self.degree),
                            ("_edge_set", base._edge_set | sc_set)):
            object.__setattr__(g, name, value)
        e = np.asarray(sc, dtype=np.int64)
        extra = sparse.csr_matrix(
            (np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
            shape=(self.n, self.n))
        g.__dict__["matrix"] = (base.matrix + extra).tocsr()
        g.__dict__["_base"] = base
        return g

    def regular_only(self) -> "Graph":
        if not self.shortcuts:
            return self
        base = self.__dict__.get("_base")
        if base is None:
            base = Graph(self.n, self.regular, (), self.kind, self.degree)
            self.__dict__["_base"] = base
        return base


def _check_ring(n: int, z: int) -> None:
    if z <= 0 or z % 2:
        raise ValueError(f"ring degree must be a positive even number, got z={z}")
    if z >= n:
        raise ValueError(f"ring degree z={z} must be smaller than N={n}")


def _check_square(n: int, z: int) -> None:
    side = math.isqrt(n)
    if side * side != n:
        raise ValueError(f"square lattice needs a perfect square N, got {n}")
    if z not in (4, 8):
        raise ValueError(f"square lattice degree must be 4 or 8, got {z}")
    min_side = 3 if z == 4 else 5
    if side < min_side:
        raise ValueError(f"z={z} needs a side of at least {min_side}, got {side}")


def build_ring(n: int, z: int) -> Graph:
    """Periodic 1d lattice, each node linked to i±1, ..., i±z/2."""
    _check_ring(n, z)
    edges = [(i, (i + k) % n) for i in range(n) for k in range(1, z // 2 + 1)]
    return Graph(n, tuple(edges), kind=NetworkKind.RING.value, degree=z)


def build_square(n: int, z: int) -> Graph:
    """Square torus with von Neumann (z=4) or Moore (z=8) neighbourhoods."""
    _check_square(n, z)
    side = math.isqrt(n)
    offsets = [(0, 1), (1, 0)] if z == 4 else [(0, 1), (1, 0), (1, 1), (1, -1)]
    edges = []
    for r in range(side):
        for c in range(side):
            for dr, dc in offsets:
                edges.append((r * side + c, ((r + dr) % side) * side + (c + dc) % side))
    return Graph(n, tuple(edges), kind=NetworkKind.SQUARE.value, degree=z)


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    return bool(np.isfinite(shortest_distances(g, [0])).all())


def build_crg(n: int, n_edges: int, rng: np.random.Generator, max_attempts: int = 1000) -> Graph:
    """Connected classical random graph by the random graph process.

    Random pairs are linked until ``n_edges`` distinct edges exist (loops and
    repeated pairs are discarded); disconnected outcomes are thrown away and
    the whole graph is redrawn.
    """
    if n_edges > n * (n - 1) // 2:
        raise ValueError(f"{n_edges} edges do not fit in a simple graph on {n} nodes")
    if n_edges < n - 1:
        raise ValueError(f"{n_edges} edges cannot connect {n} nodes")
    z = round(2 * n_edges / n) if n else 0
    for _ in range(max_attempts):
        chosen: set[Edge] = set()
        while len(chosen) < n_edges:
            need = n_edges - len(chosen)
            pairs = rng.integers(0, n, size=(2 * need + 8, 2))
            for u, v in pairs:
                if u == v:
                    continue
                e = (int(min(u, v)), int(max(u, v)))
                if e in chosen:
                    continue
                chosen.add(e)
                if len(chosen) == n_edges:
                    break
        g = Graph(n, tuple(chosen), kind=NetworkKind.CRG.value, degree=z)
        if is_connected(g):
            return g
    raise ConnectivityError(
        f"no connected graph with N={n}, L={n_edges} in {max_attempts} attempts")


def build_network(spec: NetworkSpec, rng: np.random.Generator) -> Graph:
    """Regular part of the network described by ``spec`` (no shortcuts)."""
    if spec.kind is NetworkKind.RING:
        return build_ring(spec.n_agents, spec.degree)
    if spec.kind is NetworkKind.SQUARE:
        return build_square(spec.n_agents, spec.degree)
    return build_crg(spec.n_agents, spec.n_regular_edges, rng)


def refresh_shortcuts(
    g: Graph,
    n_shortcuts: int,
    rng: np.random.Generator,
    eligible: Sequence[int] | np.ndarray | None = None,
) -> Graph:
    """Discard all shortcuts of ``g`` and draw ``n_shortcuts`` new ones.

    New shortcuts join distinct pairs of ``eligible`` nodes (all nodes by
    default) that are not regular neighbours, without replacement. If fewer
    pairs are available, all of them are used and a :class:`ShortcutWarning`
    is issued.
    """
    base = g.regular_only()
    if n_shortcuts <= 0:
        return base
    nodes = np.arange(g.n) if eligible is None else np.unique(np.asarray(eligible, dtype=np.int64))
    k = len(nodes)
    n_pairs = k * (k - 1) // 2
    if n_pairs:
        n_pairs -= int(base.dense[np.ix_(nodes, nodes)].sum()) // 2
    if n_pairs < n_shortcuts:
        warnings.warn(
            f"only {n_pairs} of {n_shortcuts} shortcuts fit among {k} eligible nodes",
            ShortcutWarning, stacklevel=2)
    if n_shortcuts > n_pairs // 2:
        iu, iv = np.triu_indices(k, 1)
        free = ~base.dense[nodes[iu], nodes[iv]]
        iu, iv = nodes[iu[free]], nodes[iv[free]]
        if n_pairs > n_shortcuts:
            idx = rng.choice(n_pairs, size=n_shortcuts, replace=False)
            iu, iv = iu[idx], iv[idx]
        return base.with_shortcuts(zip(iu.tolist(), iv.tolist()))

    # rejection sampling in batches, keeping the first copy of each new pair
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < n_shortcuts:
        need = n_shortcuts - len(keys)
        draws = nodes[rng.integers(0, k, size=(2 * need + 4, 2))]
        u, v = draws.min(axis=1), draws.max(axis=1)
        ok = (u != v) & ~base.dense[u, v]
        cand = np.concatenate([keys, u[ok] * g.n + v[ok]])
        _, first = np.unique(cand, return_index=True)
        keys = cand[np.sort(first)][:n_shortcuts]
    picked_set = zip((keys // g.n).tolist(), (keys % g.n).tolist())
    return base.with_shortcuts(picked_set)


def shortest_distances(g: Graph, sources: Sequence[int] | np.ndarray | None = None) -> np.ndarray:
    """Unweighted BFS distances, shape ``(len(sources), n)``; unreachable is ``inf``.

    All sources advance one level at a time as a boolean frontier matrix.
    """
    src = np.arange(g.n) if sources is None else np.asarray(sources, dtype=np.int64).ravel()
    dist = np.full((len(src), g.n), np.inf)
    if len(src) == 0:
        return dist
    rows = np.arange(len(src))
    dist[rows, src] = 0.0
    frontier = np.zeros((len(src), g.n), dtype=bool)
    frontier[rows, src] = True
    visited = frontier.copy()
    adj_t = g.matrix.T.tocsr()
    level = 0
    while frontier.any():
        level += 1
        reached = (adj_t @ frontier.T.astype(np.float64)).T > 0
        frontier = reached & ~visited
        dist[frontier] = level
        visited |= frontier
    return dist


def inverse_distance_sum(g: Graph, sources: Sequence[int] | np.ndarray) -> float:
    """Sum of 1/hops over ordered pairs of distinct ``sources``; unreachable pairs add 0.

    Breadth-first search from all sources at once, with the set of sources
    that reached each node packed into 64-bit words.
    """
    src = np.unique(np.asarray(sources, dtype=np.int64).ravel())
    k = len(src)
    if k < 2:
        return 0.0
    words = (k + 63) // 64
    seen = np.zeros((g.n, words), dtype=np.uint64)
    bit = np.arange(k)
    seen[src, bit // 64] = np.left_shift(np.uint64(1), (bit % 64).astype(np.uint64))
    a = g.matrix
    starts, nbrs = a.indptr[:-1], a.indices
    isolated = np.diff(a.indptr) == 0
    # reduceat returns the element at the start of an empty row; a trailing
    # zero row keeps that index valid and the row is cleared afterwards
    pad = np.zeros((1, words), dtype=np.uint64)
    frontier = seen
    seen = seen.copy()
    total, level = 0.0, 0
    while True:
        level += 1
        gathered = np.concatenate([frontier[nbrs], pad])
        reached = np.bitwise_or.reduceat(gathered, starts, axis=0)
        reached[isolated] = 0
        reached &= ~seen
        if not reached.any():
            return total
        seen |= reached
        frontier = reached
        total += int(np.bitwise_count(reached[src]).sum()) / level


def clustering_coefficient(g: Graph) -> float:
    """Mean local clustering; nodes of degree < 2 count as 0."""
    if g.n == 0:
        return 0.0
    total = 0.0
    for nbrs in g.adjacency:
        k = len(nbrs)
        if k < 2:
            continue
        nb = sorted(nbrs)
        links = sum(1 for i, u in enumerate(nb) for v in nb[i + 1:] if g.has_edge(u, v))
        total += links / (k * (k - 1) / 2)
    return total / g.n


def characteristic_path_length(g: Graph) -> float:
    """Mean shortest-path length over unordered node pairs."""
    if g.n < 2:
        raise ValueError("path length needs at least two nodes")
    d = shortest_distances(g)
    if not np.isfinite(d).all():
        raise ValueError("characteristic path length is undefined on a disconnected graph")
    return float(d.sum() / (g.n * (g.n - 1)))


def lattice_distances(g: Graph) -> np.ndarray:
    """Closed-form distances between all nodes of a pure ring or square lattice.

    Ring: circular index offset divided by the reach z/2. Square torus:
    periodic Manhattan (z=4) or Chebyshev (z=8) distance. These equal
    :func:`path_lengths` on the lattice without shortcuts.
    """
    return _lattice_distances(g.kind, g.n, g.degree)


@lru_cache(maxsize=16)
def _lattice_distances(kind: str, n: int, z: int) -> np.ndarray:
    if kind == NetworkKind.RING.value:
        idx = np.arange(n)
        d = np.abs(idx[:, None] - idx[None, :])
        d = np.minimum(d, n - d) / (z // 2)
    elif kind == NetworkKind.SQUARE.value:
        side = math.isqrt(n)
        r, c = np.divmod(np.arange(n), side)
        dr = np.abs(r[:, None] - r[None, :])
        dc = np.abs(c[:, None] - c[None, :])
        dr = np.minimum(dr, side - dr)
        dc = np.minimum(dc, side - dc)
        d = dr + dc if z == 4 else np.maximum(dr, dc)
    else:
        raise ValueError(f"closed-form distances exist only on lattices, not {kind!r}")
    d = d.astype(np.float64)
    d.setflags(write=False)
    return d


def path_lengths(g: Graph, sources: Sequence[int] | np.ndarray | None = None) -> np.ndarray:
    """Shortest paths weighted by :attr:`Graph.lengths`, shape ``(len(sources), n)``."""
    src = np.arange(g.n) if sources is None else np.asarray(sources, dtype=np.int64).ravel()
    if len(src) == 0:
        return np.full((0, g.n), np.inf)
    return csgraph.dijkstra(g.lengths, directed=False, indices=src)


def overlay_distances(
    base_dist: np.ndarray,
    nodes: Sequence[int] | np.ndarray,
    shortcuts: Iterable[Edge],
    shortcut_length: float = 1.0,
) -> np.ndarray:
    """Distances among ``nodes`` once ``shortcuts`` are added to a base graph.

    ``base_dist`` holds all base-graph distances. Every shortcut endpoint
    must be one of ``nodes``; then any shortest path breaks into base-graph
    legs between shortcut endpoints, so relaxing the ``nodes`` x ``nodes``
    block through those endpoints only is exact.
    """
    idx = np.asarray(nodes, dtype=np.int64).ravel()
    pos = {int(v): i for i, v in enumerate(idx)}
    m = np.array(base_dist[np.ix_(idx, idx)], dtype=np.float64)
    pivots = set()
    for u, v in shortcuts:
        try:
            a, b = pos[int(u)], pos[int(v)]
        except KeyError:
            raise ValueError(f"shortcut ({u}, {v}) leaves the node set") from None
        if shortcut_length < m[a, b]:
            m[a, b] = m[b, a] = shortcut_length
        pivots.update((a, b))
    for p in sorted(pivots):
        np.minimum(m, m[:, p, None] + m[None, p, :], out=m)
    return m


def format_edge_list(g: Graph) -> str:
    lines = [f"{u} {v} regular" for u, v in g.regular]
    lines += [f"{u} {v} shortcut" for u, v in g.shortcuts]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_edge_list(text: str, n: int, kind: str = "custom", degree: int = 0) -> Graph:
    regular, shortcuts = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("regular", "shortcut"):
            raise ValueError(f"line {lineno}: expected 'u v class', got {line!r}")
        e = (int(parts[0]), int(parts[1]))
        (regular if parts[2] == "regular" else shortcuts).append(e)
    return Graph(n, tuple(regular), tuple(shortcuts), kind, degree)
