"""Bitset-backed simple undirected graphs with cheap subset views.

Vertex ids are dense integers 0..n-1.  Vertex subsets are arbitrary
precision integer bitmasks, so the intersection-heavy queries the
coloring machinery lives on (N(v) & Y, degree into a subset) cost
O(n/64) machine words instead of O(degree) hash lookups.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Base class for graph construction and query errors."""


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class AdjacentPair(GraphError):
    pass


class PartialColoring(GraphError):
    pass


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the set bit positions of ``bits`` in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class VertexSet:
    """Immutable subset of the vertices 0..n-1, stored as a bitmask."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if bits < 0 or bits >> n:
            raise VertexOutOfRange(f"bits out of range for universe of size {n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("VertexSet is immutable")

    @classmethod
    def from_iterable(cls, n: int, members: Iterable[int]) -> "VertexSet":
        bits = 0
        for v in members:
            if not 0 <= v < n:
                raise VertexOutOfRange(f"vertex {v} not in 0..{n - 1}")
            bits |= 1 << v
        return cls(n, bits)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and (self.bits >> v) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VertexSet)
            and self.n == other.n
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.bits & other.bits)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.bits | other.bits)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.bits & ~other.bits)

    def issubset(self, other: "VertexSet") -> bool:
        return self.bits & ~other.bits == 0

    def to_list(self) -> list[int]:
        return list(iter_bits(self.bits))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, members={self.to_list()})"


class Graph:
    """Immutable simple undirected graph.

    Construct through :func:`build_graph` (validated) or the generators.
    ``adjacency(v)`` returns the sorted neighbor ids; ``adj_bits(v)``
    exposes the raw bitmask for subset arithmetic.
    """

    __slots__ = ("n", "m", "_adj")

    def __init__(self, n: int, adj: Sequence[int], m: int):
        self.n = n
        self._adj = tuple(adj)
        self.m = m

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def adj_bits(self, v: int) -> int:
        return self._adj[v]

    def adjacency(self, v: int) -> tuple[int, ...]:
        return tuple(iter_bits(self._adj[v]))

    def neighbors(self, v: int) -> VertexSet:
        return VertexSet(self.n, self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (self._adj[u] >> v) & 1 == 1

    def vertices(self) -> range:
        return range(self.n)

    def full_set(self) -> VertexSet:
        return VertexSet(self.n, (1 << self.n) - 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges (u, v) with u < v, lexicographically sorted."""
        for u in range(self.n):
            higher = self._adj[u] >> (u + 1)
            for off in iter_bits(higher):
                yield (u, u + 1 + off)

    def min_degree(self) -> int:
        return min((a.bit_count() for a in self._adj), default=0)

    def max_degree(self) -> int:
        return max((a.bit_count() for a in self._adj), default=0)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a validated simple symmetric graph from an edge list."""
    if n < 0:
        raise GraphError("vertex count must be nonnegative")
    adj = [0] * n
    m = 0
    for u, v in edges:
        if not (0 <= u < n) or not (0 <= v < n):
            raise VertexOutOfRange(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise SelfLoop(f"self loop at vertex {u}")
        if (adj[u] >> v) & 1:
            raise DuplicateEdge(f"duplicate edge ({u}, {v})")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        m += 1
    return Graph(n, adj, m)


def union_neighborhoods(G: Graph, bits: int) -> int:
    """Bitmask of all vertices adjacent to at least one member of ``bits``."""
    out = 0
    for v in iter_bits(bits):
        out |= G.adj_bits(v)
    return out


def neighbors_in(G: Graph, v: int, Y: VertexSet) -> VertexSet:
    """N(v) restricted to Y."""
    if not 0 <= v < G.n:
        raise VertexOutOfRange(f"vertex {v} not in 0..{G.n - 1}")
    return VertexSet(G.n, G.adj_bits(v) & Y.bits)


def degree_in(G: Graph, v: int, Y: VertexSet) -> int:
    """|N(v) & Y|."""
    if not 0 <= v < G.n:
        raise VertexOutOfRange(f"vertex {v} not in 0..{G.n - 1}")
    return (G.adj_bits(v) & Y.bits).bit_count()


def edges_between(G: Graph, S: VertexSet, T: VertexSet) -> int:
    """Number of edges with one endpoint in S and the other in T.

    An edge with both endpoints in S & T is counted once.
    """
    total = 0
    for v in iter_bits(S.bits):
        total += (G.adj_bits(v) & T.bits).bit_count()
    overlap = S.bits & T.bits
    if overlap:
        inner = 0
        for v in iter_bits(overlap):
            inner += (G.adj_bits(v) & overlap).bit_count()
        total -= inner // 2
    return total


@dataclass(frozen=True)
class TwoColoring:
    """Proper 2-coloring of an induced subgraph, as the two color classes."""

    side0: VertexSet
    side1: VertexSet

    def members(self) -> VertexSet:
        return self.side0 | self.side1


@dataclass(frozen=True)
class OddCycle:
    """Witness that an induced subgraph is not bipartite.

    ``vertices`` lists the cycle in order; consecutive entries and the
    wrap-around pair are edges, and the length is odd.
    """

    vertices: tuple[int, ...]


def bipartition(G: Graph, W: VertexSet) -> TwoColoring | OddCycle:
    """2-color G[W] or exhibit an odd cycle inside it.

    Sides are BFS layer parities (components explored from their lowest
    vertex), computed with whole-frontier bitmask sweeps; the witness
    path walk only runs once a conflict is known to exist.
    """
    Wb = W.bits
    bits0 = 0
    bits1 = 0
    unseen = Wb
    while unseen:
        start = unseen & -unseen
        frontier = start
        parity = 0
        while frontier:
            if parity == 0:
                bits0 |= frontier
            else:
                bits1 |= frontier
            unseen &= ~frontier
            acc = 0
            for v in iter_bits(frontier):
                acc |= G.adj_bits(v)
            frontier = acc & unseen
            parity ^= 1
    for side_bits in (bits0, bits1):
        for v in iter_bits(side_bits):
            if G.adj_bits(v) & side_bits:
                return OddCycle(_extract_odd_cycle(G, Wb))
    return TwoColoring(VertexSet(G.n, bits0), VertexSet(G.n, bits1))


def _extract_odd_cycle(G: Graph, Wb: int) -> tuple[int, ...]:
    """Parent-tracking BFS, used only when an odd cycle is present."""
    side: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for start in iter_bits(Wb):
        if start in side:
            continue
        side[start] = 0
        parent[start] = None
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in iter_bits(G.adj_bits(v) & Wb):
                if u not in side:
                    side[u] = side[v] ^ 1
                    parent[u] = v
                    queue.append(u)
                elif side[u] == side[v]:
                    return _close_cycle(parent, v, u)
    raise AssertionError("no odd cycle found in a non-bipartite subgraph")


def _close_cycle(parent: dict[int, int | None], v: int, u: int) -> tuple[int, ...]:
    """Odd cycle through BFS-tree paths of v and u plus the edge (u, v)."""
    anc_v = [v]
    while parent[anc_v[-1]] is not None:
        anc_v.append(parent[anc_v[-1]])
    anc_u = [u]
    while parent[anc_u[-1]] is not None:
        anc_u.append(parent[anc_u[-1]])
    in_v = {w: i for i, w in enumerate(anc_v)}
    iu = next(i for i, w in enumerate(anc_u) if w in in_v)
    lca = anc_u[iu]
    iv = in_v[lca]
    path = anc_v[: iv + 1] + list(reversed(anc_u[:iu]))
    return tuple(path)


def contract(G: Graph, u: int, v: int) -> tuple[Graph, tuple[int, ...]]:
    """Merge two non-adjacent vertices into one.

    Returns the contracted graph on n-1 vertices and the old->new vertex
    map.  The merged vertex keeps min(u, v)'s new id; ids above
    max(u, v) shift down by one.
    """
    if not (0 <= u < G.n) or not (0 <= v < G.n):
        raise VertexOutOfRange(f"contract({u}, {v}) out of range")
    if u == v:
        raise GraphError("cannot contract a vertex with itself")
    if G.has_edge(u, v):
        raise AdjacentPair(f"vertices {u} and {v} are adjacent")
    lo, hi = min(u, v), max(u, v)
    mask_lo = (1 << hi) - 1

    def drop_hi(bits: int) -> int:
        return (bits & mask_lo) | ((bits >> (hi + 1)) << hi)

    merged = G.adj_bits(lo) | G.adj_bits(hi)
    adj = []
    for w in range(G.n):
        if w == hi:
            continue
        bits = merged if w == lo else G.adj_bits(w)
        if w != lo and (bits >> hi) & 1:
            bits |= 1 << lo
        adj.append(drop_hi(bits))
    m = sum(b.bit_count() for b in adj) // 2
    mapping = tuple(lo if w == hi else (w if w < hi else w - 1) for w in range(G.n))
    return Graph(G.n - 1, adj, m), mapping


@dataclass(frozen=True)
class Coloring:
    """Total assignment of vertex ids to colors plus the palette span.

    ``palette_size`` is the number of color slots the producing
    algorithm allocated; assignments lie in [0, palette_size).
    """

    assignment: tuple[int, ...]
    palette_size: int


def is_proper_coloring(G: Graph, coloring: Coloring) -> tuple[bool, tuple[int, int] | None]:
    """Check properness; on failure also return the first violating edge."""
    assign = coloring.assignment
    if len(assign) != G.n or any(c is None or c < 0 for c in assign):
        raise PartialColoring("assignment is not total on the vertex set")
    masks: dict[int, int] = {}
    for v, c in enumerate(assign):
        masks[c] = masks.get(c, 0) | (1 << v)
    for v in range(G.n):
        conflict = G.adj_bits(v) & masks[assign[v]]
        if conflict:
            u = (conflict & -conflict).bit_length() - 1
            return False, (min(u, v), max(u, v))
    return True, None
