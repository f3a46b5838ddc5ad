"""Path decompositions, nice path decompositions and an exact pathwidth oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

import networkx as nx

from .core import (ConflictGraph, Packing, SetFamily, build_conflict_graph,
                   closed_neighborhood)

MAX_EXACT_VERTICES = 20


class DecompositionError(ValueError):
    pass


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset, ...]

    def __init__(self, bags: Iterable[Iterable[Hashable]]):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in bags))

    @property
    def width(self) -> int:
        # the empty graph has width 0 by convention
        return max(0, max((len(b) for b in self.bags), default=0) - 1)

    def vertices(self) -> set:
        return set().union(*self.bags) if self.bags else set()

    def restrict(self, keep: Iterable[Hashable]) -> "PathDecomposition":
        keep = set(keep)
        return PathDecomposition([b & keep for b in self.bags])

    def __len__(self) -> int:
        return len(self.bags)


@dataclass(frozen=True)
class NiceBag:
    kind: str  # "first", "introduce", "forget" or "last"
    vertex: Optional[Hashable]
    bag: frozenset


@dataclass(frozen=True)
class NicePathDecomposition:
    nodes: tuple[NiceBag, ...]

    @property
    def bags(self) -> tuple[frozenset, ...]:
        return tuple(n.bag for n in self.nodes)

    @property
    def width(self) -> int:
        return PathDecomposition(self.bags).width

    def as_decomposition(self) -> PathDecomposition:
        return PathDecomposition(self.bags)

    def is_nice(self) -> bool:
        nodes = self.nodes
        if len(nodes) < 2 or nodes[0].bag or nodes[-1].bag:
            return False
        if nodes[0].kind != "first" or nodes[-1].kind != "last":
            return False
        for prev, cur in zip(nodes, nodes[1:]):
            kind = cur.kind
            if kind == "last" and cur.vertex is None:
                kind = "same"
            elif kind == "last":
                kind = "forget"
            if kind == "introduce":
                ok = cur.vertex not in prev.bag and cur.bag == prev.bag | {cur.vertex}
            elif kind == "forget":
                ok = cur.vertex in prev.bag and cur.bag == prev.bag - {cur.vertex}
            elif kind == "same":
                ok = cur is nodes[-1] and cur.bag == prev.bag
            else:
                ok = False
            if not ok:
                return False
        return True


def _as_pd(pd) -> PathDecomposition:
    if isinstance(pd, PathDecomposition):
        return pd
    if isinstance(pd, NicePathDecomposition):
        return pd.as_decomposition()
    return PathDecomposition(pd)


def validate_decomposition(graph: nx.Graph, pd) -> bool:
    """Check vertex cover, edge cover and contiguity of a bag sequence."""
    pd = _as_pd(pd)
    if not set(graph.nodes) <= pd.vertices():
        return False
    if not pd.vertices() <= set(graph.nodes):
        return False
    for u, v in graph.edges:
        if not any(u in b and v in b for b in pd.bags):
            return False
    for v in graph.nodes:
        idx = [i for i, b in enumerate(pd.bags) if v in b]
        if idx[-1] - idx[0] + 1 != len(idx):
            return False
    return True


def make_nice(pd, graph: Optional[nx.Graph] = None) -> NicePathDecomposition:
    """Sweep the bags left to right, forgetting before introducing.

    Vertices are forgotten/introduced in sorted order so output is stable.
    Contiguity is checked on the fly; pass ``graph`` to also check edge cover.
    """
    pd = _as_pd(pd)
    if graph is not None and not validate_decomposition(graph, pd):
        raise DecompositionError("input is not a valid path decomposition of the graph")
    finished: set = set()
    nodes = [NiceBag("first", None, frozenset())]
    cur: frozenset = frozenset()
    for bag in list(pd.bags) + [frozenset()]:
        for v in sorted(cur - bag, key=_order_key):
            cur = cur - {v}
            finished.add(v)
            nodes.append(NiceBag("forget", v, cur))
        for v in sorted(bag - cur, key=_order_key):
            if v in finished:
                raise DecompositionError(f"vertex {v!r} reappears after leaving the bags")
            cur = cur | {v}
            nodes.append(NiceBag("introduce", v, cur))
    if len(nodes) == 1:
        nodes.append(NiceBag("last", None, frozenset()))
    else:
        tail = nodes[-1]
        nodes[-1] = NiceBag("last", tail.vertex, tail.bag)
    return NicePathDecomposition(tuple(nodes))


def _order_key(v):
    return (type(v).__name__, v)


def _ordering_decomposition(order: Sequence, nbr_masks: Sequence[int], index: dict) -> list[frozenset]:
    """Bags ``{v_i} + {earlier vertices with a neighbor at or after i}``."""
    bags = []
    prefix = 0
    for i, v in enumerate(order):
        later = ~prefix
        boundary = {u for u in order[:i] if nbr_masks[index[u]] & later & ~(1 << index[u])}
        bags.append(frozenset(boundary | {v}))
        prefix |= 1 << index[v]
    return bags


def exact_pathwidth(graph: nx.Graph) -> tuple[int, PathDecomposition]:
    """Minimum width and a witness decomposition, via vertex separation.

    ``best[S]`` is the smallest achievable maximum boundary when the vertices
    of ``S`` are laid out first; pathwidth equals ``best[V]``.
    """
    nodes = sorted(graph.nodes, key=_order_key)
    n = len(nodes)
    if n > MAX_EXACT_VERTICES:
        raise SizeLimitError(f"exact pathwidth limited to {MAX_EXACT_VERTICES} vertices, got {n}")
    if n == 0:
        return 0, PathDecomposition([frozenset()])
    index = {v: i for i, v in enumerate(nodes)}
    nbr = [0] * n
    for u, v in graph.edges:
        if u != v:
            nbr[index[u]] |= 1 << index[v]
            nbr[index[v]] |= 1 << index[u]

    full = (1 << n) - 1
    INF = n + 1
    best = [INF] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = 0
    # boundary size of S: members of S with a neighbor outside S
    for S in range(1, 1 << n):
        outside = full & ~S
        bnd = 0
        rest = S
        while rest:
            low = rest & -rest
            if nbr[low.bit_length() - 1] & outside:
                bnd += 1
            rest ^= low
        cand = INF
        arg = 0
        rest = S
        while rest:
            low = rest & -rest
            val = best[S ^ low]
            if val < cand:
                cand = val
                arg = low
            rest ^= low
        best[S] = max(cand, bnd)
        choice[S] = arg
    order = []
    S = full
    while S:
        low = choice[S]
        order.append(nodes[low.bit_length() - 1])
        S ^= low
    order.reverse()
    bags = _ordering_decomposition(order, nbr, index)
    pd = PathDecomposition(bags)
    assert pd.width == best[full], (pd.width, best[full])
    return best[full], pd


def induced_conflict_subgraph(family: SetFamily, packing: Packing, X: Iterable[int],
                              cg: Optional[ConflictGraph] = None) -> nx.Graph:
    if cg is None:
        cg = build_conflict_graph(family, packing)
    verts = closed_neighborhood(cg, X)
    g = nx.Graph()
    g.add_nodes_from(verts)
    for s in verts:
        if s in cg.adjacency:
            g.add_edges_from((s, m) for m in cg.adjacency[s] if m in verts)
    return g


def swap_pathwidth(family: SetFamily, packing: Packing, X: Iterable[int]) -> int:
    """Exact pathwidth of the conflict graph restricted to ``N[X]``."""
    return exact_pathwidth(induced_conflict_subgraph(family, packing, X))[0]
