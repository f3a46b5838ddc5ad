"""Exhaustive improving-set search.

This is the classical bounded-size local search neighborhood and the oracle
that the color-coding search is checked against.  Candidates are produced by
size first, then lexicographically by sorted set indices.
"""
from __future__ import annotations

from typing import Iterator, Optional

from .core import (ConflictGraph, ImprovingSet, Packing, SetFamily, build_conflict_graph,
                   check_packing)
from .pathdecomp import exact_pathwidth, induced_conflict_subgraph


def _disjoint_selections(family: SetFamily, cg: ConflictGraph, size: int) -> Iterator[tuple[int, ...]]:
    """Pairwise-disjoint tuples of non-members of exactly ``size``, in lex order."""
    right = cg.right
    masks = {}
    for s in right:
        m = 0
        for e in family.sets[s]:
            m |= 1 << e
        masks[s] = m

    def extend(start: int, chosen: list[int], used: int):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        # leave room for the remaining picks
        for pos in range(start, len(right) - (size - len(chosen)) + 1):
            s = right[pos]
            if masks[s] & used:
                continue
            chosen.append(s)
            yield from extend(pos + 1, chosen, used | masks[s])
            chosen.pop()

    yield from extend(0, [], 0)


def iter_improving_sets(family: SetFamily, packing: Packing, r: int,
                        cg: Optional[ConflictGraph] = None) -> Iterator[ImprovingSet]:
    if r < 1:
        raise ValueError("r must be at least 1")
    packing = check_packing(family, packing)
    if cg is None:
        cg = build_conflict_graph(family, packing)
    for size in range(1, min(r, len(cg.right)) + 1):
        for X in _disjoint_selections(family, cg, size):
            removed = set()
            for s in X:
                removed.update(cg.adjacency[s])
                if len(removed) >= size:
                    break
            else:
                yield ImprovingSet(X, tuple(sorted(removed)))


def enumerate_improving_sets(family: SetFamily, packing: Packing, r: int) -> list[ImprovingSet]:
    return list(iter_improving_sets(family, packing, r))


def first_improving_set(family: SetFamily, packing: Packing, r: int) -> Optional[ImprovingSet]:
    return next(iter_improving_sets(family, packing, r), None)


def bruteforce_find_pw(family: SetFamily, packing: Packing, r: int, pw: int) -> Optional[ImprovingSet]:
    """First improving set of size at most ``r`` whose ``N[X]`` has pathwidth at most ``pw``.

    The returned set carries the exact-pathwidth witness decomposition.
    """
    packing = check_packing(family, packing)
    cg = build_conflict_graph(family, packing)
    for imp in iter_improving_sets(family, packing, r, cg):
        g = induced_conflict_subgraph(family, packing, imp.sets, cg)
        width, pd = exact_pathwidth(g)
        if width <= pw:
            return ImprovingSet(imp.sets, imp.removed, pd)
    return None
