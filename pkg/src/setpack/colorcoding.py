"""Color-coding search for improving sets of bounded size and pathwidth.

Under fixed colorings of the packing members (``[r-1]``) and of the elements
(``[rk]``), an improving set corresponds to a walk through states
``(C_F0, C_U, B)``: the member colors used so far, the element colors used so
far and the current bag ``B``.  Walks start at the empty state, grow bags by
introduce arcs, shrink them by forget arcs, and accept at an empty bag with
``k * |C_F0| < |C_U|``.  The bags visited along an accepted walk form a path
decomposition of ``N[X]``.

Colors are stored as bit masks: member color ``c`` is bit ``c - 1`` of
``C_F0`` and element color ``c`` is bit ``c - 1`` of ``C_U``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import (ConflictGraph, ImprovingSet, Packing, SetFamily, SetPackingError,
                   build_conflict_graph, check_packing, closed_neighborhood, is_improving_set,
                   neighborhood)
from .pathdecomp import PathDecomposition, induced_conflict_subgraph, validate_decomposition

log = logging.getLogger(__name__)

DEFAULT_FAILURE_PROB = 0.01


class ColoringError(ValueError):
    pass


@dataclass(frozen=True)
class Coloring:
    """``member_colors`` maps packing members to ``1..r-1``; ``element_colors[e]``
    is the color (``1..r*k``) of element ``e``, slot 0 unused."""

    member_colors: Mapping[int, int]
    element_colors: Sequence[int]

    @classmethod
    def from_maps(cls, member_colors: Mapping[int, int], element_colors: Mapping[int, int],
                  n_elements: int) -> "Coloring":
        missing = [e for e in range(1, n_elements + 1) if e not in element_colors]
        if missing:
            raise ColoringError(f"element coloring is not total, missing {missing[:5]}")
        return cls(dict(member_colors),
                   tuple([0] + [element_colors[e] for e in range(1, n_elements + 1)]))


@dataclass(frozen=True)
class SearchParams:
    r: int
    pw: int
    trials: Optional[int] = None
    seed: int = 0
    failure_prob: float = DEFAULT_FAILURE_PROB

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if self.pw < 0:
            raise ValueError("pw must be non-negative")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 < self.failure_prob < 1:
            raise ValueError("failure_prob must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def pad_to_uniform(family: SetFamily, k: Optional[int] = None) -> tuple[SetFamily, dict[int, int]]:
    """Add fresh dummy elements so that every set has exactly ``k`` elements.

    Returns the padded family and a map ``dummy element -> set index``.
    Set order is preserved, so set indices are shared with the input.
    """
    k = family.k if k is None else k
    if any(len(s) > k for s in family.sets):
        raise SetPackingError(f"a set is larger than k={k}")
    dummies: dict[int, int] = {}
    nxt = family.n_elements + 1
    padded = []
    for idx, s in enumerate(family.sets):
        extra = list(range(nxt, nxt + k - len(s)))
        for d in extra:
            dummies[d] = idx
        nxt += len(extra)
        padded.append(tuple(s) + tuple(extra))
    if not dummies:
        return family, {}
    return SetFamily(nxt - 1, tuple(padded), k), dummies


def trial_count(r: int, k: int, failure_prob: float = DEFAULT_FAILURE_PROB) -> int:
    """Colorings needed so a fixed qualifying set is missed with probability <= ``failure_prob``.

    Each trial succeeds with probability at least ``exp(-(r-1) - r*k)``.
    """
    if r < 2:
        raise ValueError("trial_count needs r >= 2; r = 1 is handled by a direct scan")
    if not 0 < failure_prob < 1:
        raise ValueError("failure_prob must lie in (0, 1)")
    return max(1, math.ceil(math.exp(r - 1 + r * k) * math.log(1 / failure_prob)))


def random_coloring(n_elements: int, members: Sequence[int], r: int, k: int,
                    seed: int, trial: int) -> Coloring:
    """Uniform colorings drawn from a stream determined by ``(seed, trial)``."""
    rng = np.random.default_rng([seed, trial])
    member = rng.integers(1, r, size=len(members)) if r > 1 else np.zeros(len(members), int)
    elems = rng.integers(1, r * k + 1, size=n_elements + 1)
    elems[0] = 0
    return Coloring(dict(zip(members, member.tolist())), tuple(elems.tolist()))


class ColorCodingSearch:
    """Search state graph for one (k-uniform family, packing) pair.

    Static structure is computed once; :meth:`search` runs one coloring.
    """

    def __init__(self, family: SetFamily, packing: Packing, r: int, pw: int,
                 cg: Optional[ConflictGraph] = None):
        if r < 1 or pw < 0:
            raise ValueError("need r >= 1 and pw >= 0")
        self.family = family
        self.packing = check_packing(family, packing)
        if any(len(s) != family.k for s in family.sets):
            raise SetPackingError("search_with_coloring needs a k-uniform family; use pad_to_uniform")
        self.k = family.k
        self.r = r
        self.pw = pw
        self.cg = cg if cg is not None else build_conflict_graph(family, self.packing)
        self.members = frozenset(self.packing.members)
        self.last_visited = 0

    def _check_coloring(self, coloring: Coloring) -> None:
        n_colors = self.r * self.k
        ec = coloring.element_colors
        if len(ec) != self.family.n_elements + 1:
            raise ColoringError("element coloring is not total over the (padded) universe")
        if any(not 1 <= c <= n_colors for c in ec[1:]):
            raise ColoringError(f"element colors must lie in 1..{n_colors}")
        mc = coloring.member_colors
        for m in self.packing.members:
            c = mc.get(m)
            if c is None:
                raise ColoringError(f"member {m} has no color")
            if not 1 <= c <= self.r - 1:
                raise ColoringError(f"member colors must lie in 1..{self.r - 1}")

    def search(self, coloring: Coloring) -> Optional[ImprovingSet]:
        self._check_coloring(coloring)
        k, pw = self.k, self.pw
        adj = self.cg.adjacency
        ec = coloring.element_colors
        mbit = {m: 1 << (c - 1) for m, c in coloring.member_colors.items()}

        # non-members that could ever be introduced: colorful sets whose
        # neighborhood is injectively colored
        ucol: dict[int, int] = {}
        ncol: dict[int, int] = {}
        for s in self.cg.right:
            mask = 0
            for e in self.family.sets[s]:
                mask |= 1 << (ec[e] - 1)
            if mask.bit_count() != k:
                continue
            nmask = 0
            for m in adj[s]:
                nmask |= mbit[m]
            if nmask.bit_count() != len(adj[s]):
                continue
            ucol[s] = mask
            ncol[s] = nmask
        if not ucol:
            self.last_visited = 0
            return None
        usable_members = sorted({m for s in ucol for m in adj[s]})
        nonmembers = sorted(ucol)
        adjset = {s: frozenset(adj[s]) for s in nonmembers}

        start = (0, 0, ())
        parent: dict[tuple, Optional[tuple]] = {start: None}
        stack = [start]
        found = None
        while stack:
            state = stack.pop()
            cf, cu, B = state
            if not B and k * cf.bit_count() < cu.bit_count():
                found = state
                break
            succ = []
            for S in B:
                if S in self.members or not (ncol[S] & ~cf):
                    succ.append((cf, cu, tuple(x for x in B if x != S)))
            if len(B) <= pw:
                bset = set(B)
                for S in nonmembers:
                    if S in bset or ucol[S] & cu:
                        continue
                    outside = 0
                    for m in adj[S]:
                        if m not in bset:
                            outside |= mbit[m]
                    if outside & cf:
                        continue
                    succ.append((cf, cu | ucol[S], tuple(sorted(B + (S,)))))
                for M in usable_members:
                    bit = mbit[M]
                    if bit & cf or M in bset:
                        continue
                    ok = True
                    for S2 in B:
                        if S2 in ucol and M not in adjset[S2] and bit & ncol[S2]:
                            ok = False
                            break
                    if ok:
                        succ.append((cf | bit, cu, tuple(sorted(B + (M,)))))
            for nxt in reversed(succ):
                if nxt not in parent:
                    parent[nxt] = state
                    stack.append(nxt)
        self.last_visited = len(parent)
        if found is None:
            return None

        path = []
        node = found
        while node is not None:
            path.append(node)
            node = parent[node]
        path.reverse()
        X = sorted({S for _, _, B in path for S in B if S not in self.members})
        return self._certify(X, [B for _, _, B in path], coloring)

    def _certify(self, X: list[int], bags: list[tuple], coloring: Coloring) -> ImprovingSet:
        """Re-check an accepted walk against the definitions before returning it."""
        family, cg = self.family, self.cg
        if not 1 <= len(X) <= self.r or not is_improving_set(family, self.packing, X, cg):
            raise RuntimeError(f"color-coding search produced a non-improving set {X}")
        removed = neighborhood(cg, X)
        if len({coloring.member_colors[m] for m in removed}) != len(removed):
            raise RuntimeError("member coloring is not injective on N(X)")
        elems = [e for s in X for e in family.sets[s]]
        if len({coloring.element_colors[e] for e in elems}) != len(elems):
            raise RuntimeError("element coloring is not injective on the union of X")
        closed = closed_neighborhood(cg, X)
        restricted = []
        for B in bags:
            bag = frozenset(B) & closed
            if bag and (not restricted or restricted[-1] != bag):
                restricted.append(bag)
        pd = PathDecomposition(restricted)
        graph = induced_conflict_subgraph(family, self.packing, X, cg)
        if not validate_decomposition(graph, pd) or pd.width > self.pw:
            raise RuntimeError("witness bags are not a width-bounded decomposition of N[X]")
        return ImprovingSet(tuple(X), tuple(sorted(removed)), pd)


def search_with_coloring(family: SetFamily, packing: Packing, coloring: Coloring, r: int,
                         pw: int) -> Optional[ImprovingSet]:
    """One run of the state-graph search under the given colorings.

    ``family`` must already be k-uniform.  A returned set is always a verified
    improving set; ``None`` only means nothing qualifying is colorful here.
    """
    return ColorCodingSearch(family, packing, r, pw).search(coloring)


def _direct_scan(family: SetFamily, packing: Packing) -> Optional[ImprovingSet]:
    cg = build_conflict_graph(family, packing)
    for s in cg.right:
        if not cg.adjacency[s]:
            return ImprovingSet((s,), (), PathDecomposition([{s}]))
    return None


def find_improving_set(family: SetFamily, packing: Packing, params: SearchParams,
                       stats: Optional[dict] = None) -> Optional[ImprovingSet]:
    """Randomized search over independent colorings; first success wins.

    With ``params.trials`` unset, ``trial_count(r, k, failure_prob)`` colorings
    are tried.  Trial ``t`` draws its colors from the stream seeded by
    ``(params.seed, t)``.  If ``stats`` is given, the number of colorings used
    is stored under ``"trials"``.
    """
    packing = check_packing(family, packing)
    if params.r == 1:
        if stats is not None:
            stats["trials"] = 0
        return _direct_scan(family, packing)
    padded, _ = pad_to_uniform(family)
    k = padded.k
    trials = params.trials if params.trials is not None else trial_count(params.r, k, params.failure_prob)
    searcher = ColorCodingSearch(padded, packing, params.r, params.pw)
    members = packing.members
    for t in range(trials):
        coloring = random_coloring(padded.n_elements, members, params.r, k, params.seed, t)
        found = searcher.search(coloring)
        if found is not None:
            if stats is not None:
                stats["trials"] = t + 1
            log.debug("improving set %s found in trial %d", found.sets, t)
            return found
    if stats is not None:
        stats["trials"] = trials
    return None
