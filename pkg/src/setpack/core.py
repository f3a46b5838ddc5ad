"""Instances, packings, the conflict graph and improving-set semantics.

Set indices are 0-based positions in ``SetFamily.sets``; element ids are
1-based (``1..n_elements``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class SetPackingError(ValueError):
    """Raised when an instance, packing or swap violates its contract."""


@dataclass(frozen=True)
class SetFamily:
    n_elements: int
    sets: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self):
        sets = tuple(tuple(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if self.k < 1:
            raise SetPackingError(f"k must be positive, got {self.k}")
        seen = set()
        for idx, s in enumerate(sets):
            if not 1 <= len(s) <= self.k:
                raise SetPackingError(f"set {idx} has size {len(s)}, expected 1..{self.k}")
            if any(a >= b for a, b in zip(s, s[1:])):
                raise SetPackingError(f"set {idx} is not strictly sorted (repeated element?)")
            if s[0] < 1 or s[-1] > self.n_elements:
                raise SetPackingError(f"set {idx} has an element outside 1..{self.n_elements}")
            if s in seen:
                raise SetPackingError(f"set {idx} duplicates an earlier set")
            seen.add(s)

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], n_elements: Optional[int] = None,
                  k: Optional[int] = None) -> "SetFamily":
        """Build a family from arbitrary iterables, sorting each set.

        Repeated elements inside a set are an error, not silently merged.
        """
        normalized = []
        for s in sets:
            items = list(s)
            t = tuple(sorted(items))
            if len(set(t)) != len(items):
                raise SetPackingError(f"set {items} contains a repeated element")
            normalized.append(t)
        if n_elements is None:
            n_elements = max((s[-1] for s in normalized if s), default=0)
        if k is None:
            k = max((len(s) for s in normalized), default=1)
        return cls(n_elements, tuple(normalized), k)

    def __len__(self) -> int:
        return len(self.sets)

    def element_index(self) -> list[list[int]]:
        """``index[e]`` lists the sets containing element ``e`` (slot 0 unused)."""
        index: list[list[int]] = [[] for _ in range(self.n_elements + 1)]
        for i, s in enumerate(self.sets):
            for e in s:
                index[e].append(i)
        return index

    def intersects(self, a: int, b: int) -> bool:
        return not set(self.sets[a]).isdisjoint(self.sets[b])


@dataclass(frozen=True)
class Packing:
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, idx: int) -> bool:
        return idx in self.members

    def __iter__(self):
        return iter(self.members)


def as_packing(members: Packing | Iterable[int]) -> Packing:
    return members if isinstance(members, Packing) else Packing(tuple(members))


def check_packing(family: SetFamily, packing: Packing | Iterable[int]) -> Packing:
    """Return ``packing`` as a Packing after checking it is valid for ``family``."""
    packing = as_packing(packing)
    m = len(family)
    if len(set(packing.members)) != len(packing.members):
        raise SetPackingError("packing lists a set twice")
    used: set[int] = set()
    for idx in packing.members:
        if not 0 <= idx < m:
            raise SetPackingError(f"set index {idx} out of range 0..{m - 1}")
        s = family.sets[idx]
        if not used.isdisjoint(s):
            raise SetPackingError(f"set {idx} overlaps another packing member")
        used.update(s)
    return packing


def is_packing(family: SetFamily, packing: Packing | Iterable[int]) -> bool:
    try:
        check_packing(family, packing)
    except SetPackingError:
        return False
    return True


@dataclass(frozen=True)
class ConflictGraph:
    """Bipartite intersection graph between packing members and the rest.

    ``adjacency[s]`` holds the sorted members that intersect non-member ``s``;
    ``member_adjacency[m]`` is the reverse direction.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]
    adjacency: dict[int, tuple[int, ...]]
    member_adjacency: dict[int, tuple[int, ...]] = field(repr=False)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(m, s) for s in self.right for m in self.adjacency[s]]

    def neighbors(self, v: int) -> tuple[int, ...]:
        if v in self.adjacency:
            return self.adjacency[v]
        return self.member_adjacency[v]


def build_conflict_graph(family: SetFamily, packing: Packing | Iterable[int]) -> ConflictGraph:
    packing = check_packing(family, packing)
    owner = {}
    for m in packing.members:
        for e in family.sets[m]:
            owner[e] = m
    members = set(packing.members)
    right = tuple(i for i in range(len(family)) if i not in members)
    adjacency = {}
    reverse: dict[int, list[int]] = {m: [] for m in packing.members}
    for s in right:
        nbrs = sorted({owner[e] for e in family.sets[s] if e in owner})
        adjacency[s] = tuple(nbrs)
        for m in nbrs:
            reverse[m].append(s)
    return ConflictGraph(packing.members, right, adjacency,
                         {m: tuple(v) for m, v in reverse.items()})


def neighborhood(cg: ConflictGraph, X: Iterable[int]) -> set[int]:
    """Open neighborhood N(X) of non-members ``X``: the members they touch."""
    out: set[int] = set()
    for s in X:
        try:
            out.update(cg.adjacency[s])
        except KeyError:
            raise SetPackingError(f"set {s} is not a non-member of the packing") from None
    return out


def closed_neighborhood(cg: ConflictGraph, X: Iterable[int]) -> set[int]:
    X = set(X)
    return X | neighborhood(cg, X)


def pairwise_disjoint(family: SetFamily, idxs: Iterable[int]) -> bool:
    used: set[int] = set()
    for i in idxs:
        s = family.sets[i]
        if not used.isdisjoint(s):
            return False
        used.update(s)
    return True


def is_improving_set(family: SetFamily, packing: Packing | Iterable[int], X: Iterable[int],
                     cg: Optional[ConflictGraph] = None) -> bool:
    if cg is None:
        cg = build_conflict_graph(family, packing)
    X = list(X)
    if len(set(X)) != len(X):
        return False
    return pairwise_disjoint(family, X) and len(neighborhood(cg, X)) < len(X)


@dataclass(frozen=True)
class ImprovingSet:
    sets: tuple[int, ...]
    removed: tuple[int, ...]
    witness_decomposition: Optional[object] = None

    def __len__(self) -> int:
        return len(self.sets)

    def to_dict(self) -> dict:
        d = {"added": list(self.sets), "removed": list(self.removed)}
        if self.witness_decomposition is not None:
            d["bags"] = [sorted(b) for b in self.witness_decomposition.bags]
        return d


def make_improving_set(family: SetFamily, packing: Packing | Iterable[int], X: Sequence[int],
                       cg: Optional[ConflictGraph] = None, witness=None) -> ImprovingSet:
    """Wrap ``X`` after checking that it is an improving set."""
    if cg is None:
        cg = build_conflict_graph(family, packing)
    if not is_improving_set(family, packing, X, cg):
        raise SetPackingError(f"{sorted(X)} is not an improving set")
    return ImprovingSet(tuple(sorted(X)), tuple(sorted(neighborhood(cg, X))), witness)


def apply_swap(family: SetFamily, packing: Packing | Iterable[int],
               X: ImprovingSet | Iterable[int]) -> Packing:
    """Return ``(packing - N(X)) + X``; refuses anything that is not improving."""
    packing = check_packing(family, packing)
    cg = build_conflict_graph(family, packing)
    sets = X.sets if isinstance(X, ImprovingSet) else tuple(X)
    if not is_improving_set(family, packing, sets, cg):
        raise SetPackingError(f"{sorted(sets)} is not an improving set for this packing")
    removed = neighborhood(cg, sets)
    if isinstance(X, ImprovingSet) and set(X.removed) != removed:
        raise SetPackingError("ImprovingSet.removed does not match the conflict neighborhood")
    new = Packing(tuple(m for m in packing.members if m not in removed) + tuple(sets))
    return check_packing(family, new)
