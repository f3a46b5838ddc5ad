"""Greedy, exact and local-search solvers."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .colorcoding import DEFAULT_FAILURE_PROB, SearchParams, find_improving_set
from .core import Packing, SetFamily, apply_swap, check_packing
from .swapsearch import first_improving_set

log = logging.getLogger(__name__)

MODES = ("greedy", "exact", "swap", "pwls")


class BudgetExceeded(RuntimeError):
    """The time budget ran out; ``incumbent`` is the best packing found so far."""

    def __init__(self, message: str, incumbent: Packing):
        super().__init__(message)
        self.incumbent = incumbent
        self.optimal = False


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "greedy"
    r: int = 2
    pw: int = 2
    trials: Optional[int] = None
    seed: int = 0
    failure_prob: float = DEFAULT_FAILURE_PROB
    max_iterations: Optional[int] = None
    budget: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.r < 1 or self.pw < 0:
            raise ValueError("need r >= 1 and pw >= 0")
        if self.trials is not None and self.trials < 1:
            raise ValueError("trials must be positive")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


@dataclass
class SolveResult:
    packing: Packing
    status: str = "ok"  # "ok", "local_max", "optimal", "budget" or "iteration_cap"
    trace: list[dict] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.packing)


def greedy_maximal(family: SetFamily) -> Packing:
    """Take sets in index order whenever they fit."""
    used: set[int] = set()
    chosen = []
    for i, s in enumerate(family.sets):
        if used.isdisjoint(s):
            chosen.append(i)
            used.update(s)
    return Packing(tuple(chosen))


def is_maximal(family: SetFamily, packing: Packing) -> bool:
    used = {e for i in packing for e in family.sets[i]}
    return all(not used.isdisjoint(s) for i, s in enumerate(family.sets) if i not in packing)


def exact_max_packing(family: SetFamily, budget: Optional[float] = None) -> Packing:
    """Maximum packing by branch and bound.

    Branches on the element contained in the fewest remaining candidate sets:
    either one of those sets is taken or the element stays uncovered.  The
    bound is the smaller of a greedy cover of the candidates by element
    cliques (at most one set per element can be chosen) and the number of
    coverable elements divided by the smallest set size.
    """
    m = len(family)
    if m == 0:
        return Packing(())
    elem_masks = {}
    for i, s in enumerate(family.sets):
        for e in s:
            elem_masks[e] = elem_masks.get(e, 0) | (1 << i)
    set_masks = []
    for i, s in enumerate(family.sets):
        mask = 0
        for e in s:
            mask |= elem_masks[e]
        set_masks.append(mask)
    set_elems = [tuple(s) for s in family.sets]
    elements = list(elem_masks)
    elem_bits = [sum(1 << e for e in s) for s in family.sets]
    min_size = min(len(s) for s in family.sets)

    best = list(greedy_maximal(family).members)
    deadline = None if budget is None else time.monotonic() + budget
    nodes = 0

    def bound(cand: int) -> int:
        ub = 0
        covered = 0
        rest = cand
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            covered |= elem_bits[i]
            top = max(set_elems[i], key=lambda e: (elem_masks[e] & rest).bit_count())
            rest &= ~elem_masks[top]
            ub += 1
        if ub <= 1:
            return ub
        # the clique cover only touched some sets; finish the element union
        rest = cand
        while rest:
            low = rest & -rest
            covered |= elem_bits[low.bit_length() - 1]
            rest ^= low
        return min(ub, covered.bit_count() // min_size)

    def rec(cand: int, chosen: list[int]):
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("exact search exceeded its budget", Packing(tuple(best)))
        if not cand:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        if len(chosen) + bound(cand) <= len(best):
            return
        pick, pick_mask, pick_count = None, 0, m + 1
        for e in elements:
            mask = elem_masks[e] & cand
            if mask:
                c = mask.bit_count()
                if c < pick_count:
                    pick, pick_mask, pick_count = e, mask, c
                    if c == 1:
                        break
        rest = pick_mask
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            chosen.append(i)
            rec(cand & ~set_masks[i], chosen)
            chosen.pop()
            rest ^= low
        rec(cand & ~pick_mask, chosen)

    rec((1 << m) - 1, [])
    return check_packing(family, Packing(tuple(best)))


def perfect_packing(family: SetFamily) -> Optional[Packing]:
    """A packing covering every element, or ``None`` (exact cover search).

    Always branches on the uncovered element with the fewest usable sets.
    """
    by_elem: dict[int, set[int]] = {e: set() for e in range(1, family.n_elements + 1)}
    for i, s in enumerate(family.sets):
        for e in s:
            by_elem[e].add(i)
    chosen: list[int] = []

    def cover(i: int) -> list[tuple[int, set[int]]]:
        removed = []
        for e in family.sets[i]:
            for j in by_elem[e]:
                for f in family.sets[j]:
                    if f != e:
                        by_elem[f].discard(j)
            removed.append((e, by_elem.pop(e)))
        return removed

    def uncover(i: int, removed: list[tuple[int, set[int]]]) -> None:
        for e, col in reversed(removed):
            by_elem[e] = col
            for j in col:
                for f in family.sets[j]:
                    if f != e:
                        by_elem[f].add(j)

    def rec() -> bool:
        if not by_elem:
            return True
        e = min(by_elem, key=lambda x: len(by_elem[x]))
        for i in sorted(by_elem[e]):
            chosen.append(i)
            removed = cover(i)
            if rec():
                return True
            uncover(i, removed)
            chosen.pop()
        return False

    if not rec():
        return None
    return check_packing(family, Packing(tuple(sorted(chosen))))


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def local_search(family: SetFamily, config: SolverConfig,
                 start: Optional[Packing] = None) -> SolveResult:
    """First-improvement local search from the greedy packing.

    ``swap`` mode searches exhaustively for improving sets of size at most
    ``r``.  ``pwls`` mode sweeps sizes ``1..r`` with the color-coding search
    (size 1 is an exact scan), restarting the sweep after every applied swap.
    """
    if config.mode not in ("swap", "pwls"):
        raise ValueError("local_search runs the swap or pwls modes")
    packing = check_packing(family, start if start is not None else greedy_maximal(family))
    deadline = None if config.budget is None else time.monotonic() + config.budget
    trace: list[dict] = []
    cap = config.max_iterations
    it = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return SolveResult(packing, "budget", trace)
        if cap is not None and it >= cap:
            return SolveResult(packing, "iteration_cap", trace)
        found = None
        if config.mode == "swap":
            found = first_improving_set(family, packing, config.r)
        else:
            for s in range(1, config.r + 1):
                params = SearchParams(r=s, pw=config.pw, trials=config.trials,
                                      seed=_derived_seed(config.seed, it, s),
                                      failure_prob=config.failure_prob)
                found = find_improving_set(family, packing, params)
                if found is not None:
                    break
                if deadline is not None and time.monotonic() > deadline:
                    return SolveResult(packing, "budget", trace)
        if found is None:
            return SolveResult(packing, "local_max", trace)
        new = apply_swap(family, packing, found)
        assert len(new) > len(packing)
        trace.append({"iteration": it, "added": list(found.sets), "removed": list(found.removed),
                      "size": len(new)})
        log.debug("iteration %d: +%s -%s -> %d", it, found.sets, found.removed, len(new))
        packing = new
        it += 1


def solve(family: SetFamily, config: SolverConfig) -> SolveResult:
    if config.mode == "greedy":
        return SolveResult(greedy_maximal(family), "ok")
    if config.mode == "exact":
        try:
            return SolveResult(exact_max_packing(family, config.budget), "optimal")
        except BudgetExceeded as exc:
            return SolveResult(exc.incumbent, "budget")
    return local_search(family, config)


@dataclass(frozen=True)
class SuggestedParameters:
    r: int
    pw: int
    warning: str


def suggested_parameters(k: int, eps: float, n_sets: int) -> SuggestedParameters:
    """Swap size and pathwidth bounds from the approximation analysis.

    ``r = ceil(2 (k+1)^(1/eps) log2 n_sets)`` and ``pw = ceil(4 (k+1)^(1/eps))``.
    These grow far too fast to be practical; treat them as a reference point.
    """
    if k < 3 or eps <= 0 or n_sets < 2:
        raise ValueError("need k >= 3, eps > 0 and n_sets >= 2")
    base = (k + 1) ** (1.0 / eps)
    r = math.ceil(2 * base * math.log2(n_sets) - 1e-9)
    pw = math.ceil(4 * base - 1e-9)
    return SuggestedParameters(r, pw, "theory constants; practical runs should override r and pw")
