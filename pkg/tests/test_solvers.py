import itertools
import math
import random

import pytest

from setpack.core import Packing, SetFamily, check_packing, is_packing
from setpack.instances import gen_planted_3dm, gen_random
from setpack.solvers import (BudgetExceeded, SolverConfig, exact_max_packing, greedy_maximal,
                             is_maximal, local_search, perfect_packing, solve,
                             suggested_parameters)
from setpack.swapsearch import first_improving_set

from conftest import small_instances


def brute_max(fam):
    for size in range(len(fam), -1, -1):
        for combo in itertools.combinations(range(len(fam)), size):
            if is_packing(fam, combo):
                return size
    return 0


def test_greedy_examples(e1):
    assert greedy_maximal(e1).members == (0, 3)
    disjoint = SetFamily.from_sets([(1, 2), (3, 4), (5, 6)])
    assert greedy_maximal(disjoint).members == (0, 1, 2)
    star = SetFamily.from_sets([(1, 2), (1, 3), (1, 4, 5)])
    assert len(greedy_maximal(star)) == 1


def test_greedy_is_maximal():
    for fam in small_instances(50, seed=40):
        assert is_maximal(fam, greedy_maximal(fam))


def test_exact_examples(e1):
    assert len(exact_max_packing(e1)) == 2
    disjoint = SetFamily.from_sets([(1, 2), (3, 4), (5, 6), (7,)])
    assert len(exact_max_packing(disjoint)) == 4
    assert len(exact_max_packing(SetFamily(3, (), 3))) == 0


def test_exact_matches_bruteforce():
    for fam in small_instances(150, seed=41, max_sets=12):
        best = exact_max_packing(fam)
        check_packing(fam, best)
        assert len(best) == brute_max(fam)


def test_exact_matches_bruteforce_mixed_sizes():
    rng = random.Random(3)
    for _ in range(100):
        n = rng.randint(4, 10)
        sets = {tuple(sorted(rng.sample(range(1, n + 1), rng.randint(1, 3)))) for _ in range(rng.randint(1, 12))}
        fam = SetFamily.from_sets(sorted(sets), n_elements=n, k=3)
        assert len(exact_max_packing(fam)) == brute_max(fam)


def test_exact_budget_raises_with_incumbent():
    fam = gen_random(60, 200, 3, 1)
    with pytest.raises(BudgetExceeded) as info:
        exact_max_packing(fam, budget=1e-4)
    check_packing(fam, info.value.incumbent)
    assert info.value.optimal is False
    res = solve(fam, SolverConfig(mode="exact", budget=1e-4))
    assert res.status == "budget"


def test_perfect_packing_matches_exact():
    for m in range(1, 6):
        for seed in range(5):
            fam, planted = gen_planted_3dm(m, min(3 * m, m ** 3 - m), seed)
            pp = perfect_packing(fam)
            assert pp is not None and len(pp) == planted
    for fam in small_instances(100, seed=42):
        pp = perfect_packing(fam)
        perfect = fam.n_elements % 3 == 0 and len(exact_max_packing(fam)) == fam.n_elements // 3
        assert (pp is not None) == perfect
        if pp is not None:
            check_packing(fam, pp)


def test_local_search_e1_swap2(e1):
    res = local_search(e1, SolverConfig(mode="swap", r=2))
    assert res.size == 2 and res.status == "local_max" and res.trace == []


def test_local_search_trap(trap):
    assert greedy_maximal(trap).members == (0,)
    res = local_search(trap, SolverConfig(mode="swap", r=2))
    assert res.packing.members == (1, 2)
    assert res.trace == [{"iteration": 0, "added": [1, 2], "removed": [0], "size": 2}]
    res = local_search(trap, SolverConfig(mode="pwls", r=2, pw=1, trials=2000, seed=3))
    assert res.packing.members == (1, 2)


def test_unbounded_swap_equals_exact():
    for fam in small_instances(60, seed=43, max_sets=10):
        res = local_search(fam, SolverConfig(mode="swap", r=len(fam)))
        assert res.size == len(exact_max_packing(fam))


def test_local_search_invariants():
    for i, fam in enumerate(small_instances(40, seed=44, max_sets=10)):
        for mode in ("swap", "pwls"):
            cfg = SolverConfig(mode=mode, r=3, pw=2, trials=200, seed=i)
            res = local_search(fam, cfg)
            check_packing(fam, res.packing)
            assert is_maximal(fam, res.packing)
            assert len(res.trace) <= fam.n_elements
            sizes = [len(greedy_maximal(fam))] + [t["size"] for t in res.trace]
            assert all(a < b for a, b in zip(sizes, sizes[1:]))


def test_local_search_iteration_cap(trap):
    res = local_search(trap, SolverConfig(mode="swap", r=2, max_iterations=0))
    assert res.status == "iteration_cap" and res.size == 1


def test_local_search_custom_start(e1):
    res = local_search(e1, SolverConfig(mode="swap", r=2), start=Packing((0,)))
    assert res.size == 2


def test_swap2_ratio_bound():
    for fam in small_instances(100, seed=45, max_sets=14):
        s2 = local_search(fam, SolverConfig(mode="swap", r=2)).size
        assert len(exact_max_packing(fam)) <= math.ceil((fam.k + 1) / 2 * s2)


def test_solver_config_validation():
    for bad in [dict(mode="nope"), dict(mode="swap", r=0), dict(mode="pwls", pw=-1),
                dict(mode="pwls", trials=0), dict(mode="exact", budget=0),
                dict(mode="swap", max_iterations=-1)]:
        with pytest.raises(ValueError):
            SolverConfig(**bad)


def test_solve_dispatch(e1):
    assert solve(e1, SolverConfig(mode="greedy")).status == "ok"
    assert solve(e1, SolverConfig(mode="exact")).status == "optimal"
    assert solve(e1, SolverConfig(mode="swap")).status == "local_max"


def test_suggested_parameters():
    p = suggested_parameters(3, 1, 256)
    assert (p.r, p.pw) == (64, 16) and p.warning
    p = suggested_parameters(3, 2, 2)
    assert (p.r, p.pw) == (4, 8)
    rs = [suggested_parameters(3, 1.5, n).r for n in range(2, 300, 7)]
    assert rs == sorted(rs)
    with pytest.raises(ValueError):
        suggested_parameters(2, 1, 10)
