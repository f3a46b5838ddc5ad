import math
import random

import pytest

from setpack.core import Packing, SetFamily
from setpack.instances import gen_random


@pytest.fixture
def e1():
    # S0={1,2,3}, S1={1,4,5}, S2={2,6,7}, S3={4,5,6}
    return SetFamily.from_sets([(1, 2, 3), (1, 4, 5), (2, 6, 7), (4, 5, 6)], n_elements=7, k=3)


@pytest.fixture
def trap():
    # A={1,2,3} blocks the pair B={1,4,5}, C={2,6,7}
    return SetFamily.from_sets([(1, 2, 3), (1, 4, 5), (2, 6, 7)], n_elements=7, k=3)


def random_packing(family, rng):
    order = list(range(len(family)))
    rng.shuffle(order)
    used, chosen = set(), []
    for i in order:
        if rng.random() < 0.7 and used.isdisjoint(family.sets[i]):
            chosen.append(i)
            used.update(family.sets[i])
    return Packing(tuple(sorted(chosen)))


def small_instances(count, seed=0, max_sets=10, k=3):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(k + 2, 14)
        m = min(rng.randint(2, max_sets), math.comb(n, k))
        yield gen_random(n, m, k, rng.randrange(10 ** 9))
