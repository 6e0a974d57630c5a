import numpy as np
import pytest

from sl2lab.core import build_table
from sl2lab.subgroups import generates


@pytest.fixture(scope="session")
def tables():
    cache = {}

    def get(p):
        if p not in cache:
            cache[p] = build_table(p)
        return cache[p]

    return get


def random_generating_pairs(table, count, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    while len(out) < count:
        i, j = (int(v) for v in rng.integers(0, table.size, size=2))
        if generates([i, j], table):
            out.append((table.element(i), table.element(j)))
    return out
