import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decmatch.graph import collapse, is_integral_matching
from decmatch.sparsify import (BucketColoring, Sparsifier, SparsifierError, Update, round_to_integral,
                               sample_parameter)

from helpers import build

F = Fraction
EPS = F(1, 5)


def _sparsifier(xC, eps=EPS, seed=0, theta=F(1, 8), n=16, W=4):
    return Sparsifier(xC, eps, seed, theta, n, W)


@given(st.fractions(min_value=F(1, 10**6), max_value=1, max_denominator=10**6),
       st.sampled_from([F(1, 2), F(1, 5), F(1, 8)]))
@settings(max_examples=200, deadline=None)
def test_bucket_index_brackets_the_value(value, eps):
    sp = Sparsifier({}, eps, 0, 1, 4, 4)
    i = sp.bucket_index(value)
    assert 1 / sp.power(i) <= value
    assert i == 0 or value < 1 / sp.power(i - 1)


def test_sizes_for_small_buckets():
    sp = _sparsifier({})
    assert sp.ceil_d == math.ceil(4 * math.log(10) * 25) == 231
    assert sp.palette_size(0) == 3 and sp.sample_size(0) == 3
    assert sp.membership_probability(3) == 1     # sample covers the palette below d
    big = 60                                     # (6/5)^60 is far above d
    assert sp.sample_size(big) == 3 * sp.ceil_d
    assert sp.membership_probability(big) == F(3 * sp.ceil_d, sp.palette_size(big))


def test_rejects_entries_above_threshold():
    with pytest.raises(SparsifierError, match="threshold"):
        _sparsifier({(0, 1, 1): F(1, 4)})


def test_coloring_is_proper_and_palette_bounded():
    col = BucketColoring(3)
    assert [col.insert(k) for k in [(0, 1, 1), (0, 2, 1), (0, 3, 1)]] == [0, 1, 2]
    with pytest.raises(SparsifierError, match="exhausted"):
        col.insert((0, 4, 1))
    col.delete((0, 2, 1))
    assert col.insert((0, 4, 1)) == 1
    assert col.is_proper()


def _random_entries(rng, n, count, top):
    entries = {}
    while len(entries) < count:
        u, v = sorted(int(a) for a in rng.choice(n, size=2, replace=False))
        w = int(rng.integers(1, 5))
        entries[(u, v, w)] = F(int(rng.integers(1, 64)), 64) * top
    return entries


def test_random_update_scripts_keep_colorings_proper():
    rng = np.random.default_rng(5)
    for _ in range(5):
        # load per vertex stays at most 1 by scaling with the vertex count
        xC = _random_entries(rng, 24, 120, F(1, 24))
        sp = _sparsifier(xC, n=24)
        live = dict(xC)
        for _ in range(200):
            key = sorted(live)[int(rng.integers(len(live)))]
            if rng.random() < 0.3:
                changed = sp.update(Update("remove", key))
                del live[key]
            else:
                live[key] = live[key] * F(int(rng.integers(0, 4)), 4)
                changed = sp.update(Update("decrease", key, live[key]))
                if not live[key]:
                    del live[key]
            assert changed <= {key}
            assert sp.is_proper()
            assert set(sp.value) == set(live)
            assert sp.K <= set(live)
            if not live:
                break


def test_decrease_must_lower():
    sp = _sparsifier({(0, 1, 1): F(1, 10)})
    with pytest.raises(SparsifierError):
        sp.update(Update("decrease", (0, 1, 1), F(1, 10)))
    with pytest.raises(SparsifierError, match="unknown entry"):
        sp.update(Update("remove", (2, 3, 1)))


def test_tiny_entries_are_dropped():
    sp = _sparsifier({(0, 1, 1): F(1, 10**12), (2, 3, 1): F(1, 10)})
    assert sp.dropped == {(0, 1, 1)}
    assert (0, 1, 1) not in sp.K and (2, 3, 1) in sp.K
    sp.update(Update("remove", (0, 1, 1)))
    assert sp.dropped == set()


def test_same_seed_same_sparse_graph():
    rng = np.random.default_rng(8)
    xC = _random_entries(rng, 30, 200, F(1, 30))
    a = _sparsifier(xC, n=30, seed=4)
    b = _sparsifier(xC, n=30, seed=4)
    assert a.K == b.K and a.samples == b.samples


def test_sample_parameter_formula():
    assert sample_parameter(F(1, 2)) == pytest.approx(16 * math.log(4))


def test_rounding_combines_sparse_and_integral_parts():
    g = build(6, [(0, 1, 2), (1, 2, 3), (2, 0, 1), (3, 4, 4), (4, 5, 1)])
    K = {(0, 1, 2), (1, 2, 3), (0, 2, 1)}
    zC = collapse(g, {3: F(1)})
    M = round_to_integral(g, K, zC, EPS)
    assert is_integral_matching(g, M)
    assert sorted(M) == [1, 3]
    with pytest.raises(SparsifierError, match="share vertices"):
        round_to_integral(g, K | {(4, 5, 1)}, zC, EPS)
