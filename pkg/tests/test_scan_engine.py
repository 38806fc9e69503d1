import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srtm.scan import (FilterElement, ScanStats, associative_scan, combine_filter, depth_bound)

from .conftest import random_filter_parts


def test_prefix_sums():
    out, stats = associative_scan(lambda a, b: a + b, [1, 2, 3, 4])
    assert out == [1, 3, 6, 10]
    assert stats.combine_count <= 8 and stats.depth <= depth_bound(4)


def test_reverse_prefix_sums():
    out, _ = associative_scan(lambda a, b: a + b, [1, 2, 3, 4], reverse=True)
    assert out == [10, 9, 7, 4]


def test_single_element():
    out, stats = associative_scan(lambda a, b: a + b, [42])
    assert out == [42]
    assert stats == ScanStats(0, 0)


def test_empty_input_raises():
    with pytest.raises(ValueError):
        associative_scan(lambda a, b: a + b, [])


@settings(max_examples=60, deadline=None)
@given(words=st.lists(st.text(alphabet="abcxyz", min_size=1, max_size=3), min_size=1,
                      max_size=70),
       workers=st.sampled_from([1, 2, 3, 8]), reverse=st.booleans())
def test_matches_fold_for_noncommutative_op(words, workers, reverse):
    out, stats = associative_scan(lambda a, b: a + b, words, workers=workers, reverse=reverse)
    if reverse:
        expected = ["".join(words[k:]) for k in range(len(words))]
    else:
        expected = ["".join(words[:k + 1]) for k in range(len(words))]
    assert out == expected
    assert stats.combine_count <= 2 * len(words)
    assert stats.depth <= depth_bound(len(words))


@pytest.mark.parametrize("reverse", [False, True])
def test_batched_matrix_products(reverse):
    rng = np.random.default_rng(0)
    mats = rng.standard_normal((13, 3, 3)) / 2
    out, _ = associative_scan(lambda a, b: a @ b, mats, reverse=reverse, workers=3)
    for k in range(13):
        seq = mats[k:] if reverse else mats[:k + 1]
        np.testing.assert_allclose(out[k], functools.reduce(np.matmul, seq), atol=1e-12)


def test_filter_elements_match_left_fold(backend):
    rng = np.random.default_rng(1)
    elems = FilterElement(*random_filter_parts(rng, 3, (7,)))
    out, _ = associative_scan(lambda a, b: combine_filter(a, b, backend), elems)
    acc = FilterElement(*(x[0] for x in elems))
    for k in range(1, 7):
        acc = combine_filter(acc, FilterElement(*(x[k] for x in elems)), backend)
        for got, want in zip((x[k] for x in out), acc):
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_depth_and_count_bounds_up_to_6000():
    worst = 0.0
    for n in range(1, 6001):
        _, stats = associative_scan(lambda a, b: a + b, np.zeros(n))
        assert stats.combine_count <= 2 * n
        assert stats.depth <= 2 * math.ceil(math.log2(n)) + 2 if n > 1 else stats.depth == 0
        worst = max(worst, stats.combine_count / n)
    assert worst <= 2


def test_worker_count_does_not_change_results():
    rng = np.random.default_rng(2)
    elems = FilterElement(*random_filter_parts(rng, 3, (101,)))
    ref, ref_stats = associative_scan(combine_filter, elems, workers=1)
    for w in (2, 8):
        out, stats = associative_scan(combine_filter, elems, workers=w)
        assert stats == ref_stats
        for a, b in zip(out, ref):
            np.testing.assert_array_equal(a, b)
