import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypframe.errors import HyperError
from hypframe.roots import all_roots, all_roots_many


def from_roots(r):
    return np.polynomial.polynomial.polyfromroots(r)


def test_simple_real_roots_sorted_descending():
    rep = all_roots(from_roots([1.0, -2.0, 3.5]))
    assert np.allclose(rep.roots, [3.5, 1.0, -2.0], atol=1e-12)
    assert not rep.violation and not rep.marginal


def test_multiple_root_cloud_collapses():
    rep = all_roots(from_roots([2.0, 2.0, 2.0, -1.0]))
    assert np.allclose(rep.roots, [2.0, 2.0, 2.0, -1.0], atol=1e-9)
    assert rep.max_imag == 0.0
    assert sorted(rep.multiplicities) == [1, 3]
    assert rep.raw_max_imag > 0.0


def test_quadruple_root_at_zero():
    rep = all_roots([0.0, 0.0, 0.0, 0.0, 1.0])
    assert np.allclose(rep.roots, 0.0)


def test_complex_pair_is_a_violation():
    # t^2 + 1
    rep = all_roots([1.0, 0.0, 1.0])
    assert rep.violation
    assert rep.max_imag == pytest.approx(1.0)


def test_degree_one():
    rep = all_roots([3.0, 2.0])
    assert rep.roots.tolist() == [-1.5]


def test_vanishing_leading_coefficient_rejected():
    with pytest.raises(HyperError):
        all_roots([1.0, 2.0, 0.0])


def test_deterministic():
    c = from_roots([0.3, 0.3, -1.0, 2.0, 2.0000001])
    a, b = all_roots(c), all_roots(c)
    assert np.array_equal(a.roots, b.roots)


def test_batched_matches_single():
    rng = np.random.default_rng(5)
    R = rng.normal(size=(50, 5))
    C = np.array([from_roots(r) for r in R])
    roots, max_imag, _, violation = all_roots_many(C)
    assert not violation.any()
    for i in range(50):
        assert np.allclose(roots[i], all_roots(C[i]).roots, atol=1e-10)
        assert np.allclose(roots[i], np.sort(R[i])[::-1], atol=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
def test_recovers_real_roots(r):
    r = np.array(r)
    rep = all_roots(from_roots(r))
    assert not rep.violation
    spread = 1.0 + np.max(np.abs(r))
    # clusters of m roots are only determined to about eps^(1/m)
    assert np.allclose(rep.roots, np.sort(r)[::-1], atol=1e-4 * spread)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=6))
def test_integer_roots_with_repeats(r):
    r = np.array(r, dtype=float)
    rep = all_roots(from_roots(r))
    assert np.allclose(rep.roots, np.sort(r)[::-1], atol=1e-6)
