import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypframe.errors import DimensionMismatch, HyperError, InvalidDirection, NotHomogeneous
from hypframe.poly import (
    Polynomial,
    directional_derivative,
    elementary_symmetric,
    evaluate,
    expand_many,
    homogeneous_degree,
    linear_form,
    product,
    restrict_many,
    restrict_univariate,
)


def test_evaluate_monomials():
    p = Polynomial(3, {(2, 1, 0): 3.0, (0, 0, 3): -1.0})
    assert evaluate(p, [2.0, 5.0, 1.0]) == 3 * 4 * 5 - 1
    assert p([1.0, 1.0, 1.0]) == 2.0


def test_duplicate_terms_merge_and_zero_terms_drop():
    p = Polynomial(2, [((1, 1), 2.0), ((1, 1), -2.0), ((2, 0), 1.0)])
    assert p.terms == {(2, 0): 1.0}


def test_not_homogeneous_lists_offending_terms():
    p = Polynomial(2, {(2, 0): 1.0, (1, 0): 1.0, (0, 1): 2.0})
    with pytest.raises(NotHomogeneous) as info:
        homogeneous_degree(p)
    assert set(info.value.offending) == {(1, 0), (0, 1)}


def test_dimension_checks():
    p = elementary_symmetric(3, 2)
    with pytest.raises(DimensionMismatch):
        evaluate(p, [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        p + elementary_symmetric(4, 2)


def test_elementary_symmetric_term_count():
    for d in range(1, 7):
        for k in range(1, d + 1):
            p = elementary_symmetric(d, k)
            assert len(p) == math.comb(d, k)
            assert evaluate(p, np.ones(d)) == math.comb(d, k)
    with pytest.raises(HyperError):
        elementary_symmetric(3, 0)


def test_product_of_linear_forms():
    p = product([linear_form([1, 0]), linear_form([1, 1])])
    assert p.terms == {(2, 0): 1.0, (1, 1): 1.0}


def test_directional_derivative_matches_gradient():
    p = elementary_symmetric(4, 3)
    e = np.array([1.0, 2.0, -1.0, 0.5])
    x = np.array([0.3, -1.2, 2.0, 0.7])
    dp = directional_derivative(p, e)
    assert evaluate(dp, x) == pytest.approx(p.gradient_at(x) @ e, rel=1e-13)


def test_directional_derivative_euler_identity():
    # p'(e) in direction e equals n p(e) for homogeneous p of degree n
    p = Polynomial(3, {(2, 1, 0): 1.0, (0, 1, 2): -3.0, (1, 1, 1): 2.0})
    e = np.array([0.4, 1.5, -0.7])
    assert evaluate(directional_derivative(p, e), e) == pytest.approx(3 * evaluate(p, e), rel=1e-13)


def test_restriction_leading_coefficient_is_p_at_e():
    p = elementary_symmetric(4, 3)
    e = np.array([1.0, 2.0, 1.0, 1.0])
    c = restrict_univariate(p, e, [0.2, -1.0, 3.0, 0.5])
    assert c[-1] == pytest.approx(evaluate(p, e), rel=1e-12)


def test_restriction_rejects_invalid_direction():
    p = Polynomial(2, {(1, 1): 1.0})
    with pytest.raises(InvalidDirection):
        restrict_univariate(p, [1.0, 0.0], [1.0, 1.0])


def test_restriction_of_product_of_forms():
    # p = x1 x2 x3 at e = 1: p(t e - x) = prod (t - x_i)
    p = elementary_symmetric(3, 3)
    x = np.array([1.0, 2.0, 3.0])
    expect = np.polynomial.polynomial.polyfromroots(x)
    assert np.allclose(restrict_univariate(p, np.ones(3), x), expect, atol=1e-12)
    assert np.allclose(expand_many(p, np.ones(3), x[None])[0], expect, atol=1e-14)


def test_serialization_roundtrip():
    p = Polynomial(3, {(2, 1, 0): 3.0, (0, 0, 3): -1.5})
    assert Polynomial.from_dict(p.to_dict()) == p
    with pytest.raises(NotHomogeneous):
        Polynomial.from_dict({"dim": 2, "terms": [{"exp": [1, 0], "coef": 1}, {"exp": [2, 0], "coef": 1}]})


coord = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coord, min_size=4, max_size=4), st.floats(-2, 2))
def test_interpolation_and_expansion_agree(x, t):
    p = Polynomial(4, {(1, 1, 1, 0): 1.0, (0, 1, 1, 1): -2.0, (3, 0, 0, 0): 0.5, (1, 0, 0, 2): 1.5})
    e = np.array([1.0, 0.5, 2.0, -1.0])
    x = np.array(x)
    a = restrict_many(p, e, x[None])[0]
    b = expand_many(p, e, x[None])[0]
    scale = 1.0 + np.max(np.abs(b))
    assert np.allclose(a, b, atol=1e-9 * scale)
    direct = evaluate(p, t * e - x)
    assert np.polynomial.polynomial.polyval(t, b) == pytest.approx(direct, abs=1e-9 * scale * 10)
