import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypframe import exemplars as exm
from hypframe.errors import PreconditionError
from hypframe.frames import (
    FrameSet,
    certify_minimality,
    derivative_persistence_check,
    frame_combination_many,
    frame_combination_spectrum,
    frame_coordinates,
    jordan_conditions,
    jordan_product,
    no_jordan_frame_in_derivative_check,
    orthogonal_sum_check,
    scaled_to_jordan_check,
    system_hash,
    verify_jordan_frame,
    verify_scaled_frame,
)
from hypframe.system import eigenvalues

E2_FRAME = FrameSet(np.array([[1.5, 0.0, 0.0], [-0.5, 1.0, 1.0]]), "jordan")


def test_e2_frame_is_jordan():
    sys = exm.get("exR3E2").system
    rep = verify_jordan_frame(sys, E2_FRAME)
    assert rep.verified and not rep.theorem_violation
    assert rep.k == rep.n == 2
    assert np.allclose(rep.gram, np.eye(2), atol=1e-12)


def test_coordinate_frame_of_e3_in_r4_is_scaled_not_jordan():
    sys = exm.get("ex4_4").system
    I = np.eye(4)
    assert verify_scaled_frame(sys, FrameSet(I, "scaled")).verified
    rep = verify_jordan_frame(sys, FrameSet(I, "jordan"))
    assert not rep.verified
    assert any("primitive" in v for v in rep.violations)


def test_sum_not_interior_rejected():
    sys = exm.get("ex3_4").system
    rep = verify_scaled_frame(sys, FrameSet(np.eye(3)[1:], "scaled"))
    assert not rep.verified
    assert any("interior" in v for v in rep.violations)


def test_scaled_to_jordan_equivalence():
    for ex_id in ("ex3_5", "ex4_4", "exR3E3"):
        ex = exm.get(ex_id)
        F = next(f for f in ex.known_frames if f.kind == "scaled") if ex_id != "exR3E3" else FrameSet(
            ex.known_frames[0].elements, "scaled")
        assert scaled_to_jordan_check(ex.system, F)["agree"]


def test_combination_spectrum_on_e2_frame():
    sys = exm.get("exR3E2").system
    res = frame_combination_spectrum(sys, E2_FRAME, [2.0, -1.0])
    assert res["pass"]
    assert np.allclose(res["point"], [3.5, -1.0, -1.0])


def test_combination_needs_jordan_frame():
    sys = exm.get("ex4_4").system
    with pytest.raises(PreconditionError):
        frame_combination_spectrum(sys, FrameSet(np.eye(4), "jordan"), [1, 2, 3, 4])


def test_jordan_product_in_coordinates():
    sys = exm.get("exR3E3").system
    F = exm.get("exR3E3").known_frames[0]
    x, y = np.array([1.0, 2.0, 3.0]), np.array([-1.0, 0.5, 2.0])
    assert np.allclose(jordan_product(sys, F, x, y), x * y)
    coords, resid = frame_coordinates(sys, F, x)
    assert np.allclose(coords, x) and resid < 1e-12


def test_certificates_and_refusals():
    for n in range(2, 7):
        ex = exm.get(f"exR{n}E{n}")
        cert = certify_minimality(ex.system, FrameSet(np.eye(n), "scaled"), seed=0, num_samples=2000)
        assert cert["issued"], n
        assert cert["strict_containment"]["witnessed"]
        assert sum(cert["alphas_along_sum"]) == pytest.approx(n)
    ex32 = exm.get("ex3_2")
    F, _ = ex32.rejected_frames[0]
    assert not certify_minimality(ex32.system, F)["issued"]
    ex34 = exm.get("ex3_4")
    assert not certify_minimality(ex34.system, FrameSet(np.eye(3)[1:], "scaled"))["issued"]


def test_certificate_is_deterministic():
    sys = exm.get("exR3E3").system
    F = FrameSet(np.eye(3), "scaled")
    assert certify_minimality(sys, F, seed=4, num_samples=500) == certify_minimality(sys, F, seed=4, num_samples=500)
    assert system_hash(sys) == system_hash(exm.get("exR3E3").system)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_derivative_persistence_of_coordinate_frame(n):
    sys = exm.get(f"exR{n}E{n}").system
    F = FrameSet(np.eye(n), "scaled")
    for m in range(0, n):
        res = derivative_persistence_check(sys, F, m)
        assert res["verified"] and res["all_rank_one"], (n, m)


def test_no_jordan_frame_in_derivative():
    for n in (3, 4, 5):
        sys = exm.get(f"exR{n}E{n}").system
        res = no_jordan_frame_in_derivative_check(sys, FrameSet(np.eye(n), "jordan"))
        assert res["consistent"]
        assert not res["verified_in_derivative"]
    with pytest.raises(PreconditionError):
        no_jordan_frame_in_derivative_check(exm.get("exR2E2").system, FrameSet(np.eye(2), "jordan"))


def test_orthogonal_sum_and_conditions():
    sys = exm.get("sym3").system
    C = np.array([exm.vec_sym(np.diag(v)) for v in np.eye(3)[:2]])
    res = orthogonal_sum_check(sys, C)
    assert res["holds"] and res["idempotent_rank"] == 2
    full = np.array([exm.vec_sym(np.diag(v)) for v in np.eye(3)])
    assert jordan_conditions(sys, full, complete=True)["holds"]
    assert orthogonal_sum_check(sys, full, complete=True)["holds"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=3, max_size=3))
def test_rotated_frame_in_sym3(r):
    sys = exm.get("sym3").system
    Q, _ = np.linalg.qr(np.array([[1.0, 2.0, 0.5], [0.3, -1.0, 2.0], [1.5, 0.2, -0.7]]))
    C = np.array([exm.vec_sym(np.outer(q, q)) for q in Q.T])
    assert verify_jordan_frame(sys, FrameSet(C, "jordan")).verified
    err = frame_combination_many(sys, FrameSet(C, "jordan"), np.array([r]))[0]
    assert err <= 1e-7 * (1 + max(abs(v) for v in r))
    M = Q @ np.diag(r) @ Q.T
    assert np.allclose(eigenvalues(sys, exm.vec_sym(M)).values, np.sort(r)[::-1], atol=1e-7)
