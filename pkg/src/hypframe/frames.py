"""Scaled Jordan frames and Jordan frames.

A scaled frame is a family of rank-one cone elements whose sum is interior;
a Jordan frame is a family of primitive idempotents summing to e.  This
module verifies candidates (it never searches for frames) and exploits
verified Jordan frames: spectra of frame combinations, frame coordinates,
the coordinatewise Jordan product, and minimality certificates.
"""

from __future__ import annotations

import hashlib
import json
import weakref
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import sampling
from .errors import DimensionMismatch, PreconditionError
from .system import (
    SystemDef,
    classify_idempotent,
    derivative_system,
    eigenvalues,
    eigenvalues_many,
    rank_of_spectra,
    redirect,
    shift_into_cone_many,
)

SUM_TOL = 1e-9
ORTHONORMAL_TOL = 1e-7
SPAN_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FrameSet:
    """Ordered family of points; repeats are allowed."""

    elements: np.ndarray
    kind: str = "scaled"

    def __post_init__(self):
        C = np.atleast_2d(np.array(self.elements, dtype=float))
        if C.ndim != 2 or C.shape[0] < 1:
            raise DimensionMismatch("a frame needs at least one element")
        if self.kind not in ("scaled", "jordan"):
            raise ValueError(f"frame kind must be 'scaled' or 'jordan', not {self.kind!r}")
        C.setflags(write=False)
        object.__setattr__(self, "elements", C)

    def __len__(self):
        return self.elements.shape[0]

    def to_dict(self):
        return {"elements": self.elements.tolist(), "kind": self.kind}


def as_frame(F, kind="scaled") -> FrameSet:
    return F if isinstance(F, FrameSet) else FrameSet(np.asarray(F, dtype=float), kind)


@dataclass
class FrameReport:
    kind: str
    k: int
    n: int
    spectra: np.ndarray
    ranks: list
    sum_spectrum: np.ndarray
    gram: np.ndarray
    verified: bool
    violations: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    theorem_violation: bool = False

    @property
    def alphas(self) -> np.ndarray:
        """Largest eigenvalue of each element (its nonzero eigenvalue when rank one)."""
        return self.spectra[:, 0]

    def to_dict(self):
        return {
            "kind": self.kind,
            "k": self.k,
            "n": self.n,
            "verified": self.verified,
            "theorem_violation": self.theorem_violation,
            "ranks": [int(r) for r in self.ranks],
            "spectra": self.spectra.tolist(),
            "sum_spectrum": self.sum_spectrum.tolist(),
            "gram": self.gram.tolist(),
            "margins": {k: float(v) for k, v in self.margins.items()},
            "violations": list(self.violations),
        }


def _elements(sys, F):
    F = as_frame(F)
    C = F.elements
    if C.shape[1] != sys.dim:
        raise DimensionMismatch(f"frame elements have dimension {C.shape[1]}, system has {sys.dim}")
    return F, C


def _common(sys, C):
    spectra = eigenvalues_many(sys, C)
    ranks = rank_of_spectra(sys, spectra)
    total = C.sum(axis=0)
    sum_spec = eigenvalues(sys, total).values
    gram = C @ sys.gram @ C.T
    return spectra, ranks, total, sum_spec, gram


def verify_scaled_frame(sys: SystemDef, F) -> FrameReport:
    """Rank-one cone elements with interior sum; a verified frame must have k >= n."""
    F, C = _elements(sys, F)
    k, n = len(C), sys.degree
    spectra, ranks, _, sum_spec, gram = _common(sys, C)
    violations = []
    bad_rank = [i for i in range(k) if ranks[i] != 1 or spectra[i, 0] <= 0]
    if bad_rank:
        violations.append(f"elements {bad_rank} are not rank-one cone elements (ranks {ranks[bad_rank].tolist()})")
    interior = float(sum_spec[-1])
    if not interior > sys.tol.cone:
        violations.append(f"sum is not interior: smallest eigenvalue {interior:.3g}")
    verified = not violations
    tails = np.abs(spectra[:, 1:]).max(axis=1) if n > 1 else np.zeros(k)
    margins = {
        "sum_interior": interior,
        "rank_one_tail": float(np.max(tails / (1.0 + np.abs(spectra).max(axis=1)))),
    }
    report = FrameReport("scaled", k, n, spectra, ranks.tolist(), sum_spec, gram, verified, violations, margins)
    if verified and k < n:
        report.theorem_violation = True
        report.violations.append(f"verified scaled frame has k={k} < n={n}")
    return report


def verify_jordan_frame(sys: SystemDef, F) -> FrameReport:
    """Primitive idempotents summing to e; verified frames are orthonormal with k = n."""
    F, C = _elements(sys, F)
    k, n = len(C), sys.degree
    spectra, ranks, total, sum_spec, gram = _common(sys, C)
    unit = np.zeros(n)
    unit[0] = 1.0
    idem_err = np.abs(spectra - unit).max(axis=1)
    idem_tol = sys.tol.root * (1.0 + np.abs(spectra).max(axis=1))
    violations = []
    bad = np.flatnonzero(idem_err > idem_tol).tolist()
    if bad:
        violations.append(f"elements {bad} are not primitive idempotents (spectra {spectra[bad].round(12).tolist()})")
    sum_err = float(np.max(np.abs(total - sys.direction)))
    if sum_err > SUM_TOL:
        violations.append(f"sum differs from e by {sum_err:.3g}")
    verified = not violations
    gram_err = float(np.max(np.abs(gram - np.eye(k))))
    margins = {"primitive": float(idem_err.max()), "sum_residual": sum_err, "gram_identity": gram_err}
    report = FrameReport("jordan", k, n, spectra, ranks.tolist(), sum_spec, gram, verified, violations, margins)
    if verified:
        if gram_err > ORTHONORMAL_TOL:
            report.theorem_violation = True
            report.violations.append(f"Jordan frame is not orthonormal: Gram off identity by {gram_err:.3g}")
        if k != n:
            report.theorem_violation = True
            report.violations.append(f"Jordan frame has k={k} != n={n}")
    return report


def scaled_to_jordan_check(sys: SystemDef, F) -> dict:
    """For a scaled frame with sum d: k = n exactly when it is a Jordan frame of (V, p, d)."""
    F, C = _elements(sys, F)
    rep = verify_scaled_frame(sys, F)
    if not rep.verified:
        raise PreconditionError("frame does not verify as a scaled Jordan frame: " + "; ".join(rep.violations))
    d = C.sum(axis=0)
    redirected = redirect(sys, d)
    jr = verify_jordan_frame(redirected, F)
    lhs = rep.k == rep.n
    return {
        "k": rep.k,
        "n": rep.n,
        "direction": d.tolist(),
        "k_equals_n": lhs,
        "jordan_in_redirected": jr.verified,
        "agree": lhs == jr.verified,
        "redirected_violations": jr.violations,
    }


# per-system memo of frames already verified as Jordan frames
_VERIFIED = weakref.WeakKeyDictionary()


def _require_jordan(sys, F):
    F, C = _elements(sys, F)
    seen = _VERIFIED.setdefault(sys, set())
    key = (C.shape, C.tobytes())
    if key in seen:
        return C
    rep = verify_jordan_frame(sys, F)
    if not rep.verified:
        raise PreconditionError("frame does not verify as a Jordan frame: " + "; ".join(rep.violations))
    seen.add(key)
    return C


def frame_combination_many(sys: SystemDef, F, R) -> np.ndarray:
    """Max deviation of lambda(sum r_i c_i) from sorted r, per row of R."""
    C = _require_jordan(sys, F)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape[1] != len(C):
        raise DimensionMismatch(f"need {len(C)} weights, got {R.shape[1]}")
    lam = eigenvalues_many(sys, R @ C)
    expect = -np.sort(-R, axis=1)
    return np.max(np.abs(lam - expect), axis=1)


def frame_combination_spectrum(sys: SystemDef, F, r, tol: float | None = None) -> dict:
    C = _require_jordan(sys, F)
    r = np.asarray(r, dtype=float)
    if r.shape != (len(C),):
        raise DimensionMismatch(f"need {len(C)} weights, got shape {r.shape}")
    x = r @ C
    lam = eigenvalues(sys, x).values
    expect = np.sort(r)[::-1]
    err = float(np.max(np.abs(lam - expect)))
    tol = sys.tol.root * (1.0 + np.max(np.abs(expect))) if tol is None else tol
    return {"pass": err <= tol, "point": x.tolist(), "spectrum": lam.tolist(), "expected": expect.tolist(), "error": err}


def frame_coordinates(sys: SystemDef, F, x) -> tuple[np.ndarray, float]:
    """(<x, c_i>)_i and the distance from x to the span of the frame."""
    C = _require_jordan(sys, F)
    x = np.asarray(x, dtype=float)
    coords = C @ sys.gram @ x
    residual = float(np.linalg.norm(x - coords @ C))
    return coords, residual


def jordan_product(sys: SystemDef, F, x, y) -> np.ndarray:
    """Coordinatewise product in frame coordinates, mapped back to V."""
    C = _require_jordan(sys, F)
    cx, rx = frame_coordinates(sys, F, x)
    cy, ry = frame_coordinates(sys, F, y)
    scale = 1.0 + max(np.linalg.norm(x), np.linalg.norm(y))
    if max(rx, ry) > SPAN_TOL * scale:
        raise PreconditionError(f"operand lies outside the span of the frame (residual {max(rx, ry):.3g})")
    return (cx * cy) @ C


def system_hash(sys: SystemDef) -> str:
    doc = json.dumps(sys.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()


def _containment_witness(sys, num_samples, seed):
    """Search for a point in the derivative cone that lies outside the cone of p."""
    deriv = derivative_system(sys, 1)
    tol = sys.tol.cone
    for start in range(0, num_samples, sampling.BLOCK):
        count = min(sampling.BLOCK, num_samples - start)
        X = sampling.gaussian(seed, "containment", start + count, sys.dim)[start:]
        u = 1e-3 * sampling.half_open_up(seed, "containment:u", start + count)[start:]
        Y = shift_into_cone_many(deriv, X) + u[:, None] * sys.direction[None, :]
        lam = eigenvalues_many(sys, Y)
        hit = lam[:, -1] < -tol * (1.0 + np.abs(lam).max(axis=1))
        if hit.any():
            i = int(np.flatnonzero(hit)[0])
            return Y[i], start + i + 1
    return None, num_samples


def certify_minimality(sys: SystemDef, F, seed: int = 0, num_samples: int = 10_000) -> dict:
    """Certificate that p is minimal, derived from a verified scaled frame.

    The minimality clauses follow from the frame; the strict inclusion of
    the cone in the derivative cone is additionally witnessed by sampling.
    Failing to find a witness leaves that clause "not witnessed" without
    revoking the certificate.
    """
    rep = verify_scaled_frame(sys, F)
    base = {"system_hash": system_hash(sys), "frame": as_frame(F).elements.tolist(), "seed": seed}
    if not rep.verified or rep.theorem_violation:
        return {**base, "issued": False, "reason": "; ".join(rep.violations) or "frame rejected"}
    if sys.degree < 2:
        return {**base, "issued": False, "reason": "degree must be at least 2"}
    # in the direction d = sum c_i the nonzero eigenvalues of the c_i add up to n
    red = redirect(sys, as_frame(F).elements.sum(axis=0))
    alphas = eigenvalues_many(red, as_frame(F).elements)[:, 0]
    alpha_gap = float(abs(alphas.sum() - sys.degree))
    if alpha_gap > 1e-7 * sys.degree:
        return {**base, "issued": False, "reason": f"eigenvalues along d sum to {alphas.sum():.12g}, not n"}
    witness, used = _containment_witness(sys, num_samples, seed)
    return {
        **base,
        "issued": True,
        "spectra": rep.spectra.tolist(),
        "alphas_along_sum": alphas.tolist(),
        "sum_interior_margin": rep.margins["sum_interior"],
        "conclusions": ["p minimal", "p' minimal", "cone strictly inside derivative cone"],
        "strict_containment": {
            "witnessed": witness is not None,
            "witness": None if witness is None else witness.tolist(),
            "samples_used": used,
        },
    }


def derivative_persistence_check(sys: SystemDef, F, m: int) -> dict:
    """Whether a scaled frame of p stays a scaled frame of the m-th derivative."""
    rep = verify_scaled_frame(sys, F)
    if not rep.verified:
        raise PreconditionError("frame does not verify in the base system: " + "; ".join(rep.violations))
    deriv = derivative_system(sys, m)
    drep = verify_scaled_frame(deriv, F)
    return {
        "m": m,
        "degree": deriv.degree,
        "verified": drep.verified,
        "ranks": drep.ranks,
        "all_rank_one": all(r == 1 for r in drep.ranks),
        "violations": drep.violations,
    }


def no_jordan_frame_in_derivative_check(sys: SystemDef, F) -> dict:
    """Test a candidate Jordan frame for the first derivative system.

    For degree n >= 4 every candidate must fail; for n = 3 a Jordan frame of
    the derivative can exist and the result is only recorded.
    """
    n = sys.degree
    if n < 3:
        raise PreconditionError("needs degree at least 3")
    deriv = derivative_system(sys, 1)
    rep = verify_jordan_frame(deriv, F)
    consistent = not (rep.verified and n >= 4)
    return {
        "n": n,
        "verified_in_derivative": rep.verified,
        "consistent": consistent,
        "failure_mode": rep.violations[0] if rep.violations else None,
    }


def orthogonal_sum_check(sys: SystemDef, C, complete: bool = False, orth_tol: float = 1e-7) -> dict:
    """Sum of mutually orthogonal primitive idempotents is an idempotent of rank k."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[1] != sys.dim:
        raise DimensionMismatch(f"elements have dimension {C.shape[1]}, system has {sys.dim}")
    for i, c in enumerate(C):
        if classify_idempotent(sys, c) != 1:
            raise PreconditionError(f"element {i} is not a primitive idempotent")
    G = C @ sys.gram @ C.T
    off = np.abs(G - np.diag(np.diag(G)))
    if off.max(initial=0.0) > orth_tol:
        raise PreconditionError(f"elements are not mutually orthogonal (max |<ci,cj>| = {off.max():.3g})")
    k, n = len(C), sys.degree
    total = C.sum(axis=0)
    idem = classify_idempotent(sys, total)
    out = {"k": k, "n": n, "idempotent_rank": idem, "sum": total.tolist()}
    ok = idem == k and k <= n
    if k == n and complete:
        resid = float(np.max(np.abs(total - sys.direction)))
        out["sum_minus_e"] = resid
        ok = ok and resid <= 1e-8
    out["holds"] = bool(ok)
    return out


def jordan_conditions(sys: SystemDef, C, complete: bool = False, orth_tol: float = 1e-7) -> dict:
    """Evaluate (i) all primitive, (ii) sum = e, (iii) pairwise orthogonal, and the implications among them."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    k, n = len(C), sys.degree
    i_ = all(classify_idempotent(sys, c) == 1 for c in C)
    ii = float(np.max(np.abs(C.sum(axis=0) - sys.direction))) <= 1e-8
    G = C @ sys.gram @ C.T
    iii = bool(np.max(np.abs(G - np.diag(np.diag(G))), initial=0.0) <= orth_tol)
    checks = {
        "i_ii_imply_iii": (not (i_ and ii)) or iii,
        "ii_iii_imply_i": (not (ii and iii)) or i_,
    }
    if k == n and complete:
        checks["i_iii_imply_ii"] = (not (i_ and iii)) or ii
    return {"i": i_, "ii": ii, "iii": iii, "implications": checks, "holds": all(checks.values())}
