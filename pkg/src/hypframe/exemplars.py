"""Catalog of concrete hyperbolic systems with known spectra and frames.

Each exemplar is validated when built: every recorded spectrum is
recomputed through the polynomial path and compared within the system's
root tolerance.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import sampling
from .errors import HyperError, PreconditionError
from .frames import FrameSet
from .poly import Polynomial, elementary_symmetric, linear_form, product
from .system import SystemDef, Tolerances, eigenvalues, eigenvalues_many, new_system, rank, rank_of_spectra

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class KnownSpectrum:
    point: tuple
    spectrum: tuple
    note: str


@dataclass(frozen=True)
class Exemplar:
    id: str
    system: SystemDef
    complete: bool
    complete_note: str
    description: str
    known_frames: tuple = ()
    rejected_frames: tuple = ()
    known_spectra: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def jordan_frames(self):
        return tuple(F for F in self.known_frames if F.kind == "jordan")


# -- symmetric matrices -------------------------------------------------------------


def sym_index(m: int) -> list[tuple[int, int]]:
    """Coordinate order for S^m: diagonal entries first, then (i, j) with i < j row by row."""
    return [(i, i) for i in range(m)] + [(i, j) for i in range(m) for j in range(i + 1, m)]


def sym_dim(m: int) -> int:
    return m * (m + 1) // 2


def vec_sym(X) -> np.ndarray:
    """Flatten a symmetric matrix so the Euclidean pairing equals trace(X Y)."""
    X = np.asarray(X, float)
    m = X.shape[0]
    return np.array([X[i, j] if i == j else SQRT2 * X[i, j] for i, j in sym_index(m)])


def unvec_sym(v, m: int) -> np.ndarray:
    v = np.asarray(v, float)
    X = np.zeros((m, m))
    for val, (i, j) in zip(v, sym_index(m)):
        if i == j:
            X[i, i] = val
        else:
            X[i, j] = X[j, i] = val / SQRT2
    return X


def _det(entries: list[list[Polynomial]]) -> Polynomial:
    m = len(entries)
    if m == 1:
        return entries[0][0]
    total = None
    for j in range(m):
        minor = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = entries[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def sym_det_polynomial(m: int) -> Polynomial:
    """det X as a polynomial in the scaled coordinates of S^m (cofactor expansion)."""
    d = sym_dim(m)
    pos = {ij: k for k, ij in enumerate(sym_index(m))}
    entries = []
    for i in range(m):
        row = []
        for j in range(m):
            k = pos[(min(i, j), max(i, j))]
            c = np.zeros(d)
            c[k] = 1.0 if i == j else 1.0 / SQRT2
            row.append(linear_form(c))
        entries.append(row)
    return _det(entries)


def symmetric_eigen_oracle(m: int, X, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, descending."""
    A = np.array(X, dtype=float)
    if A.shape != (m, m):
        raise HyperError(f"expected a {m}x{m} matrix, got shape {A.shape}")
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * (1.0 + np.abs(A).max(initial=0.0)):
        raise HyperError("matrix is not symmetric")
    A = (A + A.T) / 2.0
    size = float(np.linalg.norm(A))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * size:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(m)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
    return np.sort(np.diag(A))[::-1]


def _sym_oracle(m):
    def oracle(x):
        return symmetric_eigen_oracle(m, unvec_sym(x, m))

    return oracle


# -- builders ------------------------------------------------------------------------


def _frame(rows, kind):
    return FrameSet(np.array(rows, dtype=float), kind)


def _spectra(*items):
    return tuple(KnownSpectrum(tuple(map(float, x)), tuple(map(float, s)), note) for x, s, note in items)


def elementary_exemplar(n: int, k: int, tol: Tolerances | None = None) -> Exemplar:
    """(R^n, E_k, 1) with the coordinate frame (a Jordan frame exactly when k = n)."""
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= n, got n={n}, k={k}")
    sys = new_system(elementary_symmetric(n, k), np.ones(n), tol, name=f"exR{n}E{k}")
    I = np.eye(n)
    frames = [_frame(I, "jordan" if k == n else "scaled")]
    rejected = [] if k == n else [(_frame(I, "jordan"), "coordinate vectors are not idempotents")]
    pts = np.arange(1, n + 1, dtype=float)
    spectra = []
    if k == n:
        spectra.append((pts, pts[::-1], "spectrum is the decreasing rearrangement"))
    else:
        # lambda(e_1) = (k/n, 0, ..., 0): E_k(t 1 - e_1) = C(n-1,k-1) t^(k-1) (t n/k - 1)
        spectra.append((I[0], np.r_[k / n, np.zeros(k - 1)], "coordinate vector has one nonzero eigenvalue k/n"))
    return Exemplar(
        id=f"exR{n}E{k}",
        system=sys,
        complete=k >= 2,
        complete_note="E_k with k >= 2 has trivial lineality" if k >= 2 else "E_1 vanishes on a hyperplane",
        description=f"elementary symmetric polynomial E_{k} on R^{n}, e = 1",
        known_frames=tuple(frames),
        rejected_frames=tuple(rejected),
        known_spectra=_spectra(*spectra),
    )


def symmetric_exemplar(m: int, tol: Tolerances | None = None) -> Exemplar:
    d = sym_dim(m)
    sys = new_system(sym_det_polynomial(m), vec_sym(np.eye(m)), tol, oracle=_sym_oracle(m), name=f"sym{m}")
    frame = _frame(np.eye(d)[:m], "jordan")
    diag = np.arange(1, m + 1, dtype=float)
    X = np.eye(m) * 2.0 + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)
    lam_X = [2.0 + 2.0 * math.cos(math.pi * j / (m + 1)) for j in range(1, m + 1)]
    return Exemplar(
        id=f"sym{m}",
        system=sys,
        complete=True,
        complete_note="determinant on symmetric matrices",
        description=f"real symmetric {m}x{m} matrices, p = det, e = identity (off-diagonals scaled by sqrt 2)",
        known_frames=(frame,),
        known_spectra=_spectra(
            (vec_sym(np.diag(diag)), diag[::-1], "diagonal matrix"),
            (vec_sym(X), sorted(lam_X, reverse=True), "tridiagonal Toeplitz 2 + 2 cos(j pi/(m+1))"),
        ),
    )


def _ex3_6_forms():
    return [(1, 1, 1), (1, -1, 1), (2, -1, -1), (1, 2, -1)]


def _build(tol: Tolerances | None) -> list[Exemplar]:
    out = []
    I3 = np.eye(3)

    sys = new_system(Polynomial(1, {(2,): 1.0}), [1.0], tol, name="ex3_2")
    out.append(
        Exemplar(
            "ex3_2", sys, True, "lambda(x) = (x, x) vanishes only at 0",
            "p(x) = x^2 on R, e = 1: complete, no rank-one elements",
            rejected_frames=((_frame([[1.0]], "scaled"), "lambda(1) = (1, 1) has rank 2"),),
            known_spectra=_spectra(([3.0], [3.0, 3.0], "double eigenvalue x"), ([-2.0], [-2.0, -2.0], "double eigenvalue x")),
        )
    )

    sys = new_system(Polynomial(3, {(1, 1, 1): 1.0}), np.ones(3), tol, name="ex3_3")
    out.append(
        Exemplar(
            "ex3_3", sys, True, "lambda(x) is the sorted coordinate vector",
            "p = x1 x2 x3 on R^3, e = 1",
            known_frames=(_frame(I3, "jordan"),),
            known_spectra=_spectra(
                ([4, 5, 6], [6, 5, 4], "sorted coordinates"),
                ([1, 0, 0], [1, 0, 0], "coordinate vector is a primitive idempotent"),
            ),
        )
    )

    sys = new_system(Polynomial(3, {(2, 1, 1): 1.0}), np.ones(3), tol, name="ex3_4")
    out.append(
        Exemplar(
            "ex3_4", sys, True, "lambda(x) lists x1 twice, then x2 and x3",
            "p = x1^2 x2 x3 on R^3, e = 1",
            rejected_frames=((_frame(I3[1:], "scaled"), "sum (0, 1, 1) is not interior"),),
            known_spectra=_spectra(
                ([1, 0, 0], [1, 1, 0, 0], "e1 has rank 2"),
                ([0, 1, 1], [1, 1, 0, 0], "boundary point"),
                ([3, -1, 2], [3, 3, 2, -1], "x1 counted twice"),
            ),
        )
    )

    sys = new_system(Polynomial(3, {(1, 1, 0): 1.0}), np.ones(3), tol, name="ex3_5")
    out.append(
        Exemplar(
            "ex3_5", sys, False, "lambda(e3) = 0 with e3 != 0",
            "p = x1 x2 on R^3, e = 1: not complete",
            known_frames=(_frame(I3[:2], "scaled"),),
            known_spectra=_spectra(
                ([2, 5, 7], [5, 2], "third coordinate ignored"),
                ([0, 0, 1], [0, 0], "nonzero point with zero spectrum"),
            ),
        )
    )

    forms = _ex3_6_forms()
    p36 = product(linear_form(f) for f in forms)
    sys = new_system(p36, [0.0, 0.0, 1.0], tol, name="ex3_6")
    out.append(
        Exemplar(
            "ex3_6", sys, True, "any three of the four forms are independent",
            "product of four linear forms on R^3, e = (0, 0, 1): no rank-one elements",
            known_spectra=_spectra(
                ([1, 2, 3], [6, 3, 2, -2], "roots x1+x2+x3, x1-x2+x3, -2x1+x2+x3, -x1-2x2+x3"),
                ([1, 0, 0], [1, 1, -1, -2], "first coordinate vector"),
            ),
            meta={"forms": forms},
        )
    )

    ex44 = elementary_exemplar(4, 3, tol)
    out.append(
        Exemplar(
            "ex4_4", ex44.system, True, ex44.complete_note,
            "E_3 on R^4, e = 1: coordinate frame is scaled but not Jordan",
            known_frames=ex44.known_frames,
            rejected_frames=ex44.rejected_frames,
            known_spectra=_spectra(([1, 0, 0, 0], [0.75, 0, 0], "lambda(e1) = (3/4, 0, 0)")),
        )
    )

    e2 = elementary_exemplar(3, 2, tol)
    out.append(
        Exemplar(
            "exR3E2", e2.system, True, e2.complete_note,
            "E_2 on R^3, e = 1: derivative of E_3 that still carries a Jordan frame",
            known_frames=(_frame([[1.5, 0, 0], [-0.5, 1, 1]], "jordan"), _frame(I3, "scaled")),
            rejected_frames=e2.rejected_frames,
            known_spectra=_spectra(
                ([1.5, 0, 0], [1, 0], "frame element is a primitive idempotent"),
                ([3.5, -1, -1], [2, -1], "2 c1 - c2"),
            ),
        )
    )

    for n in range(2, 7):
        out.append(elementary_exemplar(n, n, tol))
    for m in (2, 3, 4):
        out.append(symmetric_exemplar(m, tol))
    return out


def validate(ex: Exemplar) -> None:
    """Recompute every known spectrum; raise naming the exemplar and note on mismatch."""
    sys = ex.system
    for ks in ex.known_spectra:
        lam = eigenvalues(sys, np.array(ks.point)).values
        want = np.array(ks.spectrum)
        if lam.shape != want.shape or np.max(np.abs(lam - want)) > sys.tol.root * (1.0 + np.abs(want).max()):
            raise HyperError(f"exemplar {ex.id}: spectrum check failed ({ks.note}): got {lam}, expected {want}")


@lru_cache(maxsize=None)
def _catalog_default():
    exs = _build(None)
    for ex in exs:
        validate(ex)
    return tuple(exs)


def catalog(tol: Tolerances | None = None) -> list[Exemplar]:
    """All built-in exemplars, validated."""
    if tol is None:
        return list(_catalog_default())
    exs = _build(tol)
    for ex in exs:
        validate(ex)
    return exs


def get(ex_id: str, tol: Tolerances | None = None) -> Exemplar:
    for ex in catalog(tol):
        if ex.id == ex_id:
            return ex
    m = re.fullmatch(r"exR(\d+)E(\d+)", ex_id)
    if m:
        n, k = int(m.group(1)), int(m.group(2))
        if 1 <= k <= n <= 12:
            ex = elementary_exemplar(n, k, tol)
            validate(ex)
            return ex
    raise KeyError(ex_id)


def ids() -> list[str]:
    return [ex.id for ex in catalog()]


# -- no rank-one elements for the four-forms example ----------------------------------


def _det3(M):
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def no_rank_one_search(ex: Exemplar, num_samples: int, seed: int) -> dict:
    """Sampled and algebraic evidence that the four-forms system has no rank-one element.

    A rank-one point would make three of the four roots vanish, i.e. solve a
    3x3 homogeneous linear system; each such system is shown nonsingular by
    an exact integer determinant.
    """
    forms = ex.meta.get("forms")
    if forms is None:
        raise PreconditionError(f"exemplar {ex.id} is not a product of linear forms")
    sys = ex.system
    subsystems = []
    for idx in itertools.combinations(range(len(forms)), 3):
        M = [[Fraction(v) for v in forms[i]] for i in idx]
        det = _det3(M)
        subsystems.append({"forms": list(idx), "det": int(det), "trivial_only": det != 0})
    X = sampling.gaussian(seed, "no-rank-one", num_samples, sys.dim)
    lam = eigenvalues_many(sys, X)
    ranks = rank_of_spectra(sys, lam)
    hits = int(np.sum(ranks == 1))
    second = np.sort(np.abs(lam), axis=1)[:, -2] / (1.0 + np.abs(lam).max(axis=1))
    return {
        "samples": num_samples,
        "seed": seed,
        "rank_one_hits": hits,
        "min_rank": int(ranks.min()) if len(ranks) else None,
        "min_second_eigenvalue": float(second.min()) if len(second) else None,
        "subsystems": subsystems,
        "rank_of_e": rank(sys, sys.direction),
        "holds": hits == 0 and all(s["trivial_only"] for s in subsystems),
    }
