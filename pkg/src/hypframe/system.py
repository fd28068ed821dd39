"""Hyperbolic systems (V, p, e) and the eigenvalue map they induce.

V is R^d with the standard coordinates.  The eigenvalues of x are the roots
of ``t -> p(t e - x)`` in decreasing order; everything else here (cone,
semi-inner product, trace, rank, idempotents, derivative systems,
automorphisms) is expressed through that map.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import sampling
from .errors import (
    DimensionMismatch,
    HyperbolicityViolation,
    HyperError,
    InvalidDirection,
    PreconditionError,
)
from .poly import Polynomial, directional_derivative, evaluate, expand_many, homogeneous_degree
from .roots import all_roots, all_roots_many


@dataclass(frozen=True)
class Tolerances:
    root: float = 1e-8
    rank: float = 1e-6
    cone: float = 1e-8

    def replace(self, root=None, rank=None, cone=None) -> "Tolerances":
        return Tolerances(
            root=self.root if root is None else root,
            rank=self.rank if rank is None else rank,
            cone=self.cone if cone is None else cone,
        )


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    realness: float
    marginal: bool = False

    def __len__(self):
        return len(self.values)


class ConeStatus(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class ConeVerdict:
    status: ConeStatus
    margin: float


@dataclass
class SampledVerdict:
    """Outcome of a randomized one-sided check.

    ``holds`` is True when no counterexample was found among ``samples``
    draws; ``witness`` is the first counterexample otherwise.
    """

    holds: bool
    samples: int
    seed: int
    worst: float = 0.0
    witness: Optional[np.ndarray] = None
    note: str = ""

    def to_dict(self):
        return {
            "holds": self.holds,
            "samples": self.samples,
            "seed": self.seed,
            "worst": float(self.worst),
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "note": self.note,
        }


@dataclass(frozen=True, eq=False)
class SystemDef:
    """A validated hyperbolic system.

    Construction checks homogeneity, that p(e) is not numerically zero and
    that the computed spectrum of e is the all-ones vector.
    """

    poly: Polynomial
    direction: np.ndarray
    tol: Tolerances = field(default_factory=Tolerances)
    oracle: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        e = np.array(self.direction, dtype=float)
        if e.shape != (self.poly.dim,):
            raise DimensionMismatch(f"direction has shape {e.shape}, expected ({self.poly.dim},)")
        e.setflags(write=False)
        object.__setattr__(self, "direction", e)
        n = homogeneous_degree(self.poly)
        if n < 1:
            raise HyperError("a hyperbolic system needs degree at least 1")
        pe = evaluate(self.poly, e)
        if not abs(pe) > 1e-10 * self.poly.coefficient_scale:
            raise InvalidDirection(f"p(e) = {pe:g} vanishes; e is not a valid direction")
        lam = eigenvalues(self, e).values
        if np.max(np.abs(lam - 1.0)) > self.tol.root:
            raise HyperError(f"internal consistency failure: lambda(e) = {lam}, expected all ones")

    @property
    def dim(self) -> int:
        return self.poly.dim

    @property
    def degree(self) -> int:
        return self.poly.degree

    @cached_property
    def p_at_e(self) -> float:
        return evaluate(self.poly, self.direction)

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """g with tr(x) = g . x (the normalized gradient of p at e)."""
        return self.poly.gradient_at(self.direction) / self.p_at_e

    @cached_property
    def gram(self) -> np.ndarray:
        """Matrix G of the semi-inner product in standard coordinates.

        ``||lambda(x)||^2 = tr(x)^2 - 2 sigma_2(x)`` where sigma_2 is the second
        elementary symmetric function of the eigenvalues, i.e. half the second
        derivative of p at e along x divided by p(e).  Polarizing gives
        ``G = g g^T - Hess p(e) / p(e)``.
        """
        g = self.trace_vector
        H = self.poly.hessian_at(self.direction) / self.p_at_e
        G = np.outer(g, g) - H
        return (G + G.T) / 2.0

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "poly": self.poly.to_dict(),
            "direction": [float(v) for v in self.direction],
            "tol": {"root": self.tol.root, "rank": self.tol.rank, "cone": self.tol.cone},
        }


def new_system(p: Polynomial, e, tol: Tolerances | None = None, oracle=None, name="") -> SystemDef:
    return SystemDef(p, np.asarray(e, dtype=float), tol or Tolerances(), oracle, name)


def redirect(sys: SystemDef, d, name: str = "") -> SystemDef:
    """The system (V, p, d) for another direction d (the oracle is dropped)."""
    return SystemDef(sys.poly, np.asarray(d, dtype=float), sys.tol, None, name or f"{sys.name}@d")


def _points(sys, X):
    X = np.asarray(X, dtype=float)
    if X.shape[-1:] != (sys.dim,):
        raise DimensionMismatch(f"point has shape {X.shape}, expected trailing dim {sys.dim}")
    return X


# -- eigenvalue map --------------------------------------------------------


def _normalized_restriction(sys, X):
    """Coefficients of t -> p(t e - y) for y = (x - s e) / c, with s = tr(x)/n and c = max|x - s e|.

    The roots for x are ``c * roots + s`` (translation by multiples of e and
    homogeneity).  Centring removes the common part of the spectrum, so
    tightly clustered eigenvalues far from 0 stay resolvable.
    """
    shift = (X @ sys.trace_vector) / sys.degree
    Y = X - shift[:, None] * sys.direction[None, :]
    scale = np.max(np.abs(Y), axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    return shift, scale, expand_many(sys.poly, sys.direction, Y / scale[:, None])


# relative gap under which neighbouring roots are re-solved around their centre
CLUSTER_GAP = 1e-2


def _recentre(sys, X, roots, scale):
    """Re-solve tight root clusters with the restriction expanded about the cluster centre.

    Coefficients of a restriction carry rounding relative to the whole
    spectrum, which moves a cluster of m roots by about ``eps ** (1/m)``.
    Expanding again at ``x - c e`` for the cluster centre ``c`` makes the
    cluster members small roots of a fresh polynomial, computed to
    rounding relative to their own size.
    """
    tasks = []
    for i in range(len(X)):
        r = roots[i]
        j = 0
        while j < len(r) - 1:
            k = j
            while k + 1 < len(r) and r[k] - r[k + 1] <= CLUSTER_GAP * scale[i]:
                k += 1
            if k > j and r[j] != r[k]:
                tasks.append((i, j, k + 1))
            j = k + 1
    if not tasks:
        return roots
    rows = np.array([t[0] for t in tasks])
    centre = np.array([roots[i, a:b].mean() for i, a, b in tasks])
    shift, scale2, coeffs = _shifted_restriction(sys, X[rows], centre)
    sub, _, _, violation = all_roots_many(coeffs, sys.tol.root)
    roots = roots.copy()
    for t, (i, a, b) in enumerate(tasks):
        if violation[t]:
            continue
        near = sub[t][np.argsort(np.abs(sub[t]), kind="stable")[: b - a]]
        roots[i, a:b] = np.sort(near * scale2[t] + shift[t])[::-1]
    return -np.sort(-roots, axis=1)


def _shifted_restriction(sys, X, shift):
    Y = X - shift[:, None] * sys.direction[None, :]
    scale = np.max(np.abs(Y), axis=1)
    scale = np.where(scale > 0, scale, 1.0)
    return shift, scale, expand_many(sys.poly, sys.direction, Y / scale[:, None])


def _roots_many(sys, X):
    shift, scale, coeffs = _normalized_restriction(sys, X)
    roots, max_imag, _, violation = all_roots_many(coeffs, sys.tol.root)
    roots = roots * scale[:, None] + shift[:, None]
    ok = ~violation
    if ok.any() and sys.degree > 1:
        roots[ok] = _recentre(sys, X[ok], roots[ok], scale[ok])
    return roots, max_imag * scale, violation


def eigenvalues(sys: SystemDef, x, path: str = "poly") -> Spectrum:
    """Decreasing roots of ``t -> p(t e - x)``.

    ``path="oracle"`` uses the system's direct eigenvalue oracle instead of
    polynomial root finding (only available on oracle-equipped systems).
    """
    x = _points(sys, x)
    if path == "oracle":
        if sys.oracle is None:
            raise PreconditionError(f"system {sys.name!r} has no eigenvalue oracle")
        return Spectrum(np.sort(np.asarray(sys.oracle(x), dtype=float))[::-1], 0.0)
    if path != "poly":
        raise ValueError(f"unknown path {path!r}")
    shift, scale, coeffs = _normalized_restriction(sys, x[None])
    rep = all_roots(coeffs[0], sys.tol.root)
    if rep.violation:
        raise HyperbolicityViolation(x, rep.max_imag * scale[0])
    vals = rep.roots * scale[0] + shift[0]
    if sys.degree > 1:
        vals = _recentre(sys, x[None], vals[None], scale)[0]
    return Spectrum(vals, float(rep.max_imag * scale[0]), rep.marginal)


def eigenvalues_many(sys: SystemDef, X, path: str = "poly") -> np.ndarray:
    """Spectra of every row of ``X``; shape ``(m, n)``."""
    X = np.atleast_2d(_points(sys, X))
    if path == "oracle":
        return np.array([eigenvalues(sys, x, "oracle").values for x in X]).reshape(len(X), -1)
    if len(X) == 0:
        return np.zeros((0, sys.degree))
    roots, max_imag, violation = _roots_many(sys, X)
    if violation.any():
        i = int(np.flatnonzero(violation)[0])
        raise HyperbolicityViolation(X[i], max_imag[i])
    return roots


def realness_many(sys: SystemDef, X) -> tuple[np.ndarray, np.ndarray]:
    """(max_imag, violation) per row, without raising."""
    X = np.atleast_2d(_points(sys, X))
    _, max_imag, violation = _roots_many(sys, X)
    return max_imag, violation


def verify_hyperbolic(sys: SystemDef, num_samples: int, seed: int) -> SampledVerdict:
    """Search Gaussian samples for a point whose restriction has non-real roots."""
    if num_samples < 1:
        raise PreconditionError("num_samples must be at least 1")
    X = sampling.gaussian(seed, "hyperbolic", num_samples, sys.dim)
    max_imag, violation = realness_many(sys, X)
    if violation.any():
        i = int(np.flatnonzero(violation)[0])
        return SampledVerdict(False, num_samples, seed, float(max_imag[i]), X[i], "non-real roots")
    return SampledVerdict(True, num_samples, seed, float(np.max(max_imag)))


def _spectral_tol(sys, lam):
    return sys.tol.root * (1.0 + np.max(np.abs(lam), axis=-1))


def translate_spectrum_check(sys: SystemDef, x, t: float) -> bool:
    """Whether lambda(x + t e) equals lambda(x) + t 1 within the root tolerance."""
    x = _points(sys, x)
    lam = eigenvalues(sys, x).values
    shifted = eigenvalues(sys, x + t * sys.direction).values
    return bool(np.max(np.abs(shifted - (lam + t))) <= _spectral_tol(sys, shifted))


# -- semi-inner product, trace, rank -----------------------------------------


def semi_inner_product(sys: SystemDef, x, y) -> float:
    """Quarter difference of ||lambda(x+y)||^2 and ||lambda(x-y)||^2."""
    x, y = _points(sys, x), _points(sys, y)
    plus = eigenvalues(sys, x + y).values
    minus = eigenvalues(sys, x - y).values
    return float((plus @ plus - minus @ minus) / 4.0)


def semi_inner_many(sys: SystemDef, X, Y) -> np.ndarray:
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    plus = eigenvalues_many(sys, X + Y)
    minus = eigenvalues_many(sys, X - Y)
    return (np.sum(plus**2, axis=1) - np.sum(minus**2, axis=1)) / 4.0


def gram_inner(sys: SystemDef, x, y) -> float:
    """Same bilinear form as :func:`semi_inner_product`, through the cached Gram matrix."""
    return float(_points(sys, x) @ sys.gram @ _points(sys, y))


def gram_by_polarization(sys: SystemDef) -> np.ndarray:
    """Gram matrix assembled from spectral semi-inner products of basis vectors."""
    d = sys.dim
    I = np.eye(d)
    iu, ju = np.triu_indices(d)
    vals = semi_inner_many(sys, I[iu], I[ju])
    G = np.zeros((d, d))
    G[iu, ju] = vals
    G[ju, iu] = vals
    return G


def seminorm(sys: SystemDef, x) -> float:
    return math.sqrt(max(gram_inner(sys, x, x), 0.0))


def trace(sys: SystemDef, x) -> float:
    """Sum of the eigenvalues of x."""
    return float(np.sum(eigenvalues(sys, x).values))


def rank(sys: SystemDef, x) -> int:
    lam = eigenvalues(sys, x).values
    return int(np.sum(np.abs(lam) > sys.tol.rank * (1.0 + np.max(np.abs(lam)))))


def rank_of_spectra(sys: SystemDef, lam: np.ndarray) -> np.ndarray:
    lam = np.atleast_2d(lam)
    cut = sys.tol.rank * (1.0 + np.max(np.abs(lam), axis=1, keepdims=True))
    return np.sum(np.abs(lam) > cut, axis=1)


# -- cone ----------------------------------------------------------------------


def cone_membership(sys: SystemDef, x) -> ConeVerdict:
    margin = float(eigenvalues(sys, x).values[-1])
    if margin > sys.tol.cone:
        status = ConeStatus.INTERIOR
    elif margin < -sys.tol.cone:
        status = ConeStatus.OUTSIDE
    else:
        status = ConeStatus.BOUNDARY
    return ConeVerdict(status, margin)


def shift_into_cone(sys: SystemDef, x) -> np.ndarray:
    """x - lambda_n(x) e, a point on the boundary of the cone."""
    x = _points(sys, x)
    return x - eigenvalues(sys, x).values[-1] * sys.direction


def shift_into_cone_many(sys: SystemDef, X) -> np.ndarray:
    X = np.atleast_2d(_points(sys, X))
    return X - eigenvalues_many(sys, X)[:, -1:] * sys.direction[None, :]


def cone_samples(sys: SystemDef, seed: int, stream: str, count: int) -> np.ndarray:
    """Boundary projections of Gaussian points pushed inward by u e, u in (0, 2]."""
    X = sampling.gaussian(seed, stream, count, sys.dim)
    u = sampling.half_open_up(seed, stream + ":u", count)
    return shift_into_cone_many(sys, X) + u[:, None] * sys.direction[None, :]


# -- idempotents ----------------------------------------------------------------


def classify_idempotent(sys: SystemDef, x) -> Optional[int]:
    """k when lambda(x) = 1_k (k ones then zeros), otherwise None.

    k == 1 means x is a primitive idempotent.
    """
    lam = eigenvalues(sys, x).values
    n = len(lam)
    tol = sys.tol.root * (1.0 + np.max(np.abs(lam)))
    for k in range(1, n + 1):
        target = np.r_[np.ones(k), np.zeros(n - k)]
        if np.max(np.abs(lam - target)) <= tol:
            return k
    return None


def is_primitive_idempotent(sys: SystemDef, x) -> bool:
    return classify_idempotent(sys, x) == 1


# -- derivative systems and interlacing ------------------------------------------


def derivative_system(sys: SystemDef, m: int = 1) -> SystemDef:
    """(V, p^(m), e) with p^(m) divided by m! (spectra do not depend on the scale)."""
    n = sys.degree
    if not 0 <= m <= n - 1:
        raise PreconditionError(f"derivative order must lie in 0..{n - 1}, got {m}")
    if m == 0:
        return sys
    q = sys.poly
    for _ in range(m):
        q = directional_derivative(q, sys.direction)
    q = q.scale(1.0 / math.factorial(m))
    suffix = "'" * m if m <= 3 else f"^({m})"
    return SystemDef(q, sys.direction, sys.tol, None, f"{sys.name}{suffix}")


def interlacing_gap_many(sys: SystemDef, X, deriv: SystemDef | None = None) -> np.ndarray:
    """Largest violation of lambda_1 >= lambda'_1 >= lambda_2 >= ... per row (<= 0 is fine)."""
    deriv = deriv or derivative_system(sys, 1)
    lam = eigenvalues_many(sys, X)
    lamd = eigenvalues_many(deriv, X)
    upper = lamd - lam[:, :-1]
    lower = lam[:, 1:] - lamd
    return np.maximum(np.max(upper, axis=1), np.max(lower, axis=1))


def interlacing_check(sys: SystemDef, x, deriv: SystemDef | None = None) -> bool:
    if sys.degree < 2:
        raise PreconditionError("interlacing needs degree at least 2")
    x = _points(sys, x)
    gap = interlacing_gap_many(sys, x[None], deriv)[0]
    lam = eigenvalues(sys, x).values
    return bool(gap <= _spectral_tol(sys, lam))


# -- completeness --------------------------------------------------------------------


def _spectral_norm_on_sphere(sys, V):
    U = V / np.linalg.norm(V, axis=1, keepdims=True)
    return np.linalg.norm(eigenvalues_many(sys, U), axis=1)


def probe_completeness(sys: SystemDef, num_samples: int, seed: int, starts: int = 8) -> SampledVerdict:
    """Look for a unit vector with vanishing spectrum.

    Draws ``num_samples`` points on the unit sphere, keeps the ``starts`` best
    and runs a compass search on each.  A witness (||lambda(x)|| < 1e-6) proves
    the system incomplete; finding none proves nothing.
    """
    d = sys.dim
    V = sampling.gaussian(seed, "completeness", num_samples, d)
    f = _spectral_norm_on_sphere(sys, V)
    keep = np.argsort(f, kind="stable")[: min(starts, num_samples)]
    V, f = V[keep], f[keep]
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    step = np.full(len(V), 0.5)
    moves = np.concatenate([np.eye(d), -np.eye(d)])
    for _ in range(600):
        active = step > 1e-12
        if not active.any():
            break
        idx = np.flatnonzero(active)
        cand = V[idx, None, :] + step[idx, None, None] * moves[None, :, :]
        fc = _spectral_norm_on_sphere(sys, cand.reshape(-1, d)).reshape(len(idx), -1)
        j = np.argmin(fc, axis=1)
        better = fc[np.arange(len(idx)), j] < f[idx]
        for r, i in enumerate(idx):
            if better[r]:
                v = cand[r, j[r]]
                V[i] = v / np.linalg.norm(v)
                f[i] = fc[r, j[r]]
            else:
                step[i] /= 2.0
    best = int(np.argmin(f))
    if f[best] < 1e-6:
        return SampledVerdict(False, num_samples, seed, float(f[best]), V[best], "lambda(x) = 0 at unit x")
    return SampledVerdict(True, num_samples, seed, float(f[best]), note="probabilistic: no witness found")


# -- automorphisms -------------------------------------------------------------------


def _check_invertible(A, d):
    A = np.asarray(A, dtype=float)
    if A.shape != (d, d):
        raise DimensionMismatch(f"map has shape {A.shape}, expected ({d}, {d})")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise PreconditionError("linear map is singular")
    return A


def is_system_automorphism(sys: SystemDef, A, num_samples: int, seed: int) -> SampledVerdict:
    """Sampled test of lambda(A x) = lambda(x)."""
    A = _check_invertible(A, sys.dim)
    X = sampling.gaussian(seed, "system-auto", num_samples, sys.dim)
    lam = eigenvalues_many(sys, X)
    lamA = eigenvalues_many(sys, X @ A.T)
    err = np.max(np.abs(lamA - lam), axis=1)
    bad = err > _spectral_tol(sys, lam)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        return SampledVerdict(False, num_samples, seed, float(err.max()), X[i], "spectra differ")
    return SampledVerdict(True, num_samples, seed, float(err.max()))


def is_cone_automorphism(sys: SystemDef, A, num_samples: int, seed: int) -> SampledVerdict:
    """Sampled test that A and its inverse both map cone points into the cone."""
    A = _check_invertible(A, sys.dim)
    Ainv = np.linalg.inv(A)
    X = cone_samples(sys, seed, "cone-auto", num_samples)
    worst = 0.0
    for M, label in ((A, "A"), (Ainv, "A^-1")):
        lam = eigenvalues_many(sys, X @ M.T)
        deficit = -lam[:, -1] - sys.tol.cone * (1.0 + np.max(np.abs(lam), axis=1))
        worst = max(worst, float(np.max(-lam[:, -1])))
        if (deficit > 0).any():
            i = int(np.flatnonzero(deficit > 0)[0])
            return SampledVerdict(False, num_samples, seed, worst, X[i], f"{label} x leaves the cone")
    return SampledVerdict(True, num_samples, seed, worst)


def automorphism_characterization_check(
    sys: SystemDef, A, frame, complete: bool, num_samples: int, seed: int
) -> dict:
    """Compare both sides of: system-automorphism <=> cone-automorphism fixing e.

    Needs a complete system carrying a scaled Jordan frame; the frame is
    verified here.
    """
    from .frames import verify_scaled_frame

    if not complete:
        raise PreconditionError("the characterization needs a complete system")
    report = verify_scaled_frame(sys, frame)
    if not report.verified:
        raise PreconditionError("frame certificate missing: the supplied frame does not verify")
    A = np.asarray(A, dtype=float)
    lhs = is_system_automorphism(sys, A, num_samples, seed)
    cone = is_cone_automorphism(sys, A, num_samples, seed)
    fixes_e = float(np.linalg.norm(A @ sys.direction - sys.direction))
    rhs = cone.holds and fixes_e <= 1e-9
    return {
        "system_automorphism": lhs.holds,
        "cone_automorphism": cone.holds,
        "fixes_e_residual": fixes_e,
        "rhs": rhs,
        "agree": lhs.holds == rhs,
        "samples": num_samples,
        "seed": seed,
    }
