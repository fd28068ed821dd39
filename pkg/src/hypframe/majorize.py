"""Majorization, doubly stochastic tuples, matrices and transformations.

Linear maps on V are plain d x d matrices acting on coordinate vectors.
Tuples a_1..a_n are stored as the rows of an (n, d) array.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import sampling
from .errors import DimensionMismatch, PreconditionError
from .frames import _require_jordan
from .system import SampledVerdict, SystemDef, cone_samples, eigenvalues_many

DS_ENTRY_TOL = 1e-12
DS_SUM_TOL = 1e-9
TUPLE_TOL = 1e-8
SUBSET_CAP = 15


# -- vectors ----------------------------------------------------------------------


def majorization_slack_many(U, V) -> np.ndarray:
    """Per row, the least margin by which U is majorized by V (negative means it is not)."""
    U, V = np.atleast_2d(np.asarray(U, float)), np.atleast_2d(np.asarray(V, float))
    if U.shape[-1] != V.shape[-1]:
        raise DimensionMismatch(f"length mismatch: {U.shape[-1]} vs {V.shape[-1]}")
    pu = np.cumsum(-np.sort(-U, axis=1), axis=1)
    pv = np.cumsum(-np.sort(-V, axis=1), axis=1)
    prefix = np.min(pv[:, :-1] - pu[:, :-1], axis=1, initial=np.inf)
    return np.minimum(prefix, -np.abs(pv[:, -1] - pu[:, -1]))


def majorization_slack(u, v) -> float:
    return float(majorization_slack_many(u, v)[0])


def majorizes(u, v, tol: float = 1e-9) -> bool:
    """True when u is majorized by v (u is "more spread out" at most as much as v)."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionMismatch(f"length mismatch: {u.shape} vs {v.shape}")
    return majorization_slack(u, v) >= -tol


# -- doubly stochastic matrices ------------------------------------------------------


def ds_violation(D) -> float:
    """Largest breach of the doubly stochastic conditions (<= 0 means none beyond tolerance)."""
    D = np.asarray(D, float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionMismatch(f"need a square matrix, got shape {D.shape}")
    neg = -D.min() - DS_ENTRY_TOL
    sums = max(np.abs(D.sum(axis=0) - 1).max(), np.abs(D.sum(axis=1) - 1).max()) - DS_SUM_TOL
    return float(max(neg, sums))


def is_doubly_stochastic(D) -> bool:
    return ds_violation(D) <= 0


def t_transform(n: int, j: int, k: int, t: float) -> np.ndarray:
    """(1 - t) I + t P where P swaps coordinates j and k."""
    T = np.eye(n)
    T[j, j] = T[k, k] = 1.0 - t
    T[j, k] = T[k, j] = t
    return T


def random_ds_matrix(gen: np.random.Generator, n: int, steps: int | None = None) -> np.ndarray:
    """Product of random T-transforms (always doubly stochastic)."""
    D = np.eye(n)
    for _ in range(steps if steps is not None else 2 * n):
        j, k = gen.choice(n, size=2, replace=False)
        D = t_transform(n, int(j), int(k), float(gen.uniform())) @ D
    return D


def hlp_transfer(u, v, tol: float = 1e-9) -> tuple[np.ndarray, list]:
    """Doubly stochastic D with D v = u, built from a chain of T-transforms.

    Works on both vectors sorted in decreasing order: take the last index j
    where v still exceeds u and the first later index k where v falls short,
    then move min(excess, shortfall) from j to k.  Each step matches at least
    one coordinate, so at most n - 1 steps are needed.  Returns the matrix
    and the chain as (j, k, t) triples in sorted coordinates.
    """
    u, v = np.asarray(u, float), np.asarray(v, float)
    if not majorizes(u, v, tol):
        raise PreconditionError("u is not majorized by v")
    n = len(u)
    pu = np.argsort(-u, kind="stable")
    pv = np.argsort(-v, kind="stable")
    target = u[pu]
    w = v[pv].copy()
    eps = 1e-14 * (1.0 + np.abs(v).max())
    Ds = np.eye(n)
    chain = []
    for _ in range(2 * n):
        diff = w - target
        excess = np.flatnonzero(diff > eps)
        if len(excess) == 0:
            break
        j = int(excess[-1])
        later = np.flatnonzero(diff[j + 1 :] < -eps)
        if len(later) == 0:
            break
        k = j + 1 + int(later[0])
        delta = min(diff[j], -diff[k])
        t = delta / (w[j] - w[k])
        T = t_transform(n, j, k, t)
        w = T @ w
        Ds = T @ Ds
        chain.append((j, k, float(t)))
    D = np.empty((n, n))
    D[np.ix_(pu, pv)] = Ds
    return D, chain


# -- tuples ------------------------------------------------------------------------


def _tuple(sys, A):
    A = np.atleast_2d(np.asarray(A, float))
    if A.shape != (sys.degree, sys.dim):
        raise DimensionMismatch(f"tuple must have shape ({sys.degree}, {sys.dim}), got {A.shape}")
    return A


def verify_e_ds_tuple(sys: SystemDef, A) -> dict:
    """Cone elements of unit trace summing to e."""
    A = _tuple(sys, A)
    lam = eigenvalues_many(sys, A)
    traces = lam.sum(axis=1)
    cone_margin = lam[:, -1] + sys.tol.cone * (1.0 + np.abs(lam).max(axis=1))
    sum_resid = float(np.max(np.abs(A.sum(axis=0) - sys.direction)))
    violations = []
    if (cone_margin < 0).any():
        violations.append(f"elements {np.flatnonzero(cone_margin < 0).tolist()} lie outside the cone")
    trace_err = np.abs(traces - 1.0)
    if (trace_err > TUPLE_TOL).any():
        violations.append(f"elements {np.flatnonzero(trace_err > TUPLE_TOL).tolist()} do not have unit trace")
    if sum_resid > TUPLE_TOL:
        violations.append(f"sum differs from e by {sum_resid:.3g}")
    return {
        "verified": not violations,
        "traces": traces.tolist(),
        "min_eigenvalues": lam[:, -1].tolist(),
        "sum_residual": sum_resid,
        "violations": violations,
    }


def verify_lambda_ds_tuple(sys: SystemDef, A, cap: int = SUBSET_CAP) -> dict:
    """lambda of every k-element subset sum is majorized by 1_k."""
    n = sys.degree
    if n > cap:
        raise PreconditionError(f"degree {n} exceeds the subset enumeration cap {cap}")
    A = _tuple(sys, A)
    masks = np.array(list(itertools.product((0.0, 1.0), repeat=n))[1:])
    lam = eigenvalues_many(sys, masks @ A)
    sizes = masks.sum(axis=1).astype(int)
    ones = (np.arange(n)[None, :] < sizes[:, None]).astype(float)
    slack = majorization_slack_many(lam, ones)
    worst = int(np.argmin(slack))
    return {
        "verified": bool(slack[worst] >= -TUPLE_TOL),
        "subsets": len(masks),
        "worst_slack": float(slack[worst]),
        "worst_subset": np.flatnonzero(masks[worst]).tolist(),
    }


def eds_implies_lds_check(sys: SystemDef, A, complete: bool = False) -> dict:
    """An e-doubly stochastic tuple must be lambda-doubly stochastic."""
    e = verify_e_ds_tuple(sys, A)
    if not e["verified"]:
        raise PreconditionError("tuple is not e-doubly stochastic: " + "; ".join(e["violations"]))
    lam = verify_lambda_ds_tuple(sys, A)
    out = {"e_ds": True, "lambda_ds": lam["verified"], "worst_slack": lam["worst_slack"], "holds": lam["verified"]}
    if complete:
        out["converse_checked"] = True
    return out


def lds_implies_eds_check(sys: SystemDef, A) -> dict:
    """Converse direction, valid on complete systems: lambda-DS tuples are e-DS."""
    lam = verify_lambda_ds_tuple(sys, A)
    e = verify_e_ds_tuple(sys, A)
    return {"lambda_ds": lam["verified"], "e_ds": e["verified"], "holds": (not lam["verified"]) or e["verified"]}


def gram_matrix(sys: SystemDef, A) -> tuple[np.ndarray, bool]:
    """[<a_i, a_j>] and whether it is doubly stochastic."""
    A = _tuple(sys, A)
    G = A @ sys.gram @ A.T
    return G, is_doubly_stochastic(G)


def eigen_matrix(sys: SystemDef, A) -> dict:
    """M with columns lambda(a_i); column-stochastic, and row-stochastic only when uniform."""
    A = _tuple(sys, A)
    M = eigenvalues_many(sys, A).T
    n = M.shape[0]
    col_ok = bool(M.min() >= -TUPLE_TOL and np.abs(M.sum(axis=0) - 1).max() <= TUPLE_TOL)
    row_ok = bool(np.abs(M.sum(axis=1) - 1).max() <= TUPLE_TOL)
    uniform = bool(np.abs(M - 1.0 / n).max() <= TUPLE_TOL)
    return {
        "M": M,
        "column_stochastic": col_ok,
        "row_stochastic": row_ok,
        "uniform": uniform,
        "rigidity_holds": (not row_ok) or uniform,
    }


def hlp_completion(sys: SystemDef, A) -> dict:
    """A doubly stochastic D making D M doubly stochastic, with M the eigen-matrix of A."""
    M = eigen_matrix(sys, A)["M"]
    n = M.shape[0]
    D, chain = hlp_transfer(np.ones(n), M.sum(axis=1))
    DM = D @ M
    return {"D": D, "DM": DM, "chain": chain, "holds": is_doubly_stochastic(D) and is_doubly_stochastic(DM)}


def mix_tuple(A, D, sys: SystemDef | None = None) -> np.ndarray:
    """b_i = sum_j d_ij a_j; with ``sys`` given, the result is checked to be e-doubly stochastic."""
    A, D = np.atleast_2d(np.asarray(A, float)), np.asarray(D, float)
    if D.shape != (len(A), len(A)):
        raise DimensionMismatch(f"matrix shape {D.shape} does not match tuple length {len(A)}")
    if not is_doubly_stochastic(D):
        raise PreconditionError("mixing matrix is not doubly stochastic")
    B = D @ A
    if sys is not None:
        rep = verify_e_ds_tuple(sys, B)
        if not rep["verified"]:
            raise PreconditionError("mixed tuple is not e-doubly stochastic: " + "; ".join(rep["violations"]))
    return B


# -- transformations ------------------------------------------------------------------


def build_T(sys: SystemDef, F, A, D) -> np.ndarray:
    """Matrix of x -> sum_ij d_ij <x, a_j> c_i."""
    C = _require_jordan(sys, F)
    A = _tuple(sys, A)
    D = np.asarray(D, float)
    if D.shape != (len(C), len(A)):
        raise DimensionMismatch(f"matrix shape {D.shape} does not match frame/tuple sizes")
    return C.T @ D @ A @ sys.gram


def diag_operator(sys: SystemDef, F) -> np.ndarray:
    """Matrix of x -> sum_i <x, c_i> c_i."""
    C = _require_jordan(sys, F)
    return C.T @ C @ sys.gram


def adjoint_S(sys: SystemDef, F, A) -> np.ndarray:
    """Matrix of x -> sum_i <x, c_i> a_i."""
    C = _require_jordan(sys, F)
    A = _tuple(sys, A)
    return A.T @ C @ sys.gram


def verify_ds_map(sys: SystemDef, T, num_samples: int, seed: int) -> SampledVerdict:
    """Unital, trace preserving and cone preserving (the last two on samples)."""
    T = np.asarray(T, float)
    if T.shape != (sys.dim, sys.dim):
        raise DimensionMismatch(f"map has shape {T.shape}, expected ({sys.dim}, {sys.dim})")
    unit = float(np.max(np.abs(T @ sys.direction - sys.direction)))
    if unit > 1e-8:
        return SampledVerdict(False, num_samples, seed, unit, sys.direction.copy(), "T e != e")
    X = sampling.gaussian(seed, "ds-map", num_samples, sys.dim)
    g = sys.trace_vector
    tr_err = np.abs((X @ T.T) @ g - X @ g)
    if (tr_err > 1e-7).any():
        i = int(np.argmax(tr_err))
        return SampledVerdict(False, num_samples, seed, float(tr_err[i]), X[i], "trace not preserved")
    Y = cone_samples(sys, seed, "ds-map-cone", num_samples)
    lam = eigenvalues_many(sys, Y @ T.T)
    deficit = -lam[:, -1] - sys.tol.cone * (1.0 + np.abs(lam).max(axis=1))
    if (deficit > 0).any():
        i = int(np.flatnonzero(deficit > 0)[0])
        return SampledVerdict(False, num_samples, seed, float(-lam[i, -1]), Y[i], "cone not preserved")
    return SampledVerdict(True, num_samples, seed, max(unit, float(tr_err.max(initial=0.0))))


def majorization_test(sys: SystemDef, T, num_samples: int, seed: int, tol: float = 1e-7, stream: str = "majorization") -> dict:
    """Sweep lambda(T x) against lambda(x) on Gaussian samples."""
    T = np.asarray(T, float)
    X = sampling.gaussian(seed, stream, num_samples, sys.dim)
    slack = majorization_slack_many(eigenvalues_many(sys, X @ T.T), eigenvalues_many(sys, X))
    worst = int(np.argmin(slack))
    holds = bool(slack[worst] >= -tol)
    return {
        "holds": holds,
        "samples": num_samples,
        "seed": seed,
        "worst_slack": float(slack[worst]),
        "counterexample": None if holds else X[worst].tolist(),
    }


def adjoint_S_search(sys: SystemDef, F, A, num_samples: int, seed: int) -> dict:
    """Exploratory sweep: is lambda(S x) majorized by lambda(x) for the adjoint map S?

    The answer is not known in general, so the report carries statistics
    only and is labelled EXPLORATORY.
    """
    S = adjoint_S(sys, F, A)
    ds = verify_ds_map(sys, S, num_samples, seed)
    X = sampling.gaussian(seed, "adjoint-s", num_samples, sys.dim)
    slack = majorization_slack_many(eigenvalues_many(sys, X @ S.T), eigenvalues_many(sys, X))
    fails = np.flatnonzero(slack < -1e-7)
    return {
        "label": "EXPLORATORY",
        "S_doubly_stochastic": ds.holds,
        "samples": num_samples,
        "seed": seed,
        "failures": int(len(fails)),
        "min_slack": float(slack.min()),
        "median_slack": float(np.median(slack)),
        "first_failure": X[fails[0]].tolist() if len(fails) else None,
    }


def ds_matrix_from_maps(sys: SystemDef, A, B, T) -> tuple[np.ndarray, bool]:
    """[<a_i, T b_j>] and whether it is doubly stochastic."""
    A, B = _tuple(sys, A), _tuple(sys, B)
    T = np.asarray(T, float)
    M = A @ sys.gram @ (T @ B.T)
    return M, is_doubly_stochastic(M)
