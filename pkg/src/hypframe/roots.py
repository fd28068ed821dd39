"""Real roots of univariate polynomials expected to be real-rooted.

Roots come from the eigenvalues of the companion matrix (LAPACK ``geev``
balances the matrix and runs shifted Hessenberg QR).  A multiple real root
of multiplicity m comes back as a small cloud of radius about
``eps ** (1/m)``; such clouds are detected and collapsed to their centroid,
which is a well-conditioned function of the coefficients even when the
individual members are not.

Coefficients are always given in ascending order ``c_0 .. c_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HyperError

DEFAULT_TOL = 1e-8
VIOLATION_RTOL = 1e-6
# relative size below which Taylor coefficients at a cluster centre count as zero
TAYLOR_RTOL = 1e-12
# clusters whose members are all real are merged only when this tight
REAL_SPLIT_RTOL = 1e-7
# noise level used to size the search radius for multiple-root clouds
_NOISE = 1e-13
# componentwise backward error below which a complex root's real part counts as a root
BACKWARD_RTOL = 1e-13


@dataclass(frozen=True)
class RootReport:
    """Outcome of :func:`all_roots`.

    ``max_imag`` is measured after multiple-root clouds have been collapsed;
    ``raw_max_imag`` is the largest imaginary part straight out of the
    eigenvalue solver.
    """

    roots: np.ndarray
    max_imag: float
    max_residual: float
    raw_max_imag: float
    marginal: bool
    violation: bool
    multiplicities: tuple


def _taylor_shift(c, x0):
    """Ascending coefficients of q(x0 + s) given ascending coefficients of q(t)."""
    a = [float(v) for v in c]
    n = len(a) - 1
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            a[j] += x0 * a[j + 1]
    return a


def _residual(c, roots):
    c = np.asarray(c, float)
    vals = np.polynomial.polynomial.polyval(roots, c)
    bound = np.polynomial.polynomial.polyval(np.abs(roots), np.abs(c))
    return float(np.max(np.abs(vals) / np.maximum(bound, 1e-300))) if len(roots) else 0.0


def _split(z, idx):
    """Cut the longest edge of the minimum spanning tree over ``z[idx]``."""
    pts = z[idx]
    m = len(idx)
    best = {j: (abs(pts[j] - pts[0]), 0) for j in range(1, m)}
    edges = []
    while best:
        j = min(best, key=lambda k: (best[k][0], k))
        dist, par = best.pop(j)
        edges.append((dist, par, j))
        for k in best:
            dk = abs(pts[k] - pts[j])
            if dk < best[k][0]:
                best[k] = (dk, j)
    cut = max(range(len(edges)), key=lambda i: (edges[i][0], -i))
    adj = {i: [] for i in range(m)}
    for i, (_, a, b) in enumerate(edges):
        if i != cut:
            adj[a].append(b)
            adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    left = [idx[i] for i in range(m) if i in seen]
    right = [idx[i] for i in range(m) if i not in seen]
    return left, right


def _components(z, radius):
    n = len(z)
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= radius:
                label[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _backward_real(c, z):
    """Whether q(Re z) vanishes to within rounding relative to sum |c_j| |Re z|^j."""
    x = z.real
    val = abs(np.polynomial.polynomial.polyval(x, c))
    bound = np.polynomial.polynomial.polyval(abs(x), np.abs(c))
    return val <= BACKWARD_RTOL * bound


def _is_multiple_root(c, members, scale):
    m = len(members)
    centre = float(np.mean(members.real))
    if np.all(members.imag == 0.0):
        return np.ptp(members.real) <= REAL_SPLIT_RTOL * scale, centre
    # a root of multiplicity m is a simple root of the (m-1)-th derivative
    reach = float(np.max(np.abs(members - centre)))
    for _ in range(2):
        a = _taylor_shift(c, centre)
        step = a[m - 1] / (m * a[m]) if a[m] != 0.0 else 0.0
        if not abs(step) <= reach:
            break
        centre -= step
    a = _taylor_shift(c, centre)
    b = _taylor_shift(np.abs(c), abs(centre))
    ok = all(abs(a[j]) <= TAYLOR_RTOL * b[j] for j in range(m))
    return ok, centre


def _resolve(c, z, scale):
    """Return (value, imag, multiplicity, forced) per resolved root group.

    ``forced`` marks a complex root projected because its real part passes
    the backward-error test; such roots report zero imaginary part.
    """
    n = len(z)
    radius = 3.0 * _NOISE ** (1.0 / n) * scale if n > 1 else 0.0
    todo = _components(z, radius)
    out = []
    while todo:
        idx = todo.pop()
        if len(idx) == 1:
            w = z[idx[0]]
            if w.imag != 0.0 and _backward_real(c, w):
                out.append((w.real, 0.0, 1, True))
            else:
                out.append((w.real, abs(w.imag), 1, False))
            continue
        ok, centre = _is_multiple_root(c, z[idx], scale)
        if ok:
            out.append((centre, 0.0, len(idx), False))
        else:
            todo.extend(_split(z, idx))
    simple = [i for i, g in enumerate(out) if g[2] == 1 and g[1] == 0.0 and not g[3]]
    if simple:
        vals = _polish(np.asarray(c, float)[None], np.array([[out[i][0] for i in simple]]))[0]
        for i, v in zip(simple, vals):
            out[i] = (float(v),) + out[i][1:]
    return out


def _polish(c, r, steps=3):
    """Safeguarded Newton steps on simple real roots; rows of ``c`` pair with rows of ``r``."""
    n = c.shape[1] - 1
    for _ in range(steps):
        q = np.repeat(c[:, n : n + 1], r.shape[1], axis=1)
        dq = np.zeros_like(r)
        for j in range(n - 1, -1, -1):
            dq = dq * r + q
            q = q * r + c[:, j : j + 1]
        ok = dq != 0
        step = np.where(ok, q / np.where(ok, dq, 1.0), 0.0)
        cand = r - step
        qc = np.zeros_like(cand) + c[:, n : n + 1]
        for j in range(n - 1, -1, -1):
            qc = qc * cand + c[:, j : j + 1]
        better = np.abs(qc) < np.abs(q)
        if not better.any():
            break
        r = np.where(better, cand, r)
    return r


def _companion(monic):
    """Companion matrices for a stack of monic polynomials (ascending, leading 1 dropped)."""
    m, n = monic.shape
    C = np.zeros((m, n, n))
    C[:, 1:, :-1] = np.eye(n - 1)
    C[:, :, -1] = -monic
    return C


def _check(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 2:
        raise HyperError("coefficients must be a 1-d array or a stack of them")
    n = c.shape[1] - 1
    if n < 1:
        raise HyperError("degree-0 polynomial has no roots")
    scale = np.max(np.abs(c), axis=1)
    lead = c[:, -1]
    if np.any(np.abs(lead) <= 1e-14 * scale) or np.any(scale == 0):
        raise HyperError("leading coefficient vanishes relative to the coefficient scale")
    return c, n


def all_roots_many(coeffs, tol: float = DEFAULT_TOL):
    """Vectorized :func:`all_roots` over a stack of coefficient rows.

    Returns ``(roots, max_imag, marginal, violation)`` with roots sorted
    descending in each row.
    """
    c, n = _check(np.atleast_2d(coeffs))
    m = c.shape[0]
    monic = c[:, :-1] / c[:, -1:]
    z = np.linalg.eigvals(_companion(monic)) if n > 1 else (-monic).astype(complex)
    order = np.argsort(z.real, axis=1, kind="stable")
    z = np.take_along_axis(z, order, axis=1)
    scale = 1.0 + np.max(np.abs(z), axis=1)

    roots = np.empty((m, n))
    max_imag = np.zeros(m)
    marginal = np.zeros(m, dtype=bool)
    if n > 1:
        gaps = np.min(np.diff(z.real, axis=1), axis=1)
        fast = np.all(z.imag == 0.0, axis=1) & (gaps > REAL_SPLIT_RTOL * scale)
    else:
        fast = np.ones(m, dtype=bool)
    if fast.any():
        polished = _polish(c[fast], z[fast].real)
        roots[fast] = -np.sort(-polished, axis=1)
    for i in np.flatnonzero(~fast):
        groups = _resolve(c[i], z[i], scale[i])
        vals = []
        worst = 0.0
        for val, im, mult, forced in groups:
            vals.extend([val] * mult)
            if forced or im > tol * (1.0 + abs(val)):
                marginal[i] = True
            worst = max(worst, im)
        roots[i] = np.sort(vals)[::-1]
        max_imag[i] = worst
    violation = max_imag > VIOLATION_RTOL * scale
    marginal &= ~violation
    return roots, max_imag, marginal, violation


def all_roots(coeffs, tol: float = DEFAULT_TOL) -> RootReport:
    """All roots of the polynomial with ascending coefficients ``coeffs``.

    Roots whose imaginary part is at most ``tol * (1 + |re|)`` are projected
    onto the real axis silently; larger (but sub-threshold) imaginary parts
    set ``marginal``; anything above ``1e-6 * (1 + max|root|)`` sets
    ``violation``.  Deterministic for identical input.
    """
    c, n = _check(np.atleast_2d(coeffs))
    c = c[0]
    monic = c[:-1] / c[-1]
    z = np.linalg.eigvals(_companion(monic[None]))[0] if n > 1 else (-monic).astype(complex)
    z = z[np.argsort(z.real, kind="stable")]
    scale = 1.0 + float(np.max(np.abs(z)))
    groups = _resolve(c, z, scale)
    vals, mults = [], []
    worst = 0.0
    marginal = False
    for val, im, mult, forced in sorted(groups, key=lambda g: -g[0]):
        vals.extend([val] * mult)
        mults.append(mult)
        worst = max(worst, im)
        if forced or im > tol * (1.0 + abs(val)):
            marginal = True
    roots = np.array(vals)
    violation = worst > VIOLATION_RTOL * scale
    return RootReport(
        roots=roots,
        max_imag=float(worst),
        max_residual=_residual(c, roots),
        raw_max_imag=float(np.max(np.abs(z.imag))),
        marginal=bool(marginal and not violation),
        violation=bool(violation),
        multiplicities=tuple(mults),
    )
