"""Sparse homogeneous multivariate polynomials with real coefficients.

A polynomial on R^d is stored as a mapping ``exponent tuple -> coefficient``.
Terms are kept sorted by exponent key so that every reduction (evaluation,
serialization) runs in a fixed order and is reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, HyperError, InvalidDirection, NotHomogeneous

MAX_DEGREE = 12
MAX_DIM = 64
MERGE_RTOL = 1e-14


def _merge(dim: int, pairs: Iterable[tuple[tuple[int, ...], float]]) -> dict:
    acc: dict[tuple[int, ...], float] = {}
    biggest = 0.0
    for exp, coef in pairs:
        exp = tuple(int(k) for k in exp)
        if len(exp) != dim:
            raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {dim}")
        if any(k < 0 for k in exp):
            raise HyperError(f"negative exponent in {exp}")
        coef = float(coef)
        if not math.isfinite(coef):
            raise HyperError(f"non-finite coefficient {coef} for {exp}")
        biggest = max(biggest, abs(coef))
        acc[exp] = acc.get(exp, 0.0) + coef
    cutoff = MERGE_RTOL * biggest
    return {k: acc[k] for k in sorted(acc) if acc[k] != 0.0 and abs(acc[k]) >= cutoff}


class Polynomial:
    """Immutable sparse polynomial in ``dim`` real variables."""

    __slots__ = ("dim", "_terms", "_exps", "_coefs")

    def __init__(self, dim: int, terms: Mapping[tuple, float] | Iterable = ()):
        dim = int(dim)
        if not 1 <= dim <= MAX_DIM:
            raise HyperError(f"dimension {dim} outside supported range 1..{MAX_DIM}")
        pairs = terms.items() if isinstance(terms, Mapping) else terms
        merged = _merge(dim, pairs)
        for exp in merged:
            if sum(exp) > MAX_DEGREE:
                raise HyperError(f"term {exp} exceeds the degree cap {MAX_DEGREE}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_terms", merged)
        exps = np.array(list(merged), dtype=np.int64).reshape(len(merged), dim)
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coefs", np.array(list(merged.values()), dtype=float))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- basic structure -------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        """Largest total degree among the stored terms (0 for the zero polynomial)."""
        if not self._terms:
            return 0
        return max(sum(k) for k in self._terms)

    @property
    def coefficient_scale(self) -> float:
        return float(np.max(np.abs(self._coefs))) if self._terms else 0.0

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, tuple(self._terms.items())))

    def __repr__(self):
        return f"Polynomial(dim={self.dim}, terms={len(self)}, degree={self.degree})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exp, coef in self._terms.items():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(exp) if k
            )
            parts.append(f"{coef:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def allclose(self, other: "Polynomial", rtol: float = 1e-12) -> bool:
        if self.dim != other.dim:
            return False
        keys = set(self._terms) | set(other._terms)
        scale = max(self.coefficient_scale, other.coefficient_scale, 1e-300)
        return all(
            abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= rtol * scale for k in keys
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._same_dim(other)
        return Polynomial(self.dim, itertools.chain(self._terms.items(), other._terms.items()))

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._same_dim(other)
            pairs = (
                (tuple(a + b for a, b in zip(ea, eb)), ca * cb)
                for ea, ca in self._terms.items()
                for eb, cb in other._terms.items()
            )
            return Polynomial(self.dim, pairs)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s: float) -> "Polynomial":
        return Polynomial(self.dim, {k: s * c for k, c in self._terms.items()})

    def _same_dim(self, other):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions differ: {self.dim} vs {other.dim}")

    # -- evaluation --------------------------------------------------------

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise DimensionMismatch(f"point has shape {x.shape}, expected trailing dim {self.dim}")
        return x

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def evaluate_many(self, X) -> np.ndarray:
        """Evaluate at every row of ``X`` (shape ``(m, dim)``)."""
        X = self._check_point(X)
        X2 = X.reshape(-1, self.dim)
        if not self._terms:
            return np.zeros(X.shape[:-1])
        mono = np.prod(X2[:, None, :] ** self._exps[None, :, :], axis=2)
        # fixed-order reduction over terms sorted by exponent key
        out = np.zeros(X2.shape[0])
        for j in range(len(self._coefs)):
            out += self._coefs[j] * mono[:, j]
        return out.reshape(X.shape[:-1])

    # -- calculus ----------------------------------------------------------

    def partial(self, i: int) -> "Polynomial":
        pairs = []
        for exp, coef in self._terms.items():
            k = exp[i]
            if k:
                new = list(exp)
                new[i] = k - 1
                pairs.append((tuple(new), coef * k))
        return Polynomial(self.dim, pairs)

    def gradient_at(self, x) -> np.ndarray:
        x = self._check_point(x)
        return np.array([self.partial(i).evaluate_many(x[None])[0] for i in range(self.dim)])

    def hessian_at(self, x) -> np.ndarray:
        x = self._check_point(x)
        H = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            di = self.partial(i)
            for j in range(i, self.dim):
                H[i, j] = H[j, i] = di.partial(j).evaluate_many(x[None])[0]
        return H

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"exp": list(exp), "coef": coef} for exp, coef in self._terms.items()],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Polynomial":
        """Inverse of :meth:`to_dict`; homogeneity is validated on load."""
        try:
            dim = data["dim"]
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise HyperError(f"polynomial object needs 'dim' and 'terms' fields ({exc})") from None
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise HyperError("polynomial 'dim' must be an integer")
        if not isinstance(raw, list):
            raise HyperError("polynomial 'terms' must be an array")
        pairs = []
        for idx, term in enumerate(raw):
            if not isinstance(term, Mapping) or "exp" not in term or "coef" not in term:
                raise HyperError(f"terms[{idx}] must be an object with 'exp' and 'coef'")
            exp, coef = term["exp"], term["coef"]
            if not isinstance(exp, list) or not all(isinstance(k, int) for k in exp):
                raise HyperError(f"terms[{idx}].exp must be an array of integers")
            if not isinstance(coef, (int, float)) or isinstance(coef, bool):
                raise HyperError(f"terms[{idx}].coef must be a number")
            pairs.append((tuple(exp), coef))
        poly = cls(dim, pairs)
        homogeneous_degree(poly)
        return poly


def evaluate(p: Polynomial, x) -> float:
    """Sum of ``coef * prod(x_i ** exp_i)`` over the terms, in sorted exponent order."""
    x = p._check_point(x)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a single point, got shape {x.shape}")
    return float(p.evaluate_many(x[None])[0])


def homogeneous_degree(p: Polynomial) -> int:
    """Return the common total degree of all terms.

    Raises :class:`NotHomogeneous` listing the terms whose degree differs
    from the top degree.
    """
    if not len(p):
        raise HyperError("empty polynomial has no degree")
    n = p.degree
    bad = [exp for exp in p.terms if sum(exp) != n]
    if bad:
        raise NotHomogeneous(bad)
    return n


def is_homogeneous(p: Polynomial) -> bool:
    try:
        homogeneous_degree(p)
    except NotHomogeneous:
        return False
    return True


def directional_derivative(p: Polynomial, e) -> Polynomial:
    """The polynomial ``x -> <grad p(x), e>``, built term by term."""
    n = homogeneous_degree(p)
    if n < 1:
        raise HyperError("cannot differentiate a degree-0 polynomial")
    e = p._check_point(e)
    pairs = []
    for exp, coef in p.terms.items():
        for i, k in enumerate(exp):
            if k and e[i] != 0.0:
                new = list(exp)
                new[i] = k - 1
                pairs.append((tuple(new), coef * k * e[i]))
    return Polynomial(p.dim, pairs)


def _newton_to_monomial(dd: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Convert Newton-form coefficients (last axis) to ascending monomial coefficients."""
    n = dd.shape[-1] - 1
    out = np.zeros_like(dd)
    out[..., 0] = dd[..., n]
    for k in range(n - 1, -1, -1):
        # out <- out * (t - nodes[k]) + dd[k]
        shifted = np.zeros_like(out)
        shifted[..., 1:] = out[..., :-1]
        out = shifted - nodes[k] * out
        out[..., 0] += dd[..., k]
    return out


def restrict_many(p: Polynomial, e, X, *, check_direction: bool = True) -> np.ndarray:
    """Coefficients (ascending, shape ``(m, n+1)``) of ``t -> p(t e - x)`` for each row x.

    Interpolates at the integer nodes 0..n with Newton divided differences;
    since the degree is known the interpolant is the restriction itself.
    """
    n = homogeneous_degree(p)
    e = p._check_point(e)
    X = np.atleast_2d(p._check_point(X))
    if check_direction:
        pe = evaluate(p, e)
        if abs(pe) <= 1e-10 * max(p.coefficient_scale, 1e-300):
            raise InvalidDirection(f"p(e) = {pe:g} vanishes; e is not a valid direction")
    nodes = np.arange(n + 1, dtype=float)
    pts = nodes[None, :, None] * e[None, None, :] - X[:, None, :]
    vals = p.evaluate_many(pts)  # (m, n+1)
    dd = vals.copy()
    for level in range(1, n + 1):
        dd[:, level:] = (dd[:, level:] - dd[:, level - 1:-1]) / level
    return _newton_to_monomial(dd, nodes)


@lru_cache(maxsize=None)
def _binomial_row(k: int) -> np.ndarray:
    return np.array([math.comb(k, j) for j in range(k + 1)], dtype=float)


def _polymul(A, B):
    out = np.zeros((A.shape[0], A.shape[1] + B.shape[1] - 1))
    for j in range(B.shape[1]):
        out[:, j : j + A.shape[1]] += A * B[:, j : j + 1]
    return out


def expand_many(p: Polynomial, e, X) -> np.ndarray:
    """Same coefficients as :func:`restrict_many`, by multiplying out each monomial.

    Every term becomes a product of binomial powers ``(e_i t - x_i)^k``, so
    rounding errors stay relative to the size of the individual terms
    rather than to the values of p at the interpolation nodes.
    """
    n = homogeneous_degree(p)
    e = p._check_point(e)
    X = np.atleast_2d(p._check_point(X))
    m = X.shape[0]
    powers = {}

    def power(i, k):
        if (i, k) not in powers:
            j = np.arange(k + 1)
            powers[(i, k)] = _binomial_row(k) * e[i] ** j * (-X[:, i : i + 1]) ** (k - j)
        return powers[(i, k)]

    out = np.zeros((m, n + 1))
    for exp, coef in zip(p._exps, p._coefs):
        idx = np.flatnonzero(exp)
        if not len(idx):
            out[:, 0] += coef
            continue
        acc = power(int(idx[0]), int(exp[idx[0]]))
        for i in idx[1:]:
            acc = _polymul(acc, power(int(i), int(exp[i])))
        out += coef * acc
    return out


def restrict_univariate(p: Polynomial, e, x) -> np.ndarray:
    """Coefficients c_0..c_n of ``t -> p(t e - x)``; the leading one equals p(e)."""
    x = p._check_point(x)
    if x.ndim != 1:
        raise DimensionMismatch("restrict_univariate expects a single point")
    return restrict_many(p, e, x[None])[0]


def elementary_symmetric(d: int, k: int) -> Polynomial:
    """E_k on R^d: the sum of all C(d, k) square-free monomials of degree k."""
    if not 1 <= k <= d:
        raise HyperError(f"need 1 <= k <= d, got k={k}, d={d}")
    terms = {}
    for idx in itertools.combinations(range(d), k):
        exp = [0] * d
        for i in idx:
            exp[i] = 1
        terms[tuple(exp)] = 1.0
    return Polynomial(d, terms)


def linear_form(coeffs) -> Polynomial:
    coeffs = [float(c) for c in coeffs]
    d = len(coeffs)
    return Polynomial(d, {tuple(int(i == j) for j in range(d)): c for i, c in enumerate(coeffs)})


def product(factors: Iterable[Polynomial]) -> Polynomial:
    factors = list(factors)
    out = Polynomial(factors[0].dim, {(0,) * factors[0].dim: 1.0})
    for f in factors:
        out = out * f
    return out


def constant(dim: int, value: float) -> Polynomial:
    return Polynomial(dim, {(0,) * dim: value})
