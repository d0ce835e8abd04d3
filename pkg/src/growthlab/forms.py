"""Pointwise complex exterior algebra on C^m.

Forms are stored over the monomial basis ``dz_I ^ dzbar_J`` with ``I`` and
``J`` strictly increasing tuples of 0-based indices; holomorphic letters
always precede anti-holomorphic ones in the normal form.

Coefficients are deliberately untyped: Python/NumPy complex scalars, NumPy
arrays (a *batch* of forms evaluated at many points at once, which is how
the quadrature code uses this module) or exact Gaussian rationals (elements
of sympy's ``QQ_I``) all work, as long as they support ``+``, ``-``,
``*`` and division by an integer.

Metric conventions: a Hermitian matrix ``h`` stands for the (1,1)-form
``omega = i * sum_{j,k} h[j, k] dz_j ^ dzbar_k``, so the Euclidean metric
of C^m has ``h = I/2`` and its top power ``omega^m / m!`` is Lebesgue
measure on R^{2m} (with real coordinates ordered x1, y1, x2, y2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "ExteriorForm",
    "HermitianForm",
    "Density",
    "NotPositiveDefiniteError",
    "wedge",
    "bidegree_component",
    "power_over_factorial",
    "hodge_star",
    "covector_norm",
    "form_norm_sq",
    "trace_lambda",
    "top_density",
    "linear_substitute",
    "dz",
    "dzbar",
]


class NotPositiveDefiniteError(ValueError):
    """Raised when an operation needs a positive-definite metric."""


# ---------------------------------------------------------------------------
# coefficient helpers

def _is_zero(c):
    if isinstance(c, np.ndarray):
        return not c.any()
    # truthiness rather than ``== 0``: exact domain elements do not compare
    # equal to Python ints
    return not c


def _conj(c):
    if isinstance(c, np.ndarray):
        return np.conj(c)
    if hasattr(c, "conjugate"):
        return c.conjugate()
    return type(c)(c.x, -c.y)  # sympy Gaussian rational


@lru_cache(maxsize=None)
def _merge(left, right):
    """Normal form of ``left ^ right`` for two monomial keys.

    Returns ``(key, sign)`` or ``None`` when a letter repeats.
    """
    (i1, j1), (i2, j2) = left, right
    if set(i1) & set(i2) or set(j1) & set(j2):
        return None
    # letters: (0, k) holomorphic, (1, k) anti-holomorphic
    word = ([(0, k) for k in i1] + [(1, k) for k in j1]
            + [(0, k) for k in i2] + [(1, k) for k in j2])
    inversions = sum(1 for a in range(len(word)) for b in range(a + 1, len(word))
                     if word[a] > word[b])
    word.sort()
    key = (tuple(k for t, k in word if t == 0), tuple(k for t, k in word if t == 1))
    return key, (-1 if inversions % 2 else 1)


def _normalize_key(holo, anti):
    """Sort a raw (holo, anti) index pair; return (key, sign) or None."""
    holo, anti = tuple(holo), tuple(anti)
    if len(set(holo)) != len(holo) or len(set(anti)) != len(anti):
        return None
    sign = 1
    for seq in (holo, anti):
        inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
        if inv % 2:
            sign = -sign
    return (tuple(sorted(holo)), tuple(sorted(anti))), sign


class ExteriorForm:
    """A complex exterior form on C^m, immutable once built.

    Parameters
    ----------
    dim : int
        Complex dimension ``m``.
    terms : mapping, optional
        ``{(I, J): coefficient}``.  Index tuples need not be sorted; they are
        brought to normal form with the matching sign.  Zero coefficients are
        dropped.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = int(dim)
        clean = {}
        degree = None
        for (holo, anti), c in (terms or {}).items():
            if any(k < 0 or k >= dim for k in (*holo, *anti)):
                raise ValueError(f"index out of range for dimension {dim}: {(holo, anti)}")
            norm = _normalize_key(holo, anti)
            if norm is None:
                continue
            key, sign = norm
            if degree is None:
                degree = len(key[0]) + len(key[1])
            elif len(key[0]) + len(key[1]) != degree:
                raise ValueError("all terms of an ExteriorForm must share one total degree")
            c = c if sign == 1 else -c
            clean[key] = clean[key] + c if key in clean else c
        self.terms = {k: c for k, c in clean.items() if not _is_zero(c)}

    @classmethod
    def _raw(cls, dim, terms):
        # trusted constructor: keys already normal, zeros already dropped
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        return obj

    # -- basic structure ---------------------------------------------------
    @property
    def degree(self):
        """Total degree, or ``None`` for the zero form."""
        for holo, anti in self.terms:
            return len(holo) + len(anti)
        return None

    def bidegrees(self):
        return sorted({(len(i), len(j)) for i, j in self.terms})

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, holo, anti):
        norm = _normalize_key(holo, anti)
        if norm is None:
            return 0
        key, sign = norm
        c = self.terms.get(key, 0)
        return c if sign == 1 else -c

    def __repr__(self):
        if not self.terms:
            return f"ExteriorForm(dim={self.dim}, 0)"
        parts = []
        for (i, j), c in sorted(self.terms.items()):
            letters = [f"dz{k + 1}" for k in i] + [f"dzb{k + 1}" for k in j]
            parts.append(f"({c})*{'^'.join(letters) or '1'}")
        return f"ExteriorForm(dim={self.dim}, {' + '.join(parts)})"

    # -- linear structure --------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ExteriorForm):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError("cannot add forms of different total degree")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return ExteriorForm._raw(self.dim, {k: c for k, c in out.items() if not _is_zero(c)})

    def __neg__(self):
        return ExteriorForm._raw(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, ExteriorForm):
            return NotImplemented
        out = {k: c * scalar for k, c in self.terms.items()}
        return ExteriorForm._raw(self.dim, {k: c for k, c in out.items() if not _is_zero(c)})

    def __rmul__(self, scalar):
        if isinstance(scalar, ExteriorForm):
            return NotImplemented
        out = {k: scalar * c for k, c in self.terms.items()}
        return ExteriorForm._raw(self.dim, {k: c for k, c in out.items() if not _is_zero(c)})

    def __truediv__(self, scalar):
        return ExteriorForm._raw(self.dim, {k: c / scalar for k, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ExteriorForm):
            return NotImplemented
        if self.dim != other.dim or self.terms.keys() != other.terms.keys():
            return False
        return all(np.all(self.terms[k] == other.terms[k]) for k in self.terms)

    __hash__ = None

    def allclose(self, other, atol=1e-12, rtol=0.0):
        """Numerical equality, missing keys counting as zero."""
        if self.dim != other.dim:
            return False
        for k in self.terms.keys() | other.terms.keys():
            a = self.terms.get(k, 0)
            b = other.terms.get(k, 0)
            if not np.allclose(a, b, atol=atol, rtol=rtol):
                return False
        return True

    def max_abs(self):
        if not self.terms:
            return 0.0
        return max(float(np.max(np.abs(np.asarray(c, dtype=complex)))) for c in self.terms.values())

    # -- algebra -------------------------------------------------------------
    def wedge(self, other):
        return wedge(self, other)

    def conj(self):
        """Complex conjugate: maps the (p,q) part to the (q,p) part."""
        out = {}
        for (holo, anti), c in self.terms.items():
            # conj(dz_I ^ dzbar_J) = dzbar_I ^ dz_J = (-1)^{|I||J|} dz_J ^ dzbar_I
            sign = -1 if (len(holo) * len(anti)) % 2 else 1
            cc = _conj(c)
            out[(anti, holo)] = cc if sign == 1 else -cc
        return ExteriorForm._raw(self.dim, out)

    def bidegree_component(self, p, q):
        return bidegree_component(self, p, q)

    def map_coefficients(self, fn):
        out = {k: fn(c) for k, c in self.terms.items()}
        return ExteriorForm._raw(self.dim, {k: c for k, c in out.items() if not _is_zero(c)})


def dz(dim, j, coefficient=1):
    """The holomorphic 1-form ``coefficient * dz_j`` (0-based ``j``)."""
    return ExteriorForm(dim, {((j,), ()): coefficient})


def dzbar(dim, j, coefficient=1):
    return ExteriorForm(dim, {((), (j,)): coefficient})


def one(dim, coefficient=1):
    return ExteriorForm(dim, {((), ()): coefficient})


def wedge(a, b):
    """Exterior product in normal form.

    Bilinear and graded-anticommutative; the zero form is returned once the
    degree exceeds ``2m``.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    out = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            merged = _merge(ka, kb)
            if merged is None:
                continue
            key, sign = merged
            c = ca * cb
            if sign < 0:
                c = -c
            out[key] = out[key] + c if key in out else c
    return ExteriorForm._raw(a.dim, {k: c for k, c in out.items() if not _is_zero(c)})


def bidegree_component(a, p, q):
    """The part of ``a`` of bidegree ``(p, q)``; empty component is zero."""
    return ExteriorForm._raw(a.dim, {k: c for k, c in a.terms.items()
                                     if len(k[0]) == p and len(k[1]) == q})


def power_over_factorial(omega, p):
    """``omega^p / p!`` by repeated wedging (exact for exact coefficients)."""
    if p < 0:
        raise ValueError("power must be non-negative")
    result = ExteriorForm._raw(omega.dim, {((), ()): 1})
    for k in range(1, p + 1):
        result = wedge(result, omega) / k
    return result


@dataclass(frozen=True)
class Density:
    """An (m,m)-form written as ``value * Lebesgue`` on R^{2m}."""

    value: object
    dim: int

    def __float__(self):
        return float(self.value)


def top_density(phi, imag_tol=1e-12):
    """Lebesgue density of a top-degree (m,m)-form.

    The imaginary part must vanish to ``imag_tol`` (relative to the modulus);
    it is then discarded.
    """
    m = phi.dim
    full = tuple(range(m))
    bad = [k for k in phi.terms if k != (full, full)]
    if bad:
        raise ValueError(f"top_density needs a pure (m,m)-form, got monomials {bad[:3]}")
    c = phi.terms.get((full, full), 0)
    factor = (-1) ** (m * (m - 1) // 2) * (1j) ** (-m) * 2 ** m
    value = np.asarray(c * factor, dtype=complex)
    scale = np.maximum(np.abs(value), 1.0)
    if np.any(np.abs(value.imag) > imag_tol * scale):
        raise ValueError("top-degree form has a non-real density")
    value = value.real
    return Density(value if value.ndim else float(value), m)


# ---------------------------------------------------------------------------
# Hermitian metrics

_DEFINITENESS = ("positive-definite", "positive-semidefinite", "indefinite", "unknown")


@dataclass(frozen=True)
class HermitianForm:
    """A (1,1)-form ``i * sum h[j,k] dz_j ^ dzbar_k`` given by its matrix.

    ``matrix`` may carry leading batch axes, ``(..., m, m)``; every operation
    in this module then works pointwise along them.
    """

    matrix: np.ndarray
    definiteness: str = "unknown"
    _hermitian_atol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
            raise ValueError(f"expected (..., m, m) matrix, got shape {h.shape}")
        scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
        if not np.allclose(h, np.conj(np.swapaxes(h, -1, -2)), atol=self._hermitian_atol * scale, rtol=0):
            raise ValueError("matrix is not Hermitian")
        if self.definiteness not in _DEFINITENESS:
            raise ValueError(f"unknown definiteness flag {self.definiteness!r}")
        object.__setattr__(self, "matrix", h)
        if self.definiteness == "positive-definite" and not np.all(np.linalg.eigvalsh(h) > 0):
            raise ValueError("flagged positive-definite but has a non-positive eigenvalue")

    @property
    def dim(self):
        return self.matrix.shape[-1]

    @property
    def batch_shape(self):
        return self.matrix.shape[:-2]

    @classmethod
    def classified(cls, matrix, tol=1e-10):
        """Build the form and set the definiteness flag from eigenvalues."""
        h = np.asarray(matrix, dtype=complex)
        ev = np.linalg.eigvalsh(h)
        if np.all(ev > tol):
            flag = "positive-definite"
        elif np.all(ev >= -tol):
            flag = "positive-semidefinite"
        else:
            flag = "indefinite"
        return cls(h, flag)

    @classmethod
    def trusted(cls, matrix, definiteness="unknown"):
        """Skip validation, for matrices Hermitian by construction."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "matrix", np.asarray(matrix, dtype=complex))
        object.__setattr__(obj, "definiteness", definiteness)
        object.__setattr__(obj, "_hermitian_atol", 1e-12)
        return obj

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def scaled(self, factor):
        return HermitianForm(self.matrix * factor, self.definiteness if factor > 0 else "unknown")

    def as_form(self):
        """The (1,1)-form; batched matrices give array coefficients."""
        h = self.matrix
        m = self.dim
        terms = {}
        for j in range(m):
            for k in range(m):
                c = 1j * h[..., j, k]
                if c.ndim == 0:
                    c = complex(c)
                if not _is_zero(c):
                    terms[((j,), (k,))] = c
        return ExteriorForm._raw(m, terms)


def _require_pd(g):
    if g.definiteness != "positive-definite":
        _cholesky(g)


def _cholesky(g):
    try:
        return np.linalg.cholesky(g.matrix)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("metric is not positive definite") from exc


def linear_substitute(form, S):
    """Substitute ``dz_j -> sum_c S[..., j, c] dz_c`` (and conjugates).

    ``S`` may be batched; the result then has array coefficients.
    """
    m = form.dim
    S = np.asarray(S, dtype=complex)
    images_h = []
    images_a = []
    for j in range(m):
        images_h.append(ExteriorForm._raw(m, {((c,), ()): S[..., j, c] for c in range(m)}))
        images_a.append(ExteriorForm._raw(m, {((), (c,)): np.conj(S[..., j, c]) for c in range(m)}))
    result = None
    for (holo, anti), coeff in form.terms.items():
        piece = ExteriorForm._raw(m, {((), ()): coeff})
        for j in holo:
            piece = wedge(piece, images_h[j])
        for j in anti:
            piece = wedge(piece, images_a[j])
        result = piece if result is None else result + piece
    return result if result is not None else ExteriorForm._raw(m, {})


@lru_cache(maxsize=None)
def _euclidean_star_table(m):
    """Hodge star of each monomial for the Euclidean metric h = I/2."""
    full = tuple(range(m))
    vol_coef = (0.5j) ** m * (-1) ** (m * (m - 1) // 2)
    table = {}
    for p in range(m + 1):
        for q in range(m + 1):
            for A in combinations(full, p):
                for B in combinations(full, q):
                    # conj(dz_B ^ dzbar_A) = (-1)^{pq} dz_A ^ dzbar_B
                    Bc = tuple(k for k in full if k not in B)
                    Ac = tuple(k for k in full if k not in A)
                    merged = _merge((B, A), (Bc, Ac))
                    key, sign = merged
                    # |dz_B ^ dzbar_A|^2 = 2^{p+q}
                    c = (2 ** (p + q)) * vol_coef / sign
                    if (p * q) % 2:
                        c = -c
                    table[(A, B)] = ((Bc, Ac), c)
    return table


def hodge_star(v, g):
    """Complex-linear Hodge star of ``v`` for the metric ``g``.

    Works in a ``g``-unitary coframe obtained from the Cholesky factor of
    the metric matrix; defined so that ``v ^ *conj(v) = |v|_g^2 g_m``.
    """
    if v.dim != g.dim:
        raise ValueError("form and metric dimensions differ")
    m = v.dim
    L = _cholesky(g)
    # unitary coframe zeta^c = sum_j T[c, j] dz_j with T = sqrt(2) L^T
    T = np.sqrt(2.0) * np.swapaxes(L, -1, -2)
    S = np.linalg.inv(T)
    v_frame = linear_substitute(v, S)
    table = _euclidean_star_table(m)
    starred = {}
    for key, c in v_frame.terms.items():
        new_key, factor = table[key]
        starred[new_key] = starred[new_key] + factor * c if new_key in starred else factor * c
    starred = ExteriorForm._raw(m, {k: c for k, c in starred.items() if not _is_zero(c)})
    return linear_substitute(starred, T)


def form_norm_sq(v, g):
    """Pointwise squared ``g``-norm of a form, computed in a unitary coframe."""
    L = _cholesky(g)
    S = np.linalg.inv(np.sqrt(2.0) * np.swapaxes(L, -1, -2))
    total = 0.0
    for (holo, anti), c in linear_substitute(v, S).terms.items():
        total = total + (2.0 ** (len(holo) + len(anti))) * np.abs(c) ** 2
    return total


def covector_norm(v, g):
    """``|v|_g`` for a 1-form, from the inverse metric.

    ``<dz_j, dz_k> = (h^{-1})[k, j]`` and ``<dzbar_j, dzbar_k> = (h^{-1})[j, k]``;
    holomorphic and anti-holomorphic parts are orthogonal.
    """
    if v.degree not in (None, 1):
        raise ValueError("covector_norm needs a 1-form")
    _require_pd(g)
    m = v.dim
    hinv = np.linalg.inv(g.matrix)
    batch = g.batch_shape
    a = np.zeros(batch + (m,), dtype=complex)
    b = np.zeros(batch + (m,), dtype=complex)
    for (holo, anti), c in v.terms.items():
        if holo:
            a[..., holo[0]] = c
        else:
            b[..., anti[0]] = c
    # sum_{j,k} a_j conj(a_k) hinv[k, j]  and  sum b_j conj(b_k) hinv[j, k]
    hol = np.einsum("...j,...k,...kj->...", a, np.conj(a), hinv)
    ant = np.einsum("...j,...k,...jk->...", b, np.conj(b), hinv)
    return np.sqrt(np.maximum((hol + ant).real, 0.0))


def trace_lambda(gamma, g):
    """Trace of a (1,1)-form with respect to ``g``: ``tr(h_g^{-1} h_gamma)``."""
    if any((len(i), len(j)) != (1, 1) for i, j in gamma.terms):
        raise ValueError("trace_lambda needs a pure (1,1)-form")
    _require_pd(g)
    m = gamma.dim
    hg = np.zeros(g.batch_shape + (m, m), dtype=complex)
    for (holo, anti), c in gamma.terms.items():
        hg[..., holo[0], anti[0]] = c / 1j
    hinv = np.linalg.inv(g.matrix)
    tr = np.einsum("...ij,...ji->...", hinv, hg)
    return tr if np.ndim(tr) else complex(tr)
