"""Left-invariant forms on complex Lie groups, in exact arithmetic.

A complex Lie algebra is given by holomorphic structure equations

    d xi^k = sum_{i<j} c^k_{ij} xi^i ^ xi^j

for a basis ``xi^1..xi^n`` of left-invariant (1,0)-forms.  Invariant forms
are then :class:`~growthlab.forms.ExteriorForm` objects whose letters
``dz_k`` / ``dzbar_k`` stand for ``xi^k`` / ``conj(xi^k)`` and whose
coefficients are Gaussian rationals (sympy ``QQ_I``).  Because the
structure equations are holomorphic, ``d xi`` has type (2,0), so
``dbar xi = 0`` and ``d`` splits on every invariant form as
``partial + dbar`` acting on the holomorphic and anti-holomorphic letters
separately.

Everything computed here is *invariant* cohomology and *invariant*
positivity: dimensions and certificates concern the finite-dimensional
complex of left-invariant forms, not the full cohomology of a compact
quotient.  Positivity of (n-1,n-1)-forms is read off an associated
Hermitian matrix against the reference metric ``(i/2) sum xi^k ^ conj(xi^k)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import ClassVar

import numpy as np

from . import exact
from .exact import QQ_I, gq, gq_to_complex, gq_to_strings
from .forms import ExteriorForm, bidegree_component, wedge

__all__ = [
    "ComplexLieAlgebra",
    "JacobiError",
    "InvariantComplex",
    "AeppliClass",
    "InvariantCohomology",
    "ConeCertificate",
    "NotCertified",
    "PowerWitness",
    "DKFamily",
    "lie_algebra",
    "LIE_GALLERY",
    "load_algebra",
    "build_complex",
    "direct_sum",
    "reference_metric",
    "hermitian_to_form",
    "form_power",
    "associated_matrix",
    "degenerate_balanced_witness",
    "exact_power_witness",
    "product_witness",
    "cohomology_dims",
    "p_map",
    "certify_gauduchon",
    "certify_strongly_gauduchon",
    "hs_positivity_check",
    "dk_membership_search",
]

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)
REFERENCE_NOTE = "positivity via the associated Hermitian matrix against (i/2) sum xi^k ^ conj(xi^k)"


class JacobiError(ValueError):
    """The structure constants violate the Jacobi identity."""

    def __init__(self, triple, labels):
        self.triple = triple
        names = ", ".join(labels[t - 1] for t in triple)
        super().__init__(f"Jacobi identity fails on the triple ({names}) = {triple}")


# ---------------------------------------------------------------------------
# algebras

@dataclass(frozen=True)
class ComplexLieAlgebra:
    """Structure constants ``c^k_{ij}`` (0-based, ``i < j``) over ``Q(i)``.

    Build instances with :meth:`from_constants`, which accepts 1-based
    entries in either index order and applies antisymmetry.
    """

    dim: int
    constants: tuple  # ((k, i, j), value) with i < j, nonzero values only
    labels: tuple
    name: str = ""

    @classmethod
    def from_constants(cls, dim, entries, labels=None, name=""):
        """From 1-based ``[k, i, j, re, im]`` entries (``im`` optional).

        ``re`` / ``im`` may be integers, floats or fraction strings such as
        ``"1/2"``; entries with ``i > j`` are flipped with a sign.
        """
        if dim < 1:
            raise ValueError("dimension must be positive")
        table = {}
        for entry in entries:
            k, i, j, re, *rest = entry
            im = rest[0] if rest else 0
            if not all(1 <= v <= dim for v in (k, i, j)):
                raise ValueError(f"index out of range in constant {entry}")
            if i == j:
                raise ValueError(f"c^k_ii must vanish, got {entry}")
            value = exact.parse_gq(re, im)
            if i > j:
                i, j, value = j, i, -value
            key = (k - 1, i - 1, j - 1)
            table[key] = table.get(key, ZERO) + value
        labels = tuple(labels) if labels else tuple(f"xi{k}" for k in range(1, dim + 1))
        if len(labels) != dim:
            raise ValueError("need one label per basis covector")
        consts = tuple(sorted((k, v) for k, v in table.items() if v))
        return cls(dim, consts, labels, name)

    def c(self, k, i, j):
        """``c^k_{ij}`` with antisymmetry in ``(i, j)`` (0-based)."""
        if i == j:
            return ZERO
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        for key, v in self.constants:
            if key == (k, i, j):
                return v if sign == 1 else -v
        return ZERO

    def jacobi_violations(self):
        """1-based triples ``(a, b, c)``, ``a < b < c``, where Jacobi fails."""
        n = self.dim
        B = [[[self.c(k, a, b) for k in range(n)] for b in range(n)] for a in range(n)]
        bad = []
        for a, b, c in combinations(range(n), 3):
            for k in range(n):
                total = ZERO
                for l in range(n):
                    total += B[a][b][l] * B[l][c][k] + B[b][c][l] * B[l][a][k] + B[c][a][l] * B[l][b][k]
                if total:
                    bad.append((a + 1, b + 1, c + 1))
                    break
        return bad

    def to_json(self):
        entries = []
        for (k, i, j), v in self.constants:
            re, im = gq_to_strings(v)
            entries.append([k + 1, i + 1, j + 1, re, im])
        return {"dim": self.dim, "constants": entries, "labels": list(self.labels), "name": self.name}


def load_algebra(source):
    """Read ``{dim, constants, labels}`` from a path, a JSON string or a dict."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    missing = {"dim", "constants"} - set(data)
    if missing:
        raise ValueError(f"structure file lacks field(s): {sorted(missing)}")
    return ComplexLieAlgebra.from_constants(int(data["dim"]), data["constants"],
                                            data.get("labels"), data.get("name", ""))


def lie_algebra(name, n=None):
    """Gallery algebras: ``sl2c``, ``heisenberg``, ``abelian`` (any ``n``), ``nakamura``."""
    if name == "sl2c":
        # d alpha = beta ^ gamma, d beta = gamma ^ alpha, d gamma = alpha ^ beta
        return ComplexLieAlgebra.from_constants(
            3, [[1, 2, 3, 1], [2, 3, 1, 1], [3, 1, 2, 1]], ("alpha", "beta", "gamma"), "sl2c")
    if name == "heisenberg":
        # gamma = dz3 - z1 dz2 gives d gamma = -alpha ^ beta
        return ComplexLieAlgebra.from_constants(3, [[3, 1, 2, -1]], ("alpha", "beta", "gamma"), "heisenberg")
    if name == "abelian":
        n = 3 if n is None else n
        return ComplexLieAlgebra.from_constants(n, [], None, "abelian")
    if name == "nakamura":
        return ComplexLieAlgebra.from_constants(
            3, [[2, 1, 2, -1], [3, 1, 3, 1]], ("eta1", "eta2", "eta3"), "nakamura")
    raise ValueError(f"unknown algebra {name!r}; choose from {LIE_GALLERY}")


LIE_GALLERY = ("sl2c", "heisenberg", "abelian", "nakamura")


def direct_sum(a, b):
    """The product algebra; ``b``'s covectors follow ``a``'s."""
    entries = []
    for (k, i, j), v in a.constants:
        entries.append((k, i, j, v))
    for (k, i, j), v in b.constants:
        entries.append((k + a.dim, i + a.dim, j + a.dim, v))
    consts = tuple(sorted(((k, i, j), v) for k, i, j, v in entries))
    labels = tuple(f"{l}_1" for l in a.labels) + tuple(f"{l}_2" for l in b.labels)
    return ComplexLieAlgebra(a.dim + b.dim, consts, labels, f"{a.name}x{b.name}")


# ---------------------------------------------------------------------------
# the bicomplex

def _keys(n, p, q):
    return [(I, J) for I in combinations(range(n), p) for J in combinations(range(n), q)]


class InvariantComplex:
    """Invariant forms of a complex Lie algebra with ``partial`` and ``dbar``.

    Bases of the ``(p, q)`` spaces are monomials ``xi_I ^ conj(xi)_J`` in
    lexicographic order of ``(I, J)``.
    """

    def __init__(self, algebra):
        self.algebra = algebra
        self.n = algebra.dim
        n = self.n
        self._dxi = []
        for k in range(n):
            terms = {((i, j), ()): algebra.c(k, i, j) for i, j in combinations(range(n), 2)}
            self._dxi.append(ExteriorForm(n, {key: v for key, v in terms.items() if v}))
        self._cache = {}
        self._quotients = {}

    # -- bases and coordinates --------------------------------------------
    def basis(self, p, q):
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            return []
        return _keys(self.n, p, q)

    def basis_form(self, p, q, index):
        return ExteriorForm._raw(self.n, {self.basis(p, q)[index]: ONE})

    def coords(self, form, p, q):
        if form.terms and any((len(I), len(J)) != (p, q) for I, J in form.terms):
            raise ValueError(f"form has components outside bidegree ({p},{q})")
        return [form.terms.get(key, ZERO) for key in self.basis(p, q)]

    def from_coords(self, coords, p, q):
        return ExteriorForm._raw(self.n, {k: c for k, c in zip(self.basis(p, q), coords) if c})

    def total_basis(self, degree):
        return [key for p in range(degree + 1) for key in self.basis(p, degree - p)]

    def total_coords(self, form, degree):
        return [form.terms.get(key, ZERO) for key in self.total_basis(degree)]

    def from_total_coords(self, coords, degree):
        return ExteriorForm._raw(self.n, {k: c for k, c in zip(self.total_basis(degree), coords) if c})

    # -- differentials ------------------------------------------------------
    def _monomial(self, key, which):
        cache_key = (key, which)
        if cache_key in self._cache:
            return self._cache[cache_key]
        n = self.n
        I, J = key
        out = ExteriorForm._raw(n, {})
        if which == "partial":
            for r, k in enumerate(I):
                left = ExteriorForm._raw(n, {(I[:r], ()): ONE})
                right = ExteriorForm._raw(n, {(I[r + 1:], J): ONE})
                piece = wedge(wedge(left, self._dxi[k]), right)
                out = out + (piece if r % 2 == 0 else -piece)
        else:
            head = ExteriorForm._raw(n, {(I, ()): ONE if len(I) % 2 == 0 else -ONE})
            for r, k in enumerate(J):
                left = ExteriorForm._raw(n, {((), J[:r]): ONE})
                right = ExteriorForm._raw(n, {((), J[r + 1:]): ONE})
                piece = wedge(wedge(left, self._dxi[k].conj()), right)
                out = out + wedge(head, piece if r % 2 == 0 else -piece)
        self._cache[cache_key] = out
        return out

    def _apply(self, form, which):
        out = ExteriorForm._raw(self.n, {})
        for key, c in form.terms.items():
            img = self._monomial(key, which)
            if img.terms:
                out = out + img * c
        return out

    def partial(self, form):
        return self._apply(form, "partial")

    def dbar(self, form):
        return self._apply(form, "dbar")

    def d(self, form):
        return self.partial(form) + self.dbar(form)

    def is_closed(self, form):
        return self.d(form).is_zero()

    def partial_matrix(self, p, q):
        """Columns: coordinates in ``(p+1, q)`` of ``partial`` of each ``(p, q)`` basis form."""
        return [self.coords(self.partial(self.basis_form(p, q, i)), p + 1, q)
                for i in range(len(self.basis(p, q)))]

    def dbar_matrix(self, p, q):
        return [self.coords(self.dbar(self.basis_form(p, q, i)), p, q + 1)
                for i in range(len(self.basis(p, q)))]

    def d_columns(self, degree):
        """Columns: total coordinates of ``d`` of each degree-``degree`` basis form."""
        out = []
        for key in self.total_basis(degree):
            img = self.d(ExteriorForm._raw(self.n, {key: ONE}))
            out.append(self.total_coords(img, degree + 1))
        return out

    def check_d_squared(self):
        """Bidegrees ``(p, q)`` on which one of ``partial^2``, ``dbar^2`` or
        ``partial dbar + dbar partial`` fails to vanish."""
        bad = []
        for p in range(self.n + 1):
            for q in range(self.n + 1):
                for i in range(len(self.basis(p, q))):
                    e = self.basis_form(p, q, i)
                    if not (self.partial(self.partial(e)).is_zero()
                            and self.dbar(self.dbar(e)).is_zero()
                            and (self.partial(self.dbar(e)) + self.dbar(self.partial(e))).is_zero()):
                        bad.append((p, q))
                        break
        return bad

    # -- Aeppli quotient ----------------------------------------------------
    def _aeppli_data(self, p, q):
        if (p, q) in self._quotients:
            return self._quotients[(p, q)]
        dim = len(self.basis(p, q))
        image = []
        if p >= 1:
            image += self.partial_matrix(p - 1, q)
        if q >= 1:
            image += self.dbar_matrix(p, q - 1)
        image = [v for v in image if any(v)]
        w_rows, w_piv = exact.row_reduce(image, dim)
        ddbar = [self.coords(self.partial(self.dbar(self.basis_form(p, q, i))), p + 1, q + 1)
                 for i in range(dim)]
        ddbar_rows = _transpose(ddbar, len(self.basis(p + 1, q + 1)))
        kernel = exact.nullspace([r for r in ddbar_rows if any(r)], dim)
        remainders = [exact.reduce_modulo(v, w_rows, w_piv) for v in kernel]
        q_rows, q_piv = exact.row_reduce([r for r in remainders if any(r)], dim)
        data = (w_rows, w_piv, q_rows, q_piv)
        self._quotients[(p, q)] = data
        return data


def _transpose(columns, nrows):
    return [[col[r] for col in columns] for r in range(nrows)]


def build_complex(algebra):
    """Materialize the invariant bicomplex; the Jacobi identity is checked first."""
    bad = algebra.jacobi_violations()
    if bad:
        raise JacobiError(bad[0], algebra.labels)
    return InvariantComplex(algebra)


# ---------------------------------------------------------------------------
# metrics and positivity

def hermitian_to_form(h):
    """``i sum h[j][k] xi^j ^ conj(xi^k)`` from an exact Hermitian matrix."""
    n = len(h)
    return ExteriorForm(n, {((j,), (k,)): I_UNIT * h[j][k] for j in range(n) for k in range(n) if h[j][k]})


def reference_metric(n):
    """``(i/2) sum xi^k ^ conj(xi^k)``."""
    half = gq(Fraction(1, 2))
    return hermitian_to_form([[half if j == k else ZERO for k in range(n)] for j in range(n)])


def hermitian_of(form):
    """The matrix ``h`` with ``form = i sum h_jk xi^j ^ conj(xi^k)`` (the (1,1) part)."""
    n = form.dim
    minus_i = QQ_I(0, -1)
    return [[minus_i * form.terms.get(((j,), (k,)), ZERO) for k in range(n)] for j in range(n)]


def form_power(form, p):
    """``form^p`` (no factorial) by repeated wedging."""
    out = ExteriorForm._raw(form.dim, {((), ()): ONE})
    for _ in range(p):
        out = wedge(out, form)
    return out


def _top_key(n):
    return (tuple(range(n)), tuple(range(n)))


def _reference_volume(n):
    vol = form_power(reference_metric(n), n)
    return vol.terms[_top_key(n)] * gq(Fraction(1, math.factorial(n)))


def associated_matrix(omega_big):
    """Hermitian matrix ``M_jk = [Omega ^ i xi^j ^ conj(xi^k)] / vol_ref``.

    ``Omega`` is an (n-1, n-1)-form; it is strictly positive iff ``M`` is
    positive definite.
    """
    n = omega_big.dim
    top = _top_key(n)
    vol = _reference_volume(n)
    m = []
    for j in range(n):
        row = []
        for k in range(n):
            t = ExteriorForm._raw(n, {((j,), (k,)): I_UNIT})
            row.append(wedge(omega_big, t).terms.get(top, ZERO) / vol)
        m.append(row)
    return m


def _numeric(m):
    return np.array([[gq_to_complex(c) for c in row] for row in m])


def _is_real(form):
    return form.conj() == form


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class ConeCertificate:
    """A re-verifiable positivity / exactness certificate.

    ``witness`` maps names to exact invariant forms; ``residual`` is the
    exact residual form (zero when issued) or, for ``dk-member`` witnesses
    that could not be rationalized, a float eigenvalue margin.
    """

    kind: str
    algebra: ComplexLieAlgebra
    witness: dict
    residual: object
    details: dict = field(default_factory=dict)
    reference: str = REFERENCE_NOTE

    certified: ClassVar[bool] = True
    KINDS: ClassVar[tuple] = ("gauduchon-member", "strongly-gauduchon",
                              "degenerate-balanced-witness", "dk-member", "hs-positive")

    def verify(self, cx=None):
        """Recompute the certified identity from the stored witness."""
        cx = cx or InvariantComplex(self.algebra)
        n = cx.n
        w = self.witness
        if self.kind == "degenerate-balanced-witness":
            target = form_power(w["omega"], n - 1)
            return (cx.d(w["Gamma"]) - target).is_zero()
        if self.kind == "gauduchon-member":
            omega_big = w["Omega"]
            return cx.partial(cx.dbar(omega_big)).is_zero() and exact.is_positive_definite(associated_matrix(omega_big))
        if self.kind == "strongly-gauduchon":
            omega_big = w["Omega"]
            return ((cx.partial(omega_big) - cx.dbar(w["X"])).is_zero()
                    and exact.is_positive_definite(associated_matrix(omega_big)))
        if self.kind == "hs-positive":
            wt = w["omega_tilde"]
            omega_big = bidegree_component(form_power(wt, n - 1), n - 1, n - 1)
            return (cx.is_closed(wt)
                    and exact.is_positive_definite(hermitian_of(bidegree_component(wt, 1, 1)))
                    and exact.is_positive_definite(associated_matrix(omega_big)))
        if self.kind == "dk-member":
            omega_big = _dk_form(cx, w["alpha"], w["u"])
            if self.details.get("exact", False):
                return exact.is_positive_definite(associated_matrix(omega_big))
            lam = float(np.linalg.eigvalsh(_numeric(associated_matrix(omega_big)))[0])
            return lam > -1e-9 and abs(lam - float(self.residual)) <= 1e-9
        raise ValueError(f"unknown certificate kind {self.kind!r}")

    def to_json(self):
        def form_json(form):
            out = []
            for (I, J), c in sorted(form.terms.items()):
                re, im = gq_to_strings(c)
                out.append({"I": [i + 1 for i in I], "J": [j + 1 for j in J], "re": re, "im": im})
            return out
        if isinstance(self.residual, ExteriorForm):
            residual = 0 if self.residual.is_zero() else form_json(self.residual)
        else:
            residual = float(self.residual)
        return {
            "kind": self.kind,
            "algebra": self.algebra.to_json(),
            "reference_metric": self.reference,
            "witness": {k: form_json(v) for k, v in sorted(self.witness.items())},
            "residual": residual,
            "details": _jsonable(self.details),
        }


@dataclass(frozen=True)
class NotCertified:
    """Outcome when no certificate is issued; ``reason`` says why."""

    kind: str
    reason: str
    details: dict = field(default_factory=dict)

    certified: ClassVar[bool] = False

    def to_json(self):
        return {"kind": self.kind, "certified": False, "reason": self.reason,
                "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, ExteriorForm):
        return repr(obj)
    if type(obj).__name__ == "GaussianRational":
        return list(gq_to_strings(obj))
    return obj


# ---------------------------------------------------------------------------
# witnesses

def _check_metric(cx, omega):
    if omega.dim != cx.n or omega.bidegrees() not in ([(1, 1)], []):
        raise ValueError("omega must be an invariant (1,1)-form on the algebra")
    h = hermitian_of(omega)
    if not _is_real(omega) or not exact.is_positive_definite(h):
        raise ValueError("omega must be a positive-definite Hermitian form")


def _solve_d(cx, target):
    """Exact solve of ``d Gamma = target``; returns ``(Gamma or None, ranks)``."""
    degree = target.degree
    if degree is None:
        return ExteriorForm._raw(cx.n, {}), (0, 0)
    columns = cx.d_columns(degree - 1)
    x, rank_a, rank_ab = exact.solve(columns, cx.total_coords(target, degree))
    if x is None:
        return None, (rank_a, rank_ab)
    gamma = cx.from_total_coords(x, degree - 1)
    if _is_real(target):
        gamma = (gamma + gamma.conj()) * gq(Fraction(1, 2))
    return gamma, (rank_a, rank_ab)


def degenerate_balanced_witness(cx, omega):
    """Solve ``d Gamma = omega^{n-1}`` exactly over invariant (2n-3)-forms.

    Returns a certificate with a real ``Gamma`` or :class:`NotCertified`
    carrying the rank certificate ``rank(d) < rank(d | target)``.
    """
    _check_metric(cx, omega)
    target = form_power(omega, cx.n - 1)
    gamma, (rank_a, rank_ab) = _solve_d(cx, target)
    details = {"rank_d": rank_a, "rank_augmented": rank_ab,
               "balanced": cx.is_closed(target)}
    if gamma is None:
        return NotCertified("degenerate-balanced-witness",
                            "omega^(n-1) is not d-exact among invariant forms", details)
    residual = cx.d(gamma) - target
    return ConeCertificate("degenerate-balanced-witness", cx.algebra,
                           {"omega": omega, "Gamma": gamma}, residual, details)


@dataclass(frozen=True)
class PowerWitness:
    witness: ExteriorForm
    target: ExteriorForm
    verified: bool


def exact_power_witness(cx, beta, p):
    """``beta ^ (d beta)^(p-1)``, whose differential is ``(d beta)^p``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    alpha = cx.d(beta)
    witness = wedge(beta, form_power(alpha, p - 1))
    target = form_power(alpha, p)
    return PowerWitness(witness, target, (cx.d(witness) - target).is_zero())


def _embed(form, offset, dim):
    terms = {(tuple(i + offset for i in I), tuple(j + offset for j in J)): c
             for (I, J), c in form.terms.items()}
    return ExteriorForm._raw(dim, terms)


def product_witness(c1, omega1, c2, omega2, gamma1=None, gamma2=None):
    """d-potential of ``omega^{N-1}`` for ``omega = omega1 + omega2`` on the product.

    With ``N = n1 + n2`` only two binomial terms survive:
    ``C(N-1, n1-1) omega1^{n1-1} omega2^{n2} + C(N-1, n1) omega1^{n1} omega2^{n2-1}``.
    Each factor contributes either a potential of its own ``omega_i^{n_i-1}``
    or, when ``omega_i`` is closed (Kaehler), its top power is paired with a
    potential of the other factor's top power.  Missing ``gamma`` data are
    solved for exactly.
    """
    n1, n2 = c1.n, c2.n
    N = n1 + n2
    prod = InvariantComplex(direct_sum(c1.algebra, c2.algebra))
    w1, w2 = _embed(omega1, 0, N), _embed(omega2, n1, N)
    omega = w1 + w2
    target = form_power(omega, N - 1)

    def potential(cx, form):
        g, _ = _solve_d(cx, form)
        return g

    g1 = gamma1 if gamma1 is not None else potential(c1, form_power(omega1, n1 - 1))
    g2 = gamma2 if gamma2 is not None else potential(c2, form_power(omega2, n2 - 1))
    a, b = math.comb(N - 1, n1 - 1), math.comb(N - 1, n1)
    first = second = None
    variant = []
    # term omega1^{n1-1} omega2^{n2}
    if g1 is not None:
        first = wedge(_embed(g1, 0, N), form_power(w2, n2)) * a
        variant.append("Gamma1^omega2^n2")
    elif c1.is_closed(omega1):
        top2 = potential(c2, form_power(omega2, n2))
        if top2 is not None:
            first = wedge(form_power(w1, n1 - 1), _embed(top2, n1, N)) * a
            variant.append("omega1^(n1-1)^Gamma2top")
    # term omega1^{n1} omega2^{n2-1}
    if g2 is not None:
        second = wedge(form_power(w1, n1), _embed(g2, n1, N)) * b
        variant.append("omega1^n1^Gamma2")
    elif c2.is_closed(omega2):
        top1 = potential(c1, form_power(omega1, n1))
        if top1 is not None:
            second = wedge(_embed(top1, 0, N), form_power(w2, n2 - 1)) * b
            variant.append("Gamma1top^omega2^(n2-1)")
    details = {"variant": variant, "binomials": [a, b]}
    if first is None or second is None:
        direct, ranks = _solve_d(prod, target)
        details.update(direct_solve_feasible=direct is not None,
                       rank_d=ranks[0], rank_augmented=ranks[1])
        missing = "omega1^(n1-1) omega2^n2" if first is None else "omega1^n1 omega2^(n2-1)"
        return NotCertified("degenerate-balanced-witness",
                            f"no binomial potential for the term {missing}", details)
    gamma = first + second
    residual = prod.d(gamma) - target
    return ConeCertificate("degenerate-balanced-witness", prod.algebra,
                           {"omega": omega, "Gamma": gamma}, residual, details)


# ---------------------------------------------------------------------------
# cohomology

@dataclass(frozen=True)
class InvariantCohomology:
    """Dimensions of *invariant* Bott-Chern and Aeppli cohomology in bidegree (p, q)."""

    p: int
    q: int
    bc: int
    aeppli: int


def _rank_of_columns(columns, nrows):
    cols = [c for c in columns if any(c)]
    if not cols or nrows == 0:
        return 0
    return exact.rank(_transpose(cols, nrows), len(cols))


def cohomology_dims(cx, p, q):
    n = cx.n
    dim = len(cx.basis(p, q))
    # Bott-Chern: ker partial  cap ker dbar  /  im partial dbar
    stacked = [a + b for a, b in zip(cx.partial_matrix(p, q), cx.dbar_matrix(p, q))]
    rows = len(cx.basis(p + 1, q)) + len(cx.basis(p, q + 1))
    kernel_dim = dim - _rank_of_columns(stacked, rows)
    if p >= 1 and q >= 1:
        ddbar_in = [cx.coords(cx.partial(cx.dbar(cx.basis_form(p - 1, q - 1, i))), p, q)
                    for i in range(len(cx.basis(p - 1, q - 1)))]
        im_ddbar = _rank_of_columns(ddbar_in, dim)
    else:
        im_ddbar = 0
    bc = kernel_dim - im_ddbar
    # Aeppli: ker partial dbar  /  (im partial + im dbar)
    ddbar_out = [cx.coords(cx.partial(cx.dbar(cx.basis_form(p, q, i))), p + 1, q + 1)
                 for i in range(dim)]
    ker_ddbar = dim - _rank_of_columns(ddbar_out, len(cx.basis(p + 1, q + 1))) if n else dim
    image = []
    if p >= 1:
        image += cx.partial_matrix(p - 1, q)
    if q >= 1:
        image += cx.dbar_matrix(p, q - 1)
    aeppli = ker_ddbar - _rank_of_columns(image, dim)
    return InvariantCohomology(p, q, bc, aeppli)


@dataclass(frozen=True)
class AeppliClass:
    """An invariant Aeppli class, by coordinates in a fixed quotient basis."""

    p: int
    q: int
    coordinates: tuple
    representative: ExteriorForm = field(compare=False)

    def is_zero(self):
        return not any(self.coordinates)


def aeppli_class(cx, form, p, q):
    if not cx.partial(cx.dbar(form)).is_zero():
        raise ValueError("form is not partial-dbar-closed; it has no Aeppli class")
    w_rows, w_piv, q_rows, q_piv = cx._aeppli_data(p, q)
    r = exact.reduce_modulo(cx.coords(form, p, q), w_rows, w_piv)
    coords = tuple(r[k] for k in q_piv)
    return AeppliClass(p, q, coords, form)


def p_map(cx, alpha):
    """``{alpha}_DR -> {(alpha^{n-1})^{n-1,n-1}}_A`` for a closed invariant 2-form."""
    if alpha.degree not in (None, 2):
        raise ValueError("alpha must be a 2-form")
    if not cx.is_closed(alpha):
        raise ValueError("alpha is not d-closed")
    n = cx.n
    rep = bidegree_component(form_power(alpha, n - 1), n - 1, n - 1)
    return aeppli_class(cx, rep, n - 1, n - 1)


# ---------------------------------------------------------------------------
# Gauduchon-cone certificates

def _check_top_minus_one(cx, omega_big):
    n = cx.n
    if omega_big.bidegrees() not in ([(n - 1, n - 1)], []):
        raise ValueError(f"Omega must be an ({n - 1},{n - 1})-form")


def certify_gauduchon(cx, omega_big):
    """Certificate iff ``Omega`` is real, strictly positive and ``partial dbar``-closed."""
    _check_top_minus_one(cx, omega_big)
    if not _is_real(omega_big):
        return NotCertified("gauduchon-member", "Omega is not a real form")
    m = associated_matrix(omega_big)
    minors = exact.hermitian_minors(m)
    details = {"minors": minors}
    if not all(d > 0 for d in minors):
        return NotCertified("gauduchon-member", "associated Hermitian matrix is not positive definite", details)
    residual = cx.partial(cx.dbar(omega_big))
    if not residual.is_zero():
        return NotCertified("gauduchon-member", "partial dbar Omega is not zero", details)
    return ConeCertificate("gauduchon-member", cx.algebra, {"Omega": omega_big}, residual, details)


def certify_strongly_gauduchon(cx, omega_big):
    """Certificate iff ``Omega`` is positive and ``partial Omega = dbar X`` is solvable."""
    _check_top_minus_one(cx, omega_big)
    n = cx.n
    m = associated_matrix(omega_big)
    if not _is_real(omega_big) or not exact.is_positive_definite(m):
        return NotCertified("strongly-gauduchon", "Omega is not a real positive form")
    target = cx.partial(omega_big)
    columns = cx.dbar_matrix(n, n - 2)
    x, rank_a, rank_ab = exact.solve(columns, cx.coords(target, n, n - 1))
    details = {"rank_dbar": rank_a, "rank_augmented": rank_ab}
    if x is None:
        return NotCertified("strongly-gauduchon", "partial Omega is not dbar-exact", details)
    X = cx.from_coords(x, n, n - 2)
    residual = target - cx.dbar(X)
    return ConeCertificate("strongly-gauduchon", cx.algebra, {"Omega": omega_big, "X": X}, residual, details)


def hs_positivity_check(cx, omega_tilde):
    """Certificate that ``(omega_tilde^{n-1})^{n-1,n-1}`` is a positive Gauduchon form.

    ``omega_tilde`` is a closed real 2-form whose (1,1) part must be
    positive definite; the margin reported is the least eigenvalue of the
    associated matrix of ``(omega_tilde^{n-1})^{n-1,n-1}``.
    """
    if not cx.is_closed(omega_tilde):
        raise ValueError("omega_tilde is not d-closed")
    n = cx.n
    h = hermitian_of(bidegree_component(omega_tilde, 1, 1))
    if not _is_real(omega_tilde) or not exact.is_positive_definite(h):
        return NotCertified("hs-positive", "the (1,1) part of omega_tilde is not positive definite")
    omega_big = bidegree_component(form_power(omega_tilde, n - 1), n - 1, n - 1)
    m = associated_matrix(omega_big)
    margin = float(np.linalg.eigvalsh(_numeric(m))[0])
    gauduchon = certify_gauduchon(cx, omega_big)
    details = {"margin": margin, "gauduchon_certified": gauduchon.certified}
    if not gauduchon.certified:
        return NotCertified("hs-positive", gauduchon.reason, details)
    return ConeCertificate("hs-positive", cx.algebra, {"omega_tilde": omega_tilde, "Omega": omega_big},
                           gauduchon.residual, details)


def _dk_form(cx, alpha, u):
    n = cx.n
    base = bidegree_component(form_power(alpha, n - 1), n - 1, n - 1)
    return base + cx.partial(u) + cx.dbar(u.conj())


class DKFamily:
    """The affine family ``(alpha^{n-1})^{n-1,n-1} + partial u + dbar conj(u)``.

    ``u`` runs over invariant (n-2, n-1)-forms, parametrized by the real and
    imaginary parts of its coordinates; :meth:`matrix` is affine in the
    parameters, so :meth:`lambda_min` is concave.
    """

    def __init__(self, cx, alpha):
        self.cx = cx
        self.alpha = alpha
        n = cx.n
        self.basis = cx.basis(n - 2, n - 1)
        self.base = _numeric(associated_matrix(_dk_form(cx, alpha, ExteriorForm._raw(n, {}))))
        self.directions = []
        for key in self.basis:
            for unit in (ONE, I_UNIT):
                u = ExteriorForm._raw(n, {key: unit})
                omega_big = cx.partial(u) + cx.dbar(u.conj())
                self.directions.append(_numeric(associated_matrix(omega_big)) if omega_big.terms
                                       else np.zeros((n, n), complex))
        self.directions = np.array(self.directions).reshape(-1, n, n)

    @property
    def n_params(self):
        return len(self.directions)

    def matrix(self, params):
        params = np.asarray(params, float)
        if not self.n_params:
            return self.base
        return self.base + np.tensordot(params, self.directions, axes=1)

    def lambda_min(self, params):
        return float(np.linalg.eigvalsh(self.matrix(params))[0])

    def u_form(self, params, max_denominator=10**6):
        """The exact (rationalized) ``u`` for real parameters."""
        terms = {}
        for k, key in enumerate(self.basis):
            re = Fraction(float(params[2 * k])).limit_denominator(max_denominator)
            im = Fraction(float(params[2 * k + 1])).limit_denominator(max_denominator)
            if re or im:
                terms[key] = gq(re, im)
        return ExteriorForm._raw(self.cx.n, terms)


def dk_membership_search(cx, alpha, iterations=500, tol=1e-9):
    """Look for a strictly positive representative in the family of :class:`DKFamily`.

    Subgradient ascent on the concave function ``lambda_min``: step ``1/k``
    along the normalized subgradient ``(v* M_k v)_k`` of the least
    eigenvector ``v``.  The search stops once ``lambda_min > tol``, when the
    subgradient norm drops below ``tol`` or after ``iterations`` steps.  A
    positive optimum is rationalized and re-checked exactly; the certificate
    records whether that exact check succeeded.
    """
    if not cx.is_closed(alpha):
        raise ValueError("alpha is not d-closed")
    fam = DKFamily(cx, alpha)
    params = np.zeros(fam.n_params)
    best_params, best = params.copy(), fam.lambda_min(params)
    steps = 0
    for k in range(1, iterations + 1):
        if best > tol or not fam.n_params:
            break
        w, v = np.linalg.eigh(fam.matrix(params))
        vec = v[:, 0]
        grad = np.real(np.einsum("i,kij,j->k", vec.conj(), fam.directions, vec))
        norm = float(np.linalg.norm(grad))
        if norm < tol:
            break
        params = params + grad / (norm * k)
        steps = k
        lam = fam.lambda_min(params)
        if lam > best:
            best, best_params = lam, params.copy()
    details = {"lambda_min": best, "iterations": steps, "n_params": fam.n_params}
    if best <= tol:
        return NotCertified("dk-member", "no positive representative found", details)
    u = fam.u_form(best_params)
    omega_big = _dk_form(cx, alpha, u)
    exact_ok = exact.is_positive_definite(associated_matrix(omega_big))
    details["exact"] = exact_ok
    residual = ExteriorForm._raw(cx.n, {}) if exact_ok else \
        float(np.linalg.eigvalsh(_numeric(associated_matrix(omega_big)))[0])
    return ConeCertificate("dk-member", cx.algebra, {"alpha": alpha, "u": u, "Omega": omega_big},
                           residual, details)
