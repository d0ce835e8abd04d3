"""Exact linear algebra over the Gaussian rationals ``Q(i)``.

Thin helpers around :class:`sympy.polys.matrices.DomainMatrix` over
``QQ_I``; everything here is exact, so ranks and kernels never depend on a
floating-point threshold.
"""

from __future__ import annotations

from fractions import Fraction

from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

__all__ = [
    "QQ_I",
    "gq",
    "parse_gq",
    "gq_to_complex",
    "gq_to_strings",
    "matrix",
    "rank",
    "solve",
    "nullspace",
    "row_reduce",
    "reduce_modulo",
    "hermitian_minors",
    "is_positive_definite",
]

ZERO = QQ_I.zero
ONE = QQ_I.one


def gq(re, im=0):
    """A Gaussian rational from rational (or integer / fraction string) parts."""
    re, im = Fraction(re), Fraction(im)
    return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))


def parse_gq(re, im=0):
    """Parse JSON-style parts (int, ``"p/q"`` string, or float) exactly.

    Floats go through :class:`fractions.Fraction` of their decimal
    representation, so ``0.5`` becomes ``1/2`` rather than a binary
    approximation.
    """
    def part(v):
        if isinstance(v, float):
            return Fraction(repr(v))
        return Fraction(v)
    return gq(part(re), part(im))


def gq_to_complex(c):
    return complex(float(c.x), float(c.y))


def gq_to_strings(c):
    """``(re, im)`` as exact fraction strings."""
    return str(Fraction(int(c.x.numerator), int(c.x.denominator))), \
        str(Fraction(int(c.y.numerator), int(c.y.denominator)))


def matrix(rows, ncols=None):
    """A ``DomainMatrix`` over ``QQ_I`` from a list of rows."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ_I)


def _columns_to_matrix(columns, nrows):
    rows = [[col[r] for col in columns] for r in range(nrows)]
    return matrix(rows, len(columns))


def rank(rows, ncols=None):
    if not rows:
        return 0
    m = matrix(rows, ncols)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return 0
    return m.rank()


def solve(columns, target):
    """Solve ``sum_k x_k columns[k] = target`` exactly.

    Returns ``(x, rank_A, rank_Ab)``; ``x`` is ``None`` when the system is
    inconsistent, in which case ``rank_Ab = rank_A + 1`` is the rank
    certificate.  Free variables are set to zero.
    """
    nrows = len(target)
    ncols = len(columns)
    if nrows == 0:
        return [ZERO] * ncols, 0, 0
    aug = _columns_to_matrix(list(columns) + [list(target)], nrows)
    reduced, pivots = aug.rref()
    rank_ab = len(pivots)
    rank_a = rank_ab - (1 if pivots and pivots[-1] == ncols else 0)
    if rank_a != rank_ab:
        return None, rank_a, rank_ab
    rows = reduced.to_list()
    x = [ZERO] * ncols
    for r, p in enumerate(pivots):
        x[p] = rows[r][ncols]
    return x, rank_a, rank_ab


def nullspace(rows, ncols):
    """A basis (list of vectors) of ``{x : rows @ x = 0}``."""
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    ns = matrix(rows, ncols).nullspace()
    return [list(r) for r in ns.to_list()]


def row_reduce(vectors, ncols):
    """Reduced row echelon basis of the span of ``vectors`` and its pivots."""
    if not vectors:
        return [], []
    reduced, pivots = matrix(vectors, ncols).rref()
    rows = reduced.to_list()[:len(pivots)]
    return rows, list(pivots)


def reduce_modulo(v, basis_rows, pivots):
    """Canonical remainder of ``v`` modulo a subspace given in RREF."""
    out = list(v)
    for row, p in zip(basis_rows, pivots):
        c = out[p]
        if c:
            out = [a - c * b for a, b in zip(out, row)]
    return out


def hermitian_minors(m):
    """Leading principal minors of a Hermitian ``QQ_I`` matrix (as Fractions)."""
    n = len(m)
    for j in range(n):
        for k in range(j, n):
            c = m[k][j]
            if m[j][k] != QQ_I(c.x, -c.y):
                raise ValueError(f"matrix is not Hermitian at entry ({j}, {k})")
    minors = []
    for k in range(1, n + 1):
        det = matrix([row[:k] for row in m[:k]], k).det()
        minors.append(Fraction(int(det.x.numerator), int(det.x.denominator)))
    return minors


def is_positive_definite(m):
    """Sylvester's criterion, exactly."""
    return all(d > 0 for d in hermitian_minors(m))
