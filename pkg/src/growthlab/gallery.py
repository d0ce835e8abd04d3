"""Holomorphic maps C^m -> X through their pullback metrics.

Every gallery model carries a closed-form evaluator for the matrix of
``f^* omega`` together with its holomorphic derivatives (which give
``d(f^* omega_{m-1})``).  Each model also ships the map itself plus an
ambient left-invariant coframe, so the closed form can be re-derived by
the numeric-Jacobian path; for SL(2,C) a third, Maurer-Cartan path is
available.

Points are arrays of shape ``(..., m)``; every evaluator is vectorised over
the leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .forms import ExteriorForm, HermitianForm, power_over_factorial, wedge

__all__ = [
    "PullbackModel",
    "HolomorphicMapSpec",
    "PSDReport",
    "GALLERY",
    "gallery",
    "numeric_jacobian",
    "pullback_metric",
    "coframe_metric",
    "cauchy_riemann_residual",
    "maurer_cartan_pullback",
    "sl2c_frame_coordinates",
    "psd_probe",
    "model_from_map",
]


@dataclass(frozen=True)
class HolomorphicMapSpec:
    """A holomorphic map given by an evaluator into a coordinate chart.

    ``evaluate`` sends ``(..., m)`` points to ``(..., n)`` ambient
    coordinates (matrix groups are flattened row-major).  ``derivative``, if
    given, returns the ``(..., m, n)`` complex Jacobian ``df_a / dz_j``.
    """

    domain_dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    mode: str = "analytic"

    def __post_init__(self):
        if self.mode not in ("analytic", "finite-difference"):
            raise ValueError(f"unknown derivative mode {self.mode!r}")
        if self.mode == "analytic" and self.derivative is None:
            raise ValueError("analytic mode needs a derivative")


@dataclass(frozen=True)
class PullbackModel:
    """A gallery entry: ``f: C^m -> X`` seen through ``f^* omega``.

    ``metric_at(z)`` returns the batched Hermitian matrix of ``f^* omega``;
    ``dmetric_at(z)``, when present, returns ``dh[..., l, j, k] =
    d h[j, k] / d z_l`` (the anti-holomorphic derivatives follow by
    Hermitian symmetry).  ``closed`` declares ``d(f^* omega) = 0``.
    """

    name: str
    domain_dim: int
    ambient_dim: int
    metric_fn: Callable[[np.ndarray], np.ndarray]
    dmetric_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    closed: bool = False
    pd_everywhere: bool = False
    reference_notes: str = ""
    holomorphic_map: Optional[HolomorphicMapSpec] = None
    ambient_metric: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    scale: float = 1.0

    def __post_init__(self):
        if self.dmetric_fn is None and not self.closed:
            # d(f^* omega_{m-1}) must be computable or declared zero
            if self.domain_dim > 1:
                raise ValueError(f"model {self.name!r}: give dmetric_fn or declare the metric closed")

    def _points(self, z):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.domain_dim:
            raise ValueError(f"expected points with last axis {self.domain_dim}, got {z.shape}")
        return z

    def metric_matrix(self, z):
        return self.scale * self.metric_fn(self._points(z))

    def metric_at(self, z):
        # gallery matrices are Hermitian by construction and, when flagged,
        # positive definite everywhere (checked by the test suite)
        flag = "positive-definite" if self.pd_everywhere else "unknown"
        return HermitianForm.trusted(self.metric_matrix(z), flag)

    @property
    def has_derivative(self):
        return self.closed or self.dmetric_fn is not None

    def d_metric_form(self, z):
        """``d(f^* omega)`` as a batched 3-form."""
        z = self._points(z)
        m = self.domain_dim
        if self.dmetric_fn is None:
            return ExteriorForm(m)
        dh = self.scale * self.dmetric_fn(z)
        form = ExteriorForm(m)
        for l in range(m):
            for j in range(m):
                for k in range(m):
                    # d h_jk = sum_l dh[l,j,k] dz_l + conj(dh[l,k,j]) dzbar_l
                    hol = 1j * dh[..., l, j, k]
                    ant = 1j * np.conj(dh[..., l, k, j])
                    # dzbar_l ^ dz_j ^ dzbar_k = -dz_j ^ dzbar_l ^ dzbar_k
                    form = form + ExteriorForm(m, {((l, j), (k,)): hol, ((j,), (l, k)): -ant})
        return form

    def d_lower_power_at(self, z):
        """``d(f^* omega_{m-1}) = f^* omega_{m-2} ^ d(f^* omega)``."""
        m = self.domain_dim
        if self.closed or m == 1:
            return ExteriorForm(m)
        if self.dmetric_fn is None:
            raise ValueError(f"model {self.name!r} has no derivative evaluator")
        lower = power_over_factorial(self.metric_at(z).as_form(), m - 2)
        return wedge(lower, self.d_metric_form(z))

    def rescaled(self, factor):
        """Same map, ambient metric multiplied by a positive constant."""
        return PullbackModel(
            name=self.name, domain_dim=self.domain_dim, ambient_dim=self.ambient_dim,
            metric_fn=self.metric_fn, dmetric_fn=self.dmetric_fn, closed=self.closed,
            pd_everywhere=self.pd_everywhere, reference_notes=self.reference_notes,
            holomorphic_map=self.holomorphic_map, ambient_metric=self.ambient_metric,
            scale=self.scale * factor,
        )


# ---------------------------------------------------------------------------
# generic pullback machinery

def numeric_jacobian(f, z, step=None):
    """Complex Jacobian ``J[..., j, a] = d f_a / d z_j`` of a holomorphic map.

    Analytic mode returns ``f.derivative(z)``.  Finite-difference mode uses
    fourth-order central differences in every real direction with step
    ``1e-5 * (1 + |z|)`` and combines them as ``(d/dx - i d/dy) / 2``.
    """
    z = np.asarray(z, dtype=complex)
    if f.mode == "analytic":
        return np.asarray(f.derivative(z), dtype=complex)
    return _fd_wirtinger(f.evaluate, z, step)[0]


def _fd_wirtinger(fn, z, step=None):
    m = z.shape[-1]
    if step is None:
        step = 1e-5 * (1.0 + np.linalg.norm(z, axis=-1))
    h = np.asarray(step, dtype=float)[..., None]
    dz_rows, dzb_rows = [], []
    for j in range(m):
        e = np.zeros(m, dtype=complex)
        e[j] = 1.0
        partials = []
        for direction in (e, 1j * e):
            shift = h * direction
            f1p, f1m = fn(z + shift), fn(z - shift)
            f2p, f2m = fn(z + 2 * shift), fn(z - 2 * shift)
            partials.append((8 * (f1p - f1m) - (f2p - f2m)) / (12 * h))
        dx, dy = partials
        dz_rows.append(0.5 * (dx - 1j * dy))
        dzb_rows.append(0.5 * (dx + 1j * dy))
    return np.stack(dz_rows, axis=-2), np.stack(dzb_rows, axis=-2)


def cauchy_riemann_residual(f, z):
    """Max ``|d f / d zbar|`` by finite differences (0 for holomorphic maps)."""
    _, dzb = _fd_wirtinger(f.evaluate, np.asarray(z, dtype=complex))
    return float(np.max(np.abs(dzb)))


def pullback_metric(J, omega_at_fz):
    """``(f^* omega)[j, k] = sum_ab omega[a, b] J[j, a] conj(J[k, b])``."""
    J = np.asarray(J, dtype=complex)
    w = omega_at_fz.matrix if isinstance(omega_at_fz, HermitianForm) else np.asarray(omega_at_fz, dtype=complex)
    if J.shape[-1] != w.shape[-1]:
        raise ValueError(f"Jacobian has {J.shape[-1]} ambient columns, metric is {w.shape[-1]}-dimensional")
    h = np.einsum("...ja,...ab,...kb->...jk", J, w, np.conj(J))
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    return HermitianForm(h)


def coframe_metric(E):
    """Metric ``i sum_c theta^c ^ conj(theta^c)`` for ``theta^c = sum_a E[c, a] dw_a``."""
    E = np.asarray(E, dtype=complex)
    return np.einsum("...ca,...cb->...ab", E, np.conj(E))


# ---------------------------------------------------------------------------
# SL(2,C): frame {A, B, C} of sl(2,C) and the map f(z1, z2)

_A = 0.5j * np.array([[0, 1], [1, 0]], dtype=complex)
_B = 0.5 * np.array([[0, 1], [-1, 0]], dtype=complex)
_C = 0.5j * np.array([[1, 0], [0, -1]], dtype=complex)
_FRAME = np.stack([_A.ravel(), _B.ravel(), _C.ravel()], axis=1)  # 4 x 3
_FRAME_PINV = np.linalg.pinv(_FRAME)  # exact left inverse on sl(2,C)


def sl2c_frame_coordinates(M):
    """Coordinates of traceless ``(..., 2, 2)`` matrices in the basis {A, B, C}."""
    M = np.asarray(M, dtype=complex)
    flat = M.reshape(M.shape[:-2] + (4,))
    return np.einsum("ca,...a->...c", _FRAME_PINV, flat)


def _sl2c_map(z):
    z1, z2 = z[..., 0], z[..., 1]
    return np.stack([np.exp(z1), z2, np.zeros_like(z1), np.exp(-z1)], axis=-1)


def _sl2c_map_derivative(z):
    z1 = z[..., 0]
    zero = np.zeros_like(z1)
    row1 = np.stack([np.exp(z1), zero, zero, -np.exp(-z1)], axis=-1)
    row2 = np.stack([zero, np.ones_like(z1), zero, zero], axis=-1)
    return np.stack([row1, row2], axis=-2)


def _sl2c_ambient(w):
    """Left-invariant metric (i/2) sum xi^c ^ conj(xi^c) in matrix-entry coordinates."""
    g = w.reshape(w.shape[:-1] + (2, 2))
    ginv = np.linalg.inv(g)
    # V -> g^{-1} V -> frame coordinates: a linear map C^4 -> C^3
    eye = np.eye(4, dtype=complex).reshape(4, 2, 2)
    cols = [sl2c_frame_coordinates(ginv @ eye[a]) for a in range(4)]
    E = np.stack(cols, axis=-1) / np.sqrt(2.0)  # (..., 3, 4)
    return coframe_metric(E)


def maurer_cartan_pullback(z):
    """``f^* omega`` for the SL(2,C) model through ``g^{-1} dg``.

    ``g^{-1} dg/dz_j`` is expanded in {A, B, C}; with
    ``omega = (i/2) sum alpha^c ^ conj(alpha^c)`` the pullback matrix is
    ``h[j, k] = (1/2) sum_c c_j^c conj(c_k^c)``.
    """
    z = np.asarray(z, dtype=complex)
    z1, z2 = z[..., 0], z[..., 1]
    e, ei = np.exp(z1), np.exp(-z1)
    zero = np.zeros_like(z1)
    g = np.stack([np.stack([e, z2], -1), np.stack([zero, ei], -1)], -2)
    dg1 = np.stack([np.stack([e, zero], -1), np.stack([zero, -ei], -1)], -2)
    dg2 = np.stack([np.stack([zero, np.ones_like(z1)], -1), np.stack([zero, zero], -1)], -2)
    ginv = np.linalg.inv(g)
    coords = np.stack([sl2c_frame_coordinates(ginv @ dg1), sl2c_frame_coordinates(ginv @ dg2)], axis=-2)
    h = 0.5 * np.einsum("...jc,...kc->...jk", coords, np.conj(coords))
    return HermitianForm(h, "positive-definite")


def _sl2c_metric(z):
    z1, z2 = z[..., 0], z[..., 1]
    e = np.exp(-2.0 * z1.real)
    h = np.empty(z.shape[:-1] + (2, 2), dtype=complex)
    h[..., 0, 0] = np.abs(z2) ** 2 * e + 2.0
    h[..., 1, 1] = e
    h[..., 0, 1] = z2 * e
    h[..., 1, 0] = np.conj(z2) * e
    return h


def _sl2c_dmetric(z):
    z2 = z[..., 1]
    e = np.exp(-2.0 * z[..., 0].real)
    dh = np.zeros(z.shape[:-1] + (2, 2, 2), dtype=complex)
    # d/dz1 of exp(-(z1 + zbar1)) is -exp(-2 Re z1)
    dh[..., 0, 0, 0] = -np.abs(z2) ** 2 * e
    dh[..., 0, 1, 1] = -e
    dh[..., 0, 0, 1] = -z2 * e
    dh[..., 0, 1, 0] = -np.conj(z2) * e
    dh[..., 1, 0, 0] = np.conj(z2) * e
    dh[..., 1, 0, 1] = e
    return dh


# ---------------------------------------------------------------------------
# nilmanifold / solvmanifold / torus / projective models

def _torus_metric(m):
    def metric(z):
        return np.broadcast_to(0.5 * np.eye(m, dtype=complex), z.shape[:-1] + (m, m)).copy()
    return metric


def _iwasawa_metric(z):
    h = np.zeros(z.shape[:-1] + (2, 2), dtype=complex)
    h[..., 0, 0] = 1.0
    h[..., 1, 1] = 1.0 + np.abs(z[..., 0]) ** 2
    return h


def _iwasawa_dmetric(z):
    dh = np.zeros(z.shape[:-1] + (2, 2, 2), dtype=complex)
    dh[..., 0, 1, 1] = np.conj(z[..., 0])
    return dh


def _iwasawa_ambient(w):
    zero = np.zeros_like(w[..., 0])
    one = np.ones_like(zero)
    E = np.stack([np.stack([one, zero, zero], -1),
                  np.stack([zero, one, zero], -1),
                  np.stack([zero, -w[..., 0], one], -1)], -2)
    return coframe_metric(E)


def _nakamura_metric(z):
    return np.broadcast_to(np.eye(2, dtype=complex), z.shape[:-1] + (2, 2)).copy()


def _nakamura_ambient(w):
    zero = np.zeros_like(w[..., 0])
    one = np.ones_like(zero)
    E = np.stack([np.stack([one, zero, zero], -1),
                  np.stack([zero, np.exp(-w[..., 0]), zero], -1),
                  np.stack([zero, zero, np.exp(w[..., 0])], -1)], -2)
    return coframe_metric(E)


def _fs_matrix(w):
    """Fubini-Study i dd^c log(1 + |w|^2) on the affine chart C^k."""
    k = w.shape[-1]
    s = 1.0 + np.sum(np.abs(w) ** 2, axis=-1)
    eye = np.eye(k, dtype=complex)
    outer = np.einsum("...j,...k->...jk", np.conj(w), w)
    return (s[..., None, None] * eye - outer) / (s[..., None, None] ** 2)


def _embed(k_out, positions):
    def f(z):
        out = np.zeros(z.shape[:-1] + (k_out,), dtype=complex)
        for j, p in enumerate(positions):
            out[..., p] = z[..., j]
        return out

    def df(z):
        J = np.zeros(z.shape[:-1] + (len(positions), k_out), dtype=complex)
        for j, p in enumerate(positions):
            J[..., j, p] = 1.0
        return J
    return f, df


def _build(name, n):
    if name == "torus":
        if n is None or n < 2:
            raise ValueError("torus needs n >= 2")
        m = n - 1
        f, df = _embed(n, range(m))
        return PullbackModel(
            "torus", m, n, _torus_metric(m), closed=True, pd_everywhere=True,
            reference_notes="f = pi o j into C^n / Gamma with the flat metric beta: f^* omega = beta_0 (h = I/2)",
            holomorphic_map=HolomorphicMapSpec(m, f, df),
            ambient_metric=lambda w: 0.5 * np.broadcast_to(np.eye(n, dtype=complex), w.shape[:-1] + (n, n)),
        )
    if name == "iwasawa":
        if n not in (None, 3):
            raise ValueError("iwasawa model is 3-dimensional")
        f, df = _embed(3, (0, 1))
        return PullbackModel(
            "iwasawa", 2, 3, _iwasawa_metric, _iwasawa_dmetric, pd_everywhere=True,
            reference_notes="f(z1, z2) = (z1, z2, 0); f^* omega_0 = i dz1^dzb1 + (1 + |z1|^2) i dz2^dzb2",
            holomorphic_map=HolomorphicMapSpec(2, f, df), ambient_metric=_iwasawa_ambient,
        )
    if name == "nakamura":
        if n not in (None, 3):
            raise ValueError("nakamura model is 3-dimensional")
        f, df = _embed(3, (1, 2))
        return PullbackModel(
            "nakamura", 2, 3, _nakamura_metric, closed=True, pd_everywhere=True,
            reference_notes="f(z2, z3) = (0, z2, z3); f^* omega_0 = i dz2^dzb2 + i dz3^dzb3 (h = I)",
            holomorphic_map=HolomorphicMapSpec(2, f, df), ambient_metric=_nakamura_ambient,
        )
    if name == "sl2c":
        if n not in (None, 3):
            raise ValueError("sl2c model is 3-dimensional")
        return PullbackModel(
            "sl2c", 2, 3, _sl2c_metric, _sl2c_dmetric, pd_everywhere=True,
            reference_notes="f(z1, z2) = [[e^z1, z2], [0, e^-z1]] into SL(2,C), omega = (i/2) sum xi ^ conj(xi)",
            holomorphic_map=HolomorphicMapSpec(2, _sl2c_map, _sl2c_map_derivative), ambient_metric=_sl2c_ambient,
        )
    if name == "fubini_study":
        if n is None or n < 2:
            raise ValueError("fubini_study needs n >= 2")
        m = n - 1
        f, df = _embed(n, range(m))
        return PullbackModel(
            "fubini_study", m, n, _fs_matrix, closed=True, pd_everywhere=True,
            reference_notes="j: z -> [1 : z : 0] into P^n; j^* omega_FS = i dd^c log(1 + |z|^2) on C^{n-1}",
            holomorphic_map=HolomorphicMapSpec(m, f, df), ambient_metric=_fs_matrix,
        )
    raise KeyError(f"unknown model {name!r}; choose from {sorted(GALLERY)}")


GALLERY = ("torus", "iwasawa", "nakamura", "sl2c", "fubini_study")
_DEFAULT_N = {"torus": 3, "iwasawa": 3, "nakamura": 3, "sl2c": 3, "fubini_study": 3}


def gallery(name, n=None):
    """Return the gallery model ``name`` (``n`` is the target dimension)."""
    if name not in GALLERY:
        raise KeyError(f"unknown model {name!r}; choose from {list(GALLERY)}")
    return _build(name, _DEFAULT_N[name] if n is None else int(n))


def model_from_map(name, f, ambient_metric, closed=False, dmetric_fn=None):
    """A model whose metric is computed through the Jacobian of ``f``.

    Useful for maps outside the gallery, including degenerate ones; the
    result is not flagged positive-definite.
    """
    def metric(z):
        return pullback_metric(numeric_jacobian(f, z), ambient_metric(f.evaluate(z))).matrix
    probe = f.evaluate(np.zeros((1, f.domain_dim), dtype=complex))
    return PullbackModel(name, f.domain_dim, probe.shape[-1], metric, dmetric_fn,
                         closed=closed, holomorphic_map=f, ambient_metric=ambient_metric)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PSDReport:
    model: str
    sample_count: int
    radius: float
    seed: int
    min_eigenvalue: float
    mean_min_eigenvalue: float
    degenerate_fraction: float
    violations: int

    @property
    def ok(self):
        return self.violations == 0


def psd_probe(model, sample_count, radius, seed, tol=1e-10):
    """Eigenvalue statistics of ``f^* omega`` at random points of a ball.

    ``violations`` counts samples with an eigenvalue below ``-tol`` (a model
    bug); ``degenerate_fraction`` counts samples that are PSD but not PD.
    """
    if sample_count <= 0:
        raise ValueError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    d = 2 * model.domain_dim
    x = rng.standard_normal((sample_count, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    x *= radius * rng.random(sample_count)[:, None] ** (1.0 / d)
    z = x[:, 0::2] + 1j * x[:, 1::2]
    lam = np.linalg.eigvalsh(model.metric_matrix(z))[:, 0]
    return PSDReport(
        model=model.name, sample_count=sample_count, radius=float(radius), seed=int(seed),
        min_eigenvalue=float(lam.min()), mean_min_eigenvalue=float(lam.mean()),
        degenerate_fraction=float(np.mean(np.abs(lam) <= tol)),
        violations=int(np.sum(lam < -tol)),
    )
