"""Volume growth of balls and spheres under a degenerate pullback metric.

For a model ``f: C^m -> X`` the quantities are

* ``vol(t)``: the ``f^* omega``-volume of the Euclidean ball ``B_t``;
* ``sphere(t)``: the integral over ``S_t`` of ``|d tau| d sigma`` with
  ``tau = |z|^2``, computed either through Stokes as two ball integrals
  (:func:`sphere_integral_ball`) or directly on the sphere with the Hodge
  star (:func:`sphere_integral_direct`);
* ``F(b)``: the integral of ``vol`` over ``[0, b]``.

The two growth conditions are existential / limsup statements; they are
decided here by tail regressions with fixed windows and thresholds, and the
raw series always travel with the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .forms import (
    ExteriorForm,
    covector_norm,
    hodge_star,
    power_over_factorial,
    top_density,
    trace_lambda,
    wedge,
)
from .quadrature import (
    MIN_MC_SAMPLES, QuadratureSpec, integrate, integrate_mc, shell_rule, sphere_rule,
)

__all__ = [
    "GrowthProfile",
    "ConditionI",
    "ConditionII",
    "FiniteOrderFit",
    "HoelderReport",
    "default_quadrature",
    "vol_ball",
    "sphere_integral_ball",
    "sphere_integral_direct",
    "sphere_area_direct",
    "build_profile",
    "cumulative_F",
    "check_condition_i",
    "classify_condition_ii",
    "finite_order_fit",
    "hoelder_chain_check",
    "profile_violations",
    "verdict",
    "CLASSIFICATIONS",
    "VERDICTS",
]

CLASSIFICATIONS = ("subexponential", "exponential", "inconclusive")
VERDICTS = ("not-divisorially-hyperbolic", "not-certified")

# decision thresholds for the tail heuristics
CONDITION_I_MAX_SLOPE = 0.1
EXPONENTIAL_MIN_RATE = 0.2
SUBEXPONENTIAL_MAX_RATE = 0.05
TAIL_FRACTION = 0.6
FINITE_ORDER_MAX_RESIDUAL = 0.05
HOELDER_TOL = 1e-6


def default_quadrature(model):
    """Gauss-Legendre in spherical coordinates up to m = 2, Monte Carlo beyond."""
    if model.domain_dim <= 2:
        return QuadratureSpec()
    return QuadratureSpec("monte-carlo", sample_count=200_000, seed=0)


def _to_z(x):
    return x[..., 0::2] + 1j * x[..., 1::2]


def _dtau(z):
    m = z.shape[-1]
    terms = {}
    for j in range(m):
        terms[((j,), ())] = np.conj(z[..., j])
        terms[((), (j,))] = z[..., j]
    return ExteriorForm(m, terms)


def _i_dtaubar_minus_dtau(z):
    m = z.shape[-1]
    terms = {}
    for j in range(m):
        terms[((j,), ())] = -1j * np.conj(z[..., j])
        terms[((), (j,))] = 1j * z[..., j]
    return ExteriorForm(m, terms)


def _i_ddbar_tau(m):
    return ExteriorForm(m, {((j,), (j,)): 1j for j in range(m)})


def _vol_density(model, z):
    g = model.metric_at(z)
    return top_density(power_over_factorial(g.as_form(), model.domain_dim)).value


def _sphere_ball_density(model, z):
    """Integrand of the Stokes formula for the sphere integral."""
    m = model.domain_dim
    g = model.metric_at(z)
    gm = top_density(power_over_factorial(g.as_form(), m)).value
    lam = np.real(trace_lambda(_i_ddbar_tau(m), g))
    first = 2.0 * lam * gm
    if model.closed or m == 1:
        return first, gm
    second = top_density(wedge(_i_dtaubar_minus_dtau(z), model.d_lower_power_at(z))).value
    return first - second, gm


def _sphere_direct_density(model, z, t):
    """``|d tau| d sigma`` and ``d sigma`` on S_t, per unit Euclidean area."""
    g = model.metric_at(z)
    dtau = _dtau(z)
    flux = top_density(wedge(dtau, hodge_star(dtau, g))).value / (2.0 * t)
    norm = covector_norm(dtau, g)
    return flux, flux / norm


def _check_t(t):
    if not t > 0:
        raise ValueError(f"radius must be positive, got {t}")


def vol_ball(model, t, quad=None):
    """``Vol(B_t) = int_{B_t} f^* omega_m``."""
    _check_t(t)
    quad = quad or default_quadrature(model)
    pts, w = shell_rule(2 * model.domain_dim, 0.0, t, quad)
    return integrate(lambda x: _vol_density(model, _to_z(x)), pts, w)


def _require_derivative(model):
    if not model.has_derivative:
        raise ValueError(f"model {model.name!r} has a non-closed metric and no derivative evaluator")


def sphere_integral_ball(model, t, quad=None):
    """Sphere integral from the Stokes identity (two ball integrals)."""
    _check_t(t)
    _require_derivative(model)
    quad = quad or default_quadrature(model)
    pts, w = shell_rule(2 * model.domain_dim, 0.0, t, quad)
    return integrate(lambda x: _sphere_ball_density(model, _to_z(x))[0], pts, w)


def _require_pd(model):
    if not model.pd_everywhere:
        raise ValueError(f"model {model.name!r} is not flagged positive-definite; the direct sphere path needs it")


def sphere_integral_direct(model, t, quad=None):
    """Sphere integral by direct quadrature of ``*_{f^* omega} d tau`` on S_t."""
    _check_t(t)
    _require_pd(model)
    quad = quad or default_quadrature(model)
    pts, w = sphere_rule(2 * model.domain_dim, t, quad)
    return integrate(lambda x: _sphere_direct_density(model, _to_z(x), t)[0], pts, w)


def sphere_area_direct(model, t, quad=None):
    """``A(S_t)``: the ``f^* omega``-area of the sphere."""
    _check_t(t)
    _require_pd(model)
    quad = quad or default_quadrature(model)
    pts, w = sphere_rule(2 * model.domain_dim, t, quad)
    return integrate(lambda x: _sphere_direct_density(model, _to_z(x), t)[1], pts, w)


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthProfile:
    """Sampled growth series for one model on a radius grid."""

    model: str
    t: np.ndarray
    vol: np.ndarray
    sphere_ball: np.ndarray
    sphere_direct: Optional[np.ndarray] = None
    area: Optional[np.ndarray] = None
    F: Optional[np.ndarray] = None
    quadrature: Optional[QuadratureSpec] = None
    domain_dim: int = 2
    hoelder_rhs: Optional[np.ndarray] = None
    sphere_stderr: Optional[np.ndarray] = None

    @property
    def ratio_i(self):
        return self.sphere_ball / (self.t * self.vol)

    def rows(self):
        """CSV rows ``t, vol, sphere_ball, sphere_direct, ratio_i, F``."""
        direct = self.sphere_direct if self.sphere_direct is not None else [math.nan] * len(self.t)
        F = self.F if self.F is not None else [math.nan] * len(self.t)
        return [tuple(float(v) for v in row)
                for row in zip(self.t, self.vol, self.sphere_ball, direct, self.ratio_i, F)]


def _radial_nodes(radial_order, a, b, t_max):
    """Gauss-Legendre nodes for the shell ``[a, b]`` of a ball of radius ``t_max``.

    Shells get their share of ``radial_order`` by width, never fewer than
    4; the head shell ``[0, t_1]`` is often wide and holds all the
    curvature near the origin, so it gets at least half.
    """
    nodes = max(4, math.ceil(radial_order * (b - a) / t_max))
    if a == 0.0:
        nodes = max(nodes, radial_order // 2)
    return nodes


def _shell_sums(model, edges, quad):
    """Per-shell integrals of the Stokes-formula integrand and of ``f^* omega_m``.

    Gauss-Legendre: shells get radial nodes from :func:`_radial_nodes`.
    Monte Carlo: the sample budget is split evenly between shells
    (stratified by radius), so inner shells are not starved of points.
    """
    d = 2 * model.domain_dim
    density = lambda x: _sphere_ball_density(model, _to_z(x))
    if quad.method == "monte-carlo":
        count = max(MIN_MC_SAMPLES, quad.sample_count // (len(edges) - 1))
        sph, vol, err = [], [], []
        for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
            # independent draws per shell, so the shell errors do not add coherently
            per_shell = replace(quad, sample_count=count, seed=quad.seed * 100_003 + k)
            pts, w = shell_rule(d, a, b, per_shell)
            (s, v), (es, _) = integrate_mc(density, pts, w)
            sph.append(s)
            vol.append(v)
            err.append(es)
        return np.array(sph), np.array(vol), np.array(err)
    sph, vol = [], []
    t_max = edges[-1]
    for a, b in zip(edges[:-1], edges[1:]):
        pts, w = shell_rule(d, a, b, quad, radial_nodes=_radial_nodes(quad.radial_order, a, b, t_max))
        s, v = integrate(density, pts, w)
        sph.append(s)
        vol.append(v)
    return np.array(sph), np.array(vol), np.zeros(len(sph))


def build_profile(model, radii, quad=None, direct=None):
    """Profile ``model`` on an increasing grid of radii.

    Ball integrals are accumulated shell by shell between consecutive radii
    (see :func:`_shell_sums`), so ``vol`` is exactly nondecreasing whenever
    the integrand is nonnegative.  ``direct`` defaults to
    ``model.pd_everywhere``; with it come the area series and the
    right-hand side of the Hoelder chain, integrated in ``t`` from 0.

    For Gauss-Legendre the right-hand side reuses the radial nodes and the
    (positive) angular weights of the volume quadrature.  Cauchy-Schwarz
    then holds for the discrete sums as well, so the chain check measures
    the inequality rather than the quadrature error.  Monte Carlo uses 4
    Gauss-Legendre nodes in ``t`` per shell.
    """
    t = np.asarray(radii, dtype=float)
    if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0) or t[0] <= 0:
        raise ValueError("radii must be a positive, strictly increasing grid")
    _require_derivative(model)
    quad = quad or default_quadrature(model)
    direct = model.pd_everywhere if direct is None else direct
    d = 2 * model.domain_dim
    edges = np.concatenate([[0.0], t])
    sph_shell, vol_shell, err_shell = _shell_sums(model, edges, quad)
    vol = np.cumsum(vol_shell)
    sphere_ball = np.cumsum(sph_shell)
    sphere_direct = area = rhs = stderr = None
    if direct:
        _require_pd(model)

        def on_sphere(radius, with_error=False):
            pts, w = sphere_rule(d, radius, quad)
            fn = lambda x: _sphere_direct_density(model, _to_z(x), radius)
            if not with_error:
                return integrate(fn, pts, w)
            (flux, ar), (err, _) = integrate_mc(fn, pts, w)
            return flux, ar, err

        if quad.method == "monte-carlo":
            sphere_direct, area, direct_err = np.array([on_sphere(tk, True) for tk in t]).T
            stderr = np.sqrt(np.cumsum(err_shell ** 2) + direct_err ** 2)
        else:
            sphere_direct, area = np.array([on_sphere(tk) for tk in t]).T
        pieces = []
        for a, b in zip(edges[:-1], edges[1:]):
            nodes = 4 if quad.method == "monte-carlo" else _radial_nodes(quad.radial_order, a, b, edges[-1])
            x, wx = np.polynomial.legendre.leggauss(nodes)
            piece = 0.0
            for xi, wi in zip(x, wx):
                r = 0.5 * (b - a) * xi + 0.5 * (b + a)
                flux, ar = on_sphere(r)
                piece += 0.5 * (b - a) * wi * 2.0 * ar * ar / flux * r
            pieces.append(piece)
        rhs = np.cumsum(pieces)
    profile = GrowthProfile(model.name, t, vol, sphere_ball, sphere_direct, area,
                            quadrature=quad, domain_dim=model.domain_dim, hoelder_rhs=rhs,
                            sphere_stderr=stderr)
    return cumulative_F(profile)


def _power_law_head(t, y):
    """Integral of ``y`` over ``[0, t[0]]`` assuming ``y ~ c t^k`` there."""
    if y[0] <= 0:
        return 0.0
    k = math.log(y[1] / y[0]) / math.log(t[1] / t[0]) if y[1] > 0 else 0.0
    k = max(k, -0.99)
    return y[0] * t[0] / (k + 1.0)


def cumulative_F(profile):
    """``F(b) = int_0^b vol``: trapezoid on the grid, power-law head below ``t_1``."""
    t, vol = profile.t, profile.vol
    if np.any(np.diff(t) <= 0):
        raise ValueError("radius grid must be sorted and strictly increasing")
    F = np.empty_like(vol)
    F[0] = _power_law_head(t, vol)
    F[1:] = F[0] + np.cumsum(0.5 * (vol[1:] + vol[:-1]) * np.diff(t))
    return replace(profile, F=F)


def _slope(x, y):
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True)
class ConditionI:
    holds: bool
    C1: float
    r0: float
    trend_slope: float
    status: str  # "holds" or "not-certified"


def check_condition_i(profile, r0=1.0):
    """Bounded-ratio test for ``sphere(t) <= C1 t vol(t)`` beyond ``r0``."""
    mask = profile.t >= r0
    if mask.sum() < 8:
        raise ValueError(f"need >= 8 grid points with t >= r0={r0}, have {int(mask.sum())}")
    ratio = profile.ratio_i[mask]
    slope = _slope(np.log(profile.t[mask]), np.log(ratio))
    holds = slope <= CONDITION_I_MAX_SLOPE
    return ConditionI(bool(holds), float(ratio.max()), float(r0), slope,
                      "holds" if holds else "not-certified")


@dataclass(frozen=True)
class ConditionII:
    classification: str
    rate: float
    condition: str  # "holds", "fails" or "inconclusive"
    witness_C: Optional[float]
    window: tuple


def classify_condition_ii(profile):
    """Tail slope of ``log F(b)`` against ``b`` on ``[0.6 t_K, t_K]``."""
    if profile.F is None:
        raise ValueError("profile has no F series")
    t, F = profile.t, profile.F
    mask = t >= TAIL_FRACTION * t[-1]
    if mask.sum() < 6:
        raise ValueError(f"need >= 6 grid points in the tail window, have {int(mask.sum())}")
    b, logF = t[mask], np.log(F[mask])
    rate = _slope(b, logF)
    per_b = logF / b
    decreasing = bool(np.all(np.diff(per_b) < 0))
    if rate >= EXPONENTIAL_MIN_RATE:
        cls, cond = "exponential", "fails"
        # any C > 1/rate makes b/C - log F(b) -> -infinity
        witness = float(math.floor(1.0 / rate) + 1)
    elif rate < SUBEXPONENTIAL_MAX_RATE and decreasing:
        cls, cond, witness = "subexponential", "holds", None
    else:
        cls, cond, witness = "inconclusive", "inconclusive", None
    return ConditionII(cls, rate, cond, witness, (float(b[0]), float(b[-1])))


@dataclass(frozen=True)
class FiniteOrderFit:
    order: float
    residual: float
    finite: bool


def finite_order_fit(profile):
    """Least-squares exponent of ``vol ~ C t^order`` and its RMS log residual."""
    t, vol = profile.t, profile.vol
    if t[-1] / t[0] < 4:
        raise ValueError("finite-order fit needs t_K / t_1 >= 4")
    x, y = np.log(t), np.log(vol)
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return FiniteOrderFit(float(coef[0]), rms, rms <= FINITE_ORDER_MAX_RESIDUAL)


def _loglog_cumulative(t, y, nodes=8):
    """Cumulative integral of a positive ``y`` from ``t[0]``.

    ``log y`` is interpolated against ``log t`` by a not-a-knot cubic spline
    and ``exp`` of the spline is integrated with Gauss-Legendre on each
    interval.  Pure powers of ``t`` are reproduced exactly.
    """
    from scipy.interpolate import CubicSpline

    s = np.log(t)
    spline = CubicSpline(s, np.log(y)) if len(t) >= 4 else None
    x, w = np.polynomial.legendre.leggauss(nodes)
    out = np.zeros_like(y)
    for k in range(1, len(t)):
        lo, hi = s[k - 1], s[k]
        u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        if spline is None:
            logy = np.interp(u, s, np.log(y))
        else:
            logy = spline(u)
        # dt = t ds in logarithmic coordinates
        out[k] = out[k - 1] + 0.5 * (hi - lo) * np.sum(w * np.exp(logy + u))
    return out


@dataclass(frozen=True)
class HoelderReport:
    margins: np.ndarray  # (vol - rhs) / vol on the grid
    worst_margin: float
    tolerance: float
    holds: bool


def hoelder_tolerance(quad):
    """Relative slack: ``1e-6`` for Gauss-Legendre, ``5 / sqrt(N)`` for Monte Carlo."""
    if quad is not None and quad.method == "monte-carlo":
        return 5.0 / math.sqrt(quad.sample_count)
    return HOELDER_TOL


def hoelder_chain_check(profile, tol=None):
    """Check ``vol(r) >= 2 int_0^r A(S_t)^2 / sphere(t) t dt`` on the grid.

    Uses the series integrated by :func:`build_profile`; ``tol`` is the
    relative quadrature slack.  A profile without that series (built from
    grid values alone) falls back to a log-log spline of the integrand and
    compares increments from ``t_1`` only.
    """
    if profile.sphere_direct is None or profile.area is None:
        raise ValueError("Hoelder check needs the direct sphere and area series")
    t = profile.t
    if profile.hoelder_rhs is not None:
        rhs, lhs = profile.hoelder_rhs, profile.vol
    else:
        integrand = 2.0 * profile.area ** 2 / profile.sphere_direct * t
        rhs = _loglog_cumulative(t, integrand)
        lhs = profile.vol - profile.vol[0]
    tol = hoelder_tolerance(profile.quadrature) if tol is None else tol
    margins = (lhs - rhs) / profile.vol
    worst = float(margins.min())
    return HoelderReport(margins, worst, tol, worst >= -tol)


def profile_violations(profile, direct_tol=None):
    """Names of the profile invariants that fail (empty when all hold).

    ``direct_tol`` is the allowed relative gap between the two sphere
    integrals (1%).  Monte-Carlo profiles also allow five combined
    standard errors, whichever is larger.
    """
    direct_tol = 0.01 if direct_tol is None else direct_tol
    bad = []
    vol, F = profile.vol, profile.F
    if np.any(vol < 0):
        bad.append("vol nonnegative")
    if np.any(np.diff(vol) < -1e-3 * np.abs(vol[1:])):
        bad.append("vol nondecreasing")
    if F is not None:
        if np.any(np.diff(F) < 0):
            bad.append("F nondecreasing")
        if len(F) > 2 and np.any(np.diff(F, 2) < -1e-6 * np.abs(F[2:])):
            bad.append("F convex")
    if profile.sphere_direct is not None:
        gap = np.abs(profile.sphere_direct - profile.sphere_ball)
        allowed = direct_tol * np.abs(profile.sphere_ball)
        if profile.sphere_stderr is not None:
            allowed = np.maximum(allowed, 5.0 * profile.sphere_stderr)
        if np.any(gap > allowed):
            bad.append("sphere_direct agrees with sphere_ball")
    return bad


def verdict(condition_i, condition_ii):
    """Closed-enum verdict for one non-degenerate map.

    Subexponential growth of a single map that is non-degenerate somewhere
    rules out divisorial hyperbolicity; anything else certifies nothing.
    """
    if condition_i.holds and condition_ii.condition == "holds":
        return "not-divisorially-hyperbolic"
    return "not-certified"
