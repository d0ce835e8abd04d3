"""Quadrature rules for balls, shells and spheres in R^d.

Gauss-Legendre products run in hyperspherical coordinates
``x1 = cos t1, x2 = sin t1 cos t2, ..., x_d = sin t1 ... sin t_{d-2} sin phi``
with polar angles in ``[0, pi]`` and the azimuth in ``[0, 2 pi)``.  The
Monte-Carlo fallback draws from a seeded ``numpy`` generator; all sums are
taken chunk-wise with ``np.sum`` (pairwise) and then reduced in a fixed
order, so results are bit-reproducible for a given spec.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MIN_MC_SAMPLES",
    "QuadratureSpec",
    "sphere_area",
    "ball_volume",
    "sphere_rule",
    "sphere_sample_count",
    "shell_rule",
    "integrate",
    "integrate_mc",
]

CHUNK = 65536
MIN_MC_SAMPLES = 10_000


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over balls and spheres.

    ``radial_order`` is the number of Gauss-Legendre nodes across a whole
    ball ``[0, t]``; profiles split it over their shells in proportion to
    the shell widths (never fewer than 4 per shell).  ``polar_order`` (the
    first polar angle, which is where the SL(2,C) integrand concentrates)
    defaults to ``radial_order``; ``angular_order`` covers the remaining
    angles.
    """

    method: str = "gauss-legendre-product"
    radial_order: int = 24
    angular_order: int = 16
    polar_order: int | None = None
    sample_count: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("gauss-legendre-product", "monte-carlo"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.method == "gauss-legendre-product":
            orders = (self.radial_order, self.angular_order, self.polar_order or self.radial_order)
            if min(orders) < 4:
                raise ValueError("Gauss-Legendre orders must be >= 4")
        elif self.sample_count < MIN_MC_SAMPLES:
            raise ValueError("Monte-Carlo sample_count must be >= 1e4")

    @property
    def polar(self):
        return self.polar_order or self.radial_order

    def coarsened(self):
        """A cheaper rule of the same kind, for convergence checks."""
        if self.method == "monte-carlo":
            return QuadratureSpec("monte-carlo", sample_count=max(MIN_MC_SAMPLES, self.sample_count // 4), seed=self.seed + 1)
        shrink = lambda k: max(4, (3 * k) // 4)
        return QuadratureSpec(self.method, shrink(self.radial_order), shrink(self.angular_order),
                              shrink(self.polar), self.sample_count, self.seed)

    def as_dict(self):
        d = asdict(self)
        d["polar_order"] = self.polar
        return d


def sphere_area(d):
    """Area of the unit sphere S^{d-1} in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_volume(d):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _gl(order, a, b):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


@lru_cache(maxsize=32)
def _gl_sphere(d, polar_order, angular_order):
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    axes = []
    n_polar = d - 2
    for k in range(n_polar):
        order = polar_order if k == 0 else angular_order
        th, w = _gl(order, 0.0, math.pi)
        axes.append((th, w * np.sin(th) ** (d - 2 - k)))
    phi, wphi = _gl(max(angular_order, 4), 0.0, 2.0 * math.pi)
    axes.append((phi, wphi))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    weights = np.ones_like(grids[0])
    for k, (_, w) in enumerate(axes):
        shape = [1] * len(axes)
        shape[k] = -1
        weights = weights * w.reshape(shape)
    angles = [g.ravel() for g in grids]
    x = np.empty((angles[0].size, d))
    sin_prod = np.ones(angles[0].size)
    for k in range(n_polar):
        x[:, k] = sin_prod * np.cos(angles[k])
        sin_prod = sin_prod * np.sin(angles[k])
    x[:, d - 2] = sin_prod * np.cos(angles[-1])
    x[:, d - 1] = sin_prod * np.sin(angles[-1])
    return x, weights.ravel()


@lru_cache(maxsize=8)
def _mc_unit(d, count, seed, kind):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    if kind == "ball":
        x *= rng.random(count)[:, None] ** (1.0 / d)
    x.setflags(write=False)
    return x


def sphere_sample_count(spec):
    return max(MIN_MC_SAMPLES, spec.sample_count // 20)


def sphere_rule(d, t, spec):
    """Nodes and weights for integrating over the sphere of radius ``t``.

    Weights include the area element, so ``weights.sum()`` is the area.
    Monte-Carlo sphere rules use ``sphere_sample_count(spec)`` points: a
    profile evaluates hundreds of spheres, each one dimension lower than
    the balls.
    """
    if spec.method == "monte-carlo":
        x = _mc_unit(d, sphere_sample_count(spec), spec.seed, "sphere")
        return t * x, np.full(len(x), sphere_area(d) * t ** (d - 1) / len(x))
    x, w = _gl_sphere(d, spec.polar, spec.angular_order)
    return t * x, w * t ** (d - 1)


def shell_rule(d, a, b, spec, radial_nodes=None):
    """Nodes and weights for the shell ``a <= |x| < b`` (``a = 0``: the ball).

    ``radial_nodes`` overrides ``spec.radial_order`` for Gauss-Legendre.
    """
    if spec.method == "monte-carlo":
        # one fixed unit-ball sample; radii mapped so the shell is uniformly covered
        u = _mc_unit(d, spec.sample_count, spec.seed, "ball")
        r = np.linalg.norm(u, axis=1)
        radius = (a ** d + (b ** d - a ** d) * r ** d) ** (1.0 / d)
        scale = np.divide(radius, r, out=np.zeros_like(r), where=r > 0)
        vol = ball_volume(d) * (b ** d - a ** d)
        return u * scale[:, None], np.full(len(u), vol / len(u))
    rho, wr = _gl(radial_nodes or spec.radial_order, a, b)
    x, w = _gl_sphere(d, spec.polar, spec.angular_order)
    pts = (rho[:, None, None] * x[None, :, :]).reshape(-1, d)
    weights = ((wr * rho ** (d - 1))[:, None] * w[None, :]).ravel()
    return pts, weights


def integrate(fn, points, weights, chunk=CHUNK):
    """``sum(weights * fn(points))`` with a fixed, deterministic reduction order.

    ``fn`` may return a tuple of arrays; a tuple of sums is returned then.
    """
    partial = []
    for start in range(0, len(points), chunk):
        values = fn(points[start:start + chunk])
        w = weights[start:start + chunk]
        if isinstance(values, tuple):
            partial.append([np.sum(w * v) for v in values])
        else:
            partial.append([np.sum(w * values)])
    totals = np.sum(np.array(partial), axis=0)
    return tuple(float(v) for v in totals) if len(totals) > 1 else float(totals[0])


def integrate_mc(fn, points, weights, chunk=CHUNK):
    """Like :func:`integrate` for an equal-weight sample, with standard errors.

    Returns ``(sums, stderrs)`` as tuples, one entry per array ``fn``
    returns.  The error of ``sum(w * f)`` is ``w * sqrt(n * var(f))``.
    """
    n = len(points)
    w = float(weights[0])
    first, second = [], []
    for start in range(0, n, chunk):
        values = fn(points[start:start + chunk])
        values = values if isinstance(values, tuple) else (values,)
        first.append([np.sum(v) for v in values])
        second.append([np.sum(v * v) for v in values])
    s1 = np.sum(np.array(first), axis=0)
    s2 = np.sum(np.array(second), axis=0)
    var = np.maximum(s2 / n - (s1 / n) ** 2, 0.0) * n / max(n - 1, 1)
    return tuple(float(w * v) for v in s1), tuple(float(w * math.sqrt(n * v)) for v in var)
