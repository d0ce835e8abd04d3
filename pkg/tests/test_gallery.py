import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.forms import HermitianForm, trace_lambda
from growthlab.gallery import (
    GALLERY,
    HolomorphicMapSpec,
    cauchy_riemann_residual,
    gallery,
    maurer_cartan_pullback,
    model_from_map,
    numeric_jacobian,
    psd_probe,
    pullback_metric,
)

_A = 0.5j * np.array([[0, 1], [1, 0]])
_B = 0.5 * np.array([[0, 1], [-1, 0]])
_C = 0.5j * np.array([[1, 0], [0, -1]])


def random_points(rng, count, m, radius):
    x = rng.standard_normal((count, 2 * m))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    x *= radius * rng.random(count)[:, None] ** (1.0 / (2 * m))
    return x[:, 0::2] + 1j * x[:, 1::2]


def fd_path(model, z):
    spec = HolomorphicMapSpec(model.domain_dim, model.holomorphic_map.evaluate, mode="finite-difference")
    J = numeric_jacobian(spec, z)
    return pullback_metric(J, model.ambient_metric(model.holomorphic_map.evaluate(z))).matrix


# --- closed forms ----------------------------------------------------------------

def test_sl2c_at_origin():
    assert np.allclose(gallery("sl2c").metric_at(np.zeros(2)).matrix, np.diag([2.0, 1.0]))


def test_iwasawa_grows_with_z1():
    h = gallery("iwasawa").metric_at(np.array([np.sqrt(3.0), 5.0])).matrix
    assert np.allclose(h, np.diag([1.0, 4.0]))


def test_fubini_study_at_origin_is_identity():
    assert np.allclose(gallery("fubini_study", 3).metric_at(np.zeros(2)).matrix, np.eye(2))


def test_torus_metric_is_half_identity():
    model = gallery("torus", 4)
    assert model.domain_dim == 3
    assert np.array_equal(model.metric_at(np.ones(3)).matrix, 0.5 * np.eye(3))


def test_unknown_model_and_bad_dimension():
    with pytest.raises(KeyError):
        gallery("klein")
    with pytest.raises(ValueError):
        gallery("torus", 1)
    with pytest.raises(ValueError):
        gallery("sl2c", 4)


def test_traces_of_i_ddbar_tau():
    ddbar = HermitianForm(np.eye(2)).as_form()
    fs = gallery("fubini_study", 3).metric_at(np.zeros(2))
    assert trace_lambda(ddbar, fs).real == pytest.approx(2.0)
    iw = gallery("iwasawa").metric_at(np.array([1.0, 0.0]))
    assert trace_lambda(ddbar, iw).real == pytest.approx(1.5)


@pytest.mark.parametrize("name", GALLERY)
def test_metrics_are_hermitian_exactly(name):
    model = gallery(name)
    z = random_points(np.random.default_rng(0), 50, model.domain_dim, 2.0)
    h = model.metric_matrix(z)
    assert np.array_equal(h, np.conj(np.swapaxes(h, -1, -2)))


# --- Jacobians and pullbacks ----------------------------------------------------------

def test_numeric_jacobian_of_identity():
    spec = HolomorphicMapSpec(3, lambda z: z, mode="finite-difference")
    z = np.array([0.3 + 0.1j, -1.0, 2.0j])
    assert np.allclose(numeric_jacobian(spec, z), np.eye(3), atol=1e-10)


def test_numeric_jacobian_of_polynomial_map():
    def f(z):
        return np.stack([z[..., 0] ** 2, z[..., 1], np.zeros_like(z[..., 0])], axis=-1)
    spec = HolomorphicMapSpec(2, f, mode="finite-difference")
    J = numeric_jacobian(spec, np.array([1.0 + 0j, 0.0]))
    assert np.allclose(J[0], [2, 0, 0], atol=1e-9)


def test_sl2c_pushforward_at_origin():
    model = gallery("sl2c")
    spec = HolomorphicMapSpec(2, model.holomorphic_map.evaluate, mode="finite-difference")
    J = numeric_jacobian(spec, np.zeros(2, dtype=complex))
    assert np.allclose(J[0], np.diag([1.0, -1.0]).ravel(), atol=1e-10)
    # in the frame: d/dz1 -> -2iC, d/dz2 -> -iA + B
    assert np.allclose(J[0].reshape(2, 2), -2j * _C)
    assert np.allclose(J[1].reshape(2, 2), -1j * _A + _B)


def test_pullback_by_identity_and_rank_one():
    w = HermitianForm(np.array([[2.0, 1j], [-1j, 3.0]]))
    assert np.allclose(pullback_metric(np.eye(2), w).matrix, w.matrix)
    J = np.array([[1.0, 2.0], [2.0, 4.0]])
    h = pullback_metric(J, w).matrix
    assert abs(np.linalg.det(h)) < 1e-10
    with pytest.raises(ValueError):
        pullback_metric(np.eye(3), w)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pullback_functoriality(seed):
    rng = np.random.default_rng(seed)
    J1 = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    J2 = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    w = HermitianForm(a @ a.conj().T)
    twice = pullback_metric(J2, pullback_metric(J1, w))
    once = pullback_metric(J2 @ J1, w)
    assert np.allclose(twice.matrix, once.matrix, atol=1e-10 * np.max(np.abs(once.matrix)))


def test_maurer_cartan_examples():
    assert np.allclose(maurer_cartan_pullback(np.zeros(2)).matrix, np.diag([2.0, 1.0]))
    h = maurer_cartan_pullback(np.array([0.0, 1.0])).matrix
    assert h[0, 1] == pytest.approx(1.0)


@pytest.mark.parametrize("name", GALLERY)
def test_numeric_jacobian_path_reproduces_closed_form(name):
    model = gallery(name)
    z = random_points(np.random.default_rng(1), 100, model.domain_dim, 2.0)
    assert np.max(np.abs(fd_path(model, z) - model.metric_matrix(z))) <= 1e-8


def test_sl2c_three_paths_agree():
    model = gallery("sl2c")
    z = random_points(np.random.default_rng(2), 100, 2, 2.0)
    closed = model.metric_matrix(z)
    mc = maurer_cartan_pullback(z).matrix
    fd = fd_path(model, z)
    for a, b in ((closed, mc), (closed, fd), (mc, fd)):
        assert np.max(np.abs(a - b)) <= 1e-8


@pytest.mark.parametrize("name", GALLERY)
def test_cauchy_riemann(name):
    model = gallery(name)
    z = random_points(np.random.default_rng(3), 20, model.domain_dim, 2.0)
    assert cauchy_riemann_residual(model.holomorphic_map, z) <= 1e-7


def test_cauchy_riemann_detects_antiholomorphic_map():
    spec = HolomorphicMapSpec(1, np.conj, mode="finite-difference")
    assert cauchy_riemann_residual(spec, np.array([0.5 + 0.5j])) > 0.5


def test_analytic_mode_needs_derivative():
    with pytest.raises(ValueError):
        HolomorphicMapSpec(1, lambda z: z)


# --- derivative data ------------------------------------------------------------------

def _fd_dmetric(model, z, step=1e-6):
    m = model.domain_dim
    out = []
    for l in range(m):
        e = np.zeros(m, complex)
        e[l] = step
        dx = (model.metric_matrix(z + e) - model.metric_matrix(z - e)) / (2 * step)
        dy = (model.metric_matrix(z + 1j * e) - model.metric_matrix(z - 1j * e)) / (2 * step)
        out.append(0.5 * (dx - 1j * dy))
    return np.stack(out, axis=-3)


@pytest.mark.parametrize("name", ["iwasawa", "sl2c"])
def test_analytic_metric_derivative(name):
    model = gallery(name)
    z = random_points(np.random.default_rng(4), 10, 2, 1.5)
    assert np.allclose(model.dmetric_fn(z), _fd_dmetric(model, z), atol=1e-6)


@pytest.mark.parametrize("name", ["torus", "nakamura", "fubini_study"])
def test_closed_models_have_zero_lower_power_derivative(name):
    model = gallery(name)
    assert model.d_lower_power_at(np.ones((3, model.domain_dim))).is_zero()


# --- PSD probe --------------------------------------------------------------------------

def test_psd_probe_values():
    assert psd_probe(gallery("torus"), 500, 3.0, 0).min_eigenvalue == pytest.approx(0.5)
    assert psd_probe(gallery("iwasawa"), 500, 3.0, 0).min_eigenvalue == pytest.approx(1.0)
    report = psd_probe(gallery("sl2c"), 500, 3.0, 0)
    assert report.ok and report.min_eigenvalue > 0


def test_psd_probe_sees_degenerate_map():
    # f(z1, z2) = (z1, z1^2, 0) is degenerate everywhere
    def f(z):
        return np.stack([z[..., 0], z[..., 0] ** 2, np.zeros_like(z[..., 0])], axis=-1)
    spec = HolomorphicMapSpec(2, f, mode="finite-difference")
    model = model_from_map("cusp", spec, lambda w: np.broadcast_to(np.eye(3), w.shape[:-1] + (3, 3)), closed=True)
    report = psd_probe(model, 200, 2.0, 1)
    assert report.ok and report.degenerate_fraction == 1.0
    with pytest.raises(ValueError):
        psd_probe(model, 0, 1.0, 0)


def test_rescaled_model_scales_the_metric():
    model = gallery("sl2c")
    z = np.array([0.3, -0.2j])
    assert np.allclose(model.rescaled(2.0).metric_matrix(z), 2.0 * model.metric_matrix(z))
