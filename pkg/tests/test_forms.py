import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.forms import (
    Density,
    ExteriorForm,
    HermitianForm,
    NotPositiveDefiniteError,
    bidegree_component,
    covector_norm,
    dz,
    dzbar,
    form_norm_sq,
    hodge_star,
    power_over_factorial,
    top_density,
    trace_lambda,
    wedge,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=3)


def random_metric(rng, m):
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return HermitianForm(0.5 * a @ a.conj().T + 0.2 * np.eye(m))


def random_form(rng, m, p, q, density=1.0):
    terms = {}
    for I in combinations(range(m), p):
        for J in combinations(range(m), q):
            if rng.random() <= density:
                terms[(I, J)] = complex(rng.normal(), rng.normal())
    return ExteriorForm(m, terms)


def random_degree_form(rng, m, k):
    out = ExteriorForm(m)
    for p in range(max(0, k - m), min(k, m) + 1):
        out = out + random_form(rng, m, p, k - p)
    return out


def euclid(m):
    return HermitianForm(0.5 * np.eye(m), "positive-definite")


# --- wedge -----------------------------------------------------------------

def test_wedge_of_a_covector_with_itself_vanishes():
    assert wedge(dz(2, 0), dz(2, 0)).is_zero()


def test_wedge_reorders_into_normal_form():
    a = wedge(dz(2, 0), dzbar(2, 0))
    b = wedge(dz(2, 1), dzbar(2, 1))
    # dz1 dzb1 dz2 dzb2 = - dz1 dz2 dzb1 dzb2
    assert wedge(a, b) == ExteriorForm(2, {((0, 1), (0, 1)): -1})


def test_wedge_sign_of_crossed_pairs():
    # dz1 dzb2 dz2 dzb1 -> -dz1 dz2 dzb2 dzb1 -> +dz1 dz2 dzb1 dzb2
    a = wedge(dz(2, 0), dzbar(2, 1))
    b = wedge(dz(2, 1), dzbar(2, 0))
    assert wedge(a, b) == ExteriorForm(2, {((0, 1), (0, 1)): 1})


def test_wedge_beyond_top_degree_is_zero():
    top = ExteriorForm(1, {((0,), (0,)): 1})
    assert wedge(top, dz(1, 0)).is_zero()


def test_wedge_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(dz(2, 0), dz(3, 0))


def test_mixed_degrees_are_rejected():
    with pytest.raises(ValueError):
        ExteriorForm(2, {((0,), ()): 1, ((0,), (1,)): 1})


@settings(max_examples=100, deadline=None)
@given(seeds, dims, st.integers(0, 3), st.integers(0, 3))
def test_graded_anticommutativity(seed, m, k, l):
    rng = np.random.default_rng(seed)
    a = random_degree_form(rng, m, min(k, 2 * m))
    b = random_degree_form(rng, m, min(l, 2 * m))
    ka, kb = a.degree or 0, b.degree or 0
    lhs, rhs = wedge(a, b), wedge(b, a) * (-1) ** (ka * kb)
    assert lhs.allclose(rhs, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_wedge_is_associative(seed, m):
    rng = np.random.default_rng(seed)
    a, b, c = (random_degree_form(rng, m, 1) for _ in range(3))
    assert wedge(wedge(a, b), c).allclose(wedge(a, wedge(b, c)), atol=1e-12)


# --- bidegrees and conjugation ------------------------------------------------

def test_bidegree_component_examples():
    a = ExteriorForm(2, {((0, 1), ()): 1, ((0,), (0,)): 1})
    assert bidegree_component(a, 1, 1) == ExteriorForm(2, {((0,), (0,)): 1})
    assert bidegree_component(a, 2, 0) == ExteriorForm(2, {((0, 1), ()): 1})
    assert bidegree_component(a, 0, 2).is_zero()


def test_square_of_mixed_form_against_brute_force():
    # alpha = sigma + omega with sigma of type (2,0) on C^3
    rng = np.random.default_rng(3)
    sigma = random_form(rng, 3, 2, 0)
    omega = random_form(rng, 3, 1, 1)
    alpha = sigma + omega
    square = wedge(alpha, alpha)
    # the (2,2) part only sees omega^2: sigma^2 is (4,0), sigma omega is (3,1)
    assert bidegree_component(square, 2, 2).allclose(wedge(omega, omega), atol=1e-12)
    brute = ExteriorForm(3)
    for x in (sigma, omega):
        for y in (sigma, omega):
            brute = brute + wedge(x, y)
    assert square.allclose(brute, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(seeds, dims, st.integers(0, 4))
def test_bidegree_partition_and_conjugation(seed, m, k):
    rng = np.random.default_rng(seed)
    k = min(k, 2 * m)
    a = random_degree_form(rng, m, k)
    total = ExteriorForm(m)
    for p in range(k + 1):
        part = bidegree_component(a, p, k - p)
        total = total + part
        assert part.conj() == bidegree_component(a.conj(), k - p, p)
    assert total.allclose(a, atol=0)


# --- powers and densities --------------------------------------------------------

def test_euclidean_top_power_has_unit_density():
    for m in (1, 2, 3):
        assert float(top_density(power_over_factorial(euclid(m).as_form(), m))) == pytest.approx(1.0, abs=1e-15)


def test_rank_one_metric_has_vanishing_square():
    v = np.array([1.0, 2.0 - 1j])
    h = HermitianForm(np.outer(v, v.conj()))
    assert power_over_factorial(h.as_form(), 2).max_abs() < 1e-14


def test_iwasawa_density_at_origin():
    # omega^2/2 for diag(1, 1 + |z1|^2) at z1 = 0 is four times Lebesgue
    h = HermitianForm(np.diag([1.0, 1.0]))
    assert float(top_density(power_over_factorial(h.as_form(), 2))) == pytest.approx(4.0)


def test_top_density_of_zero_and_errors():
    assert float(top_density(ExteriorForm(2))) == 0.0
    with pytest.raises(ValueError):
        top_density(dz(2, 0))
    with pytest.raises(ValueError):
        # dz ^ dzbar alone (without the factor i) has density -2i
        top_density(ExteriorForm(1, {((0,), (0,)): 1.0}))


def test_density_is_a_float_wrapper():
    d = top_density(power_over_factorial(euclid(2).as_form(), 2))
    assert isinstance(d, Density) and d.dim == 2


# --- Hodge star, norms, trace ---------------------------------------------------

def test_star_of_one_is_the_volume_form():
    rng = np.random.default_rng(0)
    g = random_metric(rng, 3)
    assert hodge_star(ExteriorForm(3, {((), ()): 1.0}), g).allclose(power_over_factorial(g.as_form(), 3), atol=1e-12)


def test_star_needs_positive_definite_metric():
    with pytest.raises(NotPositiveDefiniteError):
        hodge_star(dz(2, 0), HermitianForm(np.diag([1.0, 0.0])))


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(1, 4), st.booleans())
def test_primitive_star_formula_for_covectors(seed, m, holomorphic):
    # for a primitive (p,q)-form of degree k:
    # *v = (-1)^{k(k+1)/2} i^{p-q} g_{m-k} ^ v, here k = 1
    rng = np.random.default_rng(seed)
    g = random_metric(rng, m)
    p, q = (1, 0) if holomorphic else (0, 1)
    v = random_form(rng, m, p, q)
    expected = wedge(power_over_factorial(g.as_form(), m - 1), v) * ((-1) * 1j ** (p - q))
    scale = max(1.0, expected.max_abs())
    assert hodge_star(v, g).allclose(expected, atol=1e-10 * scale)


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 2))
def test_star_norm_identity(seed, m, k):
    rng = np.random.default_rng(seed)
    g = random_metric(rng, m)
    v = random_degree_form(rng, m, min(k, 2 * m))
    lhs = float(top_density(wedge(v, hodge_star(v.conj(), g))))
    vol = float(top_density(power_over_factorial(g.as_form(), m)))
    rhs = form_norm_sq(v, g) * vol
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_star_of_normalized_dtau():
    rng = np.random.default_rng(1)
    g = random_metric(rng, 2)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    dtau = ExteriorForm(2, {((j,), ()): np.conj(z[j]) for j in range(2)}) + \
        ExteriorForm(2, {((), (j,)): z[j] for j in range(2)})
    u = dtau / covector_norm(dtau, g)
    assert wedge(u, hodge_star(u, g)).allclose(power_over_factorial(g.as_form(), 2), atol=1e-12)


def test_covector_norm_examples():
    beta = euclid(2)
    # d tau at z = (1, 0): dtau = dz1 + dzbar1, |dtau|^2 = 4 tau
    dtau = dz(2, 0) + dzbar(2, 0)
    assert covector_norm(dtau, beta) == pytest.approx(2.0)
    assert covector_norm(dz(2, 0), beta) == pytest.approx(math.sqrt(2.0))
    assert covector_norm(ExteriorForm(2), beta) == 0.0
    with pytest.raises(NotPositiveDefiniteError):
        covector_norm(dz(2, 0), HermitianForm(np.diag([1.0, 0.0])))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 3))
def test_covector_norm_matches_unitary_frame(seed, m):
    rng = np.random.default_rng(seed)
    g = random_metric(rng, m)
    v = random_degree_form(rng, m, 1)
    assert covector_norm(v, g) ** 2 == pytest.approx(form_norm_sq(v, g), rel=1e-10)


def test_trace_of_metric_is_dimension():
    rng = np.random.default_rng(2)
    for m in (1, 2, 3):
        g = random_metric(rng, m)
        assert trace_lambda(g.as_form(), g) == pytest.approx(m)


def test_trace_examples():
    # i ddbar tau = Euclidean form with h = I
    ddbar = HermitianForm(np.eye(2)).as_form()
    assert trace_lambda(ddbar, HermitianForm(np.eye(2))).real == pytest.approx(2.0)
    # Iwasawa at |z1|^2 = 1: tr(diag(1, 1/2)) = 1.5
    assert trace_lambda(ddbar, HermitianForm(np.diag([1.0, 2.0]))).real == pytest.approx(1.5)
    with pytest.raises(ValueError):
        trace_lambda(dz(2, 0), HermitianForm(np.eye(2)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 4))
def test_trace_identity(seed, m):
    # gamma ^ g_{m-1} = Lambda_g(gamma) g_m
    rng = np.random.default_rng(seed)
    g = random_metric(rng, m)
    gamma = random_form(rng, m, 1, 1)
    vol = float(top_density(power_over_factorial(g.as_form(), m)))
    # gamma is complex, so its density is too: read the raw top coefficient
    full = tuple(range(m))
    coef = wedge(gamma, power_over_factorial(g.as_form(), m - 1)).terms.get((full, full), 0)
    factor = (-1) ** (m * (m - 1) // 2) * (1j) ** (-m) * 2 ** m
    assert coef * factor == pytest.approx(trace_lambda(gamma, g) * vol, rel=1e-10)


def test_hermitian_form_validation():
    with pytest.raises(ValueError):
        HermitianForm(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        HermitianForm(np.diag([1.0, -1.0]), "positive-definite")
    assert HermitianForm.classified(np.diag([1.0, 0.0])).definiteness == "positive-semidefinite"
    assert HermitianForm.classified(np.diag([1.0, -1.0])).definiteness == "indefinite"


def test_batched_forms_evaluate_pointwise():
    rng = np.random.default_rng(4)
    mats = np.stack([random_metric(rng, 2).matrix for _ in range(5)])
    g = HermitianForm(mats)
    d = top_density(power_over_factorial(g.as_form(), 2)).value
    expected = [4 * np.linalg.det(mats[k]).real for k in range(5)]
    assert np.allclose(d, expected)
