import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kairon import cone
from kairon import geometry as geo
from kairon.expr import bump
from kairon.sphere import build_quadrature

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([1, 2, 3])


def test_lift_project_roundtrip(rng):
    w = geo.random_direction(rng, 3, 20)
    lam = rng.uniform(0.5, 4.0, 20)
    back, p0 = cone.project(lam[:, None] * cone.lift(w))
    assert np.allclose(back, w) and np.allclose(p0, lam)


@pytest.mark.parametrize("p", [[-1.0, 1.0, 0.0], [1.0, 0.5, 0.0], [0.0, 0.0, 0.0]])
def test_project_rejects_off_cone(p):
    with pytest.raises(geo.DomainError):
        cone.project(p)


def test_check_unit_rejects():
    with pytest.raises(geo.DomainError):
        cone.check_unit([0.6, 0.6])


def test_rho_of_rotation_is_the_rotation(rng):
    R = geo.random_rotation(rng, 3)
    w = geo.random_direction(rng, 3, 10)
    assert np.allclose(cone.rho(geo.spatial_rotation(R), w), w @ R.T, atol=1e-14)


@given(st.floats(-3, 3), st.floats(-1, 1))
def test_aberration_formula(chi, cos_theta):
    # independent closed form: cos theta' = (cos theta - tanh chi) / (1 - tanh chi cos theta)
    sin_theta = math.sqrt(max(0.0, 1.0 - cos_theta**2))
    w = np.array([cos_theta, sin_theta])
    w = w / np.linalg.norm(w)
    got = cone.rho(geo.boost([1.0, 0.0], chi), w)
    th = math.tanh(chi)
    want = (w[0] - th) / (1.0 - th * w[0])
    assert got[0] == pytest.approx(want, abs=1e-12)
    assert np.linalg.norm(got) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-3, 3), st.floats(-2, 2), seeds, dims)
def test_gamma_on_boost_axis(chi, r, seed, m):
    n = geo.random_direction(np.random.default_rng(seed), m)
    assert cone.gamma(r, geo.boost(n, chi), n) == pytest.approx(math.exp(-r * chi), rel=1e-12)


@settings(max_examples=100)
@given(seeds, dims, st.floats(-3, 3))
def test_cocycle_identities(seed, m, r):
    rng = np.random.default_rng(seed)
    L1, L2 = (geo.random_lorentz(rng, 2.0, m) for _ in range(2))
    w = geo.random_direction(rng, m)
    assert cone.cocycle_defect(r, L1, L2, w) <= 1e-9
    assert cone.cocycle_inverse_defect(r, L1, w) <= 1e-9
    assert cone.gamma(r, geo.identity(m), w) == 1.0


@settings(max_examples=100)
@given(seeds, dims)
def test_rho_is_a_left_action(seed, m):
    rng = np.random.default_rng(seed)
    L1, L2 = (geo.random_lorentz(rng, 2.0, m) for _ in range(2))
    w = geo.random_direction(rng, m)
    assert np.allclose(cone.rho(geo.compose(L1, L2), w), cone.rho(L1, cone.rho(L2, w)), atol=1e-10)


@pytest.mark.parametrize("m", [2, 3])
def test_sigma_jacobian(m, rng):
    for _ in range(20):
        L = geo.random_lorentz(rng, 1.5, m)
        w = geo.random_direction(rng, m)
        chk = cone.sigma_jacobian(L, w, 1e-4)
        assert chk.defect <= 1e-6
        assert 3.0 <= chk.defect / cone.sigma_jacobian_defect(L, w, 5e-5) <= 5.0


def test_sigma_jacobian_needs_m2():
    with pytest.raises(geo.DomainError):
        cone.sigma_jacobian(geo.boost([1.0], 0.3), [1.0], 1e-4)


def _annular(p):
    r = np.linalg.norm(p[:, 1:], axis=1)
    return bump(r - 2.0) * (1.0 + p[:, 1] / r)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_cone_measure_invariance(m):
    L = geo.boost(np.eye(m)[0], 0.8)
    res = cone.cone_measure_invariance(_annular, L, 200_000, 11, (1.0, 3.0))
    assert res.difference <= 4.0 * res.mc_error


def test_cone_measure_detects_a_dilation():
    # negative control: 2 * identity is not in SO0(1, m)
    res = cone.cone_measure_invariance(_annular, 2.0 * np.eye(3), 200_000, 11, (1.0, 3.0))
    assert res.difference > 10.0 * res.mc_error


def _phi(w):
    return np.exp(0.4 * w[..., 0] - 0.2 * w[..., -1])


def _psi(w):
    return 1.0 + 0.5 * w[..., -1] ** 2 + 0.3 * w[..., 0]


@pytest.mark.parametrize("m,res,tol", [(1, 1, 1e-13), (2, 256, 1e-10), (3, 32, 1e-8)])
def test_pairing_frame_independence(m, res, tol, rng):
    q = build_quadrature(m, res)
    for _ in range(5):
        L = geo.compose(geo.boost(geo.random_direction(rng, m), rng.uniform(0, 1)), geo.spatial_rotation(geo.random_rotation(rng, m)))
        v = np.concatenate([[2.0], rng.normal(size=m)])
        base = cone.invariant_pairing(_phi, _psi, v, q)
        moved = cone.invariant_pairing(
            cone.frame_change(_phi, m / 2, L), cone.frame_change(_psi, m / 2, L), geo.act_vector(geo.inverse(L), v), q
        )
        assert abs(moved - base) <= tol * abs(base)


def test_pairing_with_wrong_vector_transport_fails(rng):
    # the vector must move with L^-1; moving it with L breaks invariance
    q = build_quadrature(2, 256)
    L = geo.boost([1.0, 0.0], 0.9)
    v = np.array([2.0, 0.3, -0.4])
    base = cone.invariant_pairing(_phi, _psi, v, q)
    wrong = cone.invariant_pairing(cone.frame_change(_phi, 1.0, L), cone.frame_change(_psi, 1.0, L), geo.act_vector(L, v), q)
    assert abs(wrong - base) > 1e-2 * abs(base)


def test_frame_change_is_inverse_representation(rng):
    L = geo.random_lorentz(rng, 1.0, 3)
    w = geo.random_direction(rng, 3, 50)
    a = cone.frame_change(_phi, 1.5, L)(w)
    b = cone.representation(_phi, 1.5, geo.inverse(L))(w)
    assert np.allclose(a, b, rtol=1e-12)


@settings(max_examples=30)
@given(seeds, st.floats(-2, 2))
def test_representation_is_a_homomorphism(seed, r):
    rng = np.random.default_rng(seed)
    L1, L2 = (geo.random_lorentz(rng, 1.0, 3) for _ in range(2))
    w = geo.random_direction(rng, 3, 20)
    nested = cone.representation(cone.representation(_phi, r, L2), r, L1)(w)
    direct = cone.representation(_phi, r, geo.compose(L1, L2))(w)
    assert np.allclose(nested, direct, rtol=1e-9)


@given(st.floats(0.1, 10.0), seeds)
def test_homogeneous_extension(lam, seed):
    w = geo.random_direction(np.random.default_rng(seed), 3, 5)
    F = cone.hom_extend(_phi, 1.5)
    assert np.allclose(F(lam * cone.lift(w)), lam**-1.5 * _phi(w), rtol=1e-13)
    assert np.allclose(cone.hom_restrict(F)(w), _phi(w), rtol=1e-15)
