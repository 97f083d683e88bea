import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hallfmo.errors import ConfigurationError, DomainError
from hallfmo.material import (
    DesignFields,
    MaterialParams,
    antisymmetric_part,
    diag_from_xi_eta,
    effective_tensor,
    hall_term,
    is_admissible,
    offdiag_from_s,
    orientation_angle,
    symmetric_part,
    tensor_derivatives,
)

PARAMS = MaterialParams(k=10.0, c=20.0, b=0.3, eps=1e-4, eps_prime=1e-4)
unit = st.floats(-1.0, 1.0, allow_nan=False)


def test_corner_values():
    assert diag_from_xi_eta(-1, -1, PARAMS) == pytest.approx((0.001, 0.001), abs=1e-15)
    assert diag_from_xi_eta(1, -1, PARAMS) == pytest.approx((19.999, 0.001), abs=1e-12)
    v = PARAMS.vertices()
    for (x, e), vi in zip([(-1, -1), (1, -1), (-1, 1), (1, 1)], v):
        np.testing.assert_allclose(diag_from_xi_eta(x, e, PARAMS), vi, rtol=0, atol=1e-13)


def test_center_is_vertex_mean():
    k11, k22 = diag_from_xi_eta(0.0, 0.0, PARAMS)
    mean = PARAMS.vertices().mean(axis=0)
    assert (k11, k22) == pytest.approx(tuple(mean), rel=1e-15)
    assert k11 == pytest.approx(7.50025, rel=1e-12)


def test_domain_error():
    with pytest.raises(DomainError):
        diag_from_xi_eta(1.2, 0.0, PARAMS)
    with pytest.raises(DomainError):
        effective_tensor(0, 0, -1.5, 0, PARAMS)


@pytest.mark.parametrize("kw", [dict(k=0), dict(c=-1), dict(b=-0.1), dict(eps=0), dict(eps_prime=1.5)])
def test_invalid_params(kw):
    with pytest.raises(ConfigurationError):
        MaterialParams(**kw)


def test_offdiag_examples():
    assert offdiag_from_s(0.0, 3.0, 7.0, PARAMS) == 0.0
    assert offdiag_from_s(1.0, 10.0, 10.0, PARAMS) == pytest.approx(9.99950, abs=5e-6)
    assert offdiag_from_s(-0.5, 4.0, 9.0, PARAMS) == pytest.approx(-2.99985, abs=5e-6)


def test_hall_examples():
    assert hall_term(0.0, PARAMS) == 0.0
    assert hall_term(1.0, PARAMS) == pytest.approx(3.0)
    assert hall_term(-1.0, PARAMS) == pytest.approx(-3.0)


def test_case_1_tensors():
    np.testing.assert_allclose(effective_tensor(-1, -1, 0, 0, PARAMS), [[10.001, 0], [0, 10.001]], rtol=1e-13)
    np.testing.assert_allclose(effective_tensor(-1, -1, 0, 1, PARAMS), [[10.001, -3.0], [3.0, 10.001]], rtol=1e-13)


@given(unit, unit, unit)
def test_isotropic_setting(xi, eta, s):
    iso = MaterialParams(b=0.0, eps=1.0, eps_prime=1.0)
    k11, k22 = diag_from_xi_eta(xi, eta, iso)
    assert k11 == pytest.approx(10.0, rel=1e-14) and k22 == pytest.approx(10.0, rel=1e-14)
    assert offdiag_from_s(s, k11, k22, iso) == 0.0
    np.testing.assert_allclose(effective_tensor(xi, eta, s, 0.3, iso), 20.0 * np.eye(2), rtol=1e-14)


@given(unit, unit, unit, unit)
def test_tensor_invariants(xi, eta, s, a):
    K = effective_tensor(xi, eta, s, a, PARAMS)
    k11, k22 = diag_from_xi_eta(xi, eta, PARAMS)
    k12 = offdiag_from_s(s, k11, k22, PARAMS)
    tr = k11 + k22
    assert PARAMS.c * PARAMS.eps - 1e-12 <= tr <= PARAMS.c + 1e-12
    assert k11 * k22 - k12 ** 2 > 0
    assert is_admissible(K)
    # antisymmetric magnitude is exactly a*b*k
    assert (K[1, 0] - K[0, 1]) / 2 == pytest.approx(a * PARAMS.b * PARAMS.k, abs=1e-13)
    # symmetric part of the effective tensor: trace 2k + tr, det k^2 + k tr + det
    sym = symmetric_part(K)
    assert np.trace(sym) == pytest.approx(2 * PARAMS.k + tr, rel=1e-13)
    assert np.linalg.det(sym) == pytest.approx(PARAMS.k ** 2 + PARAMS.k * tr + k11 * k22 - k12 ** 2, rel=1e-10)


@given(unit, unit, unit, unit)
def test_b_zero_gives_symmetric_tensor(xi, eta, s, a):
    K = effective_tensor(xi, eta, s, a, MaterialParams(b=0.0))
    assert K[0, 1] == K[1, 0]
    np.testing.assert_array_equal(antisymmetric_part(K), 0.0)


def test_derivative_examples():
    d = tensor_derivatives(0.3, -0.2, 0.5, 0.7, PARAMS)
    np.testing.assert_array_equal(d["a"], [[0, -3.0], [3.0, 0]])
    # ds at k11 = k22 = 10 (isotropic diagonal comes from the v4 corner with c = 20)
    d = tensor_derivatives(1.0, 1.0, 0.0, 0.0, PARAMS)
    np.testing.assert_allclose(d["s"], [[0, 9.9995], [9.9995, 0]], atol=5e-5)


def _central_fd(xi, eta, s, a, name, h=1e-6):
    args = dict(xi=xi, eta=eta, s=s, a=a)
    plus, minus = dict(args), dict(args)
    plus[name] += h
    minus[name] -= h
    return (effective_tensor(**plus, params=PARAMS) - effective_tensor(**minus, params=PARAMS)) / (2 * h)


def test_derivatives_match_finite_differences():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1 + 1e-5, 1 - 1e-5, size=(100, 4))
    for xi, eta, s, a in pts:
        an = tensor_derivatives(xi, eta, s, a, PARAMS)
        for name in ("xi", "eta", "s", "a"):
            fd = _central_fd(xi, eta, s, a, name)
            err = np.abs(fd - an[name]) / np.maximum(np.abs(an[name]), 1.0)
            assert err.max() <= 1e-6, (name, xi, eta, s, a)


def test_derivatives_vanish_in_isotropic_symmetric_setting():
    iso = MaterialParams(b=0.0, eps=1.0, eps_prime=1.0)
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=(4, 50))
    d = tensor_derivatives(*x, iso)
    for name in d:
        np.testing.assert_array_equal(d[name], 0.0)


def test_vectorized_shapes():
    x = np.zeros((3, 4))
    assert effective_tensor(x, x, x, x, PARAMS).shape == (3, 4, 2, 2)
    assert tensor_derivatives(x, x, x, x, PARAMS)["xi"].shape == (3, 4, 2, 2)


def test_orientation_angle():
    assert orientation_angle(2.0, 1.0, 0.0) == pytest.approx(0.0)
    assert orientation_angle(1.0, 2.0, 0.0) == pytest.approx(np.pi / 2)
    # [[1, 1], [1, 1]] has principal direction (1, 1)
    assert orientation_angle(1.0, 1.0, 1.0) == pytest.approx(np.pi / 4)


def test_design_fields():
    d = DesignFields.constant(5, xi=-1, a_prime=0.5)
    assert d.names == ("xi", "eta", "s", "a", "a_prime")
    np.testing.assert_array_equal(d.hall(1), 0.5)
    with pytest.raises(DomainError):
        DesignFields.constant(3, s=1.5)
    with pytest.raises(ConfigurationError):
        DesignFields.constant(3).hall(1)
    with pytest.raises(ConfigurationError):
        DesignFields(np.zeros(3), np.zeros(3), np.zeros(4), np.zeros(3))
