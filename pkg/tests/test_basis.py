import math

import numpy as np
import pytest
from numpy.polynomial import legendre as npleg

from lspacf.basis import BasisFamily, basis_sup_norms, eval_basis, gram_matrix, make_basis, quadrature_weights
from lspacf.errors import DomainError, InvalidArgumentError

SQ2, SQ3, SQ5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)


def test_legendre_constant_basis():
    b = make_basis("legendre", 1)
    np.testing.assert_array_equal(b(0.37), [1.0])


def test_legendre_c2_midpoint():
    np.testing.assert_allclose(make_basis("legendre", 2)(0.5), [1.0, 0.0], atol=1e-15)


def test_fourier_c3_quarter():
    np.testing.assert_allclose(make_basis("fourier", 3)(0.25), [1.0, 0.0, 1.41421356], atol=1e-8)


def test_legendre_endpoints():
    np.testing.assert_allclose(make_basis("legendre", 3)(0.0), [1.0, -SQ3, SQ5], rtol=1e-14)
    np.testing.assert_allclose(make_basis("legendre", 2)(1.0), [1.0, SQ3], rtol=1e-14)


@pytest.mark.parametrize("family", list(BasisFamily))
def test_first_function_is_constant(family):
    t = np.linspace(0, 1, 17)
    np.testing.assert_allclose(make_basis(family, 5)(t)[:, 0], 1.0, atol=1e-10)


def test_c_zero_rejected():
    with pytest.raises(InvalidArgumentError):
        make_basis("legendre", 0)


@pytest.mark.parametrize("t", [-0.01, 1.2])
def test_outside_unit_interval(t):
    with pytest.raises(DomainError):
        eval_basis(make_basis("fourier", 3), t)


def test_recurrence_matches_direct_expansion():
    # independent oracle: numpy's Legendre series evaluation
    t = np.linspace(0, 1, 101)
    vals = make_basis("legendre", 10)(t)
    for k in range(10):
        coef = np.zeros(k + 1)
        coef[k] = 1.0
        direct = math.sqrt(2 * k + 1) * npleg.legval(2 * t - 1, coef)
        np.testing.assert_allclose(vals[:, k], direct, atol=1e-10)


@pytest.mark.parametrize("family", ["legendre", "fourier"])
def test_gram_identity_up_to_30(family):
    g = gram_matrix(make_basis(family, 30))
    assert np.max(np.abs(g - np.eye(30))) <= 1e-6


def test_chebyshev_orthonormal_on_grid():
    g = gram_matrix(make_basis("chebyshev", 12))
    assert np.max(np.abs(g - np.eye(12))) <= 1e-6


@pytest.mark.parametrize("family", ["legendre", "fourier"])
def test_higher_functions_integrate_to_zero(family):
    t, w = quadrature_weights()
    vals = make_basis(family, 9)(t)
    assert np.max(np.abs(w @ vals[:, 1:])) <= 1e-8


def test_sup_norms():
    xi, zeta = basis_sup_norms(make_basis("fourier", 7), 10001)
    assert abs(xi - SQ2) <= 1e-6 and xi <= zeta
    xi, _ = basis_sup_norms(make_basis("legendre", 3), 10001)
    assert abs(xi - SQ5) <= 1e-6
    assert basis_sup_norms(make_basis("legendre", 1), 10) == (1.0, 1.0)


def test_scalar_and_vector_shapes():
    b = make_basis("legendre", 4)
    assert b(0.3).shape == (4,)
    assert b(np.array([0.1, 0.2])).shape == (2, 4)
