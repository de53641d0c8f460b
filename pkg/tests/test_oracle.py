import numpy as np
import pytest

from lspacf.errors import SingularSystemError
from lspacf.oracle import AcfFunction, levinson_durbin, pacf_oracle, toeplitz_solve, yw_solve
from lspacf.simulate import model_acf, tvar2, tvma1


def _ar2_gamma(a1, a2, nlags):
    return model_acf(tvar2(a1, a2, stationary=True)).vector(0.5, nlags)


def test_white_noise_yw():
    acf = AcfFunction(lambda t, k: 1.0 if k == 0 else 0.0)
    np.testing.assert_array_equal(yw_solve(acf, 0.3, 3), [0, 0, 0])


def test_ar2_yw_recovers_coefficients():
    acf = model_acf(tvar2(0.5, 0.3, stationary=True))
    np.testing.assert_allclose(yw_solve(acf, 0.7, 2), [0.5, 0.3], atol=1e-12)


def test_ma1_yw_hand_solve():
    acf = model_acf(tvma1(0.5, stationary=True))
    np.testing.assert_allclose(yw_solve(acf, 0.1, 2), [0.47619048, -0.19047619], atol=1e-8)


def test_levinson_white_noise():
    pacf, _ = levinson_durbin([1.0, 0.0, 0.0, 0.0])
    np.testing.assert_array_equal(pacf, [0, 0, 0])


def test_levinson_ar2_closed_form():
    pacf, phi = levinson_durbin(_ar2_gamma(0.5, 0.3, 6))
    np.testing.assert_allclose(pacf[:3], [0.71428571, 0.3, 0.0], atol=1e-8)
    np.testing.assert_allclose(pacf[2:], 0.0, atol=1e-10)
    np.testing.assert_allclose(phi, [0.5, 0.3, 0, 0, 0, 0], atol=1e-10)


def test_levinson_ma1_closed_form():
    theta = 0.5
    pacf, _ = levinson_durbin([1 + theta**2, theta, 0.0])
    np.testing.assert_allclose(pacf, [0.4, -(theta**2) / (1 + theta**2 + theta**4)], atol=1e-12)


def test_levinson_matches_dense_solve():
    # independent oracle: dense solve of every nested Yule-Walker system
    gam = _ar2_gamma(0.4, -0.35, 8)
    pacf, _ = levinson_durbin(gam)
    for j in range(1, 9):
        big = np.array([[gam[abs(a - b)] for b in range(j)] for a in range(j)])
        assert abs(np.linalg.solve(big, gam[1 : j + 1])[-1] - pacf[j - 1]) < 1e-12


def test_singular_detection():
    with pytest.raises(SingularSystemError):
        levinson_durbin([1.0, 1.0, 1.0])
    with pytest.raises(SingularSystemError):
        toeplitz_solve(np.array([1.0, 1.0, 1.0]))
    with pytest.raises(SingularSystemError):
        levinson_durbin([0.0, 0.0])


def test_oracle_curves():
    t = np.linspace(0, 1, 41)
    acf = model_acf(tvar2(0.5, 0.0, stationary=False))
    np.testing.assert_allclose(pacf_oracle(acf, 1, t).values, 0.5 * np.sin(2 * np.pi * t), atol=1e-12)
    np.testing.assert_allclose(pacf_oracle(acf, 3, t).values, 0.0, atol=1e-12)
    acf = model_acf(tvar2(0.5, 0.3, stationary=True))
    np.testing.assert_allclose(pacf_oracle(acf, 2, t).values, 0.3, atol=1e-12)


def test_scale_invariance():
    gam = _ar2_gamma(0.2, 0.5, 5)
    np.testing.assert_allclose(levinson_durbin(7.3 * gam)[0], levinson_durbin(gam)[0], atol=1e-14)


def test_ma1_pacf_decays():
    acf = model_acf(tvma1(0.5, stationary=True))
    pacf = np.abs(pacf_oracle(acf, 12, [0.5]).values)
    full, _ = levinson_durbin(acf.vector(0.5, 12))
    assert np.all(np.diff(np.abs(full)) < 0)
    assert pacf[0] == pytest.approx(abs(full[-1]))
