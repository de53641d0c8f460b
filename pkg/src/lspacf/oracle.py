"""
Ground-truth local PACFs from an analytic local autocovariance.

At each rescaled time t the local autocovariance gamma(t, .) is that of a
stationary process, so its PACF follows from the Yule-Walker system
Gamma_j(t) phi_j(t) = nu_j(t); the lag-j PACF is the last entry of phi_j(t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from .errors import DomainError, InvalidArgumentError, SingularSystemError

# Relative pivot threshold; keeps the checks scale-free like the PACF.
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class AcfFunction:
    """Local autocovariance gamma(t, k) of a known model."""

    gamma: Callable[[float, int], float]
    max_lag: int | None = None

    def __call__(self, t: float, k: int) -> float:
        if self.max_lag is not None and k > self.max_lag:
            raise InvalidArgumentError(f"lag {k} exceeds the usable maximum {self.max_lag}")
        return self.gamma(t, abs(int(k)))

    def vector(self, t: float, nlags: int) -> np.ndarray:
        """(gamma(t,0), ..., gamma(t,nlags))."""
        return np.array([self(t, k) for k in range(nlags + 1)], dtype=float)


@dataclass(frozen=True)
class PacfCurve:
    lag: int
    t: np.ndarray
    values: np.ndarray


def yw_solve(acf: AcfFunction, t: float, j: int) -> np.ndarray:
    """Solve the local Yule-Walker system of order ``j`` at time ``t``."""
    if j < 1:
        raise InvalidArgumentError("order j must be positive")
    gam = acf.vector(t, j)
    return toeplitz_solve(gam)


def toeplitz_solve(gam: np.ndarray) -> np.ndarray:
    """phi = Gamma^{-1} nu for autocovariances gam[0..j] via Cholesky."""
    gam = np.asarray(gam, dtype=float)
    j = gam.size - 1
    if gam[0] <= 0:
        raise SingularSystemError("gamma(0) must be positive")
    big = linalg.toeplitz(gam[:j])
    try:
        chol = linalg.cholesky(big, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise SingularSystemError("Toeplitz matrix is not positive definite") from exc
    pivots = np.diag(chol) ** 2
    if pivots.min() < PIVOT_TOL * gam[0]:
        raise SingularSystemError(
            f"smallest pivot {pivots.min():.3e} below {PIVOT_TOL:g} * gamma(0)"
        )
    return linalg.cho_solve((chol, True), gam[1:])


def levinson_durbin(gamma) -> tuple[np.ndarray, np.ndarray]:
    """Durbin-Levinson recursion.

    Parameters
    ----------
    gamma : array_like
        Autocovariances gamma_0, ..., gamma_J.

    Returns
    -------
    pacf : ndarray
        rho_1, ..., rho_J.
    phi : ndarray
        Order-J prediction coefficients phi_{J,1}, ..., phi_{J,J}.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 1 or gamma.size < 1:
        raise InvalidArgumentError("gamma must be a non-empty vector")
    if gamma[0] <= 0:
        raise SingularSystemError("gamma(0) must be positive")
    order = gamma.size - 1
    pacf = np.zeros(order)
    phi = np.zeros(order)
    err = gamma[0]
    for k in range(1, order + 1):
        if err <= PIVOT_TOL * gamma[0]:
            raise SingularSystemError(f"prediction error variance vanished at order {k - 1}")
        refl = (gamma[k] - phi[: k - 1] @ gamma[k - 1 : 0 : -1]) / err
        prev = phi[: k - 1].copy()
        phi[: k - 1] = prev - refl * prev[::-1]
        phi[k - 1] = refl
        pacf[k - 1] = refl
        err *= 1.0 - refl * refl
    if err <= 0:
        raise SingularSystemError("autocovariance sequence is not positive definite")
    return pacf, phi


def pacf_oracle(acf: AcfFunction, lag: int, grid) -> PacfCurve:
    """True rho_lag(t) on ``grid`` via Levinson-Durbin at each point."""
    if lag < 1:
        raise InvalidArgumentError("lag must be positive")
    t = np.asarray(grid, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise DomainError("grid must lie in [0, 1]")
    vals = np.array([levinson_durbin(acf.vector(ti, lag))[0][-1] for ti in t])
    return PacfCurve(lag, t, vals)
