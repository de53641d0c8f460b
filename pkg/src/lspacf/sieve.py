"""
Sieve OLS estimation of time-varying prediction coefficients and PACFs.

For a working lag ``l`` every coefficient function phi_{l,k}(t) is expanded
in the first ``c`` basis functions, so the time-varying AR(l) regression

    x_i = sum_k phi_{l,k}(i/n) x_{i-k} + e_i

becomes one OLS problem with l*c columns. Columns are stacked lag-major,
basis-minor: column (k-1)*c + m holds alpha_m(i/n) * x_{i-k}. The estimated
lag-l PACF is the last coefficient function, rho_l(t) = phi_{l,l}(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .basis import BasisSet
from .errors import DomainError, InvalidArgumentError, SampleTooSmallError, SingularSystemError
from .simulate import TimeSeries

RCOND_MIN = 1e-10
RIEMANN_POINTS = 1000


def _values(x) -> np.ndarray:
    if isinstance(x, TimeSeries):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError("expected a one-dimensional series")
    return arr


def _check_t(t) -> np.ndarray:
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0) or np.any(tt > 1):
        raise DomainError("rescaled time must lie in [0, 1]")
    return tt


def lag_matrix(x: np.ndarray, lag: int) -> np.ndarray:
    """Rows i = lag+1..n (1-based) holding (x_{i-1}, ..., x_{i-lag})."""
    n = x.size
    return np.column_stack([x[lag - k : n - k] for k in range(1, lag + 1)])


@dataclass(frozen=True)
class DesignMatrix:
    matrix: np.ndarray  # (n - lag, lag * c)
    response: np.ndarray  # (x_{lag+1}, ..., x_n)
    lag: int
    basis: BasisSet
    n: int  # number of observations used
    n_time: int  # time normaliser: row i sits at t = i / n_time

    @property
    def c(self) -> int:
        return self.basis.c


def build_design(x, lag: int, basis: BasisSet, n_time: int | None = None) -> DesignMatrix:
    """Stacked sieve design for a time-varying AR(``lag``) regression.

    ``n_time`` defaults to ``len(x)``; cross-validation passes the full sample
    size so a training prefix keeps its rescaled times.
    """
    x = _values(x)
    n = x.size
    if lag < 1:
        raise InvalidArgumentError("lag must be at least 1")
    n_time = n if n_time is None else int(n_time)
    if n_time < n:
        raise InvalidArgumentError("time normaliser cannot be smaller than the sample")
    cols = lag * basis.c
    if n - lag < cols:
        raise SampleTooSmallError(
            f"{n - lag} rows cannot identify {cols} coefficients (lag={lag}, c={basis.c})"
        )
    t = np.arange(lag + 1, n + 1) / n_time
    lagged = lag_matrix(x, lag)
    bvals = basis(t)
    mat = (lagged[:, :, None] * bvals[:, None, :]).reshape(n - lag, cols)
    return DesignMatrix(mat, x[lag:].copy(), lag, basis, n, n_time)


@dataclass(frozen=True)
class SieveFit:
    """OLS fit of a sieve time-varying AR regression. Immutable once built."""

    lag: int
    basis: BasisSet
    beta: np.ndarray
    r_factor: np.ndarray  # upper-triangular R of Y = QR
    n: int
    n_time: int
    rcond: float

    @property
    def c(self) -> int:
        return self.basis.c

    @property
    def blocks(self) -> np.ndarray:
        """Coefficients reshaped to (lag, c); row k-1 expands phi_{lag,k}."""
        return self.beta.reshape(self.lag, self.c)

    @property
    def sigma_hat(self) -> np.ndarray:
        """(1/n) Y'Y."""
        return self.r_factor.T @ self.r_factor / self.n

    def sigma_inv_apply(self, v: np.ndarray) -> np.ndarray:
        """Sigma_hat^{-1} v through the triangular factor (v may be a matrix)."""
        tmp = linalg.solve_triangular(self.r_factor, v, trans="T", lower=False)
        return self.n * linalg.solve_triangular(self.r_factor, tmp, lower=False)


def fit_ols(d: DesignMatrix) -> SieveFit:
    """Least-squares fit through a Householder QR of the design."""
    if not np.all(np.isfinite(d.matrix)):
        raise InvalidArgumentError("design contains non-finite entries")
    q, r = linalg.qr(d.matrix, mode="economic")
    sv = linalg.svdvals(r)
    if sv[0] == 0.0:
        raise SingularSystemError("design matrix is identically zero")
    # reciprocal condition number of Sigma_hat = cond(Y)^-2
    rcond = float((sv[-1] / sv[0]) ** 2)
    if rcond < RCOND_MIN:
        raise SingularSystemError(f"design is rank deficient (rcond of Y'Y = {rcond:.3e})")
    beta = linalg.solve_triangular(r, q.T @ d.response, lower=False)
    return SieveFit(d.lag, d.basis, beta, r, d.n, d.n_time, rcond)


def fit(x, lag: int, basis: BasisSet, n_time: int | None = None) -> SieveFit:
    return fit_ols(build_design(x, lag, basis, n_time))


def eval_coeff(f: SieveFit, k: int, t) -> np.ndarray | float:
    """phi_hat_{lag,k}(t)."""
    if not 1 <= k <= f.lag:
        raise InvalidArgumentError(f"coefficient index {k} outside 1..{f.lag}")
    tt = _check_t(t)
    vals = f.basis(tt) @ f.blocks[k - 1]
    return float(vals) if np.ndim(vals) == 0 else vals


def eval_pacf(f: SieveFit, t) -> np.ndarray | float:
    """rho_hat_lag(t): only the last coefficient block participates."""
    return eval_coeff(f, f.lag, t)


def coefficient_paths(f: SieveFit, t) -> np.ndarray:
    """All coefficient functions at times ``t``, shape (len(t), lag)."""
    return f.basis(_check_t(np.atleast_1d(t))) @ f.blocks.T


def residuals(f: SieveFit, x) -> np.ndarray:
    """e_hat_i = x_i - sum_k phi_hat_k(i/n) x_{i-k} for i = lag+1..n."""
    x = _values(x)
    if x.size != f.n:
        raise InvalidArgumentError(f"series has length {x.size}, fit used {f.n}")
    t = np.arange(f.lag + 1, f.n + 1) / f.n_time
    phi = coefficient_paths(f, t)
    return x[f.lag :] - np.einsum("ik,ik->i", phi, lag_matrix(x, f.lag))


def forecast(f: SieveFit, x, i) -> np.ndarray | float:
    """One-step forecast(s) of x_i (1-based) from the observed lags.

    Coefficients are evaluated at i / n_time, so ``i`` may run past the
    fitting sample up to ``n_time``.
    """
    x = _values(x)
    idx = np.atleast_1d(np.asarray(i))
    if np.any(idx <= f.lag) or np.any(idx > f.n_time) or np.any(idx > x.size):
        raise InvalidArgumentError("forecast index out of range")
    phi = coefficient_paths(f, idx / f.n_time)
    lags = np.column_stack([x[idx - 1 - k] for k in range(1, f.lag + 1)])
    out = np.einsum("ik,ik->i", phi, lags)
    return float(out[0]) if np.ndim(i) == 0 else out


def integrated_square(f: SieveFit, block: np.ndarray) -> float:
    """int_0^1 (sum_m block[m] alpha_m(t))^2 dt."""
    if f.basis.exact_orthonormal:
        return float(block @ block)
    t = (np.arange(RIEMANN_POINTS) + 0.5) / RIEMANN_POINTS
    return float(np.mean((f.basis(t) @ block) ** 2))


def mise(f: SieveFit, truth, k: int | None = None, npts: int = RIEMANN_POINTS) -> float:
    """Midpoint-rule integrated squared error of phi_hat_{lag,k} against ``truth(t)``."""
    k = f.lag if k is None else k
    t = (np.arange(npts) + 0.5) / npts
    err = eval_coeff(f, k, t) - np.broadcast_to(truth(t), t.shape)
    return float(np.mean(err**2))
