"""
Data-driven tuning: basis size c, bootstrap block size m, portmanteau lag h,
AR order, and the theoretical lag cutoff.

c is picked by one-step forecast cross-validation on a tail of length
floor(3 log2 n); m by the minimum-volatility rule on the bootstrap covariance
Pi_hat(m); h and the AR order by sequential single-lag tests.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisFamily, make_basis
from .errors import InvalidArgumentError, SampleTooSmallError, SingularSystemError
from .infer import BlockScores, BootstrapConfig, TestKind, TestResult, run_test
from .sieve import SieveFit, fit, forecast

logger = logging.getLogger(__name__)

MV_NEIGHBOURHOOD = 3
H_CAP = 50


@dataclass
class TuningRecord:
    c: int | None = None
    m: int | None = None
    h: int | None = None
    c_grid: list = field(default_factory=list)
    cv_mse: list = field(default_factory=list)
    m_grid: list = field(default_factory=list)
    se_profile: list = field(default_factory=list)
    h_capped: bool = False
    seeds: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v not in (None, [], False)}


def _x(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def validation_length(n: int) -> int:
    return int(math.floor(3 * math.log2(n)))


def default_c_grid(n: int, lag: int, family: BasisFamily | str = "legendre") -> list[int]:
    """{2, ..., ceil(3 n^{1/4})}, keeping only sizes the training fit can identify.

    Fourier candidates are odd, so every frequency enters with both its cosine
    and its sine. An even size drops the sine of the top frequency and the fit
    then depends on where the coefficient curve's phase happens to fall.
    """
    hi = math.ceil(3 * n**0.25)
    train = n - validation_length(n)
    sizes = range(2, hi + 1)
    if BasisFamily(family) is BasisFamily.FOURIER:
        sizes = range(3, hi + 1, 2)
    return [c for c in sizes if train - lag >= c * lag]


def select_c(x, candidates, lag: int, family: BasisFamily | str = "legendre"):
    """Basis size minimising the one-step forecast MSE on the validation tail.

    Returns ``(c, record)`` where ``record`` lists the MSE per candidate
    (``nan`` for skipped ones). Ties go to the smaller c.
    """
    x = _x(x)
    n = x.size
    cands = sorted(int(c) for c in candidates)
    if not cands:
        raise InvalidArgumentError("empty candidate grid for c")
    ell = validation_length(n)
    train = x[: n - ell]
    idx = np.arange(n - ell + 1, n + 1)
    mses = []
    for c in cands:
        try:
            f = fit(train, lag, make_basis(family, c), n_time=n)
        except (SampleTooSmallError, SingularSystemError) as exc:
            warnings.warn(f"skipping c={c}: {exc}")
            mses.append(float("nan"))
            continue
        pred = forecast(f, x, idx)
        mses.append(float(np.mean((x[idx - 1] - pred) ** 2)))
    arr = np.array(mses)
    if np.all(np.isnan(arr)):
        raise SampleTooSmallError("no feasible candidate for c")
    best = cands[int(np.nanargmin(arr))]
    return best, {"c_grid": cands, "cv_mse": mses}


def pi_hat(x, f: SieveFit, m: int) -> np.ndarray:
    """Conditional covariance E[Phi Phi' | x] of the bootstrap vector."""
    a = BlockScores(x, f).matrix(m)
    return a.T @ a


def default_m_grid(n: int, lag: int, c: int = 1, h0: int = MV_NEIGHBOURHOOD) -> list[int]:
    """Unit-step candidates {min(ceil(n^{1/5}), hi), ..., hi = ceil(sqrt(n / 2c))}, padded by h0 each side.

    Larger blocks leave too few effectively independent block sums for the
    bootstrap quantile to settle, and the size drifts upward. Padding outside
    1..n-lag-1 is dropped.
    """
    lo = math.ceil(n**0.2)
    hi = math.ceil(math.sqrt(n / (2 * c)))
    lo = min(lo, hi)
    grid = range(lo - h0, hi + h0 + 1)
    return [m for m in grid if 1 <= m <= n - lag - 1]


def _spectral_norms(mats: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvalsh(mats)).max(axis=-1)


def select_m(x, f: SieveFit, grid, h0: int = MV_NEIGHBOURHOOD, norm: str = "spectral"):
    """Minimum-volatility block size.

    ``grid`` is the full increasing candidate list; a candidate is eligible
    when it has ``h0`` neighbours on both sides. se(m_j) is the root mean
    squared ``norm`` distance of Pi_hat over the 2 h0 + 1 neighbourhood from
    its average. Ties go to the smaller m.
    """
    grid = [int(m) for m in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidArgumentError("m grid must be strictly increasing")
    if len(grid) < 2 * h0 + 1:
        raise InvalidArgumentError(f"m grid needs at least {2 * h0 + 1} points")
    if norm not in ("spectral", "frobenius"):
        raise InvalidArgumentError(f"unknown norm {norm!r}")
    scores = BlockScores(x, f)
    pis = np.stack([a.T @ a for a in map(scores.matrix, grid)])
    se = []
    for j in range(h0, len(grid) - h0):
        window = pis[j - h0 : j + h0 + 1]
        dev = window.mean(axis=0) - window
        if norm == "spectral":
            d = _spectral_norms(dev)
        else:
            d = np.sqrt(np.sum(dev**2, axis=(1, 2)))
        se.append(float(np.sqrt(np.sum(d**2) / (2 * h0))))
    interior = grid[h0 : len(grid) - h0]
    best = interior[int(np.argmin(se))]
    return best, {"m_grid": interior, "se_profile": se}


def auto_test(
    x,
    kind: TestKind | str,
    lag: int,
    family: BasisFamily | str = "legendre",
    c: int | str = "auto",
    m: int | str = "auto",
    B: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
    c_grid=None,
    m_grid=None,
    workers: int | None = None,
) -> TestResult:
    """Resolve c (cross-validation) then m (minimum volatility) and run the test."""
    x = _x(x)
    n = x.size
    rec = TuningRecord(seeds=[seed])
    if c == "auto":
        grid = c_grid if c_grid is not None else default_c_grid(n, lag, family)
        c, info = select_c(x, grid, lag, family)
        rec.c_grid, rec.cv_mse = info["c_grid"], info["cv_mse"]
    basis = make_basis(family, int(c))
    if m == "auto":
        f = fit(x, lag, basis)
        grid = m_grid if m_grid is not None else default_m_grid(n, lag, int(c))
        m, info = select_m(x, f, grid)
        rec.m_grid, rec.se_profile = info["m_grid"], info["se_profile"]
    rec.c, rec.m = int(c), int(m)
    cfg = BootstrapConfig(B=B, m=int(m), seed=seed, alpha=alpha)
    return run_test(x, kind, lag, basis, cfg, workers=workers, tuning=rec.to_dict())


def select_h(x, h_cap: int = H_CAP, alpha: float = 0.05, **test_kw) -> tuple[int, dict]:
    """First lag j <= h_cap whose single-lag null is accepted.

    Returns ``(h, info)``; ``info["capped"]`` is True when every lag up to
    ``h_cap`` rejected and the cap is returned.
    """
    if h_cap < 1:
        raise InvalidArgumentError("h_cap must be at least 1")
    pvals = []
    for j in range(1, h_cap + 1):
        res = auto_test(x, TestKind.SINGLE_LAG, j, alpha=alpha, **test_kw)
        pvals.append(res.p_value)
        if not res.reject:
            return j, {"capped": False, "p_values": pvals}
    warnings.warn(f"every lag up to h*={h_cap} was significant; using h = h*")
    return h_cap, {"capped": True, "p_values": pvals}


def order_select(x, p_cap: int, alpha: float = 0.05, **test_kw) -> tuple[int, list[float]]:
    """Largest lag j <= p_cap whose single-lag test rejects (0 if none)."""
    if p_cap < 1:
        raise InvalidArgumentError("p_cap must be at least 1")
    p_tilde, pvals = 0, []
    for j in range(1, p_cap + 1):
        res = auto_test(x, TestKind.SINGLE_LAG, j, alpha=alpha, **test_kw)
        pvals.append(res.p_value)
        if res.reject:
            p_tilde = j
    return p_tilde, pvals


def whitenoise_test(x, h: int | str = "auto", h_cap: int = H_CAP, alpha: float = 0.05, **test_kw):
    """White-noise test with h chosen sequentially unless given."""
    info = {}
    if h == "auto":
        h, info = select_h(x, h_cap, alpha, **test_kw)
    res = auto_test(x, TestKind.WHITE_NOISE, int(h), alpha=alpha, **test_kw)
    res.tuning["h"] = int(h)
    if info.get("capped"):
        res.tuning["h_capped"] = True
    return res


def lag_cutoff(n: int, tau: float) -> int:
    """ceil(n^{1 / (2 (tau - 1))}); tau is the polynomial decay order of the ACF."""
    if tau <= 1:
        raise InvalidArgumentError("tau must exceed 1 (short-range dependence)")
    return math.ceil(n ** (1.0 / (2.0 * (tau - 1.0))) - 1e-12)
