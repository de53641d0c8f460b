"""
Test statistics for time-varying PACFs and their multiplier-bootstrap calibration.

Three tests share one machinery:

``lag``         H0: rho_j(t) == 0 for a single lag j; statistic T1 = int rho_j^2
``whitenoise``  H0: all PACFs vanish; statistic T2 = sum_k int phi_{h,k}^2 from
                one AR(h) sieve fit
``constancy``   H0: rho_j(t) is constant in t; statistic int (rho_j - mean)^2

Each statistic, multiplied by n, is a quadratic form in the normalised score
vector X = n^{-1/2} sum_i w_i (x) B(i/n). The bootstrap replaces X by
Phi = A' R with A the matrix of block sums of the estimated scores and R a
vector of i.i.d. standard Gaussian multipliers.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import linalg

from .basis import BasisSet, make_basis
from .errors import InvalidArgumentError
from .sieve import SieveFit, build_design, fit, integrated_square, lag_matrix, residuals

# Replicates per RNG substream; fixed so results do not depend on worker count.
CHUNK = 50
MIN_REPLICATES = 100


class TestKind(str, enum.Enum):
    SINGLE_LAG = "lag"
    WHITE_NOISE = "whitenoise"
    CONSTANCY = "constancy"

    __test__ = False  # keep pytest from collecting the enum


def worker_count(requested: int | None = None) -> int:
    """Number of worker threads, capped by ``LSPACF_THREADS`` when set."""
    cap = os.environ.get("LSPACF_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 1000
    m: int = 10
    seed: int = 0
    alpha: float = 0.05

    def __post_init__(self):
        if self.B < MIN_REPLICATES:
            raise InvalidArgumentError(f"need at least {MIN_REPLICATES} bootstrap replicates")
        if self.m < 1:
            raise InvalidArgumentError("block size m must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError("alpha must lie in (0, 1)")


@dataclass
class TestResult:
    kind: TestKind
    lag_or_h: int
    T: float
    nT: float
    p_value: float
    reject: bool
    alpha: float
    B: int
    c: int
    m: int
    basis: str
    seed: int
    boot: np.ndarray = field(repr=False)
    tuning: dict = field(default_factory=dict, repr=False)

    __test__ = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        del out["boot"]
        if not out["tuning"]:
            del out["tuning"]
        return out


# -- statistics ---------------------------------------------------------------


def stat_T1(f: SieveFit) -> float:
    """int_0^1 rho_hat_j(t)^2 dt for a fit at lag j."""
    return integrated_square(f, f.blocks[-1])


def stat_T2(f: SieveFit) -> float:
    """sum_k int_0^1 phi_hat_{h,k}(t)^2 dt for a fit at lag h."""
    return float(sum(integrated_square(f, blk) for blk in f.blocks))


def stat_TBP(x, basis: BasisSet, h: int) -> float:
    """Box-Pierce style sum of integrated squared PACFs, one fit per lag 1..h."""
    if h < 1:
        raise InvalidArgumentError("h must be positive")
    return float(sum(stat_T1(fit(x, k, basis)) for k in range(1, h + 1)))


def stat_T1star(f: SieveFit) -> float:
    """int_0^1 (rho_hat(t) - int rho_hat)^2 dt; needs alpha_1 == 1."""
    blk = f.blocks[-1]
    if f.basis.exact_orthonormal:
        return float(blk[1:] @ blk[1:])
    centred = blk.copy()
    centred[0] = 0.0
    return integrated_square(f, centred)


def statistic(f: SieveFit, kind: TestKind) -> float:
    kind = TestKind(kind)
    if kind is TestKind.SINGLE_LAG:
        return stat_T1(f)
    if kind is TestKind.WHITE_NOISE:
        return stat_T2(f)
    return stat_T1star(f)


# -- bootstrap ----------------------------------------------------------------


class BlockScores:
    """Normalised block-sum scores of a fit, reusable across block sizes.

    Row i (i = l+1..n-m) of :meth:`matrix` is

        [(sum_{j=i}^{i+m} w_j) (x) B(i/n)] / sqrt((n-m-l+1) m)

    with w_j = (x_{j-1}, ..., x_{j-l}) e_j. With ``correct=True`` the block
    residuals e_B are replaced by (I - H_BB)^{-1/2} e_B, H being the hat
    matrix of the sieve regression. OLS residuals are orthogonal to the
    design, so uncorrected block sums lose variance roughly in proportion to
    (columns x m / n); the adjustment restores E[S S'] under conditional
    homoscedasticity. The inverse square root is applied through its power
    series in Q_B'Q_B, so everything reduces to cumulative sums.
    """

    SERIES_TERMS = 25

    def __init__(self, x, f: SieveFit, correct: bool = True):
        x = np.asarray(getattr(x, "values", x), dtype=float)
        self.f = f
        self.correct = correct
        ell = f.lag
        eps = residuals(f, x)
        lags = lag_matrix(x, ell)
        self._cw = _cumsum0(lags * eps[:, None])
        if correct:
            design = build_design(x, ell, f.basis, f.n_time).matrix
            q = linalg.solve_triangular(f.r_factor, design.T, trans="T", lower=False).T
            self._cu = _cumsum0(q * eps[:, None])
            self._cg = _cumsum0(q[:, :, None] * q[:, None, :])
            self._cd = _cumsum0(lags[:, :, None] * q[:, None, :])

    def matrix(self, m: int) -> np.ndarray:
        f = self.f
        n, ell = f.n, f.lag
        if m < 1 or ell + m >= n:
            raise InvalidArgumentError(f"block size m={m} infeasible for n={n}, lag={ell}")
        nrows = n - m - ell
        lo, hi = np.arange(nrows), np.arange(nrows) + m + 1
        sums = self._cw[hi] - self._cw[lo]
        if self.correct:
            u = self._cu[hi] - self._cu[lo]
            g = self._cg[hi] - self._cg[lo]
            d = self._cd[hi] - self._cd[lo]
            # (1 - x)^{-1/2} - 1 = sum_k coef_k x^k with coef_k = C(2k, k) / 4^k
            term, acc, coef = u, 0.5 * u, 0.5
            for k in range(2, self.SERIES_TERMS + 1):
                term = np.einsum("ipq,iq->ip", g, term)
                coef *= (2 * k - 1) / (2 * k)
                acc = acc + coef * term
            sums = sums + np.einsum("ilp,ip->il", d, acc)
        t = np.arange(ell + 1, n - m + 1) / f.n_time
        bvals = f.basis(t)
        a = (sums[:, :, None] * bvals[:, None, :]).reshape(nrows, ell * f.c)
        return a / math.sqrt((n - m - ell + 1) * m)


def _cumsum0(arr: np.ndarray) -> np.ndarray:
    out = np.zeros((arr.shape[0] + 1,) + arr.shape[1:])
    np.cumsum(arr, axis=0, out=out[1:])
    return out


def block_scores(x, f: SieveFit, m: int, correct: bool = True) -> np.ndarray:
    """Score matrix A with Phi = A' R and Pi_hat = A' A (see :class:`BlockScores`)."""
    return BlockScores(x, f, correct).matrix(m)


def bootstrap_phi(x, f: SieveFit, m: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the multiplier-bootstrap vector Phi."""
    a = block_scores(x, f, m)
    return a.T @ rng.standard_normal(a.shape[0])


def _selector(f: SieveFit, kind: TestKind) -> np.ndarray:
    """Indices of Sigma^{-1} Phi entering the quadratic form."""
    kind = TestKind(kind)
    last = (f.lag - 1) * f.c
    if kind is TestKind.WHITE_NOISE:
        return np.arange(f.lag * f.c)
    if kind is TestKind.SINGLE_LAG:
        return np.arange(last, last + f.c)
    # constancy: identity block deflated by the constant direction
    if f.c < 2:
        raise InvalidArgumentError("constancy test needs at least two basis functions")
    return np.arange(last + 1, last + f.c)


def bootstrap_stat(phi: np.ndarray, f: SieveFit, kind: TestKind) -> float | np.ndarray:
    """Quadratic form Phi' Sigma^{-1} M Sigma^{-1} Phi (M = I for white noise).

    ``phi`` may be a matrix with one replicate per column.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape[0] != f.lag * f.c:
        raise InvalidArgumentError("Phi has the wrong dimension for this fit")
    proj = f.sigma_inv_apply(phi)[_selector(f, kind)]
    out = np.sum(proj**2, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def _chunk_rng(seed: int, lag: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(lag), int(chunk)])


def bootstrap_distribution(
    x,
    f: SieveFit,
    m: int,
    B: int,
    seed: int,
    kind: TestKind,
    workers: int | None = None,
) -> np.ndarray:
    """B bootstrap replicates, in replicate order (not sorted).

    Replicates are generated in chunks of ``CHUNK`` with an independent
    substream per (seed, lag, chunk index).
    """
    a = block_scores(x, f, m)
    sel = _selector(f, kind)
    # G = rows of Sigma^{-1} A' kept by M; each replicate is |G R|^2
    g = f.sigma_inv_apply(a.T)[sel]
    nrows = a.shape[0]
    nchunks = -(-B // CHUNK)

    def run(ch: int) -> np.ndarray:
        size = min(CHUNK, B - ch * CHUNK)
        r = _chunk_rng(seed, f.lag, ch).standard_normal((nrows, size))
        return np.sum((g @ r) ** 2, axis=0)

    nw = min(worker_count(workers), nchunks)
    if nw == 1:
        parts = [run(ch) for ch in range(nchunks)]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(run, range(nchunks)))
    return np.concatenate(parts)


def decide(nT: float, boot: np.ndarray, alpha: float) -> tuple[float, bool, np.ndarray]:
    """p-value 1 - B*/B and the rejection rule nT > T^(floor(B(1-alpha)))."""
    ordered = np.sort(boot)
    B = ordered.size
    b_star = int(np.searchsorted(ordered, nT, side="right"))
    p = (B - b_star) / B  # = 1 - B*/B without the rounding
    idx = math.floor(B * (1.0 - alpha))
    reject = bool(nT > ordered[idx - 1]) if idx >= 1 else True
    return p, reject, ordered


def run_test(
    x,
    kind: TestKind | str,
    lag: int,
    basis: BasisSet,
    config: BootstrapConfig,
    workers: int | None = None,
    tuning: dict | None = None,
) -> TestResult:
    """Multiplier bootstrap test at fixed (c, m).

    ``lag`` is j for the single-lag and constancy tests and h for the white
    noise test. Deterministic given ``config.seed``.
    """
    kind = TestKind(kind)
    f = fit(x, lag, basis)
    T = statistic(f, kind)
    nT = f.n * T
    boot = bootstrap_distribution(x, f, config.m, config.B, config.seed, kind, workers)
    p, reject, ordered = decide(nT, boot, config.alpha)
    return TestResult(
        kind=kind,
        lag_or_h=lag,
        T=T,
        nT=nT,
        p_value=p,
        reject=reject,
        alpha=config.alpha,
        B=config.B,
        c=basis.c,
        m=config.m,
        basis=basis.family.value,
        seed=config.seed,
        boot=ordered,
        tuning=dict(tuning or {}),
    )


def run_test_fixed(x, kind, lag, family="legendre", c=5, m=10, B=1000, alpha=0.05, seed=0):
    """Convenience wrapper building the basis and config from plain values."""
    return run_test(x, kind, lag, make_basis(family, c), BootstrapConfig(B, m, seed, alpha))
