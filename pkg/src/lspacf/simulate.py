"""
Benchmark generators for stationary and locally stationary AR/MA processes.

The two AR(2) benchmarks are::

    stationary:     x_i = d1 x_{i-1} + d2 x_{i-2} + e_i
    time-varying:   x_i = d1 sin(2 pi i/n) x_{i-1} + d2 cos(2 pi i/n) x_{i-2}
                          + (0.4 + 0.4 |sin(2 pi i/n)|) e_i

and the MA(1) pair is x_i = e_i + d e_{i-1} with d optionally multiplied by
sin(2 pi i/n). Innovations are i.i.d. standard Gaussian.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, ModelUnstableError, UnsupportedModelError
from .oracle import AcfFunction

BURN_IN = 200
STABILITY_GRID = 1000

Func = Callable[[np.ndarray], np.ndarray]


class ModelKind(str, enum.Enum):
    TVAR2 = "tvar2"
    TVMA1 = "tvma1"
    CUSTOM_TVAR = "custom_tvar"
    CUSTOM_TVMA = "custom_tvma"


def _const(value: float) -> Func:
    return lambda t: np.full(np.shape(t), float(value))


def _unit(t):
    return np.ones(np.shape(t))


@dataclass(frozen=True)
class ModelSpec:
    """A (time-varying) AR or MA model on rescaled time [0, 1].

    Benchmark models are built with :func:`tvar2` / :func:`tvma1`; custom
    models pass coefficient functions directly.
    """

    kind: ModelKind
    delta1: float = 0.0
    delta2: float = 0.0
    delta: float = 0.0
    stationary: bool = True
    ar: tuple[Func, ...] = field(default=(), compare=False)
    ma: tuple[Func, ...] = field(default=(), compare=False)
    sigma: Func = field(default=_unit, compare=False)

    def __post_init__(self):
        if self.kind is ModelKind.TVAR2:
            for name in ("delta1", "delta2"):
                val = getattr(self, name)
                if not 0.0 <= val <= 0.5:
                    warnings.warn(f"{name}={val} is outside the benchmark range [0, 0.5]")
        if self.kind is ModelKind.TVMA1 and not 0.0 <= self.delta <= 0.5:
            warnings.warn(f"delta={self.delta} is outside the benchmark range [0, 0.5]")

    @property
    def is_ar(self) -> bool:
        return self.kind in (ModelKind.TVAR2, ModelKind.CUSTOM_TVAR)

    def ar_coefs(self, t) -> np.ndarray:
        """Array of shape (len(t), p) with the AR coefficients at each t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.ar:
            return np.zeros((t.size, 0))
        return np.column_stack([np.broadcast_to(f(t), t.shape) for f in self.ar])

    def ma_coefs(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.ma:
            return np.zeros((t.size, 0))
        return np.column_stack([np.broadcast_to(f(t), t.shape) for f in self.ma])

    def scale(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.broadcast_to(self.sigma(t), t.shape).astype(float)

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta": self.delta,
            "stationary": self.stationary,
        }


def tvar2(delta1: float, delta2: float, stationary: bool = True) -> ModelSpec:
    if stationary:
        ar = (_const(delta1), _const(delta2))
        sigma = _unit
    else:
        ar = (
            lambda t: delta1 * np.sin(2 * np.pi * t),
            lambda t: delta2 * np.cos(2 * np.pi * t),
        )
        sigma = lambda t: 0.4 + 0.4 * np.abs(np.sin(2 * np.pi * t))  # noqa: E731
    return ModelSpec(ModelKind.TVAR2, delta1, delta2, 0.0, stationary, ar, (), sigma)


def tvma1(delta: float, stationary: bool = True) -> ModelSpec:
    if stationary:
        ma = (_const(delta),)
    else:
        ma = (lambda t: delta * np.sin(2 * np.pi * t),)
    return ModelSpec(ModelKind.TVMA1, 0.0, 0.0, delta, stationary, (), ma, _unit)


def custom_tvar(coefs: Sequence[Func], sigma: Func = _unit) -> ModelSpec:
    return ModelSpec(ModelKind.CUSTOM_TVAR, stationary=False, ar=tuple(coefs), sigma=sigma)


def custom_tvma(coefs: Sequence[Func], sigma: Func = _unit) -> ModelSpec:
    return ModelSpec(ModelKind.CUSTOM_TVMA, stationary=False, ma=tuple(coefs), sigma=sigma)


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise InvalidArgumentError("a time series needs at least one observation")
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("time series values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


def max_root_modulus(coefs: np.ndarray) -> np.ndarray:
    """Largest |eigenvalue| of the AR companion matrix, per row of ``coefs``.

    The frozen polynomial 1 - a_1 z - ... - a_p z^p has all roots outside the
    unit disk exactly when this is below one.
    """
    coefs = np.atleast_2d(coefs)
    npts, p = coefs.shape
    if p == 0:
        return np.zeros(npts)
    comp = np.zeros((npts, p, p))
    comp[:, 0, :] = coefs
    if p > 1:
        comp[:, np.arange(1, p), np.arange(p - 1)] = 1.0
    return np.abs(np.linalg.eigvals(comp)).max(axis=1)


def check_stable(spec: ModelSpec) -> None:
    if not spec.is_ar:
        return
    grid = np.linspace(0.0, 1.0, STABILITY_GRID)
    mod = max_root_modulus(spec.ar_coefs(grid))
    if np.any(mod >= 1.0):
        bad = grid[np.argmax(mod)]
        raise ModelUnstableError(f"frozen AR polynomial has a unit-disk root near t={bad:.3f}")
    if np.any(spec.scale(grid) <= 0):
        raise InvalidArgumentError("innovation scale must be positive on [0, 1]")


def simulate(spec: ModelSpec, n: int, seed: int) -> TimeSeries:
    """Draw a length-``n`` path of ``spec``; bit-reproducible given ``seed``."""
    if n < 10:
        raise InvalidArgumentError("simulate needs n >= 10")
    check_stable(spec)
    rng = np.random.default_rng(seed)
    t = np.arange(1, n + 1) / n
    sig = spec.scale(t)

    if spec.is_ar:
        coefs = spec.ar_coefs(t)
        p = coefs.shape[1]
        eps = rng.standard_normal(BURN_IN + n)
        a0 = spec.ar_coefs(0.0)[0]
        s0 = float(spec.scale(0.0)[0])
        hist = [0.0] * p
        # burn-in with coefficients frozen at t = 0
        for e in eps[:BURN_IN]:
            new = sum(a0[k] * hist[-1 - k] for k in range(p)) + s0 * e
            hist.append(new)
        hist = hist[-p:] if p else []
        out = np.empty(n)
        rows = coefs.tolist()
        for i in range(n):
            a = rows[i]
            val = sig[i] * eps[BURN_IN + i]
            for k in range(p):
                val += a[k] * hist[-1 - k]
            out[i] = val
            if p:
                hist.append(val)
                del hist[0]
    else:
        theta = spec.ma_coefs(t)
        q = theta.shape[1]
        eps = rng.standard_normal(n + q)
        out = eps[q:].copy()
        for k in range(1, q + 1):
            out += theta[:, k - 1] * eps[q - k : q - k + n]
        out *= sig

    meta = {"model": spec.describe(), "n": n, "seed": seed}
    return TimeSeries(out, seed, meta)


def model_acf(spec: ModelSpec) -> AcfFunction:
    """Frozen-coefficient local autocovariance gamma(t, k) of ``spec``."""
    if spec.is_ar:
        p = len(spec.ar)
        if p > 2:
            raise UnsupportedModelError("analytic ACF is implemented for AR order <= 2")
        check_stable(spec)

        def gamma(t: float, k: int) -> float:
            a = np.zeros(2)
            a[:p] = spec.ar_coefs(t)[0]
            a1, a2 = a
            s2 = float(spec.scale(t)[0]) ** 2
            if max_root_modulus(a[None, :])[0] >= 1.0:
                raise ModelUnstableError(f"frozen AR polynomial unstable at t={t}")
            # stationary second moments: rows are the k=0,1,2 moment equations
            mat = np.array([[1.0, -a1, -a2], [-a1, 1.0 - a2, 0.0], [-a2, -a1, 1.0]])
            g = list(np.linalg.solve(mat, [s2, 0.0, 0.0]))
            while len(g) <= k:
                g.append(a1 * g[-1] + a2 * g[-2])
            return float(g[k])

        return AcfFunction(gamma)

    def gamma_ma(t: float, k: int) -> float:
        theta = np.concatenate([[1.0], spec.ma_coefs(t)[0]])
        s2 = float(spec.scale(t)[0]) ** 2
        if k >= theta.size:
            return 0.0
        return float(s2 * theta[: theta.size - k] @ theta[k:])

    return AcfFunction(gamma_ma)
