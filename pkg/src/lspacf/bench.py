"""
Monte-Carlo benchmark scenarios.

Scenario ids are slash-separated:

``table1/<model>/<basis>/<setting>``
    Type-I error of a null setting at n = 600. ``model`` is ``5.1``
    (stationary AR(2)) or ``5.2`` (time-varying AR(2)); settings 1-4 are
    single-lag nulls and setting 5 is the white-noise null.
``tableD1/<model>``
    MISE(j), j = 1..4, of the sieve PACF estimator at n = 1024 with
    delta1 = 0.5, delta2 = 0.
``power/<model>``
    White-noise test power against AR(1) alternatives with delta1 in
    {0, 0.1, ..., 0.5}, n = 600.

Replicate r uses the seed derived from (seed, r). The power sweep reuses it
for every delta1, so the curves are computed under common random numbers.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .basis import BasisFamily, make_basis
from .errors import InvalidArgumentError, UnknownScenarioError
from .infer import TestKind
from .oracle import pacf_oracle
from .sieve import fit, mise
from .simulate import model_acf, simulate, tvar2
from .tune import auto_test, default_c_grid, lag_cutoff, select_c, whitenoise_test

# (delta1, delta2, lag); lag None marks the white-noise setting
TABLE1_SETTINGS = {
    1: (0.5, 0.0, 2),
    2: (0.5, 0.0, 4),
    3: (0.3, 0.3, 3),
    4: (0.3, 0.3, 5),
    5: (0.0, 0.0, None),
}
MODELS = {"5.1": True, "5.2": False}  # model id -> stationary flag
POWER_DELTAS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
TAU = 4.0  # dependence decay order behind the white-noise lag h = j*
N_TABLE1 = 600
N_MISE = 1024
MISE_LAGS = (1, 2, 3, 4)


@dataclass
class BenchReport:
    scenario: str
    replicates: int
    seed: int
    cells: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    settings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def replicate_seed(seed: int, r: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(r)]).generate_state(1)[0])


def white_noise_lag(n: int) -> int:
    """h used by the benchmark white-noise tests: the cutoff j* at tau = 4."""
    return lag_cutoff(n, TAU)


def parse_scenario(scenario: str) -> tuple[str, list[str]]:
    parts = scenario.strip().split("/")
    head, rest = parts[0], parts[1:]
    if head == "table1" and len(rest) == 3:
        model, basis, setting = rest
        ok = model in MODELS and basis in ("fourier", "legendre", "chebyshev")
        if ok and setting.isdigit() and int(setting) in TABLE1_SETTINGS:
            return head, rest
    elif head in ("tableD1", "power") and len(rest) == 1 and rest[0] in MODELS:
        return head, rest
    raise UnknownScenarioError(scenario)


def run_scenario(
    scenario: str,
    replicates: int,
    seed: int,
    B: int = 500,
    alpha: float = 0.05,
    workers: int | None = None,
) -> BenchReport:
    head, args = parse_scenario(scenario)
    if replicates < 1:
        raise InvalidArgumentError("need at least one replicate")
    start = time.perf_counter()
    if head == "table1":
        cells, settings = _table1(args, replicates, seed, B, alpha, workers)
    elif head == "tableD1":
        cells, settings = _mise(args[0], replicates, seed)
    else:
        cells, settings = _power(args[0], replicates, seed, B, alpha, workers)
    return BenchReport(scenario, replicates, seed, cells, time.perf_counter() - start, settings)


def _table1(args, reps, seed, B, alpha, workers):
    model, basis, setting = args[0], BasisFamily(args[1]), int(args[2])
    d1, d2, lag = TABLE1_SETTINGS[setting]
    spec = tvar2(d1, d2, MODELS[model])
    h = white_noise_lag(N_TABLE1)
    rejections, cs, ms = 0, [], []
    for r in range(reps):
        s = replicate_seed(seed, r)
        x = simulate(spec, N_TABLE1, s)
        kw = dict(family=basis, B=B, alpha=alpha, seed=s, workers=workers)
        if lag is None:
            res = whitenoise_test(x, h=h, **kw)
        else:
            res = auto_test(x, TestKind.SINGLE_LAG, lag, **kw)
        rejections += res.reject
        cs.append(res.c)
        ms.append(res.m)
    cells = {"rejection_rate": rejections / reps}
    settings = {
        "n": N_TABLE1,
        "delta1": d1,
        "delta2": d2,
        "kind": "whitenoise" if lag is None else "lag",
        "lag_or_h": h if lag is None else lag,
        "alpha": alpha,
        "B": B,
        "basis": basis.value,
        "median_c": float(np.median(cs)),
        "median_m": float(np.median(ms)),
    }
    return cells, settings


def _mise(model, reps, seed, family: str = "legendre"):
    spec = tvar2(0.5, 0.0, MODELS[model])
    acf = model_acf(spec)
    grid = (np.arange(1000) + 0.5) / 1000
    truths = {j: pacf_oracle(acf, j, grid).values for j in MISE_LAGS}
    errs = {j: [] for j in MISE_LAGS}
    for r in range(reps):
        x = simulate(spec, N_MISE, replicate_seed(seed, r))
        for j in MISE_LAGS:
            c, _ = select_c(x, default_c_grid(N_MISE, j, family), j, family)
            f = fit(x, j, make_basis(family, c))
            errs[j].append(mise(f, _tabulated(grid, truths[j])))
    cells = {f"MISE({j})": float(np.mean(v)) for j, v in errs.items()}
    return cells, {"n": N_MISE, "delta1": 0.5, "delta2": 0.0, "basis": family}


def _tabulated(grid, values):
    def truth(t):
        return np.interp(t, grid, values)

    return truth


def _power(model, reps, seed, B, alpha, workers, family: str = "legendre"):
    h = white_noise_lag(N_TABLE1)
    rates = {}
    for d1 in POWER_DELTAS:
        spec = tvar2(d1, 0.0, MODELS[model])
        rej = 0
        for r in range(reps):
            s = replicate_seed(seed, r)
            x = simulate(spec, N_TABLE1, s)
            res = whitenoise_test(x, h=h, family=family, B=B, alpha=alpha, seed=s, workers=workers)
            rej += res.reject
        rates[f"delta1={d1:g}"] = rej / reps
    settings = {"n": N_TABLE1, "delta2": 0.0, "h": h, "alpha": alpha, "B": B, "basis": family}
    return rates, settings


def is_monotone(values, tol: float = 0.0) -> bool:
    """Nondecreasing up to ``tol``."""
    vals = list(values)
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))

