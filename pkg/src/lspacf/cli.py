"""
Command-line interface.

Every command writes its outputs atomically and stores the resolved run
configuration in a ``<output>.config.json`` sidecar, so a run can be repeated
from its outputs alone. Exit codes: 0 success, 2 invalid input, 3 numerical
failure, 4 unknown scenario.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__
from .basis import BasisFamily, make_basis
from .bench import run_scenario
from .errors import (
    DomainError,
    InvalidArgumentError,
    ModelUnstableError,
    SampleTooSmallError,
    SingularSystemError,
    UnknownScenarioError,
    UnsupportedModelError,
)
from .infer import TestKind
from .io import atomic_write_text, format_csv, ingest_csv, svg_lines, write_json, write_series, write_sidecar
from .oracle import pacf_oracle
from .sieve import eval_pacf, fit
from .simulate import model_acf, simulate, tvar2, tvma1
from .tune import (
    H_CAP,
    TuningRecord,
    auto_test,
    default_c_grid,
    default_m_grid,
    lag_cutoff,
    order_select,
    select_c,
    select_h,
    select_m,
    whitenoise_test,
)

logger = logging.getLogger("lspacf")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_SCENARIO = 0, 2, 3, 4


def _auto_int(value: str):
    if value == "auto":
        return value
    try:
        out = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {value!r}") from None
    if out < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return out


def _positive(value: str) -> int:
    out = int(value)
    if out < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return out


def _add_model(p):
    p.add_argument("--model", choices=["tvar2", "tvma1"], default="tvar2")
    p.add_argument("--delta1", type=float, default=0.0)
    p.add_argument("--delta2", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0, help="MA(1) coefficient for tvma1")
    p.add_argument("--stationary", action="store_true", help="constant coefficients, unit scale")


def _add_input(p):
    p.add_argument("--in", dest="input", required=True, help="CSV file with one numeric column")
    p.add_argument("--column", default=None, help="column name or 0-based index")
    p.add_argument("--demean", action="store_true", help="subtract the sample mean first")


def _add_basis(p, c_default="auto"):
    p.add_argument("--basis", choices=[b.value for b in BasisFamily], default="legendre")
    p.add_argument("--c", type=_auto_int, default=c_default)


def _add_boot(p):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--m", type=_auto_int, default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive, default=None, help="worker threads (LSPACF_THREADS caps this)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lspacf", description="Time-varying PACF estimation and bootstrap tests."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a benchmark series")
    _add_model(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="true local PACF of a benchmark model")
    _add_model(p)
    p.add_argument("--lag", type=_positive, required=True)
    p.add_argument("--grid-points", type=_positive, default=1000)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="sieve estimate of one PACF curve")
    _add_input(p)
    _add_basis(p)
    p.add_argument("--lag", type=_positive, required=True)
    p.add_argument("--grid-points", type=_positive, default=1000)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("test", help="multiplier bootstrap test")
    _add_input(p)
    _add_basis(p)
    _add_boot(p)
    p.add_argument("--kind", choices=[k.value for k in TestKind], required=True)
    p.add_argument("--lag", type=_positive, default=None, help="lag j (lag and constancy tests)")
    p.add_argument("--h", type=_auto_int, default="auto", help="lag h of the white-noise test")
    p.add_argument("--h-cap", type=_positive, default=H_CAP)
    p.add_argument("--json", default=None, help="write the result here as well as to stdout")

    p = sub.add_parser("tune", help="data-driven tuning parameters")
    _add_input(p)
    _add_basis(p)
    _add_boot(p)
    p.add_argument("--what", choices=["c", "m", "h", "order"], required=True)
    p.add_argument("--lag", type=_positive, default=1, help="working lag for c and m")
    p.add_argument("--tau", type=float, default=None, help="decay order; sets the order cap to j*")
    p.add_argument("--cap", type=_positive, default=None, help="cap h* or p*")

    p = sub.add_parser("pacf-plot", help="estimated PACF curves for lags 1..L")
    _add_input(p)
    _add_basis(p)
    p.add_argument("--lags", type=int, required=True)
    p.add_argument("--grid-points", type=_positive, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("pvalue-sweep", help="single-lag p-values for lags 1..L")
    _add_input(p)
    _add_basis(p)
    _add_boot(p)
    p.add_argument("--lags", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("bench", help="reproduce a Monte-Carlo benchmark cell")
    p.add_argument("--scenario", required=True)
    p.add_argument("--replicates", type=_positive, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--threads", type=_positive, default=None)
    p.add_argument("--json", default=None)
    return parser


def _model_spec(args):
    if args.model == "tvar2":
        return tvar2(args.delta1, args.delta2, args.stationary)
    return tvma1(args.delta, args.stationary)


def _load(args) -> np.ndarray:
    column = args.column
    if column is not None and column.isdigit():
        column = int(column)
    x = ingest_csv(args.input, column).values
    return x - x.mean() if args.demean else x


def _config(args, **resolved) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg.update(resolved)
    cfg["version"] = __version__
    return cfg


def _grid(npts: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, npts)


def _resolve_c(x, lag, args):
    if args.c != "auto":
        return int(args.c), {}
    c, info = select_c(x, default_c_grid(x.size, lag, args.basis), lag, args.basis)
    return c, info


def cmd_simulate(args) -> int:
    ts = simulate(_model_spec(args), args.n, args.seed)
    write_series(args.out, ts)
    write_sidecar(args.out, _config(args))
    return EXIT_OK


def cmd_oracle(args) -> int:
    t = _grid(args.grid_points)
    curve = pacf_oracle(model_acf(_model_spec(args)), args.lag, t)
    rows = ((ti, args.lag, v) for ti, v in zip(curve.t, curve.values))
    atomic_write_text(args.out, format_csv(["t", "lag", "rho"], rows))
    write_sidecar(args.out, _config(args))
    return EXIT_OK


def cmd_estimate(args) -> int:
    x = _load(args)
    c, _ = _resolve_c(x, args.lag, args)
    f = fit(x, args.lag, make_basis(args.basis, c))
    t = _grid(args.grid_points)
    rho = eval_pacf(f, t)
    cfg = _config(args, c=c)
    atomic_write_text(args.out, format_csv(["t", "lag", "rho_hat"], ((a, args.lag, b) for a, b in zip(t, rho))))
    write_sidecar(args.out, cfg)
    if args.svg:
        atomic_write_text(args.svg, svg_lines({f"lag {args.lag}": (t, rho)}, f"estimated PACF, lag {args.lag}"))
        write_sidecar(args.svg, cfg)
    return EXIT_OK


def cmd_test(args) -> int:
    x = _load(args)
    kind = TestKind(args.kind)
    kw = dict(
        family=args.basis, c=args.c, m=args.m, B=args.B, alpha=args.alpha, seed=args.seed, workers=args.threads
    )
    if kind is TestKind.WHITE_NOISE:
        res = whitenoise_test(x, h=args.h, h_cap=args.h_cap, **kw)
    else:
        if args.lag is None:
            raise InvalidArgumentError(f"--lag is required for the {kind.value} test")
        res = auto_test(x, kind, args.lag, **kw)
    out = res.to_dict()
    out.pop("tuning", None)
    text = json.dumps(out, indent=2)
    print(text)
    if args.json:
        payload = dict(out, tuning=res.tuning, config=_config(args, c=res.c, m=res.m, lag_or_h=res.lag_or_h))
        write_json(args.json, payload)
    return EXIT_OK


def cmd_tune(args) -> int:
    x = _load(args)
    n = x.size
    rec = TuningRecord(seeds=[args.seed])
    test_kw = dict(family=args.basis, c=args.c, m=args.m, B=args.B, seed=args.seed, workers=args.threads)
    extra = {}
    if args.what in ("c", "m"):
        c, info = _resolve_c(x, args.lag, args)
        rec.c = c
        rec.c_grid, rec.cv_mse = info.get("c_grid", []), info.get("cv_mse", [])
        if args.what == "m":
            f = fit(x, args.lag, make_basis(args.basis, c))
            m, minfo = select_m(x, f, default_m_grid(n, args.lag, c))
            rec.m, rec.m_grid, rec.se_profile = m, minfo["m_grid"], minfo["se_profile"]
    elif args.what == "h":
        h, info = select_h(x, args.cap or H_CAP, args.alpha, **test_kw)
        rec.h, rec.h_capped = h, info["capped"]
        extra["p_values"] = info["p_values"]
    else:
        if args.cap is not None:
            cap = args.cap
        elif args.tau is not None:
            cap = lag_cutoff(n, args.tau)
        else:
            raise InvalidArgumentError("order selection needs --cap or --tau")
        p_tilde, pvals = order_select(x, cap, args.alpha, **test_kw)
        extra.update(order=p_tilde, p_cap=cap, p_values=pvals)
    if args.tau is not None:
        extra["j_star"] = lag_cutoff(n, args.tau)
    print(json.dumps(dict(rec.to_dict(), **extra), indent=2))
    return EXIT_OK


def cmd_pacf_plot(args) -> int:
    if args.lags < 1:
        raise InvalidArgumentError("--lags must be at least 1")
    x = _load(args)
    t = _grid(args.grid_points)
    rows, curves, cs = [], {}, {}
    for j in range(1, args.lags + 1):
        c, _ = _resolve_c(x, j, args)
        rho = eval_pacf(fit(x, j, make_basis(args.basis, c)), t)
        rows.extend((a, j, b) for a, b in zip(t, rho))
        curves[f"lag {j}"] = (t, rho)
        cs[j] = c
    cfg = _config(args, c_per_lag=cs)
    atomic_write_text(args.out, format_csv(["t", "lag", "rho_hat"], rows))
    write_sidecar(args.out, cfg)
    if args.svg:
        atomic_write_text(args.svg, svg_lines(curves, "estimated PACFs", hlines=(0.0,)))
        write_sidecar(args.svg, cfg)
    return EXIT_OK


def cmd_pvalue_sweep(args) -> int:
    if args.lags < 1:
        raise InvalidArgumentError("--lags must be at least 1")
    x = _load(args)
    lags, pvals, tuned = [], [], {}
    for j in range(1, args.lags + 1):
        res = auto_test(
            x, TestKind.SINGLE_LAG, j, family=args.basis, c=args.c, m=args.m,
            B=args.B, alpha=args.alpha, seed=args.seed, workers=args.threads,
        )
        lags.append(j)
        pvals.append(res.p_value)
        tuned[j] = {"c": res.c, "m": res.m}
    cfg = _config(args, per_lag=tuned)
    atomic_write_text(args.out, format_csv(["lag", "p_value"], zip(lags, pvals)))
    write_sidecar(args.out, cfg)
    if args.svg:
        svg = svg_lines({"p-value": (np.array(lags), np.array(pvals))}, "single-lag p-values", hlines=(args.alpha,))
        atomic_write_text(args.svg, svg)
        write_sidecar(args.svg, cfg)
    return EXIT_OK


def cmd_bench(args) -> int:
    report = run_scenario(args.scenario, args.replicates, args.seed, args.B, args.alpha, args.threads)
    out = report.to_dict()
    print(json.dumps(out, indent=2))
    if args.json:
        write_json(args.json, dict(out, config=_config(args)))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "oracle": cmd_oracle,
    "estimate": cmd_estimate,
    "test": cmd_test,
    "tune": cmd_tune,
    "pacf-plot": cmd_pacf_plot,
    "pvalue-sweep": cmd_pvalue_sweep,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UnknownScenarioError as exc:
        print(f"error: unknown scenario {exc.args[0]!r}", file=sys.stderr)
        return EXIT_SCENARIO
    except SingularSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (
        InvalidArgumentError,
        DomainError,
        SampleTooSmallError,
        ModelUnstableError,
        UnsupportedModelError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
