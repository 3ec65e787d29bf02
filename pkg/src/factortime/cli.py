"""Command-line entry point: ``factortime {estimate,compare,sweep,simulate}``.

Exit codes: 0 success, 2 invalid input, 3 integrator non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from factortime.integrate import ConvergenceError
from factortime.scaling import PhysicalParams
from factortime.serialize import (
    FORMATS,
    Config,
    ConfigError,
    dumps,
    estimate_record,
    estimates_csv,
    estimates_table,
    load_config,
    scenario_json,
    sweep_csv,
    sweep_json,
    sweep_table,
    table,
)
from factortime.stirap import ScheduleError, fit_beta, simulate_transfer, write_timeseries
from factortime.sweep import PRESETS, Scenario, compare_models, evaluate_scenario, get_preset, run_sweep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NONCONVERGED = 3

_PARAM_FLAGS = ("eta", "rho", "epsilon", "gamma", "beta", "alpha", "margin")


class _Usage(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_config(path: str, kind: str) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    cfg = load_config(text)
    if cfg.kind != kind:
        raise ConfigError(f"expected a {kind} config, got {cfg.kind}")
    return cfg


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, help="Lamb-Dicke parameter")
    p.add_argument("--rho", type=float, help="coupling constant [s^-1/2]")
    p.add_argument("--epsilon", type=float, help="gate-count prefactor")
    p.add_argument("--gamma", type=float, help="half Einstein coefficient [1/s]; omit to run at the bound")
    p.add_argument("--beta", type=float, help="adiabatic-transfer loss constant")
    p.add_argument("--alpha", type=float, help="cavity out/in time ratio constant")
    p.add_argument("--margin", type=float, help="factor used for strong inequalities")


def _params_from_args(args: argparse.Namespace, base: PhysicalParams) -> PhysicalParams:
    overrides = {k: getattr(args, k) for k in _PARAM_FLAGS if getattr(args, k) is not None}
    return replace(base, **overrides)


def _cmd_estimate(args: argparse.Namespace) -> int:
    if args.config:
        cfg = _read_config(args.config, "scenario")
        scenario = cfg.spec
        fmt = args.format or cfg.format or "table"
        output = args.output or cfg.output
    else:
        base = get_preset(args.preset) if args.preset else None
        model = args.model or (base.model if base else None)
        if model is None:
            raise _Usage("either --model or --preset is required")
        bits = tuple(args.bits) if args.bits else (base.bits if base else None)
        if bits is None:
            raise _Usage("--bits is required without a preset")
        params = _params_from_args(args, base.params if base else PhysicalParams())
        scenario = Scenario(
            name=base.name if base else "cli", model=model, params=params, bits=bits,
            geometry=base.geometry if base else None,
        )
        fmt = args.format or "table"
        output = args.output
    estimates = evaluate_scenario(scenario)
    if fmt == "json":
        text = scenario_json(scenario, estimates)
    elif fmt == "csv":
        text = estimates_csv(estimates)
    else:
        text = estimates_table(estimates)
    _emit(text, output)
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    base = get_preset(args.preset).params if args.preset else PhysicalParams()
    params = _params_from_args(args, base)
    cmp = compare_models(args.bits, params)
    if args.format == "json":
        doc = {
            "L": cmp.bits,
            "ranking": list(cmp.ranking),
            "estimates": {m: estimate_record(e) for m, e in cmp.estimates.items()},
            "errors": cmp.errors,
        }
        text = dumps(doc)
    else:
        rows = [[rank + 1, m, cmp.estimates[m].t_min, cmp.estimates[m].run_time, cmp.estimates[m].feasible]
                for rank, m in enumerate(cmp.ranking)]
        rows += [["-", m, None, None, err] for m, err in cmp.errors.items()]
        text = table(["rank", "model", "t_min [s]", "T [s]", "feasible"], rows)
    _emit(text, args.output)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _read_config(args.config, "sweep")
    spec = cfg.spec
    # the worker count only changes how rows are scheduled, so the echoed
    # spec keeps the config's value and the output stays byte-identical
    run_spec = spec if args.workers is None else replace(spec, workers=args.workers)
    result = run_sweep(run_spec)
    fmt = args.format or cfg.format or "csv"
    if fmt == "json":
        text = sweep_json(spec, result)
    elif fmt == "csv":
        text = sweep_csv(result)
    else:
        text = sweep_table(result)
    _emit(text, args.output or cfg.output)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _read_config(args.config, "simulation")
    spec = cfg.spec
    result = simulate_transfer(spec.system, spec.schedule, tol=spec.tol, max_steps=spec.max_steps)
    doc = result.summary()
    ts_path = args.timeseries or spec.timeseries
    if ts_path:
        with open(ts_path, "w", encoding="utf-8", newline="") as fh:
            write_timeseries(result, fh)
    if args.fit_beta:
        grid = spec.t_ad_grid
        if grid is None:
            t0 = spec.schedule.t_ad
            grid = (t0, 10 ** (1 / 3) * t0, 10 ** (2 / 3) * t0, 10 * t0)
        fit = fit_beta(spec.system, spec.schedule, grid, tol=spec.tol,
                       max_steps=spec.max_steps, workers=spec.workers)
        doc["beta_fit"] = fit.summary()
    _emit(dumps(doc), args.output or cfg.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factortime",
        description="Decoherence-limited factorization time bounds and adiabatic transfer simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="closed-form estimate for one model")
    p.add_argument("--model", choices=["cz", "raman", "cavity"], type=str.lower)
    p.add_argument("--bits", type=int, nargs="+", metavar="L")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="scenario config document (JSON)")
    _add_param_flags(p)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("compare", help="rank the three models by t_min")
    p.add_argument("--bits", type=int, required=True, metavar="L")
    p.add_argument("--preset", choices=sorted(PRESETS))
    _add_param_flags(p)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep", help="grid sweep from a config document")
    p.add_argument("config")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--workers", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="simulate one adiabatic transfer")
    p.add_argument("config")
    p.add_argument("--fit-beta", action="store_true", help="also fit beta over the config's t_ad_grid")
    p.add_argument("--timeseries", help="write t,P_g1,P_e,P_g2,norm CSV here")
    p.add_argument("--output", "-o")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"factortime: integration failed: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except ScheduleError as exc:
        print(f"factortime: invalid schedule: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (_Usage, ValueError) as exc:
        print(f"factortime: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
