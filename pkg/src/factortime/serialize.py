"""JSON config documents and CSV/JSON/table output.

A config document is a JSON object holding exactly one of ``scenario``,
``sweep`` or ``simulation`` plus optional ``format`` and ``output`` keys.
Documents written by the CLI in JSON format carry an extra ``results`` block
and are themselves valid configs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from typing import Any

from factortime.scaling import ModelEstimate, PhysicalParams, TrapGeometry
from factortime.stirap import LambdaSystem, Pulse, PulseSchedule
from factortime.sweep import Grid, Scenario, ScenarioError, SweepResult, SweepSpec, get_preset

FORMATS = ("csv", "json", "table")
ESTIMATE_COLUMNS = (
    "model",
    "L",
    "tau_el_s",
    "T_s",
    "tau_dec_s",
    "gamma_max_s",
    "t_min_s",
    "feasible",
)
SWEEP_COLUMNS = ("axis",) + ESTIMATE_COLUMNS + ("error",)
_KINDS = ("scenario", "sweep", "simulation")


class ConfigError(ValueError):
    """Malformed or inconsistent config document."""


def fmt_float(x: float | None) -> str:
    """Shortest round-trip text for a float; empty for ``None``."""
    if x is None:
        return ""
    return repr(float(x))


def _check_keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    return obj


def _build(cls, data: dict, where: str):
    names = {f.name for f in fields(cls)}
    _check_keys(data, names, where)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


# --- scenarios -----------------------------------------------------------

def params_from_dict(data: dict, base: PhysicalParams | None = None) -> PhysicalParams:
    merged = asdict(base) if base is not None else {}
    merged.update(_check_keys(data, {f.name for f in fields(PhysicalParams)}, "params"))
    return _build(PhysicalParams, merged, "params")


def scenario_from_dict(data: dict) -> Scenario:
    _check_keys(data, {"preset", "name", "model", "params", "bits", "geometry"}, "scenario")
    base = get_preset(data["preset"]) if "preset" in data else None
    model = data.get("model", base.model if base else None)
    bits = data.get("bits", base.bits if base else None)
    if model is None or bits is None:
        raise ConfigError("scenario: 'model' and 'bits' are required without a preset")
    if isinstance(bits, int):
        bits = [bits]
    params = params_from_dict(data.get("params", {}), base.params if base else PhysicalParams())
    geometry = base.geometry if base else None
    if "geometry" in data:
        geometry = None if data["geometry"] is None else _build(TrapGeometry, data["geometry"], "geometry")
    name = data.get("name", base.name if base else "custom")
    return Scenario(name=name, model=model, params=params, bits=tuple(bits), geometry=geometry)


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "name": s.name,
        "model": s.model,
        "params": asdict(s.params),
        "bits": list(s.bits),
        "geometry": None if s.geometry is None else asdict(s.geometry),
    }


def sweep_from_dict(data: dict) -> SweepSpec:
    _check_keys(data, {"scenario", "axis", "grid", "workers"}, "sweep")
    for key in ("scenario", "axis", "grid"):
        if key not in data:
            raise ConfigError(f"sweep: missing {key!r}")
    grid = _build(Grid, data["grid"], "sweep.grid")
    return SweepSpec(
        scenario=scenario_from_dict(data["scenario"]),
        axis=data["axis"],
        grid=grid,
        workers=int(data.get("workers", 1)),
    )


def sweep_to_dict(spec: SweepSpec) -> dict:
    return {
        "scenario": scenario_to_dict(spec.scenario),
        "axis": spec.axis,
        "grid": asdict(spec.grid),
        "workers": spec.workers,
    }


# --- simulation ----------------------------------------------------------

@dataclass(frozen=True)
class SimulationSpec:
    system: LambdaSystem
    schedule: PulseSchedule
    tol: float = 1e-8
    max_steps: int = 2_000_000
    t_ad_grid: tuple[float, ...] | None = None
    workers: int = 1
    timeseries: str | None = None


def _schedule_from_dict(data: dict) -> PulseSchedule:
    _check_keys(data, {"t_ad", "sigma", "pi", "omega_sigma", "omega_pi", "counterintuitive"}, "schedule")
    if "t_ad" not in data:
        raise ConfigError("schedule: missing 't_ad'")
    if "sigma" in data or "pi" in data:
        if "omega_sigma" in data or "omega_pi" in data:
            raise ConfigError("schedule: give either explicit pulses or omega_sigma/omega_pi")
        try:
            sigma = _build(Pulse, data["sigma"], "schedule.sigma")
            pi = _build(Pulse, data["pi"], "schedule.pi")
        except KeyError as exc:
            raise ConfigError(f"schedule: missing {exc.args[0]!r}") from None
        return PulseSchedule(
            t_ad=data["t_ad"], sigma=sigma, pi=pi,
            counterintuitive=bool(data.get("counterintuitive", True)),
        )
    try:
        sched = PulseSchedule.default(data["t_ad"], data["omega_sigma"], data["omega_pi"])
    except KeyError as exc:
        raise ConfigError(f"schedule: missing {exc.args[0]!r}") from None
    if not data.get("counterintuitive", True):
        sched = sched.intuitive()
    return sched


def _t_ad_grid(data: Any) -> tuple[float, ...]:
    if isinstance(data, list):
        return tuple(float(x) for x in data)
    grid = _build(Grid, dict({"scale": "log"}, **_check_keys(data, {"start", "stop", "count", "scale"}, "t_ad_grid")), "t_ad_grid")
    return tuple(grid.values())


def simulation_from_dict(data: dict) -> SimulationSpec:
    _check_keys(data, {"system", "schedule", "tol", "max_steps", "t_ad_grid", "workers", "timeseries"}, "simulation")
    for key in ("system", "schedule"):
        if key not in data:
            raise ConfigError(f"simulation: missing {key!r}")
    try:
        system = _build(LambdaSystem, data["system"], "simulation.system")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return SimulationSpec(
        system=system,
        schedule=_schedule_from_dict(data["schedule"]),
        tol=float(data.get("tol", 1e-8)),
        max_steps=int(data.get("max_steps", 2_000_000)),
        t_ad_grid=_t_ad_grid(data["t_ad_grid"]) if data.get("t_ad_grid") is not None else None,
        workers=int(data.get("workers", 1)),
        timeseries=data.get("timeseries"),
    )


# --- config documents ----------------------------------------------------

@dataclass(frozen=True)
class Config:
    kind: str
    spec: Any
    format: str | None = None
    output: str | None = None


def load_config(text: str) -> Config:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys(doc, set(_KINDS) | {"format", "output", "results"}, "config")
    present = [k for k in _KINDS if k in doc]
    if len(present) != 1:
        raise ConfigError("config must contain exactly one of scenario, sweep, simulation")
    fmt = doc.get("format")
    if fmt is not None and fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
    kind = present[0]
    try:
        if kind == "scenario":
            spec = scenario_from_dict(doc[kind])
        elif kind == "sweep":
            spec = sweep_from_dict(doc[kind])
        else:
            spec = simulation_from_dict(doc[kind])
    except (ScenarioError, ConfigError):
        raise
    except ValueError as exc:
        raise ConfigError(f"{kind}: {exc}") from exc
    return Config(kind=kind, spec=spec, format=fmt, output=doc.get("output"))


# --- output --------------------------------------------------------------

def estimate_record(est: ModelEstimate) -> dict:
    return {
        "model": est.model,
        "L": est.bits,
        "tau_el_s": est.tau_el,
        "T_s": est.run_time,
        "tau_dec_s": est.tau_dec,
        "gamma_per_s": est.gamma,
        "gamma_max_s": est.gamma_max,
        "t_min_s": est.t_min,
        "p_em": est.p_em,
        "feasible": est.feasible,
        "diagnostics": list(est.diagnostics),
    }


def _csv_cells(est: ModelEstimate) -> list[str]:
    return [
        est.model,
        str(est.bits),
        fmt_float(est.tau_el),
        fmt_float(est.run_time),
        fmt_float(est.tau_dec),
        fmt_float(est.gamma_max),
        fmt_float(est.t_min),
        "true" if est.feasible else "false",
    ]


def estimates_csv(estimates: list[ModelEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ESTIMATE_COLUMNS)
    for est in estimates:
        w.writerow(_csv_cells(est))
    return buf.getvalue()


def sweep_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in result.rows:
        if row.estimate is None:
            cells = [result.model, str(row.bits)] + [""] * 6
        else:
            cells = _csv_cells(row.estimate)
        w.writerow([fmt_float(row.value)] + cells + [row.error or ""])
    return buf.getvalue()


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def scenario_json(s: Scenario, estimates: list[ModelEstimate]) -> str:
    return dumps({
        "scenario": scenario_to_dict(s),
        "format": "json",
        "results": [estimate_record(e) for e in estimates],
    })


def sweep_json(spec: SweepSpec, result: SweepResult) -> str:
    rows = []
    for row in result.rows:
        rec = {"axis": row.value, "L": row.bits}
        rec["estimate"] = None if row.estimate is None else estimate_record(row.estimate)
        rec["error"] = row.error
        rows.append(rec)
    return dumps({"sweep": sweep_to_dict(spec), "format": "json", "results": rows})


def _table_cell(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def table(header: list[str], rows: list[list[Any]]) -> str:
    """Aligned text table; floats shown with 4 significant digits."""
    cells = [header] + [[_table_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


_TABLE_HEADER = ["model", "L", "tau_el [s]", "T [s]", "tau_dec [s]", "gamma_max [1/s]", "t_min [s]", "feasible"]


def _table_row(est: ModelEstimate) -> list[Any]:
    return [est.model, est.bits, est.tau_el, est.run_time, est.tau_dec, est.gamma_max, est.t_min, est.feasible]


def estimates_table(estimates: list[ModelEstimate]) -> str:
    return table(_TABLE_HEADER, [_table_row(e) for e in estimates])


def sweep_table(result: SweepResult) -> str:
    rows = []
    for row in result.rows:
        if row.estimate is None:
            rows.append([row.value, result.model, row.bits] + [None] * 5 + [False, row.error])
        else:
            rows.append([row.value] + _table_row(row.estimate) + [""])
    return table(["axis"] + _TABLE_HEADER + ["error"], rows)
