"""Scenario presets, parameter sweeps and model comparison."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from factortime.scaling import (
    MODELS,
    DomainError,
    Model,
    ModelEstimate,
    PhysicalParams,
    TrapGeometry,
    canonical_model,
    cavity_estimate,
    cz_estimate,
    raman_estimate,
)

Axis = Literal["L", "rho", "eta", "gamma", "epsilon", "beta", "alpha"]
AXES: tuple[str, ...] = ("L", "rho", "eta", "gamma", "epsilon", "beta", "alpha")


class ScenarioError(ValueError):
    """An estimator failed inside a scenario; the message carries the context."""


@dataclass(frozen=True)
class Scenario:
    name: str
    model: Model
    params: PhysicalParams
    bits: tuple[int, ...]
    geometry: TrapGeometry | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", canonical_model(self.model))
        object.__setattr__(self, "bits", tuple(self.bits))
        if not self.bits:
            raise ScenarioError(f"scenario {self.name!r}: bit list is empty")
        for L in self.bits:
            if isinstance(L, bool) or int(L) != L or L < 1:
                raise ScenarioError(f"scenario {self.name!r}: bit count L must be an integer >= 1, got {L!r}")


_TABLE_PARAMS = PhysicalParams(eta=0.1, rho=1e7, epsilon=1000.0, beta=100.0, alpha=1.0)

PRESETS: dict[str, Scenario] = {
    "cz-paper": Scenario("cz-paper", "CZ", _TABLE_PARAMS, (2, 4)),
    "raman-paper": Scenario("raman-paper", "Raman", _TABLE_PARAMS, (2, 4)),
    # alpha=1 is not a value given with the cavity model; it is a neutral default
    "cavity-unit": Scenario("cavity-unit", "Cavity", _TABLE_PARAMS, (2, 4)),
    # metastable Ba+ level: 45 s lifetime, quoted as gamma = 0.044 1/s
    "barium": Scenario("barium", "CZ", replace(_TABLE_PARAMS, gamma=0.044), (2, 4)),
    # low-frequency transition; rho=1e9 is an illustrative choice
    "microwave": Scenario("microwave", "Cavity", replace(_TABLE_PARAMS, rho=1e9), (2, 4)),
}


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise ScenarioError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


def _estimate(model: Model, bits: int, params: PhysicalParams, geometry: TrapGeometry | None) -> ModelEstimate:
    if model == "CZ":
        return cz_estimate(bits, params, geometry=geometry)
    if model == "Raman":
        return raman_estimate(bits, params)
    return cavity_estimate(bits, params)


def evaluate_scenario(s: Scenario) -> list[ModelEstimate]:
    """One estimate per bit count, in the scenario's order."""
    out = []
    for L in s.bits:
        try:
            out.append(_estimate(s.model, L, s.params, s.geometry))
        except DomainError as exc:
            raise ScenarioError(f"scenario {s.name!r} ({s.model}, L={L}): {exc}") from exc
    return out


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int
    scale: Literal["linear", "log"] = "linear"

    def __post_init__(self) -> None:
        if self.scale not in ("linear", "log"):
            raise ScenarioError(f"grid scale must be 'linear' or 'log', got {self.scale!r}")
        if not (self.start > 0 and self.stop > 0):
            raise ScenarioError("grid bounds must be positive")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ScenarioError("grid bounds must be finite")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 2:
            raise ScenarioError(f"grid count must be an integer >= 2, got {self.count!r}")

    def values(self) -> list[float]:
        if self.scale == "log":
            v = np.geomspace(self.start, self.stop, int(self.count))
        else:
            v = np.linspace(self.start, self.stop, int(self.count))
        v[0], v[-1] = self.start, self.stop
        return sorted(float(x) for x in v)


@dataclass(frozen=True)
class SweepSpec:
    """Vary one parameter of a scenario over a grid.

    For ``axis="L"`` the grid values are rounded to whole bit counts and the
    scenario's own bit list is ignored; for any other axis every grid value
    is combined with each of the scenario's bit counts.
    """

    scenario: Scenario
    axis: Axis
    grid: Grid
    workers: int = 1

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ScenarioError(f"unknown sweep axis {self.axis!r}; choose from {', '.join(AXES)}")
        if self.workers < 1:
            raise ScenarioError("workers must be >= 1")


@dataclass(frozen=True)
class SweepRow:
    value: float
    bits: int
    estimate: ModelEstimate | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    model: Model
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)


def _points(spec: SweepSpec) -> list[tuple[float, int]]:
    values = spec.grid.values()
    if spec.axis == "L":
        return [(float(round(v)), int(round(v))) for v in values]
    return [(v, L) for v in values for L in spec.scenario.bits]


def _row(spec: SweepSpec, value: float, bits: int) -> SweepRow:
    s = spec.scenario
    try:
        params = s.params if spec.axis == "L" else replace(s.params, **{spec.axis: value})
        est = _estimate(s.model, bits, params, s.geometry)
    except (DomainError, ScenarioError) as exc:
        return SweepRow(value, bits, error=str(exc))
    return SweepRow(value, bits, estimate=est)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every grid point; failures are recorded per row.

    Rows come out in grid order whatever ``spec.workers`` is.
    """
    points = _points(spec)
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(lambda p: _row(spec, *p), points))
    else:
        rows = [_row(spec, v, L) for v, L in points]
    return SweepResult(axis=spec.axis, model=spec.scenario.model, rows=tuple(rows))


@dataclass(frozen=True)
class Comparison:
    bits: int
    estimates: dict[str, ModelEstimate]
    errors: dict[str, str]
    ranking: tuple[str, ...]


def compare_models(
    bits: int, params: PhysicalParams, geometry: TrapGeometry | None = None
) -> Comparison:
    """Evaluate all three models and rank them by ``t_min`` (ties in model order)."""
    estimates: dict[str, ModelEstimate] = {}
    errors: dict[str, str] = {}
    for model in MODELS:
        try:
            estimates[model] = _estimate(model, bits, params, geometry)
        except DomainError as exc:
            errors[model] = str(exc)
    ranking = tuple(sorted(estimates, key=lambda m: (estimates[m].t_min, MODELS.index(m))))
    return Comparison(bits=bits, estimates=estimates, errors=errors, ranking=ranking)
