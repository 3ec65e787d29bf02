"""Explicit Runge-Kutta integration of complex ODE systems.

Dormand-Prince 5(4) with local extrapolation and FSAL, plus a fixed-step mode
using the same fifth-order formula for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Dormand & Prince (1980) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B5 = _A[6]
# fifth minus fourth order weights
_E = np.array([
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class ConvergenceError(RuntimeError):
    """The integrator could not reach the end point within its step budget."""


@dataclass
class Trajectory:
    """Accepted steps of an integration run.

    ``max_local_error`` is the largest max-norm local error estimate among
    accepted steps and ``error_estimate`` their sum, a conservative bound on
    the accumulated error.
    """

    t: np.ndarray
    y: np.ndarray
    steps: int
    rejected: int
    nfev: int
    max_local_error: float
    error_estimate: float


RHS = Callable[[float, np.ndarray], np.ndarray]


def _stages(f: RHS, t: float, y: np.ndarray, h: float, K: np.ndarray) -> np.ndarray:
    """Fill stages 1-5 of ``K`` (stage 0 preset) and return the new point.

    Stage 6 is ``f`` at the new point; the caller stores it and reuses it as
    stage 0 of the next step.
    """
    for i in range(1, 6):
        K[i] = f(t + _C[i] * h, y + h * (_A[i, :i] @ K[:i]))
    return y + h * (_B5[:6] @ K[:6])


def _initial_step(f: RHS, t0: float, y0: np.ndarray, k0: np.ndarray, span: float, atol: float, rtol: float) -> float:
    scale = atol + rtol * np.abs(y0)
    d0 = np.linalg.norm(y0 / scale) / np.sqrt(y0.size)
    d1 = np.linalg.norm(k0 / scale) / np.sqrt(y0.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    k1 = f(t0 + h0, y0 + h0 * k0)
    d2 = np.linalg.norm((k1 - k0) / scale) / np.sqrt(y0.size) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def dopri5(
    f: RHS,
    t_span: tuple[float, float],
    y0: Sequence[complex] | np.ndarray,
    rtol: float = 1e-8,
    atol: float | None = None,
    max_steps: int = 1_000_000,
    tstops: Sequence[float] = (),
    per_unit_step: bool = False,
) -> Trajectory:
    """Integrate ``y' = f(t, y)`` adaptively over ``t_span``.

    Steps never straddle a point in ``tstops``, so discontinuities in ``f``
    or its derivatives can be placed on step boundaries.  The error norm is
    the RMS of component errors scaled by ``atol + rtol * max(|y|, |y_new|)``;
    ``atol`` defaults to ``rtol``.  With ``per_unit_step`` the allowed error
    of a step is further scaled by its share of the interval, so local errors
    add up to at most about ``rtol`` over the whole run.

    Raises
    ------
    ConvergenceError
        If more than ``max_steps`` steps (accepted or rejected) are needed.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    atol = rtol if atol is None else atol
    y = np.asarray(y0, dtype=complex).copy()
    span = t1 - t0
    stops = sorted(s for s in tstops if t0 < s < t1) + [t1]

    k = f(t0, y)
    nfev = 1
    h = _initial_step(f, t0, y, k, t1 - t0, atol, rtol)
    nfev += 1

    K = np.empty((7, y.size), dtype=complex)
    n = y.size
    ts, ys = [t0], [y.copy()]
    t = t0
    accepted = rejected = 0
    max_err = err_sum = 0.0
    stop_idx = 0
    while t < t1:
        if accepted + rejected >= max_steps:
            raise ConvergenceError(
                f"step budget {max_steps} exhausted at t={t:.6g} of {t1:.6g}"
            )
        while stops[stop_idx] <= t:
            stop_idx += 1
        target = stops[stop_idx]
        hit_stop = t + h >= target
        step = target - t if hit_stop else h

        K[0] = k
        y_new = _stages(f, t, y, step, K)
        k_new = f(t + step, y_new)
        nfev += 6
        K[6] = k_new
        err = step * (_E @ K)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        if per_unit_step:
            scale = scale * (step / span)
        ratio = np.abs(err) / scale
        err_norm = math.sqrt(float(ratio @ ratio) / n)

        if err_norm <= 1.0:
            t = target if hit_stop else t + step
            y, k = y_new, k_new
            accepted += 1
            local = float(np.abs(err).max())
            max_err = max(max_err, local)
            err_sum += local
            ts.append(t)
            ys.append(y.copy())
            factor = _MAX_FACTOR if err_norm == 0 else min(_MAX_FACTOR, _SAFETY * err_norm ** -0.2)
            if hit_stop:
                # a step shortened to land on a stop says little about h
                h = min(h, step * factor)
            else:
                h = step * max(_MIN_FACTOR, factor)
        else:
            rejected += 1
            h = step * max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)

    return Trajectory(
        t=np.asarray(ts),
        y=np.asarray(ys),
        steps=accepted,
        rejected=rejected,
        nfev=nfev,
        max_local_error=max_err,
        error_estimate=err_sum,
    )


def rk5_fixed(
    f: RHS,
    t_span: tuple[float, float],
    y0: Sequence[complex] | np.ndarray,
    n_steps: int,
) -> Trajectory:
    """Fixed-step integration with the Dormand-Prince fifth-order formula."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    t0, t1 = float(t_span[0]), float(t_span[1])
    grid = np.linspace(t0, t1, n_steps + 1)
    y = np.asarray(y0, dtype=complex).copy()
    ys = [y.copy()]
    K = np.empty((7, y.size), dtype=complex)
    k = f(t0, y)
    for a, b in zip(grid[:-1], grid[1:]):
        K[0] = k
        y = _stages(f, a, y, b - a, K)
        k = f(b, y)
        ys.append(y.copy())
    return Trajectory(
        t=grid,
        y=np.asarray(ys),
        steps=n_steps,
        rejected=0,
        nfev=1 + 6 * n_steps,
        max_local_error=float("nan"),
        error_estimate=float("nan"),
    )
