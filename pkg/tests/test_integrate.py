import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from factortime.integrate import ConvergenceError, dopri5, rk5_fixed


def rotation(omega):
    return lambda t, y: -1j * omega * y


def driven_two_level(t, y):
    # Rabi drive with a chirp, no closed form
    w = 3.0 * math.sin(2.0 * t) ** 2
    d = 0.5 * t
    return -1j * np.array([d * y[0] + w * y[1], w * y[0] - d * y[1]])


def reference(f, span, y0):
    def real_f(t, u):
        y = u[: len(y0)] + 1j * u[len(y0):]
        dy = f(t, y)
        return np.concatenate([dy.real, dy.imag])

    y0 = np.asarray(y0, dtype=complex)
    sol = solve_ivp(real_f, span, np.concatenate([y0.real, y0.imag]), method="DOP853", rtol=1e-13, atol=1e-14)
    u = sol.y[:, -1]
    return u[: len(y0)] + 1j * u[len(y0):]


@pytest.mark.parametrize("tol", [1e-6, 1e-9])
def test_phase_rotation(tol):
    traj = dopri5(rotation(5.0), (0.0, 10.0), [1.0], rtol=tol)
    assert abs(traj.y[-1, 0] - np.exp(-50j)) < 100 * tol
    assert traj.t[-1] == 10.0


@pytest.mark.parametrize("tol", [1e-6, 1e-8, 1e-10])
def test_against_reference(tol):
    y0 = [1.0, 0.0]
    ref = reference(driven_two_level, (0.0, 6.0), y0)
    traj = dopri5(driven_two_level, (0.0, 6.0), y0, rtol=tol)
    assert np.max(np.abs(traj.y[-1] - ref)) < 100 * tol
    # the error sum bounds the accumulated deviation
    assert np.max(np.abs(traj.y[-1] - ref)) < 10 * traj.error_estimate


def test_tighter_tolerance_takes_more_steps():
    coarse = dopri5(driven_two_level, (0.0, 6.0), [1.0, 0.0], rtol=1e-6)
    fine = dopri5(driven_two_level, (0.0, 6.0), [1.0, 0.0], rtol=1e-10)
    assert fine.steps > coarse.steps
    assert fine.max_local_error < coarse.max_local_error


def test_tstops_are_hit():
    stops = [0.25, 1.0 / 3.0, 2.0 / 3.0]
    traj = dopri5(rotation(1.0), (0.0, 1.0), [1.0], tstops=stops)
    for s in stops:
        assert s in traj.t
    assert np.all(np.diff(traj.t) > 0)


def test_step_budget():
    with pytest.raises(ConvergenceError):
        dopri5(rotation(1e4), (0.0, 10.0), [1.0], rtol=1e-10, max_steps=50)


def test_fixed_step_order():
    y0 = [1.0, 0.0]
    ref = reference(driven_two_level, (0.0, 6.0), y0)
    errs = [np.max(np.abs(rk5_fixed(driven_two_level, (0.0, 6.0), y0, n).y[-1] - ref)) for n in (200, 400)]
    order = math.log2(errs[0] / errs[1])
    assert 4.5 < order < 6.5


def test_fixed_matches_adaptive():
    y0 = [1.0, 0.0]
    a = dopri5(driven_two_level, (0.0, 6.0), y0, rtol=1e-11).y[-1]
    b = rk5_fixed(driven_two_level, (0.0, 6.0), y0, 2000).y[-1]
    assert np.max(np.abs(a - b)) < 1e-9
