"""Closed-form run-time and decoherence bounds for three quantum computer models.

Models
------
CZ
    Linear ion trap with a metastable two-level qubit; gates are driven on the
    red motional sideband, so each elementary step costs four sideband pi-pulses.
Raman
    Ion trap with a qubit in two stable ground levels, transferred with
    (quasi-)adiabatic population transfer through a decaying upper level.
Cavity
    Cavity QED gates; atoms may decay while outside the cavity.

All three share the drive/decay coupling ``Omega = rho * sqrt(Gamma)``, which
is what ties the gate time to the decoherence time.

Conventions: times in s, rates and (angular) Rabi frequencies in 1/s, ``rho``
in s^-1/2.  ``gamma`` is half the Einstein A coefficient of the driven level.
A strong inequality ``a << b`` is read as ``a <= b / margin``; with
``margin=1`` all bounds are reported at saturation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

HBAR = 1.054571817e-34  # J s
RHO_MAX = 1e10  # s^-1/2, ionization limit for optical transitions
LAMB_DICKE_LIMIT = 0.3
SIDEBAND_VALIDITY_LIMIT = 0.1

Model = Literal["CZ", "Raman", "Cavity"]
MODELS: tuple[Model, ...] = ("CZ", "Raman", "Cavity")

# relative slack for equality comparisons at bound saturation
_REL_SLACK = 1e-12


class DomainError(ValueError):
    """Raised when an input lies outside the physical domain of a formula."""


class LambDickeWarning(UserWarning):
    """The Lamb-Dicke parameter is too large for the sideband picture to hold."""


@dataclass(frozen=True)
class PhysicalParams:
    """Shared physical inputs of the estimators.

    Attributes
    ----------
    eta : float
        Lamb-Dicke parameter, ``0 < eta < 1``.
    rho : float
        Coupling constant in ``Omega = rho * sqrt(gamma)`` [s^-1/2].
    epsilon : float
        Prefactor of the ``epsilon * L**3`` gate count.
    gamma : float or None
        Half the Einstein coefficient [1/s].  ``None`` means "run at the
        decoherence-limited bound": each estimator then picks the largest
        decay rate compatible with its no-emission condition.
    omega_pi : float or None
        Peak pi-pulse Rabi frequency [1/s]; only used by the simulator.
    beta : float
        Adiabatic-transfer loss constant of the Raman model.
    alpha : float
        Outside/inside cavity time-ratio constant of the cavity model.
    qubit_multiplier, qubit_offset : int
        The register holds ``qubit_multiplier * L + qubit_offset`` qubits.
    margin : float
        Factor used to read strong inequalities, ``>= 1``.
    """

    eta: float = 0.1
    rho: float = 1e7
    epsilon: float = 1000.0
    gamma: float | None = None
    omega_pi: float | None = None
    beta: float = 100.0
    alpha: float = 1.0
    qubit_multiplier: int = 5
    qubit_offset: int = 0
    margin: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eta < 1.0:
            raise DomainError(f"eta must satisfy 0 < eta < 1, got {self.eta}")
        if not 0.0 < self.rho <= RHO_MAX:
            raise DomainError(f"rho must satisfy 0 < rho <= {RHO_MAX:g}, got {self.rho}")
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")
        if self.gamma is not None and not self.gamma >= 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.omega_pi is not None and not self.omega_pi > 0:
            raise DomainError(f"omega_pi must be > 0, got {self.omega_pi}")
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.qubit_multiplier < 1 or self.qubit_offset < 0:
            raise DomainError("qubit_multiplier must be >= 1 and qubit_offset >= 0")
        if not self.margin >= 1.0:
            raise DomainError(f"margin must be >= 1, got {self.margin}")
        for name in ("eta", "rho", "epsilon", "beta", "alpha", "margin"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def n_qubits(self, bits: int) -> int:
        """Register size for an ``bits``-bit number."""
        return self.qubit_multiplier * bits + self.qubit_offset


@dataclass(frozen=True)
class TrapGeometry:
    """Ion trap geometry entering the Lamb-Dicke parameter.

    ``com_frequency`` is the angular center-of-mass mode frequency [1/s].
    """

    wavelength: float
    ion_mass: float
    com_frequency: float

    def __post_init__(self) -> None:
        for name in ("wavelength", "ion_mass", "com_frequency"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class ModelEstimate:
    """Result of one estimator call.

    ``run_time`` is the single-run factorization time ``tau_el * epsilon * L**3``
    and ``t_min`` the decoherence-limited lower bound on it.  ``tau_dec`` is
    the register decoherence time, so ``feasible`` means
    ``run_time <= tau_dec / margin``.  ``gamma`` is the decay rate actually
    used (chosen at the bound when the inputs left it open); ``gamma_max`` is
    only defined for the CZ model and ``p_em`` only for Raman.
    """

    model: Model
    bits: int
    tau_el: float
    run_time: float
    tau_dec: float
    t_min: float
    feasible: bool
    gamma: float | None = None
    gamma_max: float | None = None
    p_em: float | None = None
    diagnostics: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class NaiveEstimate:
    run_time: float
    tau_dec: float
    tau_qb_required: float


def _check_bits(bits: int) -> None:
    if isinstance(bits, bool) or int(bits) != bits or bits < 1:
        raise DomainError(f"bit count L must be an integer >= 1, got {bits!r}")


def _gate_count(bits: int, params: PhysicalParams) -> float:
    return params.epsilon * bits**3


def _le(a: float, b: float) -> bool:
    return a <= b * (1.0 + _REL_SLACK)


def rabi_from_gamma(rho: float, gamma: float) -> float:
    """Rabi frequency reachable on a transition with decay rate ``gamma``."""
    if not rho > 0:
        raise DomainError(f"rho must be > 0, got {rho}")
    if rho > RHO_MAX:
        raise DomainError(f"rho={rho:g} exceeds the ionization limit {RHO_MAX:g} s^-1/2")
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    return rho * math.sqrt(gamma)


def gamma_from_rabi(rho: float, omega: float) -> float:
    """Inverse of :func:`rabi_from_gamma`."""
    if not rho > 0:
        raise DomainError(f"rho must be > 0, got {rho}")
    if not omega >= 0:
        raise DomainError(f"omega must be >= 0, got {omega}")
    return (omega / rho) ** 2


def lamb_dicke(geom: TrapGeometry) -> float:
    """Lamb-Dicke parameter ``(2 pi / lambda) sqrt(hbar / (2 M nu))``.

    Warns with :class:`LambDickeWarning` when the result is not small.
    """
    eta = 2.0 * math.pi / geom.wavelength * math.sqrt(
        HBAR / (2.0 * geom.ion_mass * geom.com_frequency)
    )
    if eta >= LAMB_DICKE_LIMIT:
        warnings.warn(
            f"Lamb-Dicke parameter {eta:.3g} >= {LAMB_DICKE_LIMIT}", LambDickeWarning, stacklevel=2
        )
    return eta


def naive_estimate(bits: int, params: PhysicalParams, tau_el: float) -> NaiveEstimate:
    """Run time and qubit lifetime requirement for a gate time unrelated to decay.

    ``tau_dec`` is ``inf`` when ``params.gamma == 0``.
    """
    _check_bits(bits)
    if not tau_el > 0:
        raise DomainError(f"tau_el must be > 0, got {tau_el}")
    if params.gamma is None:
        raise DomainError("naive_estimate needs an explicit gamma")
    n = params.n_qubits(bits)
    run_time = tau_el * _gate_count(bits, params)
    tau_dec = math.inf if params.gamma == 0 else 1.0 / (n * params.gamma)
    return NaiveEstimate(run_time=run_time, tau_dec=tau_dec, tau_qb_required=run_time * n)


def _common_diagnostics(params: PhysicalParams) -> list[str]:
    diags = []
    if params.eta >= LAMB_DICKE_LIMIT:
        diags.append(f"lamb-dicke: eta={params.eta:g} >= {LAMB_DICKE_LIMIT}")
    return diags


def cz_estimate(
    bits: int, params: PhysicalParams, geometry: TrapGeometry | None = None
) -> ModelEstimate:
    """Two-level ion trap: four sideband pi-pulses per elementary gate.

    The sideband Rabi frequency is ``eta * Omega / sqrt(N)`` for an N-qubit
    string, so ``tau_el = 4 pi sqrt(N) / (eta Omega)`` with ``Omega`` fixed by
    the decay rate.  ``gamma_max`` is the decay-rate bound read with one factor
    of ``margin``; ``t_min`` follows from eliminating ``gamma`` between the run
    time and ``tau_dec = 1 / (N gamma)``.

    With ``params.gamma`` unset the estimate is evaluated at the largest
    ``gamma`` for which ``run_time <= tau_dec / margin``, which makes
    ``run_time == t_min``.
    """
    _check_bits(bits)
    n = params.n_qubits(bits)
    m = params.margin
    eps_l3 = _gate_count(bits, params)
    eta_rho = params.eta * params.rho
    # gamma at which run time equals the register decoherence time
    gamma_sat = eta_rho**2 / (16.0 * math.pi**2 * eps_l3**2 * n**3)
    gamma_max = gamma_sat / m
    t_min = m * 16.0 * math.pi**2 * eps_l3**2 * n**2 / eta_rho**2

    gamma = gamma_sat / m**2 if params.gamma is None else params.gamma
    if gamma == 0:
        raise DomainError("gamma=0 leaves the CZ gate time undefined (Omega=0)")
    omega = rabi_from_gamma(params.rho, gamma)
    tau_el = 4.0 * math.pi * math.sqrt(n) / (params.eta * omega)
    run_time = tau_el * eps_l3
    tau_dec = 1.0 / (n * gamma)

    diags = _common_diagnostics(params)
    if geometry is not None:
        ratio = (omega / (2.0 * geometry.com_frequency)) ** 2 * params.eta**2
        if ratio >= SIDEBAND_VALIDITY_LIMIT:
            diags.append(f"sideband: (Omega/2nu)^2 eta^2 = {ratio:.3g} >= {SIDEBAND_VALIDITY_LIMIT}")
    feasible = _le(run_time, tau_dec / m)
    if not feasible:
        diags.append("decoherence: run time exceeds tau_dec/margin")
    return ModelEstimate(
        model="CZ",
        bits=int(bits),
        tau_el=tau_el,
        run_time=run_time,
        tau_dec=tau_dec,
        t_min=t_min,
        feasible=feasible,
        gamma=gamma,
        gamma_max=gamma_max,
        diagnostics=tuple(diags),
    )


def raman_estimate(
    bits: int,
    params: PhysicalParams,
    omega_sigma: float | None = None,
    t_ad: float | None = None,
) -> ModelEstimate:
    """Ion trap with adiabatic sideband transfer between stable levels.

    The emission probability per transfer is
    ``p_em = beta * gamma * N / (eta**2 * omega_sigma**2 * t_ad)``.  Without
    ``t_ad`` the transfer time is set by ``p_em * epsilon * L**3 = 1 / margin``;
    with it, feasibility of that particular duration is reported.

    When ``omega_sigma`` is omitted it is taken as ``rho * sqrt(gamma)``, so
    ``gamma / omega_sigma**2 = 1 / rho**2`` and ``gamma`` itself drops out.
    ``tau_dec`` is the mean time to the first emission, ``tau_el / p_em``.
    """
    _check_bits(bits)
    n = params.n_qubits(bits)
    m = params.margin
    eps_l3 = _gate_count(bits, params)
    gamma = params.gamma
    if omega_sigma is None:
        if gamma is not None:
            omega_sigma = rabi_from_gamma(params.rho, gamma)
            if omega_sigma == 0:
                raise DomainError("omega_sigma = rho*sqrt(gamma) vanishes for gamma=0")
        decay_ratio = 1.0 / params.rho**2
    else:
        if not omega_sigma > 0:
            raise DomainError(f"omega_sigma must be > 0, got {omega_sigma}")
        if gamma is None:
            raise DomainError("an explicit omega_sigma needs an explicit gamma")
        if gamma == 0:
            raise DomainError("gamma=0 removes the emission channel; no bound exists")
        decay_ratio = gamma / omega_sigma**2

    # emission probability times transfer time
    loss_area = params.beta * decay_ratio * n / params.eta**2
    t_min = m * loss_area * eps_l3**2
    if t_ad is None:
        tau_el = m * loss_area * eps_l3
    else:
        if not t_ad > 0:
            raise DomainError(f"t_ad must be > 0, got {t_ad}")
        tau_el = t_ad
    p_em = loss_area / tau_el
    run_time = tau_el * eps_l3
    tau_dec = tau_el / p_em

    diags = _common_diagnostics(params)
    if p_em > 0.3:
        diags.append(f"adiabatic: p_em={p_em:.3g} outside the 1/T regime")
    feasible = _le(p_em * eps_l3, 1.0 / m)
    if not feasible:
        diags.append("decoherence: p_em*epsilon*L^3 exceeds 1/margin")
    return ModelEstimate(
        model="Raman",
        bits=int(bits),
        tau_el=tau_el,
        run_time=run_time,
        tau_dec=tau_dec,
        t_min=t_min,
        feasible=feasible,
        gamma=gamma,
        p_em=p_em,
        diagnostics=tuple(diags),
    )


def cavity_estimate(bits: int, params: PhysicalParams) -> ModelEstimate:
    """Cavity QED: one Rabi period per gate, decay outside the cavity.

    Each gate contributes ``alpha * gamma / Omega`` to the emission
    probability, so ``tau_dec = 1 / (alpha * gamma)``.  With ``params.gamma``
    unset, the largest ``gamma`` meeting the no-emission condition is used.
    """
    _check_bits(bits)
    m = params.margin
    eps_l3 = _gate_count(bits, params)
    t_min = m * params.alpha * eps_l3**2 / params.rho**2

    if params.gamma is None:
        gamma = (params.rho / (m * params.alpha * eps_l3)) ** 2
    else:
        gamma = params.gamma
    if gamma == 0:
        raise DomainError("gamma=0 leaves the cavity gate time undefined (Omega=0)")
    omega = rabi_from_gamma(params.rho, gamma)
    tau_el = 1.0 / omega
    run_time = eps_l3 / omega
    tau_dec = 1.0 / (params.alpha * gamma)

    diags = _common_diagnostics(params)
    feasible = _le(params.alpha * gamma / omega * eps_l3, 1.0 / m)
    if not feasible:
        diags.append("decoherence: alpha*gamma/Omega*epsilon*L^3 exceeds 1/margin")
    return ModelEstimate(
        model="Cavity",
        bits=int(bits),
        tau_el=tau_el,
        run_time=run_time,
        tau_dec=tau_dec,
        t_min=t_min,
        feasible=feasible,
        gamma=gamma,
        diagnostics=tuple(diags),
    )


def estimate(model: str, bits: int, params: PhysicalParams, **kwargs) -> ModelEstimate:
    """Dispatch to the estimator for ``model`` (case-insensitive tag)."""
    key = model.lower()
    if key == "cz":
        return cz_estimate(bits, params, **kwargs)
    if key == "raman":
        return raman_estimate(bits, params, **kwargs)
    if key == "cavity":
        return cavity_estimate(bits, params, **kwargs)
    raise DomainError(f"unknown model {model!r}; expected one of cz, raman, cavity")


def canonical_model(model: str) -> Model:
    for tag in MODELS:
        if tag.lower() == model.lower():
            return tag
    raise DomainError(f"unknown model {model!r}; expected one of cz, raman, cavity")
