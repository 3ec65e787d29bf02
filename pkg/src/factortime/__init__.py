"""Lower bounds on quantum factorization time under spontaneous emission."""

from factortime.scaling import (
    HBAR,
    RHO_MAX,
    DomainError,
    LambDickeWarning,
    ModelEstimate,
    NaiveEstimate,
    PhysicalParams,
    TrapGeometry,
    cavity_estimate,
    cz_estimate,
    gamma_from_rabi,
    lamb_dicke,
    naive_estimate,
    rabi_from_gamma,
    raman_estimate,
)
from factortime.stirap import (
    BetaFit,
    LambdaSystem,
    Pulse,
    PulseSchedule,
    SimResult,
    fit_beta,
    pulse_envelope,
    simulate_transfer,
)
from factortime.sweep import (
    PRESETS,
    Grid,
    Scenario,
    SweepResult,
    SweepSpec,
    compare_models,
    evaluate_scenario,
    run_sweep,
)

__version__ = "0.1.0"
