"""Slow-variable laboratory for the weakly coupled Henon-Heiles oscillator."""

from .model import (
    TWO_PI,
    PhaseState,
    SlowTriple,
    eom_rhs,
    hamiltonian,
    hamiltonian_xy,
    rescale_state,
    slow_rates,
    slow_variables,
)
from .integrate import (
    DriftToleranceError,
    IntegratorConfig,
    PropagationError,
    Trajectory,
    energy_drift,
    integrate_to,
    step,
)
from .section import (
    LostOscillationError,
    SlowPoint,
    SlowSeries,
    crossing_direction,
    iterate_poincare,
    measure_quasi_period,
    measure_slow_period,
    next_crossing,
)

__version__ = "0.1.0"
