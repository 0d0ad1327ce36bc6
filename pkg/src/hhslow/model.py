"""Dynamical core: the cubically coupled oscillator pair and its slow observables.

The system is the small-amplitude rescaling of the classic two-oscillator
galactic potential,

    x'' = -x - 2*eps*x*y
    y'' = -y + eps*(y^2 - x^2)

with conserved energy h = (x^2 + y^2 + x'^2 + y'^2)/2 + eps*(x^2*y - y^3/3).
For eps = 0 the two oscillators decouple into unit-frequency harmonic motion.
The quadratics v = y^2 + y'^2 and w = x'*y' + x*y drift at rate O(eps) and are
the slow observables everything downstream is built on; u = h - v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TWO_PI",
    "PhaseState",
    "SlowTriple",
    "eom_rhs",
    "hamiltonian",
    "hamiltonian_xy",
    "slow_variables",
    "slow_rates",
    "rescale_state",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseState:
    """Instantaneous state (x, y, xdot, ydot) at time t; all dimensionless."""

    x: float
    y: float
    xdot: float
    ydot: float
    t: float = 0.0

    def coords(self):
        """State as a float64 array (x, y, xdot, ydot), without t."""
        return np.array([self.x, self.y, self.xdot, self.ydot], dtype=float)

    def is_finite(self):
        return all(
            math.isfinite(f) for f in (self.x, self.y, self.xdot, self.ydot, self.t)
        )


@dataclass(frozen=True)
class SlowTriple:
    """Slow values at one instant: v = y^2 + ydot^2, w = xdot*ydot + x*y, u = h - v.

    u is stored as the exact float difference h - v, so u + v == h always holds
    bit-for-bit.
    """

    v: float
    w: float
    u: float
    h: float


def eom_rhs(state: PhaseState, eps: float) -> np.ndarray:
    """Right-hand side (xdot, ydot, xddot, yddot) of the equations of motion."""
    x, y = state.x, state.y
    ax = -x - 2.0 * eps * x * y
    ay = -y + eps * (y * y - x * x)
    return np.array([state.xdot, state.ydot, ax, ay], dtype=float)


def hamiltonian_xy(x, y, xdot, ydot, eps):
    """Energy from raw coordinates; accepts scalars or numpy arrays."""
    return 0.5 * (x * x + y * y + xdot * xdot + ydot * ydot) + eps * (
        x * x * y - y * y * y / 3.0
    )


def hamiltonian(state: PhaseState, eps: float) -> float:
    """Conserved energy of the state for coupling eps."""
    return float(hamiltonian_xy(state.x, state.y, state.xdot, state.ydot, eps))


def slow_variables(state: PhaseState, h: float) -> SlowTriple:
    """Slow triple (v, w, u) at a state, with h carried from the initial data.

    h is a run-level constant computed once from the initial state; it is not
    recomputed here so that u = h - v refers to the exact conserved value.
    """
    v = state.y * state.y + state.ydot * state.ydot
    w = state.xdot * state.ydot + state.x * state.y
    return SlowTriple(v=v, w=w, u=h - v, h=h)


def slow_rates(state: PhaseState, eps: float) -> tuple[float, float]:
    """Exact time derivatives (dv/dt, dw/dt) along the flow.

    Both are proportional to eps, which is what makes v and w slow:
    dv/dt = 2*eps*ydot*(y^2 - x^2) and dw/dt = eps*(xdot*(y^2 - x^2) - 2*x*y*ydot).
    """
    x, y, xd, yd = state.x, state.y, state.xdot, state.ydot
    dv = 2.0 * eps * yd * (y * y - x * x)
    dw = eps * (xd * (y * y - x * x) - 2.0 * x * y * yd)
    return dv, dw


def rescale_state(state: PhaseState, eps: float, direction: str) -> PhaseState:
    """Bridge between the eps = 1 form and the small-parameter form.

    ``to_scaled`` multiplies coordinates and velocities by eps (producing the
    small-amplitude state of the eps = 1 system); ``to_unscaled`` divides.  The
    energy bridges as hamiltonian(to_unscaled(s), eps) == hamiltonian(s, 1)/eps**2,
    and the round trip is the identity.
    """
    if direction == "to_scaled":
        f = eps
    elif direction == "to_unscaled":
        if eps == 0.0:
            raise ValueError("cannot unscale with eps = 0 (degenerate scale)")
        f = 1.0 / eps
    else:
        raise ValueError(f"direction must be 'to_scaled' or 'to_unscaled', got {direction!r}")
    if eps < 0.0 or not math.isfinite(eps):
        raise ValueError(f"eps must be a finite nonnegative real, got {eps!r}")
    return PhaseState(
        x=state.x * f,
        y=state.y * f,
        xdot=state.xdot * f,
        ydot=state.ydot * f,
        t=state.t,
    )
