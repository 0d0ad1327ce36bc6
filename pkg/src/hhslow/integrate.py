"""Long-time fixed-step propagation with monitored energy drift.

The production method is an order-8 splitting composition (the Hamiltonian is
separable, so kick-drift substeps apply); splitting keeps the energy error
bounded over millions of fast periods, which generic one-step methods do not.
Steps are fixed-size for reproducibility and symplecticity; time is
accumulated with compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._compose import SPLIT_ORDERS, kick_drift_coefficients
from .model import TWO_PI, PhaseState, hamiltonian, hamiltonian_xy

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "PropagationError",
    "DriftToleranceError",
    "step",
    "integrate_to",
    "energy_drift",
]

_EMPTY = np.empty(0, dtype=np.float64)


class PropagationError(RuntimeError):
    """Raised when a non-finite state enters or leaves the propagator."""


class DriftToleranceError(RuntimeError):
    """Raised when |h(t) - h0| exceeds the configured tolerance.

    Attributes t_violation and drift identify when and by how much.
    """

    def __init__(self, t_violation: float, drift: float, tol: float):
        super().__init__(
            f"energy drift {drift:.3e} exceeded tolerance {tol:.3e} at t = {t_violation:.6g}"
        )
        self.t_violation = t_violation
        self.drift = drift


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator selection.

    method: 'split2' | 'split4' | 'split6' | 'split8' (composition splitting)
            or 'rk4' (classical one-step, for cross-checks; it drifts secularly
            and is not suitable for production runs).
    step_size: positive dt; default resolves one fast period into 64 steps.
    drift_tolerance: relative energy-drift budget before aborting.
    landing_substeps: RK4 substeps of the section landing (see section module).
    """

    method: str = "split8"
    step_size: float = TWO_PI / 64.0
    drift_tolerance: float = 1e-9
    landing_substeps: int = 8

    def __post_init__(self):
        if self.method not in ("rk4",) and self.method not in tuple(
            f"split{p}" for p in SPLIT_ORDERS
        ):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.step_size > 0.0 and math.isfinite(self.step_size)):
            raise ValueError("step_size must be a positive finite real")
        if not (self.drift_tolerance > 0.0):
            raise ValueError("drift_tolerance must be positive")
        if self.landing_substeps < 1:
            raise ValueError("landing_substeps must be >= 1")

    def kernel_args(self):
        """(kicks, drifts, method_code) consumed by the compiled loops."""
        if self.method == "rk4":
            return _EMPTY, _EMPTY, _kernels.METHOD_RK4
        kicks, drifts = kick_drift_coefficients(int(self.method[5:]))
        return kicks, drifts, _kernels.METHOD_SPLIT

    def drift_tol_abs(self, h0: float) -> float:
        scale = abs(h0) if abs(h0) > 1e-12 else 1.0
        return self.drift_tolerance * scale


@dataclass
class Trajectory:
    """Sampled solution: times (strictly increasing) and (m, 4) states.

    max_drift is the per-step maximum of |h(t) - h0| seen by the kernel, which
    is at least as pessimistic as any estimate from the stored samples.
    """

    times: np.ndarray
    states: np.ndarray
    eps: float
    h0: float
    max_drift: float = 0.0

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, i: int) -> PhaseState:
        x, y, xd, yd = self.states[i]
        return PhaseState(x=x, y=y, xdot=xd, ydot=yd, t=float(self.times[i]))

    @property
    def final_state(self) -> PhaseState:
        return self.state(-1)


def _require_valid(state: PhaseState, eps: float):
    if not state.is_finite():
        raise PropagationError(f"non-finite state {state!r}")
    if eps < 0.0 or not math.isfinite(eps):
        raise ValueError(f"eps must be a finite nonnegative real, got {eps!r}")


def step(state: PhaseState, dt: float, eps: float, cfg: IntegratorConfig | None = None) -> PhaseState:
    """One step of the configured method; dt may be negative, never zero."""
    cfg = cfg or IntegratorConfig()
    _require_valid(state, eps)
    if dt == 0.0 or not math.isfinite(dt):
        raise ValueError("dt must be nonzero and finite")
    kicks, drifts, mcode = cfg.kernel_args()
    x, y, vx, vy = _kernels._one_step(
        state.x, state.y, state.xdot, state.ydot, dt, eps, kicks, drifts, mcode
    )
    out = PhaseState(x=x, y=y, xdot=vx, ydot=vy, t=state.t + dt)
    if not out.is_finite():
        raise PropagationError(f"propagation produced a non-finite state at t = {out.t}")
    return out


def integrate_to(
    state: PhaseState,
    t_end: float,
    eps: float,
    cfg: IntegratorConfig | None = None,
    sample_stride: int = 1,
) -> Trajectory:
    """Propagate to t_end (final partial step included), sampling every
    ``sample_stride`` full steps.

    Raises DriftToleranceError, naming the violation time, if the energy
    leaves the configured budget.
    """
    cfg = cfg or IntegratorConfig()
    _require_valid(state, eps)
    if t_end < state.t:
        raise ValueError(f"t_end = {t_end} precedes state.t = {state.t}")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    h0 = hamiltonian(state, eps)
    if t_end == state.t:
        return Trajectory(
            times=np.array([state.t]),
            states=state.coords()[None, :],
            eps=eps,
            h0=h0,
            max_drift=0.0,
        )
    kicks, drifts, mcode = cfg.kernel_args()
    tol = cfg.drift_tol_abs(h0)
    span = t_end - state.t
    nfull = int(math.floor(span / cfg.step_size))

    ts = np.array([state.t])
    sts = state.coords()[None, :]
    maxd = 0.0
    x, y, vx, vy, tf = state.x, state.y, state.xdot, state.ydot, state.t
    if nfull > 0:
        (status, ts, sts, maxd, tviol, x, y, vx, vy, tf) = _kernels.integrate_samples(
            x, y, vx, vy, state.t, cfg.step_size, nfull, sample_stride,
            eps, kicks, drifts, mcode, h0, tol,
        )
        if status == _kernels.STATUS_DRIFT:
            raise DriftToleranceError(tviol, maxd, tol)
    rem = t_end - tf
    if rem > 1e-12 * max(1.0, abs(t_end)):
        x, y, vx, vy = _kernels._one_step(x, y, vx, vy, rem, eps, kicks, drifts, mcode)
        d = abs(hamiltonian_xy(x, y, vx, vy, eps) - h0)
        maxd = max(maxd, d)
        if d > tol:
            raise DriftToleranceError(t_end, d, tol)
        ts = np.append(ts, t_end)
        sts = np.vstack([sts, [x, y, vx, vy]])
    else:
        ts = ts.copy()
        ts[-1] = t_end
    traj = Trajectory(times=ts, states=sts, eps=eps, h0=h0, max_drift=float(maxd))
    if not np.all(np.isfinite(sts)):
        raise PropagationError("propagation produced non-finite samples")
    return traj


def energy_drift(traj: Trajectory, eps: float | None = None) -> float:
    """max |h(t_i) - h0| over the stored samples."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    eps = traj.eps if eps is None else eps
    h = hamiltonian_xy(
        traj.states[:, 0], traj.states[:, 1], traj.states[:, 2], traj.states[:, 3], eps
    )
    return float(np.max(np.abs(h - traj.h0)))
