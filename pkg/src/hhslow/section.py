"""Section sampling: exact y = 0 crossings and the iterated slow map.

A crossing is detected by a sign change of y over one integration step and
landed exactly by swapping the independent variable to y over the final
interval (one multi-substep RK4 pass), so no root polishing is needed and the
recorded points have y = 0 identically.  The crossing direction is fixed to
sign(ydot) at the start of the run: one crossing per fast loop, so the record
index n matches the loop count.  Landing is an observation only; the
propagated trajectory is never restarted from a landed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .integrate import DriftToleranceError, IntegratorConfig, PropagationError
from .model import TWO_PI, PhaseState, hamiltonian

__all__ = [
    "SlowPoint",
    "SlowSeries",
    "LostOscillationError",
    "crossing_direction",
    "next_crossing",
    "iterate_poincare",
    "measure_quasi_period",
    "measure_slow_period",
    "QuasiPeriodStats",
    "SlowPeriodStats",
    "write_csv",
    "read_csv",
]

_ON_SECTION_TOL = 1e-12


class LostOscillationError(RuntimeError):
    """No section crossing found within 4*pi of integration (ydot ~ 0 regime)."""


@dataclass(frozen=True)
class SlowPoint:
    """Per-crossing record; n = 0 is the initial condition itself."""

    n: int
    t: float
    v: float
    w: float
    u: float
    h_resid: float


class SlowSeries:
    """Columnar sequence of SlowPoints plus run-level constants."""

    def __init__(self, t, v, w, u, h_resid, eps, h0, direction):
        self.t = np.asarray(t, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.w = np.asarray(w, dtype=float)
        self.u = np.asarray(u, dtype=float)
        self.h_resid = np.asarray(h_resid, dtype=float)
        self.eps = float(eps)
        self.h0 = float(h0)
        self.direction = int(direction)

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def n(self) -> np.ndarray:
        return np.arange(len(self))

    def point(self, i: int) -> SlowPoint:
        i = int(np.arange(len(self))[i])
        return SlowPoint(
            n=i,
            t=float(self.t[i]),
            v=float(self.v[i]),
            w=float(self.w[i]),
            u=float(self.u[i]),
            h_resid=float(self.h_resid[i]),
        )


def crossing_direction(state: PhaseState) -> int:
    """Run direction fixed from the initial ydot; ydot = 0 has no direction."""
    if state.ydot > 0.0:
        return 1
    if state.ydot < 0.0:
        return -1
    raise LostOscillationError(
        "ydot = 0 at the start: no crossing direction (degenerate regime; "
        "use the fast-phase sampling in the series module)"
    )


def _run(state, eps, ncross, cfg, direction, snap):
    cfg = cfg or IntegratorConfig()
    if not state.is_finite():
        raise PropagationError(f"non-finite state {state!r}")
    if eps < 0.0 or not math.isfinite(eps):
        raise ValueError(f"eps must be a finite nonnegative real, got {eps!r}")
    y0 = state.y
    if snap and abs(y0) <= _ON_SECTION_TOL * max(1.0, abs(state.ydot)):
        y0 = 0.0
    h0 = hamiltonian(PhaseState(state.x, y0, state.xdot, state.ydot), eps)
    kicks, drifts, mcode = cfg.kernel_args()
    (status, filled, t, v, w, hres, lx, lvx, lvy, maxd, tviol,
     xf, yf, vxf, vyf, tf) = _kernels.poincare_run(
        state.x, y0, state.xdot, state.ydot, state.t, cfg.step_size, eps,
        kicks, drifts, mcode, h0, cfg.drift_tol_abs(h0),
        ncross, direction, cfg.landing_substeps,
    )
    if status == _kernels.STATUS_DRIFT:
        raise DriftToleranceError(tviol, maxd, cfg.drift_tol_abs(h0))
    if status == _kernels.STATUS_LOST:
        raise LostOscillationError(
            f"no section crossing within 4*pi of integration (t = {tviol:.6g})"
        )
    series = SlowSeries(t, v, w, u=h0 - v, h_resid=hres, eps=eps, h0=h0, direction=direction)
    landed = np.column_stack([lx, lvx, lvy])
    final = PhaseState(x=xf, y=yf, xdot=vxf, ydot=vyf, t=tf)
    return series, landed, final


def next_crossing(
    state: PhaseState,
    eps: float,
    direction: int | None = None,
    cfg: IntegratorConfig | None = None,
) -> tuple[PhaseState, float]:
    """Advance to the next y = 0 crossing with sign(ydot) = direction.

    A state already on the section is advanced a full loop to the next one.
    Returns the landed state (y = 0 exactly) and its time.
    """
    direction = crossing_direction(state) if direction is None else int(direction)
    series, landed, _ = _run(state, eps, 1, cfg, direction, snap=True)
    t1 = float(series.t[1])
    x, xdot, ydot = landed[1]
    return PhaseState(x=float(x), y=0.0, xdot=float(xdot), ydot=float(ydot), t=t1), t1


def iterate_poincare(
    state0: PhaseState,
    eps: float,
    n_crossings: int,
    cfg: IntegratorConfig | None = None,
    direction: int | None = None,
) -> SlowSeries:
    """Iterated slow map: N + 1 records (n = 0 .. N) of (t, v, w, u, h_resid).

    state0 must lie on the section (|y| below landing tolerance); arrange that
    with next_crossing first if needed.
    """
    if n_crossings < 0:
        raise ValueError("n_crossings must be >= 0")
    if abs(state0.y) > _ON_SECTION_TOL * max(1.0, abs(state0.ydot)):
        raise ValueError(
            f"state0 is not on the section (y = {state0.y!r}); evolve there with next_crossing"
        )
    direction = crossing_direction(state0) if direction is None else int(direction)
    series, _, _ = _run(state0, eps, n_crossings, cfg, direction, snap=True)
    return series


def iterate_poincare_with_states(
    state0: PhaseState,
    eps: float,
    n_crossings: int,
    cfg: IntegratorConfig | None = None,
    direction: int | None = None,
):
    """iterate_poincare plus the landed (x, xdot, ydot) array, one row per record."""
    if n_crossings < 0:
        raise ValueError("n_crossings must be >= 0")
    direction = crossing_direction(state0) if direction is None else int(direction)
    series, landed, _ = _run(state0, eps, n_crossings, cfg, direction, snap=True)
    return series, landed


@dataclass(frozen=True)
class QuasiPeriodStats:
    dt: np.ndarray
    mean: float
    max_dev_from_2pi: float


def measure_quasi_period(series: SlowSeries) -> QuasiPeriodStats:
    """Per-loop return times; each is 2*pi + O(eps^2)."""
    if len(series) < 2:
        raise ValueError("need at least 2 section points")
    dt = np.diff(series.t)
    return QuasiPeriodStats(
        dt=dt,
        mean=float(np.mean(dt)),
        max_dev_from_2pi=float(np.max(np.abs(dt - TWO_PI))),
    )


@dataclass(frozen=True)
class SlowPeriodStats:
    period_t: float
    period_n: float
    phase_span: float


class SlowPeriodError(RuntimeError):
    """Slow-phase span too short (or absent) to estimate a period."""


def measure_slow_period(series: SlowSeries) -> SlowPeriodStats:
    """Slow period from the unwrapped phase of (u_n, w_n).

    Requires the record to span at least 1.5 slow periods (phase span 3*pi).
    """
    if len(series) < 3:
        raise SlowPeriodError("need at least 3 section points")
    phi = np.unwrap(np.arctan2(series.w, series.u))
    span = abs(phi[-1] - phi[0])
    if span < 3.0 * math.pi:
        raise SlowPeriodError(
            f"slow phase span {span:.3g} rad < 3*pi; record more crossings"
        )
    period_n = TWO_PI * (len(series) - 1) / span
    period_t = TWO_PI * (series.t[-1] - series.t[0]) / span
    return SlowPeriodStats(period_t=float(period_t), period_n=float(period_n), phase_span=float(span))


_CSV_HEADER = "n,t,v,w,u,h_resid"


def write_csv(series: SlowSeries, path) -> None:
    """Emit the record as CSV with 17-significant-digit decimals."""
    with open(path, "w") as f:
        f.write(_CSV_HEADER + "\n")
        for i in range(len(series)):
            f.write(
                f"{i},{series.t[i]:.17g},{series.v[i]:.17g},{series.w[i]:.17g},"
                f"{series.u[i]:.17g},{series.h_resid[i]:.17g}\n"
            )


def read_csv(path, eps=float("nan"), h0=None, direction=0) -> SlowSeries:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    if h0 is None:
        h0 = float(data["u"][0] + data["v"][0])
    return SlowSeries(
        t=data["t"], v=data["v"], w=data["w"], u=data["u"], h_resid=data["h_resid"],
        eps=eps, h0=h0, direction=direction,
    )
