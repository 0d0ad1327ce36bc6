"""Analytic predictors for the iterated slow map (u_n, w_n).

Three modes, in increasing fidelity and cost:

P1  closed-form sinusoid: radius sqrt(T0) fixed, phase advancing by
    (14*pi/3)*eps^2*sqrt(h^2 - T0) per crossing; valid while n*eps^(5/2) << 1.
P2  the truncated slow map iterated n times (remainder terms dropped); the
    radius drifts according to T' = T + beta^2*eps^4*T*(h^2 - T) exactly.
P3  the phase-sum form: phi_n = phi0 + (14*pi/3)*eps^2 * sum_k sqrt(h^2 - T_k)
    with a pluggable T_k sequence (P2-predicted by default, or measured values
    for diagnostics) and compensated accumulation.

All predictors work in original variables with the explicit 14*pi/3 constant
and assume the positive-x0 branch of initial data (x0 > 0 at the first
crossing), which is the orientation with counterclockwise (u, w) rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "BETA",
    "PredictorInput",
    "PhaseSequence",
    "phase0",
    "truncated_map_step",
    "iterate_truncated_map",
    "map_identity_residual_ulps",
    "phase_sum",
    "predict",
    "predict_series",
    "slow_ode_solution",
    "validity_horizon",
]

BETA = 14.0 * math.pi / 3.0

MODES = ("P1", "P2", "P3")

_HORIZON_EXPONENT = {"series": 2.0, "P1": 2.5, "P2": 3.0, "P3": 3.0}


@dataclass(frozen=True)
class PredictorInput:
    """Initial slow data (u0, w0), energy h, coupling eps, and mode."""

    u0: float
    w0: float
    h: float
    eps: float
    mode: str = "P2"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.eps < 0.0 or not math.isfinite(self.eps):
            raise ValueError(f"eps must be a finite nonnegative real, got {self.eps!r}")
        if not (self.h > 0.0):
            raise ValueError("h must be positive")
        if self.t0 >= self.h * self.h:
            raise ValueError(
                f"u0^2 + w0^2 = {self.t0:.6g} must be < h^2 = {self.h2:.6g}"
            )
        if self.mode in ("P1", "P3") and self.t0 == 0.0:
            raise ValueError(f"{self.mode} needs u0^2 + w0^2 > 0 to define a phase")

    @property
    def t0(self) -> float:
        return self.u0 * self.u0 + self.w0 * self.w0

    @property
    def h2(self) -> float:
        return self.h * self.h


@dataclass(frozen=True)
class PhaseSequence:
    """Accumulated slow phases phi_n and per-step increments, radius sqrt(T)."""

    phi: np.ndarray
    radius: np.ndarray
    increments: np.ndarray


def phase0(u0: float, w0: float) -> float:
    """Initial phase: exp(i*phi0) = (u0 + i*w0)/sqrt(u0^2 + w0^2), in (-pi, pi]."""
    if u0 == 0.0 and w0 == 0.0:
        raise ValueError("phase undefined for u0 = w0 = 0 (zero-radius regime)")
    p = math.atan2(w0, u0)
    if p == -math.pi:
        p = math.pi
    return p


def truncated_map_step(u: float, w: float, h: float, eps: float) -> tuple[float, float]:
    """One application of the remainder-free slow map.

    u' = u - beta*eps^2*w*sqrt(h^2 - u^2 - w^2),
    w' = w + beta*eps^2*u*sqrt(h^2 - u^2 - w^2),  beta = 14*pi/3.
    """
    s2 = h * h - (u * u + w * w)
    if s2 < 0.0:
        raise ValueError(f"(u, w) outside the disk of radius h: h^2 - T = {s2:.3g}")
    a = (BETA * (eps * eps)) * math.sqrt(s2)
    return u - a * w, w + a * u


def iterate_truncated_map(u0, w0, h, eps, n) -> tuple[np.ndarray, np.ndarray]:
    """Arrays u, w of the map orbit for k = 0 .. n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    nok, us, ws = _kernels.truncated_map_run(float(u0), float(w0), float(h), float(eps), BETA, int(n))
    if nok < n:
        raise ValueError(f"map iterate left the disk u^2 + w^2 <= h^2 at step {nok + 1}")
    return us, ws


def map_identity_residual_ulps(u, w, h, eps):
    """Residual of T' - T - beta^2*eps^4*T*(h^2 - T) in units of ulp(T).

    Vectorized; evaluates both sides exactly as the map step computes them.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    T = u * u + w * w
    s2 = h * h - T
    a = (BETA * (eps * eps)) * np.sqrt(s2)
    un = u - a * w
    wn = w + a * u
    Tn = un * un + wn * wn
    resid = Tn - (T + (a * a) * T)
    return resid / np.spacing(T)


def phase_sum(phi_0: float, t_seq, h: float, eps: float) -> PhaseSequence:
    """Accumulated phases phi_n = phi0 + beta*eps^2*sum_{k<n} sqrt(h^2 - T_k).

    t_seq supplies T_0 .. T_N; the sum is compensated, which matters at
    n ~ 1e6 where naive accumulation loses ~6 digits.
    """
    T = np.asarray(t_seq, dtype=float)
    s2 = h * h - T
    if np.any(s2 < 0.0):
        raise ValueError("T_k sequence leaves the disk T <= h^2")
    inc = (BETA * (eps * eps)) * np.sqrt(s2)
    phi = np.empty(T.size)
    phi[0] = phi_0
    if T.size > 1:
        phi[1:] = phi_0 + _kernels.kahan_cumsum(inc[:-1])
    return PhaseSequence(phi=phi, radius=np.sqrt(T), increments=inc)


def predict_series(inp: PredictorInput, n: int, t_seq=None) -> tuple[np.ndarray, np.ndarray]:
    """Predicted (u_k, w_k) for k = 0 .. n under the input's mode.

    P3 uses the supplied T_k sequence (length n+1); by default it falls back
    to the P2-predicted radii, which makes P3 a re-summation of P2's phase.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if inp.mode == "P2":
        return iterate_truncated_map(inp.u0, inp.w0, inp.h, inp.eps, n)
    if inp.mode == "P1":
        k = np.arange(n + 1, dtype=float)
        rate = BETA * inp.eps * inp.eps * math.sqrt(inp.h2 - inp.t0)
        phi = phase0(inp.u0, inp.w0) + rate * k
        r = math.sqrt(inp.t0)
        return r * np.cos(phi), r * np.sin(phi)
    # P3
    if t_seq is None:
        us, ws = iterate_truncated_map(inp.u0, inp.w0, inp.h, inp.eps, n)
        t_seq = us * us + ws * ws
    t_seq = np.asarray(t_seq, dtype=float)
    if t_seq.size != n + 1:
        raise ValueError(f"T_k sequence must have length n + 1 = {n + 1}, got {t_seq.size}")
    seq = phase_sum(phase0(inp.u0, inp.w0), t_seq, inp.h, inp.eps)
    return seq.radius * np.cos(seq.phi), seq.radius * np.sin(seq.phi)


def predict(inp: PredictorInput, n: int, t_seq=None) -> tuple[float, float]:
    """Predicted (u_n, w_n) at a single crossing index."""
    us, ws = predict_series(inp, n, t_seq=t_seq)
    return float(us[-1]), float(ws[-1])


def slow_ode_solution(v0: float, w0: float, h: float, eps: float, n):
    """Sinusoidal solution of the averaged slow flow, evaluated at real n.

    V(n) = h + A*sin(n*beta'*eps^2 + B), W(n) = A*cos(n*beta'*eps^2 + B) with
    beta' = (14*pi/3)*sqrt(k0), k0 = 2*h*v0 - v0^2 - w0^2, and A, B fixed by
    V(0) = v0, W(0) = w0.  For section data (y = 0) k0 equals h^2 - T0 and
    this coincides with the P1 sinusoid.
    """
    k0 = 2.0 * h * v0 - v0 * v0 - w0 * w0
    if k0 < 0.0:
        raise ValueError(f"k0 = 2*h*v0 - v0^2 - w0^2 = {k0:.3g} must be >= 0")
    u0 = h - v0
    amp = math.hypot(u0, w0)
    b = math.atan2(-u0, w0)
    rate = BETA * math.sqrt(k0) * eps * eps
    ang = np.asarray(n, dtype=float) * rate + b
    return h + amp * np.sin(ang), amp * np.cos(ang)


def validity_horizon(eps: float, regime: str, c: float = 0.5) -> int:
    """Largest n for which the named approximation regime applies.

    series: n*eps^2 <= c, P1: n*eps^(5/2) <= c, P2/P3: n*eps^3 <= c.
    """
    if regime not in _HORIZON_EXPONENT:
        raise ValueError(f"regime must be one of {tuple(_HORIZON_EXPONENT)}, got {regime!r}")
    if not (eps > 0.0):
        raise ValueError("eps must be positive for a finite horizon")
    if not (c > 0.0):
        raise ValueError("c must be positive")
    # a one-ulp quotient undershoot must not lose the boundary integer
    return int(math.floor(c / eps ** _HORIZON_EXPONENT[regime] * (1.0 + 1e-12)))
