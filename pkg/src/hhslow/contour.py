"""Slow flow continued around the complex-y contour, with branch tracking.

One fast loop corresponds to one traversal of the closed path made of two
counterclockwise circles of radius sqrt(v0) centered at +sqrt(v0) and
-sqrt(v0), starting and ending at y = 0.  Along the path the slow state
(v, w, t) obeys

    dv/dy = -2*eps*(x^2 - y^2),
    dw/dy = -eps*((x^2 - y^2)*xdot/sqrt(v - y^2) + 2*x*y),
    dt/dy = 1/sqrt(v - y^2),

where x(y, v, w) solves the energy relation,

    x = (w*y + sqrt(v - y^2)*sqrt(S)) / (v + 2*eps*y*(v - y^2)),
    S = (2*h*v - v^2 - w^2)*(1 + 2*eps*y) + (4/3)*eps^2*y^4*(v - y^2)
        - 4*eps*(h - (2/3)*v)*y^3,
    xdot = (w - x*y)/sqrt(v - y^2).

Both square roots are multivalued; they are continued analytically along the
path by keeping each root within a quarter turn of its previous value (the
principal branch would jump on these circles).  The argument of (v - y^2)
winds by 4*pi over the full path, so its continued root returns to +sqrt(v0),
while sqrt(S) is unramified.  At the start sqrt(v0 - y^2) = +sqrt(v0) and
sqrt(S) = x0*sqrt(v0): the sign of x0 selects the branch.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Contour",
    "ContourState",
    "ContourError",
    "ContourResult",
    "x_of_y",
    "integrate_contour",
    "iterate_contour",
    "first_order_slow",
    "one_loop_increment_check",
    "sqrt_along_path",
]

_TWO_PI = 2.0 * math.pi


class ContourError(RuntimeError):
    """Branch jump, degenerate denominator, or residual imaginary part."""


@dataclass(frozen=True)
class Contour:
    """The two-circle path: nodes per circle and the discretized y samples."""

    v0: float
    resolution: int = 4096

    def __post_init__(self):
        if not (self.v0 > 0.0):
            raise ValueError("v0 must be positive")
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16 nodes per circle")

    def circle_point(self, circle: int, theta):
        """Point and tangent on one circle; theta runs 0 .. 2*pi per circle."""
        r = math.sqrt(self.v0)
        if circle == 0:
            e = np.exp(1j * (np.asarray(theta, dtype=float) - math.pi))
            return r * (1.0 + e), 1j * r * e
        e = np.exp(1j * np.asarray(theta, dtype=float))
        return r * (-1.0 + e), 1j * r * e

    @property
    def nodes(self) -> np.ndarray:
        """Complex y samples of the closed path (endpoint y = 0 included)."""
        th = np.linspace(0.0, _TWO_PI, self.resolution + 1)
        y0, _ = self.circle_point(0, th)
        y1, _ = self.circle_point(1, th[1:])
        return np.concatenate([y0, y1])


@dataclass
class ContourState:
    """Complex slow state at a path point plus the continued root values."""

    y: complex
    v: complex
    w: complex
    t: complex
    sqrt_vmy2: complex
    sqrt_s: complex


def _continue_root(z: complex, ref: complex) -> complex:
    """Square root of z on the branch continuous with ref.

    Requires the root to rotate less than a quarter turn since ref; a nearly
    orthogonal candidate means the discretization lost the branch.
    """
    r = cmath.sqrt(z)
    dot = r.real * ref.real + r.imag * ref.imag
    if dot < 0.0:
        r = -r
        dot = -dot
    if dot * dot < 0.005 * (abs(z) * (ref.real**2 + ref.imag**2)):
        raise ContourError(
            f"branch rotated ~90 degrees in one step near argument {z!r}; raise resolution"
        )
    return r


def _s_poly(y, v, w, h, eps):
    s0 = 2.0 * h * v - v * v - w * w
    ey2 = eps * y * y
    return (
        s0 * (1.0 + 2.0 * eps * y)
        + (4.0 / 3.0) * ey2 * ey2 * (v - y * y)
        - 4.0 * eps * (h - (2.0 / 3.0) * v) * y**3
    )


def _x_xdot(y, v, w, h, eps, ref_q, ref_s, vscale):
    """x and xdot with continued roots; returns (x, xdot, q, s)."""
    q = _continue_root(v - y * y, ref_q)
    s = _continue_root(_s_poly(y, v, w, h, eps), ref_s)
    den = v + 2.0 * eps * y * (v - y * y)
    if abs(den) < 0.25 * vscale:
        raise ContourError(f"degenerate denominator v + 2*eps*y*(v - y^2) at y = {y!r}")
    x = (w * y + q * s) / den
    xdot = (w - x * y) / q
    return x, xdot, q, s


def x_of_y(state: ContourState, h: float, eps: float) -> tuple[complex, complex]:
    """Fast coordinates (x, xdot) at a contour state, on its tracked branches."""
    vscale = abs(state.v) if state.v != 0 else 1.0
    x, xdot, _, _ = _x_xdot(
        state.y, state.v, state.w, h, eps, state.sqrt_vmy2, state.sqrt_s, vscale
    )
    return x, xdot


@dataclass
class ContourResult:
    """End values after one traversal plus branch/reality diagnostics."""

    v1: float
    w1: float
    t1: float
    diagnostics: dict
    samples: list = field(default_factory=list)


def _rhs(y, dy, v, w, h, eps, ref_q, ref_s, vscale):
    x, xdot, q, s = _x_xdot(y, v, w, h, eps, ref_q, ref_s, vscale)
    fx2 = x * x - y * y
    dv = -2.0 * eps * fx2 * dy
    dw = -eps * (fx2 * xdot / q + 2.0 * x * y) * dy
    dt = dy / q
    return dv, dw, dt, q, s


def integrate_contour(
    v0: float,
    w0: float,
    h: float,
    eps: float,
    resolution: int = 4096,
    x0_sign: int = 1,
    path_v0: float | None = None,
    reality_tol: float = 1e-8,
    record_every: int = 0,
    check_reality: bool = True,
) -> ContourResult:
    """Solve the slow system once around the contour; return (v1, w1, t1).

    Initial branches at y = 0: sqrt(v0 - y^2) = +sqrt(v0) and
    sqrt(S) = x0_sign * r0 with r0 = sqrt(2*h*v0 - v0^2 - w0^2); x0_sign must
    match the sign of x at the starting crossing.  The path is centered on
    sqrt(path_v0) (defaults to v0; pass the original center when iterating
    loops with a fixed contour).  RK4 in the circle parameter with
    ``resolution`` nodes per circle; branch references refresh at every node
    and rotate far less than a quarter turn between refreshes.

    End values of v and w are real up to discretization; their imaginary
    parts are checked against reality_tol (relative) and the total winding of
    arg(v - y^2), which must come out 4*pi, is reported in the diagnostics.
    """
    if not (v0 > 0.0):
        raise ValueError("v0 must be positive")
    if (h - v0) ** 2 + w0 * w0 >= h * h:
        raise ValueError("initial data must satisfy (h - v0)^2 + w0^2 < h^2")
    if eps < 0.0 or not math.isfinite(eps):
        raise ValueError(f"eps must be a finite nonnegative real, got {eps!r}")
    path = Contour(v0=path_v0 if path_v0 is not None else v0, resolution=resolution)
    vscale = min(v0, path.v0)

    r0sq = 2.0 * h * v0 - v0 * v0 - w0 * w0
    v = complex(v0)
    w = complex(w0)
    t = complex(0.0)
    q_ref = complex(math.sqrt(v0))
    s_ref = complex((1 if x0_sign >= 0 else -1) * math.sqrt(r0sq))

    dth = _TWO_PI / resolution
    winding = 0.0
    prev_vmy2 = v
    samples = []
    if record_every:
        samples.append(ContourState(0j, v, w, t, q_ref, s_ref))

    for circle in (0, 1):
        for k in range(resolution):
            th = k * dth
            y1, d1 = path.circle_point(circle, th)
            ym, dm = path.circle_point(circle, th + 0.5 * dth)
            y2, d2 = path.circle_point(circle, th + dth)

            k1v, k1w, k1t, q1, s1 = _rhs(y1, d1, v, w, h, eps, q_ref, s_ref, vscale)
            k2v, k2w, k2t, _, _ = _rhs(
                ym, dm, v + 0.5 * dth * k1v, w + 0.5 * dth * k1w, h, eps, q1, s1, vscale
            )
            k3v, k3w, k3t, _, _ = _rhs(
                ym, dm, v + 0.5 * dth * k2v, w + 0.5 * dth * k2w, h, eps, q1, s1, vscale
            )
            k4v, k4w, k4t, _, _ = _rhs(
                y2, d2, v + dth * k3v, w + dth * k3w, h, eps, q1, s1, vscale
            )
            v = v + (dth / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            w = w + (dth / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
            t = t + (dth / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)

            vmy2 = v - y2 * y2
            winding += cmath.phase(vmy2 / prev_vmy2)
            prev_vmy2 = vmy2
            q_ref = _continue_root(vmy2, q_ref)
            s_ref = _continue_root(_s_poly(y2, v, w, h, eps), s_ref)
            if record_every and ((k + 1) % record_every == 0 or k == resolution - 1):
                samples.append(ContourState(complex(y2), v, w, t, q_ref, s_ref))

    im_vw = abs(v.imag) + abs(w.imag)
    scale = abs(v) + abs(w)
    diagnostics = {
        "resolution": resolution,
        "winding_arg_vmy2": winding,
        "im_v1": v.imag,
        "im_w1": w.imag,
        "im_t1": t.imag,
        "reality_ratio": im_vw / scale if scale > 0 else 0.0,
        "sqrt_vmy2_end": q_ref,
        "sqrt_s_end": s_ref,
    }
    if check_reality and im_vw > reality_tol * scale:
        raise ContourError(
            f"residual imaginary part {im_vw:.3e} exceeds {reality_tol:.1e} x {scale:.3e}"
        )
    return ContourResult(v1=v.real, w1=w.real, t1=t.real, diagnostics=diagnostics, samples=samples)


def iterate_contour(
    v0: float,
    w0: float,
    h: float,
    eps: float,
    n_loops: int,
    resolution: int = 4096,
    x0_sign: int = 1,
    recenter: bool = False,
    reality_tol: float = 1e-8,
):
    """Iterate the contour map n_loops times; returns (v, w, t) arrays.

    The path stays centered on the initial sqrt(v0); recenter=True moves the
    center to the current v each loop (experimental).  The sqrt(S) branch is
    carried across loops through the sign of x at each loop start.
    """
    vs = np.empty(n_loops + 1)
    ws = np.empty(n_loops + 1)
    ts = np.empty(n_loops + 1)
    vs[0], ws[0], ts[0] = v0, w0, 0.0
    v, w = v0, w0
    sign = 1 if x0_sign >= 0 else -1
    for k in range(1, n_loops + 1):
        res = integrate_contour(
            v, w, h, eps,
            resolution=resolution,
            x0_sign=sign,
            path_v0=(v if recenter else v0),
            reality_tol=reality_tol,
        )
        v, w = res.v1, res.w1
        sign = 1 if res.diagnostics["sqrt_s_end"].real >= 0 else -1
        vs[k], ws[k], ts[k] = v, w, ts[k - 1] + res.t1
    return vs, ws, ts


def first_order_slow(v0: float, w0: float, h: float, y: complex, sqrt_vmy2: complex):
    """Closed-form first-order slow corrections (v1(y), w1(y)) along the path.

    sqrt_vmy2 is the continued value of sqrt(v0 - y^2) at y.  Both functions
    vanish at y = 0 on the start branch and return to zero after a full loop:
    only the arcsine-type pieces of the second order ramify, not these.
    """
    r0 = math.sqrt(2.0 * h * v0 - v0 * v0 - w0 * w0)
    q = sqrt_vmy2
    c32 = (v0 - y * y) * q
    sv0 = math.sqrt(v0)
    v1 = (-2.0 / (3.0 * v0 * v0)) * (
        -2.0 * w0 * r0 * c32
        + 2.0 * v0 * sv0 * w0 * r0
        - 2.0 * h * v0 * y**3
        + 6.0 * h * v0 * v0 * y
        - 3.0 * v0 * w0 * w0 * y
        - 3.0 * v0**3 * y
        + 2.0 * w0 * w0 * y**3
    )
    w1 = (1.0 / (3.0 * v0**3)) * (
        6.0 * h * v0 * w0 * y**3
        - 6.0 * h * v0 * v0 * w0 * y
        - 4.0 * v0 * v0 * w0 * y**3
        - 5.0 * v0**3 * sv0 * r0
        + 3.0 * v0**3 * w0 * y
        - v0 * sv0 * w0 * w0 * r0
        + 2.0 * h * v0 * v0 * sv0 * r0
        + 3.0 * v0 * w0**3 * y
        - 4.0 * w0**3 * y**3
        + q * (
            -2.0 * v0 * v0 * y * y * r0
            - 2.0 * h * v0 * v0 * r0
            + 5.0 * v0**3 * r0
            + v0 * w0 * w0 * r0
            + 2.0 * h * v0 * y * y * r0
            - 4.0 * w0 * w0 * y * y * r0
        )
    )
    return v1, w1


def sqrt_along_path(values, start: complex) -> np.ndarray:
    """Continued square roots of a sampled analytic function along a path."""
    out = np.empty(len(values), dtype=complex)
    ref = complex(start)
    for i, z in enumerate(values):
        ref = _continue_root(complex(z), ref)
        out[i] = ref
    return out


def one_loop_increment_check(
    v0: float,
    w0: float,
    h: float,
    eps_list,
    resolution: int = 4096,
) -> dict:
    """Residuals of the one-loop increments against their leading terms.

    The leading increments are dv = eps^2*(14*pi/3)*w0*r0 and
    dw = eps^2*(14*pi/3)*(h - v0)*r0 with r0 = sqrt(2*h*v0 - v0^2 - w0^2);
    the remainders are O(eps^3), so the fitted log-log slopes of the
    residuals should be about 3.
    """
    beta = 14.0 * math.pi / 3.0
    r0 = math.sqrt(2.0 * h * v0 - v0 * v0 - w0 * w0)
    eps_arr = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    rows = []
    for eps in eps_arr:
        res = integrate_contour(v0, w0, h, eps, resolution=resolution)
        rows.append(
            {
                "eps": float(eps),
                "v1": res.v1,
                "w1": res.w1,
                "t1": res.t1,
                "resid_v": res.v1 - v0 - eps * eps * beta * w0 * r0,
                "resid_w": res.w1 - w0 - eps * eps * beta * (h - v0) * r0,
                "t1_dev": res.t1 - _TWO_PI,
            }
        )
    out = {
        "rows": rows,
        "leading_v_coeff": beta * w0 * r0,
        "leading_w_coeff": beta * (h - v0) * r0,
    }
    if eps_arr.size >= 2:
        lv = np.log(np.abs([r["resid_v"] for r in rows]))
        lw = np.log(np.abs([r["resid_w"] for r in rows]))
        le = np.log(eps_arr)
        out["slope_v"] = float(np.polyfit(le, lv, 1)[0])
        out["slope_w"] = float(np.polyfit(le, lw, 1)[0])
    return out
