"""Compiled inner loops: fixed-step propagation, section landing, map iteration.

Everything here is scalar float64 arithmetic inside numba-jitted loops; the
public modules wrap these with validation and container types.  If numba is
unavailable the kernels degrade to pure Python (slow but identical results).

Method codes: 0 = splitting composition (kicks/drifts arrays), 1 = classical RK4.
Status codes: 0 = ok, 3 = drift tolerance exceeded, 4 = lost oscillation /
degenerate crossing.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


METHOD_SPLIT = 0
METHOD_RK4 = 1

STATUS_OK = 0
STATUS_DRIFT = 3
STATUS_LOST = 4

_FOUR_PI = 4.0 * np.pi


@njit(cache=True)
def _hval(x, y, vx, vy, eps):
    return 0.5 * (x * x + y * y + vx * vx + vy * vy) + eps * (x * x * y - y * y * y / 3.0)


@njit(cache=True)
def _comp_step(x, y, vx, vy, dt, eps, kicks, drifts):
    c = kicks[0] * dt
    vx += c * (-x - 2.0 * eps * x * y)
    vy += c * (-y + eps * (y * y - x * x))
    for i in range(drifts.shape[0]):
        d = drifts[i] * dt
        x += d * vx
        y += d * vy
        c = kicks[i + 1] * dt
        vx += c * (-x - 2.0 * eps * x * y)
        vy += c * (-y + eps * (y * y - x * x))
    return x, y, vx, vy


@njit(cache=True)
def _rk4_step(x, y, vx, vy, dt, eps):
    a1x = -x - 2.0 * eps * x * y
    a1y = -y + eps * (y * y - x * x)

    x2 = x + 0.5 * dt * vx
    y2 = y + 0.5 * dt * vy
    u2 = vx + 0.5 * dt * a1x
    v2 = vy + 0.5 * dt * a1y
    a2x = -x2 - 2.0 * eps * x2 * y2
    a2y = -y2 + eps * (y2 * y2 - x2 * x2)

    x3 = x + 0.5 * dt * u2
    y3 = y + 0.5 * dt * v2
    u3 = vx + 0.5 * dt * a2x
    v3 = vy + 0.5 * dt * a2y
    a3x = -x3 - 2.0 * eps * x3 * y3
    a3y = -y3 + eps * (y3 * y3 - x3 * x3)

    x4 = x + dt * u3
    y4 = y + dt * v3
    u4 = vx + dt * a3x
    v4 = vy + dt * a3y
    a4x = -x4 - 2.0 * eps * x4 * y4
    a4y = -y4 + eps * (y4 * y4 - x4 * x4)

    s = dt / 6.0
    xn = x + s * (vx + 2.0 * u2 + 2.0 * u3 + u4)
    yn = y + s * (vy + 2.0 * v2 + 2.0 * v3 + v4)
    un = vx + s * (a1x + 2.0 * a2x + 2.0 * a3x + a4x)
    vn = vy + s * (a1y + 2.0 * a2y + 2.0 * a3y + a4y)
    return xn, yn, un, vn


@njit(cache=True)
def _one_step(x, y, vx, vy, dt, eps, kicks, drifts, method):
    if method == METHOD_RK4:
        return _rk4_step(x, y, vx, vy, dt, eps)
    return _comp_step(x, y, vx, vy, dt, eps, kicks, drifts)


@njit(cache=True)
def _land_rk4(x, y, vx, vy, t, eps, nsub):
    # Swap independent variable to y and integrate to y = 0 (Henon landing).
    h = (0.0 - y) / nsub
    for _ in range(nsub):
        i1 = 1.0 / vy
        k1x = vx * i1
        k1u = (-x - 2.0 * eps * x * y) * i1
        k1v = (-y + eps * (y * y - x * x)) * i1

        ym = y + 0.5 * h
        x2 = x + 0.5 * h * k1x
        u2 = vx + 0.5 * h * k1u
        v2 = vy + 0.5 * h * k1v
        i2 = 1.0 / v2
        k2x = u2 * i2
        k2u = (-x2 - 2.0 * eps * x2 * ym) * i2
        k2v = (-ym + eps * (ym * ym - x2 * x2)) * i2

        x3 = x + 0.5 * h * k2x
        u3 = vx + 0.5 * h * k2u
        v3 = vy + 0.5 * h * k2v
        i3 = 1.0 / v3
        k3x = u3 * i3
        k3u = (-x3 - 2.0 * eps * x3 * ym) * i3
        k3v = (-ym + eps * (ym * ym - x3 * x3)) * i3

        ye = y + h
        x4 = x + h * k3x
        u4 = vx + h * k3u
        v4 = vy + h * k3v
        i4 = 1.0 / v4
        k4x = u4 * i4
        k4u = (-x4 - 2.0 * eps * x4 * ye) * i4
        k4v = (-ye + eps * (ye * ye - x4 * x4)) * i4

        s = h / 6.0
        x += s * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        vx += s * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        t += s * (i1 + 2.0 * i2 + 2.0 * i3 + i4)
        vy += s * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        y = ye
    return x, vx, vy, t


@njit(cache=True)
def integrate_samples(x, y, vx, vy, t0, dt, nsteps, stride, eps, kicks, drifts,
                      method, h0, tol_abs):
    """Advance nsteps fixed steps, sampling every ``stride`` steps plus the end.

    Returns (status, ts, states, max_drift, t_violation, xf, yf, vxf, vyf, tf).
    """
    nrec = nsteps // stride + 1
    if nsteps % stride != 0:
        nrec += 1
    ts = np.empty(nrec)
    states = np.empty((nrec, 4))
    ts[0] = t0
    states[0, 0] = x
    states[0, 1] = y
    states[0, 2] = vx
    states[0, 3] = vy

    tacc = t0
    comp = 0.0
    maxd = 0.0
    status = STATUS_OK
    tviol = 0.0
    irec = 1
    for k in range(1, nsteps + 1):
        x, y, vx, vy = _one_step(x, y, vx, vy, dt, eps, kicks, drifts, method)
        yk = dt - comp
        tt = tacc + yk
        comp = (tt - tacc) - yk
        tacc = tt
        d = abs(_hval(x, y, vx, vy, eps) - h0)
        if d > maxd:
            maxd = d
        if d > tol_abs:
            status = STATUS_DRIFT
            tviol = tacc
            break
        if k % stride == 0 or k == nsteps:
            ts[irec] = tacc
            states[irec, 0] = x
            states[irec, 1] = y
            states[irec, 2] = vx
            states[irec, 3] = vy
            irec += 1
    return status, ts[:irec], states[:irec], maxd, tviol, x, y, vx, vy, tacc


@njit(cache=True)
def poincare_run(x, y, vx, vy, t0, dt, eps, kicks, drifts, method, h0, tol_abs,
                 ncross, direction, land_sub):
    """Record ncross same-direction section crossings of the running trajectory.

    The landing integrates the final partial step with y as the independent
    variable from the pre-step state; propagation itself is never restarted
    from landed states.  Returns
    (status, nfilled, t, v, w, hres, max_drift, t_violation, xf, yf, vxf, vyf, tf).
    """
    out_t = np.empty(ncross + 1)
    out_v = np.empty(ncross + 1)
    out_w = np.empty(ncross + 1)
    out_h = np.empty(ncross + 1)
    out_x = np.empty(ncross + 1)
    out_vx = np.empty(ncross + 1)
    out_vy = np.empty(ncross + 1)
    out_t[0] = t0
    out_v[0] = y * y + vy * vy
    out_w[0] = vx * vy + x * y
    out_h[0] = abs(_hval(x, y, vx, vy, eps) - h0)
    out_x[0] = x
    out_vx[0] = vx
    out_vy[0] = vy

    tacc = t0
    comp = 0.0
    maxd = out_h[0]
    status = STATUS_OK
    tviol = 0.0
    since = 0.0
    limit = _FOUR_PI + 2.0 * dt
    filled = 0
    while filled < ncross:
        xp = x
        yp = y
        vxp = vx
        vyp = vy
        tp = tacc
        x, y, vx, vy = _one_step(x, y, vx, vy, dt, eps, kicks, drifts, method)
        yk = dt - comp
        tt = tacc + yk
        comp = (tt - tacc) - yk
        tacc = tt
        since += dt
        d = abs(_hval(x, y, vx, vy, eps) - h0)
        if d > maxd:
            maxd = d
        if d > tol_abs:
            status = STATUS_DRIFT
            tviol = tacc
            break
        crossed = False
        if direction > 0:
            crossed = yp < 0.0 and y >= 0.0
        else:
            crossed = yp > 0.0 and y <= 0.0
        if crossed:
            if abs(vyp) < 1e-14:
                status = STATUS_LOST
                tviol = tacc
                break
            lx, lvx, lvy, lt = _land_rk4(xp, yp, vxp, vyp, tp, eps, land_sub)
            filled += 1
            out_t[filled] = lt
            out_v[filled] = lvy * lvy
            out_w[filled] = lvx * lvy
            out_h[filled] = abs(_hval(lx, 0.0, lvx, lvy, eps) - h0)
            out_x[filled] = lx
            out_vx[filled] = lvx
            out_vy[filled] = lvy
            since = 0.0
        elif since > limit:
            status = STATUS_LOST
            tviol = tacc
            break
    n = filled + 1
    return (status, filled, out_t[:n], out_v[:n], out_w[:n], out_h[:n],
            out_x[:n], out_vx[:n], out_vy[:n],
            maxd, tviol, x, y, vx, vy, tacc)


@njit(cache=True)
def truncated_map_run(u0, w0, h, eps, beta, n):
    """Iterate the remainder-free slow map n times; returns (nok, u, w).

    nok < n signals that the iterate left the disk u^2 + w^2 <= h^2.
    """
    us = np.empty(n + 1)
    ws = np.empty(n + 1)
    us[0] = u0
    ws[0] = w0
    b = beta * eps * eps
    u = u0
    w = w0
    h2 = h * h
    for k in range(1, n + 1):
        s2 = h2 - (u * u + w * w)
        if s2 < 0.0:
            return k - 1, us, ws
        a = b * np.sqrt(s2)
        un = u - a * w
        w = w + a * u
        u = un
        us[k] = u
        ws[k] = w
    return n, us, ws


@njit(cache=True)
def kahan_cumsum(values):
    """Compensated running sum; out[i] = sum(values[:i+1])."""
    out = np.empty_like(values)
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        yk = values[i] - c
        tt = s + yk
        c = (tt - s) - yk
        s = tt
        out[i] = s
    return out
