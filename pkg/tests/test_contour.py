import cmath
import math

import numpy as np
import pytest

from hhslow import IntegratorConfig, iterate_poincare
from hhslow.model import TWO_PI
from hhslow.contour import (
    Contour,
    ContourError,
    ContourState,
    first_order_slow,
    integrate_contour,
    iterate_contour,
    one_loop_increment_check,
    sqrt_along_path,
    x_of_y,
)

V0, W0, H = 0.01, 0.02, 0.1
R0 = math.sqrt(2 * H * V0 - V0**2 - W0**2)  # 0.0387298...


def test_eps0_loop_is_exact():
    res = integrate_contour(V0, W0, H, 0.0, resolution=4096)
    assert res.v1 == V0 and res.w1 == W0
    assert abs(res.t1 - TWO_PI) < 1e-10
    assert res.diagnostics["winding_arg_vmy2"] == pytest.approx(4.0 * math.pi, abs=1e-9)
    assert res.diagnostics["sqrt_vmy2_end"] == pytest.approx(math.sqrt(V0), abs=1e-12)
    assert res.diagnostics["sqrt_s_end"] == pytest.approx(R0, abs=1e-12)


def test_x_at_start_and_energy():
    st = ContourState(
        y=0j, v=complex(V0), w=complex(W0), t=0j,
        sqrt_vmy2=complex(math.sqrt(V0)), sqrt_s=complex(R0),
    )
    x, xdot = x_of_y(st, H, 0.01)
    assert x.imag == 0.0 and xdot.imag == 0.0
    assert x.real == pytest.approx(R0 / math.sqrt(V0), rel=1e-14)
    assert xdot.real == pytest.approx(W0 / math.sqrt(V0), rel=1e-14)
    # energy split at y = 0: x^2 + xdot^2 + v0 = 2h
    assert x.real**2 + xdot.real**2 + V0 == pytest.approx(2 * H, rel=1e-13)


def test_x_sign_branch():
    st = ContourState(
        y=0j, v=complex(V0), w=complex(W0), t=0j,
        sqrt_vmy2=complex(math.sqrt(V0)), sqrt_s=complex(-R0),
    )
    x, _ = x_of_y(st, H, 0.0)
    assert x.real == pytest.approx(-R0 / math.sqrt(V0), rel=1e-14)


def test_eps0_real_segment_energy_identity():
    # For real y inside (-sqrt(v0), sqrt(v0)) at eps = 0: x^2 + xdot^2 = 2h - v0.
    for y in np.linspace(-0.9 * math.sqrt(V0), 0.9 * math.sqrt(V0), 11):
        q = math.sqrt(V0 - y * y)
        st = ContourState(
            y=complex(y), v=complex(V0), w=complex(W0), t=0j,
            sqrt_vmy2=complex(q), sqrt_s=complex(R0),
        )
        x, xdot = x_of_y(st, H, 0.0)
        assert x.imag == pytest.approx(0.0, abs=1e-15)
        assert (x.real**2 + xdot.real**2) == pytest.approx(2 * H - V0, rel=1e-12)


def test_branch_returns_after_loop_small_eps():
    eps = 0.01
    res = integrate_contour(V0, W0, H, eps, resolution=2048)
    q_end = res.diagnostics["sqrt_vmy2_end"]
    s_end = res.diagnostics["sqrt_s_end"]
    assert q_end.real > 0 and abs(q_end - math.sqrt(res.v1)) < 1e-10
    r1 = math.sqrt(2 * H * res.v1 - res.v1**2 - res.w1**2)
    assert s_end.real > 0 and abs(s_end - r1) < 1e-8


def test_one_loop_increment_value():
    # eps = 0.01 at (v0, w0, h) = (0.01, 0.02, 0.1): leading increment
    # eps^2*(14*pi/3)*w0*r0 = 1.13561e-6, remainder O(eps^3).
    res = integrate_contour(V0, W0, H, 0.01, resolution=4096)
    lead = 1e-4 * (14.0 * math.pi / 3.0) * W0 * R0
    assert lead == pytest.approx(1.13561e-6, abs=1e-11)
    assert res.v1 - V0 == pytest.approx(lead, rel=0.02)
    lead_w = 1e-4 * (14.0 * math.pi / 3.0) * (H - V0) * R0
    assert res.w1 - W0 == pytest.approx(lead_w, rel=0.02)


def test_one_loop_residual_slopes():
    chk = one_loop_increment_check(0.02, 0.02, 0.1, [0.02, 0.01, 0.005], resolution=2048)
    assert chk["slope_v"] >= 2.7
    assert chk["slope_w"] >= 2.7
    # quasi-period from the contour: t1 - 2*pi shrinks like eps^2
    devs = [abs(r["t1_dev"]) for r in chk["rows"]]
    eps = [r["eps"] for r in chk["rows"]]
    slope_t = np.polyfit(np.log(eps), np.log(devs), 1)[0]
    assert 1.7 <= slope_t <= 2.3


def test_leading_increments_vanish_at_center():
    # w0 = 0, v0 = h: both leading coefficients are zero, so the one-loop
    # increments are O(eps^3).
    for eps in (0.02, 0.01):
        res = integrate_contour(H, 0.0, H, eps, resolution=2048)
        assert abs(res.v1 - H) < 0.05 * eps**3 + 1e-12
        assert abs(res.w1) < 0.2 * eps**3 + 1e-12


def test_contour_matches_section_map(canonical_ic):
    eps = 0.01
    cfg = IntegratorConfig(step_size=TWO_PI / 256)
    series = iterate_poincare(canonical_ic, eps, 1, cfg)
    res = integrate_contour(V0, W0, H, eps, resolution=4096)
    assert abs(series.v[1] - res.v1) < 1e-8
    assert abs(series.w[1] - res.w1) < 1e-8
    assert abs((series.t[1] - series.t[0]) - res.t1) < 1e-8


def test_multi_loop_matches_section(canonical_ic):
    eps = 0.01
    cfg = IntegratorConfig(step_size=TWO_PI / 256)
    series = iterate_poincare(canonical_ic, eps, 3, cfg)
    vs, ws, ts = iterate_contour(V0, W0, H, eps, 3, resolution=2048)
    assert np.max(np.abs(vs - series.v)) < 1e-8
    assert np.max(np.abs(ws - series.w)) < 1e-8


def test_recenter_flag_close_to_fixed():
    eps = 0.01
    v_fix, w_fix, _ = iterate_contour(V0, W0, H, eps, 3, resolution=1024)
    v_rc, w_rc, _ = iterate_contour(V0, W0, H, eps, 3, resolution=1024, recenter=True)
    assert np.max(np.abs(v_fix - v_rc)) < 1e-8
    assert np.max(np.abs(w_fix - w_rc)) < 1e-8


def test_reality_invariant():
    res = integrate_contour(V0, W0, H, 0.02, resolution=2048)
    assert res.diagnostics["reality_ratio"] <= 1e-8


def test_resolution_convergence_is_fourth_order():
    vals = {}
    for r in (256, 512, 1024):
        rr = integrate_contour(V0, W0, H, 0.01, resolution=r)
        vals[r] = (rr.v1, rr.w1)
    e1 = abs(vals[256][0] - vals[512][0]) + abs(vals[256][1] - vals[512][1])
    e2 = abs(vals[512][0] - vals[1024][0]) + abs(vals[512][1] - vals[1024][1])
    assert 8.0 <= e1 / e2 <= 32.0


def test_first_order_slow_zeros_and_unramified():
    v1, w1 = first_order_slow(V0, W0, H, 0.0, math.sqrt(V0))
    assert abs(v1) < 1e-18 and abs(w1) < 1e-18
    # after a full loop sqrt(v0 - y^2) returns to +sqrt(v0): still zero
    v1b, w1b = first_order_slow(V0, W0, H, 0.0, math.sqrt(V0))
    assert v1b == v1 and w1b == w1
    # mid-path (other branch at y = 0) the values differ from zero
    v1m, w1m = first_order_slow(V0, W0, H, 0.0, -math.sqrt(V0))
    assert abs(v1m) > 1e-6 or abs(w1m) > 1e-6


def test_first_order_slow_derivatives_match_rhs():
    # d v1/dy = F(y, v0, w0, 0) and d w1/dy = G(y, v0, w0, 0) on the path.
    c = Contour(v0=V0, resolution=4096)
    ths = np.linspace(0.0, 1.1, 400)
    ys, _ = c.circle_point(0, ths)
    q = sqrt_along_path(V0 - ys * ys, math.sqrt(V0))[-1]
    y, dy = c.circle_point(0, 1.1)
    hstep = 1e-6 * dy / abs(dy)
    qp = sqrt_along_path([V0 - (y + hstep) ** 2], q)[0]
    qm = sqrt_along_path([V0 - (y - hstep) ** 2], q)[0]
    v1p, w1p = first_order_slow(V0, W0, H, y + hstep, qp)
    v1m, w1m = first_order_slow(V0, W0, H, y - hstep, qm)
    dv1 = (v1p - v1m) / (2.0 * hstep)
    dw1 = (w1p - w1m) / (2.0 * hstep)
    x = (W0 * y + q * R0) / V0
    xd = (W0 - x * y) / q
    F = 2.0 * (y * y - x * x)
    G = -((x * x - y * y) * xd / q + 2.0 * x * y)
    assert abs(dv1 - F) < 1e-8
    assert abs(dw1 - G) < 1e-8


def test_first_order_pointwise_convergence():
    # (v(y) - v0)/eps -> v1(y) with slope-1 convergence in eps.
    errs_v, errs_w = [], []
    for eps in (0.02, 0.01, 0.005):
        rr = integrate_contour(V0, W0, H, eps, resolution=1024, record_every=256, check_reality=False)
        st = rr.samples[1]  # quarter of the first circle
        nodes = Contour(v0=V0, resolution=1024).nodes[: 256 + 1]
        qbase = sqrt_along_path(V0 - nodes * nodes, math.sqrt(V0))[-1]
        v1c, w1c = first_order_slow(V0, W0, H, st.y, qbase)
        errs_v.append(abs((st.v - V0) / eps - v1c))
        errs_w.append(abs((st.w - W0) / eps - w1c))
    for errs in (errs_v, errs_w):
        r1 = errs[0] / errs[1]
        r2 = errs[1] / errs[2]
        assert 1.6 <= r1 <= 2.4 and 1.6 <= r2 <= 2.4


def test_validation_errors():
    with pytest.raises(ValueError):
        integrate_contour(-0.01, 0.0, 0.1, 0.01)
    with pytest.raises(ValueError):
        integrate_contour(0.01, 0.11, 0.1, 0.01)  # outside the disk
    with pytest.raises(ValueError):
        integrate_contour(0.01, 0.02, 0.1, -0.1)
    with pytest.raises(ValueError):
        Contour(v0=0.01, resolution=4)


def test_numeric_quality_error_at_large_eps():
    with pytest.raises(ContourError):
        integrate_contour(V0, W0, H, 0.5, resolution=512)


def test_contour_nodes_shape():
    c = Contour(v0=0.04, resolution=64)
    nodes = c.nodes
    assert nodes.size == 2 * 64 + 1
    assert abs(nodes[0]) < 1e-15
    assert abs(nodes[-1]) < 1e-12
    assert abs(nodes[64] - 0.0) < 1e-12  # circle junction back at y = 0
    assert np.max(np.abs(nodes.real)) <= 2 * math.sqrt(0.04) + 1e-12
