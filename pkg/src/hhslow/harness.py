"""Experiment orchestration: run, predict, compare, and emit artifacts.

run_experiment drives one configuration end to end and leaves a deterministic
artifact directory: the exact config, the section record, per-mode predictor
CSVs, prefix-maximum error series, a metadata JSON (package version included),
and optional SVG overlays.  Sweeps run members concurrently but aggregate in
config order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, serialize_config
from .integrate import integrate_to
from .model import TWO_PI, hamiltonian_xy
from .predictor import PredictorInput, phase0, predict_series, validity_horizon
from .section import (
    SlowSeries,
    SlowPeriodError,
    iterate_poincare,
    measure_quasi_period,
    measure_slow_period,
    write_csv,
)
from .svgplot import LineSeries, emit_plot

__all__ = ["ErrorSeries", "RunResult", "compare", "run_experiment", "run_sweep"]


@dataclass(frozen=True)
class ErrorSeries:
    """Prefix-maximum |v_num - v_pred| and |w_num - w_pred| versus n."""

    n: np.ndarray
    dv: np.ndarray
    dw: np.ndarray
    mode: str


def compare(numeric: SlowSeries, u_pred, w_pred, mode: str = "") -> tuple[ErrorSeries, dict]:
    """Error series of a prediction against the section record, plus summary.

    The summary reports the overall maxima and the error at each validity
    horizon that falls inside the run.
    """
    u_pred = np.asarray(u_pred, dtype=float)
    w_pred = np.asarray(w_pred, dtype=float)
    if u_pred.size != len(numeric) or w_pred.size != len(numeric):
        raise ValueError(
            f"length mismatch: {len(numeric)} numeric vs {u_pred.size} predicted"
        )
    v_pred = numeric.h0 - u_pred
    dv = np.maximum.accumulate(np.abs(numeric.v - v_pred))
    dw = np.maximum.accumulate(np.abs(numeric.w - w_pred))
    err = ErrorSeries(n=numeric.n, dv=dv, dw=dw, mode=mode)
    summary = {
        "mode": mode,
        "max_err_v": float(dv[-1]),
        "max_err_w": float(dw[-1]),
    }
    if numeric.eps > 0.0:
        for regime in ("series", "P1", "P2"):
            hn = validity_horizon(numeric.eps, regime)
            if 0 <= hn < len(numeric):
                summary[f"err_v_at_{regime}_horizon"] = float(dv[hn])
    return err, summary


def _write_error_csv(err: ErrorSeries, path):
    with open(path, "w") as f:
        f.write("n,max_abs_dv,max_abs_dw\n")
        for i in range(err.n.size):
            f.write(f"{err.n[i]},{float(err.dv[i])!r},{float(err.dw[i])!r}\n")


def _write_predicted_csv(n, u, w, mode, path):
    with open(path, "w") as f:
        f.write("n,u_pred,w_pred,mode\n")
        for i in range(n.size):
            f.write(f"{n[i]},{float(u[i])!r},{float(w[i])!r},{mode}\n")


@dataclass
class RunResult:
    out_dir: str
    metadata: dict
    series: SlowSeries | None
    errors: dict


def _slow_drift_rate(v: np.ndarray, t: np.ndarray) -> float:
    span = t[-1] - t[0]
    if span <= 0:
        return 0.0
    return float(np.max(np.abs(v - v[0])) / span)


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Run one experiment per its config and write the artifact directory."""
    cfg.validate()
    os.makedirs(cfg.out_dir, exist_ok=True)
    with open(os.path.join(cfg.out_dir, "config.txt"), "w") as f:
        f.write(serialize_config(cfg))

    state0 = cfg.initial_state()
    icfg = cfg.integrator()
    eps = cfg.eps
    meta: dict = {
        "version": __version__,
        "eps": eps,
        "h0": float(hamiltonian_xy(cfg.x0, cfg.y0, cfg.xdot0, cfg.ydot0, eps)),
        "seed": cfg.seed,
    }
    errors: dict = {}
    series = None

    if cfg.t_end > 0.0:
        stride = max(cfg.steps_per_period // 8, 1)
        traj = integrate_to(state0, cfg.t_end, eps, icfg, sample_stride=stride)
        meta["t_end"] = cfg.t_end
        meta["max_drift"] = traj.max_drift
        v = traj.states[:, 1] ** 2 + traj.states[:, 3] ** 2
        meta["slow_drift_rate"] = _slow_drift_rate(v, traj.times)
        with open(os.path.join(cfg.out_dir, "trajectory.csv"), "w") as f:
            f.write("t,x,y,xdot,ydot\n")
            for i in range(len(traj)):
                x, y, xd, yd = traj.states[i]
                f.write(f"{float(traj.times[i])!r},{float(x)!r},{float(y)!r},{float(xd)!r},{float(yd)!r}\n")
        if cfg.plots:
            emit_plot(
                [LineSeries(traj.states[:, 0], traj.states[:, 1], "orbit", "#1f4fd8")],
                os.path.join(cfg.out_dir, "orbit_xy.svg"),
                title=f"orbit, eps={eps}",
                xlabel="x",
                ylabel="y",
            )
    else:
        series = iterate_poincare(state0, eps, cfg.n_crossings, icfg)
        write_csv(series, os.path.join(cfg.out_dir, "slow_points.csv"))
        meta["n_crossings"] = cfg.n_crossings
        meta["max_h_resid"] = float(np.max(series.h_resid))
        meta["T0"] = float(series.u[0] ** 2 + series.w[0] ** 2)
        meta["slow_drift_rate"] = _slow_drift_rate(series.v, series.t)
        qp = measure_quasi_period(series) if len(series) > 1 else None
        if qp is not None:
            meta["quasi_period_mean"] = qp.mean
            meta["quasi_period_max_dev"] = qp.max_dev_from_2pi
        try:
            sp = measure_slow_period(series)
            meta["slow_period_t"] = sp.period_t
            meta["slow_period_n"] = sp.period_n
        except SlowPeriodError:
            pass
        if meta["T0"] > 0.0:
            meta["phi0"] = phase0(float(series.u[0]), float(series.w[0]))
        if eps > 0.0:
            meta["horizons"] = {r: validity_horizon(eps, r) for r in ("series", "P1", "P2")}

        for mode in cfg.modes:
            inp = PredictorInput(
                u0=float(series.u[0]), w0=float(series.w[0]),
                h=series.h0, eps=eps, mode=mode,
            )
            up, wp = predict_series(inp, cfg.n_crossings)
            _write_predicted_csv(series.n, up, wp, mode, os.path.join(cfg.out_dir, f"predicted_{mode}.csv"))
            err, summary = compare(series, up, wp, mode)
            _write_error_csv(err, os.path.join(cfg.out_dir, f"error_{mode}.csv"))
            errors[mode] = summary
            if cfg.plots:
                emit_plot(
                    [
                        LineSeries(series.n, series.v, "numeric", "#1f4fd8"),
                        LineSeries(series.n, series.h0 - up, f"predicted {mode}", "#d81f1f"),
                    ],
                    os.path.join(cfg.out_dir, f"compare_v_{mode}.svg"),
                    title=f"v_n: numeric vs {mode} (eps={eps})",
                    xlabel="n",
                    ylabel="v_n",
                )
                emit_plot(
                    [LineSeries(err.n, err.dv, f"prefix max |dv| {mode}", "#1f4fd8")],
                    os.path.join(cfg.out_dir, f"error_v_{mode}.svg"),
                    title=f"prefix-max |v_num - v_{mode}| (eps={eps})",
                    xlabel="n",
                    ylabel="max |dv|",
                )
        meta["predictors"] = errors

    with open(os.path.join(cfg.out_dir, "metadata.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    return RunResult(out_dir=cfg.out_dir, metadata=meta, series=series, errors=errors)


def _run_member(args):
    cfg, eps, sub = args
    member = ExperimentConfig(
        **{
            **{f: getattr(cfg, f) for f in (
                "x0", "y0", "xdot0", "ydot0", "n_crossings", "t_end", "method",
                "steps_per_period", "drift_tolerance", "landing_substeps", "modes",
                "plots", "seed",
            )},
            "eps": eps,
            "out_dir": sub,
            "sweep_eps": (),
        }
    )
    res = run_experiment(member)
    return res.metadata


def run_sweep(cfg: ExperimentConfig, max_workers: int | None = None) -> list[dict]:
    """Run the sweep members concurrently; results ordered by config order."""
    cfg.validate()
    if not cfg.sweep_eps:
        raise ConfigError("sweep requires sweep.eps")
    jobs = [
        (cfg, eps, os.path.join(cfg.out_dir, f"eps_{_render_eps(eps)}"))
        for eps in cfg.sweep_eps
    ]
    if max_workers == 1:
        metas = [_run_member(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=max_workers or min(len(jobs), os.cpu_count() or 1)) as ex:
            metas = list(ex.map(_run_member, jobs))
    summary = [{"eps": eps, **meta} for (_, eps, _), meta in zip(jobs, metas)]
    with open(os.path.join(cfg.out_dir, "sweep_summary.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return summary


def _render_eps(eps: float) -> str:
    s = repr(float(eps))
    return s.replace(".", "p").replace("-", "m")
