"""Command-line entry points.

Exit codes: 0 success, 2 validation failure, 3 numeric-quality failure
(energy drift, branch tracking, residual imaginary parts), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .config import ConfigError, ExperimentConfig, parse_config
from .contour import ContourError, integrate_contour, one_loop_increment_check
from .harness import compare, run_experiment, run_sweep
from .integrate import DriftToleranceError, PropagationError
from .model import TWO_PI
from .predictor import PredictorInput, phase0, predict_series, validity_horizon
from .section import LostOscillationError, read_csv
from .series import SeriesIC, loop_time
from .svgplot import LineSeries, emit_plot

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load_config(args) -> ExperimentConfig:
    overrides = {}
    if getattr(args, "eps", None) is not None:
        overrides["eps"] = args.eps
    if getattr(args, "n", None) is not None:
        overrides["n_crossings"] = args.n
        overrides["t_end"] = 0.0
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    if getattr(args, "mode", None):
        overrides["modes"] = (args.mode,)
    if getattr(args, "plot", False):
        overrides["plots"] = True
    if args.config:
        with open(args.config) as f:
            cfg = parse_config(f.read())
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides).validate()
        return cfg
    return ExperimentConfig(**overrides).validate()


def _add_common(p):
    p.add_argument("--config", help="experiment config file (flat dotted keys)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--eps", type=float, help="coupling parameter")
    p.add_argument("--n", type=int, help="number of section crossings")
    p.add_argument("--mode", choices=("P1", "P2", "P3"), help="predictor mode")
    p.add_argument("--plot", action="store_true", help="emit SVG plots")


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if cfg.t_end <= 0.0:
        raise ConfigError("simulate requires run.t_end > 0")
    res = run_experiment(cfg)
    print(json.dumps(res.metadata, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_section(args) -> int:
    cfg = _load_config(args)
    if cfg.n_crossings <= 0:
        raise ConfigError("section requires run.n_crossings > 0")
    res = run_experiment(cfg)
    print(json.dumps(res.metadata, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_predict(args) -> int:
    inp = PredictorInput(u0=args.u0, w0=args.w0, h=args.h, eps=args.eps, mode=args.mode or "P2")
    us, ws = predict_series(inp, args.n)
    os.makedirs(args.out or ".", exist_ok=True)
    out = os.path.join(args.out or ".", f"predicted_{inp.mode}.csv")
    with open(out, "w") as f:
        f.write("n,u_pred,w_pred,mode\n")
        for i in range(us.size):
            f.write(f"{i},{float(us[i])!r},{float(ws[i])!r},{inp.mode}\n")
    meta = {
        "mode": inp.mode,
        "T0": inp.t0,
        "phi0": phase0(inp.u0, inp.w0) if inp.t0 > 0 else None,
        "horizons": {r: validity_horizon(args.eps, r) for r in ("series", "P1", "P2")}
        if args.eps > 0
        else {},
    }
    with open(os.path.join(args.out or ".", f"predicted_{inp.mode}.json"), "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    print(out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    numeric = read_csv(args.numeric)
    pred = np.genfromtxt(args.predicted, delimiter=",", names=True, dtype=None, encoding=None)
    pred = np.atleast_1d(pred)
    err, summary = compare(numeric, pred["u_pred"], pred["w_pred"], str(pred["mode"][0]))
    os.makedirs(args.out or ".", exist_ok=True)
    out = os.path.join(args.out or ".", f"error_{summary['mode']}.csv")
    with open(out, "w") as f:
        f.write("n,max_abs_dv,max_abs_dw\n")
        for i in range(err.n.size):
            f.write(f"{err.n[i]},{float(err.dv[i])!r},{float(err.dw[i])!r}\n")
    if args.plot:
        emit_plot(
            [LineSeries(err.n, err.dv, f"prefix max |dv| {summary['mode']}", "#1f4fd8")],
            os.path.join(args.out or ".", f"error_{summary['mode']}.svg"),
            title="prefix-max error",
            xlabel="n",
            ylabel="max |dv|",
        )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_contour_check(args) -> int:
    eps_list = [float(s) for s in args.eps_list.split(",")]
    chk = one_loop_increment_check(args.v0, args.w0, args.h, eps_list, resolution=args.resolution)
    zero = integrate_contour(args.v0, args.w0, args.h, 0.0, resolution=args.resolution)
    report = {
        "eps0_t1_minus_2pi": zero.t1 - TWO_PI,
        "eps0_dv": zero.v1 - args.v0,
        "eps0_dw": zero.w1 - args.w0,
        "winding_arg_vmy2_over_pi": zero.diagnostics["winding_arg_vmy2"] / math.pi,
        "rows": chk["rows"],
        "slope_v": chk.get("slope_v"),
        "slope_w": chk.get("slope_w"),
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "contour_check.json"), "w") as f:
            json.dump(report, f, indent=2, sort_keys=True, default=float)
            f.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True, default=float))
    return EXIT_OK


def _cmd_series_check(args) -> int:
    from .integrate import IntegratorConfig, integrate_to
    from .model import PhaseState
    from .series import perturbative_xy

    ic = SeriesIC(args.x0, args.y0, args.xdot0, args.ydot0)
    eps_list = [float(s) for s in args.eps_list.split(",")]
    cfg = IntegratorConfig(step_size=TWO_PI / 512, drift_tolerance=1e-6)
    errs = []
    for eps in eps_list:
        fin = integrate_to(
            PhaseState(ic.x0, ic.y0, ic.xdot0, ic.ydot0), args.t, eps, cfg
        ).final_state
        ev = perturbative_xy(ic, eps, args.t, order=2)
        errs.append(max(abs(fin.x - ev.x), abs(fin.y - ev.y)))
    slope = float(np.polyfit(np.log(eps_list), np.log(errs), 1)[0]) if len(errs) > 1 else None
    report = {
        "t": args.t,
        "eps_list": eps_list,
        "residuals": errs,
        "order_slope": slope,
        "loop_time": loop_time(ic, eps_list[0]) if ic.ydot0 != 0 else None,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    summary = run_sweep(cfg, max_workers=args.workers)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_plot(args) -> int:
    data = np.genfromtxt(args.csv, delimiter=",", names=True)
    cols = args.y.split(",")
    palette = ("#1f4fd8", "#d81f1f", "#1f8d2f", "#8d1fd8")
    series = [
        LineSeries(data[args.x], data[c], c, palette[i % len(palette)])
        for i, c in enumerate(cols)
    ]
    emit_plot(series, args.out, title=args.title or "", xlabel=args.x, ylabel=",".join(cols))
    print(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hhslow", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a trajectory to run.t_end")
    _add_common(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("section", help="record section crossings and predictor errors")
    _add_common(p)
    p.set_defaults(fn=_cmd_section)

    p = sub.add_parser("predict", help="evaluate a predictor from slow initial data")
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--w0", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("P1", "P2", "P3"), default="P2")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("compare", help="error series between section CSV and predictor CSV")
    p.add_argument("--numeric", required=True)
    p.add_argument("--predicted", required=True)
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("contour-check", help="one-loop contour increments and scaling")
    p.add_argument("--v0", type=float, default=0.02)
    p.add_argument("--w0", type=float, default=0.02)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--eps-list", default="0.02,0.01,0.005")
    p.add_argument("--resolution", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_contour_check)

    p = sub.add_parser("series-check", help="perturbation-series residual scaling")
    p.add_argument("--x0", type=float, default=0.1)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--xdot0", type=float, default=0.08)
    p.add_argument("--ydot0", type=float, default=0.1)
    p.add_argument("--eps-list", default="0.2,0.1,0.05")
    p.add_argument("--t", type=float, default=1.0)
    p.set_defaults(fn=_cmd_series_check)

    p = sub.add_parser("sweep", help="run the sweep.eps members concurrently")
    _add_common(p)
    p.add_argument("--workers", type=int)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("plot", help="plot CSV columns to a standalone SVG")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True, help="comma-separated y columns")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(fn=_cmd_plot)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DriftToleranceError, ContourError, LostOscillationError, PropagationError) as exc:
        print(f"numeric-quality error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
