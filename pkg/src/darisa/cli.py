"""Command line interface.

Verbs mirror the experiment sweeps: `dof-sweep`, `eigen-capacity`,
`edof-spacing`, `edof-agility`, `edof-elements`, `edof-bits`, `optimize`,
and `predict`.  Each verb reads a YAML scenario (or a built-in default),
writes CSV (and JSON with per-trial records) into --out-dir, and renders
a PNG figure next to the data unless --no-figures is given.  Reruns with
identical config and seed produce byte-identical CSV.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .experiments import (ScenarioConfig, run_dof_sweep, run_edof_sweep,
                          run_eigen_capacity, run_predict, run_single_optimize)
from .report import render_sweep_figure, render_trace_figure, write_csv, write_json

_DEFAULT_SCENARIO = {
    "arrays": {
        "tx": {"count": 4, "size_x": 1.0, "size_y": 1.0, "spacing": 0.25},
        "rx": {"count": 2, "size_x": 1.0, "size_y": 1.0, "spacing": 0.25},
    },
    "clusters": [{"azimuth_center_deg": 180.0, "azimuth_spread_deg": 180.0,
                  "zenith_center_deg": 90.0, "zenith_spread_deg": 90.0}],
    "slots": 2,
    "snr_grid_db": [0.0, 10.0, 20.0, 30.0],
    "trials": 5,
    "seed": 1,
    "optimizer": {"epsilon": 0.01, "tol": 1e-5, "max_iters": 300, "num_draws": 100},
}

_EDOF_VERBS = {
    "edof-spacing": ("spacing", "element spacing (wavelengths)"),
    "edof-agility": ("slots", "phase updates per symbol K"),
    "edof-elements": ("elements", "elements per receive panel axis"),
    "edof-bits": ("bits", "phase quantization bits"),
}

_DEFAULT_SWEEPS = {
    "spacing": (0.5, 0.25, 0.125),
    "slots": (1, 2, 3, 4),
    "elements": (4, 8),
    "bits": (1, 2, 3, None),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darisa",
        description="DARISA MIMO channel synthesis, DoF analysis, and EDoF optimization")
    sub = parser.add_subparsers(dest="verb", required=True)
    verbs = ["dof-sweep", "eigen-capacity", "edof-spacing", "edof-agility",
             "edof-elements", "edof-bits", "optimize", "predict"]
    for verb in verbs:
        p = sub.add_parser(verb)
        p.add_argument("--config", type=Path, default=None,
                       help="YAML scenario file (built-in default if omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--out-dir", type=Path, default=Path("results"))
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering, keep CSV/JSON only")
        if verb == "dof-sweep":
            p.add_argument("--axis", choices=("aperture", "spread"), default="aperture")
    return parser


def _load_config(args) -> ScenarioConfig:
    if args.config is not None:
        cfg = ScenarioConfig.from_file(args.config)
    else:
        cfg = ScenarioConfig.from_dict(_DEFAULT_SCENARIO)
    from dataclasses import replace
    # seed precedence: --seed flag, then DARISA_SEED, then the scenario value
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    elif "DARISA_SEED" in os.environ:
        cfg = replace(cfg, seed=int(os.environ["DARISA_SEED"]))
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except Exception as exc:  # fatal: emit a machine-readable error record
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    verb = args.verb
    written: list[Path] = []

    if verb == "dof-sweep":
        result = run_dof_sweep(cfg, kind=args.axis, threads=args.threads)
        written.append(write_csv(out / "dof_sweep.csv", result.header, result.rows))
        written.append(write_json(out / "dof_sweep.json", result.records))
        if not args.no_figures:
            xlabel = ("panel aperture (wavelengths)" if args.axis == "aperture"
                      else "azimuth spread (degrees)")
            written.append(render_sweep_figure(
                result, out / "dof_sweep.png", "Channel DoF vs " + args.axis,
                {"numerical rank": "rank_mean", "prediction": "dof_theory",
                 "EDoF": "edof_mean"}, xlabel, "degrees of freedom"))
    elif verb == "eigen-capacity":
        eigen, capacity = run_eigen_capacity(cfg, threads=args.threads)
        written.append(write_csv(out / "eigen_values.csv", eigen.header, eigen.rows))
        written.append(write_csv(out / "capacity.csv", capacity.header, capacity.rows))
        written.append(write_json(out / "eigen_capacity.json", eigen.records))
        if not args.no_figures:
            written.append(render_sweep_figure(
                eigen, out / "eigen_values.png", "Ordered singular values",
                {"random phases": "sv_sq_random_mean", "optimized phases": "sv_sq_opt_mean"},
                "singular value index", "squared singular value", logy=True))
            written.append(render_sweep_figure(
                capacity, out / "capacity.png", "Capacity vs SNR",
                {"exact, random": "cap_exact_random_mean",
                 "exact, optimized": "cap_exact_opt_mean",
                 "EDoF approx, random": "cap_edof_random_mean",
                 "EDoF approx, optimized": "cap_edof_opt_mean"},
                "SNR (dB)", "capacity (bit/s/Hz)"))
    elif verb in _EDOF_VERBS:
        kind, xlabel = _EDOF_VERBS[verb]
        values = cfg.sweep_values if cfg.sweep_values is not None else _DEFAULT_SWEEPS[kind]
        result = run_edof_sweep(cfg, kind=kind, values=values, threads=args.threads)
        stem = verb.replace("-", "_")
        written.append(write_csv(out / f"{stem}.csv", result.header, result.rows))
        written.append(write_json(out / f"{stem}.json", result.records))
        if not args.no_figures:
            written.append(render_sweep_figure(
                result, out / f"{stem}.png", "EDoF vs " + kind,
                {"random phases": "edof_random_mean", "optimized phases": "edof_opt_mean",
                 "rank bound": "dof_composite"}, xlabel, "effective DoF"))
    elif verb == "optimize":
        record = run_single_optimize(cfg)
        written.append(write_json(out / "optimize.json", record))
        header = ["edof_random", "edof_opt", "sdr_bound", "rank_random", "rank_opt"]
        written.append(write_csv(out / "optimize.csv", header,
                                 [[record.get(k) for k in header]]))
        if not args.no_figures:
            written.append(render_trace_figure(record, out / "optimize.png",
                                               "Ratio bisection trace"))
    elif verb == "predict":
        result = run_predict(cfg)
        written.append(write_csv(out / "predict.csv", result.header, result.rows))
        written.append(write_json(out / "predict.json", result.records))
    else:  # pragma: no cover
        raise ValueError(f"unknown verb {verb}")

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
