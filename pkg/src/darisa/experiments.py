"""Scenario configs, seeded Monte Carlo sweeps, and plot-ready results.

A scenario (YAML file or dict) fixes the arrays, the scattering clusters,
the slot count, and the optimizer knobs.  Sweep runners vary one axis
(panel aperture, angular spread, element spacing, slot count, element
count, or quantization bits), fan independent trials out to a worker
pool, and aggregate deterministically: trial t always uses seed XOR t, so
reruns and thread counts cannot change the numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .channel import ClusterSet, Cluster, generate_channel, sample_cluster_directions
from .composite import PhaseSchedule, assemble_composite
from .dof import composite_rank, scattering_dof, support_ellipse
from .geometry import ArrayConfig, Side, element_positions
from .metrics import capacity_edof_approx, spectrum
from .optimizer import (BracketError, DinkelbachRun, build_sdr_problem,
                        dinkelbach_bisect, quantize_phases)
from .rng import PHASES, generator, trial_seed


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment setup; every run is a pure function of it."""

    tx: ArrayConfig
    rx: ArrayConfig
    clusters: ClusterSet
    slots: int = 1
    snr_grid_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    trials: int = 100
    seed: int = 0
    rank_threshold: float = 1e-3
    quantization_bits: int | None = None
    epsilon: float = 1e-3
    tol: float = 1e-6
    max_iters: int = 5000
    num_draws: int = 100
    sweep_values: tuple | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.slots < 1:
            raise ValueError("slots must be at least 1")
        if not all(math.isfinite(s) for s in self.snr_grid_db):
            raise ValueError("snr grid values must be finite")

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        arrays = raw.get("arrays", {})
        tx = _array_from_dict(Side.TRANSMIT, arrays.get("tx", {}))
        rx = _array_from_dict(Side.RECEIVE, arrays.get("rx", {}))
        clusters = ClusterSet(tuple(_cluster_from_dict(c) for c in raw.get("clusters", [])))
        opt = raw.get("optimizer", {})
        sweep = raw.get("sweep", {}) or {}
        values = sweep.get("values")
        bits = raw.get("quantization_bits")
        return cls(
            tx=tx, rx=rx, clusters=clusters,
            slots=int(raw.get("slots", 1)),
            snr_grid_db=tuple(float(s) for s in raw.get("snr_grid_db", (0.0, 10.0, 20.0, 30.0))),
            trials=int(raw.get("trials", 100)),
            seed=int(raw.get("seed", 0)),
            rank_threshold=float(raw.get("rank_threshold", 1e-3)),
            quantization_bits=None if bits is None else int(bits),
            epsilon=float(opt.get("epsilon", 1e-3)),
            tol=float(opt.get("tol", 1e-6)),
            max_iters=int(opt.get("max_iters", 5000)),
            num_draws=int(opt.get("num_draws", 100)),
            sweep_values=None if values is None else tuple(values),
        )

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"scenario file {path} must hold a mapping")
        return cls.from_dict(raw)


def _array_from_dict(side: Side, d: dict) -> ArrayConfig:
    spacing = float(d.get("spacing", 0.5))
    count = int(d.get("count", 1))
    if "n_x" in d or "n_y" in d:
        n_x, n_y = int(d["n_x"]), int(d["n_y"])
    elif "size_x" in d or "size_y" in d:
        n_x = max(1, round(float(d["size_x"]) / spacing))
        n_y = max(1, round(float(d["size_y"]) / spacing))
    else:
        n_x = n_y = 4
    return ArrayConfig(side=side, n_x=n_x, n_y=n_y, spacing=spacing, darisa_count=count)


def _cluster_from_dict(d: dict) -> Cluster:
    def angles(sub: dict) -> tuple[float, float, float, float]:
        return (math.radians(float(sub.get("azimuth_center_deg", 180.0))),
                math.radians(float(sub.get("zenith_center_deg", 90.0))),
                math.radians(float(sub.get("azimuth_spread_deg", 0.0))),
                math.radians(float(sub.get("zenith_spread_deg", 0.0))))

    dep = angles(d.get("departure", d))
    arr = angles(d.get("arrival", d))
    return Cluster(center_azimuth_dep=dep[0], center_zenith_dep=dep[1],
                   center_azimuth_arr=arr[0], center_zenith_arr=arr[1],
                   spread_azimuth_dep=dep[2], spread_zenith_dep=dep[3],
                   spread_azimuth_arr=arr[2], spread_zenith_arr=arr[3])


@dataclass
class SweepResult:
    """Aggregated rows plus the full per-trial records."""

    axis_name: str
    header: list[str]
    rows: list[list]
    records: dict


def _map_trials(fn, trials: int, threads: int) -> list:
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _layouts(cfg: ScenarioConfig):
    tx = element_positions(cfg.tx)
    rx = element_positions(cfg.rx)
    return tx, rx, (cfg.tx.aperture, cfg.rx.aperture)


def _sample_counts(cfg: ScenarioConfig) -> tuple[int, int]:
    """Total direction samples per side, summed over clusters."""
    d_t = sum(len(sample_cluster_directions(c, cfg.tx.aperture, Side.TRANSMIT))
              for c in cfg.clusters.clusters)
    d_r = sum(len(sample_cluster_directions(c, cfg.rx.aperture, Side.RECEIVE))
              for c in cfg.clusters.clusters)
    return d_t, d_r


def _theory(cfg: ScenarioConfig) -> dict:
    ell_t = support_ellipse(cfg.clusters, Side.TRANSMIT)
    ell_r = support_ellipse(cfg.clusters, Side.RECEIVE)
    pred = scattering_dof(cfg.tx.aperture, cfg.rx.aperture, ell_t, ell_r)
    d_t_s, d_r_s = _sample_counts(cfg)
    n_rx = cfg.rx.darisa_count
    m_tx = cfg.tx.darisa_count
    return {
        "c1_t": ell_t.c1, "c2_t": ell_t.c2, "c1_r": ell_r.c1, "c2_r": ell_r.c2,
        "d_t": pred.d_t, "d_r": pred.d_r, "dof_theory": pred.scattering_dof,
        "d_t_samples": d_t_s, "d_r_samples": d_r_s,
        "dof_composite": composite_rank(cfg.slots, n_rx, m_tx,
                                        max(pred.d_t, 1.0), max(pred.d_r, 1.0)),
        "dof_composite_samples": composite_rank(cfg.slots, n_rx, m_tx,
                                                max(d_t_s, 1), max(d_r_s, 1)),
    }


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray([v for v in values if not (isinstance(v, float) and math.isnan(v))])
    if arr.size == 0:
        return math.nan, math.nan
    return float(np.mean(arr)), float(np.std(arr))


def optimize_receive_phases(cfg: ScenarioConfig, h_w: np.ndarray, seed: int,
                            bits: int | None = None) -> tuple[PhaseSchedule, DinkelbachRun]:
    """Full pipeline: relaxation, bisection, randomization, quantization.

    The transmit schedule stays at zero phase; the bisection bracket uses
    the composite-rank prediction evaluated at the exact per-side sample
    counts.
    """
    k = cfg.slots
    m_tx, n_t = cfg.tx.darisa_count, cfg.tx.elements_per_darisa
    n_rx, n_r = cfg.rx.darisa_count, cfg.rx.elements_per_darisa
    sched0 = PhaseSchedule.zero(k, m_tx, n_t, n_rx, n_r)
    prob = build_sdr_problem(h_w, sched0)
    d_t_s, d_r_s = _sample_counts(cfg)
    bound = composite_rank(k, n_rx, m_tx, max(d_t_s, 1), max(d_r_s, 1))
    run = dinkelbach_bisect(prob, epsilon=cfg.epsilon, rank_bound=max(bound, 1),
                            tol=cfg.tol, max_iters=cfg.max_iters,
                            num_draws=cfg.num_draws, seed=seed)
    rx_phases = run.recovered_phases
    if bits is not None:
        rx_phases = quantize_phases(rx_phases, bits)
    schedule = PhaseSchedule(np.zeros((k, m_tx, n_t)), rx_phases)
    return schedule, run


def _random_schedule(cfg: ScenarioConfig, seed: int) -> PhaseSchedule:
    rng = generator(seed, stream=PHASES)
    return PhaseSchedule.random(cfg.slots, cfg.tx.darisa_count, cfg.tx.elements_per_darisa,
                                cfg.rx.darisa_count, cfg.rx.elements_per_darisa, rng)


def _with_aperture(cfg: ScenarioConfig, size: float) -> ScenarioConfig:
    """Square per-panel aperture of `size` wavelengths at fixed spacing."""
    def resize(a: ArrayConfig) -> ArrayConfig:
        n = max(1, round(size / a.spacing))
        return replace(a, n_x=n, n_y=n)
    return replace(cfg, tx=resize(cfg.tx), rx=resize(cfg.rx))


def _with_spread(cfg: ScenarioConfig, spread_deg: float) -> ScenarioConfig:
    spread = math.radians(spread_deg)
    clusters = tuple(replace(c, spread_azimuth_dep=spread, spread_azimuth_arr=spread)
                     for c in cfg.clusters.clusters)
    return replace(cfg, clusters=ClusterSet(clusters))


def _with_spacing(cfg: ScenarioConfig, spacing: float) -> ScenarioConfig:
    """New element spacing at fixed panel aperture."""
    def redo(a: ArrayConfig) -> ArrayConfig:
        size_x, size_y = a.darisa_aperture
        return replace(a, spacing=spacing,
                       n_x=max(1, round(size_x / spacing)),
                       n_y=max(1, round(size_y / spacing)))
    return replace(cfg, tx=redo(cfg.tx), rx=redo(cfg.rx))


def _with_elements(cfg: ScenarioConfig, n: int) -> ScenarioConfig:
    """n x n elements per receive panel at fixed panel aperture."""
    size_x, _ = cfg.rx.darisa_aperture
    spacing = size_x / n
    rx = replace(cfg.rx, spacing=spacing, n_x=n, n_y=n)
    return replace(cfg, rx=rx)


def run_dof_sweep(cfg: ScenarioConfig, kind: str = "aperture",
                  values=None, threads: int = 1) -> SweepResult:
    """Mean numerical rank and EDoF of the element-port channel per axis
    point, next to the scattering-limited prediction."""
    if kind not in ("aperture", "spread"):
        raise ValueError("dof sweep kind must be 'aperture' or 'spread'")
    if values is None:
        values = cfg.sweep_values or ((2.0, 4.0) if kind == "aperture" else (30.0, 90.0, 180.0))

    header = ["axis", "trials", "d_t_samples", "d_r_samples", "dof_theory",
              "rank_mean", "rank_std", "edof_mean", "edof_std"]
    rows = []
    records: dict = {"axis": kind, "points": []}
    for value in values:
        sub = _with_aperture(cfg, value) if kind == "aperture" else _with_spread(cfg, value)
        tx, rx, apertures = _layouts(sub)
        theory = _theory(sub)

        def one(t: int):
            seed = trial_seed(sub.seed, t)
            chan = generate_channel(sub.clusters, tx, rx, apertures, seed)
            rep = spectrum(chan.h_w, sub.rank_threshold)
            return {"trial": t, "seed": seed, "rank": rep.numerical_rank, "edof": rep.edof}

        trials = _map_trials(one, sub.trials, threads)
        rank_m, rank_s = _mean_std([r["rank"] for r in trials])
        edof_m, edof_s = _mean_std([r["edof"] for r in trials])
        rows.append([value, sub.trials, theory["d_t_samples"], theory["d_r_samples"],
                     theory["dof_theory"], rank_m, rank_s, edof_m, edof_s])
        records["points"].append({"axis": value, "theory": theory, "trials": trials})
    return SweepResult(axis_name=kind, header=header, rows=rows, records=records)


def _run_to_record(run: DinkelbachRun) -> dict:
    return {
        "zeta_low": run.zeta_low, "zeta_high": run.zeta_high, "zeta_opt": run.zeta_opt,
        "trace": [[z, v] for z, v in run.iterations],
        "bracket_values": list(run.bracket_values),
        "achieved_edof": run.achieved_edof, "well_posed": run.well_posed,
        "subproblem_solves": run.subproblem_solves,
    }


def _trial_both_schemes(cfg: ScenarioConfig, tx, rx, apertures, t: int,
                        bits: int | None) -> dict:
    """One trial: random-phase and optimized metrics on a shared channel."""
    seed = trial_seed(cfg.seed, t)
    chan = generate_channel(cfg.clusters, tx, rx, apertures, seed)
    rec: dict = {"trial": t, "seed": seed}

    rep_rand = spectrum(assemble_composite(chan.h_w, _random_schedule(cfg, seed)).h_c,
                        cfg.rank_threshold)
    rec["rank_random"] = rep_rand.numerical_rank
    rec["edof_random"] = rep_rand.edof
    rec["sv_random"] = rep_rand.singular_values.tolist()

    try:
        sched, run = optimize_receive_phases(cfg, chan.h_w, seed, bits=bits)
        rep_opt = spectrum(assemble_composite(chan.h_w, sched).h_c, cfg.rank_threshold)
        rec["rank_opt"] = rep_opt.numerical_rank
        rec["edof_opt"] = rep_opt.edof
        rec["sv_opt"] = rep_opt.singular_values.tolist()
        rec["optimizer"] = _run_to_record(run)
        rec["sdr_bound"] = run.zeta_opt ** 2
    except BracketError as exc:  # recorded, not fatal to the sweep
        rec["error"] = str(exc)
        rec["rank_opt"] = math.nan
        rec["edof_opt"] = math.nan
        rec["sv_opt"] = None
        rec["sdr_bound"] = math.nan
    return rec


_EDOF_AXES = {"spacing", "slots", "elements", "bits"}


def run_edof_sweep(cfg: ScenarioConfig, kind: str, values=None,
                   threads: int = 1) -> SweepResult:
    """Random-phase vs optimized EDoF along one axis.

    Axis kinds: element `spacing` at fixed panel size, slot count
    (`slots`), per-panel element count (`elements`), or quantization
    `bits` (None entries mean continuous phases; the optimizer runs once
    per trial and is re-quantized per bits value).
    """
    if kind not in _EDOF_AXES:
        raise ValueError(f"edof sweep kind must be one of {sorted(_EDOF_AXES)}")
    if values is None:
        values = cfg.sweep_values
    if values is None:
        raise ValueError("sweep values required (config sweep.values or argument)")

    snr_ref = max(cfg.snr_grid_db) if cfg.snr_grid_db else 30.0
    snr_lin = 10.0 ** (snr_ref / 10.0)
    header = ["axis", "trials", "dof_theory", "dof_composite",
              "rank_random_mean", "rank_random_std", "rank_opt_mean", "rank_opt_std",
              "edof_random_mean", "edof_random_std", "edof_opt_mean", "edof_opt_std",
              "sdr_bound_mean", "snr_ref_db",
              "cap_exact_random_mean", "cap_exact_opt_mean",
              "cap_edof_random_mean", "cap_edof_opt_mean"]
    rows = []
    records: dict = {"axis": kind, "points": []}

    if kind == "bits":
        rows_data = _edof_bits_points(cfg, values, threads, records)
    else:
        rows_data = []
        for value in values:
            if kind == "spacing":
                sub = _with_spacing(cfg, float(value))
            elif kind == "slots":
                sub = replace(cfg, slots=int(value))
            else:
                sub = _with_elements(cfg, int(value))
            tx, rx, apertures = _layouts(sub)
            theory = _theory(sub)

            def one(t: int, sub=sub, tx=tx, rx=rx, apertures=apertures):
                return _trial_both_schemes(sub, tx, rx, apertures, t, sub.quantization_bits)

            trials = _map_trials(one, sub.trials, threads)
            records["points"].append({"axis": value, "theory": theory, "trials": trials})
            rows_data.append((value, sub.trials, theory, trials))

    for value, n_trials, theory, trials in rows_data:
        rank_rm, rank_rs = _mean_std([r["rank_random"] for r in trials])
        rank_om, rank_os = _mean_std([r["rank_opt"] for r in trials])
        edof_rm, edof_rs = _mean_std([r["edof_random"] for r in trials])
        edof_om, edof_os = _mean_std([r["edof_opt"] for r in trials])
        bound_m, _ = _mean_std([r["sdr_bound"] for r in trials])
        cap_er = [capacity_edof_approx(r["edof_random"], snr_lin) for r in trials]
        cap_eo = [capacity_edof_approx(r["edof_opt"], snr_lin) for r in trials
                  if not math.isnan(r["edof_opt"])]
        cap_xr = [_cap_exact_from_sv(r["sv_random"], snr_lin) for r in trials]
        cap_xo = [_cap_exact_from_sv(r["sv_opt"], snr_lin) for r in trials
                  if r.get("sv_opt") is not None]
        rows.append([value, n_trials, theory["dof_theory"], theory["dof_composite_samples"],
                     rank_rm, rank_rs, rank_om, rank_os,
                     edof_rm, edof_rs, edof_om, edof_os,
                     bound_m, snr_ref,
                     _mean_std(cap_xr)[0], _mean_std(cap_xo)[0],
                     _mean_std(cap_er)[0], _mean_std(cap_eo)[0]])
    return SweepResult(axis_name=kind, header=header, rows=rows, records=records)


def _cap_exact_from_sv(sv, snr_lin: float) -> float:
    if sv is None:
        return math.nan
    s = np.asarray(sv)
    cols_term = s * s * (snr_lin / max(len(s), 1))
    return float(np.sum(np.log2(1.0 + cols_term)))


def _edof_bits_points(cfg: ScenarioConfig, values, threads: int, records: dict):
    """One optimization per trial; re-quantize the recovered phases per
    bits value (None = continuous)."""
    tx, rx, apertures = _layouts(cfg)
    theory = _theory(cfg)
    bits_values = [None if (v is None or str(v).lower() in ("inf", "none", "cont"))
                   else int(v) for v in values]

    def one(t: int):
        seed = trial_seed(cfg.seed, t)
        chan = generate_channel(cfg.clusters, tx, rx, apertures, seed)
        base: dict = {"trial": t, "seed": seed}
        rep_rand = spectrum(assemble_composite(chan.h_w, _random_schedule(cfg, seed)).h_c,
                            cfg.rank_threshold)
        base["rank_random"] = rep_rand.numerical_rank
        base["edof_random"] = rep_rand.edof
        base["sv_random"] = rep_rand.singular_values.tolist()
        per_bits = {}
        try:
            sched, run = optimize_receive_phases(cfg, chan.h_w, seed, bits=None)
            base["optimizer"] = _run_to_record(run)
            k, m_tx, n_t = cfg.slots, cfg.tx.darisa_count, cfg.tx.elements_per_darisa
            for b in bits_values:
                phases = run.recovered_phases if b is None \
                    else quantize_phases(run.recovered_phases, b)
                sched_b = PhaseSchedule(np.zeros((k, m_tx, n_t)), phases)
                rep = spectrum(assemble_composite(chan.h_w, sched_b).h_c, cfg.rank_threshold)
                per_bits[b] = {"rank_opt": rep.numerical_rank, "edof_opt": rep.edof,
                               "sv_opt": rep.singular_values.tolist(),
                               "sdr_bound": run.zeta_opt ** 2}
        except BracketError as exc:
            base["error"] = str(exc)
            for b in bits_values:
                per_bits[b] = {"rank_opt": math.nan, "edof_opt": math.nan,
                               "sv_opt": None, "sdr_bound": math.nan}
        base["per_bits"] = {str(b): v for b, v in per_bits.items()}
        return base, per_bits

    results = _map_trials(one, cfg.trials, threads)
    records["points"] = [{"axis": str(b), "theory": theory,
                          "trials": [r[0] for r in results]} for b in bits_values]

    rows_data = []
    for b in bits_values:
        trials = []
        for base, per_bits in results:
            rec = dict(base)
            rec.update(per_bits[b])
            trials.append(rec)
        label = "inf" if b is None else b
        rows_data.append((label, cfg.trials, theory, trials))
    return rows_data


def run_eigen_capacity(cfg: ScenarioConfig, threads: int = 1) -> tuple[SweepResult, SweepResult]:
    """Sorted singular values and capacity-vs-SNR for random vs optimized
    phases; returns (eigen result, capacity result)."""
    tx, rx, apertures = _layouts(cfg)
    theory = _theory(cfg)

    def one(t: int):
        return _trial_both_schemes(cfg, tx, rx, apertures, t, cfg.quantization_bits)

    trials = _map_trials(one, cfg.trials, threads)
    ok = [r for r in trials if r.get("sv_opt") is not None]
    n_sv = min(len(r["sv_random"]) for r in trials)

    eigen_header = ["index", "sv_random_mean", "sv_sq_random_mean",
                    "sv_opt_mean", "sv_sq_opt_mean"]
    eigen_rows = []
    for i in range(n_sv):
        sv_r = [r["sv_random"][i] for r in trials]
        sv_o = [r["sv_opt"][i] for r in ok] if ok else [math.nan]
        eigen_rows.append([i + 1, _mean_std(sv_r)[0],
                           _mean_std([v * v for v in sv_r])[0],
                           _mean_std(sv_o)[0], _mean_std([v * v for v in sv_o])[0]])

    edof_rm = _mean_std([r["edof_random"] for r in trials])[0]
    edof_om = _mean_std([r["edof_opt"] for r in trials])[0]
    cap_header = ["snr_db", "cap_exact_random_mean", "cap_exact_opt_mean",
                  "cap_edof_random_mean", "cap_edof_opt_mean",
                  "edof_random_mean", "edof_opt_mean"]
    cap_rows = []
    for snr_db in cfg.snr_grid_db:
        snr = 10.0 ** (snr_db / 10.0)
        cap_rows.append([
            snr_db,
            _mean_std([_cap_exact_from_sv(r["sv_random"], snr) for r in trials])[0],
            _mean_std([_cap_exact_from_sv(r["sv_opt"], snr) for r in ok])[0],
            _mean_std([capacity_edof_approx(r["edof_random"], snr) for r in trials])[0],
            _mean_std([capacity_edof_approx(r["edof_opt"], snr) for r in ok])[0],
            edof_rm, edof_om,
        ])
    records = {"theory": theory, "trials": trials}
    eigen = SweepResult(axis_name="index", header=eigen_header, rows=eigen_rows,
                        records=records)
    capacity = SweepResult(axis_name="snr_db", header=cap_header, rows=cap_rows,
                           records={"theory": theory})
    return eigen, capacity


def run_single_optimize(cfg: ScenarioConfig) -> dict:
    """One channel realization, full optimizer record."""
    tx, rx, apertures = _layouts(cfg)
    seed = trial_seed(cfg.seed, 0)
    chan = generate_channel(cfg.clusters, tx, rx, apertures, seed)
    rec = _trial_both_schemes(cfg, tx, rx, apertures, 0, cfg.quantization_bits)
    rec["theory"] = _theory(cfg)
    rec["h_w_shape"] = list(chan.h_w.shape)
    if cfg.quantization_bits is not None:
        rec["quantization_bits"] = cfg.quantization_bits
    return rec


def run_predict(cfg: ScenarioConfig) -> SweepResult:
    """Theory-only predictions for the scenario."""
    theory = _theory(cfg)
    header = ["c1_t", "c2_t", "c1_r", "c2_r", "d_t", "d_r", "dof_theory",
              "d_t_samples", "d_r_samples", "dof_composite", "dof_composite_samples"]
    rows = [[theory[k] for k in header]]
    return SweepResult(axis_name="", header=header, rows=rows, records={"theory": theory})
