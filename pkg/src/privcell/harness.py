"""Monte-Carlo harness: sweeps, cross-validation, CSV output.

A sweep fixes the large-scale fading once (by default), then runs
independently seeded trials per axis value.  Per-trial seeds derive from
(master seed, stage, trial index) only, so a sweep gives identical
results whether trials run sequentially or across worker threads, and
methods sharing a master seed see identical channels, masks, and
receiver noise.
"""

import csv
import dataclasses
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import estimation
from .channel import gen_pilots, gen_topology, large_scale_fading, make_block
from .config import METHODS, ExperimentConfig
from .errors import ArgumentError, ConfigError, PrivCellError
from .fw import FwConfig, nuclear_norm_budget, run_fw
from .privacy import frob_bound, fw_noise_scale, svd_noise_scale
from .protocol import CPU, Backhaul, MessageKind, ap_name
from .seeding import derive_master, entropy_for, rng_for
from .svdmc import SvdConfig, run_svd

log = logging.getLogger(__name__)

CSV_HEADER = ("method", "axis", "axis_value", "nmse", "ser", "trials", "failures", "seed", "seconds")


@dataclass
class Prepared:
    """Per-sweep-point fixed quantities (large-scale draw, pilots, bounds)."""

    beta: np.ndarray  # (K, M), possibly rescaled
    sigma2: float  # noise power in the same units as beta
    pilots: np.ndarray
    clip_bound: float
    nuc_bound: float
    unit_scale: float  # beta multiplier applied for normalized units


@dataclass
class TrialResult:
    nmse: float
    ser: float
    max_masked_norm: float = float("nan")  # FW only: peak observed-part norm
    clip_bound: float = float("nan")


@dataclass
class MetricsRecord:
    method: str
    axis: str
    axis_value: float
    nmse: float
    ser: float
    trials: int
    failures: int
    seed: int
    seconds: float
    extras: Optional[dict] = None  # diagnostics, not serialised

    def row(self):
        return [
            self.method,
            self.axis,
            self.axis_value,
            self.nmse,
            self.ser,
            self.trials,
            self.failures,
            self.seed,
            self.seconds,
        ]


def draw_beta(scenario, master_seed, trial=None):
    """Large-scale gains; trial=None keys the streams trial-independently."""
    idx = () if trial is None else (trial,)
    topo = gen_topology(scenario, rng_for(master_seed, "topology", *idx))
    return large_scale_fading(topo, scenario, rng_for(master_seed, "shadowing", *idx))


def prepare(scenario, run, beta):
    """Fix units, pilots, and the derived bounds for one sweep point."""
    beta = np.asarray(beta, dtype=float)
    scale = 1.0
    sigma2 = scenario.sigma2
    if run.units == "normalized":
        med = float(np.median(beta))
        if med > 0:
            scale = 1.0 / med
        beta = beta * scale
        sigma2 = sigma2 * scale
    clip = run.clip_bound * np.sqrt(scale) if run.clip_bound else frob_bound(
        beta, scenario.K, scenario.N_a, scenario.tau_c, sigma2
    )
    nuc = run.nuc_bound * np.sqrt(scale) if run.nuc_bound else nuclear_norm_budget(
        beta, scenario.tau_c, scenario.N_a
    )
    return Prepared(
        beta=beta,
        sigma2=sigma2,
        pilots=gen_pilots(scenario.K, scenario.tau_p),
        clip_bound=clip,
        nuc_bound=nuc,
        unit_scale=scale,
    )


def completion_config(method, prepared, scenario, run, eps):
    if method == "fw":
        mu = fw_noise_scale(prepared.clip_bound, run.fw_iters, scenario.M, eps, run.delta)
        return FwConfig(run.fw_iters, prepared.nuc_bound, prepared.clip_bound, mu)
    if method == "npfw":
        return FwConfig(run.np_fw_iters, prepared.nuc_bound, prepared.clip_bound, 0.0)
    if method == "svd":
        nu = svd_noise_scale(prepared.clip_bound, scenario.M, eps, run.delta)
        return SvdConfig.derive(scenario, nu)
    if method == "npsvd":
        return SvdConfig.derive(scenario, 0.0)
    raise ArgumentError(f"no completion config for method {method!r}")


def _detect_and_combine(net, scenario, h_hats, x_datas, d_true):
    """Per-AP detection, LocalDetection messages, CPU combining and slicing."""
    locals_ = []
    for m in range(scenario.M):
        d_m = estimation.detect_local(h_hats[m], x_datas[m])
        net.send(MessageKind.LOCAL_DETECTION, ap_name(m), CPU, 0, d_m)
        locals_.append(d_m)
    soft = estimation.combine(net.round_payloads(MessageKind.LOCAL_DETECTION, 0))
    return estimation.ser(estimation.slice_qpsk(soft), d_true)


def run_trial(scenario, run, method, prepared, master_seed, trial, eps, net=None):
    """One end-to-end trial; returns a TrialResult."""
    block = make_block(
        scenario, prepared.beta, prepared.pilots, master_seed, trial,
        sigma2=prepared.sigma2,
    )
    if net is None:
        net = Backhaul()
    tau_p = scenario.tau_p
    if method in ("fw", "npfw"):
        cfg = completion_config(method, prepared, scenario, run, eps)
        res = run_fw(
            block.Y, block.omega, scenario.M, cfg,
            entropy_for(master_seed, "dp_fw", trial), net=net,
        )
    elif method in ("svd", "npsvd"):
        cfg = completion_config(method, prepared, scenario, run, eps)
        res = run_svd(
            block.Y, block.omega, scenario.M, cfg,
            entropy_for(master_seed, "dp_svd", trial),
            scenario.N_a / scenario.N_r, net=net,
        )
    elif method == "po":
        res = None
    else:
        raise ArgumentError(f"unknown method {method!r}")

    h_hats, x_datas = [], []
    if method == "po":
        for m in range(scenario.M):
            sl = scenario.block(m)
            h_m = estimation.pilot_only_ls(block.Y[sl], prepared.pilots)
            d_m = estimation.pilot_only_detect_block(
                h_m, block.Y[sl], block.omega[sl], prepared.sigma2, tau_p, scenario.N_r
            )
            net.send(MessageKind.LOCAL_DETECTION, ap_name(m), CPU, 0, d_m)
            h_hats.append(h_m)
        soft = estimation.combine(net.round_payloads(MessageKind.LOCAL_DETECTION, 0))
        ser_val = estimation.ser(estimation.slice_qpsk(soft), block.D)
        h_stack = np.vstack(h_hats)
        return TrialResult(nmse=estimation.nmse(h_stack, block.H), ser=ser_val)

    for m in range(scenario.M):
        sl = scenario.block(m)
        x_m = res.x_hat[sl]
        h_hats.append(estimation.estimate_channel(x_m[:, :tau_p], prepared.pilots))
        x_datas.append(x_m[:, tau_p:])
    ser_val = _detect_and_combine(net, scenario, h_hats, x_datas, block.D)
    h_stack = np.vstack(h_hats)
    return TrialResult(
        nmse=estimation.nmse(h_stack, block.H),
        ser=ser_val,
        max_masked_norm=float(res.masked_norms.max()) if method in ("fw", "npfw") else float("nan"),
        clip_bound=prepared.clip_bound if method in ("fw", "npfw") else float("nan"),
    )


def apply_axis(scenario, axis, value):
    if axis == "epsilon":
        return scenario, float(value)
    if axis == "tau_d":
        return dataclasses.replace(scenario, tau_d=int(value)), None
    raise ArgumentError(f"unknown sweep axis {axis!r}")


def _trial_task(scenario, run, method, prepared, master_seed, trial, eps):
    try:
        return run_trial(scenario, run, method, prepared, master_seed, trial, eps), None
    except (PrivCellError, np.linalg.LinAlgError) as e:
        return None, f"trial {trial}: {type(e).__name__}: {e}"


def run_point(exp, method, axis, value, trials, master_seed, beta=None, workers=1):
    """All trials of one method at one axis value; returns a MetricsRecord."""
    scenario, eps_override = apply_axis(exp.scenario, axis, value)
    eps = eps_override if eps_override is not None else exp.run.eps
    t0 = time.perf_counter()
    if beta is None:
        beta = draw_beta(scenario, master_seed)
    prepared = prepare(scenario, exp.run, beta)

    def task(trial):
        return _trial_task(scenario, exp.run, method, prepared, master_seed, trial, eps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(task, range(trials)))
    else:
        outcomes = [task(t) for t in range(trials)]

    results, failures = [], 0
    for res, err in outcomes:  # trial-index order regardless of scheduling
        if err is None:
            results.append(res)
        else:
            failures += 1
            log.warning("excluded %s", err)
    nm = float(np.mean([r.nmse for r in results])) if results else float("nan")
    sr = float(np.mean([r.ser for r in results])) if results else float("nan")
    extras = {}
    if method in ("fw", "npfw") and results:
        extras["max_masked_norm"] = max(r.max_masked_norm for r in results)
        extras["clip_bound"] = prepared.clip_bound
    return MetricsRecord(
        method=method,
        axis=axis,
        axis_value=float(value),
        nmse=nm,
        ser=sr,
        trials=len(results),
        failures=failures,
        seed=master_seed,
        seconds=time.perf_counter() - t0,
        extras=extras or None,
    )


def run_sweep(exp, method=None, axis=None, values=None, trials=None, master_seed=None, workers=None):
    """Sweep one method over an axis; arguments default to the config."""
    run = exp.run
    method = method or run.method
    axis = axis or run.sweep
    values = values if values is not None else run.values
    trials = trials or run.trials
    master_seed = master_seed if master_seed is not None else exp.scenario.seed
    workers = workers or run.workers
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    beta = draw_beta(exp.scenario, master_seed) if run.fixed_beta else None
    return [
        run_point(exp, method, axis, v, trials, master_seed, beta=beta, workers=workers)
        for v in values
    ]


def cross_validate(exp, method, param, grid, trials, master_seed=None):
    """Pick the grid value minimising mean NMSE on a held-out seed family.

    Ties break toward the earlier grid entry, so pass the grid sorted
    ascending to prefer the smaller value.
    """
    if param not in ("nuc_bound", "fw_iters"):
        raise ArgumentError(f"cannot cross-validate {param!r}")
    if not grid:
        raise ArgumentError("empty cross-validation grid")
    base = master_seed if master_seed is not None else exp.scenario.seed
    cv_seed = derive_master(base, "crossval")
    scores = []
    for value in grid:
        run = dataclasses.replace(
            exp.run, **{param: int(value) if param == "fw_iters" else float(value)}
        )
        cv_exp = ExperimentConfig(scenario=exp.scenario, run=run)
        rec = run_point(cv_exp, method, "epsilon", run.eps, trials, cv_seed)
        scores.append(rec.nmse)
        log.info("crossval %s=%s -> nmse %.6g", param, value, rec.nmse)
    best = int(np.nanargmin(scores))
    return grid[best], list(zip(grid, scores))


def emit_csv(records, path):
    """Write sweep records with the fixed header; raises on empty input."""
    if not records:
        raise ArgumentError("no records to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for rec in records:
            w.writerow(rec.row())


def read_csv(path):
    """Round-trip reader for emit_csv output (used by tests and scripts)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ConfigError(f"{path} does not carry the expected header")
    out = []
    for row in rows[1:]:
        rec = dict(zip(CSV_HEADER, row))
        for k in ("axis_value", "nmse", "ser", "seconds"):
            rec[k] = float(rec[k])
        for k in ("trials", "failures", "seed"):
            rec[k] = int(rec[k])
        out.append(rec)
    return out
