"""Experiment runner: seeded trials, parameter sweeps, CSV emission.

A spec file (INI syntax) holds a ``[system]`` section with scenario
constants (dimensioned keys carry unit suffixes; powers in dBm are
converted once at parse time) and an ``[experiment]`` section naming the
sweep variable, its values, the schemes and seeds to run, and the output
directory.  Each (sweep value, seed, scheme) trial appends one summary row;
the convergence trace of the first seed at the first sweep value is written
per scheme.
"""

from __future__ import annotations

import configparser
import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import solve_fpa, solve_pinned_rho
from .config import SystemConfig, dbm_to_watts
from .pdd.solver import Solution, SolveOptions, solve
from .scenario import build_scenario

SWEEP_VARS = ("K", "F_local", "F_E", "region_side", "P_r", "ue_distance",
              "N_b", "N_t/N_r")
SCHEMES = ("pdd", "fpa", "local", "full_offload")

SUMMARY_COLUMNS = ["sweep_var", "sweep_value", "seed", "scheme", "T_total_s",
                   "T_u1_s", "T_e1_s", "T_c2_s", "T_d2_s", "rho",
                   "outer_iters", "violation", "wall_ms"]
TRACE_COLUMNS = ["outer_iter", "al_objective", "T_total_s", "violation",
                 "kappa"]

# [system] keys -> (SystemConfig field, parser).  Unit suffixes make the
# dimensioned quantities explicit in config files.
_SYSTEM_KEYS = {
    "k_pairs": ("K", int),
    "n_ue": ("N_u", int),
    "n_relay_rx": ("N_r", int),
    "n_relay_tx": ("N_t", int),
    "n_bs": ("N_b", int),
    "paths_uplink": ("L", int),
    "paths_relay_bs": ("L_tilde", int),
    "paths_d2d": ("L_bar", int),
    "task_bits": ("L_a", float),
    "local_rate_bps": ("F_local", float),
    "edge_rate_bps": ("F_E", float),
    "compression_ratio": ("alpha_comp", float),
    "ue_power_dbm": ("P_k", lambda s: dbm_to_watts(float(s))),
    "relay_power_dbm": ("P_r", lambda s: dbm_to_watts(float(s))),
    "noise_relay_w": ("sigma2_r", float),
    "noise_bs_w": ("sigma2_b", float),
    "noise_d2d_w": ("sigma2_d", float),
    "gain_ref": ("g0", float),
    "path_loss_exp": ("path_loss_exp", float),
    "wavelength_m": ("wavelength", float),
    "region_side_m": ("region_side", float),
    "min_spacing_m": ("D_min", float),
    "relay_height_m": ("h_r", float),
    "bs_height_m": ("h_b", float),
    "ue_ring_m": ("ue_ring_radius", float),
    "partner_ring_m": ("jammer_ring_radius", float),
    "bandwidth_hz": ("bandwidth_hz", float),
}


class SpecError(ValueError):
    """Unusable experiment spec; message carries a line anchor when known."""


@dataclass
class ExperimentSpec:
    base: SystemConfig
    sweep_var: str
    sweep_values: list[float]
    schemes: list[str]
    seeds: list[int]
    output_dir: str
    max_outer: int | None = None
    threads: int = 1


def _line_of(text: str, needle: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        if line.split("=")[0].strip() == needle:
            return i
    return None


def parse_spec(path: str) -> ExperimentSpec:
    with open(path) as fh:
        text = fh.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise SpecError(str(exc)) from exc

    def fail(section, key, why):
        line = _line_of(text, key)
        anchor = f"{path}:{line}" if line else f"{path} [{section}] {key}"
        raise SpecError(f"{anchor}: {why}")

    overrides = {}
    if parser.has_section("system"):
        for key, raw in parser.items("system"):
            if key not in _SYSTEM_KEYS:
                fail("system", key, f"unknown key {key!r}")
            fieldname, conv = _SYSTEM_KEYS[key]
            try:
                overrides[fieldname] = conv(raw)
            except ValueError as exc:
                fail("system", key, f"bad value {raw!r} ({exc})")
    try:
        base = SystemConfig(**overrides)
        base.validate()
    except ValueError as exc:
        raise SpecError(f"{path}: invalid system section: {exc}") from exc

    if not parser.has_section("experiment"):
        raise SpecError(f"{path}: missing [experiment] section")
    exp = parser["experiment"]

    sweep_var = exp.get("sweep", "").strip()
    if sweep_var not in SWEEP_VARS:
        fail("experiment", "sweep",
             f"sweep variable {sweep_var!r} not one of {SWEEP_VARS}")
    try:
        values = [float(v) for v in exp.get("values", "").split(",") if
                  v.strip()]
    except ValueError as exc:
        fail("experiment", "values", str(exc))
    if not values:
        fail("experiment", "values", "needs at least one value")
    schemes = [s.strip() for s in exp.get("schemes", "pdd").split(",")
               if s.strip()]
    for s in schemes:
        if s not in SCHEMES:
            fail("experiment", "schemes",
                 f"scheme {s!r} not one of {SCHEMES}")
    try:
        seeds = [int(s) for s in exp.get("seeds", "0").split(",")
                 if s.strip()]
    except ValueError as exc:
        fail("experiment", "seeds", str(exc))
    if not seeds:
        fail("experiment", "seeds", "needs at least one seed")
    output_dir = exp.get("output", "results").strip()
    max_outer = exp.getint("max_outer", fallback=0) or None
    threads = exp.getint("threads", fallback=1)
    return ExperimentSpec(base=base, sweep_var=sweep_var,
                          sweep_values=values, schemes=schemes, seeds=seeds,
                          output_dir=output_dir, max_outer=max_outer,
                          threads=threads)


def apply_sweep(cfg: SystemConfig, var: str, value: float) -> SystemConfig:
    if var == "K":
        return cfg.with_updates(K=int(value))
    if var == "F_local":
        return cfg.with_updates(F_local=value)
    if var == "F_E":
        return cfg.with_updates(F_E=value)
    if var == "region_side":
        return cfg.with_updates(region_side=value)
    if var == "P_r":
        return cfg.with_updates(P_r=value)
    if var == "ue_distance":
        return cfg.with_updates(ue_distance_fixed=value)
    if var == "N_b":
        return cfg.with_updates(N_b=int(value))
    if var == "N_t/N_r":
        return cfg.with_updates(N_t=int(value), N_r=int(value))
    raise SpecError(f"unknown sweep variable {var!r}")


@dataclass
class TrialResult:
    sweep_value: float
    seed: int
    scheme: str
    solution: Solution
    wall_ms: float


def run_trial(cfg: SystemConfig, scheme: str, seed: int,
              opts: SolveOptions) -> tuple[Solution, float]:
    instance = build_scenario(cfg, seed)
    start = time.perf_counter()
    if scheme == "pdd":
        sol = solve(instance, opts)
    elif scheme == "fpa":
        sol = solve_fpa(instance, opts)
    elif scheme == "local":
        sol = solve_pinned_rho(instance, 0.0, opts)
    elif scheme == "full_offload":
        sol = solve_pinned_rho(instance, 1.0, opts)
    else:
        raise SpecError(f"unknown scheme {scheme!r}")
    wall_ms = (time.perf_counter() - start) * 1e3
    return sol, wall_ms


def _trial_job(args):
    cfg, scheme, seed, opts, value = args
    sol, wall_ms = run_trial(cfg, scheme, seed, opts)
    return TrialResult(sweep_value=value, seed=seed, scheme=scheme,
                       solution=sol, wall_ms=wall_ms)


def run(spec: ExperimentSpec) -> tuple[list[TrialResult], int]:
    """Execute all trials; returns (results sorted canonically, exit code).

    Exit code 3 flags at least one non-converged trial; rows are still
    emitted and flagged through their violation column.
    """
    opts = SolveOptions()
    if spec.max_outer:
        opts = replace(opts, max_outer=spec.max_outer)
    jobs = []
    for value in spec.sweep_values:
        cfg = apply_sweep(spec.base, spec.sweep_var, value)
        for seed in spec.seeds:
            for scheme in spec.schemes:
                jobs.append((cfg, scheme, seed, opts, value))
    if spec.threads > 1:
        with ProcessPoolExecutor(max_workers=spec.threads) as pool:
            results = list(pool.map(_trial_job, jobs))
    else:
        results = [_trial_job(j) for j in jobs]
    results.sort(key=lambda r: (spec.sweep_values.index(r.sweep_value),
                                spec.seeds.index(r.seed),
                                spec.schemes.index(r.scheme)))
    code = 0 if all(r.solution.converged for r in results) else 3
    return results, code


def summary_rows(spec: ExperimentSpec, results: list[TrialResult]):
    rows = []
    for r in results:
        lat = r.solution.latency
        rows.append({
            "sweep_var": spec.sweep_var,
            "sweep_value": repr(r.sweep_value),
            "seed": r.seed,
            "scheme": r.scheme,
            "T_total_s": repr(lat.T_total),
            "T_u1_s": repr(lat.T_u1),
            "T_e1_s": repr(lat.T_e1),
            "T_c2_s": repr(lat.T_c2),
            "T_d2_s": repr(lat.T_d2),
            "rho": repr(r.solution.rho),
            "outer_iters": r.solution.outer_iters,
            "violation": repr(r.solution.violation),
            "wall_ms": repr(round(r.wall_ms, 3)),
        })
    return rows


def emit_summary(rows, path: str) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_COLUMNS,
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def emit_trace(trace, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in trace:
            writer.writerow([row.outer_iter, repr(row.al_objective),
                             repr(row.T_total_s), repr(row.violation),
                             repr(row.kappa)])


def run_to_files(spec: ExperimentSpec) -> int:
    os.makedirs(spec.output_dir, exist_ok=True)
    results, code = run(spec)
    emit_summary(summary_rows(spec, results),
                 os.path.join(spec.output_dir, "summary.csv"))
    first_value, first_seed = spec.sweep_values[0], spec.seeds[0]
    for scheme in spec.schemes:
        for r in results:
            if (r.sweep_value == first_value and r.seed == first_seed
                    and r.scheme == scheme):
                emit_trace(r.solution.trace,
                           os.path.join(spec.output_dir,
                                        f"trace_{scheme}.csv"))
                break
    return code
