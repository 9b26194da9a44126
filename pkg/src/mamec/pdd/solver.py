"""Two-loop solver: block-coordinate inner descent, dual/penalty outer loop.

The inner loop sweeps the block sequence until the augmented Lagrangian
stalls.  The outer loop then either performs a dual ascent step (when the
max-norm consensus violation is below the running tolerance) or shrinks the
penalty parameter, and tightens the tolerance.  Each outer iteration also
evaluates the achievable latency of the current feasible snapshot (ball
copies for beams, repaired positions, refined offload ratio); the best
snapshot seen is returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import MAPositions, region_keys
from ..scenario import ScenarioInstance, build_channels
from ..system import (Beamformers, LatencyBreakdown, all_rates_bps,
                      check_feasibility, latency_components, min_slack)
from .blocks import active_blocks
from .state import (PddState, al_objective, consensus_residuals,
                    constraint_violation, init_state, pair_list,
                    refresh_anchors, update_duals)


@dataclass(frozen=True)
class SolveOptions:
    """Algorithm parameters.

    ``eps1_init=None`` selects the adaptive tolerance schedule: the first
    outer step is a dual update and afterwards the tolerance tracks
    0.7x the best violation achieved, so the penalty shrinks only when an
    outer iteration fails to cut the violation by 30%.  A float selects the
    fixed geometric schedule eps1 <- max(0.7*eps1, eps_final) instead.
    """

    max_outer: int = 120
    max_sweeps: int = 30
    inner_tol: float = 1e-8
    kappa0: float = 2.0
    kappa_shrink: float = 0.6
    eps1_init: float | None = None
    eps1_factor: float = 0.7
    eps_final: float = 1e-3
    al_tol: float = 1e-3
    stall_window: int = 2
    stall_factor: float = 0.97
    seed: int = 0
    audit: bool = False
    freeze_positions: bool = False
    fix_rho: float | None = None
    polish: bool = True


@dataclass
class TraceRow:
    outer_iter: int
    inner_sweeps: int
    al_objective: float
    T_total_s: float
    violation: float
    kappa: float


@dataclass
class Solution:
    positions: MAPositions
    beams: Beamformers
    rho: float
    latency: LatencyBreakdown
    converged: bool
    violation: float
    outer_iters: int
    trace: list[TraceRow]
    message: str
    slacks: list = field(default_factory=list)


class BlockDescentError(AssertionError):
    """A block update increased the AL objective beyond tolerance."""


def inner_loop(state: PddState, max_sweeps: int, inner_tol: float,
               audit: bool = False) -> int:
    """Sweep the block sequence; returns the number of sweeps executed."""
    prev = al_objective(state)
    sweeps = 0
    for _ in range(max_sweeps):
        refresh_anchors(state)
        if audit:
            for name, fn in active_blocks(state):
                before = al_objective(state)
                fn(state)
                after = al_objective(state)
                if after > before + 1e-9:
                    raise BlockDescentError(
                        f"block {name} increased AL by {after - before:.3e}")
        else:
            for _, fn in active_blocks(state):
                fn(state)
        sweeps += 1
        cur = al_objective(state)
        if abs(prev - cur) <= inner_tol * max(1.0, abs(prev)):
            prev = cur
            break
        prev = cur
    return sweeps


def outer_step(state: PddState, opts: SolveOptions) -> float:
    """Dual ascent when violation is within tolerance, else penalty shrink."""
    res = consensus_residuals(state)
    violation = constraint_violation(state, res)
    if violation <= state.eps1:
        update_duals(state, res)
        if opts.eps1_init is None:
            state.eps1 = max(opts.eps1_factor * violation, opts.eps_final)
    else:
        state.kappa *= opts.kappa_shrink
    if opts.eps1_init is not None:
        state.eps1 = max(opts.eps1_factor * state.eps1, opts.eps_final)
    state.outer_iter += 1
    return violation


def repair_spacing(positions: MAPositions, max_iter: int = 200) -> bool:
    """Push apart any antenna pair closer than D_min, inside the region."""
    D = positions.D_min
    ok = True
    for key, v in positions.sets.items():
        n = v.shape[1]
        if n < 2:
            continue
        for _ in range(max_iter):
            moved = False
            for (o1, o2) in pair_list(n):
                diff = v[:, o1] - v[:, o2]
                dist = float(np.linalg.norm(diff))
                if dist >= D:
                    continue
                if dist < 1e-12:
                    direction = np.array([1.0, 0.0]) if (o1 + o2) % 2 == 0 \
                        else np.array([0.0, 1.0])
                else:
                    direction = diff / dist
                push = 0.5 * (D - dist) * 1.0001
                v[:, o1] = np.clip(v[:, o1] + push * direction, 0.0,
                                   positions.side)
                v[:, o2] = np.clip(v[:, o2] - push * direction, 0.0,
                                   positions.side)
                moved = True
            if not moved:
                break
        else:
            ok = False
        if positions.min_pair_distance(key) < D - 1e-9:
            ok = False
    return ok


def refine_rho(up_bps, dd_bps, cfg, fix_rho=None) -> float:
    """Exact minimizer of the (convex, piecewise-linear) latency in rho.

    Honors rho >= rho_min so the uplink phase covers local computing, and
    the [0, 1] box.  Zero-rate sentinels fall back to the pinned or extreme
    candidates by direct evaluation.
    """
    if fix_rho is not None:
        return float(fix_rho)
    A = float(np.sum([cfg.L_a / c if c > 0 else np.inf for c in up_bps]))
    Dloc = cfg.L_a / cfg.F_local
    rho_min = 1.0 if not np.isfinite(A) else Dloc / (A + Dloc)
    Cc = float(np.sum([cfg.alpha_comp * cfg.L_a / c if c > 0 else np.inf
                       for c in dd_bps]))
    Bb = cfg.L_a / cfg.F_E
    candidates = {min(max(rho_min, 0.0), 1.0), 1.0}
    if np.isfinite(Cc):
        candidates.add(min(max(Cc / (Bb + Cc), rho_min), 1.0))

    def total(rho):
        return latency_components(rho, up_bps, dd_bps, cfg).T_total

    best = min(sorted(candidates), key=total)
    return float(best)


def feasible_snapshot(state: PddState):
    """Feasible (positions, beams, rho) view of the current state."""
    a = state.aux
    beams = Beamformers(w=a.w_hat.copy(), w_tilde=a.w_bar.copy(),
                        F=a.F_t.copy(), Q=state.beams.Q.copy())
    positions = state.positions.copy()
    repair_spacing(positions)
    channels = build_channels(state.instance, positions)
    up, dd = all_rates_bps(state.cfg, channels, beams)
    rho = refine_rho(up, dd, state.cfg, fix_rho=state.rho_fixed)
    lat = latency_components(rho, up, dd, state.cfg)
    return positions, beams, rho, lat, up


def solve(instance: ScenarioInstance, opts: SolveOptions = SolveOptions()
          ) -> Solution:
    """Run the full two-loop algorithm on one scenario instance.

    The driver performs a dual-ascent step after every inner solve and
    shrinks the penalty parameter only when the violation has stalled
    (no relative improvement over ``stall_window`` consecutive outer
    iterations): with the deep consensus-copy chain of this problem, the
    duals are the only mechanism that carries descent pressure between
    blocks, and freezing them during penalty-shrink phases wedges the
    whole state.
    """
    eps1 = np.inf if opts.eps1_init is None else opts.eps1_init
    state = init_state(instance, seed=opts.seed, kappa0=opts.kappa0,
                       eps1=eps1, rho_fixed=opts.fix_rho,
                       positions_frozen=opts.freeze_positions)
    trace: list[TraceRow] = []
    best = None
    prev_al = np.inf
    converged = False
    message = "max outer iterations reached"
    violation = constraint_violation(state)
    best_viol = np.inf
    stall = 0

    for it in range(1, opts.max_outer + 1):
        sweeps = inner_loop(state, opts.max_sweeps, opts.inner_tol,
                            audit=opts.audit)
        al = al_objective(state)
        res = consensus_residuals(state)
        violation = constraint_violation(state, res)
        update_duals(state, res)
        if violation <= opts.stall_factor * best_viol:
            best_viol = min(best_viol, violation)
            stall = 0
        else:
            stall += 1
            if stall >= opts.stall_window:
                state.kappa *= opts.kappa_shrink
                stall = 0
        state.eps1 = max(opts.eps1_factor * min(best_viol, violation),
                         opts.eps_final)
        state.outer_iter = it
        positions, beams, rho, lat, up = feasible_snapshot(state)
        trace.append(TraceRow(outer_iter=it, inner_sweeps=sweeps,
                              al_objective=al, T_total_s=lat.T_total,
                              violation=violation, kappa=state.kappa))
        if np.isfinite(lat.T_total) and (best is None
                                         or lat.T_total < best[3].T_total):
            best = (positions, beams, rho, lat, up)
        if (violation <= opts.eps_final
                and abs(prev_al - al) <= opts.al_tol * max(1.0, abs(al))):
            converged = True
            message = f"converged after {it} outer iterations"
            break
        prev_al = al

    if best is None:
        positions, beams, rho, lat, up = feasible_snapshot(state)
        best = (positions, beams, rho, lat, up)
    positions, beams, rho, lat, up = best
    converged = converged or violation <= opts.eps_final
    if converged and "converged" not in message:
        message = (f"violation {violation:.2e} within tolerance at the "
                   f"outer-iteration cap")
    include_cover = state.rho_fixed != 0.0
    slacks = check_feasibility(positions, beams, rho, state.cfg,
                               uplink_bps=up if include_cover else None)
    return Solution(positions=positions, beams=beams, rho=rho, latency=lat,
                    converged=converged, violation=violation,
                    outer_iters=len(trace), trace=trace, message=message,
                    slacks=slacks)
