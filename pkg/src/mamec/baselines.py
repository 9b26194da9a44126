"""Reference schemes the joint design is compared against.

* fixed-position antennas (FPA): the same solver with every antenna frozen
  at its initial grid point;
* local-only: offload ratio pinned to 0, D2D side still optimized;
* full-offload: offload ratio pinned to 1, uplink side still optimized.

With the ratio pinned to 0 the uplink-covers-local-compute constraint is
dropped: there is no offload phase to overlap with, and the local compute
time is reported in the breakdown without entering the total.
"""

from __future__ import annotations

from dataclasses import replace

from .pdd.solver import Solution, SolveOptions, solve
from .scenario import ScenarioInstance
from .system import LatencyBreakdown


def solve_fpa(instance: ScenarioInstance,
              opts: SolveOptions = SolveOptions()) -> Solution:
    """Beamforming and offloading optimized over fixed antenna positions."""
    return solve(instance, replace(opts, freeze_positions=True))


def solve_pinned_rho(instance: ScenarioInstance, rho: float,
                     opts: SolveOptions = SolveOptions()) -> Solution:
    return solve(instance, replace(opts, fix_rho=float(rho)))


def solve_local_only(instance: ScenarioInstance,
                     opts: SolveOptions = SolveOptions()) -> LatencyBreakdown:
    """Everything computed locally; only the D2D result delivery counts."""
    return solve_pinned_rho(instance, 0.0, opts).latency


def solve_full_offload(instance: ScenarioInstance,
                       opts: SolveOptions = SolveOptions()
                       ) -> LatencyBreakdown:
    """Entire task offloaded; latency is uplink time plus edge computing."""
    return solve_pinned_rho(instance, 1.0, opts).latency
