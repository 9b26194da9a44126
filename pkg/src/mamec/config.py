"""System constants for the relay-aided D2D MEC simulator.

All powers are stored in watts; configuration files may state them in dBm
(see :func:`dbm_to_watts`).  Rates carried by the optimizer are spectral
(bit/s/Hz); ``bandwidth_hz`` converts them to bit/s before any division of
task bits by a rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level from dBm to watts: 10^((p_dbm - 30)/10)."""
    if not math.isfinite(p_dbm):
        raise ValueError(f"power in dBm must be finite, got {p_dbm}")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Scenario constants: dimensions, traffic, powers, geometry.

    ``K`` D2D pairs, each device with ``N_u`` movable antennas; an
    amplify-and-forward relay with ``N_r`` receive / ``N_t`` transmit
    antennas; a base station with ``N_b`` antennas.  ``L``/``L_tilde``/
    ``L_bar`` are the path counts of the UE-relay, relay-BS and D2D links.
    """

    K: int = 4
    N_u: int = 2
    N_r: int = 4
    N_t: int = 4
    N_b: int = 8
    L: int = 2
    L_tilde: int = 8
    L_bar: int = 2

    L_a: float = 1e7            # task size per UE, bits
    F_local: float = 4e6        # local CPU rate, bit/s
    F_E: float = 1e8            # edge server rate, bit/s
    alpha_comp: float = 0.5     # result compression ratio in [0, 1]

    P_k: float = dbm_to_watts(15.0)   # UE transmit power budget, W
    P_r: float = dbm_to_watts(30.0)   # relay transmit power budget, W
    sigma2_r: float = 1e-8      # relay noise power, W
    sigma2_b: float = 1e-8      # BS noise power, W
    sigma2_d: float = 1e-8      # D2D receiver noise power, W

    g0: float = 100.0           # channel power gain at the 1 m reference
    path_loss_exp: float = 2.8
    wavelength: float = 0.1     # m

    region_side: float = 0.4    # movable region edge length per antenna set, m
    D_min: float = 0.05         # minimum antenna spacing, m
    h_r: float = 10.0           # relay height, m
    h_b: float = 20.0           # BS height, m
    ue_ring_radius: float = 60.0      # UE placement ring around the relay, m
    jammer_ring_radius: float = 30.0  # ring radius for each pair's partner device, m

    bandwidth_hz: float = 1.0
    # When set, every UE-relay distance is pinned to this value (used by the
    # distance sweep of the experiment runner); angles stay random.
    ue_distance_fixed: float | None = None

    def validate(self) -> None:
        """Raise ValueError if any invariant is violated."""
        problems = []
        for name in ("K", "N_u", "N_r", "N_t", "N_b", "L", "L_tilde", "L_bar"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        for name in ("L_a", "F_local", "F_E", "P_k", "P_r", "sigma2_r",
                     "sigma2_b", "sigma2_d", "g0", "wavelength",
                     "bandwidth_hz"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0")
        if not 0.0 <= self.alpha_comp <= 1.0:
            problems.append("alpha_comp must lie in [0, 1]")
        if not self.D_min > 0:
            problems.append("D_min must be > 0")
        if self.h_r < 0 or self.h_b < 0:
            problems.append("heights must be >= 0")
        if self.ue_ring_radius <= 0 or self.jammer_ring_radius <= 0:
            problems.append("placement radii must be > 0")
        n_max = max(self.N_u, self.N_r, self.N_t, self.N_b)
        g = math.isqrt(n_max - 1) + 1 if n_max > 1 else 1  # ceil(sqrt(n_max))
        while g * g < n_max:
            g += 1
        if self.region_side < self.D_min * (g - 1):
            problems.append(
                f"region_side {self.region_side} cannot host {n_max} antennas "
                f"at spacing {self.D_min} (needs >= {self.D_min * (g - 1)})")
        if self.ue_distance_fixed is not None and self.ue_distance_fixed <= 0:
            problems.append("ue_distance_fixed must be > 0 when set")
        if problems:
            raise ValueError("invalid SystemConfig: " + "; ".join(problems))

    def with_updates(self, **kwargs) -> "SystemConfig":
        cfg = replace(self, **kwargs)
        cfg.validate()
        return cfg


def reference_config() -> SystemConfig:
    """The default measurement scenario used by the experiment runner.

    Four D2D pairs with 15/30 dBm UE/relay budgets, 1e-8 W noise floors,
    1e7-bit tasks against a 1e8 bit/s edge server, and a 10 MHz channel.
    """
    cfg = SystemConfig(bandwidth_hz=1e7)
    cfg.validate()
    return cfg


def tiny_config() -> SystemConfig:
    """Degenerate single-pair, single-antenna, single-path scenario.

    Every array collapses to a scalar, which makes exhaustive search over a
    position/offload grid practical.
    """
    cfg = SystemConfig(K=1, N_u=1, N_r=1, N_t=1, N_b=1, L=1, L_tilde=1,
                       L_bar=1, bandwidth_hz=1e7)
    cfg.validate()
    return cfg
