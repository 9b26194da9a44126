"""SINRs, achievable rates, latency decomposition, and feasibility checks.

The offload pipeline: each pair's first device splits an ``L_a``-bit task,
sending a fraction ``rho`` through relay and BS to the edge server while
computing the rest locally and shipping the compressed local result to its
partner over the D2D link.  Total latency is the uplink time plus whichever
of edge computing or D2D delivery finishes last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, MAPositions
from .config import SystemConfig


@dataclass
class Beamformers:
    """Transmit/receive weights: per-UE vectors, relay matrix, BS combiners."""

    w: np.ndarray        # (K, N_u) uplink transmit vectors
    w_tilde: np.ndarray  # (K, N_u) D2D transmit vectors
    F: np.ndarray        # (N_t, N_r) relay amplify-and-forward matrix
    Q: np.ndarray        # (N_b, K) BS receive combiners, column k for UE k

    def copy(self) -> "Beamformers":
        return Beamformers(self.w.copy(), self.w_tilde.copy(),
                           self.F.copy(), self.Q.copy())


def init_beamformers(cfg: SystemConfig, seed: int = 0) -> Beamformers:
    """Random feasible start: power constraints met with equality."""
    rng = np.random.default_rng(np.random.SeedSequence([0xBEA4F0, seed]))

    def cn(*shape):
        return (rng.standard_normal(shape)
                + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

    w = cn(cfg.K, cfg.N_u)
    w *= np.sqrt(cfg.P_k) / np.linalg.norm(w, axis=1, keepdims=True)
    wt = cn(cfg.K, cfg.N_u)
    wt *= np.sqrt(cfg.P_k) / np.linalg.norm(wt, axis=1, keepdims=True)
    F = cn(cfg.N_t, cfg.N_r)
    F *= np.sqrt(cfg.P_r) / np.linalg.norm(F)
    Q = cn(cfg.N_b, cfg.K)
    Q /= np.linalg.norm(Q, axis=0, keepdims=True)
    return Beamformers(w=w, w_tilde=wt, F=F, Q=Q)


def uplink_sinr(k: int, channels: ChannelSet, beams: Beamformers,
                sigma2_r: float, sigma2_b: float) -> float:
    """Post-combining SINR of UE k at the BS through the AF relay."""
    K = channels.H.shape[0]
    if not 0 <= k < K:
        raise IndexError(f"UE index {k} out of range for K={K}")
    q = beams.Q[:, k]
    qgf = q.conj() @ channels.G @ beams.F        # (N_r,) row q^H G F
    sig = abs(qgf @ channels.H[k] @ beams.w[k]) ** 2
    interf = sum(abs(qgf @ channels.H[kpp] @ beams.w[kpp]) ** 2
                 for kpp in range(K) if kpp != k)
    noise = (np.linalg.norm(qgf) ** 2 * sigma2_r
             + np.linalg.norm(q) ** 2 * sigma2_b)
    return float(sig / (interf + noise))


def d2d_sinr(k: int, channels: ChannelSet, beams: Beamformers,
             sigma2_d: float) -> float:
    """SINR of pair k's direct link under the other pairs' interference."""
    K = channels.H_tilde.shape[0]
    if not 0 <= k < K:
        raise IndexError(f"pair index {k} out of range for K={K}")
    sig = np.linalg.norm(channels.H_tilde[k, k] @ beams.w_tilde[k]) ** 2
    interf = sum(
        np.linalg.norm(channels.H_tilde[k, kp] @ beams.w_tilde[kp]) ** 2
        for kp in range(K) if kp != k)
    return float(sig / (interf + sigma2_d))


def uplink_rate(k, channels, beams, sigma2_r, sigma2_b) -> float:
    """Spectral efficiency log2(1 + SINR), bit/s/Hz."""
    return float(np.log2(1.0 + uplink_sinr(k, channels, beams, sigma2_r,
                                           sigma2_b)))


def d2d_rate(k, channels, beams, sigma2_d) -> float:
    return float(np.log2(1.0 + d2d_sinr(k, channels, beams, sigma2_d)))


def all_rates_bps(instance_cfg: SystemConfig, channels: ChannelSet,
                  beams: Beamformers):
    """(uplink, d2d) bit/s rate arrays: bandwidth times spectral efficiency."""
    K = instance_cfg.K
    up = np.array([uplink_rate(k, channels, beams, instance_cfg.sigma2_r,
                               instance_cfg.sigma2_b) for k in range(K)])
    dd = np.array([d2d_rate(k, channels, beams, instance_cfg.sigma2_d)
                   for k in range(K)])
    return up * instance_cfg.bandwidth_hz, dd * instance_cfg.bandwidth_hz


@dataclass
class LatencyBreakdown:
    """Latency components in seconds; T_total = T_u1 + max(T_e1, T_d2)."""

    T_u1: float
    T_e1: float
    T_c2: float
    T_d2: float
    T_total: float
    T_u1_k: np.ndarray
    T_d2_k: np.ndarray


def _safe_div(num: float, den: float) -> float:
    """num/den with an infinite-latency sentinel for a dead link."""
    if num == 0.0:
        return 0.0
    if den <= 0.0:
        return np.inf
    return num / den


def latency_components(rho: float, uplink_bps: np.ndarray,
                       d2d_bps: np.ndarray,
                       cfg: SystemConfig) -> LatencyBreakdown:
    """Evaluate the latency decomposition at offload ratio ``rho``.

    ``uplink_bps``/``d2d_bps`` are the per-UE achievable bit rates.  A zero
    rate carrying nonzero traffic yields an infinite-latency sentinel rather
    than an exception.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"offload ratio must lie in [0, 1], got {rho}")
    up = np.asarray(uplink_bps, dtype=float)
    dd = np.asarray(d2d_bps, dtype=float)
    T_u1_k = np.array([_safe_div(rho * cfg.L_a, c) for c in up])
    T_d2_k = np.array([_safe_div((1.0 - rho) * cfg.alpha_comp * cfg.L_a, c)
                       for c in dd])
    T_c2 = (1.0 - rho) * cfg.L_a / cfg.F_local
    T_e1 = rho * cfg.L_a / cfg.F_E
    T_u1 = float(T_u1_k.sum())
    T_d2 = float(T_d2_k.sum())
    return LatencyBreakdown(T_u1=T_u1, T_e1=T_e1, T_c2=T_c2, T_d2=T_d2,
                            T_total=T_u1 + max(T_e1, T_d2),
                            T_u1_k=T_u1_k, T_d2_k=T_d2_k)


def evaluate_latency(instance, positions: MAPositions, beams: Beamformers,
                     rho: float) -> LatencyBreakdown:
    from .scenario import build_channels
    channels = build_channels(instance, positions)
    up, dd = all_rates_bps(instance.config, channels, beams)
    return latency_components(rho, up, dd, instance.config)


@dataclass
class ConstraintSlack:
    name: str
    slack: float


def check_feasibility(positions: MAPositions, beams: Beamformers, rho: float,
                      cfg: SystemConfig,
                      uplink_bps=None) -> list[ConstraintSlack]:
    """Signed slack of every constraint; feasible iff all slacks >= -tol.

    The uplink-covers-local-compute constraint needs rates; it is reported
    only when ``uplink_bps`` is provided.
    """
    slacks = []
    if uplink_bps is not None:
        lat_u = sum(_safe_div(rho * cfg.L_a, c) for c in uplink_bps)
        t_c2 = (1.0 - rho) * cfg.L_a / cfg.F_local
        slacks.append(ConstraintSlack("uplink_covers_local", lat_u - t_c2))
    for k in range(cfg.K):
        slacks.append(ConstraintSlack(
            f"ue_power:{k}", cfg.P_k - np.linalg.norm(beams.w[k]) ** 2))
        slacks.append(ConstraintSlack(
            f"d2d_power:{k}",
            cfg.P_k - np.linalg.norm(beams.w_tilde[k]) ** 2))
    slacks.append(ConstraintSlack("relay_power",
                                  cfg.P_r - np.linalg.norm(beams.F) ** 2))
    slacks.append(ConstraintSlack("rho_low", rho))
    slacks.append(ConstraintSlack("rho_high", 1.0 - rho))
    for key, v in positions.sets.items():
        lo = float(v.min(initial=np.inf))
        hi = float((positions.side - v).min(initial=np.inf))
        slacks.append(ConstraintSlack(f"region:{key}", min(lo, hi)))
        n = v.shape[1]
        if n >= 2:
            d = v[:, :, None] - v[:, None, :]
            dist = np.sqrt((d ** 2).sum(axis=0))
            iu = np.triu_indices(n, k=1)
            slacks.append(ConstraintSlack(
                f"spacing:{key}", float(dist[iu].min()) - positions.D_min))
    return slacks


def min_slack(slacks: list[ConstraintSlack]) -> float:
    return min(s.slack for s in slacks)
