"""Reproducible random problem instances: geometry, path angles, path gains.

Devices live on a ground plane with the relay at the origin.  Each pair's
first device (the offloading one) is dropped uniformly inside a ring of
``ue_ring_radius`` around the relay; its partner lands inside a ring of
``jammer_ring_radius`` around it.  The BS sits at a fixed ground offset of
``ue_ring_radius`` from the relay.  Large-scale gain of a link at 3-D
distance d is ``g0 * d**(-path_loss_exp)``, split evenly over that link's
paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (MAPositions, field_response_matrix, assemble_channel,
                      ChannelSet, region_keys, region_sizes)
from .config import SystemConfig

# Region holding an antenna set -> field-response family realized on it.
REGION_TO_FRM = {"relay_rx": "ur", "relay_tx": "ut", "bs": "rb"}


def frm_key_for_region(region: str) -> str:
    if region in REGION_TO_FRM:
        return REGION_TO_FRM[region]
    kind, k = region.split(":")
    return {"ue_tx": "t", "d2d_rx": "tbar", "d2d_tx": "ttil"}[kind] + ":" + k


def _directions(azim: np.ndarray, elev: np.ndarray) -> np.ndarray:
    """Planar path direction [cos(elev)cos(azim), cos(elev)sin(azim)]."""
    return np.stack([np.cos(elev) * np.cos(azim),
                     np.cos(elev) * np.sin(azim)], axis=-1)


@dataclass
class PathGeometry:
    """Angles and derived direction vectors per field-response family.

    Uplink Tx paths are per UE; the relay-side arrival paths are shared by
    all UEs (one receive family feeds every uplink channel).  D2D receive
    paths are per receiving pair, transmit paths per transmitting pair.
    """

    ue_tx_azim: np.ndarray     # (K, L)
    ue_tx_elev: np.ndarray
    relay_rx_azim: np.ndarray  # (L,)
    relay_rx_elev: np.ndarray
    relay_tx_azim: np.ndarray  # (L_tilde,)
    relay_tx_elev: np.ndarray
    bs_azim: np.ndarray        # (L_tilde,)
    bs_elev: np.ndarray
    d2d_rx_azim: np.ndarray    # (K, L_bar)
    d2d_rx_elev: np.ndarray
    d2d_tx_azim: np.ndarray    # (K, L_bar)
    d2d_tx_elev: np.ndarray
    h_r: float
    h_t: float
    h_b: float

    def family(self, frm_key: str):
        """(directions (L,2), height_terms (L,)) for one FRM family."""
        if frm_key == "ur":
            return (_directions(self.relay_rx_azim, self.relay_rx_elev),
                    self.h_r * np.sin(self.relay_rx_elev))
        if frm_key == "ut":
            return (_directions(self.relay_tx_azim, self.relay_tx_elev),
                    self.h_t * np.sin(self.relay_tx_elev))
        if frm_key == "rb":
            return (_directions(self.bs_azim, self.bs_elev),
                    self.h_b * np.sin(self.bs_elev))
        kind, ks = frm_key.split(":")
        k = int(ks)
        if kind == "t":
            az, el = self.ue_tx_azim[k], self.ue_tx_elev[k]
        elif kind == "tbar":
            az, el = self.d2d_rx_azim[k], self.d2d_rx_elev[k]
        elif kind == "ttil":
            az, el = self.d2d_tx_azim[k], self.d2d_tx_elev[k]
        else:
            raise KeyError(frm_key)
        return _directions(az, el), np.zeros(az.shape[0])


@dataclass
class PathGains:
    """Diagonal complex path gains per link; E[tr(S^H S)] = g0 * d^-alpha."""

    sigma_up: np.ndarray    # (K, L) uplink UE_k -> relay
    sigma_rb: np.ndarray    # (L_tilde,) relay -> BS
    sigma_d2d: np.ndarray   # (K, K, L_bar); [k, kp] = pair-kp Tx -> pair-k Rx


@dataclass
class ScenarioInstance:
    config: SystemConfig
    geometry: PathGeometry
    gains: PathGains
    ue_distances: np.ndarray    # (K,) 3-D UE->relay distances, m
    seed: int
    d2d_distances: np.ndarray   # (K, K) Tx(kp) -> Rx(k) ground distances, m
    relay_bs_distance: float


def _gain_vector(rng: np.random.Generator, n_paths: int, c2: float,
                 shape=()) -> np.ndarray:
    """CSCG draws with per-element variance c2/n_paths (c2 may be an array)."""
    full = shape + (n_paths,)
    z = (rng.standard_normal(full) + 1j * rng.standard_normal(full))
    z *= math.sqrt(0.5 / n_paths)
    c = np.sqrt(np.asarray(c2, dtype=float))
    return z * (c[..., None] if np.ndim(c2) else c)


def build_scenario(config: SystemConfig, seed: int) -> ScenarioInstance:
    """Sample one instance; identical (config, seed) reproduce it exactly."""
    config.validate()
    rng = np.random.default_rng(np.random.SeedSequence([0x5CE11A, seed]))
    K, L, Lt, Lb = config.K, config.L, config.L_tilde, config.L_bar

    # Ground-plane drop: relay at the origin, BS at a fixed offset.
    ue_angle = rng.uniform(0.0, 2.0 * np.pi, K)
    ue_ground = rng.uniform(0.0, config.ue_ring_radius, K)
    if config.ue_distance_fixed is not None:
        ue_ground = np.full(K, float(config.ue_distance_fixed))
    ue_xy = ue_ground[:, None] * np.stack([np.cos(ue_angle),
                                           np.sin(ue_angle)], axis=1)
    partner_angle = rng.uniform(0.0, 2.0 * np.pi, K)
    partner_ground = rng.uniform(0.0, config.jammer_ring_radius, K)
    partner_xy = ue_xy + partner_ground[:, None] * np.stack(
        [np.cos(partner_angle), np.sin(partner_angle)], axis=1)

    ue_dist = np.sqrt(ue_ground ** 2 + config.h_r ** 2)
    bs_xy = np.array([config.ue_ring_radius, 0.0])
    d_rb = math.sqrt(config.ue_ring_radius ** 2
                     + (config.h_b - config.h_r) ** 2)
    # Tx of pair kp is its offloading device; Rx of pair k is its partner.
    diff = partner_xy[:, None, :] - ue_xy[None, :, :]
    d2d_dist = np.sqrt((diff ** 2).sum(axis=-1))
    d2d_dist = np.maximum(d2d_dist, 1.0)  # clip inside the 1 m reference

    geometry = PathGeometry(
        ue_tx_azim=rng.uniform(0.0, np.pi, (K, L)),
        ue_tx_elev=rng.uniform(0.0, np.pi, (K, L)),
        relay_rx_azim=rng.uniform(0.0, np.pi, L),
        relay_rx_elev=rng.uniform(0.0, np.pi, L),
        relay_tx_azim=rng.uniform(0.0, np.pi, Lt),
        relay_tx_elev=rng.uniform(0.0, np.pi, Lt),
        bs_azim=rng.uniform(0.0, np.pi, Lt),
        bs_elev=rng.uniform(0.0, np.pi, Lt),
        d2d_rx_azim=rng.uniform(0.0, np.pi, (K, Lb)),
        d2d_rx_elev=rng.uniform(0.0, np.pi, (K, Lb)),
        d2d_tx_azim=rng.uniform(0.0, np.pi, (K, Lb)),
        d2d_tx_elev=rng.uniform(0.0, np.pi, (K, Lb)),
        h_r=config.h_r, h_t=config.h_r, h_b=config.h_b,
    )

    c2_up = config.g0 * ue_dist ** (-config.path_loss_exp)
    c2_rb = config.g0 * d_rb ** (-config.path_loss_exp)
    c2_d2d = config.g0 * d2d_dist ** (-config.path_loss_exp)
    gains = PathGains(
        sigma_up=_gain_vector(rng, L, c2_up, (K,)),
        sigma_rb=_gain_vector(rng, Lt, c2_rb),
        sigma_d2d=_gain_vector(rng, Lb, c2_d2d, (K, K)),
    )
    return ScenarioInstance(config=config, geometry=geometry, gains=gains,
                            ue_distances=ue_dist, seed=seed,
                            d2d_distances=d2d_dist, relay_bs_distance=d_rb)


def init_positions(config: SystemConfig, seed: int = 0,
                   jitter: float = 0.0) -> MAPositions:
    """Feasible starting layout: a centered square grid per antenna set.

    ``jitter`` in [0, 1) shifts each antenna by that fraction of the slack
    between grid spacing and D_min (seeded), so spacing stays feasible.
    """
    config.validate()
    rng = np.random.default_rng(np.random.SeedSequence([0x9051710, seed]))
    side = config.region_side
    sets = {}
    for key, n in region_sizes(config).items():
        if n == 1:
            pts = np.full((2, 1), side / 2.0)
        else:
            g = math.ceil(math.sqrt(n))
            ticks = np.linspace(0.0, side, g)
            xx, yy = np.meshgrid(ticks, ticks)
            pts = np.stack([xx.ravel()[:n], yy.ravel()[:n]])
            spacing = side / (g - 1)
            if jitter > 0.0:
                amp = 0.5 * jitter * max(spacing - config.D_min, 0.0)
                pts = pts + rng.uniform(-amp, amp, pts.shape)
                pts = np.clip(pts, 0.0, side)
        sets[key] = pts
    return MAPositions(sets=sets, side=side, D_min=config.D_min)


def build_frms(instance: ScenarioInstance,
               positions: MAPositions) -> dict[str, np.ndarray]:
    """Field-response matrix per family for the given antenna positions."""
    lam = instance.config.wavelength
    frms = {}
    for region in region_keys(instance.config.K):
        fk = frm_key_for_region(region)
        dirs, hterm = instance.geometry.family(fk)
        frms[fk] = field_response_matrix(positions.sets[region], dirs, lam,
                                         hterm)
    return frms


def channels_from_frms(instance: ScenarioInstance,
                       frms: dict[str, np.ndarray]) -> ChannelSet:
    g = instance.gains
    K = instance.config.K
    H = np.stack([assemble_channel(frms["ur"], g.sigma_up[k], frms[f"t:{k}"])
                  for k in range(K)])
    G = assemble_channel(frms["rb"], g.sigma_rb, frms["ut"])
    Ht = np.stack([
        np.stack([assemble_channel(frms[f"tbar:{k}"], g.sigma_d2d[k, kp],
                                   frms[f"ttil:{kp}"]) for kp in range(K)])
        for k in range(K)])
    return ChannelSet(H=H, G=G, H_tilde=Ht)


def build_channels(instance: ScenarioInstance,
                   positions: MAPositions) -> ChannelSet:
    return channels_from_frms(instance, build_frms(instance, positions))
