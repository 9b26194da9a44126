"""Field-response channel model for movable antenna arrays.

A movable antenna at 2-D position ``v`` inside its region contributes, for
path ``l`` with planar direction ``pi_l`` and elevation ``phi_l``, the phase
``(2*pi/wavelength) * (pi_l @ v + h*sin(phi_l))``.  Stacking the unit-modulus
phasors over paths gives the field-response vector; stacking antennas gives
the field-response matrix A.  A channel between two arrays is
``A_rx^H @ diag(sigma) @ A_tx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig

TWO_PI = 2.0 * np.pi


def region_keys(K: int) -> list[str]:
    """Canonical ordering of the movable-antenna regions."""
    keys = [f"ue_tx:{k}" for k in range(K)]
    keys += [f"d2d_rx:{k}" for k in range(K)]
    keys += [f"d2d_tx:{k}" for k in range(K)]
    keys += ["relay_rx", "relay_tx", "bs"]
    return keys


def region_sizes(cfg: SystemConfig) -> dict[str, int]:
    sizes = {}
    for k in range(cfg.K):
        sizes[f"ue_tx:{k}"] = cfg.N_u
        sizes[f"d2d_rx:{k}"] = cfg.N_u
        sizes[f"d2d_tx:{k}"] = cfg.N_u
    sizes["relay_rx"] = cfg.N_r
    sizes["relay_tx"] = cfg.N_t
    sizes["bs"] = cfg.N_b
    return sizes


@dataclass
class MAPositions:
    """All movable-antenna coordinates, one (2, N) array per antenna set.

    Each set moves in its own local square [0, side]^2; any two antennas of
    the same set must stay at least ``D_min`` apart.
    """

    sets: dict[str, np.ndarray]
    side: float
    D_min: float

    @property
    def t(self) -> list[np.ndarray]:
        return [v for key, v in self.sets.items() if key.startswith("ue_tx:")]

    @property
    def t_bar(self) -> list[np.ndarray]:
        return [v for key, v in self.sets.items() if key.startswith("d2d_rx:")]

    @property
    def t_tilde(self) -> list[np.ndarray]:
        return [v for key, v in self.sets.items() if key.startswith("d2d_tx:")]

    @property
    def u_r(self) -> np.ndarray:
        return self.sets["relay_rx"]

    @property
    def u_t(self) -> np.ndarray:
        return self.sets["relay_tx"]

    @property
    def r_b(self) -> np.ndarray:
        return self.sets["bs"]

    def copy(self) -> "MAPositions":
        return MAPositions({k: v.copy() for k, v in self.sets.items()},
                           self.side, self.D_min)

    def min_pair_distance(self, key: str) -> float:
        v = self.sets[key]
        n = v.shape[1]
        if n < 2:
            return np.inf
        d = v[:, :, None] - v[:, None, :]
        dist = np.sqrt((d ** 2).sum(axis=0))
        iu = np.triu_indices(n, k=1)
        return float(dist[iu].min())


def propagation_phase(pos, direction, height: float = 0.0,
                      elevation: float = 0.0) -> float:
    """Path-length difference of one path at ``pos`` relative to the origin.

    Returns ``direction @ pos + height*sin(elevation)`` in meters; elevated
    arrays (relay, BS) add the height term, planar UE arrays pass height 0.
    """
    return float(np.dot(direction, pos)) + height * np.sin(elevation)


def field_response_vector(pos, directions, wavelength: float,
                          height_terms=None) -> np.ndarray:
    """Unit-modulus phasor per path for one antenna at ``pos``.

    ``directions`` is (L, 2); ``height_terms`` is the precomputed
    ``h*sin(elevation)`` per path (L,), zero for planar arrays.
    """
    pos = np.asarray(pos, dtype=float)
    kappa = np.asarray(directions, dtype=float) @ pos
    if height_terms is not None:
        kappa = kappa + np.asarray(height_terms, dtype=float)
    return np.exp(1j * TWO_PI / wavelength * kappa)


def field_response_matrix(positions, directions, wavelength: float,
                          height_terms=None) -> np.ndarray:
    """(L, N) matrix whose column m is the response of antenna m."""
    positions = np.asarray(positions, dtype=float)
    kappa = np.asarray(directions, dtype=float) @ positions  # (L, N)
    if height_terms is not None:
        kappa = kappa + np.asarray(height_terms, dtype=float)[:, None]
    return np.exp(1j * TWO_PI / wavelength * kappa)


def frm_phases(positions, directions, wavelength: float,
               height_terms=None) -> np.ndarray:
    """(L, N) array of the phases whose exponentials form the FRM."""
    positions = np.asarray(positions, dtype=float)
    kappa = np.asarray(directions, dtype=float) @ positions
    if height_terms is not None:
        kappa = kappa + np.asarray(height_terms, dtype=float)[:, None]
    return TWO_PI / wavelength * kappa


def assemble_channel(A_rx: np.ndarray, sigma: np.ndarray,
                     A_tx: np.ndarray) -> np.ndarray:
    """Channel matrix A_rx^H @ diag(sigma) @ A_tx, shape (N_rx, N_tx)."""
    A_rx = np.asarray(A_rx)
    A_tx = np.asarray(A_tx)
    sigma = np.asarray(sigma)
    if A_rx.shape[0] != sigma.shape[0] or A_tx.shape[0] != sigma.shape[0]:
        raise ValueError(
            f"path-count mismatch: A_rx {A_rx.shape}, sigma {sigma.shape}, "
            f"A_tx {A_tx.shape}")
    return A_rx.conj().T @ (sigma[:, None] * A_tx)


@dataclass
class ChannelSet:
    """Assembled channels: uplink H per UE, relay->BS G, D2D H_tilde grid."""

    H: np.ndarray        # (K, N_r, N_u)
    G: np.ndarray        # (N_b, N_t)
    H_tilde: np.ndarray  # (K, K, N_u, N_u); [k, kp] maps pair-kp Tx -> pair-k Rx
