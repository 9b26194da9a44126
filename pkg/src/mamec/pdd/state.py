"""Solver state: primal variables, consensus copies, duals, penalty weight.

The augmented-Lagrangian objective is ``t_u + t_d`` plus, for every
consensus equality ``r = 0`` in the copy table, a term
``norm(r + kappa*dual)^2 / (2*kappa)``.  The copy table couples:

* offload ratio ``rho`` with four copies feeding the four latency bounds;
* latency scalars ``t_u, t_d`` with their per-UE splits and bound copies;
* rates ``C, Ct`` and SINRs ``eta, eta_hat`` with their bound copies;
* the uplink chain  mu = B_t w,  mu_t = B_r^H S mu,  v_b = B_b q,
  v_bt = v_b^H S~ B_ut,  u_vec = v_bt F,  u_scal = u_vec . mu_t;
* the D2D chain  omega = B_ttil w~,  omega_t = B_tbar^H S~kk' omega;
* beam copies  F = F_t,  w = w_hat,  w~ = w_bar;
* per-region pair differences  vdiff = v_o1 - v_o2  (minimum spacing);
* field-response copies  B = A(v)  per antenna family.

The per-UE sum couplings (``t_u = sum t_u_k`` style) are substituted
directly into their penalty terms rather than kept as separate hard
constraints, so the sums can actually move during block sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channel import MAPositions, field_response_matrix, region_keys
from ..config import SystemConfig
from ..scenario import (ScenarioInstance, build_frms, frm_key_for_region,
                        init_positions)
from ..system import Beamformers, init_beamformers

C_FLOOR = 1e-12     # rate copies stay strictly positive
ETA_FLOOR = 1e-12   # SINR expansion points stay strictly positive


def pair_list(n: int) -> list[tuple[int, int]]:
    """Unordered antenna index pairs (o1 < o2) of one region."""
    return [(o1, o2) for o1 in range(n) for o2 in range(o1 + 1, n)]


@dataclass
class AuxiliaryVariables:
    """Consensus copies and chain variables (one field per copy family)."""

    # latency scalars and offload-ratio family
    t_u: float
    t_d: float
    t_d_tilde: float
    rho: float
    rho_hat: float
    rho_tilde: float
    rho_bar: float
    rho_check: float
    # per-UE latency splits and their bound copies
    t_u_k: np.ndarray
    t_d_k: np.ndarray
    t_c_k: np.ndarray
    t_u_k_t: np.ndarray
    t_d_k_t: np.ndarray
    t_c_k_t: np.ndarray
    # rates and SINR copies
    C: np.ndarray
    C_hat: np.ndarray
    C_bar: np.ndarray
    Ct: np.ndarray
    Ct_check: np.ndarray
    eta: np.ndarray
    eta_t: np.ndarray
    eta_hat: np.ndarray
    eta_bar: np.ndarray
    # uplink chain
    mu: np.ndarray        # (K, L)
    mu_t: np.ndarray      # (K, N_r)
    v_b: np.ndarray       # (K, L_tilde)
    v_bt: np.ndarray      # (K, N_t) rows
    u_vec: np.ndarray     # (K, N_r) rows
    u_scal: np.ndarray    # (K, K)
    # D2D chain
    omega: np.ndarray     # (K, L_bar)
    omega_t: np.ndarray   # (K, K, N_u)
    # beam copies
    F_t: np.ndarray       # (N_t, N_r)
    w_hat: np.ndarray     # (K, N_u)
    w_bar: np.ndarray     # (K, N_u)
    # per-region antenna-pair difference copies
    vdiff: dict[str, np.ndarray]      # region -> (P, 2)
    # field-response copies
    B: dict[str, np.ndarray]          # frm key -> (L, N)


@dataclass
class Anchors:
    """Expansion points of the convex cuts, refreshed at each sweep start."""

    ukk: np.ndarray        # (K,) complex, uplink signal scalar
    eta_t: np.ndarray      # (K,)
    omkk: np.ndarray       # (K, N_u) complex, D2D signal vector
    eta_bar: np.ndarray    # (K,)
    vdiff: dict[str, np.ndarray]


@dataclass
class PddState:
    instance: ScenarioInstance
    positions: MAPositions
    beams: Beamformers
    aux: AuxiliaryVariables
    duals: dict[str, np.ndarray]
    anchors: Anchors
    kappa: float
    eps1: float
    outer_iter: int = 0
    rho_fixed: float | None = None
    positions_frozen: bool = False

    @property
    def cfg(self) -> SystemConfig:
        return self.instance.config

    @property
    def la_eff(self) -> float:
        """Task bits normalized by bandwidth (divides spectral rates)."""
        return self.cfg.L_a / self.cfg.bandwidth_hz

    def region_items(self):
        return [(r, self.positions.sets[r])
                for r in region_keys(self.cfg.K)]

    def true_frms(self) -> dict[str, np.ndarray]:
        return build_frms(self.instance, self.positions)


def _chain_from(beams: Beamformers, B: dict[str, np.ndarray],
                gains, K: int):
    """Evaluate every chain variable from its definition (exact consensus)."""
    mu = np.stack([B[f"t:{j}"] @ beams.w[j] for j in range(K)])
    mu_t = np.stack([B["ur"].conj().T @ (gains.sigma_up[j] * mu[j])
                     for j in range(K)])
    v_b = np.stack([B["rb"] @ beams.Q[:, k] for k in range(K)])
    v_bt = np.stack([v_b[k].conj() @ (gains.sigma_rb[:, None] * B["ut"])
                     for k in range(K)])
    u_vec = np.stack([v_bt[k] @ beams.F for k in range(K)])
    u_scal = np.stack([[u_vec[k] @ mu_t[j] for j in range(K)]
                       for k in range(K)])
    omega = np.stack([B[f"ttil:{j}"] @ beams.w_tilde[j] for j in range(K)])
    omega_t = np.stack([
        np.stack([B[f"tbar:{k}"].conj().T @ (gains.sigma_d2d[k, j] * omega[j])
                  for j in range(K)]) for k in range(K)])
    return mu, mu_t, v_b, v_bt, u_vec, u_scal, omega, omega_t


def chain_sinrs(u_scal, u_vec, Q, omega_t, cfg):
    """(uplink, d2d) SINR arrays implied by the chain variables."""
    K = cfg.K
    up = np.empty(K)
    dd = np.empty(K)
    for k in range(K):
        interf = sum(abs(u_scal[k, j]) ** 2 for j in range(K) if j != k)
        noise = (cfg.sigma2_r * np.linalg.norm(u_vec[k]) ** 2
                 + cfg.sigma2_b * np.linalg.norm(Q[:, k]) ** 2)
        up[k] = abs(u_scal[k, k]) ** 2 / (interf + noise)
        dint = sum(np.linalg.norm(omega_t[k, j]) ** 2
                   for j in range(K) if j != k)
        dd[k] = (np.linalg.norm(omega_t[k, k]) ** 2
                 / (dint + cfg.sigma2_d))
    return up, dd


def fair_ue_signatures(beams: Beamformers, gains, B: dict[str, np.ndarray],
                       P_k: float) -> None:
    """Spread the UE uplink signatures over the shared relay path space.

    Every uplink channel factors through the same L relay arrival paths, so
    at most L interference-free streams exist.  Each UE steers its transmit
    vector so that its path-domain signature matches a column of the
    harmonic tight frame, which keeps the K signatures maximally spread in
    the L-dimensional space and no UE starts rate-starved.
    """
    K = beams.w.shape[0]
    L = gains.sigma_up.shape[1]
    for k in range(K):
        d = np.exp(2j * np.pi * np.arange(L) * k / K) / np.sqrt(L)
        M = gains.sigma_up[k][:, None] * B[f"t:{k}"]
        w = np.linalg.lstsq(M, d, rcond=None)[0]
        nrm = np.linalg.norm(w)
        if nrm > 0:
            beams.w[k] = np.sqrt(P_k) * w / nrm


def matched_relay_combiners(beams: Beamformers, H: np.ndarray,
                            G: np.ndarray, cfg: SystemConfig) -> None:
    """Receive-zero-forcing relay matrix and MMSE BS combiners.

    The relay inverts the stacked per-UE receive vectors (so no UE leaks
    into another's stream, and weak UEs get extra forwarding power) and
    retransmits each stream on its own dominant relay-BS direction; BS
    combiners are MMSE.  Keeps norm(F) = sqrt(P_r) and unit-norm combiner
    columns.
    """
    K = H.shape[0]
    rx = np.stack([H[k] @ beams.w[k] for k in range(K)], axis=1)
    W = np.linalg.pinv(rx)            # receive zero-forcing rows
    V = np.linalg.svd(G)[2].conj().T
    r = min(W.shape[0], V.shape[1])
    F = V[:, :r] @ W[:r]
    nrm = np.linalg.norm(F)
    if nrm > 0:
        beams.F = np.sqrt(cfg.P_r) * F / nrm
    GF = G @ beams.F
    sig = np.stack([GF @ H[k] @ beams.w[k] for k in range(K)], axis=1)
    R = (sig @ sig.conj().T + cfg.sigma2_r * GF @ GF.conj().T
         + cfg.sigma2_b * np.eye(GF.shape[0]))
    for k in range(K):
        q = np.linalg.solve(R, sig[:, k])
        nrm = np.linalg.norm(q)
        if nrm > 0:
            beams.Q[:, k] = q / nrm


def init_state(instance: ScenarioInstance, seed: int = 0,
               kappa0: float = 2.0, eps1: float = 1e-1,
               rho_fixed: float | None = None,
               positions_frozen: bool = False,
               matched_init: bool = True) -> PddState:
    """Consensus-exact starting state: every copy equals its definition."""
    cfg = instance.config
    K = cfg.K
    positions = init_positions(cfg, seed)
    beams = init_beamformers(cfg, seed)
    B = build_frms(instance, positions)
    if matched_init:
        from ..scenario import channels_from_frms
        fair_ue_signatures(beams, instance.gains, B, cfg.P_k)
        ch = channels_from_frms(instance, B)
        matched_relay_combiners(beams, ch.H, ch.G, cfg)
    chain = _chain_from(beams, B, instance.gains, K)
    mu, mu_t, v_b, v_bt, u_vec, u_scal, omega, omega_t = chain

    eta_up, eta_dd = chain_sinrs(u_scal, u_vec, beams.Q, omega_t, cfg)
    C = np.maximum(np.log2(1.0 + eta_up), C_FLOOR)
    Ct = np.maximum(np.log2(1.0 + eta_dd), C_FLOOR)

    la_eff = cfg.L_a / cfg.bandwidth_hz
    if rho_fixed is not None:
        rho = float(rho_fixed)
    else:
        s_up = float(np.sum(la_eff / C))
        d_loc = cfg.L_a / cfg.F_local
        rho = min(1.0, max(0.5, d_loc / (s_up + d_loc)))

    t_u_k = rho * la_eff / C
    t_d_k_true = cfg.alpha_comp * (1.0 - rho) * la_eff / Ct
    t_d = max(float(t_d_k_true.sum()), rho * cfg.L_a / cfg.F_E)
    t_d_k = t_d_k_true + (t_d - t_d_k_true.sum()) / K
    req_c = 0.0 if rho_fixed == 0.0 else (1.0 - rho) * cfg.L_a / cfg.F_local
    beta = 1.0 if t_u_k.sum() <= 0 else min(1.0, req_c / max(t_u_k.sum(),
                                                             1e-300))
    t_c_k = beta * t_u_k

    aux = AuxiliaryVariables(
        t_u=float(t_u_k.sum()), t_d=t_d, t_d_tilde=t_d,
        rho=rho, rho_hat=rho, rho_tilde=rho, rho_bar=rho, rho_check=rho,
        t_u_k=t_u_k, t_d_k=t_d_k, t_c_k=t_c_k,
        t_u_k_t=t_u_k.copy(), t_d_k_t=t_d_k.copy(), t_c_k_t=t_c_k.copy(),
        C=C, C_hat=C.copy(), C_bar=C.copy(),
        Ct=Ct, Ct_check=Ct.copy(),
        eta=eta_up, eta_t=eta_up.copy(), eta_hat=eta_dd,
        eta_bar=eta_dd.copy(),
        mu=mu, mu_t=mu_t, v_b=v_b, v_bt=v_bt, u_vec=u_vec, u_scal=u_scal,
        omega=omega, omega_t=omega_t,
        F_t=beams.F.copy(), w_hat=beams.w.copy(), w_bar=beams.w_tilde.copy(),
        vdiff={r: np.stack([positions.sets[r][:, o1] - positions.sets[r][:, o2]
                            for (o1, o2) in pair_list(v.shape[1])])
               if v.shape[1] > 1 else np.zeros((0, 2))
               for r, v in ((r, positions.sets[r])
                            for r in region_keys(K))},
        B=B,
    )
    state = PddState(instance=instance, positions=positions, beams=beams,
                     aux=aux, duals={}, anchors=None, kappa=kappa0,
                     eps1=eps1, rho_fixed=rho_fixed,
                     positions_frozen=positions_frozen)
    res = consensus_residuals(state)
    state.duals = {key: np.zeros_like(val) for key, val in res.items()}
    refresh_anchors(state)
    return state


def refresh_anchors(state: PddState) -> None:
    a = state.aux
    state.anchors = Anchors(
        ukk=np.array([a.u_scal[k, k] for k in range(state.cfg.K)]),
        eta_t=np.maximum(a.eta_t, ETA_FLOOR),
        omkk=np.stack([a.omega_t[k, k] for k in range(state.cfg.K)]),
        eta_bar=np.maximum(a.eta_bar, ETA_FLOOR),
        vdiff={r: v.copy() for r, v in a.vdiff.items()},
    )


def consensus_residuals(state: PddState) -> dict[str, np.ndarray]:
    """Every copy-table residual, keyed canonically (order is stable)."""
    a, b, g = state.aux, state.beams, state.instance.gains
    K = state.cfg.K
    res: dict[str, np.ndarray] = {}
    res["rho_hat"] = np.array(a.rho - a.rho_hat)
    res["rho_tilde"] = np.array(a.rho - a.rho_tilde)
    res["rho_bar"] = np.array(a.rho - a.rho_bar)
    res["rho_check"] = np.array(a.rho - a.rho_check)
    res["t_d_hat"] = np.array(a.t_d - a.t_d_k.sum())
    res["t_d_tilde"] = np.array(a.t_d - a.t_d_tilde)
    res["t_u_tilde"] = np.array(a.t_u - a.t_u_k.sum())
    res["C_hat"] = a.C - a.C_hat
    res["C_bar"] = a.C - a.C_bar
    res["Ct_check"] = a.Ct - a.Ct_check
    res["t_u_k"] = a.t_u_k - a.t_u_k_t
    res["t_d_k"] = a.t_d_k - a.t_d_k_t
    res["t_c_k"] = a.t_c_k - a.t_c_k_t
    res["eta"] = a.eta - a.eta_t
    res["eta_hat"] = a.eta_hat - a.eta_bar
    res["u_scal"] = a.u_scal - a.u_vec @ a.mu_t.T
    res["F"] = b.F - a.F_t
    res["mu"] = a.mu - np.stack([a.B[f"t:{j}"] @ b.w[j] for j in range(K)])
    res["mu_t"] = a.mu_t - np.stack(
        [a.B["ur"].conj().T @ (g.sigma_up[j] * a.mu[j]) for j in range(K)])
    res["v_b"] = a.v_b - (a.B["rb"] @ b.Q).T
    res["v_bt"] = a.v_bt - np.stack(
        [a.v_b[k].conj() @ (g.sigma_rb[:, None] * a.B["ut"])
         for k in range(K)])
    res["u_vec"] = a.u_vec - a.v_bt @ b.F
    res["w"] = b.w - a.w_hat
    res["w_tilde"] = b.w_tilde - a.w_bar
    res["omega"] = a.omega - np.stack(
        [a.B[f"ttil:{j}"] @ b.w_tilde[j] for j in range(K)])
    res["omega_t"] = a.omega_t - np.stack(
        [np.stack([a.B[f"tbar:{k}"].conj().T
                   @ (g.sigma_d2d[k, j] * a.omega[j]) for j in range(K)])
         for k in range(K)])
    for region, v in state.region_items():
        pairs = pair_list(v.shape[1])
        if pairs:
            diff = np.stack([v[:, o1] - v[:, o2] for (o1, o2) in pairs])
            res[f"vdiff:{region}"] = a.vdiff[region] - diff
        else:
            res[f"vdiff:{region}"] = np.zeros((0, 2))
    frms = state.true_frms()
    for region in region_keys(K):
        fk = frm_key_for_region(region)
        res[f"frm:{fk}"] = frms[fk] - a.B[fk]
    return res


def al_objective(state: PddState,
                 residuals: dict[str, np.ndarray] | None = None) -> float:
    """t_u + t_d plus the (1/2 kappa)-weighted augmented penalty."""
    if residuals is None:
        residuals = consensus_residuals(state)
    penalty = 0.0
    for key, r in residuals.items():
        shifted = r + state.kappa * state.duals[key]
        penalty += float(np.sum(np.abs(shifted) ** 2))
    return state.aux.t_u + state.aux.t_d + penalty / (2.0 * state.kappa)


def constraint_violation(state: PddState,
                         residuals: dict[str, np.ndarray] | None = None
                         ) -> float:
    """Max-norm over all copy residuals."""
    if residuals is None:
        residuals = consensus_residuals(state)
    worst = 0.0
    for r in residuals.values():
        if r.size:
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


def update_duals(state: PddState,
                 residuals: dict[str, np.ndarray] | None = None) -> None:
    """Dual ascent: each dual moves by residual / kappa."""
    if residuals is None:
        residuals = consensus_residuals(state)
    for key, r in residuals.items():
        state.duals[key] = state.duals[key] + r / state.kappa
