"""Block-coordinate updates of the augmented-Lagrangian inner loop.

Each update minimizes the AL exactly over its own variable group, holding
the rest fixed, and never increases the objective:

* chi1      - power-ball projections of the beam copies F_t, w_hat, w_bar
* chi2      - entrywise phase-optimal unit-modulus field-response copies
* chi3      - scalar bound copies (C_bar, Ct_check, t-copies) and rho
* chi4      - pair-difference copies onto the spacing halfspace
* chi5      - uplink SINR coupling (u_scal, u_vec, eta_t) with multiplier
              bisection on the linearized SINR cut
* barchi1   - relay matrix F, rho copies, latency scalars/splits, rates and
              SINR variables, uplink chain heads mu, v_b, and uplink beams w
* barchi2   - actual antenna positions (per-antenna box QP with safeguard)
* barbarchi1- D2D beams w_tilde, chain middles mu_t, v_bt, and C_hat
* barbarchi2- BS combiners q_k (norm-bounded least squares)
* barbarchi4- D2D SINR coupling (omega_t, eta_bar) plus omega least squares

Feasibility cuts are enforced by every block that owns one of their
variables, so each block starts from a feasible point and exact
minimization guarantees descent.
"""

from __future__ import annotations

import numpy as np

from ..channel import frm_phases, region_keys
from ..scenario import frm_key_for_region
from ..subproblems import (MultiplierBracketError, coupled_sum_quadratic,
                           d2d_sinr_block, halfspace_ls,
                           hyperbola_projection, norm_constrained_lstsq,
                           position_box_qp, project_ball, project_interval,
                           rate_hypograph_update, ratio_copy_update,
                           rho_cover_update, shift_to_sum_atleast,
                           sinr_coupled_block)
from .state import (C_FLOOR, ETA_FLOOR, PddState, al_objective,
                    consensus_residuals, pair_list)

_TINY = 1e-300
_ANCHOR_EPS = 1e-140  # squared-magnitude scale below which a cut is skipped


def update_chi1(state: PddState) -> None:
    """Project the beam copies onto their power balls."""
    cfg, a, d, kap = state.cfg, state.aux, state.duals, state.kappa
    a.F_t = project_ball(state.beams.F + kap * d["F"], np.sqrt(cfg.P_r))
    for k in range(cfg.K):
        a.w_hat[k] = project_ball(state.beams.w[k] + kap * d["w"][k],
                                  np.sqrt(cfg.P_k))
        a.w_bar[k] = project_ball(state.beams.w_tilde[k]
                                  + kap * d["w_tilde"][k], np.sqrt(cfg.P_k))


def _phase_opt(b, old):
    """argmin over |x|=1 of -2 Re(conj(x) b); ties keep the old phase."""
    mag = abs(b)
    if mag < _TINY:
        return old
    return b / mag


def _update_B_tx(B, x, chain_target, frm_target):
    """Entrywise sweep for a copy appearing as ``chain_target ~ B @ x``."""
    r = chain_target - B @ x
    L, N = B.shape
    for l in range(L):
        for m in range(N):
            old = B[l, m]
            coeff = x[m]
            b = np.conj(coeff) * (r[l] + old * coeff) + frm_target[l, m]
            new = _phase_opt(b, old)
            if new != old:
                r[l] += (old - new) * coeff
                B[l, m] = new


def _update_B_rx(B, ys, chain_targets, frm_target):
    """Sweep for a copy appearing as ``chain_targets[j] ~ B^H @ ys[j]``."""
    rs = [chain_targets[j] - B.conj().T @ ys[j] for j in range(len(ys))]
    L, N = B.shape
    for l in range(L):
        for n in range(N):
            old = B[l, n]
            b = frm_target[l, n]
            for j, y in enumerate(ys):
                c1 = rs[j][n] + np.conj(old) * y[l]
                b += y[l] * np.conj(c1)
            new = _phase_opt(b, old)
            if new != old:
                for j, y in enumerate(ys):
                    rs[j][n] += (np.conj(old) - np.conj(new)) * y[l]
                B[l, n] = new


def _update_B_row(B, gs, chain_targets, frm_target):
    """Sweep for a copy appearing as ``chain_targets[j] ~ gs[j] @ B``."""
    rs = [chain_targets[j] - gs[j] @ B for j in range(len(gs))]
    L, N = B.shape
    for l in range(L):
        for n in range(N):
            old = B[l, n]
            b = frm_target[l, n]
            for j, g in enumerate(gs):
                c1 = rs[j][n] + g[l] * old
                b += np.conj(g[l]) * c1
            new = _phase_opt(b, old)
            if new != old:
                for j, g in enumerate(gs):
                    rs[j][n] += (old - new) * g[l]
                B[l, n] = new


def update_chi2(state: PddState) -> None:
    """One exact coordinate pass over every field-response copy entry."""
    a, b, d, g = state.aux, state.beams, state.duals, state.instance.gains
    kap, K = state.kappa, state.cfg.K
    frms = state.true_frms()
    for j in range(K):
        _update_B_tx(a.B[f"t:{j}"], b.w[j], a.mu[j] + kap * d["mu"][j],
                     frms[f"t:{j}"] + kap * d[f"frm:t:{j}"])
        _update_B_tx(a.B[f"ttil:{j}"], b.w_tilde[j],
                     a.omega[j] + kap * d["omega"][j],
                     frms[f"ttil:{j}"] + kap * d[f"frm:ttil:{j}"])
    _update_B_rx(a.B["ur"], [g.sigma_up[j] * a.mu[j] for j in range(K)],
                 [a.mu_t[j] + kap * d["mu_t"][j] for j in range(K)],
                 frms["ur"] + kap * d["frm:ur"])
    for k in range(K):
        _update_B_rx(a.B[f"tbar:{k}"],
                     [g.sigma_d2d[k, j] * a.omega[j] for j in range(K)],
                     [a.omega_t[k, j] + kap * d["omega_t"][k, j]
                      for j in range(K)],
                     frms[f"tbar:{k}"] + kap * d[f"frm:tbar:{k}"])
    _update_B_row(a.B["ut"],
                  [a.v_b[k].conj() * g.sigma_rb for k in range(K)],
                  [a.v_bt[k] + kap * d["v_bt"][k] for k in range(K)],
                  frms["ut"] + kap * d["frm:ut"])
    # BS copy couples all combiners through v_b ~ B q_k.
    B_rb = a.B["rb"]
    rs = [a.v_b[k] + kap * d["v_b"][k] - B_rb @ b.Q[:, k] for k in range(K)]
    T = frms["rb"] + kap * d["frm:rb"]
    L, N = B_rb.shape
    for l in range(L):
        for n in range(N):
            old = B_rb[l, n]
            bb = T[l, n]
            for k in range(K):
                coeff = b.Q[n, k]
                bb += np.conj(coeff) * (rs[k][l] + old * coeff)
            new = _phase_opt(bb, old)
            if new != old:
                for k in range(K):
                    rs[k][l] += (old - new) * b.Q[n, k]
                B_rb[l, n] = new


def update_chi3(state: PddState) -> None:
    """Rate/latency bound-copy pairs (joint product-set projections), the
    edge-compute bound copy, and the offload ratio."""
    cfg, a, d, kap = state.cfg, state.aux, state.duals, state.kappa
    la = state.la_eff
    for k in range(cfg.K):
        a.C_bar[k], a.t_u_k_t[k] = hyperbola_projection(
            a.C[k] + kap * d["C_bar"][k],
            a.t_u_k[k] + kap * d["t_u_k"][k],
            a.rho_bar * la, C_FLOOR)
        a.Ct_check[k], a.t_d_k_t[k] = hyperbola_projection(
            a.Ct[k] + kap * d["Ct_check"][k],
            a.t_d_k[k] + kap * d["t_d_k"][k],
            cfg.alpha_comp * (1.0 - a.rho_tilde) * la, C_FLOOR)
        ub = a.rho_check * la / a.C_hat[k]
        a.t_c_k_t[k] = min(a.t_c_k[k] + kap * d["t_c_k"][k], ub)

    a.t_d_tilde = max(a.t_d + kap * d["t_d_tilde"],
                      a.rho_hat * cfg.L_a / cfg.F_E)

    if state.rho_fixed is None:
        # rho moves jointly with the compute-cover splits t_c so the cover
        # constraint cannot pin the pair.
        rho_targets = np.array([a.rho_hat - kap * d["rho_hat"],
                                a.rho_tilde - kap * d["rho_tilde"],
                                a.rho_bar - kap * d["rho_bar"],
                                a.rho_check - kap * d["rho_check"]])
        a.rho, a.t_c_k = rho_cover_update(
            rho_targets, a.t_c_k_t - kap * d["t_c_k"],
            cfg.L_a / cfg.F_local)


def update_chi4(state: PddState) -> None:
    """Pair-difference copies: least squares onto the spacing halfspace."""
    if state.positions_frozen:
        return
    a, d, kap = state.aux, state.duals, state.kappa
    D = state.positions.D_min
    for region, v in state.region_items():
        pairs = pair_list(v.shape[1])
        if not pairs:
            continue
        anchors = state.anchors.vdiff[region]
        lam = d[f"vdiff:{region}"]
        for idx, (o1, o2) in enumerate(pairs):
            m = (v[:, o1] - v[:, o2]) - kap * lam[idx]
            anc = anchors[idx]
            nrm = np.linalg.norm(anc)
            if nrm < 1e-12:
                anc = v[:, o1] - v[:, o2]
                nrm = np.linalg.norm(anc)
                anchors[idx] = anc
            if nrm < 1e-12:
                a.vdiff[region][idx] = m
                continue
            a.vdiff[region][idx] = halfspace_ls(m, anc / nrm, D)


def update_chi5(state: PddState) -> None:
    """Uplink SINR coupling block per UE with multiplier bisection.

    If the incumbent already satisfies the refreshed cut and beats the
    bisection output (possible near stationarity, where the multiplier
    tolerance exceeds the remaining descent), the incumbent is kept.
    """
    cfg, a, d, kap = state.cfg, state.aux, state.duals, state.kappa

    def subobj(k, x, u, eta, g_target, lam_x, e):
        val = np.linalg.norm(u - g_target) ** 2 + (eta - e) ** 2
        s = a.mu_t @ u
        val += float(np.sum(np.abs(x - s + lam_x) ** 2))
        return val

    def cut_value(k, x, u, eta, p, eta_p, rq):
        interf = sum(abs(x[j]) ** 2 for j in range(cfg.K) if j != k)
        surr = (2.0 * (np.conj(p) * x[k]).real / eta_p
                - abs(p) ** 2 * eta / eta_p ** 2)
        return (interf + cfg.sigma2_r * np.linalg.norm(u) ** 2 + rq - surr)

    for k in range(cfg.K):
        g_target = a.v_bt[k] @ state.beams.F - kap * d["u_vec"][k]
        lam_x = kap * d["u_scal"][k]
        e = a.eta[k] + kap * d["eta"][k]
        p = state.anchors.ukk[k]
        eta_p = state.anchors.eta_t[k]
        rq = cfg.sigma2_b * np.linalg.norm(state.beams.Q[:, k]) ** 2
        enforce = abs(p) ** 2 / eta_p ** 2 > _ANCHOR_EPS
        x, u, eta, _ = sinr_coupled_block(
            a.mu_t, k, g_target, lam_x, e, p, eta_p, cfg.sigma2_r, rq,
            enforce=enforce)
        if enforce:
            old = (a.u_scal[k].copy(), a.u_vec[k].copy(), a.eta_t[k])
            old_feasible = cut_value(k, *old, p, eta_p, rq) <= 0.0
            if old_feasible and (subobj(k, *old, g_target, lam_x, e)
                                 <= subobj(k, x, u, eta, g_target, lam_x, e)):
                continue
        a.u_scal[k] = x
        a.u_vec[k] = u
        a.eta_t[k] = eta


def update_barchi1(state: PddState) -> None:
    """Relay matrix, rho copies, latency variables, rates, chain heads."""
    cfg, a, b, d = state.cfg, state.aux, state.beams, state.duals
    kap, K, la = state.kappa, cfg.K, state.la_eff
    g = state.instance.gains

    # relay matrix F: consensus with F_t plus the K chain terms u_vec ~ v_bt F
    A = np.eye(cfg.N_t, dtype=complex)
    rhs = a.F_t - kap * d["F"]
    for k in range(K):
        A += np.outer(a.v_bt[k].conj(), a.v_bt[k])
        rhs += np.outer(a.v_bt[k].conj(), a.u_vec[k] + kap * d["u_vec"][k])
    b.F = np.linalg.solve(A, rhs)

    if state.rho_fixed is None:
        # Each ratio copy moves jointly with the latency copies its bound
        # couples to, so a binding bound cannot pin either side alone.
        zeros = np.zeros(K)
        r, t = ratio_copy_update(
            a.rho + kap * d["rho_hat"],
            np.array([a.t_d + kap * d["t_d_tilde"]]),
            np.array([cfg.L_a / cfg.F_E]), np.array([0.0]), "ge")
        a.rho_hat, a.t_d_tilde = r, float(t[0])
        r, t = ratio_copy_update(a.rho + kap * d["rho_bar"],
                                 a.t_u_k + kap * d["t_u_k"],
                                 la / a.C_bar, zeros, "ge")
        a.rho_bar, a.t_u_k_t = r, t
        gcoef = cfg.alpha_comp * la / a.Ct_check
        r, t = ratio_copy_update(a.rho + kap * d["rho_tilde"],
                                 a.t_d_k + kap * d["t_d_k"],
                                 -gcoef, gcoef, "ge")
        a.rho_tilde, a.t_d_k_t = r, t
        r, t = ratio_copy_update(a.rho + kap * d["rho_check"],
                                 a.t_c_k + kap * d["t_c_k"],
                                 la / a.C_hat, zeros, "le")
        a.rho_check, a.t_c_k_t = r, t

    a.t_d = 0.5 * (a.t_d_k.sum() + a.t_d_tilde
                   - kap * (d["t_d_hat"] + d["t_d_tilde"]) - kap)
    a.t_u = a.t_u_k.sum() - kap * d["t_u_tilde"] - kap
    a.t_d_k = coupled_sum_quadratic(a.t_d_k_t - kap * d["t_d_k"],
                                    a.t_d + kap * d["t_d_hat"])
    a.t_u_k = coupled_sum_quadratic(a.t_u_k_t - kap * d["t_u_k"],
                                    a.t_u + kap * d["t_u_tilde"])
    lower = 0.0
    if state.rho_fixed != 0.0:
        lower = (1.0 - a.rho) * cfg.L_a / cfg.F_local
    a.t_c_k = shift_to_sum_atleast(a.t_c_k_t - kap * d["t_c_k"], lower)

    for k in range(K):
        targets = np.array([a.C_hat[k] - kap * d["C_hat"][k],
                            a.C_bar[k] - kap * d["C_bar"][k]])
        a.C[k], a.eta[k] = rate_hypograph_update(
            targets, a.eta_t[k] - kap * d["eta"][k])
        a.Ct[k], a.eta_hat[k] = rate_hypograph_update(
            np.array([a.Ct_check[k] - kap * d["Ct_check"][k]]),
            a.eta_bar[k] - kap * d["eta_hat"][k])

    B_r = a.B["ur"]
    BrBrH = B_r @ B_r.conj().T
    for k in range(K):
        Dg = g.sigma_up[k]
        A = np.eye(cfg.L, dtype=complex) + (Dg.conj()[:, None] * BrBrH
                                            * Dg[None, :])
        rhs = (a.B[f"t:{k}"] @ b.w[k] - kap * d["mu"][k]
               + Dg.conj() * (B_r @ (a.mu_t[k] + kap * d["mu_t"][k])))
        a.mu[k] = np.linalg.solve(A, rhs)

    M = g.sigma_rb[:, None] * a.B["ut"]
    A_vb = np.eye(cfg.L_tilde, dtype=complex) + M @ M.conj().T
    for k in range(K):
        rhs = (a.B["rb"] @ b.Q[:, k] - kap * d["v_b"][k]
               + M @ np.conj(a.v_bt[k] + kap * d["v_bt"][k]))
        a.v_b[k] = np.linalg.solve(A_vb, rhs)

    for k in range(K):
        Bt = a.B[f"t:{k}"]
        A = np.eye(cfg.N_u, dtype=complex) + Bt.conj().T @ Bt
        rhs = (a.w_hat[k] - kap * d["w"][k]
               + Bt.conj().T @ (a.mu[k] + kap * d["mu"][k]))
        b.w[k] = np.linalg.solve(A, rhs)


def _position_objective(v, phases_scale, dirs, hterm, z, pair_terms):
    """True AL terms owned by one antenna at position v."""
    theta = phases_scale * (dirs @ v + hterm)
    val = float(np.sum(np.abs(np.exp(1j * theta) - z) ** 2))
    for (sign, other, target) in pair_terms:
        val += float(np.sum((target - sign * (v - other)) ** 2))
    return val


def update_barchi2(state: PddState) -> None:
    """Per-antenna position update: box QP on the phase-matched quadratic
    model, kept only when the true AL terms do not increase."""
    if state.positions_frozen:
        return
    a, d, kap = state.aux, state.duals, state.kappa
    lam = state.instance.config.wavelength
    scale = 2.0 * np.pi / lam
    geom = state.instance.geometry
    for region in region_keys(state.cfg.K):
        fk = frm_key_for_region(region)
        dirs, hterm = geom.family(fk)
        v = state.positions.sets[region]
        n = v.shape[1]
        pairs = pair_list(n)
        Z = a.B[fk] - kap * d[f"frm:{fk}"]
        M_phase = scale ** 2 * dirs.T @ dirs
        for o in range(n):
            cur = v[:, o].copy()
            # pair-consensus terms this antenna participates in
            pair_terms = []
            for idx, (o1, o2) in enumerate(pairs):
                tgt = a.vdiff[region][idx] + kap * d[f"vdiff:{region}"][idx]
                if o1 == o:
                    pair_terms.append((1.0, v[:, o2].copy(), tgt))
                elif o2 == o:
                    pair_terms.append((-1.0, v[:, o1].copy(), tgt))
            z = Z[:, o]
            theta_cur = scale * (dirs @ cur + hterm)
            dpsi = np.angle(z) - theta_cur
            psi = theta_cur + np.mod(dpsi + np.pi, 2.0 * np.pi) - np.pi
            M = M_phase + len(pair_terms) * np.eye(2) + 1e-9 * np.eye(2)
            rhs = scale * dirs.T @ (psi - scale * hterm) + 1e-9 * cur
            for (sign, other, tgt) in pair_terms:
                rhs += other + sign * tgt
            cand = position_box_qp(M, rhs, 0.0, state.positions.side)
            j_cur = _position_objective(cur, scale, dirs, hterm, z,
                                        pair_terms)
            best, j_best = cur, j_cur
            step = cand - cur
            for frac in (1.0, 0.5, 0.25, 0.125):
                trial = cur + frac * step
                j_t = _position_objective(trial, scale, dirs, hterm, z,
                                          pair_terms)
                if j_t < j_best - 1e-15:
                    best, j_best = trial, j_t
                    break
            v[:, o] = best


def update_barbarchi1(state: PddState) -> None:
    """D2D beams, chain middles mu_t and v_bt, and the C_hat copy."""
    cfg, a, b, d = state.cfg, state.aux, state.beams, state.duals
    kap, K, la = state.kappa, cfg.K, state.la_eff
    g = state.instance.gains

    for k in range(K):
        Bt = a.B[f"ttil:{k}"]
        A = np.eye(cfg.N_u, dtype=complex) + Bt.conj().T @ Bt
        rhs = (a.w_bar[k] - kap * d["w_tilde"][k]
               + Bt.conj().T @ (a.omega[k] + kap * d["omega"][k]))
        b.w_tilde[k] = np.linalg.solve(A, rhs)

    A_mu = np.eye(cfg.N_r, dtype=complex)
    for k in range(K):
        A_mu += np.outer(a.u_vec[k].conj(), a.u_vec[k])
    for j in range(K):
        rhs = (a.B["ur"].conj().T @ (g.sigma_up[j] * a.mu[j])
               - kap * d["mu_t"][j])
        for k in range(K):
            rhs += a.u_vec[k].conj() * (a.u_scal[k, j]
                                        + kap * d["u_scal"][k, j])
        a.mu_t[j] = np.linalg.solve(A_mu, rhs)

    A_vbt = np.eye(cfg.N_t, dtype=complex) + b.F.conj() @ b.F.T
    M = g.sigma_rb[:, None] * a.B["ut"]
    for k in range(K):
        c1 = a.v_b[k].conj() @ M - kap * d["v_bt"][k]
        c2 = a.u_vec[k] + kap * d["u_vec"][k]
        a.v_bt[k] = np.linalg.solve(A_vbt, c1 + b.F.conj() @ c2)

    for k in range(K):
        target = a.C[k] + kap * d["C_hat"][k]
        if a.t_c_k_t[k] > _TINY:
            target = min(target, a.rho_check * la / a.t_c_k_t[k])
        a.C_hat[k] = max(target, C_FLOOR)


def update_barbarchi2(state: PddState) -> None:
    """BS combiners: least squares onto the SINR-cut norm ball."""
    cfg, a, b, d = state.cfg, state.aux, state.beams, state.duals
    kap = state.kappa
    for k in range(cfg.K):
        p = state.anchors.ukk[k]
        eta_p = state.anchors.eta_t[k]
        surr = (2.0 * (np.conj(p) * a.u_scal[k, k]).real / eta_p
                - abs(p) ** 2 * a.eta_t[k] / eta_p ** 2)
        interf = sum(abs(a.u_scal[k, j]) ** 2
                     for j in range(cfg.K) if j != k)
        R = surr - interf - cfg.sigma2_r * np.linalg.norm(a.u_vec[k]) ** 2
        radius = np.sqrt(max(R, 0.0) / cfg.sigma2_b)
        c = a.v_b[k] + kap * d["v_b"][k]
        q_new = norm_constrained_lstsq(a.B["rb"], c, radius)
        q_old = b.Q[:, k]
        if (np.linalg.norm(q_old) <= radius
                and np.linalg.norm(c - a.B["rb"] @ q_old)
                <= np.linalg.norm(c - a.B["rb"] @ q_new)):
            continue
        b.Q[:, k] = q_new


def update_barbarchi4(state: PddState) -> None:
    """D2D SINR coupling per pair, then the omega chain least squares."""
    cfg, a, b, d = state.cfg, state.aux, state.beams, state.duals
    kap, K = state.kappa, cfg.K
    g = state.instance.gains

    def subobj(k, y, eta, C, e):
        return (float(np.sum(np.abs(y - C) ** 2)) + (eta - e) ** 2)

    def cut_value(k, y, eta, p, eta_p):
        interf = sum(np.linalg.norm(y[j]) ** 2 for j in range(K) if j != k)
        surr = (2.0 * np.vdot(p, y[k]).real / eta_p
                - np.vdot(p, p).real * eta / eta_p ** 2)
        return interf + cfg.sigma2_d - surr

    for k in range(K):
        Bk = a.B[f"tbar:{k}"]
        C = np.stack([Bk.conj().T @ (g.sigma_d2d[k, j] * a.omega[j])
                      - kap * d["omega_t"][k, j] for j in range(K)])
        e = a.eta_hat[k] + kap * d["eta_hat"][k]
        p = state.anchors.omkk[k]
        eta_p = state.anchors.eta_bar[k]
        enforce = float(np.vdot(p, p).real) / eta_p ** 2 > _ANCHOR_EPS
        y, eta, _ = d2d_sinr_block(C, k, e, p, eta_p, cfg.sigma2_d,
                                   enforce=enforce)
        if enforce:
            old = (a.omega_t[k].copy(), a.eta_bar[k])
            if (cut_value(k, *old, p, eta_p) <= 0.0
                    and subobj(k, *old, C, e) <= subobj(k, y, eta, C, e)):
                continue
        a.omega_t[k] = y
        a.eta_bar[k] = eta

    for j in range(K):
        A = np.eye(cfg.L_bar, dtype=complex)
        rhs = (a.B[f"ttil:{j}"] @ b.w_tilde[j] - kap * d["omega"][j])
        for k in range(K):
            Mkj = a.B[f"tbar:{k}"].conj().T * g.sigma_d2d[k, j][None, :]
            A += Mkj.conj().T @ Mkj
            rhs += Mkj.conj().T @ (a.omega_t[k, j]
                                   + kap * d["omega_t"][k, j])
        a.omega[j] = np.linalg.solve(A, rhs)


BLOCK_SEQUENCE = [
    ("chi1", update_chi1),
    ("chi2", update_chi2),
    ("chi3", update_chi3),
    ("chi4", update_chi4),
    ("chi5", update_chi5),
    ("barchi1", update_barchi1),
    ("barchi2", update_barchi2),
    ("barbarchi1", update_barbarchi1),
    ("barbarchi2", update_barbarchi2),
    ("barbarchi4", update_barbarchi4),
]

_POSITION_BLOCKS = {"chi2", "chi4", "barchi2"}


def active_blocks(state: PddState):
    for name, fn in BLOCK_SEQUENCE:
        if state.positions_frozen and name in _POSITION_BLOCKS:
            continue
        yield name, fn
