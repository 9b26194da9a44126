"""Closed-form solvers for the block subproblems of the inner loop.

Every function here is a pure, stateless minimizer of one convex subproblem
(quadratic penalty terms plus at most one affine or ball constraint), kept
separate from the solver state so each can be audited against an independent
convex oracle.
"""

from __future__ import annotations

import numpy as np


class MultiplierBracketError(RuntimeError):
    """Bracket expansion for a constraint multiplier search failed."""


def project_ball(x: np.ndarray, radius: float) -> np.ndarray:
    """Nearest point of {norm(y) <= radius} (Frobenius norm for matrices)."""
    nrm = np.linalg.norm(x)
    if nrm <= radius:
        return x.copy()
    return x * (radius / nrm)


def project_interval(target: float, lo: float, hi: float) -> float:
    """Minimizer of (x - target)^2 over [lo, hi]; empty interval keeps lo<=hi
    by collapsing onto the midpoint of the crossed bounds."""
    if lo > hi:
        return 0.5 * (lo + hi)
    return min(max(target, lo), hi)


def shift_to_sum(targets: np.ndarray, total: float) -> np.ndarray:
    """min sum (x_i - a_i)^2  s.t.  sum x_i = total."""
    a = np.asarray(targets, dtype=float)
    return a + (total - a.sum()) / a.size


def shift_to_sum_atleast(targets: np.ndarray, lower: float) -> np.ndarray:
    """min sum (x_i - a_i)^2  s.t.  sum x_i >= lower."""
    a = np.asarray(targets, dtype=float)
    gap = lower - a.sum()
    if gap <= 0.0:
        return a.copy()
    return a + gap / a.size


def coupled_sum_quadratic(targets: np.ndarray, S: float) -> np.ndarray:
    """min sum (x_i - a_i)^2 + (S - sum x_i)^2 (rank-one normal equations)."""
    a = np.asarray(targets, dtype=float)
    n = a.size
    sigma = (a.sum() + n * S) / (1.0 + n)
    return a + (S - sigma)


def halfspace_ls(m: np.ndarray, unit_dir: np.ndarray, D: float) -> np.ndarray:
    """min norm(x - m)^2  s.t.  unit_dir @ x >= D  (unit_dir normalized)."""
    m = np.asarray(m, dtype=float)
    gap = D - float(unit_dir @ m)
    if gap <= 0.0:
        return m.copy()
    return m + gap * unit_dir


def rate_pair_update(targets_C: np.ndarray, e_eta: float, offset: float,
                     slope: float):
    """min sum_i (C - a_i)^2 + (eta - e)^2  s.t.  C <= offset + slope*eta.

    Returns (C, eta, nu) with the active-set multiplier nu >= 0.
    """
    a = float(np.mean(targets_C))
    n = len(np.atleast_1d(targets_C))
    if a <= offset + slope * e_eta:
        return a, e_eta, 0.0
    nu = (a - slope * e_eta - offset) / (0.5 / n + 0.5 * slope ** 2)
    return a - nu / (2.0 * n), e_eta + 0.5 * nu * slope, nu


def hyperbola_projection(a: float, b: float, c: float,
                         x_floor: float = 1e-12):
    """min (x-a)^2 + (y-b)^2  s.t.  x*y >= c, x >= x_floor  (c >= 0).

    The feasible set {x*y >= c, x > 0} is convex.  An exterior point
    projects onto the boundary curve y = c/x, located by a bracketed root
    search on the curve-restricted derivative.  Returns (x, y).
    """
    from scipy.optimize import brentq

    if c <= 0.0:
        # x > 0 and x*y >= 0 degenerate to y >= 0
        return max(a, x_floor), max(b, 0.0)
    lo = x_floor
    cands = []
    xa = max(a, lo)
    if xa * b >= c:                       # product constraint slack
        cands.append((xa, b))
    cands.append((lo, max(b, c / lo)))    # floor active

    def dpsi(x):
        return (x - a) - (c / x - b) * c / x ** 2

    if dpsi(lo) < 0.0:                    # curve point right of the floor
        hi = c / b if b > 0.0 and c / b > lo else max(2.0 * lo, 1.0)
        for _ in range(300):
            if dpsi(hi) > 0.0:
                break
            hi *= 2.0
        else:
            raise MultiplierBracketError(
                "hyperbola projection bracket failed")
        x = brentq(dpsi, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
        cands.append((float(x), float(c / x)))
    x, y = min(cands, key=lambda p: (p[0] - a) ** 2 + (p[1] - b) ** 2)
    return x, y


def ratio_copy_update(target_r: float, b: np.ndarray, g: np.ndarray,
                      h: np.ndarray, sense: str, lo: float = 0.0,
                      hi: float = 1.0):
    """Joint update of a ratio copy r and its latency-bound copies t.

    Minimizes (r - target_r)^2 + sum_k (t_k - b_k)^2 subject to
    ``t_k >= g_k r + h_k`` (sense 'ge') or ``t_k <= g_k r + h_k``
    (sense 'le') and r in [lo, hi].  Eliminating t gives a convex piecewise
    quadratic in r, minimized exactly over its breakpoint segments.
    Returns (r, t).
    """
    b = np.asarray(b, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    sign = 1.0 if sense == "ge" else -1.0

    def gap(r):
        # positive part that enters the objective
        return np.maximum(0.0, sign * (g * r + h - b))

    breaks = [lo, hi]
    for k in range(b.size):
        if g[k] != 0.0:
            rk = (b[k] - h[k]) / g[k]
            if lo < rk < hi:
                breaks.append(rk)
    breaks = sorted(set(breaks))
    best_r, best_val = lo, np.inf
    for i in range(len(breaks) - 1):
        rl, rr = breaks[i], breaks[i + 1]
        rm = 0.5 * (rl + rr)
        active = sign * (g * rm + h - b) > 0.0
        # quadratic coefficients of (r-tr)^2 + sum_active (g r + h - b)^2
        A = 1.0 + float(np.sum(g[active] ** 2))
        Bc = -2.0 * target_r + 2.0 * float(np.sum(g[active]
                                                  * (h[active] - b[active])))
        rv = min(max(-Bc / (2.0 * A), rl), rr)
        for r_cand in (rv, rl, rr):
            val = (r_cand - target_r) ** 2 + float(np.sum(gap(r_cand) ** 2))
            if val < best_val - 1e-18 or (val < best_val + 1e-18
                                          and r_cand < best_r):
                best_r, best_val = r_cand, val
    t_bound = g * best_r + h
    t = np.maximum(b, t_bound) if sense == "ge" else np.minimum(b, t_bound)
    return float(best_r), t


def rho_cover_update(rho_targets: np.ndarray, tc_targets: np.ndarray,
                     Dhat: float):
    """Joint update of the offload ratio and the compute-cover splits.

    Minimizes sum_c (rho - rc)^2 + sum_k (t_k - a_k)^2 subject to
    sum_k t_k >= (1 - rho) * Dhat and rho in [0, 1].  Active sets of the
    single halfspace and the box are enumerated exactly.
    Returns (rho, t).
    """
    rho_targets = np.asarray(rho_targets, dtype=float)
    a = np.asarray(tc_targets, dtype=float)
    n_c, K = rho_targets.size, a.size
    mean_r = float(rho_targets.mean())

    def value(rho, t):
        return (float(np.sum((rho - rho_targets) ** 2))
                + float(np.sum((t - a) ** 2)))

    cands = []
    rho0 = min(max(mean_r, 0.0), 1.0)
    if a.sum() + Dhat * rho0 >= Dhat:
        cands.append((rho0, a.copy()))
    # halfspace active, box inactive
    m = (Dhat - a.sum() - Dhat * mean_r) / (K / 2.0 + Dhat ** 2 / (2.0 * n_c))
    if m > 0.0:
        rho_m = mean_r + m * Dhat / (2.0 * n_c)
        if 0.0 <= rho_m <= 1.0:
            cands.append((rho_m, a + m / 2.0))
    # box active
    for rho_b in (0.0, 1.0):
        cands.append((rho_b, shift_to_sum_atleast(a, Dhat * (1.0 - rho_b))))
    rho, t = min(cands, key=lambda p: value(*p))
    return float(rho), t


def rate_hypograph_update(targets_C: np.ndarray, e_eta: float):
    """min sum_i (C - a_i)^2 + (eta - e)^2  s.t.  C <= log2(1 + eta).

    The feasible set (hypograph of a concave function) is convex, so the
    exact minimizer is computed: either the unconstrained point or the
    boundary point C = log2(1 + eta) located by a bracketed root search on
    the boundary-restricted derivative.  Returns (C, eta).
    """
    from scipy.optimize import brentq

    a = float(np.mean(targets_C))
    n = len(np.atleast_1d(targets_C))
    if e_eta > -1.0 and a <= np.log2(1.0 + e_eta):
        return a, e_eta

    ln2 = np.log(2.0)

    def dpsi(eta):
        g = np.log2(1.0 + eta)
        return 2.0 * n * (g - a) / (ln2 * (1.0 + eta)) + 2.0 * (eta - e_eta)

    # KKT forces eta >= e on the active boundary; start there (or just above
    # the log singularity) where the derivative is negative.
    lo = max(e_eta, -1.0 + 1e-12)
    if dpsi(lo) >= 0.0:
        eta = lo
        return float(np.log2(1.0 + eta)), eta
    hi = max(2.0 * abs(lo) + 1.0, 1.0)
    for _ in range(200):
        if dpsi(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise MultiplierBracketError("rate hypograph bracket failed")
    eta = brentq(dpsi, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    return float(np.log2(1.0 + eta)), float(eta)


def position_box_qp(M: np.ndarray, rhs: np.ndarray, lo: float, hi: float):
    """Exact minimizer of 0.5 v^T M v - rhs @ v over the square [lo, hi]^2.

    M must be symmetric positive definite (2x2).  The minimum is either the
    interior stationary point or lies on the boundary; all edge minimizers
    and corners are enumerated exactly.
    """
    v = np.linalg.solve(M, rhs)
    if lo <= v[0] <= hi and lo <= v[1] <= hi:
        return v

    def J(p):
        return 0.5 * p @ M @ p - rhs @ p

    candidates = []
    for x_fixed in (lo, hi):
        y = (rhs[1] - M[1, 0] * x_fixed) / M[1, 1]
        candidates.append(np.array([x_fixed, min(max(y, lo), hi)]))
    for y_fixed in (lo, hi):
        x = (rhs[0] - M[0, 1] * y_fixed) / M[0, 0]
        candidates.append(np.array([min(max(x, lo), hi), y_fixed]))
    candidates += [np.array([a, b]) for a in (lo, hi) for b in (lo, hi)]
    vals = [J(p) for p in candidates]
    return candidates[int(np.argmin(vals))]


def norm_constrained_lstsq(B: np.ndarray, c: np.ndarray, radius: float,
                           tol: float = 1e-12, max_doublings: int = 60):
    """min norm(c - B q)^2  s.t.  norm(q) <= radius.

    Minimum-norm least squares when the bound is slack; otherwise a
    multiplier nu > 0 is bisected so that norm((B^H B + nu I)^-1 B^H c)
    meets the radius.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    q0 = np.linalg.lstsq(B, c, rcond=None)[0]
    if np.linalg.norm(q0) <= radius * (1.0 + 1e-12) or radius == 0.0:
        if radius == 0.0:
            return np.zeros_like(q0)
        return q0
    BhB = B.conj().T @ B
    d, V = np.linalg.eigh(BhB)
    z = V.conj().T @ (B.conj().T @ c)

    def norm_at(nu):
        return np.sqrt((np.abs(z) ** 2 / (d + nu) ** 2).sum())

    hi = 1.0
    for _ in range(max_doublings):
        if norm_at(hi) <= radius:
            break
        hi *= 2.0
    else:
        raise MultiplierBracketError("norm-ball multiplier bracket failed")
    lo_nu = 0.0
    for _ in range(200):
        mid = 0.5 * (lo_nu + hi)
        if norm_at(mid) > radius:
            lo_nu = mid
        else:
            hi = mid
        if hi - lo_nu <= tol * max(1.0, hi):
            break
    return V @ ((V.conj().T @ (B.conj().T @ c)) / (d + hi))


def sinr_coupled_block(M: np.ndarray, k: int, g: np.ndarray,
                       lam_x: np.ndarray, e: float, p: complex, eta_p: float,
                       s_r: float, rq: float, tol: float = 1e-10,
                       max_doublings: int = 60, enforce: bool = True):
    """Joint update of the uplink-SINR coupling block for one UE.

    Minimizes, over the per-UE scalars x_j, the combined row vector u and the
    SINR copy eta,

        sum_j |x_j - u @ M[j] + lam_x[j]|^2 + norm(u - g)^2 + (eta - e)^2

    subject to the linearized SINR feasibility cut

        sum_{j != k} |x_j|^2 + s_r*norm(u)^2 + rq
            - 2*Re(conj(p) x_k)/eta_p + |p|^2 eta/eta_p^2  <= 0.

    ``M[j]`` are the per-UE chain vectors, ``g`` the penalty target of u,
    ``lam_x`` the scaled duals of the x residuals, (p, eta_p) the expansion
    point.  Returns (x, u, eta, nu).
    """
    Kn = M.shape[0]
    others = [j for j in range(Kn) if j != k]
    Mc = M.conj()
    Phi = np.zeros((M.shape[1], M.shape[1]), dtype=complex)
    h1 = np.zeros(M.shape[1], dtype=complex)
    for j in others:
        Phi += np.outer(Mc[j], M[j])
        h1 += Mc[j] * lam_x[j]
    lam_ev, V = np.linalg.eigh(Phi)
    lam_ev = np.maximum(lam_ev, 0.0)
    h2 = Mc[k] * (p / eta_p)
    p2 = abs(p) ** 2

    def solve_at(nu):
        shrink = nu / (1.0 + nu)
        b = g + shrink * h1 + nu * h2
        denom = (1.0 + nu * s_r) + lam_ev * shrink
        u = V @ ((V.conj().T @ b) / denom)
        x = np.empty(Kn, dtype=complex)
        s = M @ u
        for j in others:
            x[j] = (s[j] - lam_x[j]) / (1.0 + nu)
        x[k] = s[k] - lam_x[k] + nu * p / eta_p
        eta = e - nu * p2 / (2.0 * eta_p ** 2)
        return x, u, eta

    def violation(nu):
        x, u, eta = solve_at(nu)
        val = (sum(abs(x[j]) ** 2 for j in others)
               + s_r * np.linalg.norm(u) ** 2 + rq
               - 2.0 * (np.conj(p) * x[k]).real / eta_p
               + p2 * eta / eta_p ** 2)
        return val, (x, u, eta)

    if not enforce:
        return (*solve_at(0.0), 0.0)
    q0, sol0 = violation(0.0)
    scale = max(1.0, abs(q0) + rq)
    if q0 <= 0.0:
        return (*sol0, 0.0)
    hi = 1.0
    for _ in range(max_doublings):
        qhi, solhi = violation(hi)
        if qhi <= 0.0:
            break
        hi *= 2.0
    else:
        raise MultiplierBracketError(
            "uplink SINR multiplier bracket expansion failed")
    lo = hi / 2.0 if hi > 1.0 else 0.0
    best = (hi, solhi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        qmid, solmid = violation(mid)
        if qmid > 0.0:
            lo = mid
        else:
            hi, best = mid, (mid, solmid)
        if abs(qmid) <= tol * scale or hi - lo <= 1e-16 * max(1.0, hi):
            if qmid <= 0.0:
                best = (mid, solmid)
            break
    nu, sol = best
    return (*sol, nu)


def d2d_sinr_block(C: np.ndarray, k: int, e: float, p: np.ndarray,
                   eta_p: float, noise: float, tol: float = 1e-10,
                   max_doublings: int = 60, enforce: bool = True):
    """Joint update of the D2D-SINR coupling block for one pair.

    Minimizes sum_j norm(y_j - C[j])^2 + (eta - e)^2 subject to

        sum_{j != k} norm(y_j)^2 + noise
            - 2*Re(<p, y_k>)/eta_p + norm(p)^2 eta/eta_p^2  <= 0.

    Returns (y, eta, nu).
    """
    Kn = C.shape[0]
    others = [j for j in range(Kn) if j != k]
    p2 = float(np.vdot(p, p).real)

    def solve_at(nu):
        y = C.copy()
        for j in others:
            y[j] = C[j] / (1.0 + nu)
        y[k] = C[k] + nu * p / eta_p
        eta = e - nu * p2 / (2.0 * eta_p ** 2)
        return y, eta

    def violation(nu):
        y, eta = solve_at(nu)
        val = (sum(np.linalg.norm(y[j]) ** 2 for j in others) + noise
               - 2.0 * np.vdot(p, y[k]).real / eta_p + p2 * eta / eta_p ** 2)
        return val, (y, eta)

    if not enforce:
        return (*solve_at(0.0), 0.0)
    q0, sol0 = violation(0.0)
    scale = max(1.0, abs(q0) + noise)
    if q0 <= 0.0:
        return (*sol0, 0.0)
    hi = 1.0
    for _ in range(max_doublings):
        qhi, solhi = violation(hi)
        if qhi <= 0.0:
            break
        hi *= 2.0
    else:
        raise MultiplierBracketError(
            "D2D SINR multiplier bracket expansion failed")
    lo = hi / 2.0 if hi > 1.0 else 0.0
    best = (hi, solhi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        qmid, solmid = violation(mid)
        if qmid > 0.0:
            lo = mid
        else:
            hi, best = mid, (mid, solmid)
        if abs(qmid) <= tol * scale or hi - lo <= 1e-16 * max(1.0, hi):
            if qmid <= 0.0:
                best = (mid, solmid)
            break
    nu, sol = best
    return (*sol, nu)
