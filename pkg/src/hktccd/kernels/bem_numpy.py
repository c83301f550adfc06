"""Pure-numpy BEM kernel: batched inflow-angle root solve.

Mirror of :mod:`hktccd.kernels.bem_numba`; both lanes implement the same
bracketed bisection/secant iteration so results agree to solver tolerance.
The batch is flattened over (operating point, blade section) and every
bracketing iteration evaluates the momentum/blade-element residual for the
whole batch at once.
"""

import numpy as np

BACKEND_NAME = "numpy"

PHI_EPS = 1e-6
PHI_TOL = 1e-13
RESID_TOL = 1e-12
MAX_ITER = 200
K_CRIT = 2.0 / 3.0  # axial induction 0.4 in k-space


def _closure(phi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
             polar_alpha, polar_cl, polar_cd):
    """Induction factors and force coefficients at inflow angle phi.

    phi..loss_c_hub are same-shaped arrays; loss_c_tip/hub are the geometry
    factors (B/2)*(R-r)/r and (B/2)*(r-hub)/r. Returns
    (resid, a, ap, cn, ct, F).
    """
    sphi = np.sin(phi)
    cphi = np.cos(phi)
    alpha_deg = np.degrees(phi - twist)
    cl = np.interp(alpha_deg, polar_alpha, polar_cl)
    cd = np.interp(alpha_deg, polar_alpha, polar_cd)
    cn = cl * cphi + cd * sphi
    ct = cl * sphi - cd * cphi

    saf = np.maximum(np.abs(sphi), 1e-9)
    ftip = np.minimum(loss_c_tip / saf, 500.0)
    fhub = np.minimum(loss_c_hub / saf, 500.0)
    F = (2.0 / np.pi) ** 2 * np.arccos(np.exp(-ftip)) * np.arccos(np.exp(-fhub))
    F = np.maximum(F, 1e-9)

    s2 = np.maximum(sphi * sphi, 1e-18)
    sc = sphi * cphi
    sc = np.where(np.abs(sc) < 1e-12, np.copysign(1e-12, sc + (sc == 0.0)), sc)
    k = sigma_p * cn / (4.0 * F * s2)
    kp = np.clip(sigma_p * ct / (4.0 * F * sc), -100.0, 0.9999)

    # windmill branch: plain momentum below the high-induction threshold,
    # Buhl empirical correction above it
    a_mom = k / np.where(np.abs(1.0 + k) < 1e-12, 1e-12, 1.0 + k)
    g1 = 2.0 * F * k - (10.0 / 9.0 - F)
    g2 = np.maximum(2.0 * F * k - (4.0 / 3.0 - F) * F, 0.0)
    g3 = 2.0 * F * k - (25.0 / 9.0 - 2.0 * F)
    sq = np.sqrt(g2)
    a_buhl = np.where(
        np.abs(g3) < 1e-6,
        1.0 - 1.0 / (2.0 * np.maximum(sq, 1e-12)),
        (g1 - sq) / np.where(np.abs(g3) < 1e-30, 1e-30, g3),
    )
    a_pos = np.where(k > K_CRIT, a_buhl, a_mom)
    a_pos = np.minimum(a_pos, 0.9999)
    # propeller-brake branch (phi <= 0)
    a_neg = np.where(k > 1.0, k / np.where(np.abs(k - 1.0) < 1e-12, 1e-12, k - 1.0), 0.0)

    pos = phi > 0.0
    a = np.where(pos, a_pos, a_neg)
    ap = kp / (1.0 - kp)

    resid_pos = sphi / np.maximum(1.0 - a, 1e-9) - cphi * (1.0 - kp) / lam_r
    resid_neg = sphi * (1.0 - k) - cphi * (1.0 - kp) / lam_r
    resid = np.where(pos, resid_pos, resid_neg)
    return resid, a, ap, cn, ct, F


def solve_sections(r, dr, chord, twist, n_blades, tip_radius, hub_radius,
                   v, omega, polar_alpha, polar_cl, polar_cd, rho,
                   omega_floor=1e-3):
    """Solve the BEM balance for every (operating point, section) pair.

    r, dr, chord, twist: section arrays (S,), twist in rad.
    v, omega: operating-point arrays (M,).
    Returns (phi, a, ap, dq, dthrust, status) each shaped (M, S).
    status: 0 = converged primary bracket, 1 = converged fallback bracket,
    2 = no sign change anywhere.
    """
    r = np.asarray(r, dtype=float)
    S = r.shape[0]
    v = np.atleast_1d(np.asarray(v, dtype=float))
    omega = np.maximum(np.atleast_1d(np.asarray(omega, dtype=float)), omega_floor)
    M = v.shape[0]

    rr = np.broadcast_to(r, (M, S)).ravel()
    tw = np.broadcast_to(np.asarray(twist, dtype=float), (M, S)).ravel()
    ch = np.broadcast_to(np.asarray(chord, dtype=float), (M, S)).ravel()
    vv = np.repeat(v, S)
    ww = np.repeat(omega, S)

    lam_r = ww * rr / vv
    sigma_p = n_blades * ch / (2.0 * np.pi * rr)
    lct = 0.5 * n_blades * (tip_radius - rr) / rr
    lch = 0.5 * n_blades * (rr - hub_radius) / rr

    def resid_at(phi):
        return _closure(phi, lam_r, sigma_p, tw, lct, lch,
                        polar_alpha, polar_cl, polar_cd)[0]

    n = rr.shape[0]
    lo = np.full(n, PHI_EPS)
    hi = np.full(n, np.pi / 2.0)
    flo = resid_at(lo)
    fhi = resid_at(hi)
    status = np.zeros(n, dtype=np.int8)

    # fallback brackets where the primary has no sign change
    bad = flo * fhi > 0.0
    if np.any(bad):
        for plo, phi_hi in ((-np.pi / 4.0, -PHI_EPS),
                            (np.pi / 2.0 + PHI_EPS, np.pi - PHI_EPS)):
            lo2 = np.full(n, plo)
            hi2 = np.full(n, phi_hi)
            f2lo = resid_at(lo2)
            f2hi = resid_at(hi2)
            take = bad & (f2lo * f2hi <= 0.0)
            lo[take] = lo2[take]
            hi[take] = hi2[take]
            flo[take] = f2lo[take]
            fhi[take] = f2hi[take]
            status[take] = 1
            bad = bad & ~take
    status[bad] = 2

    active = ~bad
    for it in range(MAX_ITER):
        width = hi - lo
        run = active & (width > PHI_TOL)
        if not np.any(run):
            break
        if it % 2 == 0:
            denom = fhi - flo
            ok = np.abs(denom) > 1e-300
            x = np.where(ok, hi - fhi * width / np.where(ok, denom, 1.0),
                         0.5 * (lo + hi))
            inside = (x > lo + 0.01 * width) & (x < hi - 0.01 * width)
            x = np.where(inside, x, 0.5 * (lo + hi))
        else:
            x = 0.5 * (lo + hi)
        fx = resid_at(x)
        done = run & (np.abs(fx) < RESID_TOL)
        left = flo * fx <= 0.0
        upd_hi = run & left & ~done
        upd_lo = run & ~left & ~done
        hi = np.where(upd_hi, x, hi)
        fhi = np.where(upd_hi, fx, fhi)
        lo = np.where(upd_lo, x, lo)
        flo = np.where(upd_lo, fx, flo)
        lo = np.where(done, x, lo)
        hi = np.where(done, x, hi)
        flo = np.where(done, fx, flo)
        fhi = np.where(done, fx, fhi)

    phi = np.where(np.abs(flo) <= np.abs(fhi), lo, hi)
    resid, a, ap, cn, ct, F = _closure(phi, lam_r, sigma_p, tw, lct, lch,
                                       polar_alpha, polar_cl, polar_cd)

    w2 = (vv * (1.0 - a)) ** 2 + (ww * rr * (1.0 + ap)) ** 2
    drr = np.broadcast_to(np.asarray(dr, dtype=float), (M, S)).ravel()
    dq = n_blades * 0.5 * rho * w2 * ch * ct * rr * drr
    dthr = n_blades * 0.5 * rho * w2 * ch * cn * drr
    dq = np.where(status == 2, np.nan, dq)
    dthr = np.where(status == 2, np.nan, dthr)

    shape = (M, S)
    return (phi.reshape(shape), a.reshape(shape), ap.reshape(shape),
            dq.reshape(shape), dthr.reshape(shape), status.reshape(shape))
