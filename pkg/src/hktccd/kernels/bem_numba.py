"""Numba-jitted BEM kernel: scalar inflow-angle root solve per section.

Mirror of :mod:`hktccd.kernels.bem_numpy` (same brackets, same hybrid
bisection/secant schedule); kept in lockstep so the two lanes agree to
solver tolerance. Keep edits synchronized between the lanes.
"""

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

PHI_EPS = 1e-6
PHI_TOL = 1e-13
RESID_TOL = 1e-12
MAX_ITER = 200
K_CRIT = 2.0 / 3.0


@njit(cache=True)
def _closure_scalar(phi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                    polar_alpha, polar_cl, polar_cd):
    sphi = math.sin(phi)
    cphi = math.cos(phi)
    alpha_deg = math.degrees(phi - twist)
    cl = np.interp(alpha_deg, polar_alpha, polar_cl)
    cd = np.interp(alpha_deg, polar_alpha, polar_cd)
    cn = cl * cphi + cd * sphi
    ct = cl * sphi - cd * cphi

    saf = max(abs(sphi), 1e-9)
    ftip = min(loss_c_tip / saf, 500.0)
    fhub = min(loss_c_hub / saf, 500.0)
    F = (2.0 / np.pi) ** 2 * math.acos(math.exp(-ftip)) * math.acos(math.exp(-fhub))
    F = max(F, 1e-9)

    s2 = max(sphi * sphi, 1e-18)
    sc = sphi * cphi
    if abs(sc) < 1e-12:
        sc = 1e-12 if sc >= 0.0 else -1e-12
    k = sigma_p * cn / (4.0 * F * s2)
    kp = sigma_p * ct / (4.0 * F * sc)
    if kp > 0.9999:
        kp = 0.9999
    elif kp < -100.0:
        kp = -100.0

    if phi > 0.0:
        if k > K_CRIT:
            g1 = 2.0 * F * k - (10.0 / 9.0 - F)
            g2 = max(2.0 * F * k - (4.0 / 3.0 - F) * F, 0.0)
            g3 = 2.0 * F * k - (25.0 / 9.0 - 2.0 * F)
            sq = math.sqrt(g2)
            if abs(g3) < 1e-6:
                a = 1.0 - 1.0 / (2.0 * max(sq, 1e-12))
            else:
                d = g3 if abs(g3) >= 1e-30 else 1e-30
                a = (g1 - sq) / d
        else:
            d = 1.0 + k
            if abs(d) < 1e-12:
                d = 1e-12
            a = k / d
        if a > 0.9999:
            a = 0.9999
        ap = kp / (1.0 - kp)
        resid = sphi / max(1.0 - a, 1e-9) - cphi * (1.0 - kp) / lam_r
    else:
        if k > 1.0:
            d = k - 1.0
            if abs(d) < 1e-12:
                d = 1e-12
            a = k / d
        else:
            a = 0.0
        ap = kp / (1.0 - kp)
        resid = sphi * (1.0 - k) - cphi * (1.0 - kp) / lam_r
    return resid, a, ap, cn, ct, F


@njit(cache=True)
def _solve_one(lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
               polar_alpha, polar_cl, polar_cd):
    """Returns (phi, a, ap, cn, ct, status)."""
    lo = PHI_EPS
    hi = np.pi / 2.0
    flo = _closure_scalar(lo, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                          polar_alpha, polar_cl, polar_cd)[0]
    fhi = _closure_scalar(hi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                          polar_alpha, polar_cl, polar_cd)[0]
    status = 0
    if flo * fhi > 0.0:
        status = 1
        lo = -np.pi / 4.0
        hi = -PHI_EPS
        flo = _closure_scalar(lo, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                              polar_alpha, polar_cl, polar_cd)[0]
        fhi = _closure_scalar(hi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                              polar_alpha, polar_cl, polar_cd)[0]
        if flo * fhi > 0.0:
            lo = np.pi / 2.0 + PHI_EPS
            hi = np.pi - PHI_EPS
            flo = _closure_scalar(lo, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                                  polar_alpha, polar_cl, polar_cd)[0]
            fhi = _closure_scalar(hi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                                  polar_alpha, polar_cl, polar_cd)[0]
            if flo * fhi > 0.0:
                return np.nan, np.nan, np.nan, np.nan, np.nan, 2

    for it in range(MAX_ITER):
        width = hi - lo
        if width <= PHI_TOL:
            break
        if it % 2 == 0:
            denom = fhi - flo
            if abs(denom) > 1e-300:
                x = hi - fhi * width / denom
            else:
                x = 0.5 * (lo + hi)
            if not (lo + 0.01 * width < x < hi - 0.01 * width):
                x = 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
        fx = _closure_scalar(x, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
                             polar_alpha, polar_cl, polar_cd)[0]
        if abs(fx) < RESID_TOL:
            lo = x
            hi = x
            flo = fx
            fhi = fx
            break
        if flo * fx <= 0.0:
            hi = x
            fhi = fx
        else:
            lo = x
            flo = fx

    phi = lo if abs(flo) <= abs(fhi) else hi
    resid, a, ap, cn, ct, F = _closure_scalar(
        phi, lam_r, sigma_p, twist, loss_c_tip, loss_c_hub,
        polar_alpha, polar_cl, polar_cd)
    return phi, a, ap, cn, ct, status


@njit(cache=True)
def _solve_batch(r, dr, chord, twist, n_blades, tip_radius, hub_radius,
                 v, omega, polar_alpha, polar_cl, polar_cd, rho, omega_floor):
    M = v.shape[0]
    S = r.shape[0]
    phi = np.empty((M, S))
    a = np.empty((M, S))
    ap = np.empty((M, S))
    dq = np.empty((M, S))
    dthr = np.empty((M, S))
    status = np.zeros((M, S), dtype=np.int8)
    nb = float(n_blades)
    for m in range(M):
        vm = v[m]
        wm = max(omega[m], omega_floor)
        for s in range(S):
            rs = r[s]
            lam_r = wm * rs / vm
            sigma_p = nb * chord[s] / (2.0 * np.pi * rs)
            lct = 0.5 * nb * (tip_radius - rs) / rs
            lch = 0.5 * nb * (rs - hub_radius) / rs
            ph, aa, aap, cn, ct, st = _solve_one(
                lam_r, sigma_p, twist[s], lct, lch,
                polar_alpha, polar_cl, polar_cd)
            phi[m, s] = ph
            a[m, s] = aa
            ap[m, s] = aap
            status[m, s] = st
            if st == 2:
                dq[m, s] = np.nan
                dthr[m, s] = np.nan
            else:
                w2 = (vm * (1.0 - aa)) ** 2 + (wm * rs * (1.0 + aap)) ** 2
                dq[m, s] = nb * 0.5 * rho * w2 * chord[s] * ct * rs * dr[s]
                dthr[m, s] = nb * 0.5 * rho * w2 * chord[s] * cn * dr[s]
    return phi, a, ap, dq, dthr, status


def solve_sections(r, dr, chord, twist, n_blades, tip_radius, hub_radius,
                   v, omega, polar_alpha, polar_cl, polar_cd, rho,
                   omega_floor=1e-3):
    """Same contract as :func:`hktccd.kernels.bem_numpy.solve_sections`."""
    r = np.ascontiguousarray(r, dtype=float)
    dr = np.ascontiguousarray(dr, dtype=float)
    chord = np.ascontiguousarray(chord, dtype=float)
    twist = np.ascontiguousarray(twist, dtype=float)
    v = np.ascontiguousarray(np.atleast_1d(v), dtype=float)
    omega = np.ascontiguousarray(np.atleast_1d(omega), dtype=float)
    return _solve_batch(r, dr, chord, twist, float(n_blades),
                        float(tip_radius), float(hub_radius), v, omega,
                        np.ascontiguousarray(polar_alpha, dtype=float),
                        np.ascontiguousarray(polar_cl, dtype=float),
                        np.ascontiguousarray(polar_cd, dtype=float),
                        float(rho), float(omega_floor))
