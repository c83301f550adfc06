"""Numba-jitted time-domain simulation kernel.

Mirror of :mod:`hktccd.kernels.sim_numpy`; keep the two lanes in lockstep.
Fixed-step RK4 on the single-state rotor dynamics with the fluid torque
read from a cubic-spline table of the torque coefficient versus tip speed
ratio (exact v^2 scaling makes the table one-dimensional).
"""

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

FLOW_CONSTANT = 0
FLOW_STEP = 1
FLOW_SINUSOID = 2

LAW_OPEN_LOOP = 0
LAW_LINEAR = 1
LAW_QUADRATIC = 2


@njit(cache=True)
def _flow(kind, p0, p1, p2, p3, scale, t):
    if kind == FLOW_CONSTANT:
        v = p0
    elif kind == FLOW_STEP:
        v = p0 + p1 / (1.0 + math.exp(-p3 * (t - p2)))
    else:
        v = p0 * math.sin(p1 * t + p2) + p3
    return v * scale


@njit(cache=True)
def _cq(lam, lam0, dlam, n_knots, c3, c2, c1, c0):
    lam_end = lam0 + (n_knots - 1) * dlam
    if lam < lam0:
        lam = lam0
    elif lam > lam_end:
        lam = lam_end
    idx = int((lam - lam0) / dlam)
    if idx > n_knots - 2:
        idx = n_knots - 2
    tt = lam - (lam0 + idx * dlam)
    return ((c3[idx] * tt + c2[idx]) * tt + c1[idx]) * tt + c0[idx]


@njit(cache=True)
def _torque(w, v, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0):
    lam = w * rtip / v
    return qfac * v * v * _cq(lam, lam0, dlam, n_knots, c3, c2, c1, c0)


@njit(cache=True)
def _sat_smooth(u, gamma, nu):
    s = 2.0 * u / gamma
    return 0.25 * gamma * (2.0 + math.sqrt(nu + s * s)
                           - math.sqrt(nu + (s - 2.0) * (s - 2.0)))


@njit(cache=True)
def _poly_eval(t, breaks, pc3, pc2, pc1, pc0):
    """Piecewise-polynomial control lookup, clamped to the table domain.

    Returns (value, clamped_flag).
    """
    nb = breaks.shape[0]
    clamped = 0
    if t <= breaks[0]:
        if t < breaks[0]:
            clamped = 1
        t = breaks[0]
    elif t >= breaks[nb - 1]:
        if t > breaks[nb - 1]:
            clamped = 1
        t = breaks[nb - 1]
    idx = np.searchsorted(breaks, t) - 1
    if idx < 0:
        idx = 0
    if idx > nb - 2:
        idx = nb - 2
    tt = t - breaks[idx]
    val = ((pc3[idx] * tt + pc2[idx]) * tt + pc1[idx]) * tt + pc0[idx]
    return val, clamped


@njit(cache=True)
def _law_u(law_kind, gain, wfb, t, breaks, pc3, pc2, pc1, pc0,
           sat_on, u_max, nu):
    clamped = 0
    if law_kind == LAW_OPEN_LOOP:
        raw, clamped = _poly_eval(t, breaks, pc3, pc2, pc1, pc0)
    elif law_kind == LAW_LINEAR:
        raw = gain * wfb
    else:
        raw = gain * wfb * wfb
    if sat_on:
        raw = _sat_smooth(raw, u_max, nu)
    return raw, clamped


@njit(cache=True)
def simulate_loop(omega0, n_steps, dt, inertia,
                  flow_kind, fp0, fp1, fp2, fp3, flow_scale,
                  lam0, dlam, n_knots, c3, c2, c1, c0, qfac, rtip,
                  law_kind, gain, sat_on, u_max, nu,
                  ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                  sensor_on, noise, fb0, fb1, fb2, fa1, fa2):
    """Returns (omega, u, q, p, stall, clamp_count, ok)."""
    n = n_steps + 1
    omega = np.empty(n)
    u_rec = np.empty(n)
    q_rec = np.empty(n)
    p_rec = np.empty(n)
    stall = np.zeros(n, dtype=np.uint8)
    clamp_count = 0
    ok = 1

    w = omega0
    # sensor filter state (direct form II transposed), primed so a constant
    # input passes through without a startup transient
    y0 = w + (noise[0] if sensor_on else 0.0)
    z2 = (fb2 - fa2) * y0
    z1 = (fb1 - fa1) * y0 + z2

    u_hold = 0.0
    for i in range(n):
        t = i * dt
        vi = _flow(flow_kind, fp0, fp1, fp2, fp3, flow_scale, t)
        if sensor_on and law_kind != LAW_OPEN_LOOP:
            y = w + noise[i]
            wbar = fb0 * y + z1
            z1 = fb1 * y - fa1 * wbar + z2
            z2 = fb2 * y - fa2 * wbar
            if wbar < 0.0:
                wbar = 0.0
            u_hold, cl = _law_u(law_kind, gain, wbar, t,
                                ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                                sat_on, u_max, nu)
            ui = u_hold
        else:
            ui, cl = _law_u(law_kind, gain, w, t,
                            ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                            sat_on, u_max, nu)
        clamp_count += cl
        qi = _torque(w, vi, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
        omega[i] = w
        u_rec[i] = ui
        q_rec[i] = qi
        p_rec[i] = qi * w

        if i == n_steps:
            break

        # one RK4 step; with the sensor on, the control is held over the step
        if sensor_on and law_kind != LAW_OPEN_LOOP:
            k1 = (qi - u_hold) / inertia
            w2s = w + 0.5 * dt * k1
            v2 = _flow(flow_kind, fp0, fp1, fp2, fp3, flow_scale, t + 0.5 * dt)
            k2 = (_torque(w2s, v2, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u_hold) / inertia
            w3s = w + 0.5 * dt * k2
            k3 = (_torque(w3s, v2, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u_hold) / inertia
            w4s = w + dt * k3
            v4 = _flow(flow_kind, fp0, fp1, fp2, fp3, flow_scale, t + dt)
            k4 = (_torque(w4s, v4, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u_hold) / inertia
        else:
            u1, _ = _law_u(law_kind, gain, w, t,
                           ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                           sat_on, u_max, nu)
            k1 = (qi - u1) / inertia
            th = t + 0.5 * dt
            v2 = _flow(flow_kind, fp0, fp1, fp2, fp3, flow_scale, th)
            w2s = w + 0.5 * dt * k1
            u2, _ = _law_u(law_kind, gain, w2s, th,
                           ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                           sat_on, u_max, nu)
            k2 = (_torque(w2s, v2, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u2) / inertia
            w3s = w + 0.5 * dt * k2
            u3, _ = _law_u(law_kind, gain, w3s, th,
                           ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                           sat_on, u_max, nu)
            k3 = (_torque(w3s, v2, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u3) / inertia
            te = t + dt
            v4 = _flow(flow_kind, fp0, fp1, fp2, fp3, flow_scale, te)
            w4s = w + dt * k3
            u4, _ = _law_u(law_kind, gain, w4s, te,
                           ol_breaks, ol_c3, ol_c2, ol_c1, ol_c0,
                           sat_on, u_max, nu)
            k4 = (_torque(w4s, v4, qfac, rtip, lam0, dlam, n_knots, c3, c2, c1, c0)
                  - u4) / inertia

        w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(w):
            ok = 0
            for j in range(i + 1, n):
                omega[j] = np.nan
                u_rec[j] = np.nan
                q_rec[j] = np.nan
                p_rec[j] = np.nan
            break
        if w < 0.0:
            w = 0.0
            stall[i + 1] = 1

    return omega, u_rec, q_rec, p_rec, stall, clamp_count, ok
