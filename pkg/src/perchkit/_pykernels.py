"""Pure-Python plant kernels.

Reference implementation of the hot loops; ``_ckernels`` (Cython) exposes the
same functions with the same signatures. Parameters arrive as the flat array
built by :func:`perchkit.params.pack`.
"""

import math

from .errors import EnvelopeError, ModelRangeError, SingularityError, TrimNotFoundError

# packed-array offsets; must match params.layout()
X_A, X_T, C, C_T, S, S_T, B, I_Y, M, G, RHO = range(11)
LW, LWC, DW, MW = 11, 18, 25, 32
LT, DT, MT, TS = 38, 40, 43, 45
LWR, DWR = 47, 52
LB, DB = 55, 56

LAYOUT = {
    "theta_Lw": LW,
    "theta_Lw_check": LWC,
    "theta_Dw": DW,
    "theta_Mw": MW,
    "theta_Lt": LT,
    "theta_Dt": DT,
    "theta_Mt": MT,
    "theta_S": TS,
    "theta_Lw_red": LWR,
    "theta_Dw_red": DWR,
    "body_lift": LB,
    "body_drag": DB,
}

HALF_PI = 0.5 * math.pi
K_LIMIT = 2.0

# plant aerodynamic models
FULL_AERO = 0
DESIGN_AERO = 1

N_LOADS = 13


def stall(p, alpha):
    arg = p[TS] * alpha + p[TS + 1]
    if not -HALF_PI < arg < HALF_PI:
        raise EnvelopeError(alpha)
    c = math.cos(arg)
    return c * c * c


def wing_full(p, alpha, k):
    """Full-model scalars (CL_mean_pre_stall, CL_check_pre_stall, CD, CM)."""
    a2 = alpha * alpha
    k2 = k * k
    ak = alpha * k
    k3 = k2 * k
    cl = p[LW] + p[LW + 1] * alpha + p[LW + 2] * k + p[LW + 3] * a2 + p[LW + 4] * k2 + p[LW + 5] * ak + p[LW + 6] * k3
    clc = (
        p[LWC] + p[LWC + 1] * alpha + p[LWC + 2] * k + p[LWC + 3] * a2 + p[LWC + 4] * k2 + p[LWC + 5] * ak + p[LWC + 6] * k3
    )
    cd = p[DW] + p[DW + 1] * alpha + p[DW + 2] * k + p[DW + 3] * a2 + p[DW + 4] * k2 + p[DW + 5] * ak + p[DW + 6] * k3
    cm = p[MW] + p[MW + 1] * alpha + p[MW + 2] * k + p[MW + 3] * a2 + p[MW + 4] * k2 + p[MW + 5] * ak
    return cl, clc, cd, cm


def lift_reduced(p, alpha, k):
    return p[LWR] + p[LWR + 1] * alpha + p[LWR + 2] * alpha * alpha + p[LWR + 3] * k * k + p[LWR + 4] * alpha * k


def drag_reduced(p, alpha, k):
    k2 = k * k
    return p[DWR] + p[DWR + 1] * alpha * alpha + p[DWR + 2] * k2 * k2


def loads(p, V, alpha, alpha_t, k, delta_e, s_flap, averaged, model, out):
    """Fill ``out[0:13]`` with the load breakdown.

    Order: L_w(t), mean L_w, L_w amplitude, D_w, M_w, L_t, D_t, M_t,
    F_X, F_Z, F_M, L_b, D_b.
    """
    if not k < K_LIMIT:
        raise ModelRangeError(k)
    mu = stall(p, alpha)
    qw = 0.5 * p[RHO] * V * V * p[S]
    qt = 0.5 * p[RHO] * V * V * p[S_T]
    cl, clc, cd, cm = wing_full(p, alpha, k)
    if model == DESIGN_AERO:
        lw = qw * lift_reduced(p, alpha, k) * mu
        dw = qw * drag_reduced(p, alpha, k)
        mw = 0.0
    else:
        lw = qw * cl * mu
        dw = qw * cd
        mw = qw * p[C] * cm
    lwc = 0.0 if averaged else qw * clc * mu
    lwt = lw + lwc * s_flap
    ut = alpha_t + delta_e
    lt = qt * p[LT] * math.sin(p[LT + 1] * ut)
    if model == DESIGN_AERO:
        dt = 0.0
        mt = 0.0
    else:
        dt = qt * (p[DT] - p[DT + 1] * math.cos(p[DT + 2] * ut))
        mt = qt * p[C_T] * p[MT] * math.sin(p[MT + 1] * ut)
    lb = qw * p[LB]
    db = qw * p[DB]
    if model == DESIGN_AERO:
        fx = -dw - db
        fz = lwt + lb
        # control-design moment: unit tail arm, no wing pitching moment
        fm = lwt * p[X_A] * math.cos(alpha) - lt
    else:
        da = alpha_t - alpha
        sda = math.sin(da)
        cda = math.cos(da)
        fx = -dw + lt * sda - dt * cda - db
        fz = lwt + lt * cda + dt * sda + lb
        fm = (
            lwt * p[X_A] * math.cos(alpha)
            + dw * p[X_A] * math.sin(alpha)
            + mw
            - lt * p[X_T] * math.cos(alpha_t)
            - dt * p[X_T] * math.sin(alpha_t)
            + mt
        )
    out[0] = lwt
    out[1] = lw
    out[2] = lwc
    out[3] = dw
    out[4] = mw
    out[5] = lt
    out[6] = dt
    out[7] = mt
    out[8] = fx
    out[9] = fz
    out[10] = fm
    out[11] = lb
    out[12] = db


def derivative(p, y, f, delta_e, s_flap, averaged, model, v_floor, out):
    """Longitudinal equations of motion; ``y = (x, z, theta, V, gamma, q)``."""
    theta = y[2]
    V = y[3]
    gamma = y[4]
    q = y[5]
    if not V > v_floor:
        raise SingularityError(V, v_floor)
    alpha = theta - gamma
    alpha_t = alpha + p[X_T] * q / V
    k = math.pi * f * p[C] / V
    ld = [0.0] * N_LOADS
    loads(p, V, alpha, alpha_t, k, delta_e, s_flap, averaged, model, ld)
    m = p[M]
    g = p[G]
    sg = math.sin(gamma)
    cg = math.cos(gamma)
    out[0] = V * cg
    out[1] = V * sg
    out[2] = q
    out[3] = (ld[8] - m * g * sg) / m
    out[4] = (ld[9] - m * g * cg) / (m * V)
    out[5] = ld[10] / p[I_Y]


def euler(p, y0, f, delta_e, dt, phase0, phase_scale, averaged, model, v_floor, out):
    """Explicit Euler over ``len(f)`` steps; ``out`` has ``len(f) + 1`` rows of 6.

    The flapping phase is integrated as d(phase)/dt = 2*pi*phase_scale*f.
    Returns the final phase.
    """
    n = len(f)
    y = [float(v) for v in y0]
    d = [0.0] * 6
    for j in range(6):
        out[0][j] = y[j]
    phase = phase0
    two_pi = 2.0 * math.pi
    for i in range(n):
        derivative(p, y, f[i], delta_e[i], math.sin(phase), averaged, model, v_floor, d)
        for j in range(6):
            y[j] += dt * d[j]
            out[i + 1][j] = y[j]
        phase += two_pi * phase_scale * f[i] * dt
    return phase


def eta(p, alpha, V, gamma_r, gammadot_r, k):
    beta1 = p[RHO] * p[S] / (2.0 * p[M])
    return beta1 * V * stall(p, alpha) * lift_reduced(p, alpha, k) - p[G] * math.cos(gamma_r) / V - gammadot_r


def trim_alpha(p, V, gamma_r, gammadot_r, k, lo, hi, tol):
    """Bisection root of eta on [lo, hi]."""
    flo = eta(p, lo, V, gamma_r, gammadot_r, k)
    fhi = eta(p, hi, V, gamma_r, gammadot_r, k)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise TrimNotFoundError(f"eta has no sign change on [{lo:.4g}, {hi:.4g}] (V={V:.4g}, gamma_R={gamma_r:.4g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = eta(p, mid, V, gamma_r, gammadot_r, k)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
