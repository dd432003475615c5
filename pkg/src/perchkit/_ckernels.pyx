# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled plant kernels, signature-compatible with ``_pykernels``."""

from libc.math cimport sin, cos, M_PI

from .errors import EnvelopeError, ModelRangeError, SingularityError, TrimNotFoundError

cdef enum:
    X_A = 0
    X_T = 1
    C = 2
    C_T = 3
    S = 4
    S_T = 5
    I_Y = 7
    M = 8
    G = 9
    RHO = 10
    LW = 11
    LWC = 18
    DW = 25
    MW = 32
    LT = 38
    DT = 40
    MT = 43
    TS = 45
    LWR = 47
    DWR = 52
    LB = 55
    DB = 56
    N_LOADS_ = 13

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

FULL_AERO = 0
DESIGN_AERO = 1
N_LOADS = N_LOADS_
K_LIMIT = 2.0

cdef double HALF_PI = 0.5 * M_PI


cdef double _stall(const double[::1] p, double alpha) except? -2.0:
    cdef double arg = p[TS] * alpha + p[TS + 1]
    cdef double c
    if not (-HALF_PI < arg < HALF_PI):
        raise EnvelopeError(alpha)
    c = cos(arg)
    return c * c * c


cdef inline double _lift_reduced(const double[::1] p, double alpha, double k) noexcept nogil:
    return p[LWR] + p[LWR + 1] * alpha + p[LWR + 2] * alpha * alpha + p[LWR + 3] * k * k + p[LWR + 4] * alpha * k


cdef inline double _drag_reduced(const double[::1] p, double alpha, double k) noexcept nogil:
    cdef double k2 = k * k
    return p[DWR] + p[DWR + 1] * alpha * alpha + p[DWR + 2] * k2 * k2


cdef inline double _poly7(const double[::1] p, int o, double alpha, double k) noexcept nogil:
    return (p[o] + p[o + 1] * alpha + p[o + 2] * k + p[o + 3] * alpha * alpha + p[o + 4] * k * k
            + p[o + 5] * alpha * k + p[o + 6] * k * k * k)


cdef int _loads(const double[::1] p, double V, double alpha, double alpha_t, double k,
                double delta_e, double s_flap, int averaged, int model, double* out) except -1:
    cdef double mu, qw, qt, lw, dw, mw, lwc, lwt, ut, lt, dt, mt, lb, db, fx, fz, fm, da, sda, cda
    if not k < 2.0:
        raise ModelRangeError(k)
    mu = _stall(p, alpha)
    qw = 0.5 * p[RHO] * V * V * p[S]
    qt = 0.5 * p[RHO] * V * V * p[S_T]
    if model == 1:
        lw = qw * _lift_reduced(p, alpha, k) * mu
        dw = qw * _drag_reduced(p, alpha, k)
        mw = 0.0
    else:
        lw = qw * _poly7(p, LW, alpha, k) * mu
        dw = qw * _poly7(p, DW, alpha, k)
        mw = qw * p[C] * (p[MW] + p[MW + 1] * alpha + p[MW + 2] * k + p[MW + 3] * alpha * alpha
                          + p[MW + 4] * k * k + p[MW + 5] * alpha * k)
    if averaged:
        lwc = 0.0
    else:
        lwc = qw * _poly7(p, LWC, alpha, k) * mu
    lwt = lw + lwc * s_flap
    ut = alpha_t + delta_e
    lt = qt * p[LT] * sin(p[LT + 1] * ut)
    if model == 1:
        dt = 0.0
        mt = 0.0
    else:
        dt = qt * (p[DT] - p[DT + 1] * cos(p[DT + 2] * ut))
        mt = qt * p[C_T] * p[MT] * sin(p[MT + 1] * ut)
    lb = qw * p[LB]
    db = qw * p[DB]
    if model == 1:
        fx = -dw - db
        fz = lwt + lb
        fm = lwt * p[X_A] * cos(alpha) - lt
    else:
        da = alpha_t - alpha
        sda = sin(da)
        cda = cos(da)
        fx = -dw + lt * sda - dt * cda - db
        fz = lwt + lt * cda + dt * sda + lb
        fm = (lwt * p[X_A] * cos(alpha) + dw * p[X_A] * sin(alpha) + mw
              - lt * p[X_T] * cos(alpha_t) - dt * p[X_T] * sin(alpha_t) + mt)
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
    return 0


cdef int _derivative(const double[::1] p, const double* y, double f, double delta_e, double s_flap,
                     int averaged, int model, double v_floor, double* out) except -1:
    cdef double theta = y[2]
    cdef double V = y[3]
    cdef double gamma = y[4]
    cdef double q = y[5]
    cdef double alpha, alpha_t, k, m, g, sg, cg
    cdef double ld[N_LOADS_]
    if not V > v_floor:
        raise SingularityError(V, v_floor)
    alpha = theta - gamma
    alpha_t = alpha + p[X_T] * q / V
    k = M_PI * f * p[C] / V
    _loads(p, V, alpha, alpha_t, k, delta_e, s_flap, averaged, model, ld)
    m = p[M]
    g = p[G]
    sg = sin(gamma)
    cg = cos(gamma)
    out[0] = V * cg
    out[1] = V * sg
    out[2] = q
    out[3] = (ld[8] - m * g * sg) / m
    out[4] = (ld[9] - m * g * cg) / (m * V)
    out[5] = ld[10] / p[I_Y]
    return 0


def stall(const double[::1] p, double alpha):
    return _stall(p, alpha)


def lift_reduced(const double[::1] p, double alpha, double k):
    return _lift_reduced(p, alpha, k)


def drag_reduced(const double[::1] p, double alpha, double k):
    return _drag_reduced(p, alpha, k)


def wing_full(const double[::1] p, double alpha, double k):
    cdef double cm = (p[MW] + p[MW + 1] * alpha + p[MW + 2] * k + p[MW + 3] * alpha * alpha
                      + p[MW + 4] * k * k + p[MW + 5] * alpha * k)
    return _poly7(p, LW, alpha, k), _poly7(p, LWC, alpha, k), _poly7(p, DW, alpha, k), cm


def loads(const double[::1] p, double V, double alpha, double alpha_t, double k, double delta_e,
          double s_flap, int averaged, int model, double[::1] out):
    _loads(p, V, alpha, alpha_t, k, delta_e, s_flap, averaged, model, &out[0])


def derivative(const double[::1] p, const double[::1] y, double f, double delta_e, double s_flap,
               int averaged, int model, double v_floor, double[::1] out):
    _derivative(p, &y[0], f, delta_e, s_flap, averaged, model, v_floor, &out[0])


def euler(const double[::1] p, const double[::1] y0, const double[::1] f, const double[::1] delta_e,
          double dt, double phase0, double phase_scale, int averaged, int model, double v_floor,
          double[:, ::1] out):
    cdef Py_ssize_t n = f.shape[0]
    cdef Py_ssize_t i, j
    cdef double y[6]
    cdef double d[6]
    cdef double phase = phase0
    cdef double two_pi = 2.0 * M_PI
    for j in range(6):
        y[j] = y0[j]
        out[0, j] = y[j]
    for i in range(n):
        _derivative(p, y, f[i], delta_e[i], sin(phase), averaged, model, v_floor, d)
        for j in range(6):
            y[j] += dt * d[j]
            out[i + 1, j] = y[j]
        phase += two_pi * phase_scale * f[i] * dt
    return phase


cdef double _eta(const double[::1] p, double alpha, double V, double gamma_r, double gammadot_r,
                 double k) except? -1e300:
    cdef double beta1 = p[RHO] * p[S] / (2.0 * p[M])
    return beta1 * V * _stall(p, alpha) * _lift_reduced(p, alpha, k) - p[G] * cos(gamma_r) / V - gammadot_r


def eta(const double[::1] p, double alpha, double V, double gamma_r, double gammadot_r, double k):
    return _eta(p, alpha, V, gamma_r, gammadot_r, k)


def trim_alpha(const double[::1] p, double V, double gamma_r, double gammadot_r, double k,
               double lo, double hi, double tol):
    cdef double flo = _eta(p, lo, V, gamma_r, gammadot_r, k)
    cdef double fhi = _eta(p, hi, V, gamma_r, gammadot_r, k)
    cdef double mid, fm
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise TrimNotFoundError(
            f"eta has no sign change on [{lo:.4g}, {hi:.4g}] (V={V:.4g}, gamma_R={gamma_r:.4g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = _eta(p, mid, V, gamma_r, gammadot_r, k)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
