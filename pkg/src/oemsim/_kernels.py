"""Numba-compiled inner loops for the time integration.

The joint state is flattened to 42 doubles: the classical amplitudes as
``(Re a, Im a, Re b0, Im b0, Re b1, Im b1)`` followed by the 36 row-major
covariance entries.  System parameters travel as a flat float64 array with
the layout below so the compiled functions stay signature-stable.

These kernels mirror :mod:`oemsim.dynamics` exactly; the test suite asserts
agreement between the two at random states.
"""

import numpy as np
from numba import njit

from .model import SystemConfig

# par array layout
P_OMEGA0 = 0
P_OMEGA1 = 1
P_KAPPA = 2
P_GAMMA0 = 3
P_GAMMA1 = 4
P_G0 = 5
P_G1 = 6
P_DELTA0 = 7
P_NTH0 = 8
P_NTH1 = 9
P_AL0 = 10
P_ALP1 = 11
P_ALM1 = 12
P_OMEGAL = 13
P_AV0 = 14
P_AVP1 = 15
P_AVM1 = 16
P_OMEGAV = 17
P_THETA0 = 18
P_THETA1 = 19
P_SCOPE = 20  # 1.0 = modulated frequency in classical equation too
N_PAR = 21

STATE_SIZE = 42
COV_OFFSET = 6


def pack_params(system: SystemConfig) -> np.ndarray:
    p, d, s = system.params, system.drives, system.spring
    par = np.empty(N_PAR)
    par[P_OMEGA0] = p.omega_0
    par[P_OMEGA1] = p.omega_1
    par[P_KAPPA] = p.kappa
    par[P_GAMMA0] = p.gamma_0
    par[P_GAMMA1] = p.gamma_1
    par[P_G0] = p.g_0
    par[P_G1] = p.g_1
    par[P_DELTA0] = p.delta_0
    par[P_NTH0] = p.n_th_0
    par[P_NTH1] = p.n_th_1
    par[P_AL0] = d.a_l_0
    par[P_ALP1] = d.a_l_p1
    par[P_ALM1] = d.a_l_m1
    par[P_OMEGAL] = d.omega_l_mod
    par[P_AV0] = d.a_v_0
    par[P_AVP1] = d.a_v_p1
    par[P_AVM1] = d.a_v_m1
    par[P_OMEGAV] = d.omega_v_mod
    par[P_THETA0] = s.theta_0
    par[P_THETA1] = s.theta_1
    par[P_SCOPE] = 1.0 if system.spring_mod_scope == "both" else 0.0
    return par


@njit(cache=True)
def joint_rhs_flat(t, y, par, out):
    """Joint derivative of the flattened state, written into ``out``."""
    omega0 = par[P_OMEGA0]
    omega1 = par[P_OMEGA1]
    kappa = par[P_KAPPA]
    gamma0 = par[P_GAMMA0]
    gamma1 = par[P_GAMMA1]
    g0 = par[P_G0]
    g1 = par[P_G1]

    al = (par[P_AL0]
          + par[P_ALP1] * np.exp(-1j * par[P_OMEGAL] * t)
          + par[P_ALM1] * np.exp(1j * par[P_OMEGAL] * t))
    av = (par[P_AV0]
          + par[P_AVP1] * np.exp(-1j * par[P_OMEGAV] * t)
          + par[P_AVM1] * np.exp(1j * par[P_OMEGAV] * t))
    w0_mod = omega0 * np.sqrt(1.0 + par[P_THETA0] * np.cos(par[P_THETA1] * t))

    alpha = y[0] + 1j * y[1]
    beta0 = y[2] + 1j * y[3]
    beta1 = y[4] + 1j * y[5]
    q0 = 2.0 * beta0.real
    q1 = 2.0 * beta1.real
    delta = par[P_DELTA0] - g0 * q0
    w0_cl = w0_mod if par[P_SCOPE] > 0.5 else omega0

    d_alpha = -(kappa + 1j * delta) * alpha + al
    d_beta0 = (-(gamma0 + 1j * w0_cl) * beta0
               + 1j * g0 * (alpha.real**2 + alpha.imag**2)
               + 1j * g1 * q1 * q1)
    d_beta1 = (-(gamma1 + 1j * omega1) * beta1
               + 2j * g1 * q0 * q1
               + 1j * av)
    out[0] = d_alpha.real
    out[1] = d_alpha.imag
    out[2] = d_beta0.real
    out[3] = d_beta0.imag
    out[4] = d_beta1.real
    out[5] = d_beta1.imag

    g0r = g0 * alpha.real
    g0i = g0 * alpha.imag
    g10 = g1 * q0
    g11 = g1 * q1

    a = np.zeros((6, 6))
    a[0, 0] = -kappa
    a[0, 1] = delta
    a[0, 2] = -2.0 * g0i
    a[1, 0] = -delta
    a[1, 1] = -kappa
    a[1, 2] = 2.0 * g0r
    a[2, 2] = -gamma0
    a[2, 3] = w0_mod
    a[3, 0] = 2.0 * g0r
    a[3, 1] = 2.0 * g0i
    a[3, 2] = -w0_mod
    a[3, 3] = -gamma0
    a[3, 4] = 4.0 * g11
    a[4, 4] = -gamma1
    a[4, 5] = omega1
    a[5, 2] = 4.0 * g11
    a[5, 4] = -omega1 + 4.0 * g10
    a[5, 5] = -gamma1

    v = np.empty((6, 6))
    for i in range(6):
        for j in range(6):
            v[i, j] = y[COV_OFFSET + 6 * i + j]
    m = a @ v + v @ a.T
    m[0, 0] += kappa
    m[1, 1] += kappa
    m[2, 2] += gamma0 * (2.0 * par[P_NTH0] + 1.0)
    m[3, 3] += gamma0 * (2.0 * par[P_NTH0] + 1.0)
    m[4, 4] += gamma1 * (2.0 * par[P_NTH1] + 1.0)
    m[5, 5] += gamma1 * (2.0 * par[P_NTH1] + 1.0)
    for i in range(6):
        for j in range(6):
            out[COV_OFFSET + 6 * i + j] = m[i, j]


@njit(cache=True)
def _resymmetrize(y):
    for i in range(6):
        for j in range(i + 1, 6):
            s = 0.5 * (y[COV_OFFSET + 6 * i + j] + y[COV_OFFSET + 6 * j + i])
            y[COV_OFFSET + 6 * i + j] = s
            y[COV_OFFSET + 6 * j + i] = s


@njit(cache=True)
def _exceeds(y, threshold):
    for i in range(STATE_SIZE):
        v = y[i]
        if not np.isfinite(v) or abs(v) > threshold:
            return True
    return False


@njit(cache=True)
def rk4_advance(y, step0, dt, nsteps, par, threshold):
    """Advance ``y`` in place by ``nsteps`` RK4 steps starting at step ``step0``.

    Returns the 0-based local index of the first diverged step, or -1 on
    success.  Time is reconstructed as ``(step0 + n) * dt`` from the global
    step count, so runs split into chunks reproduce an unchunked run bit for
    bit.
    """
    k1 = np.empty(STATE_SIZE)
    k2 = np.empty(STATE_SIZE)
    k3 = np.empty(STATE_SIZE)
    k4 = np.empty(STATE_SIZE)
    yt = np.empty(STATE_SIZE)
    for n in range(nsteps):
        t = (step0 + n) * dt
        joint_rhs_flat(t, y, par, k1)
        for i in range(STATE_SIZE):
            yt[i] = y[i] + 0.5 * dt * k1[i]
        joint_rhs_flat(t + 0.5 * dt, yt, par, k2)
        for i in range(STATE_SIZE):
            yt[i] = y[i] + 0.5 * dt * k2[i]
        joint_rhs_flat(t + 0.5 * dt, yt, par, k3)
        for i in range(STATE_SIZE):
            yt[i] = y[i] + dt * k3[i]
        joint_rhs_flat(t + dt, yt, par, k4)
        for i in range(STATE_SIZE):
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        _resymmetrize(y)
        if _exceeds(y, threshold):
            return n
    return -1


@njit(cache=True)
def euler_advance(y, step0, dt, nsteps, par, threshold):
    """First-order explicit Euler counterpart of :func:`rk4_advance`."""
    k1 = np.empty(STATE_SIZE)
    for n in range(nsteps):
        t = (step0 + n) * dt
        joint_rhs_flat(t, y, par, k1)
        for i in range(STATE_SIZE):
            y[i] += dt * k1[i]
        _resymmetrize(y)
        if _exceeds(y, threshold):
            return n
    return -1
