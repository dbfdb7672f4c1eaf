"""Time-dependent drives, mean-field dynamics and fluctuation matrices.

Quadrature ordering is fixed throughout the package as
``(X, Y, Q0, P0, Q1, P1)``: optical amplitude/phase, then mechanical and
circuit position/momentum pairs.  These are plain-numpy reference
implementations; the tight integration loop lives in :mod:`oemsim._kernels`
and is cross-checked against this module by the test suite.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import DriveSchedule, SpringSchedule, SystemConfig, SystemParams

QUADRATURES = ("X", "Y", "Q0", "P0", "Q1", "P1")
N_QUAD = 6


@dataclass(frozen=True)
class ClassicalState:
    """Complex mean-field amplitudes of the optical, mechanical and circuit modes."""

    alpha: complex = 0.0
    beta_0: complex = 0.0
    beta_1: complex = 0.0

    def is_finite(self) -> bool:
        return all(cmath.isfinite(z) for z in (self.alpha, self.beta_0, self.beta_1))


@dataclass(frozen=True)
class EffectiveParams:
    """Mean-field-dressed parameters entering the fluctuation dynamics."""

    delta: float
    g0_eff: complex
    g10: float
    g11: float
    omega_0_eff: float


@dataclass(frozen=True)
class CovarianceState:
    """6x6 symmetric correlation matrix of the quadrature fluctuations."""

    v: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.v, dtype=float)
        if m.shape != (N_QUAD, N_QUAD):
            raise ValueError(f"covariance must be {N_QUAD}x{N_QUAD}, got {m.shape}")
        object.__setattr__(self, "v", m)

    def symmetrized(self) -> "CovarianceState":
        return CovarianceState(0.5 * (self.v + self.v.T))


def laser_amplitude(t: float, d: DriveSchedule) -> complex:
    """Modulated laser amplitude: carrier plus first-order sidebands."""
    return (d.a_l_0
            + d.a_l_p1 * cmath.exp(-1j * d.omega_l_mod * t)
            + d.a_l_m1 * cmath.exp(1j * d.omega_l_mod * t))


def voltage_amplitude(t: float, d: DriveSchedule) -> complex:
    """Modulated voltage amplitude: DC term plus first-order sidebands."""
    return (d.a_v_0
            + d.a_v_p1 * cmath.exp(-1j * d.omega_v_mod * t)
            + d.a_v_m1 * cmath.exp(1j * d.omega_v_mod * t))


def effective_mech_frequency(t: float, s: SpringSchedule, omega_0: float) -> float:
    """Instantaneous mechanical frequency under spring-constant modulation."""
    return omega_0 * math.sqrt(1.0 + s.theta_0 * math.cos(s.theta_1 * t))


def effective_params(t: float, c: ClassicalState, p: SystemParams,
                     d: DriveSchedule, s: SpringSchedule) -> EffectiveParams:
    """Mean-field-enhanced couplings and the self-consistent detuning.

    The detuning is shifted by the classical mechanical displacement; the
    optomechanical coupling is enhanced by the intracavity amplitude and the
    electromechanical one by the mechanical and charge displacements.
    """
    q0 = 2.0 * c.beta_0.real
    q1 = 2.0 * c.beta_1.real
    return EffectiveParams(
        delta=p.delta_0 - p.g_0 * q0,
        g0_eff=p.g_0 * c.alpha,
        g10=p.g_1 * q0,
        g11=p.g_1 * q1,
        omega_0_eff=effective_mech_frequency(t, s, p.omega_0),
    )


def classical_rhs(t: float, c: ClassicalState, p: SystemParams, d: DriveSchedule,
                  s: SpringSchedule, spring_mod_scope: str = "both") -> ClassicalState:
    """Time derivative of the mean-field amplitudes.

    The cavity sees the instantaneous self-consistent detuning; the mechanical
    mode is driven by radiation pressure and the quadratic charge force, the
    circuit by the voltage drive and the position-charge cross term.
    """
    eff = effective_params(t, c, p, d, s)
    w0 = eff.omega_0_eff if spring_mod_scope == "both" else p.omega_0
    q0 = 2.0 * c.beta_0.real
    q1 = 2.0 * c.beta_1.real
    d_alpha = -(p.kappa + 1j * eff.delta) * c.alpha + laser_amplitude(t, d)
    d_beta_0 = (-(p.gamma_0 + 1j * w0) * c.beta_0
                + 1j * p.g_0 * abs(c.alpha) ** 2
                + 1j * p.g_1 * q1 * q1)
    d_beta_1 = (-(p.gamma_1 + 1j * p.omega_1) * c.beta_1
                + 2j * p.g_1 * q0 * q1
                + 1j * voltage_amplitude(t, d))
    return ClassicalState(d_alpha, d_beta_0, d_beta_1)


def drift_matrix(t: float, c: ClassicalState, p: SystemParams,
                 d: DriveSchedule, s: SpringSchedule) -> np.ndarray:
    """Drift matrix of the linearized fluctuation dynamics.

    The mechanical rows carry the instantaneous modulated frequency; the
    couplings are the mean-field-enhanced ones evaluated at ``t``.
    """
    eff = effective_params(t, c, p, d, s)
    g0r, g0i = eff.g0_eff.real, eff.g0_eff.imag
    w0 = eff.omega_0_eff
    a = np.zeros((N_QUAD, N_QUAD))
    a[0, 0] = -p.kappa
    a[0, 1] = eff.delta
    a[0, 2] = -2.0 * g0i
    a[1, 0] = -eff.delta
    a[1, 1] = -p.kappa
    a[1, 2] = 2.0 * g0r
    a[2, 2] = -p.gamma_0
    a[2, 3] = w0
    a[3, 0] = 2.0 * g0r
    a[3, 1] = 2.0 * g0i
    a[3, 2] = -w0
    a[3, 3] = -p.gamma_0
    a[3, 4] = 4.0 * eff.g11
    a[4, 4] = -p.gamma_1
    a[4, 5] = p.omega_1
    a[5, 2] = 4.0 * eff.g11
    a[5, 4] = -p.omega_1 + 4.0 * eff.g10
    a[5, 5] = -p.gamma_1
    return a


def noise_matrix(p: SystemParams) -> np.ndarray:
    """Diagonal diffusion matrix; time-independent."""
    return np.diag([
        p.kappa, p.kappa,
        p.gamma_0 * (2.0 * p.n_th_0 + 1.0), p.gamma_0 * (2.0 * p.n_th_0 + 1.0),
        p.gamma_1 * (2.0 * p.n_th_1 + 1.0), p.gamma_1 * (2.0 * p.n_th_1 + 1.0),
    ])


def covariance_rhs(a: np.ndarray, v: CovarianceState | np.ndarray,
                   dmat: np.ndarray) -> np.ndarray:
    """Lyapunov right-hand side ``A V + V A^T + D``; symmetric for symmetric ``v``."""
    m = v.v if isinstance(v, CovarianceState) else np.asarray(v, dtype=float)
    return a @ m + m @ a.T + dmat


def joint_rhs(t: float, c: ClassicalState, v: CovarianceState,
              system: SystemConfig) -> tuple[ClassicalState, np.ndarray]:
    """Coupled derivative of the mean field and its covariance."""
    dc = classical_rhs(t, c, system.params, system.drives, system.spring,
                       system.spring_mod_scope)
    a = drift_matrix(t, c, system.params, system.drives, system.spring)
    dv = covariance_rhs(a, v, noise_matrix(system.params))
    return dc, dv
