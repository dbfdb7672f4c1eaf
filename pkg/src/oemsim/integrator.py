"""Fixed-step time integration of the joint mean-field + covariance state.

The workhorse is a fourth-order Runge-Kutta scheme compiled in
:mod:`oemsim._kernels`; a first-order Euler twin with an identical contract
serves as an independent verification oracle.  The covariance is explicitly
re-symmetrized after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels, measures
from .dynamics import ClassicalState, CovarianceState
from .errors import DivergenceError, InvalidParameterError
from .model import SystemConfig, SystemParams


@dataclass(frozen=True)
class JointState:
    """Classical amplitudes plus fluctuation covariance at one instant."""

    t: float
    classical: ClassicalState
    covariance: CovarianceState

    def to_vector(self) -> np.ndarray:
        y = np.empty(_kernels.STATE_SIZE)
        c = self.classical
        y[0], y[1] = c.alpha.real, c.alpha.imag
        y[2], y[3] = c.beta_0.real, c.beta_0.imag
        y[4], y[5] = c.beta_1.real, c.beta_1.imag
        y[6:] = self.covariance.v.ravel()
        return y

    @staticmethod
    def from_vector(t: float, y: np.ndarray) -> "JointState":
        c = ClassicalState(complex(y[0], y[1]), complex(y[2], y[3]), complex(y[4], y[5]))
        return JointState(t, c, CovarianceState(y[6:].reshape(6, 6).copy()))


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float
    t_end: float
    record_stride: int = 100
    divergence_threshold: float = 1e12

    def __post_init__(self):
        bad = []
        if not self.dt > 0:
            bad.append(f"dt must be > 0, got {self.dt}")
        if not self.t_end >= 0:
            bad.append(f"t_end must be >= 0, got {self.t_end}")
        if not self.record_stride >= 1:
            bad.append(f"record_stride must be >= 1, got {self.record_stride}")
        if not self.divergence_threshold > 0:
            bad.append(f"divergence_threshold must be > 0, got {self.divergence_threshold}")
        if bad:
            raise InvalidParameterError(bad)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class TrajectoryRecord:
    """Time series of recorded samples along one integration."""

    t: np.ndarray
    classical: np.ndarray      # (n, 3) complex: alpha, beta_0, beta_1
    covariance: np.ndarray     # (n, 6, 6)
    var_q0: np.ndarray
    log_neg: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> JointState:
        a, b0, b1 = self.classical[i]
        return JointState(float(self.t[i]), ClassicalState(a, b0, b1),
                          CovarianceState(self.covariance[i]))


def vacuum_initial_state(params: SystemParams) -> JointState:
    """Zero mean field with an uncorrelated vacuum/thermal covariance."""
    diag = [0.5, 0.5,
            (2.0 * params.n_th_0 + 1.0) / 2.0, (2.0 * params.n_th_0 + 1.0) / 2.0,
            (2.0 * params.n_th_1 + 1.0) / 2.0, (2.0 * params.n_th_1 + 1.0) / 2.0]
    return JointState(0.0, ClassicalState(), CovarianceState(np.diag(diag)))


def rk4_step(t: float, y: np.ndarray, dt: float,
             f: Callable[[float, np.ndarray], np.ndarray]) -> np.ndarray:
    """One classical RK4 step of ``dy/dt = f(t, y)`` for any flat state."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_step(t: float, y: np.ndarray, dt: float,
               f: Callable[[float, np.ndarray], np.ndarray]) -> np.ndarray:
    """One explicit Euler step; the oracle's building block."""
    return y + dt * f(t, y)


Observer = Callable[[float, JointState, measures.MeasureSample], None]


def _run(initial: JointState, cfg: IntegrationConfig, system: SystemConfig,
         observer: Observer | None, advance) -> TrajectoryRecord:
    par = _kernels.pack_params(system)
    y = initial.to_vector()
    n_steps = cfg.n_steps
    stride = cfg.record_stride

    ts, classicals, covs, var_q0s, log_negs = [], [], [], [], []

    def record(t, yvec):
        state = JointState.from_vector(t, yvec)
        sample = measures.MeasureSample(
            t=t,
            mech_variance=measures.mechanical_variance(state.covariance),
            log_negativity=measures.log_negativity(state.covariance),
        )
        ts.append(t)
        classicals.append([state.classical.alpha, state.classical.beta_0,
                           state.classical.beta_1])
        covs.append(state.covariance.v)
        var_q0s.append(sample.mech_variance)
        log_negs.append(sample.log_negativity)
        if observer is not None:
            observer(t, state, sample)

    record(0.0, y)
    step = 0
    while step < n_steps:
        chunk = min(stride, n_steps - step)
        fail = advance(y, step, cfg.dt, chunk, par, cfg.divergence_threshold)
        if fail >= 0:
            raise DivergenceError((step + fail + 1) * cfg.dt)
        step += chunk
        record(step * cfg.dt, y)

    return TrajectoryRecord(
        t=np.array(ts),
        classical=np.array(classicals, dtype=complex),
        covariance=np.array(covs),
        var_q0=np.array(var_q0s),
        log_neg=np.array(log_negs),
    )


def integrate(initial: JointState, cfg: IntegrationConfig, system: SystemConfig,
              observer: Observer | None = None) -> TrajectoryRecord:
    """Advance from ``t = 0`` to ``t_end`` in fixed RK4 steps.

    Records every ``record_stride`` steps (plus the initial point) and invokes
    the observer with each recorded sample.  Output is deterministic:
    identical inputs produce bit-identical records.  Raises
    :class:`DivergenceError` carrying the failure time if any state magnitude
    exceeds the configured threshold, which signals parametric instability.
    """
    return _run(initial, cfg, system, observer, _kernels.rk4_advance)


def euler_oracle(initial: JointState, cfg: IntegrationConfig, system: SystemConfig,
                 observer: Observer | None = None) -> TrajectoryRecord:
    """First-order Euler twin of :func:`integrate`, for verification only."""
    return _run(initial, cfg, system, observer, _kernels.euler_advance)
