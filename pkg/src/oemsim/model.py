"""Parameter types, validation and unit conventions.

Everything the simulation touches is dimensionless: frequencies and rates are
expressed in units of the mechanical frequency ``omega_0`` and time in units
of ``1/omega_0``.  ``PhysicalParams`` together with :func:`derive_couplings`
and :func:`thermal_occupancy` form the only SI-facing surface; callers
normalize their results by ``omega_0`` before building a ``SystemParams``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import scipy.constants as const

from .errors import InvalidParameterError

#: Fraction of the optomechanical coupling beyond which the electromechanical
#: coupling is considered experimentally infeasible (warning, not error).
FEASIBLE_COUPLING_RATIO = 0.1


@dataclass(frozen=True)
class SystemParams:
    """Static rates, frequencies and couplings, all in units of ``omega_0``."""

    omega_0: float = 1.0
    omega_1: float = 1.0
    kappa: float = 0.1
    gamma_0: float = 1e-6
    gamma_1: float = 1e-2
    g_0: float = 1e-3
    g_1: float = 1e-4
    delta_0: float = 1.0
    n_th_0: float = 0.0
    n_th_1: float = 0.0

    def violations(self):
        out = []
        if not self.omega_1 > 0:
            out.append(f"omega_1 must be > 0, got {self.omega_1}")
        for name in ("kappa", "gamma_0", "gamma_1"):
            v = getattr(self, name)
            if not v > 0:
                out.append(f"{name} must be > 0, got {v}")
        for name in ("n_th_0", "n_th_1"):
            v = getattr(self, name)
            if not v >= 0:
                out.append(f"{name} must be >= 0, got {v}")
        return out


@dataclass(frozen=True)
class DriveSchedule:
    """Laser and voltage drive amplitudes (units of ``omega_0``).

    Each drive is a carrier plus a pair of first-order sidebands,
    ``A(t) = A0 + A(+1) exp(-i Om t) + A(-1) exp(+i Om t)``.  The voltage
    carrier ``a_v_0`` defaults to zero: the modulated drive has no DC term.
    """

    a_l_0: float = 100.0
    a_l_p1: float = 0.0
    a_l_m1: float = 0.0
    omega_l_mod: float = 2.0
    a_v_0: float = 0.0
    a_v_p1: float = 0.0
    a_v_m1: float = 0.0
    omega_v_mod: float = 2.0

    def violations(self):
        out = []
        for name in ("a_l_0", "a_l_p1", "a_l_m1", "a_v_0", "a_v_p1", "a_v_m1"):
            v = getattr(self, name)
            if not v >= 0:
                out.append(f"{name} must be >= 0, got {v}")
        if (self.a_l_p1 or self.a_l_m1) and not self.omega_l_mod > 0:
            out.append("omega_l_mod must be > 0 when laser sidebands are nonzero")
        if (self.a_v_p1 or self.a_v_m1) and not self.omega_v_mod > 0:
            out.append("omega_v_mod must be > 0 when voltage sidebands are nonzero")
        return out


@dataclass(frozen=True)
class SpringSchedule:
    """Spring-constant modulation: ``omega_0' = omega_0 sqrt(1 + theta_0 cos(theta_1 t))``."""

    theta_0: float = 0.0
    theta_1: float = 2.0

    def violations(self):
        if not abs(self.theta_0) < 1:
            return [f"|theta_0| must be < 1 to keep the modulated frequency real, got {self.theta_0}"]
        return []


@dataclass(frozen=True)
class SystemConfig:
    """A validated (params, drives, spring) triple plus the modulation-scope switch.

    ``spring_mod_scope`` selects where the modulated mechanical frequency is
    applied: ``"both"`` substitutes it in the classical equation of motion and
    in the fluctuation drift matrix, ``"fluctuations_only"`` restricts it to
    the drift matrix (sensitivity checks only).
    """

    params: SystemParams = field(default_factory=SystemParams)
    drives: DriveSchedule = field(default_factory=DriveSchedule)
    spring: SpringSchedule = field(default_factory=SpringSchedule)
    spring_mod_scope: str = "both"


@dataclass(frozen=True)
class PhysicalParams:
    """SI-unit description of the device, used only to derive couplings."""

    cavity_length: float
    mirror_gap: float
    frequency_pull: float
    base_capacitance: float
    parasitic_capacitance: float
    inductance: float
    mass: float
    q0_zp: float
    q1_zp: float
    drive_voltage: float
    laser_frequency: float

    @property
    def participation_ratio(self) -> float:
        return self.base_capacitance / (self.parasitic_capacitance + self.base_capacitance)


def derive_couplings(p: PhysicalParams, hbar: float = const.hbar):
    """Single-photon couplings from the device geometry.

    Returns ``(g_0, g_1)`` in the caller's unit system; divide by ``omega_0``
    to normalize.  ``g_0`` is the dispersive optomechanical coupling and
    ``g_1`` the capacitive electromechanical one.
    """
    if p.base_capacitance <= 0 or p.mirror_gap <= 0 or hbar <= 0:
        raise InvalidParameterError("base_capacitance, mirror_gap and hbar must be positive")
    if p.parasitic_capacitance < 0:
        raise InvalidParameterError("parasitic_capacitance must be non-negative")
    r = p.participation_ratio
    g_0 = p.frequency_pull * p.q0_zp / math.sqrt(2)
    g_1 = r**2 * p.q0_zp * p.q1_zp**2 / (4 * math.sqrt(2) * hbar * p.base_capacitance * p.mirror_gap)
    return g_0, g_1


def thermal_occupancy(omega: float, temperature: float,
                      hbar: float = const.hbar, kb: float = const.k) -> float:
    """Mean thermal occupancy ``1 / (exp(hbar w / kB T) - 1)``.

    ``temperature = 0`` is handled as the limit and returns 0.
    """
    if omega <= 0:
        raise InvalidParameterError(f"omega must be > 0, got {omega}")
    if temperature < 0:
        raise InvalidParameterError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(hbar * omega / (kb * temperature))


def validate(params: SystemParams, drives: DriveSchedule, spring: SpringSchedule,
             spring_mod_scope: str = "both") -> SystemConfig:
    """Check every invariant and return the assembled configuration.

    Raises :class:`InvalidParameterError` listing all violated invariants.
    A coupling ratio ``g_1 > g_0 / 10`` is experimentally implausible and is
    reported as a warning, not an error.
    """
    violations = params.violations() + drives.violations() + spring.violations()
    if spring_mod_scope not in ("both", "fluctuations_only"):
        violations.append(f"spring_mod_scope must be 'both' or 'fluctuations_only', got {spring_mod_scope!r}")
    if violations:
        raise InvalidParameterError(violations)
    if params.g_1 > FEASIBLE_COUPLING_RATIO * params.g_0:
        warnings.warn(
            f"g_1 = {params.g_1:g} exceeds {FEASIBLE_COUPLING_RATIO:g} * g_0 = "
            f"{FEASIBLE_COUPLING_RATIO * params.g_0:g}; beyond the feasible coupling ratio",
            stacklevel=2,
        )
    return SystemConfig(params=params, drives=drives, spring=spring,
                        spring_mod_scope=spring_mod_scope)
