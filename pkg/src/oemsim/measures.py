"""Observables extracted from the quadrature covariance matrix.

Two quantities matter downstream: the mechanical position variance (vacuum
reference 0.5, below it is squeezing) and the logarithmic negativity of the
optical-circuit bipartition.  Conventions: vacuum variance 1/2, natural
logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import CovarianceState
from .errors import EmptyWindowError, NonphysicalCovarianceError

#: Vacuum position variance; the standard quantum limit for squeezing.
SQL = 0.5

#: Slack allowed on the uncertainty bound of symplectic eigenvalues.
PHYSICALITY_TOL = 1e-6

# mode index -> quadrature rows in the fixed (X, Y, Q0, P0, Q1, P1) ordering
_MODE_ROWS = {0: (0, 1), 1: (2, 3), 2: (4, 5)}


@dataclass(frozen=True)
class MeasureSample:
    t: float
    mech_variance: float
    log_negativity: float


def _as_matrix(v) -> np.ndarray:
    return v.v if isinstance(v, CovarianceState) else np.asarray(v, dtype=float)


def mechanical_variance(v) -> float:
    """Position variance of the mechanical mode: the (Q0, Q0) diagonal entry."""
    return float(_as_matrix(v)[2, 2])


def variance_to_db(variance: float) -> float:
    """Squeezing of a variance relative to the vacuum level, in dB."""
    return -10.0 * math.log10(variance / SQL)


def symplectic_eigenvalues(v) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending.

    Physical states have every value >= 1/2 in this convention.
    """
    m = _as_matrix(v)
    n = m.shape[0] // 2
    omega = np.zeros_like(m)
    for j in range(n):
        omega[2 * j, 2 * j + 1] = 1.0
        omega[2 * j + 1, 2 * j] = -1.0
    ev = np.linalg.eigvals(1j * omega @ m)
    return np.sort(np.abs(ev))[::2]


def is_physical(v, tol: float = PHYSICALITY_TOL) -> bool:
    return bool(symplectic_eigenvalues(v).min() >= SQL - tol)


def log_negativity(v, partition: tuple[int, int] = (0, 2),
                   tol: float = PHYSICALITY_TOL) -> float:
    """Logarithmic negativity of a two-mode reduction of the covariance.

    The reduced 4x4 matrix over the partition's quadratures is written in
    2x2 blocks ``[[A, C], [C^T, B]]``; the smallest symplectic eigenvalue of
    its partial transpose follows from the invariants
    ``Sigma = det A + det B - 2 det C`` and ``det V4``, and the negativity is
    ``max(0, -ln(2 nu_minus))``.  A product vacuum gives exactly 0.
    """
    m = _as_matrix(v)
    rows = list(_MODE_ROWS[partition[0]]) + list(_MODE_ROWS[partition[1]])
    v4 = m[np.ix_(rows, rows)]
    a = np.linalg.det(v4[:2, :2])
    b = np.linalg.det(v4[2:, 2:])
    c = np.linalg.det(v4[:2, 2:])
    det4 = np.linalg.det(v4)
    if det4 <= 0:
        raise NonphysicalCovarianceError(f"det V4 = {det4:g} <= 0")
    sigma = a + b - 2.0 * c
    disc = sigma * sigma - 4.0 * det4
    if disc < 0:
        if disc < -tol:
            raise NonphysicalCovarianceError(
                f"Sigma^2 - 4 det V4 = {disc:g} negative beyond tolerance")
        disc = 0.0
    nu_minus_sq = 0.5 * (sigma - math.sqrt(disc))
    if nu_minus_sq <= 0:
        raise NonphysicalCovarianceError(
            f"partially transposed symplectic eigenvalue undefined (nu^2 = {nu_minus_sq:g})")
    return max(0.0, -0.5 * math.log(4.0 * nu_minus_sq))


def window_extrema(record, window: tuple[float, float]) -> tuple[float, float]:
    """(min mechanical variance, max log negativity) over samples inside the window."""
    t_start, t_end = window
    mask = (record.t >= t_start) & (record.t <= t_end)
    if not mask.any():
        raise EmptyWindowError(f"no recorded samples in [{t_start:g}, {t_end:g}]")
    return float(record.var_q0[mask].min()), float(record.log_neg[mask].max())
