"""Gaussian dynamics of a modulated optoelectromechanical system.

Simulates the coupled optical cavity / mechanical mirror / LC circuit system
under laser, voltage and spring-constant modulation, and extracts mechanical
squeezing and optical-electrical entanglement from the quadrature covariance.
"""

__version__ = "0.1.0"

from .dynamics import ClassicalState, CovarianceState, EffectiveParams  # noqa: E402
from .errors import (ConfigError, DivergenceError, EmptyWindowError,  # noqa: E402
                     InvalidParameterError, NonphysicalCovarianceError, OemError)
from .harness import (Scenario, ScenarioResult, SweepResult, SweepSpec,  # noqa: E402
                      bundled_scenario, bundled_sweep, emit_sweep, emit_trajectory,
                      load_scenario, load_sweep, run_scenario, run_sweep)
from .integrator import (IntegrationConfig, JointState, TrajectoryRecord,  # noqa: E402
                         euler_oracle, integrate, vacuum_initial_state)
from .measures import (SQL, MeasureSample, log_negativity,  # noqa: E402
                       mechanical_variance, symplectic_eigenvalues, window_extrema)
from .model import (DriveSchedule, PhysicalParams, SpringSchedule,  # noqa: E402
                    SystemConfig, SystemParams, derive_couplings,
                    thermal_occupancy, validate)
