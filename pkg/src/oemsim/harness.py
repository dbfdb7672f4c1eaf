"""Scenario runner, sweep engine and file output.

A scenario bundles a validated system configuration with integration settings
and an analysis window; a sweep evaluates a scenario grid over one or two
parameter axes.  Output is CSV plus a JSON metadata sidecar that is
sufficient to re-run the producing scenario exactly.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DivergenceError, EmptyWindowError, InvalidParameterError
from .integrator import (IntegrationConfig, TrajectoryRecord, integrate,
                         vacuum_initial_state)
from .measures import variance_to_db, window_extrema
from .model import DriveSchedule, SpringSchedule, SystemConfig, SystemParams, validate

TWO_PI = 2.0 * math.pi

_SECTION_TYPES = {
    "params": SystemParams,
    "drives": DriveSchedule,
    "spring": SpringSchedule,
}


@dataclass(frozen=True)
class Scenario:
    name: str
    system: SystemConfig = field(default_factory=SystemConfig)
    integration: IntegrationConfig = field(
        default_factory=lambda: default_integration())
    window_last_periods: float = 10.0

    @property
    def period(self) -> float:
        return TWO_PI / self.system.params.omega_0

    @property
    def window(self) -> tuple[float, float]:
        t_end = self.integration.t_end
        return (t_end - self.window_last_periods * self.period, t_end)

    def validated(self) -> "Scenario":
        validate(self.system.params, self.system.drives, self.system.spring,
                 self.system.spring_mod_scope)
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dataclasses.asdict(self.system.params),
            "drives": dataclasses.asdict(self.system.drives),
            "spring": dataclasses.asdict(self.system.spring),
            "spring_mod_scope": self.system.spring_mod_scope,
            "integration": dataclasses.asdict(self.integration),
            "window": {"last_periods": self.window_last_periods},
        }


def default_integration(omega_0: float = 1.0) -> IntegrationConfig:
    """1000 mechanical periods at 10^-3 period per step."""
    period = TWO_PI / omega_0
    return IntegrationConfig(dt=1e-3 * period, t_end=1000.0 * period)


def _build_section(cls, data: dict, section: str):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - fields
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {sorted(unknown)}")
    return cls(**data)


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from its dictionary form.

    ``integration`` accepts either raw ``dt``/``t_end`` (units of 1/omega_0)
    or the convenience keys ``dt_periods``/``t_end_periods`` scaled by the
    mechanical period.
    """
    known = {"name", "params", "drives", "spring", "spring_mod_scope",
             "integration", "window"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")

    sections = {}
    for section, cls in _SECTION_TYPES.items():
        sections[section] = _build_section(cls, dict(data.get(section, {})), section)

    omega_0 = sections["params"].omega_0
    period = TWO_PI / omega_0
    integ = dict(data.get("integration", {}))
    if "dt_periods" in integ:
        integ["dt"] = integ.pop("dt_periods") * period
    if "t_end_periods" in integ:
        integ["t_end"] = integ.pop("t_end_periods") * period
    integ.setdefault("dt", 1e-3 * period)
    integ.setdefault("t_end", 1000.0 * period)
    integration = _build_section(IntegrationConfig, integ, "integration")

    window = dict(data.get("window", {"last_periods": 10.0}))
    if set(window) != {"last_periods"}:
        raise ConfigError("window must contain exactly the key 'last_periods'")

    system = validate(sections["params"], sections["drives"], sections["spring"],
                      data.get("spring_mod_scope", "both"))
    return Scenario(
        name=data.get("name", "unnamed"),
        system=system,
        integration=integration,
        window_last_periods=float(window["last_periods"]),
    )


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return scenario_from_dict(data)


def bundled_scenario(name: str) -> Scenario:
    """Load one of the scenario files shipped with the package."""
    ref = resources.files("oemsim") / "scenarios" / f"{name}.json"
    if not ref.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return scenario_from_dict(json.loads(ref.read_text()))


def bundled_sweep(name: str) -> "SweepSpec":
    ref = resources.files("oemsim") / "scenarios" / f"{name}.json"
    if not ref.is_file():
        raise ConfigError(f"no bundled sweep named {name!r}")
    return sweep_from_dict(json.loads(ref.read_text()))


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    record: TrajectoryRecord
    min_variance: float
    max_log_negativity: float


def run_scenario(s: Scenario) -> ScenarioResult:
    """Integrate one scenario and reduce its analysis window.

    Divergence errors are re-raised with the scenario name attached.
    """
    s.validated()
    initial = vacuum_initial_state(s.system.params)
    try:
        record = integrate(initial, s.integration, s.system)
    except DivergenceError as exc:
        raise DivergenceError(exc.t, f"scenario {s.name!r}: {exc}") from exc
    min_var, max_en = window_extrema(record, s.window)
    return ScenarioResult(s, record, min_var, max_en)


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepAxis:
    path: str            # e.g. "params.g_1", "spring.theta_0", "drives.a_v_p1"
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InvalidParameterError(f"axis {self.path!r} has no values")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParameterError(f"axis {self.path!r} has non-finite values")
        diffs = [b - a for a, b in zip(vals, vals[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise InvalidParameterError(f"axis {self.path!r} values must be strictly monotonic")


@dataclass(frozen=True)
class SweepSpec:
    name: str
    base: Scenario
    axis_1: SweepAxis
    axis_2: SweepAxis | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    axis_1_values: np.ndarray
    axis_2_values: np.ndarray | None
    min_variance: np.ndarray        # (n1, n2)
    max_log_negativity: np.ndarray  # (n1, n2)
    stable: np.ndarray              # (n1, n2) bool


def _set_path(scenario: Scenario, path: str, value: float) -> Scenario:
    section, _, fname = path.partition(".")
    if section == "integration":
        if fname not in {f.name for f in dataclasses.fields(IntegrationConfig)}:
            raise ConfigError(f"unknown sweep path {path!r}")
        integ = dataclasses.replace(scenario.integration, **{fname: value})
        return dataclasses.replace(scenario, integration=integ)
    if section not in _SECTION_TYPES:
        raise ConfigError(f"unknown sweep path {path!r}")
    cls = _SECTION_TYPES[section]
    if fname not in {f.name for f in dataclasses.fields(cls)}:
        raise ConfigError(f"unknown sweep path {path!r}")
    attr = {"params": "params", "drives": "drives", "spring": "spring"}[section]
    sub = dataclasses.replace(getattr(scenario.system, attr), **{fname: value})
    system = dataclasses.replace(scenario.system, **{attr: sub})
    return dataclasses.replace(scenario, system=system)


def sweep_from_dict(data: dict) -> SweepSpec:
    known = {"name", "base", "base_scenario", "axis_1", "axis_2"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown sweep key(s): {sorted(unknown)}")
    if "base" in data:
        base = scenario_from_dict(data["base"])
    elif "base_scenario" in data:
        ref = data["base_scenario"]
        base = bundled_scenario(ref) if not str(ref).endswith(".json") else load_scenario(ref)
    else:
        raise ConfigError("sweep needs 'base' (inline scenario) or 'base_scenario' (name/path)")

    def axis(key):
        if key not in data or data[key] is None:
            return None
        d = data[key]
        if set(d) != {"path", "values"}:
            raise ConfigError(f"{key} must contain exactly 'path' and 'values'")
        return SweepAxis(d["path"], tuple(d["values"]))

    ax1 = axis("axis_1")
    if ax1 is None:
        raise ConfigError("sweep needs a non-empty axis_1")
    return SweepSpec(name=data.get("name", "unnamed"), base=base,
                     axis_1=ax1, axis_2=axis("axis_2"))


def load_sweep(path) -> SweepSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return sweep_from_dict(data)


def _cell_scenario(spec: SweepSpec, i: int, j: int) -> Scenario:
    s = _set_path(spec.base, spec.axis_1.path, spec.axis_1.values[i])
    if spec.axis_2 is not None:
        s = _set_path(s, spec.axis_2.path, spec.axis_2.values[j])
    return dataclasses.replace(s, name=f"{spec.name}[{i},{j}]")


def _evaluate_cell(args):
    spec, i, j = args
    try:
        res = run_scenario(_cell_scenario(spec, i, j))
        return i, j, res.min_variance, res.max_log_negativity, True
    except DivergenceError:
        return i, j, math.nan, math.nan, False


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid cell; unstable cells are flagged, never fatal.

    Results are assembled by cell index, so the outcome is identical for any
    worker count.
    """
    n1 = len(spec.axis_1.values)
    n2 = len(spec.axis_2.values) if spec.axis_2 is not None else 1
    min_var = np.full((n1, n2), math.nan)
    max_en = np.full((n1, n2), math.nan)
    stable = np.zeros((n1, n2), dtype=bool)
    cells = [(spec, i, j) for i in range(n1) for j in range(n2)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_cell, cells))
    else:
        results = [_evaluate_cell(c) for c in cells]
    for i, j, mv, me, ok in results:
        min_var[i, j] = mv
        max_en[i, j] = me
        stable[i, j] = ok
    return SweepResult(
        spec=spec,
        axis_1_values=np.array(spec.axis_1.values),
        axis_2_values=(np.array(spec.axis_2.values) if spec.axis_2 is not None else None),
        min_variance=min_var,
        max_log_negativity=max_en,
        stable=stable,
    )


# ---------------------------------------------------------------------------
# output

_CONVENTIONS = {
    "vacuum_variance": 0.5,
    "log_negativity_base": "e",
    "quadrature_order": ["X", "Y", "Q0", "P0", "Q1", "P1"],
    "db_conversion": "-10*log10(var/0.5)",
}


def _sidecar(dest: Path, payload: dict) -> Path:
    meta_path = dest.with_suffix(dest.suffix + ".meta.json")
    meta_path.write_text(json.dumps(payload, indent=2) + "\n")
    return meta_path


def emit_trajectory(record: TrajectoryRecord, destination, scenario: Scenario | None = None) -> Path:
    """Write a trajectory as CSV plus a JSON metadata sidecar.

    Values are written with 17 significant digits so a re-parse reproduces
    them exactly.
    """
    if len(record) == 0:
        raise InvalidParameterError("cannot emit an empty record")
    dest = Path(destination)
    dest.parent.mkdir(parents=True, exist_ok=True)
    header = "t,alpha_re,alpha_im,beta0_re,beta0_im,beta1_re,beta1_im,var_q0,e_n,var_q0_db"
    lines = [header]
    for i in range(len(record)):
        a, b0, b1 = record.classical[i]
        vals = (record.t[i], a.real, a.imag, b0.real, b0.imag, b1.real, b1.imag,
                record.var_q0[i], record.log_neg[i], variance_to_db(record.var_q0[i]))
        lines.append(",".join(f"{v:.17g}" for v in vals))
    dest.write_text("\n".join(lines) + "\n")
    meta = {
        "kind": "trajectory",
        "version": __version__,
        "conventions": _CONVENTIONS,
        "samples": len(record),
    }
    if scenario is not None:
        meta["scenario"] = scenario.to_dict()
        meta["dt"] = scenario.integration.dt
    _sidecar(dest, meta)
    return dest


def emit_sweep(result: SweepResult, destination) -> Path:
    """Write a sweep grid as CSV (one row per cell) plus metadata sidecar."""
    dest = Path(destination)
    dest.parent.mkdir(parents=True, exist_ok=True)
    ax1 = result.spec.axis_1
    ax2 = result.spec.axis_2
    cols = [ax1.path.replace(".", "_")]
    if ax2 is not None:
        cols.append(ax2.path.replace(".", "_"))
    cols += ["min_var_q0", "max_e_n", "stable"]
    lines = [",".join(cols)]
    n1, n2 = result.min_variance.shape
    for i in range(n1):
        for j in range(n2):
            row = [f"{result.axis_1_values[i]:.17g}"]
            if ax2 is not None:
                row.append(f"{result.axis_2_values[j]:.17g}")
            row += [f"{result.min_variance[i, j]:.17g}",
                    f"{result.max_log_negativity[i, j]:.17g}",
                    "1" if result.stable[i, j] else "0"]
            lines.append(",".join(row))
    dest.write_text("\n".join(lines) + "\n")
    meta = {
        "kind": "sweep",
        "version": __version__,
        "conventions": _CONVENTIONS,
        "name": result.spec.name,
        "base_scenario": result.spec.base.to_dict(),
        "axis_1": {"path": ax1.path, "values": list(ax1.values)},
        "axis_2": (None if ax2 is None
                   else {"path": ax2.path, "values": list(ax2.values)}),
    }
    _sidecar(dest, meta)
    return dest
