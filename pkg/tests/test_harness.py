import json
import math

import numpy as np
import pytest

from oemsim.cli import EXIT_CONFIG, EXIT_OK, main
from oemsim.errors import ConfigError, InvalidParameterError
from oemsim.harness import (Scenario, SweepAxis, SweepSpec, _set_path,
                            bundled_scenario, bundled_sweep, emit_sweep,
                            emit_trajectory, load_scenario, run_scenario,
                            run_sweep, scenario_from_dict, sweep_from_dict)
from oemsim.integrator import IntegrationConfig

PERIOD = 2.0 * math.pi

BUNDLED_SCENARIOS = ("fig2_baseline", "fig2_laser", "fig2_laser_spring",
                     "fig2_laser_voltage", "fig2_full")
BUNDLED_SWEEPS = ("fig3_coupling", "fig3_spring_amplitude", "fig3_spring_grid",
                  "fig3_sideband_ratio")


def short_scenario(name="short", **extra):
    data = {
        "name": name,
        "drives": {"a_l_0": 100.0, "a_l_p1": 10.0, "a_l_m1": 10.0,
                   "a_v_p1": 50.0, "a_v_m1": 50.0},
        "spring": {"theta_0": 0.5, "theta_1": 2.0},
        "integration": {"dt_periods": 1e-3, "t_end_periods": 3.0,
                        "record_stride": 100},
        "window": {"last_periods": 1.0},
    }
    data.update(extra)
    return data


def quiet_scenario():
    # fully decoupled and undriven: every observable stays at its vacuum value
    return scenario_from_dict({
        "name": "quiet",
        "params": {"g_0": 0.0, "g_1": 0.0},
        "drives": {"a_l_0": 0.0},
        "integration": {"dt_periods": 1e-3, "t_end_periods": 2.0,
                        "record_stride": 200},
        "window": {"last_periods": 1.0},
    })


class TestScenarioConfig:
    def test_round_trip(self):
        s = scenario_from_dict(short_scenario())
        again = scenario_from_dict(s.to_dict())
        assert again == s

    def test_period_convenience_keys(self):
        s = scenario_from_dict(short_scenario())
        assert s.integration.dt == pytest.approx(1e-3 * PERIOD, rel=1e-15)
        assert s.integration.t_end == pytest.approx(3.0 * PERIOD, rel=1e-15)

    def test_defaults(self):
        s = scenario_from_dict({"name": "d"})
        assert s.integration.t_end == pytest.approx(1000.0 * PERIOD)
        assert s.window_last_periods == 10.0
        assert s.system.spring_mod_scope == "both"

    def test_window_property(self):
        s = scenario_from_dict(short_scenario())
        lo, hi = s.window
        assert hi == s.integration.t_end
        assert lo == pytest.approx(2.0 * PERIOD, rel=1e-12)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="mystery"):
            scenario_from_dict(short_scenario(mystery=1))

    def test_unknown_section_key(self):
        bad = short_scenario()
        bad["params"] = {"kappa_typo": 0.1}
        with pytest.raises(ConfigError, match="kappa_typo"):
            scenario_from_dict(bad)

    def test_invalid_physics_rejected(self):
        bad = short_scenario()
        bad["spring"] = {"theta_0": 1.5}
        with pytest.raises(InvalidParameterError, match="theta_0"):
            scenario_from_dict(bad)

    def test_bad_window_key(self):
        with pytest.raises(ConfigError, match="last_periods"):
            scenario_from_dict(short_scenario(window={"start": 0.0}))

    def test_load_scenario_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_scenario(path)


class TestBundled:
    @pytest.mark.parametrize("name", BUNDLED_SCENARIOS)
    def test_scenarios_load(self, name):
        s = bundled_scenario(name)
        assert s.name == name
        assert s.integration.t_end == pytest.approx(1000.0 * PERIOD, rel=1e-12)

    @pytest.mark.parametrize("name", BUNDLED_SWEEPS)
    def test_sweeps_load(self, name):
        spec = bundled_sweep(name)
        assert spec.name == name
        assert len(spec.axis_1.values) >= 2

    def test_sweep_axes_cover_the_studied_knobs(self):
        axes = {}
        for name in BUNDLED_SWEEPS:
            spec = bundled_sweep(name)
            axes[name] = (spec.axis_1.path,
                          spec.axis_2.path if spec.axis_2 else None)
        assert axes["fig3_coupling"] == ("params.g_1", None)
        assert axes["fig3_spring_amplitude"] == ("spring.theta_0", None)
        assert axes["fig3_spring_grid"] == ("spring.theta_0", "spring.theta_1")
        assert axes["fig3_sideband_ratio"] == ("drives.a_v_p1", None)

    def test_unknown_names(self):
        with pytest.raises(ConfigError):
            bundled_scenario("nope")
        with pytest.raises(ConfigError):
            bundled_sweep("nope")


class TestSetPath:
    def test_params(self):
        s = scenario_from_dict(short_scenario())
        out = _set_path(s, "params.g_1", 5e-5)
        assert out.system.params.g_1 == 5e-5
        assert s.system.params.g_1 == 1e-4  # original untouched

    def test_drives_spring_integration(self):
        s = scenario_from_dict(short_scenario())
        assert _set_path(s, "drives.a_v_p1", 7.0).system.drives.a_v_p1 == 7.0
        assert _set_path(s, "spring.theta_1", 1.7).system.spring.theta_1 == 1.7
        assert _set_path(s, "integration.dt", 0.01).integration.dt == 0.01

    def test_bad_paths(self):
        s = scenario_from_dict(short_scenario())
        for path in ("params.nope", "nowhere.g_1", "g_1"):
            with pytest.raises(ConfigError):
                _set_path(s, path, 1.0)


class TestSweepConfig:
    def test_axis_validation(self):
        with pytest.raises(InvalidParameterError):
            SweepAxis("params.g_1", ())
        with pytest.raises(InvalidParameterError):
            SweepAxis("params.g_1", (1.0, 3.0, 2.0))
        with pytest.raises(InvalidParameterError):
            SweepAxis("params.g_1", (1.0, math.inf))

    def test_from_dict_inline_base(self):
        spec = sweep_from_dict({
            "name": "s", "base": short_scenario(),
            "axis_1": {"path": "spring.theta_0", "values": [0.0, 0.2]},
        })
        assert spec.axis_2 is None
        assert spec.base.name == "short"

    def test_from_dict_requires_axis(self):
        with pytest.raises(ConfigError, match="axis_1"):
            sweep_from_dict({"name": "s", "base": short_scenario()})

    def test_from_dict_named_base(self):
        spec = sweep_from_dict({
            "name": "s", "base_scenario": "fig2_full",
            "axis_1": {"path": "spring.theta_0", "values": [0.1, 0.2]},
        })
        assert spec.base.name == "fig2_full"


class TestRunScenario:
    def test_quiet_scenario_stays_at_vacuum(self):
        res = run_scenario(quiet_scenario())
        assert res.min_variance == pytest.approx(0.5, abs=1e-10)
        assert res.max_log_negativity == 0.0
        np.testing.assert_array_equal(res.record.log_neg, 0.0)

    def test_single_point_sweep_matches_run_scenario(self):
        base = scenario_from_dict(short_scenario())
        spec = SweepSpec("one", base,
                         SweepAxis("spring.theta_0", (0.5,)))
        sw = run_sweep(spec)
        direct = run_scenario(base)
        assert sw.min_variance[0, 0] == direct.min_variance
        assert sw.max_log_negativity[0, 0] == direct.max_log_negativity
        assert sw.stable[0, 0]

    def test_sweep_parallel_matches_serial(self):
        base = scenario_from_dict(short_scenario())
        spec = SweepSpec("grid", base,
                         SweepAxis("spring.theta_0", (0.0, 0.3, 0.6)),
                         SweepAxis("drives.a_v_p1", (0.0, 50.0)))
        serial = run_sweep(spec, jobs=1)
        parallel = run_sweep(spec, jobs=2)
        np.testing.assert_array_equal(serial.min_variance, parallel.min_variance)
        np.testing.assert_array_equal(serial.max_log_negativity,
                                      parallel.max_log_negativity)
        np.testing.assert_array_equal(serial.stable, parallel.stable)

    def test_unstable_cell_flagged_not_fatal(self):
        # the strong-drive cell crosses the divergence threshold; the weak one
        # settles near |alpha| ~ a_l_0 / |kappa + i delta| and stays below it
        base = scenario_from_dict({
            "name": "edge",
            "params": {"g_0": 0.0, "g_1": 0.0},
            "drives": {"a_l_0": 1.0},
            "integration": {"dt_periods": 1e-3, "t_end_periods": 20.0,
                            "record_stride": 1000,
                            "divergence_threshold": 50.0},
            "window": {"last_periods": 5.0},
        })
        spec = SweepSpec("mixed", base, SweepAxis("drives.a_l_0", (1.0, 100.0)))
        res = run_sweep(spec)
        assert res.stable[0, 0]
        assert not res.stable[1, 0]
        assert math.isnan(res.min_variance[1, 0])


class TestEmit:
    def test_trajectory_csv_round_trip(self, tmp_path):
        res = run_scenario(quiet_scenario())
        dest = emit_trajectory(res.record, tmp_path / "out.csv", res.scenario)
        lines = dest.read_text().splitlines()
        assert len(lines) == len(res.record) + 1
        header = lines[0].split(",")
        assert header == ["t", "alpha_re", "alpha_im", "beta0_re", "beta0_im",
                          "beta1_re", "beta1_im", "var_q0", "e_n", "var_q0_db"]
        parsed = np.array([[float(x) for x in line.split(",")]
                           for line in lines[1:]])
        np.testing.assert_array_equal(parsed[:, 0], res.record.t)
        np.testing.assert_array_equal(parsed[:, 7], res.record.var_q0)
        np.testing.assert_array_equal(parsed[:, 8], res.record.log_neg)

    def test_trajectory_sidecar(self, tmp_path):
        res = run_scenario(quiet_scenario())
        dest = emit_trajectory(res.record, tmp_path / "out.csv", res.scenario)
        meta = json.loads((tmp_path / "out.csv.meta.json").read_text())
        assert meta["kind"] == "trajectory"
        assert meta["conventions"]["vacuum_variance"] == 0.5
        # the sidecar must reproduce the run exactly
        again = scenario_from_dict(meta["scenario"])
        assert again == res.scenario
        assert dest.exists()

    def test_sweep_csv(self, tmp_path):
        base = scenario_from_dict(short_scenario())
        spec = SweepSpec("tiny", base, SweepAxis("spring.theta_0", (0.0, 0.5)))
        res = run_sweep(spec)
        dest = emit_sweep(res, tmp_path / "sweep.csv")
        lines = dest.read_text().splitlines()
        assert lines[0] == "spring_theta_0,min_var_q0,max_e_n,stable"
        assert len(lines) == 3
        assert all(line.endswith(",1") for line in lines[1:])
        meta = json.loads((tmp_path / "sweep.csv.meta.json").read_text())
        assert meta["axis_1"]["values"] == [0.0, 0.5]


class TestCli:
    def test_validate_ok(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(short_scenario()))
        assert main(["validate", str(path)]) == EXIT_OK
        assert "valid" in capsys.readouterr().out

    def test_validate_bad_physics(self, tmp_path, capsys):
        bad = short_scenario()
        bad["spring"] = {"theta_0": 1.5}
        path = tmp_path / "s.json"
        path.write_text(json.dumps(bad))
        assert main(["validate", str(path)]) == EXIT_CONFIG
        assert "theta_0" in capsys.readouterr().err

    def test_validate_missing_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "absent.json")]) != EXIT_OK

    def test_simulate_writes_outputs(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(short_scenario(name="mini")))
        assert main(["simulate", str(path), "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "mini.csv").exists()
        assert (tmp_path / "mini.csv.meta.json").exists()
        out = capsys.readouterr().out
        assert "min var(Q0)" in out

    def test_sweep_command(self, tmp_path, capsys):
        path = tmp_path / "w.json"
        path.write_text(json.dumps({
            "name": "wee", "base": short_scenario(),
            "axis_1": {"path": "spring.theta_0", "values": [0.0, 0.5]},
        }))
        assert main(["sweep", str(path), "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "wee.csv").exists()
