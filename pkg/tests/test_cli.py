import csv
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lindbladium.cli import EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_OK, main
from lindbladium.config import (
    Experiment, config_to_dict, parse_config, serialize_config,
)
from lindbladium.errors import ConfigError, ConvergenceError
from lindbladium.runner import run

BASE = {
    "chain": {"n": 4, "kind": "XXZ", "alpha": 1.0, "deltas": [0.5, 1.0, 1.5]},
    "driving": {"case": "X_XY_THETA", "gamma": 1.0, "f": 0.5, "theta": math.pi / 4},
    "experiment": "ONE_WAY_STREET",
    "seed": 11,
}


def text(doc=None, **overrides) -> str:
    doc = json.loads(json.dumps(doc or BASE))
    doc.update(overrides)
    return json.dumps(doc, indent=2)


class TestConfig:
    def test_defaults_filled(self):
        cfg = parse_config(text())
        d = config_to_dict(cfg)
        assert d["solver"] == {"mode": "DENSE", "tol": 1e-10, "max_steps": 200000}
        assert d["output"] == {"report": None, "profiles_csv": None}
        assert d["chain"]["fields_z"] == [0.0] * 4
        assert d["driving"]["orientation"] == "NORMAL"

    def test_round_trip(self):
        once = serialize_config(parse_config(text()))
        assert serialize_config(parse_config(once)) == once
        assert json.loads(once).keys() == {"chain", "driving", "experiment", "solver", "output", "seed"}

    @given(
        kind=st.sampled_from(["XXZ", "XXX"]),
        n=st.integers(2, 5),
        case=st.sampled_from(["X_XY_THETA", "YZ_ORTHO"]),
        f=st.floats(-1, 1),
        theta=st.floats(0, math.pi / 2),
        amps=st.lists(st.floats(0, 3), min_size=6, max_size=6),
    )
    def test_round_trip_property(self, kind, n, case, f, theta, amps):
        chain = {"n": n, "kind": kind}
        chain["deltas" if kind == "XXZ" else "alphas"] = [1.0 + 0.1 * k for k in range(n - 1)]
        drv = {"case": case, "f": f, "theta": theta}
        drv.update(zip(["amp_l_plus", "amp_l_minus", "amp_v_plus", "amp_v_minus",
                        "amp_w_plus", "amp_w_minus"], amps))
        once = serialize_config(parse_config(json.dumps({"chain": chain, "driving": drv})))
        assert serialize_config(parse_config(once)) == once

    def test_unknown_key_located(self):
        doc = json.loads(text())
        doc["chain"]["colour"] = "red"
        with pytest.raises(ConfigError) as info:
            parse_config(json.dumps(doc, indent=2))
        assert info.value.key == "chain.colour"
        assert info.value.line is not None and "colour" in str(info.value)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as info:
            parse_config(text(extra=1))
        assert info.value.key == "extra"

    def test_bad_json_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config('{\n  "chain": {\n    "n": 3,,\n')
        assert info.value.line == 3

    @pytest.mark.parametrize("patch,key", [
        ({"chain": {"n": 3, "deltas": [1.0]}}, "chain"),
        ({"chain": {"n": "three", "deltas": [1.0]}}, "chain.n"),
        ({"driving": {"case": "X_XY_THETA", "f": 2.0}}, "driving"),
        ({"driving": {"case": "X_XY_THETA", "gamma": True}}, "driving.gamma"),
        ({"driving": {"f": 0.1}}, "driving.case"),
        ({"experiment": "EVERYTHING"}, "experiment"),
        ({"solver": {"mode": "FAST"}}, "solver.mode"),
        ({"solver": {"tol": -1}}, "solver"),
        ({"output": {"report": 5}}, "output.report"),
        ({"seed": 1.5}, "seed"),
    ])
    def test_invalid_values(self, patch, key):
        with pytest.raises(ConfigError) as info:
            parse_config(text(**patch))
        assert info.value.key == key

    def test_missing_sections(self):
        with pytest.raises(ConfigError):
            parse_config(json.dumps({"driving": BASE["driving"]}))
        with pytest.raises(ConfigError):
            parse_config("[]")


class TestRun:
    def test_one_way_street(self):
        report = run(parse_config(text()))
        ows = report.one_way_street
        assert ows["energy_delta"] < 1e-8
        assert ows["spin_relation"] == "negated"
        assert ows["state_mapping_residual"] < 1e-10
        assert report.steady_state["normal"]["null_dim"] == 1
        assert set(report.profiles) == {"normal", "inverted"}

    @pytest.mark.parametrize("case", ["Y_YZ_THETA", "Z_XZ_THETA"])
    def test_zero_bias(self, case):
        doc = json.loads(text())
        doc["chain"] = {"n": 3, "kind": "XXX", "alphas": [0.5, 1.5]}
        doc["driving"] = {"case": case, "f": 0.0, "theta": 0.3}
        report = run(parse_config(json.dumps(doc)))
        for prof in report.profiles.values():
            assert max(map(abs, prof.spin + prof.energy)) < 1e-12
        assert report.one_way_street["energy_delta"] < 1e-12

    def test_uniqueness_audit(self):
        doc = json.loads(text(experiment="UNIQUENESS_AUDIT"))
        doc["chain"] = {"n": 3, "deltas": [0.5, 1.5]}
        u = run(parse_config(json.dumps(doc))).uniqueness
        assert u["closure"]["saturated"] and u["null_dim"] == 1 and u["agree"]

    def test_symmetry_audit(self):
        report = run(parse_config(text(experiment="SYMMETRY_AUDIT")))
        assert report.symmetry["hamiltonian_residual"] < 1e-13
        assert report.symmetry["spin_current_sign"] == -1
        assert report.profiles == {}

    def test_steady_state_respects_orientation(self):
        doc = json.loads(text(experiment="STEADY_STATE"))
        doc["driving"]["orientation"] = "INVERTED"
        report = run(parse_config(json.dumps(doc)))
        assert list(report.profiles) == ["inverted"]

    def test_deterministic(self):
        cfg = parse_config(text(experiment="ALL"))
        a, b = run(cfg), run(cfg)
        assert a.to_json(include_timings=False) == b.to_json(include_timings=False)
        assert "timings" in a.to_dict() and "timings" not in a.to_dict(include_timings=False)

    def test_echo_reproduces(self):
        first = run(parse_config(text()))
        again = run(parse_config(json.dumps(first.to_dict()["config"])))
        assert again.to_json(include_timings=False) == first.to_json(include_timings=False)

    def test_matrix_free_one_way_street(self):
        doc = json.loads(text())
        doc["chain"] = {"n": 3, "deltas": [0.5, 1.5]}
        doc["solver"] = {"mode": "MATRIX_FREE"}
        ows = run(parse_config(json.dumps(doc))).one_way_street
        assert ows["energy_delta"] < 1e-8 and ows["spin_relation"] == "negated"

    def test_convergence_failure_partial(self):
        doc = json.loads(text(experiment="STEADY_STATE"))
        doc["solver"] = {"mode": "MATRIX_FREE", "max_steps": 5}
        with pytest.raises(ConvergenceError) as info:
            run(parse_config(json.dumps(doc)))
        assert info.value.partial.status == "convergence_failure"


class TestCommandLine:
    def write(self, tmp_path, **overrides):
        path = tmp_path / "run.json"
        path.write_text(text(**overrides))
        return path

    def test_success_writes_outputs(self, tmp_path, capsys):
        cfg = self.write(tmp_path)
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "report.json").read_text())
        assert report["status"] == "ok"
        assert json.loads(capsys.readouterr().out)["one_way_street"]["spin_relation"] == "negated"
        raw = (out / "profiles.csv").read_bytes()
        assert b"\r" not in raw
        rows = list(csv.DictReader(raw.decode().splitlines()))
        assert list(rows[0]) == ["index", "kind", "orientation", "value"]
        assert {r["orientation"] for r in rows} == {"normal", "inverted"}
        assert {r["kind"] for r in rows} == {"spin", "energy"}
        assert len(rows) == 2 * (3 + 2)

    def test_output_paths_from_config(self, tmp_path):
        report, prof = tmp_path / "r.json", tmp_path / "p.csv"
        cfg = self.write(tmp_path, output={"report": str(report), "profiles_csv": str(prof)})
        assert main(["run", "--config", str(cfg), "--quiet"]) == EXIT_OK
        assert report.exists() and prof.exists()

    def test_experiment_override(self, tmp_path, capsys):
        cfg = self.write(tmp_path)
        assert main(["run", "--config", str(cfg), "--experiment", "SYMMETRY_AUDIT"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["config"]["experiment"] == Experiment.SYMMETRY_AUDIT.value
        assert report["one_way_street"] is None

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = self.write(tmp_path, bogus=True)
        assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG

    def test_family_mismatch_is_config_error(self, tmp_path):
        doc = json.loads(text(experiment="STEADY_STATE"))
        doc["driving"] = {"case": "Z_XZ_THETA", "theta": 5.0}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        assert main(["run", "--config", str(path), "--quiet"]) == EXIT_CONFIG

    def test_convergence_exit(self, tmp_path):
        out = tmp_path / "out"
        cfg = self.write(tmp_path, experiment="STEADY_STATE",
                         solver={"mode": "MATRIX_FREE", "max_steps": 5})
        assert main(["run", "--config", str(cfg), "--out", str(out), "--quiet"]) == EXIT_CONVERGENCE
        assert json.loads((out / "report.json").read_text())["status"] == "convergence_failure"
