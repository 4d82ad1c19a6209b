import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sskdyn.config import DEFAULTS, ExperimentConfig, normalize, serialize, validate
from sskdyn.errors import ConfigError


def violations(text):
    with pytest.raises(ConfigError) as info:
        validate(text)
    return info.value.violations


class TestValidate:
    def test_chsck_defaults_echoed(self):
        cfg = validate('{"command": "chsck", "parameters": {}}')
        assert cfg.parameters == {"c": 1.0, "beta": 0.5, "T": 10.0, "dt": 1e-3, "stride": 1}
        assert cfg.seed == 0 and cfg.output_path == "chsck.csv"

    def test_single_beta_violation(self):
        v = violations('{"command": "chsck", "parameters": {"beta": -1}}')
        assert v == [("parameters.beta", "beta must be positive")]

    def test_dt_invariant(self):
        v = violations('{"command": "chsck", "parameters": {"T": 1.0, "dt": 2.0}}')
        assert len(v) == 1 and v[0][0] == "parameters.dt" and "ChsckParams" in v[0][1]

    def test_all_violations_at_once(self):
        v = violations('{"command": "langevin", "parameters": {"N": 0, "beta": 0, "runs": 0}, "seed": -1, "workers": 0}')
        paths = {p for p, _ in v}
        assert {"parameters.N", "parameters.beta", "parameters.runs", "seed", "workers"} <= paths

    def test_parse_error_position(self):
        with pytest.raises(ConfigError, match="line 2, column"):
            validate('{"command": "chsck",\n "parameters": {,}}')

    def test_unknown_command_and_fields(self):
        with pytest.raises(ConfigError):
            validate('{"command": "train"}')
        v = violations('{"command": "limits", "parameters": {"gamma": 1}, "colour": 2}')
        assert {p for p, _ in v} == {"parameters.gamma", "colour"}

    def test_type_errors(self):
        v = violations('{"command": "hit", "parameters": {"Ns": "100", "trials": 2.5, "algorithm": 3}}')
        assert {p for p, _ in v} == {"parameters.Ns", "parameters.trials", "parameters.algorithm"}

    def test_scaling_rules(self):
        v = violations('{"command": "scaling", "parameters": {"Ns": [500], "trials": 5}}')
        assert {p for p, _ in v} == {"parameters.Ns", "parameters.trials"}

    def test_sample_csv_limit(self):
        v = violations('{"command": "sample", "parameters": {"N": 200}, "output_path": "m.csv"}')
        assert v[0][0] == "output_path"
        assert validate('{"command": "sample", "parameters": {"N": 200}}').output_path.endswith(".wigm")

    def test_workers_env_default(self, monkeypatch):
        monkeypatch.setenv("SSKDYN_WORKERS", "3")
        assert validate('{"command": "limits"}').workers == 3
        assert validate('{"command": "limits", "workers": 1}').workers == 1

    def test_integral_float_accepted(self):
        assert validate('{"command": "sample", "parameters": {"N": 10.0}}').parameters["N"] == 10


class TestRoundTrip:
    @pytest.mark.parametrize("command", sorted(DEFAULTS))
    def test_defaults_fixed_point(self, command):
        cfg = validate(json.dumps({"command": command}))
        again = validate(serialize(cfg))
        assert again == cfg
        assert serialize(again) == serialize(cfg)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(0.01, 5.0),
        st.floats(0.01, 5.0),
        st.floats(1.0, 50.0),
        st.integers(0, 2**64 - 1),
    )
    def test_chsck_fixed_point(self, c, beta, T, seed):
        doc = {"command": "chsck", "parameters": {"c": c, "beta": beta, "T": T, "dt": T / 200}, "seed": seed}
        cfg = normalize(doc)
        assert validate(serialize(validate(serialize(cfg)))) == cfg

    def test_to_dict(self):
        cfg = ExperimentConfig("limits", {"c": 1.0}, "x.csv", 5, 2)
        assert cfg.to_dict()["seed"] == 5
