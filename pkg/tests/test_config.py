import os

import pytest

from crossfield.cluster_gen import ArraySpec, ScenarioConfig
from crossfield.config import COMPARE_PRESET, SWEEP_PRESET, config_hash, load_config, parse_config
from crossfield.errors import ConfigError


def test_empty_text_gives_defaults():
    cfg = parse_config("")
    assert cfg.scenario == ScenarioConfig()
    assert cfg.raw == {}


def test_exponent_without_dot_is_a_number():
    cfg = parse_config("carrier_frequency: 140e9\nnum_clusters: 8\n")
    assert cfg.scenario.carrier_frequency == 140e9
    assert cfg.scenario.num_clusters == 8 and isinstance(cfg.scenario.num_clusters, int)


def test_nested_array():
    cfg = parse_config("tx_array: {kind: UPA, rows: 9, cols: 21, spacing: 3.0, plane: yz}\n")
    assert cfg.scenario.tx_array == ArraySpec("UPA", 9, 21, 3.0, plane="yz")


@pytest.mark.parametrize("text,key", [
    ("carier_frequency: 1e9\n", "carier_frequency"),
    ("tx_array: {kind: UPA, rows: 2, cols: 2, spacing: -1.0}\n", "tx_array.spacing"),
    ("tx_array: {kind: UPA, colour: red}\n", "tx_array.colour"),
    ("num_clusters: 2.5\n", "num_clusters"),
    ("num_clusters: 0\n", "num_clusters"),
    ("carrier_frequency: fast\n", "carrier_frequency"),
    ("carrier_frequency: .inf\n", "carrier_frequency"),
    ("general_angles: 3\n", "general_angles"),
    ("sweep: {trials: 0}\n", "sweep.trials"),
    ("sweep: {depth: 3}\n", "sweep.depth"),
    ("sweep: {arrays: [{name: a, size: 3}]}\n", "sweep.arrays[0]"),
    ("- 1\n- 2\n", "<root>"),
])
def test_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.key == key
    assert key in str(exc.value)


def test_parse_error_reports_position():
    with pytest.raises(ConfigError) as exc:
        parse_config("a: [1, 2\nb: 3\n", source="bad.yaml")
    assert exc.value.key == "<parse>"
    assert "bad.yaml" in exc.value.message and "line" in exc.value.message and "column" in exc.value.message


def test_sweep_section():
    cfg = parse_config("sweep:\n  trials: 7\n  frequencies: [1e9, 2e9]\n  distances: [10, 100]\n"
                       "  arrays:\n    - {name: big, tx_height: 30, array: {kind: UPA, rows: 4, cols: 4,"
                       " spacing: 0.5}}\n")
    s = cfg.sweep
    assert s.trials == 7 and s.frequencies == (1e9, 2e9) and s.distances == (10.0, 100.0)
    assert s.arrays[0].name == "big" and s.arrays[0].tx_height == 30.0
    assert s.arrays[0].array.rows == 4


def test_preset_is_overridable():
    cfg = parse_config("", SWEEP_PRESET)
    assert cfg.scenario.angle_frame == "global" and cfg.scenario.one_bounce_probability == 0.5
    cfg = parse_config("one_bounce_probability: 0.0\n", COMPARE_PRESET)
    assert cfg.scenario.one_bounce_probability == 0.0 and cfg.scenario.rx_height == 1.5


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(tmp_path / "none.yaml")
    assert exc.value.key == "--config"
    p = tmp_path / "ok.yaml"
    p.write_text("seed: 9\n")
    assert load_config(p).scenario.seed == 9


def test_config_hash():
    a = config_hash({"x": 1, "y": 2})
    assert a == config_hash({"y": 2, "x": 1})
    assert a != config_hash({"x": 1, "y": 3})
    assert len(a) == 16
    assert config_hash(ScenarioConfig()) == config_hash(ScenarioConfig())
    assert config_hash(ScenarioConfig()) != config_hash(ScenarioConfig(seed=1))


def test_example_config_loads():
    path = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "example.yaml")
    cfg = load_config(path)
    assert cfg.scenario.carrier_frequency == 140e9
    assert cfg.scenario.tx_array.rows == 16 and cfg.sweep.trials == 20
