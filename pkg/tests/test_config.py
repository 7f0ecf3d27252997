"""Configuration parsing, validation, and round-trip tests."""

import numpy as np
import pytest

from thetanet.config import MODELS, ExperimentConfig, parse_range
from thetanet.distributions import DegreeDistribution, HeterogeneityLaw
from thetanet.errors import ConfigError

SAMPLE = """\
[run]
model = theta-syn
seed = 42
paper_scale = false

[p_in]
kind = uniform-width
mean = 100
sigma = 5

[p_out]
kind = shifted-beta
alpha = 3
lo = 50
hi = 150

[heterogeneity]
kind = lorentzian
center = 1.0
scale = 0.05

[params]
K = -2.0
tau = 1.0
n = 500
t_end = 40
"""


def test_parse_types():
    cfg = ExperimentConfig.from_ini(SAMPLE)
    assert cfg.get("run", "model") == "theta-syn"
    assert cfg.get("run", "seed") == 42 and isinstance(cfg.get("run", "seed"), int)
    assert cfg.get("run", "paper_scale") is False
    assert cfg.get("params", "K") == -2.0
    assert cfg.get("params", "n") == 500
    assert cfg.get("p_in", "mean") == 100.0
    assert cfg.get("missing", "key", "fallback") == "fallback"


def test_round_trip_is_lossless():
    cfg = ExperimentConfig.from_ini(SAMPLE)
    text = cfg.to_ini()
    again = ExperimentConfig.from_ini(text)
    assert again.sections == cfg.sections
    assert again.to_ini() == text
    assert again.hash() == cfg.hash()


def test_float_serialization_keeps_full_precision():
    cfg = ExperimentConfig({"params": {"eta0": 0.1 + 0.2}})
    back = ExperimentConfig.from_ini(cfg.to_ini())
    assert back.get("params", "eta0") == 0.1 + 0.2


def test_unknown_section_and_key_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[typo]\nx = 1\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[params]\nnot_a_key = 1\n")
    with pytest.raises(ConfigError):
        ExperimentConfig({"params": {"not_a_key": 1.0}})
    with pytest.raises(ConfigError):
        ExperimentConfig({"typo": {}})


def test_unknown_model_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig({"run": {"model": "hodgkin"}})
    for model in MODELS:
        ExperimentConfig({"run": {"model": model}})


def test_bad_values_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[run]\nseed = 1.5\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[run]\npaper_scale = maybe\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("[params]\nK = strong\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_ini("params]\nbroken")


def test_require_and_get():
    cfg = ExperimentConfig.from_ini(SAMPLE)
    assert cfg.require("params", "tau") == 1.0
    with pytest.raises(ConfigError):
        cfg.require("params", "g")


def test_override_spellings():
    cfg = ExperimentConfig.from_ini(SAMPLE)
    cfg.override("t_end=5")               # bare key lands in [params]
    assert cfg.get("params", "t_end") == 5.0
    cfg.override("run.seed=7")
    assert cfg.get("run", "seed") == 7
    cfg.override("p_in.sigma=50")
    assert cfg.get("p_in", "sigma") == 50.0
    with pytest.raises(ConfigError):
        cfg.override("no_equals_sign")
    with pytest.raises(ConfigError):
        cfg.override("params.bogus=1")


def test_config_keys_are_case_sensitive():
    cfg = ExperimentConfig.from_ini("[params]\nK = 5\n")
    assert cfg.get("params", "K") == 5.0
    assert cfg.get("params", "k") is None


def test_sections_build_distribution_objects():
    cfg = ExperimentConfig.from_ini(SAMPLE)
    p_in = cfg.degree_distribution("p_in")
    assert isinstance(p_in, DegreeDistribution)
    assert p_in.mean == pytest.approx(100.0)
    p_out = cfg.degree_distribution("p_out")
    assert p_out.kind == "shifted-beta"
    law = cfg.heterogeneity_law()
    assert isinstance(law, HeterogeneityLaw)
    assert law.kind == "lorentzian"
    assert cfg.degree_distribution("grid") is None
    assert ExperimentConfig({}).heterogeneity_law() is None


def test_bad_distribution_section_reports_config_error():
    cfg = ExperimentConfig.from_ini("[p_in]\nkind = uniform-width\n"
                                    "mean = 10\nsigma = 50\n")
    with pytest.raises(ConfigError):
        cfg.degree_distribution("p_in")
    cfg = ExperimentConfig.from_ini("[heterogeneity]\nkind = cauchy\n"
                                    "center = 0\nscale = 1\n")
    with pytest.raises(ConfigError):
        cfg.heterogeneity_law()


def test_hash_tracks_content():
    a = ExperimentConfig({"params": {"K": 1.0}})
    b = ExperimentConfig({"params": {"K": 2.0}})
    assert a.hash() != b.hash()
    assert a.hash() == ExperimentConfig({"params": {"K": 1.0}}).hash()


def test_copy_is_deep_enough():
    cfg = ExperimentConfig({"params": {"K": 1.0}})
    dup = cfg.copy()
    dup.set("params", "K", 3.0)
    assert cfg.get("params", "K") == 1.0


def test_from_file(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(SAMPLE, encoding="ascii")
    cfg = ExperimentConfig.from_file(path)
    assert cfg.get("run", "seed") == 42
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(tmp_path / "missing.ini")


def test_parse_range():
    values = parse_range("0:1:5")
    assert values == pytest.approx(np.linspace(0.0, 1.0, 5))
    assert parse_range("2:2:1") == pytest.approx([2.0])
    with pytest.raises(ConfigError):
        parse_range("0:1")
    with pytest.raises(ConfigError):
        parse_range("0:one:5")
    with pytest.raises(ConfigError):
        parse_range("0:1:0")
