import math

import numpy as np
import pytest

from afcsim import config


def test_empty_document_gives_nominal_defaults():
    cfg = config.parse_config("")
    assert cfg.duration == 30.0
    assert cfg.dt == 0.001
    assert cfg.seed == 12345
    assert cfg.reference.amplitude == pytest.approx(math.pi / 30.0)
    assert cfg.reference.frequency == 1.0
    assert cfg.plant.cart_mass == 1.0 and cfg.plant.pole_mass == 0.1
    assert cfg.disturbance.d0 == 0.1 and cfg.disturbance.omega == 2.0
    assert cfg.sensor_channel.delay == 0.0 and cfg.actuator_channel.delay == 0.0
    assert cfg.sensor_channel.drop_prob == 0.0
    assert np.array_equal(cfg.controller.k, [1.0, 2.0])
    assert np.array_equal(cfg.controller.q, np.eye(2))
    assert cfg.controller.r == 0.1
    assert cfg.controller.gamma_f == 50.0 and cfg.controller.gamma_g == 50.0
    assert cfg.controller.u_max == 180.0
    assert cfg.controller.filter_alpha == 1.0
    assert not cfg.ideal_model
    assert np.array_equal(cfg.fuzzy.counts, [5, 5])


def test_single_override_keeps_other_defaults():
    cfg = config.parse_config("actuator_channel.delay = 0.02")
    assert cfg.actuator_channel.delay == 0.02
    assert cfg.sensor_channel.delay == 0.0
    assert cfg.duration == 30.0


def test_comments_and_blank_lines_ignored():
    cfg = config.parse_config("# a comment\n\nduration = 5.0   # trailing\n")
    assert cfg.duration == 5.0


def test_non_hurwitz_gains_rejected():
    # oracle: roots of s^2 - 2s + 1 are +1, +1
    assert np.allclose(np.roots([1.0, -2.0, 1.0]), [1.0, 1.0])
    with pytest.raises(config.ConfigError, match="Hurwitz"):
        config.parse_config("controller.k = 1, -2")


def test_unknown_key_names_key_and_line():
    with pytest.raises(config.ConfigError, match=r"line 2.*'controller\.zeta'"):
        config.parse_config("duration = 5\ncontroller.zeta = 1.0\n")


def test_malformed_value_names_key_and_line():
    with pytest.raises(config.ConfigError, match=r"line 1.*'dt'"):
        config.parse_config("dt = fast")


def test_missing_equals_rejected():
    with pytest.raises(config.ConfigError, match="key = value"):
        config.parse_config("duration 5")


@pytest.mark.parametrize("text,match", [
    ("dt = 0", "dt"),
    ("duration = -1", "duration"),
    ("duration = 20000\ndt = 1e-6", "exceed"),
    ("actuator_channel.drop_prob = 1.0", "drop_prob"),
    ("actuator_channel.delay = 0.0205", "multiple"),
    ("controller.filter_alpha = 0", "filter_alpha"),
    ("controller.q_diag = 1, -1", "q_diag"),
    ("fuzzy.theta_g_init = 0.01", "g_min"),
    ("fuzzy.lo = 1, 1\nfuzzy.hi = -1, -1", "lo < hi"),
    ("plant.x0 = 1", "x0"),
    ("plant.pole_mass = -0.1", "positive"),
])
def test_invariant_violations_rejected(text, match):
    with pytest.raises(config.ConfigError, match=match):
        config.parse_config(text)


def test_filter_alpha_auto_resolution():
    assert config.parse_config("").controller.filter_alpha == 1.0
    assert config.parse_config("actuator_channel.delay = 0.02").controller.filter_alpha == 0.2
    assert config.parse_config("sensor_channel.delay = 0.01").controller.filter_alpha == 0.2
    cfg = config.parse_config("actuator_channel.delay = 0.02\ncontroller.filter_alpha = 0.7")
    assert cfg.controller.filter_alpha == 0.7


def test_channel_seeds_derived_from_master_seed():
    cfg = config.parse_config("seed = 1000")
    assert cfg.sensor_channel.seed == 1001
    assert cfg.actuator_channel.seed == 1002
    cfg = config.parse_config("seed = 1000\nsensor_channel.seed = 7")
    assert cfg.sensor_channel.seed == 7


def test_sample_period_defaults_to_dt():
    cfg = config.parse_config("dt = 0.002")
    assert cfg.sensor_channel.sample_period == 0.002
    assert cfg.actuator_channel.sample_period == 0.002


def test_networked_preset():
    cfg = config.build_config([("preset", config.preset_text("networked"))])
    assert cfg.actuator_channel.delay == 0.02
    assert cfg.actuator_channel.drop_prob == 0.1
    assert cfg.sensor_channel.delay == 0.0
    assert cfg.controller.filter_alpha == 0.2


def test_stress_preset():
    cfg = config.build_config([("preset", config.preset_text("stress"))])
    assert cfg.actuator_channel.delay == 0.05
    assert cfg.actuator_channel.drop_prob == 0.2


def test_unknown_preset_rejected():
    with pytest.raises(config.ConfigError, match="unknown preset"):
        config.preset_text("turbo")


def test_later_sources_override_earlier_ones():
    cfg = config.build_config([
        ("preset", config.preset_text("networked")),
        ("file", "actuator_channel.delay = 0.01\nduration = 7"),
    ])
    assert cfg.actuator_channel.delay == 0.01
    assert cfg.actuator_channel.drop_prob == 0.1
    assert cfg.duration == 7.0


def test_duplicate_key_last_wins():
    cfg = config.parse_config("duration = 5\nduration = 9")
    assert cfg.duration == 9.0


def test_x0_override():
    cfg = config.parse_config("plant.x0 = -0.1, 0.2")
    assert np.allclose(cfg.x0, [-0.1, 0.2])
