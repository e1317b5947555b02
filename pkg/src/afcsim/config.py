"""Experiment configuration: flat ``key = value`` text with ``#`` comments.

Every key is optional; omitted keys take the defaults below, which together
form the "nominal" preset. Later assignments of the same key win, which is
how presets and command-line overrides compose.

Schema (defaults in parentheses):

    duration (30.0)                 simulation horizon, s
    dt (0.001)                      integrator step, s
    seed (12345)                    master seed; channels derive seed+1, seed+2
    ideal_model (false)             use the true plant f, g in the control law
                                    and freeze adaptation (diagnostic mode)
    reference.amplitude (0.10471975511965977 = pi/30)   sine amplitude, rad
    reference.frequency (1.0)       sine frequency, rad/s
    plant.cart_mass (1.0)           kg
    plant.pole_mass (0.1)           kg
    plant.half_length (0.5)         m
    plant.gravity (9.8)             m/s^2
    plant.x0 (0, 0)                 initial state (angle rad, rate rad/s)
    disturbance.d0 (0.1)            disturbance amplitude
    disturbance.omega (2.0)         disturbance frequency, rad/s
    sensor_channel.delay (0.0)      s, must be a multiple of dt
    sensor_channel.drop_prob (0.0)  in [0, 1)
    sensor_channel.sample_period (dt)
    sensor_channel.seed (seed + 1)
    actuator_channel.delay (0.0)
    actuator_channel.drop_prob (0.0)
    actuator_channel.sample_period (dt)
    actuator_channel.seed (seed + 2)
    controller.k (1, 2)             feedback gains, companion form must be Hurwitz
    controller.q_diag (1, 1)        diagonal of the Lyapunov weight Q
    controller.r (0.1)              auxiliary-term weight
    controller.gamma_f (50.0)       adaptation rate for theta_f
    controller.gamma_g (50.0)       adaptation rate for theta_g
    controller.g_min (0.1)          floor kept under the g estimate
    controller.u_max (180.0)        saturation, N
    controller.filter_alpha (auto)  error filter coefficient in (0, 1];
                                    auto = 0.2 if any channel delay > 0 else 1.0
    fuzzy.lo (-pi/6, -1)            grid box lower corner
    fuzzy.hi (pi/6, 1)              grid box upper corner
    fuzzy.counts (5, 5)             memberships per dimension
    fuzzy.width_scale (1.0)         width = scale * center spacing
    fuzzy.theta_g_init (1.0)        initial theta_g entries (>= g_min)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .afhc import ControllerConfig
from .netchan import ChannelConfig, check_step_multiple
from .plant import PendulumParams

__all__ = [
    "ConfigError",
    "ReferenceConfig",
    "DisturbanceConfig",
    "FuzzyGridConfig",
    "ExperimentConfig",
    "parse_config",
    "build_config",
    "preset_text",
    "PRESETS",
]

MAX_STEPS = 10_000_000

PRESETS = {
    "nominal": "",
    "networked": ("actuator_channel.delay = 0.02\n"
                  "actuator_channel.drop_prob = 0.1\n"),
    "stress": ("actuator_channel.delay = 0.05\n"
               "actuator_channel.drop_prob = 0.2\n"),
}


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending key and line."""


@dataclass(frozen=True)
class ReferenceConfig:
    amplitude: float = math.pi / 30.0
    frequency: float = 1.0


@dataclass(frozen=True)
class DisturbanceConfig:
    d0: float = 0.1
    omega: float = 2.0


@dataclass(frozen=True, eq=False)
class FuzzyGridConfig:
    lo: np.ndarray
    hi: np.ndarray
    counts: np.ndarray
    width_scale: float = 1.0
    theta_g_init: float = 1.0


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    duration: float
    dt: float
    seed: int
    ideal_model: bool
    reference: ReferenceConfig
    plant: PendulumParams
    x0: np.ndarray
    disturbance: DisturbanceConfig
    sensor_channel: ChannelConfig
    actuator_channel: ChannelConfig
    controller: ControllerConfig
    fuzzy: FuzzyGridConfig

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float_list(raw: str) -> list:
    return [float(part) for part in raw.split(",")]


def _parse_int_list(raw: str) -> list:
    return [int(part) for part in raw.split(",")]


_SCHEMA = {
    "duration": float,
    "dt": float,
    "seed": int,
    "ideal_model": _parse_bool,
    "reference.amplitude": float,
    "reference.frequency": float,
    "plant.cart_mass": float,
    "plant.pole_mass": float,
    "plant.half_length": float,
    "plant.gravity": float,
    "plant.x0": _parse_float_list,
    "disturbance.d0": float,
    "disturbance.omega": float,
    "sensor_channel.delay": float,
    "sensor_channel.drop_prob": float,
    "sensor_channel.sample_period": float,
    "sensor_channel.seed": int,
    "actuator_channel.delay": float,
    "actuator_channel.drop_prob": float,
    "actuator_channel.sample_period": float,
    "actuator_channel.seed": int,
    "controller.k": _parse_float_list,
    "controller.q_diag": _parse_float_list,
    "controller.r": float,
    "controller.gamma_f": float,
    "controller.gamma_g": float,
    "controller.g_min": float,
    "controller.u_max": float,
    "controller.filter_alpha": float,
    "fuzzy.lo": _parse_float_list,
    "fuzzy.hi": _parse_float_list,
    "fuzzy.counts": _parse_int_list,
    "fuzzy.width_scale": float,
    "fuzzy.theta_g_init": float,
}

_DEFAULTS = {
    "duration": 30.0,
    "dt": 0.001,
    "seed": 12345,
    "ideal_model": False,
    "reference.amplitude": math.pi / 30.0,
    "reference.frequency": 1.0,
    "plant.cart_mass": 1.0,
    "plant.pole_mass": 0.1,
    "plant.half_length": 0.5,
    "plant.gravity": 9.8,
    "plant.x0": [0.0, 0.0],
    "disturbance.d0": 0.1,
    "disturbance.omega": 2.0,
    "sensor_channel.delay": 0.0,
    "sensor_channel.drop_prob": 0.0,
    "sensor_channel.sample_period": None,
    "sensor_channel.seed": None,
    "actuator_channel.delay": 0.0,
    "actuator_channel.drop_prob": 0.0,
    "actuator_channel.sample_period": None,
    "actuator_channel.seed": None,
    "controller.k": [1.0, 2.0],
    "controller.q_diag": [1.0, 1.0],
    "controller.r": 0.1,
    "controller.gamma_f": 50.0,
    "controller.gamma_g": 50.0,
    "controller.g_min": 0.1,
    "controller.u_max": 180.0,
    "controller.filter_alpha": None,
    "fuzzy.lo": [-math.pi / 6.0, -1.0],
    "fuzzy.hi": [math.pi / 6.0, 1.0],
    "fuzzy.counts": [5, 5],
    "fuzzy.width_scale": 1.0,
    "fuzzy.theta_g_init": 1.0,
}


def _read_entries(text: str, source: str, entries: dict) -> None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source} line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"{source} line {lineno}: unknown key '{key}'")
        try:
            value = _SCHEMA[key](raw)
        except ValueError as exc:
            raise ConfigError(
                f"{source} line {lineno}: malformed value for '{key}': {exc}") from None
        entries[key] = (value, f"{source} line {lineno}")


def _require(condition: bool, key: str, where: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"invalid '{key}' ({where}): {message}")


def _channel_config(values, where, prefix: str, dt: float, master_seed: int,
                    default_seed_offset: int, initial_value: float) -> ChannelConfig:
    delay = values[f"{prefix}.delay"]
    drop = values[f"{prefix}.drop_prob"]
    period = values[f"{prefix}.sample_period"]
    if period is None:
        period = dt
    seed = values[f"{prefix}.seed"]
    if seed is None:
        seed = master_seed + default_seed_offset
    _require(delay >= 0, f"{prefix}.delay", where[f"{prefix}.delay"], "must be nonnegative")
    _require(0 <= drop < 1, f"{prefix}.drop_prob", where[f"{prefix}.drop_prob"],
             "must lie in [0, 1)")
    try:
        check_step_multiple(delay, dt, f"{prefix}.delay")
        check_step_multiple(period, dt, f"{prefix}.sample_period")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _require(period > 0, f"{prefix}.sample_period", where[f"{prefix}.sample_period"],
             "must be positive")
    _require(0 <= seed < 2 ** 64, f"{prefix}.seed", where[f"{prefix}.seed"],
             "must be a 64-bit unsigned integer")
    return ChannelConfig(delay=delay, drop_prob=drop, sample_period=period,
                         seed=seed, initial_value=initial_value)


def build_config(sources: list) -> ExperimentConfig:
    """Assemble a validated ExperimentConfig from (name, text) pairs.

    Sources are applied in order; later assignments of a key override
    earlier ones.
    """
    entries: dict = {}
    for name, text in sources:
        _read_entries(text, name, entries)
    values = dict(_DEFAULTS)
    where = {key: "default" for key in _DEFAULTS}
    for key, (value, location) in entries.items():
        values[key] = value
        where[key] = location

    dt = values["dt"]
    duration = values["duration"]
    _require(dt > 0, "dt", where["dt"], "must be positive")
    _require(duration > 0, "duration", where["duration"], "must be positive")
    _require(duration / dt <= MAX_STEPS, "duration", where["duration"],
             f"duration/dt must not exceed {MAX_STEPS}")
    seed = values["seed"]
    _require(0 <= seed < 2 ** 64, "seed", where["seed"],
             "must be a 64-bit unsigned integer")
    _require(values["reference.amplitude"] >= 0, "reference.amplitude",
             where["reference.amplitude"], "must be nonnegative")
    _require(values["reference.frequency"] >= 0, "reference.frequency",
             where["reference.frequency"], "must be nonnegative")

    try:
        params = PendulumParams(cart_mass=values["plant.cart_mass"],
                                pole_mass=values["plant.pole_mass"],
                                half_length=values["plant.half_length"],
                                gravity=values["plant.gravity"])
    except ValueError as exc:
        raise ConfigError(f"invalid plant parameters: {exc}") from None

    x0 = np.asarray(values["plant.x0"], dtype=float)
    _require(x0.size == 2, "plant.x0", where["plant.x0"], "must have exactly 2 entries")
    _require(bool(np.all(np.isfinite(x0))), "plant.x0", where["plant.x0"],
             "entries must be finite")

    k = np.asarray(values["controller.k"], dtype=float)
    _require(k.size == 2, "controller.k", where["controller.k"],
             "must have exactly 2 gains for the order-2 benchmark")
    q_diag = np.asarray(values["controller.q_diag"], dtype=float)
    _require(q_diag.size == k.size, "controller.q_diag", where["controller.q_diag"],
             f"must have {k.size} entries")
    _require(bool(np.all(q_diag > 0)), "controller.q_diag", where["controller.q_diag"],
             "entries must be positive")
    alpha = values["controller.filter_alpha"]
    if alpha is None:
        any_delay = values["sensor_channel.delay"] > 0 or values["actuator_channel.delay"] > 0
        alpha = 0.2 if any_delay else 1.0
    try:
        controller = ControllerConfig(k=k, q=np.diag(q_diag), r=values["controller.r"],
                                      gamma_f=values["controller.gamma_f"],
                                      gamma_g=values["controller.gamma_g"],
                                      g_min=values["controller.g_min"],
                                      u_max=values["controller.u_max"],
                                      filter_alpha=alpha)
    except ValueError as exc:
        raise ConfigError(f"invalid controller settings ({where['controller.k']}): {exc}") from None

    lo = np.asarray(values["fuzzy.lo"], dtype=float)
    hi = np.asarray(values["fuzzy.hi"], dtype=float)
    counts = np.asarray(values["fuzzy.counts"], dtype=int)
    _require(lo.size == 2 and hi.size == 2 and counts.size == 2, "fuzzy.lo",
             where["fuzzy.lo"], "fuzzy.lo/hi/counts must each have 2 entries")
    _require(bool(np.all(hi > lo)), "fuzzy.lo", where["fuzzy.lo"],
             "must satisfy lo < hi componentwise")
    _require(bool(np.all(counts >= 1)), "fuzzy.counts", where["fuzzy.counts"],
             "must be >= 1")
    _require(values["fuzzy.width_scale"] > 0, "fuzzy.width_scale",
             where["fuzzy.width_scale"], "must be positive")
    _require(values["fuzzy.theta_g_init"] >= controller.g_min, "fuzzy.theta_g_init",
             where["fuzzy.theta_g_init"],
             "must be at least controller.g_min (the control law divides by g_hat)")

    sensor = _channel_config(values, where, "sensor_channel", dt, seed, 1,
                             initial_value=float(x0[0]))
    actuator = _channel_config(values, where, "actuator_channel", dt, seed, 2,
                               initial_value=0.0)

    return ExperimentConfig(
        duration=duration,
        dt=dt,
        seed=seed,
        ideal_model=values["ideal_model"],
        reference=ReferenceConfig(amplitude=values["reference.amplitude"],
                                  frequency=values["reference.frequency"]),
        plant=params,
        x0=x0,
        disturbance=DisturbanceConfig(d0=values["disturbance.d0"],
                                      omega=values["disturbance.omega"]),
        sensor_channel=sensor,
        actuator_channel=actuator,
        controller=controller,
        fuzzy=FuzzyGridConfig(lo=lo, hi=hi, counts=counts,
                              width_scale=values["fuzzy.width_scale"],
                              theta_g_init=values["fuzzy.theta_g_init"]),
    )


def parse_config(text: str) -> ExperimentConfig:
    """Parse one configuration document; missing keys take nominal defaults."""
    return build_config([("config", text)])


def preset_text(name: str) -> str:
    """Configuration snippet for a named preset."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset '{name}' (choose from {', '.join(sorted(PRESETS))})") from None
