"""Chain-of-integrators plant models and a fixed-step RK4 integrator.

The plant state is x = (x1, ..., xn) where x1 is the output and each
x_{i+1} is the derivative of x_i; only the top derivative carries the
nonlinear terms: dx_n/dt = f(x) + g(x) u + d(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "DynamicsOverflowError",
    "PendulumParams",
    "PlantModel",
    "state_vec",
    "pendulum_f",
    "pendulum_g",
    "pendulum",
    "chain_derivative",
    "rk4_step",
]


class DynamicsOverflowError(RuntimeError):
    """Dynamics produced a non-finite value; the simulation step must abort."""


def state_vec(values, n: int | None = None) -> np.ndarray:
    """Validated plant state: a finite 1-D float vector of length n >= 1."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size < 1:
        raise ValueError("state vector must have length >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state vector contains non-finite entries")
    if n is not None and arr.size != n:
        raise ValueError(f"state vector has length {arr.size}, expected {n}")
    return arr


@dataclass(frozen=True)
class PendulumParams:
    """Cart-pole benchmark parameters, all strictly positive."""

    cart_mass: float = 1.0
    pole_mass: float = 0.1
    half_length: float = 0.5
    gravity: float = 9.8

    def __post_init__(self):
        for name in ("cart_mass", "pole_mass", "half_length", "gravity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class PlantModel:
    """Order-n chain-of-integrators plant with drift f, input gain g, and
    disturbance d(t).

    g_floor declares the positive lower bound |g(x)| >= g_floor assumed to
    hold on the intended operating region; it is not enforced pointwise.
    """

    n: int
    f: Callable[[np.ndarray], float]
    g: Callable[[np.ndarray], float]
    d: Callable[[float], float]
    g_floor: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("plant order n must be >= 1")
        if self.g_floor < 0:
            raise ValueError("g_floor must be nonnegative")


def _pendulum_denominator(params: PendulumParams, x1: float) -> float:
    total = params.cart_mass + params.pole_mass
    cos1 = math.cos(x1)
    return params.half_length * (4.0 / 3.0 - params.pole_mass * cos1 * cos1 / total)


def pendulum_f(params: PendulumParams, x) -> float:
    """Drift acceleration of the pole angle for the cart-pole benchmark."""
    x = state_vec(x, 2)
    x1, x2 = x
    total = params.cart_mass + params.pole_mass
    sin1 = math.sin(x1)
    cos1 = math.cos(x1)
    num = (params.gravity * sin1
           - params.pole_mass * params.half_length * x2 * x2 * cos1 * sin1 / total)
    return num / _pendulum_denominator(params, x1)


def pendulum_g(params: PendulumParams, x) -> float:
    """Input gain from applied force to pole-angle acceleration."""
    x = state_vec(x, 2)
    total = params.cart_mass + params.pole_mass
    num = math.cos(x[0]) / total
    return num / _pendulum_denominator(params, x[0])


def pendulum(params: PendulumParams = PendulumParams(),
             d0: float = 0.0, omega_d: float = 0.0,
             g_floor: float = 0.5) -> PlantModel:
    """Two-state pole-balancing plant with sinusoidal disturbance d0 sin(w t).

    The default g_floor of 0.5 holds for |x1| <= pi/3 with the default
    parameters.
    """

    def f(x: np.ndarray) -> float:
        return pendulum_f(params, x)

    def g(x: np.ndarray) -> float:
        return pendulum_g(params, x)

    def d(t: float) -> float:
        return d0 * math.sin(omega_d * t)

    return PlantModel(n=2, f=f, g=g, d=d, g_floor=g_floor)


def _chain(plant: PlantModel, x: np.ndarray, u_applied: float,
           d_value: float) -> np.ndarray:
    out = np.empty(plant.n)
    out[:-1] = x[1:]
    # overflow to inf/nan is expected on divergence and reported as an error
    with np.errstate(all="ignore"):
        out[-1] = plant.f(x) + plant.g(x) * u_applied + d_value
    if not np.all(np.isfinite(out)):
        raise DynamicsOverflowError("dynamics overflow: non-finite derivative")
    return out


def chain_derivative(plant: PlantModel, x, u_applied: float, t: float) -> np.ndarray:
    """Time derivative (x2, ..., xn, f(x) + g(x) u + d(t)) of the chain."""
    x = state_vec(x, plant.n)
    return _chain(plant, x, u_applied, plant.d(t))


def rk4_step(plant: PlantModel, x, u_applied: float, t: float,
             dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta advance by dt.

    Both the applied input and the disturbance value d(t) are held constant
    over the step (zero-order hold), matching sampled actuation.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = state_vec(x, plant.n)
    d_value = plant.d(t)
    k1 = _chain(plant, x, u_applied, d_value)
    k2 = _chain(plant, x + 0.5 * dt * k1, u_applied, d_value)
    k3 = _chain(plant, x + 0.5 * dt * k2, u_applied, d_value)
    k4 = _chain(plant, x + dt * k3, u_applied, d_value)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DynamicsOverflowError("dynamics overflow: non-finite state")
    return out
