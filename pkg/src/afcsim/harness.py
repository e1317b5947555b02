"""Closed-loop simulation of plant + network channels + adaptive controller,
with metrics and CSV trace output.

Per-step loop order: sense (through the sensor channel) -> build the
reference and error vector -> filter the error -> evaluate the fuzzy
estimates -> control law -> push the command through the actuator channel
-> integrate the plant with the delivered input -> adapt. Runs are fully
deterministic for a fixed configuration, including the channel seeds.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import afhc, fuzzy, netchan, plant
from .config import ExperimentConfig

__all__ = [
    "TRACE_HEADER",
    "SimulationTrace",
    "Metrics",
    "reference_derivatives",
    "run_experiment",
    "compute_metrics",
    "write_trace",
    "write_metrics",
]

TRACE_HEADER = "t,x1,x2,xd,e,e_filt,u,u_applied,f_hat,g_hat,V,drop_sensor,drop_actuator"

# Fraction of the horizon treated as steady state for the error metric.
STEADY_STATE_FRACTION = 0.2


@dataclass(eq=False)
class SimulationTrace:
    """Per-step record of one run, plus the final adapted parameters.

    All columns share the same length; t is uniformly spaced by dt. When a
    run aborts (non-finite dynamics or a singular control), the arrays are
    truncated at the failing step and abort_reason says why.
    """

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    xd: np.ndarray
    e: np.ndarray
    e_filt: np.ndarray
    u: np.ndarray
    u_applied: np.ndarray
    f_hat: np.ndarray
    g_hat: np.ndarray
    v: np.ndarray
    drop_sensor: np.ndarray
    drop_actuator: np.ndarray
    u_aux: np.ndarray
    abort_reason: str | None = None
    theta_f: np.ndarray | None = None
    theta_g: np.ndarray | None = None
    grid: fuzzy.MembershipGrid | None = None

    def __len__(self) -> int:
        return self.t.size


@dataclass(frozen=True)
class Metrics:
    rmse: float
    steady_state_error_pct: float
    max_abs_u: float
    diverged: bool


def reference_derivatives(amplitude: float, frequency: float, t: float,
                          n: int) -> np.ndarray:
    """Reference A sin(w t) and its first n derivatives, length n + 1."""
    out = np.empty(n + 1)
    for k in range(n + 1):
        phase = frequency * t + k * (math.pi / 2.0)
        out[k] = amplitude * (frequency ** k) * math.sin(phase)
    return out


def run_experiment(cfg: ExperimentConfig) -> tuple:
    """Simulate the configured loop; returns (SimulationTrace, Metrics).

    The state travels to the controller through one sensor packet per step:
    both components use channels with the same seed, so a drop stalls the
    whole measurement. In ideal_model mode the control law uses the true
    plant f and g and adaptation is frozen (diagnostic configuration for
    checking the Lyapunov decrement).
    """
    n_steps = cfg.n_steps
    dyn = plant.pendulum(cfg.plant, d0=cfg.disturbance.d0, omega_d=cfg.disturbance.omega)
    grid = fuzzy.grid_over_box(cfg.fuzzy.lo, cfg.fuzzy.hi, cfg.fuzzy.counts,
                               cfg.fuzzy.width_scale)
    approx_f = fuzzy.FuzzyApproximator(grid, np.zeros(grid.rule_count))
    approx_g = fuzzy.FuzzyApproximator(grid, np.full(grid.rule_count,
                                                     cfg.fuzzy.theta_g_init))
    a_c = afhc.companion(cfg.controller.k)
    p = afhc.solve_lyapunov(a_c, cfg.controller.q)

    sense_x1 = netchan.Channel(cfg.sensor_channel)
    sense_x2 = netchan.Channel(dataclasses.replace(cfg.sensor_channel,
                                                   initial_value=float(cfg.x0[1])))
    actuator = netchan.Channel(cfg.actuator_channel)

    cols = {name: np.empty(n_steps) for name in
            ("t", "x1", "x2", "xd", "e", "e_filt", "u", "u_applied",
             "f_hat", "g_hat", "v", "u_aux")}
    drop_sensor = np.zeros(n_steps, dtype=bool)
    drop_actuator = np.zeros(n_steps, dtype=bool)

    x = cfg.x0.copy()
    alpha = cfg.controller.filter_alpha
    e_filtered = None
    abort_reason = None
    steps_done = 0

    for i in range(n_steps):
        t = i * cfg.dt

        sample = sense_x1.push(t, float(x[0]))
        sense_x2.push(t, float(x[1]))
        x_meas = np.array([sense_x1.output(t), sense_x2.output(t)])

        ref = reference_derivatives(cfg.reference.amplitude, cfg.reference.frequency,
                                    t, dyn.n)
        e_raw = ref[:dyn.n] - x_meas
        e_filtered = e_raw if e_filtered is None else afhc.filter_error(
            e_filtered, e_raw, alpha)

        xi = grid.regressor(x_meas)
        if cfg.ideal_model:
            f_hat = dyn.f(x_meas)
            g_hat = dyn.g(x_meas)
        else:
            f_hat = float(approx_f.theta @ xi)
            g_hat = float(approx_g.theta @ xi)

        try:
            u = afhc.control_law(cfg.controller, p, f_hat, g_hat, e_filtered, ref[dyn.n])
        except afhc.SingularControlError as exc:
            abort_reason = str(exc)
            break

        drop_act = actuator.push(t, u).dropped
        u_applied = actuator.output(t)

        cols["t"][i] = t
        cols["x1"][i] = x[0]
        cols["x2"][i] = x[1]
        cols["xd"][i] = ref[0]
        cols["e"][i] = ref[0] - x[0]
        cols["e_filt"][i] = e_filtered[0]
        cols["u"][i] = u
        cols["u_applied"][i] = u_applied
        cols["f_hat"][i] = f_hat
        cols["g_hat"][i] = g_hat
        cols["v"][i] = float(e_filtered @ p.P @ e_filtered)
        cols["u_aux"][i] = afhc.h_infinity_term(p, e_filtered, cfg.controller.r)
        drop_sensor[i] = sample.dropped
        drop_actuator[i] = drop_act
        steps_done = i + 1

        try:
            x = plant.rk4_step(dyn, x, u_applied, t, cfg.dt)
        except plant.DynamicsOverflowError as exc:
            abort_reason = str(exc)
            break

        if not cfg.ideal_model:
            afhc.adapt_step(approx_f, approx_g, xi, e_filtered, p, u,
                            cfg.controller, cfg.dt)

    if steps_done == 0:
        raise RuntimeError(f"run aborted before completing one step: {abort_reason}")
    trace = SimulationTrace(
        t=cols["t"][:steps_done],
        x1=cols["x1"][:steps_done],
        x2=cols["x2"][:steps_done],
        xd=cols["xd"][:steps_done],
        e=cols["e"][:steps_done],
        e_filt=cols["e_filt"][:steps_done],
        u=cols["u"][:steps_done],
        u_applied=cols["u_applied"][:steps_done],
        f_hat=cols["f_hat"][:steps_done],
        g_hat=cols["g_hat"][:steps_done],
        v=cols["v"][:steps_done],
        drop_sensor=drop_sensor[:steps_done],
        drop_actuator=drop_actuator[:steps_done],
        u_aux=cols["u_aux"][:steps_done],
        abort_reason=abort_reason,
        theta_f=approx_f.theta.copy(),
        theta_g=approx_g.theta.copy(),
        grid=grid,
    )
    return trace, compute_metrics(trace, cfg)


def compute_metrics(trace: SimulationTrace, cfg: ExperimentConfig) -> Metrics:
    """Tracking metrics over a trace.

    steady_state_error_pct is the peak |e| over the final fifth of the
    horizon as a percentage of the reference amplitude; a diverged run
    reports it as unbounded.
    """
    if len(trace) == 0:
        raise ValueError("cannot compute metrics for an empty trace")
    diverged = trace.abort_reason is not None
    rmse = float(np.sqrt(np.mean(trace.e ** 2)))
    max_abs_u = float(np.max(np.abs(trace.u)))
    if diverged:
        pct = math.inf
    else:
        n_tail = max(1, int(round(STEADY_STATE_FRACTION * len(trace))))
        tail_peak = float(np.max(np.abs(trace.e[-n_tail:])))
        if cfg.reference.amplitude > 0:
            pct = 100.0 * tail_peak / cfg.reference.amplitude
        else:
            pct = 0.0 if tail_peak == 0.0 else math.inf
    return Metrics(rmse=rmse, steady_state_error_pct=pct,
                   max_abs_u=max_abs_u, diverged=diverged)


def write_trace(trace: SimulationTrace, path) -> None:
    """Write the trace as CSV with a fixed header and 0/1 drop flags.

    Values are formatted in scientific notation with 10 significant digits.
    """
    lines = [TRACE_HEADER]
    for i in range(len(trace)):
        lines.append(",".join([
            f"{trace.t[i]:.9e}", f"{trace.x1[i]:.9e}", f"{trace.x2[i]:.9e}",
            f"{trace.xd[i]:.9e}", f"{trace.e[i]:.9e}", f"{trace.e_filt[i]:.9e}",
            f"{trace.u[i]:.9e}", f"{trace.u_applied[i]:.9e}",
            f"{trace.f_hat[i]:.9e}", f"{trace.g_hat[i]:.9e}", f"{trace.v[i]:.9e}",
            str(int(trace.drop_sensor[i])), str(int(trace.drop_actuator[i])),
        ]))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write trace to {path}: {exc}") from exc


def write_metrics(metrics: Metrics, path) -> None:
    """Write metrics as one 'key = value' line each."""
    lines = [
        f"rmse = {metrics.rmse:.9e}",
        f"steady_state_error_pct = {metrics.steady_state_error_pct:.9e}",
        f"max_abs_u = {metrics.max_abs_u:.9e}",
        f"diverged = {'true' if metrics.diverged else 'false'}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
