"""Simulated network channel: constant transport delay, seeded Bernoulli
packet loss, and hold-last-sample compensation on the receiving side.

The random generator is numpy's default PCG64 stream seeded per channel, so
drop sequences are bit-reproducible for a fixed (seed, push sequence).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelConfig",
    "TimedSample",
    "Channel",
    "write_event_log",
    "check_step_multiple",
]


@dataclass(frozen=True)
class ChannelConfig:
    delay: float = 0.0
    drop_prob: float = 0.0
    sample_period: float = 0.001
    seed: int = 0
    initial_value: float = 0.0

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("delay must be nonnegative")
        if not 0.0 <= self.drop_prob < 1.0:
            raise ValueError("drop_prob must lie in [0, 1)")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def check_step_multiple(value: float, dt: float, name: str) -> int:
    """Validate that value is an exact nonnegative multiple of dt; return it."""
    k = round(value / dt)
    if k < 0 or abs(value - k * dt) > 1e-9 * dt:
        raise ValueError(f"{name} ({value!r}) must be an exact multiple of dt ({dt!r})")
    return k


@dataclass(frozen=True)
class TimedSample:
    send_time: float
    value: float
    dropped: bool


class Channel:
    """Sequential delay line owned by one simulation loop.

    push() logs every offered sample with its Bernoulli drop decision and
    enqueues survivors for delivery at send_time + delay; output() returns
    the most recently delivered value, or the configured initial value while
    the pipeline is still empty.
    """

    def __init__(self, config: ChannelConfig):
        self.config = config
        self._rng = np.random.default_rng(int(config.seed))
        self._pending: deque[tuple[float, float]] = deque()
        self._held = float(config.initial_value)
        self._last_push = -math.inf
        self._last_query = -math.inf
        # Delivery comparisons tolerate float noise well below one sample.
        self._time_eps = config.sample_period * 1e-6
        self.log: list[TimedSample] = []

    def push(self, t: float, value: float) -> TimedSample:
        """Offer a sample at send time t (strictly increasing across pushes)."""
        t = float(t)
        if t <= self._last_push:
            raise ValueError(
                f"push times must be strictly increasing (got {t} after {self._last_push})")
        self._last_push = t
        dropped = bool(self._rng.random() < self.config.drop_prob)
        if not dropped:
            self._pending.append((t, float(value)))
        sample = TimedSample(send_time=t, value=float(value), dropped=dropped)
        self.log.append(sample)
        return sample

    def output(self, t: float) -> float:
        """Receiver-side value at time t (nondecreasing across queries)."""
        t = float(t)
        if t < self._last_query:
            raise ValueError(
                f"output times must be nondecreasing (got {t} after {self._last_query})")
        self._last_query = t
        while self._pending and self._pending[0][0] + self.config.delay <= t + self._time_eps:
            self._held = self._pending.popleft()[1]
        return self._held


def write_event_log(channel: Channel, path) -> None:
    """Export the channel's sample log as CSV.

    Columns: send_time, value, dropped (0/1), delivery_time (nan for drops).
    """
    lines = ["send_time,value,dropped,delivery_time"]
    for sample in channel.log:
        delivery = math.nan if sample.dropped else sample.send_time + channel.config.delay
        lines.append(f"{sample.send_time:.9e},{sample.value:.9e},"
                     f"{int(sample.dropped)},{delivery:.9e}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
