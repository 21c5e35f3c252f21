"""Ground-truth UE trajectories sampled once per timeslot."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigError
from .geometry import as_position

KMH = 1000 / 3600


@dataclass(frozen=True)
class Trajectory:
    """UE path ``r(t) = start + along(t) * heading + cross(t) * normal``.

    `t` is in timeslots and may be fractional. `along_step` is the distance
    covered along the base heading per timeslot.
    """

    start: np.ndarray
    heading: float
    along_step: float
    timeslot_duration: float
    average_speed: float
    amplitude: float = 0.0
    period: float = math.inf

    def sample(self, t: float) -> np.ndarray:
        along = self.along_step * t
        cross = 0.0 if self.amplitude == 0 else self.amplitude * math.sin(2 * math.pi * t / self.period)
        c, s = math.cos(self.heading), math.sin(self.heading)
        return self.start + np.array([along * c - cross * s, along * s + cross * c])

    def samples(self, timeslots) -> np.ndarray:
        return np.array([self.sample(t) for t in timeslots])


def linear_trajectory(start, heading: float, speed: float, dt: float = 1.0) -> Trajectory:
    if speed < 0:
        raise ConfigError("speed must be non-negative")
    if not dt > 0:
        raise ConfigError("timeslot duration must be positive")
    return Trajectory(as_position(start), float(heading), speed * dt, dt, speed)


def _period_arc_length(along_step: float, amplitude: float, period: float) -> float:
    """Arc length of one sinusoid period, in meters, with `along_step` meters per slot."""
    w = 2 * math.pi / period

    def speed(tau):
        return math.hypot(along_step, amplitude * w * math.cos(w * tau))

    length, _ = integrate.quad(speed, 0.0, period, limit=200, epsabs=1e-12, epsrel=1e-12)
    return length


def sinusoidal_trajectory(start, base_heading: float, speed: float, amplitude: float = 2.0,
                          period: float = 6.0, dt: float = 1.0) -> Trajectory:
    """Sinusoidal weave around `base_heading` with path speed averaging `speed`.

    The along-track rate is solved so that the arc length of one period equals
    ``speed * dt * period``.
    """
    if speed < 0 or amplitude < 0:
        raise ConfigError("speed and amplitude must be non-negative")
    if period < 2:
        raise ConfigError("period must be at least 2 timeslots")
    if not dt > 0:
        raise ConfigError("timeslot duration must be positive")
    if amplitude == 0:
        return linear_trajectory(start, base_heading, speed, dt)
    target = speed * dt * period
    # with no along-track motion the path still covers 4 * amplitude per period
    if 4 * amplitude >= target:
        raise ConfigError(
            f"amplitude {amplitude} m over {period} slots needs more than {speed} m/s")
    along_step = optimize.brentq(
        lambda u: _period_arc_length(u, amplitude, period) - target,
        0.0, speed * dt, xtol=1e-14, rtol=1e-14)
    return Trajectory(as_position(start), float(base_heading), along_step, dt, speed,
                      float(amplitude), float(period))
