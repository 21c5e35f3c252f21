"""Two-way time-of-arrival ranging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SPEED_OF_LIGHT, ArrayConfig
from .errors import InvalidRangeError, InvalidTimestampsError
from .metrics import deafness


@dataclass(frozen=True)
class ToATimestamps:
    t1: float  # BS transmit
    t2: float  # UE receive
    t3: float  # UE transmit
    t4: float  # BS receive


@dataclass(frozen=True)
class RangingConfig:
    timestamp_jitter_std: float = 0.0
    ue_processing_delay: float = 1e-6

    def __post_init__(self):
        if self.timestamp_jitter_std < 0 or self.ue_processing_delay < 0:
            raise ValueError("jitter and processing delay must be non-negative")


def two_way_toa_distance(ts: ToATimestamps) -> float:
    residual = (ts.t4 - ts.t1) - (ts.t3 - ts.t2)
    if residual < 0:
        raise InvalidTimestampsError(f"negative round-trip residual {residual:g} s")
    return residual / 2 * SPEED_OF_LIGHT


def generate_timestamps(true_distance: float, config: RangingConfig,
                        rng: np.random.Generator | None = None) -> ToATimestamps:
    """Timestamps of one ranging exchange, each with independent Gaussian jitter."""
    if not true_distance > 0:
        raise InvalidRangeError(f"distance must be positive, got {true_distance}")
    flight = true_distance / SPEED_OF_LIGHT
    clean = np.array([0.0, flight, flight + config.ue_processing_delay,
                      2 * flight + config.ue_processing_delay])
    if config.timestamp_jitter_std > 0:
        if rng is None:
            rng = np.random.default_rng()
        clean = clean + rng.normal(0.0, config.timestamp_jitter_std, 4)
        if clean[3] <= clean[0]:
            clean[3] = np.nextafter(clean[0], np.inf)
    return ToATimestamps(*(float(t) for t in clean))


def in_beam(theta_true: float, theta_estimated: float, config: ArrayConfig,
            domain: str = "psi") -> bool:
    """Whether the UE answers a ranging request sent toward `theta_estimated`."""
    return deafness(theta_true, theta_estimated, config, domain) < 100.0
