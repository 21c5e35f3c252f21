"""Beam selection, support detection and next-slot prediction.

Two predictors live here: the position-domain one used by the cooperative
tracker, and the beam-index extrapolation used by the fast channel
tracking (FCT) baseline.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ArrayConfig, PilotObservation, normalized_directions, spatial_direction
from .errors import InvalidGeometryError, NoSignalError
from .geometry import BaseStationGeometry, aoa_from_position, as_position

ACQUISITION_SLOTS = 3


class Mode(Enum):
    ACQUISITION = "acquisition"
    TRACKING = "tracking"


@dataclass
class TrackState:
    """Per-BS, per-UE tracker memory.

    `history` holds the last three (timeslot, value) pairs; the value is a
    position for the proposed tracker and a beam index for FCT.
    """

    history: deque = field(default_factory=lambda: deque(maxlen=ACQUISITION_SLOTS))
    current_beam: int | None = None
    consecutive_failures: int = 0

    @property
    def mode(self) -> Mode:
        if len(self.history) < ACQUISITION_SLOTS:
            return Mode.ACQUISITION
        return Mode.TRACKING

    def push(self, timeslot: int, value) -> None:
        self.history.append((timeslot, value))
        self.consecutive_failures = 0

    def reset(self) -> None:
        self.history.clear()
        self.consecutive_failures += 1

    def values(self) -> list:
        return [v for _, v in self.history]


@dataclass(frozen=True)
class EnergyCheck:
    estimated_energy: float
    expected_energy: float

    def __post_init__(self):
        if self.estimated_energy < 0 or self.expected_energy < 0:
            raise ValueError("energies must be non-negative")


def strongest_element(observation) -> int:
    """1-based beam of the largest-magnitude entry; ties go to the lowest index.

    Accepts a :class:`PilotObservation` (the beam label is taken from its
    `indices`) or a bare vector (position in the vector).
    """
    if isinstance(observation, PilotObservation):
        values, indices = observation.estimated_beamspace, observation.indices
    else:
        values = np.asarray(observation)
        indices = np.arange(1, values.size + 1)
    if values.size == 0:
        raise ValueError("empty observation")
    mag = np.abs(values)
    if not np.any(mag > 0):
        raise NoSignalError("observation has no energy")
    return int(indices[int(np.argmax(mag))])


def aoa_from_beam_index(n: int, config: ArrayConfig) -> float:
    n_elements = config.n_elements
    if not 1 <= n <= n_elements:
        raise InvalidGeometryError(f"beam {n} outside 1..{n_elements}")
    arg = (n - (n_elements + 1) / 2) / (n_elements * config.spacing_ratio)
    if abs(arg) > 1:
        raise InvalidGeometryError(f"beam {n} points outside the visible region")
    return math.asin(arg)


def beam_index_from_aoa(theta: float, config: ArrayConfig) -> int:
    """Beam whose lens direction is closest to the spatial direction of `theta`."""
    psi = spatial_direction(theta, config)
    # argmin returns the first minimum, i.e. the lowest index on ties
    return int(np.argmin(np.abs(normalized_directions(config.n_elements) - psi))) + 1


def support_set(n: int, sparsity: int, n_elements: int) -> list[int]:
    """Indices of the dominant beamspace entries around beam `n`, wrapped modulo N."""
    if not 1 <= sparsity <= n_elements:
        raise ValueError(f"sparsity {sparsity} must lie in 1..{n_elements}")
    if sparsity % 2 == 0:
        lo, hi = n - sparsity // 2, n + (sparsity - 2) // 2
    else:
        lo, hi = n - (sparsity - 1) // 2, n + (sparsity - 1) // 2
    return [(x - 1) % n_elements + 1 for x in range(lo, hi + 1)]


def predict_position(history) -> np.ndarray:
    """Linear-motion prediction of the next position from three samples.

    The averaged velocity telescopes, so the middle sample drops out.
    """
    if len(history) != 3:
        raise ValueError("exactly three positions are required")
    r0, _, r2 = (as_position(p) for p in history)
    return r2 + (r2 - r0) / 2


def predict_aoa(predicted, bs: BaseStationGeometry) -> float:
    return aoa_from_position(predicted, bs)


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def fct_predict_beam(beam_history, n_elements: int | None = None) -> int:
    """FCT baseline: extrapolate the beam index linearly, clamped to the codebook."""
    if len(beam_history) != 3:
        raise ValueError("exactly three beam indices are required")
    n0, _, n2 = beam_history
    predicted = _round_half_away(n2 + (n2 - n0) / 2)
    upper = n_elements if n_elements is not None else predicted
    return min(max(predicted, 1), upper)


def energy_gate(check: EnergyCheck, threshold_fraction: float = 0.5) -> bool:
    """True when the received energy reaches the given share of the expected energy."""
    if not 0 < threshold_fraction <= 1:
        raise ValueError("threshold_fraction must lie in (0, 1]")
    return check.estimated_energy >= threshold_fraction * check.expected_energy
