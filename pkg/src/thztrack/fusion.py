"""Fusion center: center of gravity of the per-BS position estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TotalTrackingLossError
from .geometry import BaseStationGeometry, aoa_from_position, as_position


@dataclass(frozen=True)
class PositionEstimate:
    bs_id: int
    position: np.ndarray | None
    timeslot: int
    valid: bool = True


@dataclass(frozen=True)
class FusedPosition:
    position: np.ndarray
    contributing_count: int
    timeslot: int


def center_of_gravity(estimates) -> FusedPosition:
    """Unweighted mean of the valid estimates.

    Raises TotalTrackingLossError when no estimate is valid.
    """
    valid = [e for e in estimates if e.valid]
    if not valid:
        raise TotalTrackingLossError("no base station holds a valid estimate")
    # sorting fixes the summation order, so the result is bit-identical for any input order
    pts = sorted((tuple(as_position(e.position)) for e in valid))
    mean = np.array([sum(p[0] for p in pts), sum(p[1] for p in pts)]) / len(pts)
    return FusedPosition(mean, len(pts), max(e.timeslot for e in valid))


def broadcast_aoa(fused: FusedPosition, bs: BaseStationGeometry) -> float:
    return aoa_from_position(fused.position, bs)
