"""Coordinate frames and the angle conventions shared by all base stations.

All base-station x-axes are parallel, so a single global frame is used.
Angles measured from that x-axis are counter-clockwise. A base station's
local AoA is its orientation minus the global ray angle to the UE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidRangeError

TWO_PI = 2.0 * math.pi


def as_position(p) -> np.ndarray:
    """Return `p` as a finite float array of shape (2,)."""
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"position must be two finite coordinates, got {p!r}")
    return arr


def wrap_angle(theta: float) -> float:
    """Map `theta` onto (-pi, pi]."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta}")
    wrapped = math.remainder(theta, TWO_PI)  # in [-pi, pi]
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class BaseStationGeometry:
    """Position of a base station and the boresight of its array.

    ``orientation`` is the angle between the global x-axis and the array
    boresight; it is normalized on construction.
    """

    position: np.ndarray
    orientation: float

    def __post_init__(self):
        object.__setattr__(self, "position", as_position(self.position))
        object.__setattr__(self, "orientation", wrap_angle(self.orientation))

    def __eq__(self, other):
        if not isinstance(other, BaseStationGeometry):
            return NotImplemented
        return bool(np.array_equal(self.position, other.position)) and self.orientation == other.orientation

    def __hash__(self):
        return hash((tuple(self.position), self.orientation))


def ray_angle(target, origin) -> float:
    """Global angle of the ray from `origin` to `target`."""
    delta = as_position(target) - as_position(origin)
    if delta[0] == 0.0 and delta[1] == 0.0:
        raise DegenerateGeometryError("target coincides with the base station")
    return math.atan2(delta[1], delta[0])


def aoa_from_position(target, bs: BaseStationGeometry) -> float:
    """Local angle of arrival at `bs` for a UE located at `target`."""
    return wrap_angle(bs.orientation - ray_angle(target, bs.position))


def global_from_local(theta_or: float, theta_ik: float) -> float:
    """Convert a local AoA into the global ray angle."""
    return wrap_angle(theta_or - theta_ik)


def position_from_polar(alpha: float, theta_un: float, bs_position) -> np.ndarray:
    if not alpha > 0:
        raise InvalidRangeError(f"range must be positive, got {alpha}")
    return alpha * np.array([math.cos(theta_un), math.sin(theta_un)]) + as_position(bs_position)


def localize(alpha: float, theta_ik: float, bs: BaseStationGeometry) -> np.ndarray:
    """Position of the UE from a local AoA and a range measured at `bs`."""
    return position_from_polar(alpha, global_from_local(bs.orientation, theta_ik), bs.position)
