"""Array response, DFT lens, LoS beamspace channel and pilot-based estimation.

Beam indices are 1-based throughout, matching the beam numbering of the
lens; arrays returned here are ordinary 0-based numpy vectors whose entry
``n - 1`` belongs to beam ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import constants

from .errors import InvalidRangeError

SPEED_OF_LIGHT = constants.c
BOLTZMANN = constants.k


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear (lens) array of `n_elements` with element `spacing`.

    `spacing` defaults to half a wavelength.
    """

    n_elements: int
    wavelength: float
    spacing: float | None = None

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 2:
            raise ValueError(f"need at least 2 integer elements, got {self.n_elements}")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.spacing is None:
            object.__setattr__(self, "spacing", self.wavelength / 2)
        elif not self.spacing > 0:
            raise ValueError("spacing must be positive")

    @classmethod
    def for_carrier(cls, n_elements: int, carrier_frequency: float, spacing_wavelengths: float = 0.5):
        wavelength = SPEED_OF_LIGHT / carrier_frequency
        return cls(n_elements, wavelength, spacing_wavelengths * wavelength)

    @property
    def spacing_ratio(self) -> float:
        """d / lambda."""
        return self.spacing / self.wavelength


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float = 10.0
    carrier_frequency: float = 275e9
    bandwidth: float = 40e6
    # power absorption coefficient, 1/m (about 8 dB/km of water vapour near 275 GHz)
    absorption_coefficient: float = 1.8e-3
    noise_figure_db: float = 10.0
    temperature: float = 296.0

    def __post_init__(self):
        for name in ("carrier_frequency", "bandwidth", "temperature"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.absorption_coefficient < 0 or self.noise_figure_db < 0:
            raise ValueError("absorption coefficient and noise figure must be non-negative")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def tx_power_w(self) -> float:
        return 10 ** (self.tx_power_dbm / 10) * 1e-3

    @property
    def noise_power_w(self) -> float:
        """Thermal noise k_B T B scaled by the noise figure."""
        return BOLTZMANN * self.temperature * self.bandwidth * 10 ** (self.noise_figure_db / 10)

    def estimation_noise_variance(self, pilots: int) -> float:
        """Per-element variance of a beamspace estimate averaged over `pilots`."""
        return self.noise_power_w / (self.tx_power_w * pilots)


@dataclass(frozen=True)
class PilotObservation:
    """Noisy beamspace estimate seen by a base station.

    `indices` are the 1-based beams that were observed, so that
    ``estimated_beamspace[j]`` belongs to beam ``indices[j]``.
    """

    estimated_beamspace: np.ndarray
    indices: np.ndarray
    pilots_used: int
    noise_variance: float


def normalized_directions(n_elements: int) -> np.ndarray:
    """Spatial directions of the N lens beams, ascending with step 1/N."""
    n = np.arange(1, n_elements + 1)
    return (n - (n_elements + 1) / 2) / n_elements


def element_indices(n_elements: int) -> np.ndarray:
    """Symmetric element index set {l - (N-1)/2 : l = 0..N-1}."""
    return np.arange(n_elements) - (n_elements - 1) / 2


def steering_vector(psi: float, n_elements: int) -> np.ndarray:
    m = element_indices(n_elements)
    return np.exp(-2j * np.pi * psi * m) / math.sqrt(n_elements)


@lru_cache(maxsize=16)
def _lens(n_elements: int) -> np.ndarray:
    m = element_indices(n_elements)
    psi = normalized_directions(n_elements)
    a = np.exp(-2j * np.pi * np.outer(psi, m)) / math.sqrt(n_elements)
    u = a.conj()
    u.setflags(write=False)
    return u


def lens_matrix(n_elements: int) -> np.ndarray:
    """DFT lens whose n-th row is the conjugate transpose of a(psi_n)."""
    return _lens(int(n_elements))


def spatial_direction(theta: float, config: ArrayConfig) -> float:
    return config.spacing_ratio * math.sin(theta)


def path_gain(distance: float, budget: LinkBudget) -> complex:
    """LoS complex gain: free-space spreading times molecular absorption."""
    if not distance > 0:
        raise InvalidRangeError(f"distance must be positive, got {distance}")
    magnitude = path_gain_magnitude(distance, budget)
    phase = -2 * np.pi * math.fmod(distance / budget.wavelength, 1.0)
    return magnitude * complex(math.cos(phase), math.sin(phase))


def path_gain_magnitude(distance: float, budget: LinkBudget) -> float:
    if not distance > 0:
        raise InvalidRangeError(f"distance must be positive, got {distance}")
    spreading = SPEED_OF_LIGHT / (4 * np.pi * budget.carrier_frequency * distance)
    return spreading * math.exp(-budget.absorption_coefficient * distance / 2)


def los_channel(beta: complex, psi: float, n_elements: int) -> np.ndarray:
    return beta * steering_vector(psi, n_elements)


def observe_beamspace(true_channel, lens, budget: LinkBudget, pilots: int, support=None,
                      rng: np.random.Generator | None = None,
                      noise_variance: float | None = None) -> PilotObservation:
    """Pilot-based estimate of the beamspace channel ``lens @ true_channel``.

    With `support` (1-based beam indices) only those entries are returned,
    otherwise the full beamspace is scanned. A full vector of unit complex
    Gaussians is always drawn from `rng`, so two callers sharing a seed see
    the same noise on every beam regardless of what they observe.
    `noise_variance` overrides the link-budget calibration (0 gives a
    noiseless estimate).
    """
    if pilots < 1:
        raise ValueError("at least one pilot is required")
    h = np.asarray(true_channel, dtype=complex)
    n_elements = h.shape[0]
    if support is None:
        indices = np.arange(1, n_elements + 1)
    else:
        indices = np.asarray(support, dtype=int).reshape(-1)
        if indices.size == 0:
            raise ValueError("support set is empty")
        if indices.min() < 1 or indices.max() > n_elements:
            raise ValueError("support index outside the lens")
    sigma2 = budget.estimation_noise_variance(pilots) if noise_variance is None else float(noise_variance)
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")

    beamspace = np.asarray(lens) @ h
    if rng is None:
        rng = np.random.default_rng()
    unit = (rng.standard_normal(n_elements) + 1j * rng.standard_normal(n_elements)) / math.sqrt(2)
    estimate = beamspace + math.sqrt(sigma2) * unit
    return PilotObservation(estimate[indices - 1], indices, int(pilots), sigma2)
