"""Scenario definition and the flat dotted-key configuration format.

A config file is TOML restricted to dotted keys, for example::

    motion.kind = "sinusoidal"
    link.noise_figure_db = 3.0
    run.seeds = 20

Every key has a default, so an empty file gives the reference scenario:
three base stations on an equilateral triangle of side 50 m, 256-element
lens arrays at 275 GHz, 40 MHz bandwidth, 10 dBm, a UE crossing the
triangle at 10 km/h, 20 timeslots and 100 seeds.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .channel import ArrayConfig, LinkBudget
from .errors import ConfigError
from .geometry import BaseStationGeometry
from .metrics import Algorithm
from .motion import KMH, Trajectory, linear_trajectory, sinusoidal_trajectory
from .ranging import RangingConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def triangle_base_stations(side: float = 50.0, orientations=(math.pi / 2, -math.pi / 2, math.pi / 2)):
    """BS 1 and BS 3 on the lower edge facing up, BS 2 on the apex facing down."""
    height = side * math.sqrt(3) / 2
    positions = [(0.0, 0.0), (side / 2, height), (side, 0.0)]
    return tuple(BaseStationGeometry(p, o) for p, o in zip(positions, orientations))


@dataclass(frozen=True)
class MotionConfig:
    kind: str = "linear"
    # horizontal crossing 20 m above the BS 1 - BS 3 baseline, centered on the triangle
    start: tuple = (-1.5, 20.0)
    heading: float = 0.0
    speed_kmh: float = 10.0
    amplitude: float = 2.0
    period: float = 6.0
    timeslot_duration: float = 1.0

    def trajectory(self) -> Trajectory:
        speed = self.speed_kmh * KMH
        if self.kind == "linear":
            return linear_trajectory(self.start, self.heading, speed, self.timeslot_duration)
        if self.kind == "sinusoidal":
            return sinusoidal_trajectory(self.start, self.heading, speed, self.amplitude,
                                         self.period, self.timeslot_duration)
        raise ConfigError(f"unknown motion kind {self.kind!r}")


@dataclass(frozen=True)
class Scenario:
    base_stations: tuple = field(default_factory=triangle_base_stations)
    n_elements: int = 256
    spacing_wavelengths: float = 0.5
    budget: LinkBudget = field(default_factory=LinkBudget)
    ranging: RangingConfig = field(default_factory=RangingConfig)
    motion: MotionConfig = field(default_factory=MotionConfig)
    sparsity: int = 16
    timeslots: int = 20
    seeds: tuple = tuple(range(100))
    algorithms: tuple = tuple(Algorithm)
    aperture_gain: bool = True
    energy_gate: bool = False
    threshold_fraction: float = 0.5
    beamwidth_domain: str = "psi"

    @property
    def array(self) -> ArrayConfig:
        return ArrayConfig.for_carrier(self.n_elements, self.budget.carrier_frequency,
                                       self.spacing_wavelengths)

    def validate(self) -> "Scenario":
        if not self.base_stations:
            raise ConfigError("at least one base station is required")
        if self.n_elements < 2:
            raise ConfigError("arrays need at least two elements")
        if not 1 <= self.sparsity <= self.n_elements:
            raise ConfigError(f"sparsity must lie in 1..{self.n_elements}")
        if self.timeslots < 1:
            raise ConfigError("need at least one timeslot")
        if not self.seeds:
            raise ConfigError("seed list is empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be unique")
        if not self.algorithms:
            raise ConfigError("algorithm set is empty")
        if not 0 < self.threshold_fraction <= 1:
            raise ConfigError("threshold_fraction must lie in (0, 1]")
        if self.beamwidth_domain not in ("psi", "angle"):
            raise ConfigError("beamwidth_domain must be 'psi' or 'angle'")
        self.motion.trajectory()
        return self


def _seed_list(value) -> tuple:
    if isinstance(value, int):
        if value < 1:
            raise ConfigError("seed count must be positive")
        return tuple(range(value))
    if isinstance(value, str):
        return parse_seeds(value)
    return tuple(int(v) for v in value)


def parse_seeds(text: str) -> tuple:
    """Parse "100" (count), "0-9" (inclusive range) or "1,5,7" (list)."""
    text = text.strip()
    try:
        if "," in text:
            return tuple(int(v) for v in text.split(","))
        if "-" in text[1:]:
            lo, hi = text.split("-", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return _seed_list(int(text))
    except ValueError as exc:
        raise ConfigError(f"cannot parse seeds {text!r}") from exc


def parse_algorithms(value) -> tuple:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return tuple(Algorithm(v.strip()) for v in value)
    except ValueError as exc:
        raise ConfigError(f"unknown algorithm in {value!r}; choose from "
                          f"{', '.join(a.value for a in Algorithm)}") from exc


# key -> (section object name, attribute, converter)
_KEYS = {
    "bs.side": None,
    "bs.positions": None,
    "bs.orientations": None,
    "array.n_elements": ("", "n_elements", int),
    "array.spacing_wavelengths": ("", "spacing_wavelengths", float),
    "link.tx_power_dbm": ("budget", "tx_power_dbm", float),
    "link.carrier_frequency_hz": ("budget", "carrier_frequency", float),
    "link.bandwidth_hz": ("budget", "bandwidth", float),
    "link.absorption_coefficient": ("budget", "absorption_coefficient", float),
    "link.noise_figure_db": ("budget", "noise_figure_db", float),
    "link.temperature_k": ("budget", "temperature", float),
    "link.aperture_gain": ("", "aperture_gain", bool),
    "ranging.jitter_std_s": ("ranging", "timestamp_jitter_std", float),
    "ranging.processing_delay_s": ("ranging", "ue_processing_delay", float),
    "motion.kind": ("motion", "kind", str),
    "motion.start": ("motion", "start", lambda v: tuple(float(x) for x in v)),
    "motion.heading_rad": ("motion", "heading", float),
    "motion.speed_kmh": ("motion", "speed_kmh", float),
    "motion.amplitude_m": ("motion", "amplitude", float),
    "motion.period_slots": ("motion", "period", float),
    "motion.timeslot_s": ("motion", "timeslot_duration", float),
    "tracking.sparsity": ("", "sparsity", int),
    "tracking.energy_gate": ("", "energy_gate", bool),
    "tracking.threshold_fraction": ("", "threshold_fraction", float),
    "metrics.beamwidth_domain": ("", "beamwidth_domain", str),
    "run.timeslots": ("", "timeslots", int),
    "run.seeds": ("", "seeds", _seed_list),
    "run.algorithms": ("", "algorithms", parse_algorithms),
}

KNOWN_KEYS = tuple(_KEYS)


def _flatten(tree: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


def parse_value(text: str):
    """Parse a single config value written in TOML syntax; bare words become strings."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text.strip()


def scenario_from_mapping(values: dict, base: Scenario | None = None) -> Scenario:
    scenario = base or Scenario()
    unknown = sorted(set(values) - set(_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    top, sections = {}, {"budget": {}, "ranging": {}, "motion": {}}
    try:
        for key, raw in values.items():
            entry = _KEYS[key]
            if entry is None:
                continue
            section, attr, conv = entry
            if conv is bool and not isinstance(raw, bool):
                raise ConfigError(f"{key} must be true or false")
            (top if section == "" else sections[section])[attr] = conv(raw)

        if any(k.startswith("bs.") for k in values):
            top["base_stations"] = _base_stations(values, scenario)
        top["budget"] = replace(scenario.budget, **sections["budget"])
        top["ranging"] = replace(scenario.ranging, **sections["ranging"])
        top["motion"] = replace(scenario.motion, **sections["motion"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return replace(scenario, **top).validate()


def _base_stations(values: dict, scenario: Scenario) -> tuple:
    orientations = values.get("bs.orientations")
    if "bs.positions" in values:
        positions = values["bs.positions"]
        if orientations is None or len(orientations) != len(positions):
            raise ConfigError("bs.positions needs a matching bs.orientations list")
        return tuple(BaseStationGeometry(p, o) for p, o in zip(positions, orientations))
    side = float(values.get("bs.side", 50.0))
    if orientations is None:
        return triangle_base_stations(side)
    if len(orientations) != 3:
        raise ConfigError("the triangle layout takes exactly three orientations")
    return triangle_base_stations(side, tuple(float(o) for o in orientations))


def load_scenario(path: str | Path | None = None, overrides: dict | None = None) -> Scenario:
    values = {}
    if path is not None:
        path = Path(path)
        try:
            with open(path, "rb") as fh:
                values = _flatten(tomllib.load(fh))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    values.update(overrides or {})
    return scenario_from_mapping(values)
