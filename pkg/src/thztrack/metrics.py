"""Deafness, success probability and pilot accounting.

Deafness is the pointing error normalized to half the beam width, in
percent. Beams of the DFT lens are uniform in the spatial direction psi
with width 1/N, so half a beam is 1/(2N) in that domain.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .channel import ArrayConfig, spatial_direction

ACQUISITION_PILOTS = 128
TRACKING_PILOTS = 16
ACQUISITION_SLOTS = 3

CSV_COLUMNS = ("seed", "timeslot", "bs_id", "algorithm", "deafness_pct", "success",
               "pilots_used", "fused")


class Algorithm(str, Enum):
    FCT = "fct"
    NO_COOP = "proposed-no-coop"
    COOP = "proposed-coop"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class TimeslotRecord:
    seed: int
    timeslot: int
    bs_id: int
    algorithm: Algorithm
    deafness_pct: float | None
    success: bool
    pilots_used: int
    fused: bool

    def __post_init__(self):
        if self.success:
            if self.deafness_pct is None or not 0 <= self.deafness_pct < 100:
                raise ValueError("a successful slot needs deafness in [0, 100)")
        elif self.deafness_pct is not None:
            raise ValueError("a failed slot carries no deafness value")

    def sort_key(self):
        return (self.seed, self.timeslot, self.bs_id, list(Algorithm).index(Algorithm(self.algorithm)))


@dataclass(frozen=True)
class RunSummary:
    bs_id: int
    algorithm: Algorithm
    mean_deafness_pct: float  # successful slots only; nan if none
    success_probability: float
    total_pilots: int
    n_slots: int


def _half_beam_angle(theta_est: float, config: ArrayConfig) -> float:
    ratio = config.spacing_ratio
    psi = spatial_direction(theta_est, config)
    half = 1 / (2 * config.n_elements)
    hi = math.asin(min(1.0, (psi + half) / ratio))
    lo = math.asin(max(-1.0, (psi - half) / ratio))
    return (hi - lo) / 2


def deafness(theta_true: float, theta_est: float, config: ArrayConfig, domain: str = "psi") -> float:
    """Pointing error as a percentage of half the beam width.

    ``domain="psi"`` measures it in spatial direction, where every beam has
    the same width. ``domain="angle"`` uses the physical half-width of the
    beam steered at `theta_est` instead.
    """
    if domain == "psi":
        err = abs(spatial_direction(theta_true, config) - spatial_direction(theta_est, config))
        return 100.0 * err * 2 * config.n_elements
    if domain == "angle":
        return 100.0 * abs(theta_true - theta_est) / _half_beam_angle(theta_est, config)
    raise ValueError(f"unknown beamwidth domain {domain!r}")


def success_probability(records: Iterable[TimeslotRecord], keys=("algorithm", "bs_id", "timeslot")) -> dict:
    """Fraction of successful records per group."""
    hits = defaultdict(int)
    counts = defaultdict(int)
    for r in records:
        k = tuple(getattr(r, name) for name in keys)
        counts[k] += 1
        hits[k] += bool(r.success)
    if not counts:
        raise ValueError("no records to aggregate")
    return {k: hits[k] / counts[k] for k in sorted(counts, key=_group_order)}


def mean_deafness(records: Iterable[TimeslotRecord], keys=("algorithm", "bs_id", "timeslot")) -> dict:
    """Average deafness per group over successful records (nan for empty groups)."""
    acc = defaultdict(list)
    for r in records:
        k = tuple(getattr(r, name) for name in keys)
        bucket = acc[k]
        if r.success:
            bucket.append(r.deafness_pct)
    return {k: (float(np.mean(v)) if v else math.nan) for k, v in sorted(acc.items(), key=lambda kv: _group_order(kv[0]))}


def _group_order(key):
    return tuple(list(Algorithm).index(Algorithm(k)) if isinstance(k, Algorithm) else k for k in key)


def scheduled_pilots(failures: Iterable[bool]) -> list[int]:
    """Pilot cost per slot implied by the acquisition/tracking schedule.

    A slot costs 128 pilots while fewer than three consecutive good slots
    have been collected and 16 afterwards; a failure restarts the count.
    """
    acquired = 0
    costs = []
    for failed in failures:
        costs.append(ACQUISITION_PILOTS if acquired < ACQUISITION_SLOTS else TRACKING_PILOTS)
        acquired = 0 if failed else acquired + 1
    return costs


def pilot_ledger(records: Iterable[TimeslotRecord]) -> dict:
    """Recompute pilot costs from a timeslot-ordered record stream.

    Records are split into (seed, bs_id, algorithm) streams. A slot counts as
    a restart trigger when the BS failed on its own (FCT, no cooperation) or
    when fusion produced no position at all (cooperation).

    Returns a mapping from stream key to ``{"per_slot": [...], "total": int}``.
    """
    streams = defaultdict(list)
    for r in records:
        streams[(r.seed, r.bs_id, Algorithm(r.algorithm))].append(r)
    ledger = {}
    for key, rs in sorted(streams.items(), key=lambda kv: _group_order(kv[0])):
        rs.sort(key=lambda r: r.timeslot)
        coop = key[2] is Algorithm.COOP
        failures = [(not r.fused) if coop else (not r.success) for r in rs]
        per_slot = scheduled_pilots(failures)
        ledger[key] = {"per_slot": per_slot, "total": sum(per_slot)}
    return ledger


def summarize(records: Iterable[TimeslotRecord]) -> list[RunSummary]:
    groups = defaultdict(list)
    for r in records:
        groups[(r.bs_id, Algorithm(r.algorithm))].append(r)
    out = []
    for (bs_id, alg), rs in sorted(groups.items(), key=lambda kv: (list(Algorithm).index(kv[0][1]), kv[0][0])):
        ok = [r.deafness_pct for r in rs if r.success]
        out.append(RunSummary(
            bs_id=bs_id,
            algorithm=alg,
            mean_deafness_pct=float(np.mean(ok)) if ok else math.nan,
            success_probability=len(ok) / len(rs),
            total_pilots=sum(r.pilots_used for r in rs),
            n_slots=len(rs),
        ))
    return out


def write_csv(records: Iterable[TimeslotRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(records, key=TimeslotRecord.sort_key):
        writer.writerow([
            r.seed, r.timeslot, r.bs_id, str(r.algorithm),
            "" if r.deafness_pct is None else repr(float(r.deafness_pct)),
            int(r.success), r.pilots_used, int(r.fused),
        ])


def records_to_csv(records: Iterable[TimeslotRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(stream) -> list[TimeslotRecord]:
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(TimeslotRecord(
            seed=int(row["seed"]),
            timeslot=int(row["timeslot"]),
            bs_id=int(row["bs_id"]),
            algorithm=Algorithm(row["algorithm"]),
            deafness_pct=float(row["deafness_pct"]) if row["deafness_pct"] else None,
            success=row["success"] == "1",
            pilots_used=int(row["pilots_used"]),
            fused=row["fused"] == "1",
        ))
    return out
