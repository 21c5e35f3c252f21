"""Timeslot loop and Monte-Carlo driver.

Each slot runs, per base station, beam estimation (full scan while
acquiring, support-restricted once three positions are known), the
in-beam check and two-way ranging, and localization. With cooperation the
valid positions are then averaged at the fusion center and every BS steers
toward the fused position.

Random draws come from one generator per (seed, timeslot, bs) and are
consumed identically by every algorithm, so algorithms run on the same
seed see the same channel noise and timestamp jitter.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channel, geometry, ranging, tracking
from .config import Scenario
from .errors import InvalidRangeError, InvalidTimestampsError, TotalTrackingLossError
from .fusion import PositionEstimate, broadcast_aoa, center_of_gravity
from .metrics import (ACQUISITION_PILOTS, TRACKING_PILOTS, Algorithm, TimeslotRecord,
                      deafness, mean_deafness, records_to_csv, success_probability,
                      summarize, write_csv)
from .tracking import Mode, TrackState

log = logging.getLogger(__name__)

_NOISE_STREAM = 0
_JITTER_STREAM = 1


def slot_rng(seed: int, timeslot: int, bs_id: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, timeslot, bs_id, stream])


@dataclass
class Context:
    """Quantities derived once per scenario."""

    scenario: Scenario
    array: channel.ArrayConfig
    lens: np.ndarray
    # every element collects the single-antenna path gain, so the unit-norm
    # steering vector is scaled by sqrt(N) when aperture gain is modeled
    amplitude_gain: float = 1.0

    @classmethod
    def build(cls, scenario: Scenario) -> "Context":
        gain = math.sqrt(scenario.n_elements) if scenario.aperture_gain else 1.0
        return cls(scenario, scenario.array, channel.lens_matrix(scenario.n_elements), gain)


@dataclass
class BsOutcome:
    """What one BS learned in one slot, before any fusion."""

    theta_est: float
    pilots: int
    valid: bool
    position: np.ndarray | None = None
    beam: int | None = None


@dataclass
class AlgorithmState:
    algorithm: Algorithm
    # one tracker per BS; with cooperation every entry is the same object
    trackers: list = field(default_factory=list)

    @classmethod
    def fresh(cls, algorithm: Algorithm, n_bs: int) -> "AlgorithmState":
        if algorithm is Algorithm.COOP:
            shared = TrackState()
            return cls(algorithm, [shared] * n_bs)
        return cls(algorithm, [TrackState() for _ in range(n_bs)])


def _estimate_beam(ctx: Context, state: TrackState, algorithm: Algorithm, bs, h, rng):
    """Phase 1: strongest beam from a full scan or from the predicted support."""
    sc = ctx.scenario
    if state.mode is Mode.ACQUISITION:
        obs = channel.observe_beamspace(h, ctx.lens, sc.budget, ACQUISITION_PILOTS, rng=rng)
    else:
        if algorithm is Algorithm.FCT:
            predicted = tracking.fct_predict_beam(state.values(), sc.n_elements)
        else:
            r_next = tracking.predict_position(state.values())
            try:
                theta_next = tracking.predict_aoa(r_next, bs)
            except geometry.DegenerateGeometryError:
                theta_next = 0.0
            predicted = tracking.beam_index_from_aoa(theta_next, ctx.array)
        support = tracking.support_set(predicted, sc.sparsity, sc.n_elements)
        obs = channel.observe_beamspace(h, ctx.lens, sc.budget, TRACKING_PILOTS, support=support, rng=rng)
    return obs, tracking.strongest_element(obs)


def bs_step(ctx: Context, state: TrackState, algorithm: Algorithm, bs_id: int, truth, seed: int,
            timeslot: int) -> tuple[BsOutcome, float]:
    """Phases 1 to 3 at one BS. Returns the outcome and the true local AoA."""
    sc = ctx.scenario
    bs = sc.base_stations[bs_id - 1]
    distance = float(np.linalg.norm(geometry.as_position(truth) - bs.position))
    theta_true = geometry.aoa_from_position(truth, bs)
    beta = channel.path_gain(distance, sc.budget) * ctx.amplitude_gain
    h = channel.los_channel(beta, channel.spatial_direction(theta_true, ctx.array), sc.n_elements)

    obs, beam = _estimate_beam(ctx, state, algorithm, bs, h, slot_rng(seed, timeslot, bs_id, _NOISE_STREAM))
    theta_est = tracking.aoa_from_beam_index(beam, ctx.array)
    outcome = BsOutcome(theta_est, obs.pilots_used, valid=False, beam=beam)

    # Phase 2: the UE only answers if it sits inside the beam
    if not ranging.in_beam(theta_true, theta_est, ctx.array, sc.beamwidth_domain):
        return outcome, theta_true
    if algorithm is Algorithm.FCT:
        outcome.valid = True
        return outcome, theta_true

    stamps = ranging.generate_timestamps(distance, sc.ranging, slot_rng(seed, timeslot, bs_id, _JITTER_STREAM))
    try:
        alpha = ranging.two_way_toa_distance(stamps)
        if sc.energy_gate:
            peak = obs.estimated_beamspace[list(obs.indices).index(beam)]
            check = tracking.EnergyCheck(
                sc.budget.tx_power_w * abs(peak) ** 2,
                sc.budget.tx_power_w * (channel.path_gain_magnitude(alpha, sc.budget) * ctx.amplitude_gain) ** 2)
            if not tracking.energy_gate(check, sc.threshold_fraction):
                return outcome, theta_true
        # Phase 3
        outcome.position = geometry.localize(alpha, theta_est, bs)
    except (InvalidTimestampsError, InvalidRangeError):
        return outcome, theta_true
    outcome.valid = True
    return outcome, theta_true


def run_timeslot(state: AlgorithmState, truth, timeslot: int, ctx: Context, seed: int) -> list[TimeslotRecord]:
    """Advance one algorithm by one slot for every BS and return its records."""
    sc = ctx.scenario
    alg = state.algorithm
    n_bs = len(sc.base_stations)
    results = [bs_step(ctx, state.trackers[i], alg, i + 1, truth, seed, timeslot) for i in range(n_bs)]

    if alg is not Algorithm.COOP:
        records = []
        for i, (out, theta_true) in enumerate(results):
            tracker = state.trackers[i]
            if out.valid:
                tracker.push(timeslot, out.beam if alg is Algorithm.FCT else out.position)
                d = deafness(theta_true, out.theta_est, ctx.array, sc.beamwidth_domain)
            else:
                tracker.reset()
                d = None
            records.append(TimeslotRecord(seed, timeslot, i + 1, alg, d, out.valid, out.pilots, False))
        return records

    # Phase 4: fusion barrier across all BSs
    shared = state.trackers[0]
    estimates = [PositionEstimate(i + 1, out.position, timeslot, out.valid) for i, (out, _) in enumerate(results)]
    try:
        fused = center_of_gravity(estimates)
    except TotalTrackingLossError:
        shared.reset()
        return [TimeslotRecord(seed, timeslot, i + 1, alg, None, False, out.pilots, False)
                for i, (out, _) in enumerate(results)]
    shared.push(timeslot, fused.position)
    records = []
    for i, (out, theta_true) in enumerate(results):
        bs = sc.base_stations[i]
        try:
            d = deafness(theta_true, broadcast_aoa(fused, bs), ctx.array, sc.beamwidth_domain)
        except geometry.DegenerateGeometryError:
            d = math.inf
        ok = d < 100.0
        records.append(TimeslotRecord(seed, timeslot, i + 1, alg, d if ok else None, ok, out.pilots, True))
    return records


def run_seed(ctx: Context, seed: int) -> list[TimeslotRecord]:
    sc = ctx.scenario
    trajectory = sc.motion.trajectory()
    states = [AlgorithmState.fresh(alg, len(sc.base_stations)) for alg in sc.algorithms]
    records = []
    for t in range(1, sc.timeslots + 1):
        truth = trajectory.sample(t - 1)
        for state in states:
            records.extend(run_timeslot(state, truth, t, ctx, seed))
    return records


@dataclass
class RunResult:
    scenario: Scenario
    records: list
    summaries: list

    def csv_text(self) -> str:
        return records_to_csv(self.records)


def run_scenario(scenario: Scenario) -> RunResult:
    scenario.validate()
    ctx = Context.build(scenario)
    records = []
    for seed in scenario.seeds:
        records.extend(run_seed(ctx, seed))
    records.sort(key=TimeslotRecord.sort_key)
    return RunResult(scenario, records, summarize(records))


def format_summary(result: RunResult) -> str:
    sc = result.scenario
    lines = [
        f"motion={sc.motion.kind} timeslots={sc.timeslots} seeds={len(sc.seeds)} "
        f"N={sc.n_elements} V={sc.sparsity} BSs={len(sc.base_stations)}",
        "",
        f"{'algorithm':<18}{'bs':>4}{'deafness %':>12}{'P(success)':>12}{'pilots/seed':>13}",
    ]
    for s in result.summaries:
        lines.append(f"{s.algorithm.value:<18}{s.bs_id:>4}{s.mean_deafness_pct:>12.2f}"
                     f"{s.success_probability:>12.3f}{s.total_pilots / len(sc.seeds):>13.1f}")
    lines.append("")
    for alg in sc.algorithms:
        ok = [r.deafness_pct for r in result.records if r.algorithm is alg and r.success]
        avg = float(np.mean(ok)) if ok else math.nan
        lines.append(f"{alg.value}: overall mean deafness {avg:.2f} %")
    return "\n".join(lines) + "\n"


def write_timeslot_curves(result: RunResult, stream) -> None:
    """Seed-averaged deafness and success probability per (algorithm, bs, timeslot)."""
    deaf = mean_deafness(result.records)
    prob = success_probability(result.records)
    stream.write("algorithm,bs_id,timeslot,mean_deafness_pct,success_probability\n")
    for key, p in prob.items():
        alg, bs_id, t = key
        d = deaf[key]
        stream.write(f"{Algorithm(alg).value},{bs_id},{t},{'' if math.isnan(d) else repr(d)},{p!r}\n")


def emit_results(result: RunResult, out: str | Path) -> dict:
    """Write the record CSV, seed-averaged curves and a text summary.

    `out` is either a directory or a path ending in ``.csv``; companion files
    are placed next to the CSV.
    """
    out = Path(out)
    if out.suffix.lower() == ".csv":
        directory, stem = out.parent, out.stem
    else:
        directory, stem = out, "records"
    paths = {
        "records": directory / f"{stem}.csv",
        "curves": directory / f"{stem}_timeslots.csv",
        "summary": directory / f"{stem}_summary.txt",
    }
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with open(paths["records"], "w", newline="") as fh:
            write_csv(result.records, fh)
        with open(paths["curves"], "w", newline="") as fh:
            write_timeslot_curves(result, fh)
        paths["summary"].write_text(format_summary(result))
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write results to {exc.filename or directory}: {exc.strerror}") from exc
    log.info("wrote %s", ", ".join(str(p) for p in paths.values()))
    return paths
