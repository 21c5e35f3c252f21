"""Acceptance gate. Each criterion prints one [PASS]/[FAIL] line in the terminal summary."""

import subprocess
import sys
import time

import numpy as np
import pytest

from thztrack.config import scenario_from_mapping
from thztrack.metrics import Algorithm, pilot_ledger, scheduled_pilots
from thztrack.simulation import run_scenario

pytestmark = pytest.mark.acceptance

SEEDS, SLOTS = 100, 20


def _run(kind):
    scenario = scenario_from_mapping({"motion.kind": kind, "run.seeds": SEEDS, "run.timeslots": SLOTS})
    t0 = time.perf_counter()
    result = run_scenario(scenario)
    return result, time.perf_counter() - t0


@pytest.fixture(scope="module")
def linear():
    return _run("linear")


@pytest.fixture(scope="module")
def sinusoidal():
    return _run("sinusoidal")


def _avg(records, alg, bs=None):
    vals = [r.deafness_pct for r in records if r.algorithm is alg and r.success and bs in (None, r.bs_id)]
    return float(np.mean(vals))


def _ratio_check(result):
    recs = result.records
    per_bs = {bs: _avg(recs, Algorithm.NO_COOP, bs) for bs in (1, 2, 3)}
    coop = _avg(recs, Algorithm.COOP)
    coop_bs = {bs: _avg(recs, Algorithm.COOP, bs) for bs in (1, 2, 3)}
    ratio = coop / min(per_bs.values())
    ordered = all(coop_bs[bs] <= per_bs[bs] for bs in per_bs)
    detail = (f"coop {coop:.1f}% / best no-coop {min(per_bs.values()):.1f}% = {ratio:.3f} "
              f"(want 0.35..0.8); per BS coop {[round(v, 1) for v in coop_bs.values()]} "
              f"vs no-coop {[round(v, 1) for v in per_bs.values()]}")
    return 0.35 <= ratio <= 0.8 and ordered, detail


def test_1_cooperation_halves_deafness_linear(linear, acceptance_report):
    result, elapsed = linear
    ok, detail = _ratio_check(result)
    ok = ok and elapsed < 60
    acceptance_report("1 coop/no-coop deafness ratio, linear", ok, f"{detail}; runtime {elapsed:.1f} s")
    assert ok


def test_2_cooperation_halves_deafness_sinusoidal(sinusoidal, acceptance_report):
    ok, detail = _ratio_check(sinusoidal[0])
    acceptance_report("2 coop/no-coop deafness ratio, sinusoidal", ok, detail)
    assert ok


def test_3_cooperative_success(linear, acceptance_report):
    coop = [r for r in linear[0].records if r.algorithm is Algorithm.COOP]
    slots = {}
    for r in coop:
        slots.setdefault((r.seed, r.timeslot), []).append(r)
    all_fused = all(any(r.fused for r in rs) for rs in slots.values())
    good = sum(all(r.success for r in rs) for rs in slots.values()) / len(slots)
    ok = all_fused and good >= 0.99
    acceptance_report("3 cooperative success", ok,
                      f"{len(slots)} slots, every slot fused: {all_fused}, all-BS in-beam share {good:.4f} (want >= 0.99)")
    assert ok


def test_4_fct_matches_no_coop(linear, acceptance_report):
    recs = linear[0].records
    fct, prop = _avg(recs, Algorithm.FCT), _avg(recs, Algorithm.NO_COOP)
    ok = abs(fct - prop) < 10
    acceptance_report("4 FCT vs proposed without cooperation", ok,
                      f"FCT {fct:.2f}% vs proposed {prop:.2f}%, gap {abs(fct - prop):.2f} points (want < 10)")
    assert ok


def test_5_pilot_ledger(linear, acceptance_report):
    failure_free = sum(scheduled_pilots([False] * 20))
    reacq = scheduled_pilots([t == 10 for t in range(1, 21)])
    rule = reacq[10:13] == [128] * 3 and reacq[13] == 16 and sum(reacq) == 656 + 3 * (128 - 16)
    ledger = pilot_ledger(linear[0].records)
    spent = {}
    for r in linear[0].records:
        spent[(r.seed, r.bs_id, r.algorithm)] = spent.get((r.seed, r.bs_id, r.algorithm), 0) + r.pilots_used
    consistent = all(spent[k] == v["total"] for k, v in ledger.items())
    clean = [spent[k] for k, v in ledger.items() if v["per_slot"] == scheduled_pilots([False] * 20)]
    ok = failure_free == 656 and rule and consistent and clean and all(c == 656 for c in clean)
    acceptance_report("5 pilot ledger", ok,
                      f"failure-free schedule {failure_free} (want 656); reacquisition rule {rule}; "
                      f"{len(clean)} failure-free simulated streams all at 656; simulator matches ledger: {consistent}")
    assert ok


PROPERTY_SUITES = [
    "tests/test_channel.py::test_lens_is_unitary",
    "tests/test_tracking.py::test_beam_index_round_trip_exhaustive",
    "tests/test_tracking.py::test_support_set_exhaustive_against_modular_enumeration",
    "tests/test_tracking.py::test_prediction_ignores_middle_sample",
    "tests/test_tracking.py::test_prediction_is_affine_equivariant",
    "tests/test_ranging.py::test_processing_delay_and_clock_offset_cancel",
    "tests/test_fusion.py::test_permutation_invariance",
    "tests/test_fusion.py::test_idempotence",
    "tests/test_fusion.py::test_error_bound_by_worst_member",
    "tests/test_geometry.py",
]


def test_6_property_suites(acceptance_report, pytestconfig):
    root = pytestconfig.rootpath
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_SUITES],
                          cwd=root, capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    ok = proc.returncode == 0
    acceptance_report("6 property suites", ok, tail)
    assert ok, proc.stdout[-2000:]


def test_7_determinism(acceptance_report):
    sc = scenario_from_mapping({"run.seeds": 10, "run.timeslots": SLOTS, "motion.kind": "sinusoidal"})
    a, b = run_scenario(sc).csv_text(), run_scenario(sc).csv_text()
    ok = a.encode() == b.encode()
    acceptance_report("7 byte-identical CSV", ok, f"{len(a.encode())} bytes, identical: {ok}")
    assert ok
