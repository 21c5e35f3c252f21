import math
from pathlib import Path

import pytest

from thztrack.cli import main
from thztrack.config import (KNOWN_KEYS, Scenario, load_scenario, parse_seeds, parse_value,
                             scenario_from_mapping)
from thztrack.errors import ConfigError
from thztrack.metrics import CSV_COLUMNS, Algorithm
from thztrack.plotting import main as plot_main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_empty_config_is_default(tmp_path):
    empty = tmp_path / "empty.toml"
    empty.write_text("")
    assert load_scenario(empty) == Scenario()
    assert load_scenario() == Scenario()


def test_reference_file_matches_defaults():
    assert load_scenario(CONFIGS / "reference.toml") == Scenario()
    sin = load_scenario(CONFIGS / "sinusoidal.toml")
    assert sin.motion.kind == "sinusoidal"


def test_triangle_geometry():
    bs1, bs2, bs3 = Scenario().base_stations
    assert tuple(bs2.position) == pytest.approx((25.0, 25 * math.sqrt(3)))
    assert math.dist(bs1.position, bs3.position) == pytest.approx(50.0)
    assert bs2.orientation == pytest.approx(-math.pi / 2)


def test_tables_and_dotted_keys_agree(tmp_path):
    a, b = tmp_path / "a.toml", tmp_path / "b.toml"
    a.write_text("link.noise_figure_db = 3.0\nrun.seeds = 5\n")
    b.write_text("[link]\nnoise_figure_db = 3.0\n[run]\nseeds = 5\n")
    assert load_scenario(a) == load_scenario(b)
    assert load_scenario(a).seeds == tuple(range(5))


@pytest.mark.parametrize("values", [
    {"link.bogus": 1},
    {"run.algorithms": []},
    {"run.algorithms": ["nope"]},
    {"run.seeds": [1, 1]},
    {"tracking.sparsity": 0},
    {"tracking.sparsity": 300},
    {"motion.kind": "spiral"},
    {"motion.amplitude_m": 50.0, "motion.kind": "sinusoidal"},
    {"link.aperture_gain": 1},
    {"bs.positions": [[0, 0]]},
    {"link.bandwidth_hz": -1.0},
])
def test_bad_configs(values):
    with pytest.raises(ConfigError):
        scenario_from_mapping(values)


def test_malformed_file(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("run.seeds = = 3")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.toml")


def test_value_and_seed_parsing():
    assert parse_value("3") == 3
    assert parse_value("[1.0, 2.0]") == [1.0, 2.0]
    assert parse_value("sinusoidal") == "sinusoidal"
    assert parse_seeds("3") == (0, 1, 2)
    assert parse_seeds("4-6") == (4, 5, 6)
    assert parse_seeds("1,5,7") == (1, 5, 7)
    with pytest.raises(ConfigError):
        parse_seeds("x")
    assert "motion.kind" in KNOWN_KEYS


def test_cli_validate(capsys):
    assert main(["validate", "--config", str(CONFIGS / "reference.toml")]) == 0
    assert "N=256" in capsys.readouterr().out
    assert main(["validate", "--set", "nope=1"]) == 2
    assert main(["validate", "--algorithms", ""]) == 2


def test_cli_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "--seeds", "2", "--set", "run.timeslots=5", "--out", str(out)]) == 0
    text = (out / "records.csv").read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(text.splitlines()) == 1 + 2 * 5 * 3 * 3
    assert (out / "records_timeslots.csv").exists()
    assert "overall mean deafness" in (out / "records_summary.txt").read_text()
    assert "proposed-coop" in capsys.readouterr().out

    csv_path = tmp_path / "named.csv"
    assert main(["run", "--seeds", "0-1", "--algorithms", "fct", "--set", "run.timeslots=3",
                 "--out", str(csv_path)]) == 0
    assert {line.split(",")[3] for line in csv_path.read_text().splitlines()[1:]} == {"fct"}
    assert (tmp_path / "named_summary.txt").exists()


def test_cli_run_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--seeds", "1", "--set", "run.timeslots=1", "--out", str(blocker / "sub")]) == 1


def test_cli_sweep(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", "--key", "tracking.sparsity", "--values", "8,16", "--seeds", "1",
                 "--set", "run.timeslots=4", "--out", str(out)]) == 0
    rows = (out / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("tracking.sparsity,")
    assert len(rows) == 1 + 2 * 3 * 3
    assert sorted(p.name for p in out.iterdir() if p.is_dir()) == ["00_8", "01_16"]
    assert main(["sweep", "--key", "bogus", "--values", "1"]) == 2


def test_plot_command(tmp_path):
    out = tmp_path / "res"
    main(["run", "--seeds", "2", "--set", "run.timeslots=4", "--out", str(out)])
    assert plot_main([str(out / "records.csv"), "--out", str(tmp_path / "fig")]) == 0
    pngs = sorted(p.name for p in (tmp_path / "fig").iterdir())
    assert pngs == ["records_deafness_per_timeslot.png", "records_success_per_timeslot.png"]
    for name in pngs:
        assert (tmp_path / "fig" / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert plot_main([str(tmp_path / "missing.csv")]) == 1


def test_algorithm_values():
    assert [a.value for a in Algorithm] == ["fct", "proposed-no-coop", "proposed-coop"]
