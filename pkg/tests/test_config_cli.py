import csv

import pytest

from iabsim.cli import main, run_sweep, scenario_id, write_summary_csv
from iabsim.config import ConfigError, ScenarioConfig, SweepSpec, parse_config, validate_config
from iabsim.metrics import SUMMARY_COLUMNS

from conftest import SWEEPS, cfg


def write_cfg(tmp_path, text, name="case.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


SMALL_SWEEP = """
# comment line
sweep = p_blk
values = 0.05, 0.2
policies = hybrid, age
seeds = 1-2
rows = 2
cols = 2
ue_count = 2
horizon = 60
mean_block_duration = 5.0
"""


# ------------------------------------------------------------- parsing

def test_parse_small_sweep(tmp_path):
    spec = parse_config(write_cfg(tmp_path, SMALL_SWEEP))
    assert spec.sweep_key == "p_blk"
    assert spec.sweep_values == [0.05, 0.2]
    assert spec.policies == ["hybrid", "age"]
    assert spec.path_modes == ["dual"]
    assert spec.seeds == [1, 2]
    assert spec.base.rows == 2 and spec.base.horizon == 60


def test_parse_reports_file_and_line(tmp_path):
    p = write_cfg(tmp_path, "rows = 3\nnot_a_key = 1\n")
    with pytest.raises(ConfigError, match=r"case\.cfg:2: unknown key 'not_a_key'"):
        parse_config(p)


def test_parse_bad_scalar_and_choice(tmp_path):
    with pytest.raises(ConfigError, match=r":1: bad value 'abc' for rows"):
        parse_config(write_cfg(tmp_path, "rows = abc\n"))
    with pytest.raises(ConfigError, match=r"policy must be one of"):
        parse_config(write_cfg(tmp_path, "policy = fancy\n"))
    with pytest.raises(ConfigError, match=r"expected 'key = value'"):
        parse_config(write_cfg(tmp_path, "just some words\n"))
    with pytest.raises(ConfigError, match=r"empty value"):
        parse_config(write_cfg(tmp_path, "rows =\n"))


def test_parse_seed_forms(tmp_path):
    spec = parse_config(write_cfg(tmp_path, "seeds = 3, 5-7, 10\n"))
    assert spec.seeds == [3, 5, 6, 7, 10]
    with pytest.raises(ConfigError, match="empty seed range"):
        parse_config(write_cfg(tmp_path, "seeds = 7-3\n"))
    with pytest.raises(ConfigError, match="bad seed"):
        parse_config(write_cfg(tmp_path, "seeds = x\n"))


def test_parse_sweep_value_typing(tmp_path):
    spec = parse_config(write_cfg(tmp_path, "sweep = ue_count\nvalues = 4, 6\n"))
    assert spec.sweep_values == [4, 6]
    spec = parse_config(write_cfg(tmp_path, "sweep = traffic_mode\nvalues = high, low\n"))
    assert spec.sweep_values == ["high", "low"]
    with pytest.raises(ConfigError, match="traffic_mode must be one of"):
        parse_config(write_cfg(tmp_path, "sweep = traffic_mode\nvalues = weird\n"))


def test_parse_sweep_requires_values_and_vice_versa(tmp_path):
    with pytest.raises(ConfigError, match="sweep set but no values"):
        parse_config(write_cfg(tmp_path, "sweep = p_blk\n"))
    with pytest.raises(ConfigError, match="values given without a sweep key"):
        parse_config(write_cfg(tmp_path, "values = 1, 2\n"))
    with pytest.raises(ConfigError, match="sweep must be one of"):
        parse_config(write_cfg(tmp_path, "sweep = gamma\nvalues = 1\n"))


def test_parse_single_cell_uses_base_fields(tmp_path):
    spec = parse_config(write_cfg(tmp_path, "policy = age\npath_mode = single\nseed = 4\n"))
    assert spec.sweep_key is None
    assert spec.policies == ["age"]
    assert spec.path_modes == ["single"]
    assert spec.seeds == [4]


def test_validate_ranges():
    validate_config(ScenarioConfig())
    for bad in (dict(p_blk=1.0), dict(p_blk=-0.01), dict(mean_block_duration=0.5),
                dict(buffer_cap=0), dict(gamma=-1.0), dict(rows=1, cols=1),
                dict(policy="x"), dict(horizon=0), dict(k_max=1)):
        with pytest.raises(ConfigError):
            validate_config(cfg(**bad))


def test_shipped_sweep_files_parse_to_frozen_shapes():
    fig3 = parse_config(str(SWEEPS / "fig3_resilience.cfg"))
    assert fig3.sweep_key == "p_blk"
    assert fig3.sweep_values == [0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
    assert fig3.path_modes == ["dual", "single"]
    assert fig3.policies == ["hybrid"]
    assert fig3.seeds == list(range(1, 11))
    assert fig3.base.horizon == 10000

    fig4 = parse_config(str(SWEEPS / "fig4_burst.cfg"))
    assert fig4.sweep_key is None
    assert fig4.base.traffic_mode == "burst"
    assert fig4.base.horizon == 120
    assert fig4.base.burst_slot == 20 and fig4.base.burst_size == 12
    assert fig4.base.p_blk == 0.0
    assert fig4.policies == ["hybrid", "queue", "age"]

    fig5 = parse_config(str(SWEEPS / "fig5_scalability.cfg"))
    assert fig5.sweep_key == "ue_count"
    assert fig5.sweep_values == [4, 6, 8, 10, 12, 14]
    assert fig5.base.p_blk == 0.10 and fig5.base.mean_block_duration == 50.0

    fig6 = parse_config(str(SWEEPS / "fig6_traffic.cfg"))
    assert fig6.sweep_key == "traffic_mode"
    assert fig6.sweep_values == ["high", "low", "mixed"]
    assert fig6.base.ue_count == 8


# ------------------------------------------------------------- sweep driver

def test_scenario_id_formats():
    assert scenario_id("p_blk", 0.05) == "p_blk-0.05"
    assert scenario_id("ue_count", 8) == "ue-8"
    assert scenario_id("traffic_mode", "mixed") == "traffic-mixed"
    assert scenario_id(None, None) == "base"


def small_spec(tmp_path):
    return parse_config(write_cfg(tmp_path, SMALL_SWEEP))


def test_run_sweep_cell_order_and_shape(tmp_path):
    cells = run_sweep(small_spec(tmp_path), workers=1)
    labels = [(c["scenario_id"], c["policy"]) for c in cells]
    assert labels == [
        ("p_blk-0.05", "hybrid"), ("p_blk-0.05", "age"),
        ("p_blk-0.2", "hybrid"), ("p_blk-0.2", "age")]
    for c in cells:
        assert [j["vals"]["seed"] for j in c["jobs"]] == [1, 2]
        assert [a["seed"] for a in c["agg"]] == ["mean", "std"]


def test_summary_csv_shape_and_rerun_identical(tmp_path):
    spec = small_spec(tmp_path)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_summary_csv(str(p1), run_sweep(spec, workers=1))
    write_summary_csv(str(p2), run_sweep(spec, workers=1))
    assert p1.read_bytes() == p2.read_bytes()
    rows = list(csv.reader(p1.open()))
    assert rows[0] == SUMMARY_COLUMNS
    assert len(rows) == 1 + 4 * (2 + 2)  # cells x (seeds + mean/std)
    seeds_col = [r[SUMMARY_COLUMNS.index("seed")] for r in rows[1:]]
    assert seeds_col[:4] == ["1", "2", "mean", "std"]


def test_parallel_workers_change_nothing(tmp_path):
    spec = small_spec(tmp_path)
    p1 = tmp_path / "w1.csv"
    p4 = tmp_path / "w4.csv"
    write_summary_csv(str(p1), run_sweep(spec, workers=1))
    write_summary_csv(str(p4), run_sweep(spec, workers=4))
    assert p1.read_bytes() == p4.read_bytes()


def test_run_sweep_traces_cover_horizon(tmp_path):
    spec = parse_config(write_cfg(
        tmp_path,
        "traffic_mode = burst\nhorizon = 40\nburst_slot = 10\nburst_size = 4\n"
        "rows = 2\ncols = 2\nue_count = 2\np_blk = 0.0\nseeds = 1-2\n"))
    cells = run_sweep(spec, workers=1, want_traces=True)
    tr = cells[0]["jobs"][0]["trace"]
    assert len(tr["mean_aoi"]) == 40
    assert len(tr["max_queue"]) == 40
    assert len(tr["total_queue"]) == 40
    assert len(tr["overflows"]) == 40


# ------------------------------------------------------------- CLI entry

def test_cli_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--horizon", "80", "--ue-count", "2", "--seed", "2",
               "--out", str(out), "--dump-channel", "--dump-state", "--lane", "py"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "mean_aoi=" in text and "pdr=" in text
    rows = list(csv.reader((out / "summary.csv").open()))
    assert rows[0] == SUMMARY_COLUMNS and len(rows) == 2
    assert (out / "topology.csv").exists()
    assert (out / "paths.csv").exists()
    chan = (out / "channel.csv").read_text().splitlines()
    assert chan[0] == "slot,link,state"
    state = list(csv.reader((out / "state.csv").open()))
    assert state[0] == ["slot", "node", "flow", "queue_len", "age"]
    assert (len(state) - 1) % 80 == 0


def test_cli_run_quiet_prints_nothing(tmp_path, capsys):
    rc = main(["run", "--horizon", "40", "--ue-count", "2", "--quiet", "--lane", "py"])
    assert rc == 0
    assert capsys.readouterr().out == ""


def test_cli_sweep_end_to_end(tmp_path, capsys):
    cfg_path = write_cfg(tmp_path, SMALL_SWEEP)
    out = tmp_path / "sweepout"
    rc = main(["sweep", "--config", cfg_path, "--out", str(out), "--quiet"])
    assert rc == 0
    assert (out / "summary.csv").exists()
    assert (out / "topology.csv").exists()
    assert (out / "paths.csv").exists()


def test_cli_burst_writes_traces(tmp_path):
    cfg_path = write_cfg(
        tmp_path,
        "traffic_mode = burst\nhorizon = 50\nburst_slot = 10\nburst_size = 6\n"
        "rows = 2\ncols = 2\nue_count = 2\np_blk = 0.0\n"
        "policies = hybrid, age\nseeds = 1-2\n")
    out = tmp_path / "burstout"
    rc = main(["burst", "--config", cfg_path, "--out", str(out), "--quiet"])
    assert rc == 0
    rows = list(csv.reader((out / "trace_burst.csv").open()))
    assert rows[0] == ["policy", "seed", "slot", "mean_aoi", "max_queue",
                       "total_queue", "overflows"]
    assert len(rows) == 1 + 2 * 2 * 50  # policies x seeds x slots


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["sweep", "--config", str(tmp_path / "missing.cfg"),
                 "--out", str(tmp_path / "x"), "--quiet"]) == 2
    bad = write_cfg(tmp_path, "p_blk = 2.0\n")
    assert main(["run", "--config", bad, "--quiet"]) == 2
    capsys.readouterr()
