import json

import numpy as np
import pytest

from holodfrc.harness import (
    MODES,
    SweepSpec,
    apply_sweep_value,
    channel_seed,
    emit_csv,
    init_seed,
    load_scenario,
    run_convergence,
    run_sweep,
)
from holodfrc.scenario import ScenarioConfig, db_to_linear


TINY = dict(n_rhs_side=2, n_ris_side=3, n_ue_side=2, n_subcarriers=3,
            nlos_paths_dir=3, nlos_paths_ris=3,
            p_users=((-6.0, 1.5, 3.0), (1.0, 2.0, 2.5)),
            p_clutter=((2.4, 3.4, 3.8),), n_feeds=2, max_outer_iters=2)


def test_load_scenario_defaults(tmp_path):
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    cfg = load_scenario(empty)
    ref = ScenarioConfig()
    assert cfg == ref
    assert cfg.n_ris_side == 10 and cfg.n_rhs_side == 5
    assert cfg.power_per_subcarrier_w == pytest.approx(db_to_linear(5.0))
    assert load_scenario(None) == ref


def test_load_scenario_overrides_and_nesting(tmp_path):
    f = tmp_path / "s.yaml"
    f.write_text(
        "grid:\n  n_subcarriers: 4\n  delta_f_hz: 1.0e9\n"
        "service:\n  eta_db: 12\n"
        "seed: 9\n")
    cfg = load_scenario(f)
    assert cfg.n_subcarriers == 4
    assert cfg.delta_f_hz == pytest.approx(1.0e9)
    assert cfg.comm_threshold == pytest.approx(10 ** 1.2)  # 15.85 linear
    assert cfg.seed == 9


def test_load_scenario_rejects_unknown_and_invalid(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("frobnicate: 3\n")
    with pytest.raises(ValueError, match="unknown scenario key"):
        load_scenario(bad)
    dup = tmp_path / "dup.yaml"
    dup.write_text("a:\n  seed: 1\nb:\n  seed: 2\n")
    with pytest.raises(ValueError, match="duplicate"):
        load_scenario(dup)
    neg = tmp_path / "neg.yaml"
    neg.write_text("ref_distance_m: -2.0\n")
    with pytest.raises(ValueError):
        load_scenario(neg)


def test_sweep_profile_dims(tmp_path):
    f = tmp_path / "s.yaml"
    f.write_text("seed: 1\n")
    assert load_scenario(f, profile="convergence").n_rhs_side == 5
    assert load_scenario(f, profile="sweep").n_rhs_side == 4
    g = tmp_path / "s2.yaml"
    g.write_text("n_rhs_side: 7\n")
    assert load_scenario(g, profile="sweep").n_rhs_side == 7


def test_apply_sweep_value():
    cfg = ScenarioConfig(**TINY)
    assert apply_sweep_value(cfg, "power_dbw", 8).power_per_subcarrier_w == \
        pytest.approx(db_to_linear(8.0))
    assert apply_sweep_value(cfg, "eps_dir", 3.2).eps_dir == 3.2
    assert apply_sweep_value(cfg, "n_ris_side", 8).n_ris_side == 8
    assert apply_sweep_value(cfg, "eta_db", 0.0).comm_threshold == pytest.approx(1.0)
    grown = apply_sweep_value(cfg, "num_users", 4)
    assert grown.n_users == 4
    assert grown.n_feeds >= 4
    shrunk = apply_sweep_value(cfg, "num_users", 1)
    assert shrunk.n_users == 1
    with pytest.raises(ValueError):
        apply_sweep_value(cfg, "bogus", 1)
    with pytest.raises(ValueError):
        SweepSpec(parameter="bogus", values=[1])
    with pytest.raises(ValueError):
        SweepSpec(parameter="power_dbw", values=[])


def test_seed_derivation_stable():
    assert channel_seed(0, 0) != channel_seed(0, 1)
    assert channel_seed(0, 0) != init_seed(0, 0)
    assert channel_seed(5, 3) == channel_seed(5, 3)


def test_emit_csv_format(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv(["a", "b"], [[1, 2.0 / 3.0], ["x", 1e-12]], path)
    data = path.read_bytes()
    assert data == b"a,b\n1,0.666666667\nx,1e-12\n"
    emit_csv(["only"], [], tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_bytes() == b"only\n"


def test_run_convergence_deterministic(tmp_path):
    cfg = ScenarioConfig(**TINY)
    modes = [MODES["optimal_rhs_no_ris"]]
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    run_convergence(cfg, modes, seed=3, out_dir=out1)
    run_convergence(cfg, modes, seed=3, out_dir=out2)
    assert (out1 / "convergence.csv").read_bytes() == \
        (out2 / "convergence.csv").read_bytes()
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    header = (out1 / "convergence.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["mode", "outer_iter", "min_radar_sinr_db"]
    report = json.loads((out1 / "report.json").read_text())
    assert report["runs"][0]["mode"] == "optimal_rhs_no_ris"
    assert "min_radar_sinr_db" in report["runs"][0]


def test_run_sweep_rows_and_pairing(tmp_path):
    cfg = ScenarioConfig(**TINY)
    spec = SweepSpec(parameter="power_dbw", values=[0.0, 5.0], trials=2,
                     modes=[MODES["optimal_rhs_no_ris"]])
    header, rows, records = run_sweep(cfg, spec, seed=1, out_dir=tmp_path)
    # one row per (mode, value, aggregate)
    assert len(rows) == 2 * 1 * 2
    aggs = {(r[1], r[2], r[3]) for r in rows}
    assert (0.0, "optimal_rhs_no_ris", "mean") in aggs
    assert (5.0, "optimal_rhs_no_ris", "stddev") in aggs
    assert (tmp_path / "sweep_power_dbw.csv").exists()
    assert len(records) == 4
    # paired channels across values: same trial index draws the same seed
    assert records[0].seed == records[2].seed


def test_sweep_csv_deterministic(tmp_path):
    cfg = ScenarioConfig(**TINY)
    spec = SweepSpec(parameter="eta_db", values=[0.0], trials=1,
                     modes=[MODES["optimal_rhs_no_ris"]])
    run_sweep(cfg, spec, seed=2, out_dir=tmp_path / "x")
    run_sweep(cfg, spec, seed=2, out_dir=tmp_path / "y")
    fx = (tmp_path / "x" / "sweep_eta_db.csv").read_bytes()
    fy = (tmp_path / "y" / "sweep_eta_db.csv").read_bytes()
    assert fx == fy


def test_cli_run_and_sweep(tmp_path, capsys):
    from holodfrc.cli import main

    scenario = tmp_path / "tiny.yaml"
    scenario.write_text(
        "n_rhs_side: 2\nn_ris_side: 3\nn_ue_side: 2\nn_subcarriers: 3\n"
        "nlos_paths_dir: 3\nnlos_paths_ris: 3\nn_feeds: 2\nmax_outer_iters: 2\n"
        "p_users: [[-6.0, 1.5, 3.0], [1.0, 2.0, 2.5]]\n"
        "p_clutter: [[2.4, 3.4, 3.8]]\n")
    out = tmp_path / "run_out"
    rc = main(["run", "--scenario", str(scenario), "--seed", "1",
               "--modes", "optimal_rhs_no_ris", "--out", str(out), "--trace"])
    assert rc == 0
    assert (out / "convergence.csv").exists()
    assert (out / "report.json").exists()
    assert (out / "inner_trace.csv").exists()
    assert "min radar SINR" in capsys.readouterr().out

    out2 = tmp_path / "sweep_out"
    rc = main(["sweep", "--scenario", str(scenario), "--seed", "1",
               "--param", "power_dbw", "--values", "0,5", "--trials", "1",
               "--modes", "optimal_rhs_no_ris", "--out", str(out2)])
    assert rc == 0
    assert (out2 / "sweep_power_dbw.csv").exists()
