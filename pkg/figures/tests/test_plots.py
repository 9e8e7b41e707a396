import csv
from pathlib import Path

import numpy as np
import pytest

from dfrc_figures import FigureSpec, plot_convergence, plot_sweep, read_csv, render
from dfrc_figures.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def parse_fixture(name):
    with open(FIXTURES / name, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_convergence_renders_all_modes(tmp_path):
    out = tmp_path / "conv.svg"
    series = plot_convergence(FIXTURES / "convergence.csv", out)
    assert out.exists() and out.stat().st_size > 0
    header, rows = parse_fixture("convergence.csv")
    modes = sorted({r[header.index("mode")] for r in rows})
    assert sorted(series) == modes
    assert len(modes) == 6  # six-mode fixture: six legend entries


def test_convergence_series_match_csv_exactly(tmp_path):
    series = plot_convergence(FIXTURES / "convergence.csv", tmp_path / "c.svg")
    header, rows = parse_fixture("convergence.csv")
    i_mode = header.index("mode")
    i_iter = header.index("outer_iter")
    i_val = header.index("min_radar_sinr_db")
    for mode, (xs, ys) in series.items():
        want = [(float(r[i_iter]), float(r[i_val])) for r in rows
                if r[i_mode] == mode]
        assert np.array_equal(xs, [w[0] for w in want])
        assert np.array_equal(ys, [w[1] for w in want])


def test_single_mode_csv_one_line(tmp_path):
    header, rows = parse_fixture("convergence.csv")
    single = tmp_path / "single.csv"
    keep = [r for r in rows if r[0] == "optimal_rhs_optimal_ris"]
    single.write_text("\n".join([",".join(header)]
                                + [",".join(r) for r in keep]) + "\n")
    series = plot_convergence(single, tmp_path / "s.svg")
    assert list(series) == ["optimal_rhs_optimal_ris"]


def test_missing_column_is_descriptive(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("mode,outer_iter\nx,0\n")
    with pytest.raises(ValueError, match="min_radar_sinr_db"):
        plot_convergence(bad, tmp_path / "b.svg")


def test_header_only_csv_fails_with_message(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("parameter,value,mode,aggregate,trials,"
                     "min_radar_sinr_db,worst_comm_sinr_db\n")
    with pytest.raises(ValueError, match="no data rows"):
        plot_sweep(empty, tmp_path / "e.svg")
    truly_empty = tmp_path / "zero.csv"
    truly_empty.write_text("")
    with pytest.raises(ValueError, match="empty file"):
        read_csv(truly_empty)


def test_sweep_series_match_csv(tmp_path):
    series = plot_sweep(FIXTURES / "sweep_power_dbw.csv", tmp_path / "p.svg")
    header, rows = parse_fixture("sweep_power_dbw.csv")
    i_mode = header.index("mode")
    i_val = header.index("value")
    i_agg = header.index("aggregate")
    i_y = header.index("min_radar_sinr_db")
    for mode, (vals, means, stds) in series.items():
        for v, m, s in zip(vals, means, stds):
            want_mean = [float(r[i_y]) for r in rows
                         if r[i_mode] == mode and float(r[i_val]) == v
                         and r[i_agg] == "mean"]
            want_std = [float(r[i_y]) for r in rows
                        if r[i_mode] == mode and float(r[i_val]) == v
                        and r[i_agg] == "stddev"]
            assert want_mean == [m]
            assert want_std == [s]


def test_render_dispatch_and_input_immutability(tmp_path):
    src = FIXTURES / "sweep_power_dbw.csv"
    before = src.read_bytes()
    spec = FigureSpec(csv_path=src, kind="sweep", out_path=tmp_path / "r.svg")
    render(spec)
    assert src.read_bytes() == before
    with pytest.raises(ValueError):
        FigureSpec(csv_path=src, kind="pie", out_path=tmp_path / "x.svg")


def test_reproducible_output_bytes(tmp_path):
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    plot_convergence(FIXTURES / "convergence.csv", a)
    plot_convergence(FIXTURES / "convergence.csv", b)
    assert a.read_bytes() == b.read_bytes()


def test_cli_plot_and_errors(tmp_path, capsys):
    out = tmp_path / "cli.svg"
    rc = main(["plot", "--kind", "convergence",
               "--in", str(FIXTURES / "convergence.csv"), "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out

    rc = main(["plot", "--kind", "sweep",
               "--in", str(tmp_path / "missing.csv"),
               "--out", str(tmp_path / "x.svg")])
    assert rc == 1
    assert "error" in capsys.readouterr().err
