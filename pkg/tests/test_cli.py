import json
import math

import numpy as np
import pytest

from mecs import cli


def run(args, capsys=None):
    code = cli.main(args)
    return code


def read_csv_rows(path):
    """CSV rows minus the metadata comment block."""
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return lines


# -- parsing helpers --------------------------------------------------------------


def test_parse_values_lists_and_ranges():
    assert cli.parse_values("1,2.5,4") == [1.0, 2.5, 4.0]
    assert cli.parse_values("2:6:2", int) == [2, 4, 6]
    assert cli.parse_values("2:5:1", int) == [2, 3, 4, 5]
    assert cli.parse_values("1+2j,3", complex) == [1 + 2j, 3 + 0j]


def test_parse_values_bad_range():
    with pytest.raises(ValueError):
        cli.parse_values("1:2:3:4")
    with pytest.raises(ValueError):
        cli.parse_values("5:1:-1")


def test_input_presets():
    assert np.allclose(cli.input_preset("basis2", 4), [0, 0, 1, 0])
    assert np.allclose(cli.input_preset("uniform", 4), np.ones(4) / 2)
    plusi = cli.input_preset("plusi", 2)
    assert plusi[1] == pytest.approx(1j / math.sqrt(2))
    with pytest.raises(ValueError):
        cli.input_preset("basis9", 4)
    with pytest.raises(ValueError):
        cli.input_preset("garbage", 4)


# -- subcommands ------------------------------------------------------------------


def test_coefficients_command(tmp_path):
    out = tmp_path / "fq.csv"
    assert run(["--out", str(out), "coefficients", "--m-max", "6"]) == 0
    lines = read_csv_rows(out)
    assert lines[0] == "M,q,re_f,im_f,closed_minus_dft_abs"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == sum(range(2, 7))
    assert all(float(r[-1]) < 1e-12 for r in rows)
    # |f| = 1/sqrt(M) per row
    for r in rows:
        m = int(r[0])
        mag = math.hypot(float(r[2]), float(r[3]))
        assert abs(mag - 1 / math.sqrt(m)) < 1e-12


def test_entropy_sweep_command_json(tmp_path):
    out = tmp_path / "sweep.json"
    assert run(["--format", "json", "--out", str(out), "entropy-sweep", "--alpha-sq", "1", "--m", "2,3"]) == 0
    payload = json.loads(out.read_text())
    assert payload["columns"][0] == "alpha_sq"
    assert "metadata" in payload and "config" in payload["metadata"]
    row = dict(zip(payload["columns"], payload["rows"][0]))
    assert row["M"] == 2
    assert abs(row["entropy_ebits"] - 0.9737) < 1e-3
    assert row["log2M_reference"] == 1.0


def test_backends_check_command(tmp_path):
    out = tmp_path / "check.csv"
    assert run(["--out", str(out), "backends-check", "--beta", "1", "--m", "2,5"]) == 0
    lines = read_csv_rows(out)
    rows = [dict(zip(lines[0].split(","), l.split(","))) for l in lines[1:]]
    assert all(float(r["fidelity"]) >= 1 - 1e-8 for r in rows)
    assert all(float(r["distribution_linf"]) < 1e-10 for r in rows)


def test_backends_check_rejects_large_beta(capsys):
    assert run(["backends-check", "--beta", "4", "--m", "2"]) == 2


def test_teleport_command_and_determinism(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--seed", "7", "teleport", "--m", "2", "--alpha", "1.5", "--trials", "300", "--input", "plusi"]
    assert run(["--out", str(out1)] + args) == 0
    assert run(["--out", str(out2)] + args) == 0
    assert read_csv_rows(out1) == read_csv_rows(out2)
    header, row = read_csv_rows(out1)
    rec = dict(zip(header.split(","), row.split(",")))
    assert rec["M"] == "2"
    assert 0.0 <= float(rec["mc_success_rate"]) <= 1.0
    assert float(rec["exact_success"]) == pytest.approx(
        float(rec["mc_success_rate"]), abs=4 * float(rec["mc_success_stderr"]) + 1e-9
    )


def test_teleport_seed_changes_output(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["--seed", "1", "--out", str(out1), "teleport", "--alpha", "1", "--trials", "200"])
    run(["--seed", "2", "--out", str(out2), "teleport", "--alpha", "1", "--trials", "200"])
    assert read_csv_rows(out1) != read_csv_rows(out2)


def test_teleport_rejects_odd_m(tmp_path):
    assert run(["teleport", "--m", "3", "--trials", "10"]) == 2


def test_config_file_with_cli_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=5\ntrials=100\nalpha=1\n")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run(["--config", str(cfg), "--out", str(out1), "teleport"]) == 0
    # command line wins over the file
    assert run(["--config", str(cfg), "--seed", "5", "--out", str(out2), "teleport", "--alpha", "1"]) == 0
    assert read_csv_rows(out1) == read_csv_rows(out2)


def test_config_file_bad_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("not a key value pair\n")
    assert run(["--config", str(cfg), "coefficients"]) == 2


def test_stdout_output(capsys):
    assert run(["coefficients", "--m-max", "2"]) == 0
    captured = capsys.readouterr()
    assert "M,q,re_f,im_f,closed_minus_dft_abs" in captured.out


def test_plot_rendering(tmp_path):
    out = tmp_path / "sweep.csv"
    fig = tmp_path / "sweep.png"
    assert run(["--out", str(out), "--plot", str(fig), "entropy-sweep", "--alpha-sq", "1", "--m", "2,3,4"]) == 0
    assert fig.stat().st_size > 0
    fig2 = tmp_path / "tele.png"
    assert run(["--out", str(tmp_path / "t.csv"), "--plot", str(fig2), "teleport", "--alpha", "1", "--trials", "50"]) == 0
    assert fig2.stat().st_size > 0
