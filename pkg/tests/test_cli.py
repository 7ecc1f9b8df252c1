import io

import pytest

from tpnet import cli
from tpnet.csvio import REPORT_COLUMNS, SWEEP_COLUMNS, read_report


def run_cli(argv, capsys, env=None):
    code = cli.main(argv, environ=env or {})
    out, err = capsys.readouterr()
    return code, out, err


def test_single_solve_row(capsys):
    code, out, _ = run_cli(["solve", "--problem", "func2d", "--arch", "tp-resnet", "--p", "6", "--grid", "21x21"], capsys)
    assert code == 0
    rows = read_report(io.StringIO(out))
    assert len(rows) == 1 and list(rows[0]) == list(REPORT_COLUMNS)
    assert rows[0]["M"] == "36" and rows[0]["btm_blocks"] == "1" and rows[0]["error"] == ""
    assert len(rows[0]["time_s"].split(".")[1]) == 4


def test_width_range_gives_one_row_per_cell(capsys):
    code, out, _ = run_cli(["solve", "--problem", "func2d", "--p", "2:6:2", "--seeds", "0,1", "--grid", "11x11"], capsys)
    rows = read_report(io.StringIO(out))
    assert code == 0
    assert [(r["p"], r["seed"]) for r in rows] == [("2", "0"), ("2", "1"), ("4", "0"), ("4", "1"), ("6", "0"), ("6", "1")]


def test_parallel_jobs_keep_order_and_output(capsys):
    argv = ["solve", "--problem", "helmholtz2d", "--arch", "tp-elm", "--p", "3,5,4", "--seeds", "1,0", "--grid", "9x9"]
    _, serial, _ = run_cli(argv, capsys)
    _, parallel, _ = run_cli(argv + ["--jobs", "2"], capsys)
    strip = lambda text: [{k: v for k, v in r.items() if k != "time_s"} for r in read_report(io.StringIO(text))]
    assert strip(serial) == strip(parallel)


@pytest.mark.parametrize("argv, field", [
    (["solve", "--problem", "nope"], "problem"),
    (["solve", "--problem", "func2d", "--arch", "cnn"], "arch"),
    (["solve", "--problem", "func2d", "--seeds", ""], "seeds"),
    (["solve", "--problem", "func2d", "--seeds", ","], "seeds"),
    (["solve", "--problem", "func2d", "--m", "99"], "m"),
    (["solve", "--problem", "func2d", "--grid", "ax3"], "grid"),
    (["solve", "--problem", "func2d", "--picard-kmax", "0"], "picard_kmax"),
    (["solve", "--arch", "tp-elm"], "problem"),
    (["sweep", "--table", "3"], "table"),
    (["sweep", "--table", "9"], "table"),
])
def test_usage_errors_name_the_field(argv, field, capsys):
    code, out, err = run_cli(argv, capsys)
    assert code == cli.EXIT_USAGE
    assert f"error: {field}:" in err
    assert out == ""


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# recipe\nproblem = func2d\narch = tp-elm\np = 3\nseed = 4\ngrid = 9x9\n")
    _, out, _ = run_cli(["solve", "--config", str(cfg)], capsys)
    assert read_report(io.StringIO(out))[0]["seed"] == "4"
    _, out, _ = run_cli(["solve", "--config", str(cfg)], capsys, env={"TPNET_SEED": "7"})
    assert read_report(io.StringIO(out))[0]["seed"] == "7"
    _, out, _ = run_cli(["solve", "--config", str(cfg), "--seed", "9"], capsys, env={"TPNET_SEED": "7"})
    row = read_report(io.StringIO(out))[0]
    assert row["seed"] == "9" and row["p"] == "3"
    _, out, _ = run_cli(["solve", "--config", str(cfg), "--p", "4"], capsys)
    assert read_report(io.StringIO(out))[0]["M"] == "16"


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("problem = func2d\ncolour = blue\n")
    code, _, err = run_cli(["solve", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err
    code, _, err = run_cli(["solve", "--problem", "func2d"], capsys, env={"TPNET_SEED": "x"})
    assert code == 2 and "TPNET_SEED" in err


def test_failed_cell_gives_partial_csv_and_nonzero_exit(tmp_path, capsys):
    out = tmp_path / "r.csv"
    # block time-marching needs a time axis: the cell fails but the CSV is written
    code, _, err = run_cli(["solve", "--problem", "func2d", "--p", "3", "--grid", "5x5", "--btm-blocks", "2",
                            "--out", str(out)], capsys)
    assert code == cli.EXIT_FAILED and "failed" in err
    rows = read_report(out.open())
    assert rows[0]["error"].startswith("InvalidSpecError") and rows[0]["L_inf"] == ""


def test_save_solution(tmp_path, capsys):
    from tpnet.solvers import load_solution
    path = tmp_path / "s.tpsol"
    code, _, _ = run_cli(["solve", "--problem", "func2d", "--p", "3", "--grid", "5x5", "--save", str(path)], capsys)
    assert code == 0 and load_solution(path).basis.count == 9
    code, _, err = run_cli(["solve", "--problem", "func2d", "--p", "3,4", "--save", str(path)], capsys)
    assert code == 2 and "save" in err


def test_hlconc_widths(capsys):
    _, out, _ = run_cli(["solve", "--problem", "func2d", "--arch", "hlconc", "--p", "4", "--grid", "5x5"], capsys)
    row = read_report(io.StringIO(out))[0]
    assert row["M"] == "16" and row["p"] == ""
    _, out, _ = run_cli(["solve", "--problem", "func2d", "--arch", "hlconc", "--m", "10", "--grid", "5x5"], capsys)
    assert read_report(io.StringIO(out))[0]["M"] == "10"


def test_sweep_uses_sweep_schema(monkeypatch, capsys):
    calls = {}

    def fake(table, scale, seeds, jobs, overrides):
        calls.update(table=table, scale=scale, seeds=seeds, jobs=jobs, overrides=overrides)
        return [{"problem": "func2d", "arch": "tp-elm", "M": 100, "seed": 0, "table": 1, "reference_L_inf": 0.5}]

    monkeypatch.setattr(cli, "sweep_table", fake)
    code, out, _ = run_cli(["sweep", "--table", "1", "--seeds", "0:1", "--rcond", "default"], capsys)
    assert code == 0
    assert calls == {"table": 1, "scale": "desk", "seeds": [0, 1], "jobs": 1, "overrides": {"rcond": None}}
    assert out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert read_report(io.StringIO(out))[0]["reference_L_inf"] == "5.0000000000000000e-01"


def test_check_subcommand(capsys):
    code, out, _ = run_cli(["check", "--cases", "5"], capsys)
    assert code == 0 and out.strip().endswith("checks passed")
    assert out.count("PASS") == 17


def test_parse_int_list():
    assert cli.parse_int_list("10:100:10", "p") == list(range(10, 101, 10))
    assert cli.parse_int_list("1,3:5", "p") == [1, 3, 4, 5]
    with pytest.raises(cli.UsageError):
        cli.parse_int_list("1:5:0", "p")
