"""CLI behavior through in-process main() calls."""

import json

import pytest

from island_evo.cli import main
from island_evo.harness import CSV_COLUMNS


def test_oracle_lo_runtime_output(capsys):
    assert main(["oracle", "lo-runtime", "--n", "5"]) == 0
    assert capsys.readouterr().out == "lo_runtime(n=5) = 20.517578125\n"


def test_oracle_choose_sum_output(capsys):
    assert main(["oracle", "choose-sum", "--n", "2"]) == 0
    assert capsys.readouterr().out == "choose_sum_div(n=2) = 1.25\n"


def test_oracle_hitting_time(capsys):
    code = main(
        ["oracle", "hitting-time", "--fitness", '{"variant": "onemax"}', "--n", "2"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("hitting_time[onemax, n=2, n_mut=2] = 3.0")


def test_oracle_hitting_prob(capsys):
    code = main(
        ["oracle", "hitting-prob", "--fitness", '{"variant": "fork", "r": 2}', "--n", "6"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("hitting_prob[fork, n=6, valley first] = ")
    assert abs(float(out.rsplit("= ", 1)[1]) - 0.5) < 1e-9


def test_oracle_hitting_prob_requires_valley(capsys):
    code = main(
        ["oracle", "hitting-prob", "--fitness", '{"variant": "onemax"}', "--n", "4"]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_oracle_lo_block(capsys):
    code = main(
        ["oracle", "lo-block", "--n", "12", "--k", "6", "--inner-expected", "10"]
    )
    assert code == 0
    assert "26.855101235576985" in capsys.readouterr().out


def _write_config(path, **overrides):
    scenario = {
        "name": "cli_probe",
        "algorithm": "island",
        "fitness": {"variant": "fork", "r": 2},
        "topology": "ring",
        "n_grid": [6, 8],
        "lambda_rule": 3,
        "tau_rule": 8,
        "replicates": 30,
        "termination": "all_optimal",
        "master_seed": 99,
    }
    scenario.update(overrides)
    path.write_text(json.dumps([scenario]))
    return path


def test_simulate_writes_csv(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("ISLAND_EVO_THREADS", raising=False)
    cfg = _write_config(tmp_path / "cfg.json")
    out = tmp_path / "res.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    err = capsys.readouterr().err
    assert "cli_probe" in err and "n=8" in err
    lines = out.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3


def test_simulate_stdout_and_quiet(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("ISLAND_EVO_THREADS", raising=False)
    cfg = _write_config(tmp_path / "cfg.json", n_grid=[6])
    assert main(["simulate", "--config", str(cfg), "--quiet"]) == 0
    captured = capsys.readouterr()
    assert captured.err == ""
    assert captured.out.startswith("schema_version,")


def test_simulate_env_overrides_threads(tmp_path, capsys, monkeypatch):
    cfg = _write_config(tmp_path / "cfg.json", n_grid=[6])
    monkeypatch.delenv("ISLAND_EVO_THREADS", raising=False)
    main(["simulate", "--config", str(cfg), "--quiet"])
    plain = capsys.readouterr().out
    monkeypatch.setenv("ISLAND_EVO_THREADS", "2")
    main(["simulate", "--config", str(cfg), "--threads", "1", "--quiet"])
    assert capsys.readouterr().out == plain
    monkeypatch.setenv("ISLAND_EVO_THREADS", "zzz")
    assert main(["simulate", "--config", str(cfg), "--quiet"]) == 2


def test_simulate_rejects_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('[{"name": "x", "algorithm": "island"}]')
    assert main(["simulate", "--config", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
    bad.write_text("not json")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2


def test_fit_command(tmp_path, capsys):
    rows = [",".join(CSV_COLUMNS)]
    for n in (8, 16, 32):
        mean_evals = 2.0 * n**3
        rows.append(
            f"1,cube,single_ea,onemax,{n},,,1,inf,isolated,any_optimal,100,0,"
            f"{mean_evals},1.0,{mean_evals},{mean_evals},1.0,0.0,0.0,7"
        )
    csv_path = tmp_path / "fit.csv"
    csv_path.write_text("\n".join(rows) + "\n")
    assert main(["fit", "--csv", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("cube: evaluations ~ n^3.000")
    assert main(["fit", "--csv", str(csv_path), "--field", "rounds"]) == 0

    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(CSV_COLUMNS) + "\n")
    assert main(["fit", "--csv", str(empty)]) == 2


def test_verify_subset(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["verify", "--only", "C8,C9", "--out", str(report_path)])
    assert code == 0
    assert "all criteria passed" in capsys.readouterr().out
    report = json.loads(report_path.read_text())
    assert report["all_passed"] is True
    assert [c["cid"] for c in report["criteria"]] == ["C8", "C9"]
    assert main(["verify", "--only", "C99"]) == 2
