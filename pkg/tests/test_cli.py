"""End-to-end CLI runs: exit codes, report shape, and byte determinism."""

import json
import math
import os

import pytest

import limsup_lab.verify
from limsup_lab import cli
from limsup_lab.config import config_sha256
from limsup_lab.verify import CriterionResult


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def scalar_config(**run):
    return {
        "schema_version": 1,
        "instance": {
            "n": 1,
            "m": 1,
            "mode": "nonweighted",
            "psi": [{"kind": "power", "tau": 2.0, "coeff": 0.25}],
        },
        "run": {"Qmax": 6, "Qhi": 64, "samples": 20_000, **run},
    }


def weighted_config():
    return {
        "schema_version": 1,
        "instance": {
            "n": 1,
            "m": 2,
            "mode": "weighted",
            "psi": [
                {"kind": "power", "tau": 1.0},
                {"kind": "power", "tau": 3.0},
            ],
            "f": {"kind": "power", "s": 1.1},
        },
        "run": {"Kmax": 8},
    }


def mult_config(**run):
    return {
        "schema_version": 1,
        "instance": {
            "n": 1,
            "m": 2,
            "mode": "multiplicative",
            "psi": [{"kind": "power", "tau": 2.0}],
        },
        "run": run,
    }


def test_no_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit):
        cli.main([])


def test_missing_config_exits_2(capsys):
    assert cli.main(["measure"]) == 2
    assert "--config is required" in capsys.readouterr().err


def test_config_errors_exit_2(tmp_path, capsys):
    bad_m = scalar_config()
    bad_m["instance"]["m"] = 0
    assert cli.main(["measure", "--config", write_config(tmp_path, bad_m, "m.json")]) == 2

    unknown = scalar_config()
    unknown["instance"]["extra"] = 1
    assert (
        cli.main(["measure", "--config", write_config(tmp_path, unknown, "u.json")]) == 2
    )

    wrong_version = scalar_config()
    wrong_version["schema_version"] = 99
    assert (
        cli.main(["measure", "--config", write_config(tmp_path, wrong_version, "v.json")])
        == 2
    )

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert cli.main(["measure", "--config", str(garbled)]) == 2
    assert cli.main(["measure", "--config", str(tmp_path / "absent.json")]) == 2

    ok = write_config(tmp_path, scalar_config(), "ok.json")
    assert cli.main(["measure", "--config", ok, "--samples", "0"]) == 2
    capsys.readouterr()


def test_measure_report_shape(tmp_path):
    cfg_path = write_config(tmp_path, scalar_config())
    out = tmp_path / "report.json"
    assert cli.main(["measure", "--config", cfg_path, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert set(report) == {
        "command",
        "config",
        "config_sha256",
        "results",
        "timing",
        "seed",
        "version",
    }
    assert report["command"] == "measure"
    assert report["timing"] is None
    assert report["seed"] == 0
    raw = json.loads(open(cfg_path).read())
    assert report["config"] == raw
    assert report["config_sha256"] == config_sha256(raw)
    rows = report["results"]["table"]["rows"]
    assert len(rows) == 6
    # psi(2) = 0.25/4: the set has measure 2 * delta exactly
    assert rows[1] == [2, 0.0625, 0.125, ""]


def test_seed_override_echoed(tmp_path):
    cfg_path = write_config(tmp_path, scalar_config())
    out = tmp_path / "r.json"
    assert cli.main(["measure", "--config", cfg_path, "--seed", "7", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 7


def test_csv_matches_json_table(tmp_path):
    cfg_path = write_config(tmp_path, scalar_config())
    jout, cout = tmp_path / "r.json", tmp_path / "r.csv"
    assert cli.main(["measure", "--config", cfg_path, "--out", str(jout)]) == 0
    assert (
        cli.main(["measure", "--config", cfg_path, "--format", "csv", "--out", str(cout)])
        == 0
    )
    report = json.loads(jout.read_text())
    lines = cout.read_text().splitlines()
    assert lines[0].split(",") == report["results"]["table"]["columns"]
    for line, row in zip(lines[1:], report["results"]["table"]["rows"]):
        cells = line.split(",")
        assert int(cells[0]) == row[0]
        assert float(cells[1]) == row[1]
        assert float(cells[2]) == row[2]
        assert cells[3] == row[3]


def test_criteria_command_weighted(tmp_path):
    cfg_path = write_config(tmp_path, weighted_config())
    out = tmp_path / "criteria.json"
    assert cli.main(["criteria", "--config", cfg_path, "--out", str(out)]) == 0
    res = json.loads(out.read_text())["results"]
    assert res["verdicts"]["lebesgue"]["outcome"] == "Zero"
    assert res["verdicts"]["hausdorff"]["outcome"] == "Full"
    assert set(res["series"]) == {"weighted", "weighted_hausdorff"}
    ce = res["cost_exponent"]
    assert ce["status"] == "ok"
    assert ce["window"] == [1, 2]
    assert abs(ce["value"] - 1.25) < 5e-3
    # table interleaves both series, Kmax blocks each
    assert len(res["table"]["rows"]) == 2 * 8


def test_dims_and_fourier_commands(tmp_path):
    cfg_path = write_config(tmp_path, weighted_config())
    out = tmp_path / "dims.json"
    assert cli.main(["dims", "--config", cfg_path, "--out", str(out)]) == 0
    res = json.loads(out.read_text())["results"]
    assert res["rynne_dickinson"]["value"] == pytest.approx(1.25)
    assert res["wang_wu"]["value"] == pytest.approx(1.25)
    assert res["critical_exponents"]["s_Psi"] == pytest.approx(0.25)
    assert res["fourier_dim"]["value"] == pytest.approx(0.5)

    out2 = tmp_path / "fourier.json"
    assert cli.main(["fourier", "--config", cfg_path, "--out", str(out2)]) == 0
    res2 = json.loads(out2.read_text())["results"]
    assert res2["value"] == pytest.approx(0.5)
    assert res2["applicable"] is True


def test_decompose_command_and_bad_delta(tmp_path):
    ok_path = write_config(tmp_path, mult_config(delta=2.0**-6, samples=20_000))
    out = tmp_path / "dec.json"
    assert cli.main(["decompose", "--config", ok_path, "--out", str(out)]) == 0
    res = json.loads(out.read_text())["results"]
    assert res["scale_N"] == 6
    assert res["cardinality"] == math.comb(5, 1)
    assert all(sum(ix) == 4 for ix in res["indices"])
    assert res["sandwich"]["ok"] is True
    # delta passes global config validation but not the decomposition's range
    bad_path = write_config(tmp_path, mult_config(delta=0.6), "bad.json")
    assert cli.main(["decompose", "--config", bad_path]) == 2


def test_cover_scalar_exact(tmp_path):
    cfg_path = write_config(tmp_path, scalar_config())
    out = tmp_path / "cover.json"
    assert cli.main(["cover", "--config", cfg_path, "--out", str(out)]) == 0
    res = json.loads(out.read_text())["results"]
    assert res["coverage"]["method"] == "interval_sweep"
    assert res["coverage"]["half_width"] is None
    rows = res["table"]["rows"]
    assert rows[-1][4] == pytest.approx(res["first_moment"], rel=1e-9)
    assert res["coverage"]["value"] <= res["first_moment"] + 1e-12


def test_cover_budget_violation_exits_3(tmp_path, capsys):
    cfg_path = write_config(tmp_path, mult_config())
    assert cli.main(["cover", "--config", cfg_path, "--samples", "3000000"]) == 3
    assert "invariant violation" in capsys.readouterr().err


def test_quasi_byte_identical_across_workers(tmp_path, monkeypatch):
    doc = {
        "schema_version": 1,
        "instance": {
            "n": 2,
            "m": 1,
            "mode": "nonweighted",
            "psi": [{"kind": "power", "tau": 2.0}],
        },
        "run": {"samples": 20_000, "Qlo": 1, "Qhi": 12},
    }
    cfg_path = write_config(tmp_path, doc)
    outs = []
    for workers, name in (("1", "w1.json"), ("4", "w4.json")):
        monkeypatch.setenv("LIMSUP_LAB_WORKERS", workers)
        out = tmp_path / name
        assert cli.main(["quasi", "--config", cfg_path, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    res = json.loads(outs[0])["results"]
    assert res["C"] >= 1.0
    assert res["lamperti_lower"] == pytest.approx(1.0 / res["C"], rel=1e-9)


def test_verify_suite_selector(tmp_path):
    out = tmp_path / "verify.json"
    assert cli.main(["verify", "--suite", "dyadic", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["config"] == {"suite": "dyadic", "seed": 0}
    crits = report["results"]["criteria"]
    assert len(crits) == 1
    assert crits[0]["number"] == 3
    assert crits[0]["name"] == "dyadic-decomposition"
    assert crits[0]["passed"] is True
    assert report["results"]["all_passed"] is True


def test_verify_failure_exits_1(tmp_path, monkeypatch, capsys):
    def stub(selector=None, seed=0):
        return [
            CriterionResult(
                number=1,
                name="stub",
                passed=False,
                measured="0",
                expected="1",
                tolerance="0",
                seconds=0.0,
            )
        ]

    monkeypatch.setattr(limsup_lab.verify, "run_suite", stub)
    out = tmp_path / "fail.json"
    assert cli.main(["verify", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["results"]["all_passed"] is False
    capsys.readouterr()
