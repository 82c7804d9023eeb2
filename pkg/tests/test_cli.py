import json

import pytest

from rotor_bands.__main__ import run, build_parser


def test_bands_csv(tmp_path):
    path = tmp_path / "bands.csv"
    assert run(["bands", "--p", "1", "--q", "3", "--beta", "0.5", "--mu", "0.5", "--grid", "64",
                "--format", "csv", "-o", str(path)]) == 0
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == "theta,phase_1,phase_2,phase_3"
    assert len(lines) == 66
    assert lines[-1].startswith("widths,")


def test_flatness_summary(capsys):
    assert run(["flatness", "--P", "2", "--Q", "2", "--beta", "0", "--mu", "1.0", "--grid", "32"]) == 0
    captured = capsys.readouterr()
    assert "all bands flat" in captured.err
    assert captured.out.startswith("band,width,flat")


def test_not_a_resonance(capsys):
    assert run(["bands", "--p", "1", "--q", "3", "--beta", "0.3", "--mu", "0.5"]) == 2
    assert "not a resonant" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["plot"], ["bands", "--grid", "many"], ["bands", "--format", "xml"]])
def test_usage_errors(argv):
    assert run(argv) == 2


def test_help_exits_cleanly():
    assert run(["--help"]) == 0
    assert build_parser().parse_args(["gamma"]).command == "gamma"


def test_gamma_json(tmp_path):
    path = tmp_path / "gamma.json"
    assert run(["gamma", "--quadrature-points", "1000", "--format", "json", "-o", str(path)]) == 0
    document = json.loads(path.read_text(encoding='utf-8'))
    record = document["data"][0]
    assert set(record) == {"x_star", "lambda_star", "value", "quadrature_error"}
    assert -0.0020 <= record["value"] <= -0.0013
    assert document["meta"]["command"] == "gamma"
    assert "version" in document["meta"]


def test_anti_resonance_widths_json(tmp_path):
    path = tmp_path / "widths.json"
    assert run(["bands", "--P", "2", "--Q", "2", "--beta", "0", "--mu", "1", "--grid", "32", "--format", "json",
                "-o", str(path)]) == 0
    widths = json.loads(path.read_text(encoding='utf-8'))["footer"]["widths"]
    assert len(widths) == 2
    assert max(abs(w) for w in widths) < 1e-12


def test_output_is_reproducible(tmp_path, monkeypatch):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    argv = ["decomp-check", "--p", "1", "--q", "3", "--mu", "1", "--grid", "96", "--trials", "3", "--seed", "7"]
    monkeypatch.setenv("ROTOR_BANDS_THREADS", "1")
    assert run(argv + ["-o", str(first)]) == 0
    monkeypatch.setenv("ROTOR_BANDS_THREADS", "4")
    assert run(argv + ["-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_grid_mismatch_is_a_usage_error():
    assert run(["decomp-check", "--p", "1", "--q", "3", "--mu", "1", "--grid", "100"]) == 2


def test_config_file(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"P": 2, "Q": 2, "beta": 0, "mu": 0.5, "grid": 16}))
    assert run(["flatness", "--config", str(config)]) == 0
    assert "all bands flat" in capsys.readouterr().err


def test_gauss_command(capsys):
    assert run(["gauss", "--p", "1", "--q", "5", "--N", "5", "--T", "4"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].split(",")[8] == "multiple-of-q"


def test_coeffs_command(capsys):
    assert run(["coeffs", "--p", "1", "--q", "3", "--j", "1"]) == 0
    header, row = capsys.readouterr().out.splitlines()[:2]
    assert header.startswith("j,alpha,s_real")
    assert row.startswith("1,2,")


def test_unsupported_params_exit_code():
    assert run(["coeffs", "--p", "1", "--q", "4"]) == 2


def test_verify_subset(tmp_path):
    path = tmp_path / "verify.csv"
    assert run(["verify", "--checks", "1,8", "--grid", "64", "-o", str(path)]) == 0
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == "criterion,name,passed,value,detail"
    assert [line.split(",")[2] for line in lines[1:]] == ["true", "true"]


def test_decay_needs_five_orders(capsys):
    assert run(["decay", "--q-list", "3,5,7"]) == 2
    assert "at least 5 orders" in capsys.readouterr().err
