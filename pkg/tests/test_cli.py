# tests/test_cli.py
import io
import json

import pandas as pd
import pytest

from src.cli import dispatch


def read_output(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text), comment="#")


def header_values(text: str) -> dict[str, str]:
    pairs = (line[2:].split("=", 1) for line in text.splitlines() if line.startswith("# "))
    return {key: value for key, value in pairs}


def test_dict_command(tmp_path):
    path = tmp_path / "d.npd"
    assert dispatch(["dict", "--family", "rpt", "--pmax", "6", "--len", "8", "--out", str(path)]) == 0
    assert path.read_text(encoding="utf-8").splitlines()[0] == "npd v1 family=rpt L=8 pmax=6 normalized=1"


def test_coherence_mu(capsys):
    assert dispatch(["coherence", "--measure", "mu"]) == 0
    out = capsys.readouterr().out
    df = read_output(out)
    assert df.loc[0, "value"] == pytest.approx(0.5285, abs=5e-4)
    assert header_values(out)["command"] == "coherence"


def test_coherence_from_file(tmp_path, capsys):
    path = tmp_path / "d.npd"
    dispatch(["dict", "--pmax", "6", "--len", "8", "--out", str(path)])
    capsys.readouterr()

    assert dispatch(["coherence", "--dict", str(path), "--measure", "npi", "--k", "4", "--m", "1"]) == 0
    df = read_output(capsys.readouterr().out)
    assert df["measure"].tolist() == ["npi"]


def test_coherence_missing_argument(capsys):
    assert dispatch(["coherence", "--measure", "npi", "--k", "4"]) == 2
    assert "error: ValueError: --measure npi requires --m" in capsys.readouterr().err


def test_bounds_thm2(capsys):
    assert dispatch(["bounds", "--condition", "thm2", "--periods", "4", "--eps", "0.5"]) == 0
    df = read_output(capsys.readouterr().out)
    assert bool(df.loc[0, "holds"])
    assert df.loc[0, "threshold"] == pytest.approx(1.21, abs=0.01)
    assert not bool(df.loc[0, "extrapolated"])


def test_bounds_classic_mu_without_dictionary(capsys):
    assert dispatch(["bounds", "--condition", "classic-mu", "--mu", "0.5285", "--k", "4"]) == 0
    df = read_output(capsys.readouterr().out)
    assert not bool(df.loc[0, "holds"])


def test_divisible_periods_exit_two(capsys):
    assert dispatch(["bounds", "--condition", "thm2", "--periods", "2,4"]) == 2
    assert "error: DivisibilityViolation:" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert dispatch(["coherence", "--bogus"]) == 1
    assert "error: usage:" in capsys.readouterr().err
    assert dispatch([]) == 1


def test_help_exits_zero(capsys):
    assert dispatch(["--help"]) == 0
    assert "coherence" in capsys.readouterr().out


def test_recover_mixture(capsys):
    assert dispatch(["recover", "--periods", "2,3", "--stop-k", "4", "--gamma", "0.5"]) == 0
    out = capsys.readouterr().out
    headers = header_values(out)
    assert headers["estimated_period"] == "6"
    assert headers["hidden_periods"] == "2,3"
    assert headers["true_support"] == "1,2,3,4"
    assert read_output(out)["index"].tolist() == [1, 2, 3, 4]


def test_recover_from_signal_file(tmp_path, capsys):
    path = tmp_path / "y.txt"
    path.write_text("\n".join(["1", "-1"] * 50) + "\n", encoding="utf-8")
    assert dispatch(["recover", "--signal", str(path), "--method", "bp"]) == 0
    out = capsys.readouterr().out
    assert header_values(out)["estimated_period"] == "2"
    assert read_output(out)["atom_period"].tolist() == [2]


def test_recover_is_reproducible(capsys):
    argv = ["recover", "--periods", "4", "--noise-sigma", "0.01", "--seed", "9", "--stop-k", "4"]
    dispatch(argv)
    first = capsys.readouterr().out
    dispatch(argv)
    assert capsys.readouterr().out == first


def test_sweep_writes_outputs(tmp_path, capsys):
    out = tmp_path / "runs" / "sweep"
    argv = [
        "sweep-recovery", "--k", "4:5", "--m", "2", "--trials", "2", "--gamma", "0.5",
        "--jobs", "1", "--out", str(out), "--db", str(tmp_path / "r.db"),
    ]
    assert dispatch(argv) == 0
    stdout = capsys.readouterr().out
    assert out.with_suffix(".csv").read_text(encoding="utf-8") == stdout
    assert out.with_suffix(".svg").exists()
    assert (tmp_path / "r.db").exists()


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"trials": 5, "k_range": "4:5", "gamma_range": [0.5]}), encoding="utf-8")
    argv = ["sweep-recovery", "--config", str(config), "--trials", "2", "--jobs", "1", "--out", str(tmp_path / "s")]
    assert dispatch(argv) == 0
    df = read_output(capsys.readouterr().out)
    assert df["point_k"].tolist() == [4, 4, 5, 5]
    # the only member of Q_5(2) is {2,3}, so each row aggregates 2 trials
    assert (df["trials"] == 2).all()


def test_experiments_reject_dictionary_files(tmp_path, capsys):
    assert dispatch(["phase", "--dict", "x.npd", "--out", str(tmp_path / "p")]) == 2
    assert "error: ValueError:" in capsys.readouterr().err


def test_bad_config_file(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text("{not json", encoding="utf-8")
    assert dispatch(["phase", "--config", str(config), "--out", str(tmp_path / "p")]) == 2
    assert "error: ConfigError:" in capsys.readouterr().err


def test_sweep_bounded_at_documented_eps(tmp_path, capsys):
    argv = [
        "sweep-bounded", "--periods", "4", "--eps", "0.5", "--gamma", "1.21,2", "--trials", "20",
        "--jobs", "1", "--out", str(tmp_path / "bounded"),
    ]
    assert dispatch(argv) == 0
    df = read_output(capsys.readouterr().out)
    assert df["point_s_or_gamma_or_alpha"].tolist() == [1.21, 2.0]
    assert (df["success_rate"] == 1.0).all()
