import json

import pytest

from tfim_locc import HamiltonianSpec, SolverOptions, ground_state
from tfim_locc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_majorize_worked_example(capsys):
    code, out, _ = run_cli(capsys, "majorize", "--a", "0.5,0.3,0.2", "--b", "0.5,0.4,0.1")
    assert code == 0
    assert out.strip() == "lower_to_higher"


def test_majorize_dominating_pair(capsys):
    code, out, _ = run_cli(capsys, "majorize", "--a", "0.5,0.3,0.2", "--b", "0.4,0.4,0.2")
    assert code == 0
    assert out.strip() == "higher_to_lower"


def test_majorize_crossing_pair(capsys):
    code, out, _ = run_cli(capsys, "majorize", "--a", "0.5,0.25,0.25", "--b", "0.4,0.4,0.2")
    assert code == 0
    assert out.strip() == "incomparable"


def test_majorize_bad_vector_names_flag(capsys):
    code, _, err = run_cli(capsys, "majorize", "--a", "0.5,0.6", "--b", "0.5,0.5")
    assert code == 2
    assert "--a" in err
    code, _, err = run_cli(capsys, "majorize", "--a", "0.9,-0.1,0.2", "--b", "0.5,0.5")
    assert code == 2
    assert "--a" in err


def test_unknown_flag_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["majorize", "--a", "0.5,0.5", "--b", "0.5,0.5", "--frobnicate"])
    assert info.value.code == 2


def test_nonconvergence_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "ground", "--n", "10", "--h", "1.0", "--max-iterations", "2"
    )
    assert code == 1
    assert "residual" in err


def test_ground_matches_library(capsys):
    code, out, err = run_cli(capsys, "ground", "--n", "6", "--h", "1.2")
    assert code == 0
    fields = dict(line.split(maxsplit=1) for line in out.strip().splitlines())
    state = ground_state(HamiltonianSpec(6, 1.2), SolverOptions())
    assert float(fields["energy"]) == state.energy
    assert int(fields["iterations"]) == state.iterations
    assert fields["method"] == "krylov"
    assert "# tolerance = 1e-12" in err


def test_ground_amplitude_dump(capsys, tmp_path):
    out_file = tmp_path / "amps.csv"
    code, _, _ = run_cli(
        capsys, "ground", "--n", "4", "--h", "0.8", "--amplitudes-out", str(out_file)
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "label,amplitude"
    assert len(lines) == 1 + 8
    total = sum(float(line.split(",")[1]) ** 2 for line in lines[1:])
    assert total == pytest.approx(1.0, abs=1e-12)


def test_renyi_single_value(capsys):
    code, out, _ = run_cli(capsys, "renyi", "--lambdas", "0.5,0.3,0.2", "--alpha", "2")
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.3959286763311392, abs=1e-12)


def test_renyi_curve_output(capsys):
    code, out, _ = run_cli(capsys, "renyi", "--lambdas", "0.25,0.25,0.25,0.25")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == ["0", "2.0"]
    assert lines[-1].split() == ["inf", "2.0"]
    assert len(lines) == 62 + 3


def test_renyi_inf_alpha(capsys):
    code, out, _ = run_cli(capsys, "renyi", "--lambdas", "0.5,0.5", "--alpha", "inf")
    assert code == 0
    assert float(out.strip()) == pytest.approx(1.0, abs=1e-12)


def test_elocc_directed_small(capsys):
    code, out, _ = run_cli(capsys, "elocc", "--n", "8", "--h-lo", "2.0", "--h-hi", "2.02")
    assert code == 0
    assert out.strip() == "lower_to_higher"


def test_sweep_row_counts(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "sweep", "--n", "4", "--h-start", "0.5", "--h-end", "0.6", "--h-step", "0.05",
        "--cache-dir", str(tmp_path / "cache"), "--out-dir", str(tmp_path),
    )
    assert code == 0
    lines = (tmp_path / "spectra.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 3
    assert (tmp_path / "renyi.csv").exists()


def test_config_file_and_flag_precedence(capsys, tmp_path):
    config_file = tmp_path / "cfg.json"
    config_file.write_text(json.dumps({"h_end": 0.6, "h_step": 0.05, "out_dir": str(tmp_path)}))

    code, _, err = run_cli(
        capsys,
        "sweep", "--n", "4", "--config", str(config_file),
        "--cache-dir", str(tmp_path / "c1"),
    )
    assert code == 0
    assert len((tmp_path / "spectra.csv").read_text().strip().splitlines()) == 1 + 3
    assert "# h_end = 0.6" in err

    # flag overrides the config file
    code, _, err = run_cli(
        capsys,
        "sweep", "--n", "4", "--config", str(config_file), "--h-end", "0.55",
        "--cache-dir", str(tmp_path / "c2"),
    )
    assert code == 0
    assert len((tmp_path / "spectra.csv").read_text().strip().splitlines()) == 1 + 2
    assert "# h_end = 0.55" in err


def test_env_var_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("TFIM_LOCC_CACHE", str(tmp_path / "envcache"))
    code, _, err = run_cli(
        capsys,
        "sweep", "--n", "4", "--h-start", "0.5", "--h-end", "0.55", "--h-step", "0.05",
        "--out-dir", str(tmp_path),
    )
    assert code == 0
    assert (tmp_path / "envcache" / "N4").exists()
    assert "envcache" in err


def test_config_unknown_key_rejected(capsys, tmp_path):
    config_file = tmp_path / "cfg.json"
    config_file.write_text(json.dumps({"h_stop": 0.6}))
    code, _, err = run_cli(capsys, "sweep", "--n", "4", "--config", str(config_file))
    assert code == 2
    assert "h_stop" in err


def test_minima_and_fit_outputs(capsys, tmp_path):
    common = [
        "--sizes", "4,6,8", "--h-start", "0.5", "--h-end", "2.5", "--h-step", "0.1",
        "--cache-dir", str(tmp_path / "cache"), "--out-dir", str(tmp_path),
        "--workers", "2",
    ]
    code, out, _ = run_cli(capsys, "minima", *common)
    assert code == 0
    assert (tmp_path / "minima.csv").exists()
    assert len(out.strip().splitlines()) == 6

    code, out, _ = run_cli(capsys, "fit", *common)
    assert code == 0
    fits = json.loads((tmp_path / "fit.json").read_text())
    assert [f["observable"] for f in fits] == ["f2", "f3"]
    assert all(f["b"] > 0 for f in fits)

    code, out, _ = run_cli(capsys, "report", *common)
    assert code == 0
    for name in ("spectra.csv", "renyi.csv", "verdicts.csv", "minima.csv", "fit.json"):
        assert (tmp_path / name).exists()
    assert any(line.startswith("h_c ") for line in out.splitlines())


def test_profiles_stdout(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "profiles", "--n", "4", "--h-start", "0.5", "--h-end", "1.0", "--h-step", "0.1",
        "--cache-dir", str(tmp_path / "cache"),
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n_sites,h,f1,f2,f3,d1,d2,d3"
    assert len(lines) == 1 + 6
