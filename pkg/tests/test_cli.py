import json
from pathlib import Path

import pytest

from app.main import EXIT_FAILED, EXIT_INVALID_CONFIG, EXIT_OK, create_parser, main
from app.models.report import ScenarioReport, ScenarioStatus
from app.routers.scenarios import load_config_directory, save_report
from utils.classical_utils import SCAN_COLUMNS

SINGLE_CHAIN = {"schema_version": 1, "scenario": "single-chain", "label": "sc", "gamma": 0.3, "tau_grid": {"points": 3}}


@pytest.fixture(autouse=True)
def _isolated_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        create_parser().parse_args([])


def test_run_writes_report_and_time_series(tmp_path, write_config, capsys):
    out = tmp_path / "out"
    assert main(["run", str(write_config(SINGLE_CHAIN)), "--out", str(out)]) == EXIT_OK
    data = json.loads((out / "sc.json").read_text(encoding="utf-8"))
    assert data["status"] == "passed"
    assert "wall_clock" not in data
    assert (out / "sc.csv").read_text(encoding="utf-8").startswith("tau,g_tau,overlap")
    assert "sc" in capsys.readouterr().out


def test_run_is_deterministic(tmp_path, write_config):
    path = write_config(SINGLE_CHAIN)
    assert main(["run", str(path), "--out", str(tmp_path / "first")]) == EXIT_OK
    assert main(["run", str(path), "--out", str(tmp_path / "second")]) == EXIT_OK
    for name in ("sc.json", "sc.csv"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_run_csv_to_stdout(tmp_path, write_config, capsys):
    assert main(["run", str(write_config(SINGLE_CHAIN)), "--out", str(tmp_path), "--csv", "-"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("tau,g_tau,overlap")


@pytest.mark.parametrize("data", [
    {**SINGLE_CHAIN, "unknown": 1},
    {**SINGLE_CHAIN, "omega": 1.0},
    {"scenario": "single-chain"},
])
def test_invalid_config_exits_with_two(tmp_path, write_config, data):
    assert main(["run", str(write_config(data)), "--out", str(tmp_path)]) == EXIT_INVALID_CONFIG


def test_missing_config_exits_with_two(tmp_path):
    assert main(["run", str(tmp_path / "nope.json")]) == EXIT_INVALID_CONFIG


def test_refused_run_exits_with_one(tmp_path, write_config):
    path = write_config({"scenario": "single-chain", "label": "big", "gamma": 0.99})
    assert main(["run", str(path), "--out", str(tmp_path)]) == EXIT_FAILED
    data = json.loads((tmp_path / "big.json").read_text(encoding="utf-8"))
    assert data["status"] == "refused"
    assert data["required_dimension"] > 4_000_000


def test_sweep_directory(tmp_path, write_config, capsys):
    configs = tmp_path / "configs"
    configs.mkdir()
    (configs / "sweep.json").write_text(json.dumps({
        "schema_version": 1,
        "scenarios": ["single-chain"],
        "gammas": [0.1, 0.3],
        "base": {"tau_grid": {"points": 3}},
    }), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["sweep", str(configs), "--out", str(out)]) == EXIT_OK
    assert (out / "single-chain-g0.1.json").exists()
    assert (out / "single-chain-g0.3.csv").exists()
    assert "single-chain-g0.3" in capsys.readouterr().out


def test_classical_scan(tmp_path):
    output = tmp_path / "scan.csv"
    argv = ["classical-scan", "--omega", "1", "--epsilon", "0.1", "--kmin", "0.5", "--kmax", "1.5",
            "--points", "11", "--output", str(output)]
    assert main(argv) == EXIT_OK
    lines = output.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(SCAN_COLUMNS)
    assert len(lines) == 12


def test_classical_scan_requires_arguments():
    with pytest.raises(SystemExit) as excinfo:
        main(["classical-scan", "--omega", "1"])
    assert excinfo.value.code == 2


def test_coupling_report(tmp_path, capsys):
    output = tmp_path / "coupling.csv"
    assert main(["coupling-report", "--sizes", "16,64", "--output", str(output)]) == EXIT_OK
    assert (tmp_path / "coupling_M16.csv").exists()
    assert (tmp_path / "coupling_M64.csv").read_text(encoding="utf-8").startswith("k,Omega=0.5,")
    assert "dominance" in capsys.readouterr().out


def test_verify_identities(tmp_path):
    target = tmp_path / "identities.json"
    assert main(["verify-identities", "--gamma", "0.5", "--cutoffs", "6,8", "--json", str(target)]) == EXIT_OK
    data = json.loads(target.read_text(encoding="utf-8"))
    assert data["cutoffs"] == [6, 8]
    assert all(data["monotone"].values())


def test_coupling_report_on_uniform_k_axis(tmp_path):
    output = tmp_path / "dense.csv"
    argv = ["coupling-report", "--sizes", "16,64", "--omegas", "0.5,1,1.5",
            "--kmin", "0.2", "--kmax", "4", "--points", "401", "--output", str(output)]
    assert main(argv) == EXIT_OK
    lines = (tmp_path / "dense_M64.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "k,Omega=0.5,Omega=1,Omega=1.5"
    assert len(lines) == 402


def test_coupling_report_rejects_partial_k_axis():
    assert main(["coupling-report", "--sizes", "16", "--kmin", "0.2"]) == EXIT_INVALID_CONFIG


def test_save_report_skips_csv_for_refused_scenarios(tmp_path):
    report = ScenarioReport(label="refused", scenario="two-chain", status=ScenarioStatus.REFUSED, wall_clock=0.3)
    json_path, csv_path = save_report(report, tmp_path)
    assert csv_path is None
    data = json.loads(json_path.read_text(encoding="utf-8"))
    assert data["status"] == "refused" and "wall_clock" not in data


def test_shipped_configs_have_distinct_labels():
    configs = load_config_directory(Path(__file__).parent.parent / "configs")
    labels = [config.resolved_label for config in configs]
    assert len(labels) == len(set(labels))
    assert "sweep-single-chain-g0.5" in labels and "single-chain-g0.5" in labels


def test_sweep_rejects_colliding_labels(tmp_path):
    configs = tmp_path / "configs"
    configs.mkdir()
    (configs / "a.json").write_text(json.dumps({**SINGLE_CHAIN, "label": "single-chain-g0.3"}), encoding="utf-8")
    (configs / "b.json").write_text(json.dumps({
        "schema_version": 1,
        "scenarios": ["single-chain"],
        "gammas": [0.3],
        "base": {"tau_grid": {"points": 3}},
    }), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["sweep", str(configs), "--out", str(out)]) == EXIT_INVALID_CONFIG
    assert not out.exists()
