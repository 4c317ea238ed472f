"""Test the entvol command line."""

import json

import numpy as np
import pytest

from apps.volume_cli.main import check_state, main, povm_info
from services.linalg_service.states import singlet, state_to_document, werner
from shared.models import NMPovmSpec


@pytest.fixture
def state_file(tmp_path):
    def write(document, name="state.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_povm_info_for_qubit_sic(capsys):
    code, out, _ = _run(capsys, "povm-info", "2", "1", "4", "1/4")
    assert code == 0
    info = json.loads(out)
    assert info["gamma"] == pytest.approx(1 / 6)
    assert info["x_tilde"] == pytest.approx(1.0)
    assert info["informationally_complete"] is True
    assert info["max_feasible_x"] == pytest.approx(0.25, abs=1e-6)
    assert info["ic_classes"] == [[1, 4], [3, 2]]
    assert info["sts_spectrum"] == pytest.approx([1 / 6, 1 / 6, 1 / 6, 0.5])


def test_povm_info_for_incomplete_measurement():
    info = povm_info(2, 2, 2, 0.75)
    assert info["informationally_complete"] is False
    assert info["gamma"] == pytest.approx(0.5)
    assert info["max_feasible_x"] is None


def test_povm_info_outside_feasible_range():
    info = povm_info(2, 3, 2, 1.5)
    assert info["x_feasible"] is False
    assert info["gamma"] is None
    assert info["sts_spectrum"] is None


def test_povm_info_rejects_single_outcome(capsys):
    code, out, err = _run(capsys, "povm-info", "2", "3", "1", "1")
    assert code == 1
    assert out == ""
    assert "error" in err


def test_check_state_singlet(capsys, state_file):
    path = state_file(state_to_document(singlet()))
    code, out, _ = _run(capsys, "check-state", path)
    assert code == 0
    reports = json.loads(out)
    assert {r["criterion-id"] for r in reports} == {
        "LOO",
        "POVM_CORR",
        "JOINT_PURITY",
        "JOINT_PURITY_FREE",
        "RESCALED",
        "NPT",
    }
    assert all(r["detected"] for r in reports)


def test_check_state_maximally_mixed(capsys, state_file):
    entries = (np.eye(4) / 4)[..., None] * np.array([1.0, 0.0])
    path = state_file({"dims": [2, 2], "entries": entries.tolist()})
    code, out, _ = _run(capsys, "check-state", path)
    assert code == 0
    assert not any(r["detected"] for r in json.loads(out))


def test_check_state_csv(capsys, state_file):
    path = state_file(state_to_document(werner(0.5)))
    code, out, _ = _run(capsys, "--format", "csv", "check-state", path, "--criteria", "loo,npt")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "criterion-id,lhs,rhs,margin,detected"
    assert lines[1].startswith("LOO,") and lines[1].endswith(",true")
    assert lines[2].startswith("NPT,")


def test_check_state_function_accepts_povm_specs():
    mub = NMPovmSpec(d=2, N=3, M=2, x=1.0)
    reports = check_state(werner(0.2), ["JOINT_PURITY"], povm_a=mub, povm_b=mub)
    assert reports[0]["detected"] is False


@pytest.mark.parametrize(
    "document",
    [
        {"dims": [2, 2], "entries": [[1.0, 0.0]]},
        {"dims": [2], "entries": [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]},
    ],
)
def test_check_state_rejects_bad_files(capsys, state_file, document):
    code, out, _ = _run(capsys, "check-state", state_file(document))
    assert code == 1
    assert out == ""


def test_check_state_missing_file(capsys, tmp_path):
    code, _, _ = _run(capsys, "check-state", str(tmp_path / "nothing.json"))
    assert code == 1


def test_check_state_needs_bipartite_state(capsys, state_file):
    entries = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    path = state_file({"dims": [2], "entries": entries})
    code, _, _ = _run(capsys, "check-state", path)
    assert code == 1


def test_ratios_command_writes_csv(capsys, tmp_path):
    out_file = tmp_path / "ratios.csv"
    argv = "--seed 1 --samples 40 --burn-in 20 --thinning 2 ratios --criteria NPT,LOO".split()
    code, out, _ = _run(capsys, "--out", str(out_file), *argv)
    assert code == 0
    assert out == ""
    text = out_file.read_bytes().decode("utf-8")
    assert "\r" not in text
    rows = text.splitlines()
    assert rows[0] == "criterion-id,ratio,std_error,n_samples,n_detected"
    assert [r.split(",")[0] for r in rows[1:]] == ["NPT", "LOO"]
    assert all(r.split(",")[3] == "40" for r in rows[1:])


def test_ratios_command_is_deterministic(capsys):
    argv = ["--seed", "4", "--samples", "30", "--burn-in", "10", "--format", "json", "ratios"]
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert json.loads(first) == json.loads(second)


def test_ratios_command_rejects_unknown_criterion(capsys):
    code, _, err = _run(capsys, "--samples", "5", "ratios", "--criteria", "CCNR")
    assert code == 1
    assert "unknown criterion" in err


def test_ratios_command_rejects_infeasible_povm(capsys):
    code, _, _ = _run(capsys, "--samples", "5", "ratios", "--povm-a", "3,2,0.4")
    assert code == 1


def test_sweep_command_json(capsys):
    argv = "--samples 20 --burn-in 10 --format json sweep --x-tilde-a 1 --x-tilde-b 0.5,1"
    code, out, _ = _run(capsys, *argv.split())
    assert code == 0
    result = json.loads(out)
    assert result["dims"] == [2, 3]
    assert len(result["points"]) == 2
    assert result["cutoffs"]["B"]["M=2"] == pytest.approx(2 / 3)


def test_sample_counts_accept_scientific_notation(capsys):
    code, out, _ = _run(capsys, "--samples", "2e1", "--burn-in", "0", "ratios", "--criteria", "NPT")
    assert code == 0
    assert out.splitlines()[1].split(",")[3] == "20"


@pytest.mark.parametrize(
    "argv",
    [
        ["--samples", "1.5", "ratios"],
        ["ratios", "--dims", "2"],
        ["--format", "xml", "ratios"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_with_config_code(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert "usage: entvol" in err


def test_help_exits_cleanly(capsys):
    code, out, _ = _run(capsys, "--help")
    assert code == 0
    assert "check-state" in out
