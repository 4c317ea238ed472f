"""Test POVM and state documents."""

import json

import numpy as np
import pytest

from services.linalg_service.states import (
    load_state,
    singlet,
    state_from_document,
    state_to_document,
)
from services.povm_service.nm_povm import build_povm, random_rotation
from services.povm_service.serialization import (
    load_povm,
    povm_from_document,
    povm_to_document,
    save_povm,
)
from shared.models import NMPovmSpec
from shared.utils.errors import (
    ComputationError,
    InvariantViolation,
    PositivityViolation,
    StateFileError,
)


def test_povm_document_carries_derived_quantities(qubit_sic):
    doc = povm_to_document(qubit_sic)
    assert (doc["d"], doc["N"], doc["M"], doc["x"]) == (2, 1, 4, 0.25)
    assert doc["gamma"] == pytest.approx(1 / 6)
    assert doc["x_tilde"] == pytest.approx(1.0)
    assert doc["validation"]["cross_overlap"] is None
    assert np.array(doc["elements"]).shape == (4, 2, 2, 2)
    assert np.array(doc["rotation"]).shape == (3, 3)


def test_povm_file_round_trip_keeps_rotation(tmp_path):
    o_prime = random_rotation(3, 17)
    povm = build_povm(NMPovmSpec(d=2, N=3, M=2, x=0.9), o_prime)
    path = tmp_path / "mub.json"
    save_povm(povm, path)
    loaded = load_povm(path)
    np.testing.assert_allclose(loaded.elements, povm.elements, atol=1e-15)


def test_document_without_elements_is_rebuilt(qubit_mub):
    loaded = povm_from_document({"d": 2, "N": 3, "M": 2, "x": 1.0})
    assert loaded.frame is not None
    np.testing.assert_allclose(loaded.elements, qubit_mub.elements, atol=1e-15)


def test_explicit_elements_are_validated(qubit_sic):
    doc = povm_to_document(qubit_sic)
    elements = np.array(qubit_sic.elements)
    elements[0] = elements[0] * 1.1
    doc["elements"] = np.stack([elements.real, elements.imag], axis=-1).tolist()
    with pytest.raises(ComputationError):
        povm_from_document(doc)


def test_non_positive_spec_is_reported():
    with pytest.raises(PositivityViolation):
        povm_from_document({"d": 3, "N": 4, "M": 3, "x": 1.0})


@pytest.mark.parametrize(
    "data",
    [{"d": 2, "N": 3}, {"d": 2, "N": 3, "M": 2, "x": 1.0, "elements": [[1.0, 2.0, 3.0]]}],
)
def test_malformed_povm_document(data):
    with pytest.raises(StateFileError):
        povm_from_document(data)


def test_missing_povm_file(tmp_path):
    with pytest.raises(StateFileError):
        load_povm(tmp_path / "absent.json")


def test_state_document_layouts_agree():
    rho = singlet()
    nested = state_to_document(rho)
    flat = {"dims": [2, 2], "entries": [pair for row in nested["entries"] for pair in row]}
    np.testing.assert_allclose(state_from_document(nested).matrix, rho.matrix)
    np.testing.assert_allclose(state_from_document(flat).matrix, rho.matrix)


def test_state_document_checks_invariants():
    entries = [[[0.6, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.6, 0.0]]]
    with pytest.raises(InvariantViolation):
        state_from_document({"dims": [2], "entries": entries})


@pytest.mark.parametrize(
    "data",
    [
        {"entries": [[1.0, 0.0]]},
        {"dims": [2], "entries": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
        {"dims": [2], "entries": [1.0, 0.0, 0.0, 0.0]},
    ],
)
def test_malformed_state_document(data):
    with pytest.raises(StateFileError):
        state_from_document(data)


def test_load_state_file(tmp_path):
    path = tmp_path / "state.json"
    path.write_text(json.dumps(state_to_document(singlet())), encoding="utf-8")
    assert load_state(path).dims == (2, 2)
    (tmp_path / "broken.json").write_text("{not json", encoding="utf-8")
    with pytest.raises(StateFileError):
        load_state(tmp_path / "broken.json")
