"""
Reference States

Analytic fixtures used by tests, the acceptance runner and the CLI:
Bell singlet, Werner family, maximally mixed and product states, plus
loading of state files.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from shared.models import DensityMatrix
from shared.models.base import pairs_to_complex
from shared.utils.errors import StateFileError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def singlet() -> DensityMatrix:
    """Projector onto (|01> - |10>)/sqrt(2)."""
    psi = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)
    return DensityMatrix(matrix=np.outer(psi, psi.conj()), dims=(2, 2))


def werner(p: float) -> DensityMatrix:
    """p * singlet + (1 - p) * I/4; entangled iff p > 1/3."""
    matrix = p * singlet().matrix + (1 - p) * np.eye(4) / 4
    return DensityMatrix(matrix=matrix, dims=(2, 2))


def maximally_mixed(dims: tuple[int, ...]) -> DensityMatrix:
    dim = int(np.prod(dims))
    return DensityMatrix(matrix=np.eye(dim) / dim, dims=tuple(dims))


def product_state(rho_a: DensityMatrix, rho_b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(
        matrix=np.kron(rho_a.matrix, rho_b.matrix),
        dims=(rho_a.dim, rho_b.dim),
    )


def qubit_state(bloch: tuple[float, float, float]) -> DensityMatrix:
    """Single-qubit state (I + r.sigma)/2 for a Bloch vector with |r| <= 1."""
    rx, ry, rz = bloch
    matrix = 0.5 * (np.eye(2) + rx * PAULI_X + ry * PAULI_Y + rz * PAULI_Z)
    return DensityMatrix(matrix=matrix, dims=(2,))


def pure_state(psi: np.ndarray, dims: tuple[int, ...]) -> DensityMatrix:
    vec = np.asarray(psi, dtype=np.complex128)
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(matrix=np.outer(vec, vec.conj()), dims=tuple(dims))


# =============================================================================
# State files
# =============================================================================

class StateDocument(BaseModel):
    """
    {"dims": [d_A, d_B], "entries": ...}

    entries is either a D x D nested list or a flat row-major list of D^2
    entries, each an [re, im] pair.
    """

    dims: list[int] = Field(min_length=1, max_length=2)
    entries: list[Any]


def state_from_document(data: dict[str, Any]) -> DensityMatrix:
    """
    Parse and validate a state document.

    Raises:
        StateFileError: If the layout is malformed
        InvariantViolation: If the matrix is not a density matrix
    """
    try:
        doc = StateDocument.model_validate(data)
        values = pairs_to_complex(doc.entries)
    except (ValidationError, ValueError) as e:
        raise StateFileError(f"malformed state document: {e}") from e

    dim = int(np.prod(doc.dims))
    if values.size != dim * dim:
        raise StateFileError(f"expected {dim * dim} entries for dims {doc.dims}, got {values.size}")
    return DensityMatrix(matrix=values.reshape(dim, dim), dims=tuple(doc.dims))


def state_to_document(rho: DensityMatrix) -> dict[str, Any]:
    return {"dims": list(rho.dims), "entries": rho.to_dict()["matrix"]}


def load_state(path: str | Path) -> DensityMatrix:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise StateFileError(f"cannot read state file {path}: {e}") from e
    return state_from_document(data)
