"""
POVM Documents

JSON import/export of (N,M)-POVMs. A document holds the spec, optionally
the rotation O' and optionally explicit elements as [re, im] pairs. When
elements are absent the POVM is rebuilt from spec and rotation.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from services.povm_service.nm_povm import (
    build_povm,
    gamma,
    povm_from_elements,
    rescale_factor,
    scaled_x,
    sts_spectrum,
    validate_povm,
)
from shared.models import NMPovm, NMPovmSpec
from shared.models.base import complex_to_pairs, pairs_to_complex
from shared.utils.errors import ComputationError, PositivityViolation, StateFileError
from shared.utils.logging import get_logger

logger = get_logger(__name__)


class PovmDocument(BaseModel):
    """On-disk layout of a POVM file."""

    d: int = Field(ge=1)
    N: int = Field(ge=1)
    M: int = Field(ge=2)
    x: float = Field(gt=0.0)
    rotation: list[list[float]] | None = None
    elements: list[Any] | None = None


def povm_to_document(povm: NMPovm, include_elements: bool = True) -> dict[str, Any]:
    """Serialize a POVM together with its derived quantities."""
    spec = povm.spec
    doc: dict[str, Any] = spec.to_dict()
    if povm.frame is not None:
        doc["rotation"] = povm.frame.rotation[1:, 1:].tolist()
    doc["gamma"] = gamma(spec)
    doc["x_tilde"] = scaled_x(spec)
    doc["rescale_factor"] = rescale_factor(spec)
    doc["sts_spectrum"] = sts_spectrum(spec).tolist()
    doc["validation"] = validate_povm(povm).to_dict()
    if include_elements:
        doc["elements"] = complex_to_pairs(povm.elements)
    return doc


def povm_from_document(data: dict[str, Any]) -> NMPovm:
    """
    Rebuild a POVM from a document.

    Explicit elements are validated against the POVM axioms; otherwise the
    POVM is constructed from (d, N, M, x) and the optional rotation.

    Raises:
        StateFileError: If the document is malformed
        PositivityViolation: If the elements are not positive semidefinite
        ComputationError: If explicit elements violate the other axioms
    """
    try:
        doc = PovmDocument.model_validate(data)
    except ValidationError as e:
        raise StateFileError(f"malformed POVM document: {e}") from e

    spec = NMPovmSpec(d=doc.d, N=doc.N, M=doc.M, x=doc.x)
    if doc.elements is None:
        rotation = None if doc.rotation is None else np.asarray(doc.rotation, dtype=np.float64)
        return build_povm(spec, rotation)

    try:
        elements = pairs_to_complex(doc.elements)
    except ValueError as e:
        raise StateFileError(f"malformed POVM elements: {e}") from e
    povm = povm_from_elements(spec, elements)
    report = validate_povm(povm)
    if report.positivity >= report.tolerance:
        raise PositivityViolation(
            "POVM document has a non-positive element", min_eigenvalue=report.min_eigenvalue
        )
    if not report.passed:
        raise ComputationError(f"POVM document violates its axioms: {report.to_dict()}")
    return povm


def save_povm(povm: NMPovm, path: str | Path) -> None:
    Path(path).write_text(json.dumps(povm_to_document(povm), indent=2), encoding="utf-8")
    logger.info("Saved POVM", path=str(path), n_elements=povm.spec.n_elements)


def load_povm(path: str | Path) -> NMPovm:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise StateFileError(f"cannot read POVM file {path}: {e}") from e
    return povm_from_document(data)
