"""
Operator Models

- HermitianOp: square complex matrix equal to its conjugate transpose
- DensityMatrix: unit-trace positive semidefinite HermitianOp with factor dimensions
- LOOBasis: d^2 Hilbert-Schmidt orthonormal Hermitian operators
"""

from enum import Enum
from math import prod
from typing import Any

import numpy as np
from pydantic import Field, field_validator, model_validator

from shared.models.base import Base, frozen_array
from shared.utils.config import get_settings
from shared.utils.errors import InvariantViolation


class Subsystem(str, Enum):
    """Factor of a bipartite system; A is the slow (leftmost) Kronecker factor."""

    A = "A"
    B = "B"


def _square(value: Any) -> np.ndarray:
    arr = frozen_array(value)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermiticity_deviation(matrix: np.ndarray) -> float:
    """Max absolute entry of A - A^dagger."""
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


class HermitianOp(Base):
    """Hermitian operator on a finite-dimensional Hilbert space."""

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def coerce_matrix(cls, v: Any) -> np.ndarray:
        return _square(v)

    @model_validator(mode="after")
    def check_hermitian(self) -> "HermitianOp":
        deviation = hermiticity_deviation(self.matrix)
        if deviation > get_settings().hermiticity_tol:
            raise InvariantViolation("operator is not Hermitian", "hermiticity", deviation)
        return self

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


class DensityMatrix(Base):
    """
    Quantum state.

    dims holds the factor dimensions, (d,) for a single system or (d_A, d_B)
    for a bipartite one; their product must equal the matrix dimension.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = Field(min_length=1, max_length=2)

    @field_validator("matrix", mode="before")
    @classmethod
    def coerce_matrix(cls, v: Any) -> np.ndarray:
        return _square(v)

    @model_validator(mode="after")
    def check_state(self) -> "DensityMatrix":
        settings = get_settings()
        if any(d < 1 for d in self.dims) or prod(self.dims) != self.matrix.shape[0]:
            raise ValueError(f"dims {self.dims} do not match matrix size {self.matrix.shape[0]}")

        deviation = hermiticity_deviation(self.matrix)
        if deviation > settings.hermiticity_tol:
            raise InvariantViolation("state is not Hermitian", "hermiticity", deviation)

        trace_error = abs(np.trace(self.matrix) - 1.0)
        if trace_error > settings.trace_tol:
            raise InvariantViolation("state trace differs from 1", "trace_error", trace_error)

        min_eig = float(np.linalg.eigvalsh(self.matrix)[0])
        if min_eig < -settings.psd_tol:
            raise InvariantViolation(
                "state is not positive semidefinite", "min_eigenvalue", min_eig
            )
        return self

    @classmethod
    def trusted(cls, matrix: np.ndarray, dims: tuple[int, ...]) -> "DensityMatrix":
        """Wrap a matrix already known to satisfy the invariants (no checks)."""
        return cls.model_construct(matrix=frozen_array(matrix), dims=tuple(dims))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    @property
    def op(self) -> HermitianOp:
        return HermitianOp.model_construct(matrix=self.matrix)


class LOOBasis(Base):
    """
    Local orthonormal Hermitian operator basis.

    ops has shape (d^2, d, d). Bases built by this library are canonical:
    ops[0] = I/sqrt(d) and every other element is traceless.
    """

    d: int = Field(ge=1)
    ops: np.ndarray

    @field_validator("ops", mode="before")
    @classmethod
    def coerce_ops(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected a stack of square matrices, got shape {arr.shape}")
        return arr

    @model_validator(mode="after")
    def check_shape(self) -> "LOOBasis":
        if self.ops.shape != (self.d**2, self.d, self.d):
            raise ValueError(
                f"expected {self.d**2} operators of size {self.d}, got {self.ops.shape}"
            )
        return self

    def __len__(self) -> int:
        return int(self.ops.shape[0])
