"""
(N,M)-POVM Models

- NMPovmSpec: parameter record (d, N, M, x)
- EigenFrame: eigenvectors X, eigenvalues Lambda and rotation O defining the
  expansion map S
- NMPovm: spec, optional frame and the N*M constructed elements
"""

from typing import Any

import numpy as np
from pydantic import Field, field_validator

from shared.models.base import Base, frozen_array


class NMPovmSpec(Base):
    """
    Parameters of an (N,M)-POVM on a d-dimensional system.

    x is only required to be positive here; the feasible interval
    d/M^2 < x <= min(d^2/M^2, d/M) is enforced where a POVM is built.
    """

    d: int = Field(ge=1)
    N: int = Field(ge=1)
    M: int = Field(ge=2)
    x: float = Field(gt=0.0)

    @property
    def n_elements(self) -> int:
        return self.N * self.M

    @property
    def x_lower(self) -> float:
        return self.d / self.M**2

    @property
    def x_upper(self) -> float:
        return min(self.d**2 / self.M**2, self.d / self.M)

    @property
    def is_informationally_complete(self) -> bool:
        return (self.M - 1) * self.N + 1 == self.d**2

    @property
    def in_feasible_range(self) -> bool:
        return self.x_lower < self.x <= self.x_upper * (1 + 1e-12)

    def index(self, alpha: int, a: int) -> int:
        """Zero-based element index of outcome a of POVM alpha (both zero-based)."""
        return alpha * self.M + a


class EigenFrame(Base):
    """Spectral data of S^T S together with the rotation O."""

    X: np.ndarray  # (NM) x d^2, orthonormal columns
    eigenvalues: np.ndarray  # d^2 nonzero eigenvalues Lambda
    rotation: np.ndarray  # d^2 x d^2 orthogonal, first row e_1

    @field_validator("X", "eigenvalues", "rotation", mode="before")
    @classmethod
    def coerce_real(cls, v: Any) -> np.ndarray:
        return frozen_array(v, dtype=np.float64)

    @property
    def s_tilde(self) -> np.ndarray:
        """Expansion coefficients in the rotated basis: sqrt(Lambda) X^T."""
        return np.sqrt(self.eigenvalues)[:, None] * self.X.T

    @property
    def s(self) -> np.ndarray:
        """Expansion coefficients in the canonical basis: O^T sqrt(Lambda) X^T."""
        return self.rotation.T @ self.s_tilde


class NMPovm(Base):
    """
    Constructed (N,M)-POVM.

    elements has shape (N*M, d, d); element i(alpha, a) = alpha*M + a.
    frame is None for POVMs wrapped from explicit element lists.
    """

    spec: NMPovmSpec
    elements: np.ndarray
    frame: EigenFrame | None = None

    @field_validator("elements", mode="before")
    @classmethod
    def coerce_elements(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected a stack of square matrices, got shape {arr.shape}")
        return arr

    @property
    def d(self) -> int:
        return self.spec.d

    def element(self, alpha: int, a: int) -> np.ndarray:
        return self.elements[self.spec.index(alpha, a)]
