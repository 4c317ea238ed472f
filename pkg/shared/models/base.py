"""Pydantic Base Model"""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict


class Base(BaseModel):
    """Base class for all immutable domain records."""

    model_config = ConfigDict(
        frozen=True,
        arbitrary_types_allowed=True,
        populate_by_name=True,
    )

    def to_dict(self) -> dict[str, Any]:
        """Convert model to a JSON-compatible dictionary."""
        return {key: _jsonable(value) for key, value in self.model_dump(by_alias=True).items()}


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return complex_to_pairs(value)
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    return value


def complex_to_pairs(array: np.ndarray) -> list:
    """Encode a complex array as nested lists with [re, im] leaves (row-major)."""
    stacked = np.stack([array.real, array.imag], axis=-1)
    return stacked.tolist()


def pairs_to_complex(pairs: Any) -> np.ndarray:
    """Decode nested [re, im] leaves back into a complex array."""
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("expected [re, im] pairs as innermost entries")
    return arr[..., 0] + 1j * arr[..., 1]


def frozen_array(value: Any, dtype: type = np.complex128) -> np.ndarray:
    """Copy into a read-only numpy array."""
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr
