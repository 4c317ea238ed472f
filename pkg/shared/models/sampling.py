"""
Sampling Models

- SamplerConfig: hit-and-run chain parameters
- RatioEstimate: detected-volume fraction for one criterion
- SweepPoint: one grid point of a scaled-parameter sweep
"""

from math import prod
from typing import Any

from pydantic import Field, model_validator

from shared.models.base import Base
from shared.models.reports import CriterionId
from shared.utils.config import get_settings


class SamplerConfig(Base):
    """
    Hit-and-run configuration.

    burn_in and thinning default to burn_in_factor*(D^2) and
    thinning_factor*(D^2) with D = prod(dims).
    """

    dims: tuple[int, ...] = Field(min_length=1, max_length=2)
    seed: int = Field(default_factory=lambda: get_settings().seed, ge=0, lt=2**64)
    burn_in: int | None = Field(default=None, ge=0)
    thinning: int | None = Field(default=None, ge=1)
    n_samples: int = Field(default_factory=lambda: get_settings().n_samples, ge=1)

    @model_validator(mode="before")
    @classmethod
    def fill_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "dims" not in data:
            return data
        data = dict(data)
        dims = tuple(data["dims"])
        if any(int(d) < 1 for d in dims):
            raise ValueError(f"dimensions must be positive, got {dims}")
        ambient = prod(dims) ** 2
        settings = get_settings()
        if data.get("burn_in") is None:
            data["burn_in"] = settings.burn_in_factor * ambient
        if data.get("thinning") is None:
            data["thinning"] = max(1, settings.thinning_factor * ambient)
        return data

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def total_steps(self) -> int:
        return int(self.burn_in or 0) + int(self.thinning or 1) * self.n_samples


class RatioEstimate(Base):
    """Volume-ratio estimate; ratio = n_detected / n_samples exactly."""

    criterion_id: CriterionId = Field(alias="criterion-id")
    ratio: float = Field(ge=0.0, le=1.0)
    std_error: float = Field(ge=0.0)
    n_samples: int = Field(ge=1)
    n_detected: int = Field(ge=0)


class SweepPoint(Base):
    """Purity-free rescaled criterion evaluated at (x_tilde_a, x_tilde_b)."""

    x_tilde_a: float
    x_tilde_b: float
    ratio: float
    std_error: float
    n_samples: int
