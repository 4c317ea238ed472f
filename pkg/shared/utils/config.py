"""
Entanglement Volume Configuration

Centralized configuration using Pydantic Settings with environment variable support.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="ENTVOL_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # =========================================================================
    # Numerical tolerances
    # =========================================================================
    hermiticity_tol: float = Field(
        default=1e-12,
        description="Max |A_ij - conj(A_ji)| accepted for a Hermitian operator",
    )
    trace_tol: float = Field(default=1e-12, description="Max |Tr(rho) - 1| for a state")
    psd_tol: float = Field(
        default=1e-10,
        description="Smallest eigenvalue accepted as positive semidefinite is -psd_tol",
    )
    orthogonality_tol: float = Field(
        default=1e-10,
        description="Max |O O^T - I| accepted for a rotation matrix",
    )
    povm_axiom_tol: float = Field(default=1e-10, description="POVM axiom deviation budget")
    npt_tol: float = Field(
        default=1e-12,
        description="Partial-transpose eigenvalue below -npt_tol flags NPT",
    )
    symmetrize_threshold: float = Field(
        default=1e-13,
        description="Asymmetry above which arithmetic results are re-symmetrized",
    )

    # =========================================================================
    # Hit-and-run sampler
    # =========================================================================
    chord_margin: float = Field(
        default=1e-9,
        description="Relative shrink of each chord to keep the chain interior",
    )
    max_condition: float = Field(
        default=1e12,
        description="Condition number above which chord bounds use bisection",
    )
    burn_in_factor: int = Field(default=20, description="burn_in = factor * (d_A d_B)^2")
    thinning_factor: int = Field(default=1, description="thinning = factor * (d_A d_B)^2")

    # =========================================================================
    # Run defaults
    # =========================================================================
    seed: int = Field(default=42, ge=0, lt=2**64)
    n_samples: int = Field(default=100_000, ge=1)
    n_batches: int = Field(default=100, ge=2, description="Batches for batch-means errors")
    n_chains: int = Field(default=1, ge=1, description="Independent chains per run")
    max_workers: int | None = Field(
        default=None,
        description="Worker processes for parallel chains (None = CPU count)",
    )
    x_search_tol: float = Field(
        default=1e-9,
        description="Bisection tolerance when searching the largest feasible x",
    )

    # =========================================================================
    # Application
    # =========================================================================
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
