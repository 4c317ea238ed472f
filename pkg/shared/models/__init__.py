"""Shared models package."""

from shared.models.base import Base
from shared.models.operators import DensityMatrix, HermitianOp, LOOBasis, Subsystem
from shared.models.povm import EigenFrame, NMPovm, NMPovmSpec
from shared.models.reports import (
    CriterionId,
    CriterionReport,
    LooValidationReport,
    PovmValidationReport,
)
from shared.models.sampling import RatioEstimate, SamplerConfig, SweepPoint

__all__ = [
    "Base",
    "CriterionId",
    "CriterionReport",
    "DensityMatrix",
    "EigenFrame",
    "HermitianOp",
    "LOOBasis",
    "LooValidationReport",
    "NMPovm",
    "NMPovmSpec",
    "PovmValidationReport",
    "RatioEstimate",
    "SamplerConfig",
    "Subsystem",
    "SweepPoint",
]
