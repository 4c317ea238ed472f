"""
Report Models

- CriterionReport: one criterion evaluated on one state
- LooValidationReport / PovmValidationReport: axiom deviations of constructed objects
"""

from enum import Enum

from pydantic import Field

from shared.models.base import Base


class CriterionId(str, Enum):
    LOO = "LOO"
    POVM_CORR = "POVM_CORR"
    JOINT_PURITY = "JOINT_PURITY"
    JOINT_PURITY_FREE = "JOINT_PURITY_FREE"
    RESCALED = "RESCALED"
    NPT = "NPT"


class CriterionReport(Base):
    """
    Outcome of a sufficient entanglement condition.

    For inequality criteria detected is margin > 0 exactly; for NPT,
    lhs = -min eigenvalue of the partial transpose and rhs = 0.
    """

    criterion_id: CriterionId = Field(alias="criterion-id")
    lhs: float
    rhs: float
    margin: float
    detected: bool
    auxiliary: dict[str, float] = Field(default_factory=dict)

    @classmethod
    def from_inequality(
        cls,
        criterion_id: CriterionId,
        lhs: float,
        rhs: float,
        **auxiliary: float,
    ) -> "CriterionReport":
        lhs, rhs = float(lhs), float(rhs)
        margin = lhs - rhs
        return cls(
            criterion_id=criterion_id,
            lhs=lhs,
            rhs=rhs,
            margin=margin,
            detected=bool(margin > 0.0),
            auxiliary={name: float(value) for name, value in auxiliary.items()},
        )


class LooValidationReport(Base):
    """Deviations of an operator basis from the LOO invariants."""

    gram_deviation: float
    hermiticity_deviation: float
    identity_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.gram_deviation, self.hermiticity_deviation, self.identity_deviation) < (
            self.tolerance
        )


class PovmValidationReport(Base):
    """Max deviation of each (N,M)-POVM axiom; cross_overlap is None when N = 1."""

    completeness: float
    trace: float
    same_overlap: float
    cross_overlap: float | None
    min_eigenvalue: float
    tolerance: float

    @property
    def positivity(self) -> float:
        return max(0.0, -self.min_eigenvalue)

    @property
    def passed(self) -> bool:
        deviations = [self.completeness, self.trace, self.same_overlap, self.positivity]
        if self.cross_overlap is not None:
            deviations.append(self.cross_overlap)
        return max(deviations) < self.tolerance
