"""Entanglement criteria and criterion suites."""

from services.criteria_service.criteria import (
    correlation_matrix,
    expectation_matrix,
    joint_probability,
    joint_purity_criterion,
    joint_purity_free_criterion,
    loo_criterion,
    npt_criterion,
    povm_correlation_criterion,
    product_joint_norm,
    rescaled_joint_criterion,
)
from services.criteria_service.suite import CriterionSuite, parse_criteria, sic_spec

__all__ = [
    "CriterionSuite",
    "correlation_matrix",
    "expectation_matrix",
    "joint_probability",
    "joint_purity_criterion",
    "joint_purity_free_criterion",
    "loo_criterion",
    "npt_criterion",
    "parse_criteria",
    "povm_correlation_criterion",
    "product_joint_norm",
    "rescaled_joint_criterion",
    "sic_spec",
]
