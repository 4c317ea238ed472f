"""
Volume-Ratio Estimation

Fraction of sampled states detected by each criterion, with batch-means
standard errors over the thinned chain.
"""

import csv
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

import numpy as np

from services.criteria_service.criteria import PovmLike
from services.criteria_service.suite import DEFAULT_CRITERIA, CriterionSuite
from shared.models import CriterionId, RatioEstimate, SamplerConfig
from shared.utils.config import get_settings
from shared.utils.errors import DimensionMismatchError
from shared.utils.logging import get_logger
from workers.sampler_worker.storage import write_samples
from workers.sampler_worker.tasks import ChainResult, run_chains

logger = get_logger("estimator_worker")


def batch_means(flags: np.ndarray, n_batches: int | None = None) -> float:
    """
    Standard error of the mean of a correlated 0/1 series.

    The series is cut into n_batches equal consecutive batches (a trailing
    remainder is dropped from the batches but not from the mean); the error
    never falls below the binomial value sqrt(R(1-R)/n).
    """
    values = np.asarray(flags, dtype=np.float64)
    n = values.size
    if n == 0:
        return 0.0
    ratio = values.mean()
    binomial = float(np.sqrt(ratio * (1.0 - ratio) / n))

    n_batches = n_batches or get_settings().n_batches
    batch_size = n // n_batches
    if batch_size < 1 or n_batches < 2:
        return binomial
    means = values[: batch_size * n_batches].reshape(n_batches, batch_size).mean(axis=1)
    batched = float(np.std(means, ddof=1) / np.sqrt(n_batches))
    return max(batched, binomial)


def collect_flags(results: Sequence[ChainResult]) -> np.ndarray:
    """Concatenate per-chain detection rows in chain order."""
    return np.concatenate([r.flags for r in results], axis=0)


def summarize(
    criteria: Sequence[CriterionId],
    flags: np.ndarray,
    n_batches: int | None = None,
) -> list[RatioEstimate]:
    n = int(flags.shape[0])
    estimates = []
    for column, criterion in enumerate(criteria):
        detected = int(flags[:, column].sum())
        estimates.append(
            RatioEstimate(
                criterion_id=criterion,
                ratio=detected / n,
                std_error=batch_means(flags[:, column], n_batches),
                n_samples=n,
                n_detected=detected,
            )
        )
    return estimates


def estimate_ratios(
    dims: tuple[int, int],
    config: SamplerConfig,
    criteria: Sequence[CriterionId | str] = DEFAULT_CRITERIA,
    povm_a: PovmLike | None = None,
    povm_b: PovmLike | None = None,
    n_chains: int | None = None,
    max_workers: int | None = None,
    dump_path: str | Path | None = None,
) -> list[RatioEstimate]:
    """
    Estimate volume ratios for several criteria on one shared sample set.

    Args:
        dims: (d_A, d_B)
        config: Sampler configuration (its dims must equal dims)
        criteria: Criterion ids or names
        povm_a: Measurement on A; SIC parameters (x_tilde = 1) if None
        povm_b: Measurement on B
        n_chains: Independent chains (defaults to settings.n_chains)
        max_workers: Process pool size
        dump_path: Also write every emitted state to this raw dump file

    Returns:
        One RatioEstimate per criterion, in suite order

    Raises:
        InvalidSpecError: If a POVM spec is infeasible for its dimension
    """
    if tuple(config.dims) != tuple(dims):
        raise DimensionMismatchError(f"sampler dims {config.dims} differ from {dims}")
    suite = CriterionSuite(dims, criteria, povm_a, povm_b)
    logger.info(
        "Estimating volume ratios",
        dims=dims,
        criteria=[c.value for c in suite.criteria],
        n_samples=config.n_samples,
        seed=config.seed,
    )

    results = run_chains(config, suite, n_chains, max_workers, keep_states=dump_path is not None)
    if dump_path is not None:
        states = (m for r in results if r.states is not None for m in r.states)
        write_samples(dump_path, config.dims, states)
    estimates = summarize(suite.criteria, collect_flags(results))
    for est in estimates:
        logger.info(
            "Volume ratio",
            criterion=est.criterion_id.value,
            ratio=est.ratio,
            std_error=est.std_error,
        )
    return estimates


RATIO_COLUMNS = ("criterion-id", "ratio", "std_error", "n_samples", "n_detected")


def write_ratios_csv(estimates: Sequence[RatioEstimate], stream: TextIO) -> None:
    """One row per criterion; 17 significant digits, LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RATIO_COLUMNS)
    for est in estimates:
        writer.writerow(
            [
                est.criterion_id.value,
                format(est.ratio, ".17g"),
                format(est.std_error, ".17g"),
                est.n_samples,
                est.n_detected,
            ]
        )
