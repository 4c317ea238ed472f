"""Test volume-ratio estimation."""

import io

import numpy as np
import pytest

from shared.models import CriterionId, RatioEstimate, SamplerConfig
from shared.utils.errors import DimensionMismatchError, InvalidSpecError
from workers.estimator_worker.ratios import (
    batch_means,
    estimate_ratios,
    summarize,
    write_ratios_csv,
)
from workers.sampler_worker.storage import read_samples


def _config(**overrides) -> SamplerConfig:
    values = {"dims": (2, 2), "n_samples": 200, "burn_in": 50, "thinning": 4, "seed": 3}
    values.update(overrides)
    return SamplerConfig(**values)


def test_batch_means_of_constant_series():
    assert batch_means(np.zeros(500)) == 0.0
    assert batch_means(np.ones(500)) == 0.0
    assert batch_means(np.array([])) == 0.0


def test_batch_means_never_beats_binomial_error():
    alternating = np.tile([0, 1], 100)
    assert batch_means(alternating, 100) == pytest.approx(np.sqrt(0.25 / 200))


def test_batch_means_sees_autocorrelation():
    blocks = np.repeat([1, 0], 100)
    expected = np.sqrt(10 * 0.25 / 9) / np.sqrt(10)
    assert batch_means(blocks, 10) == pytest.approx(expected)
    assert batch_means(blocks, 10) > np.sqrt(0.25 / 200)


def test_batch_means_with_too_few_samples():
    flags = np.array([1, 0, 0])
    assert batch_means(flags, 100) == pytest.approx(np.sqrt((1 / 3) * (2 / 3) / 3))


def test_summarize_counts_detections():
    flags = np.array([[1, 0], [1, 1], [0, 0], [1, 0]], dtype=bool)
    npt, loo = summarize([CriterionId.NPT, CriterionId.LOO], flags, n_batches=2)
    assert (npt.n_detected, npt.ratio, npt.n_samples) == (3, 0.75, 4)
    assert (loo.n_detected, loo.ratio) == (1, 0.25)


def test_qubit_pair_ratios_respect_criterion_strength():
    estimates = estimate_ratios((2, 2), _config(), criteria=list(CriterionId))
    by_id = {e.criterion_id: e for e in estimates}
    assert [e.criterion_id for e in estimates] == list(CriterionId)
    for e in estimates:
        assert e.n_samples == 200
        assert e.ratio == e.n_detected / e.n_samples
        # for qubit pairs NPT detects every entangled state
        assert e.n_detected <= by_id[CriterionId.NPT].n_detected
    free = by_id[CriterionId.JOINT_PURITY_FREE].n_detected
    assert free <= by_id[CriterionId.JOINT_PURITY].n_detected
    assert by_id[CriterionId.RESCALED].n_detected == free


def test_estimates_are_reproducible():
    first = estimate_ratios((2, 2), _config(n_samples=60), criteria=["NPT", "LOO"])
    second = estimate_ratios((2, 2), _config(n_samples=60), criteria=["NPT", "LOO"])
    assert first == second


def test_dump_contains_every_sample(tmp_path):
    path = tmp_path / "dump.bin"
    estimate_ratios((2, 2), _config(n_samples=30), criteria=["NPT"], dump_path=path)
    dims, states = read_samples(path)
    assert dims == (2, 2)
    assert states.shape == (30, 4, 4)
    np.testing.assert_allclose(np.trace(states, axis1=1, axis2=2), 1.0, atol=1e-12)


def test_estimate_checks_inputs():
    with pytest.raises(DimensionMismatchError):
        estimate_ratios((2, 3), _config())
    with pytest.raises(InvalidSpecError):
        estimate_ratios((2, 2), _config(), criteria=["bogus"])


def test_ratio_csv_format():
    estimates = [
        RatioEstimate(
            criterion_id=CriterionId.NPT, ratio=0.25, std_error=0.1, n_samples=4, n_detected=1
        )
    ]
    buffer = io.StringIO()
    write_ratios_csv(estimates, buffer)
    assert buffer.getvalue() == (
        "criterion-id,ratio,std_error,n_samples,n_detected\n"
        "NPT,0.25,0.10000000000000001,4,1\n"
    )
