"""Test scaled-parameter sweeps."""

import io

import numpy as np
import pytest

from services.criteria_service.criteria import rescaled_joint_criterion
from services.linalg_service.states import maximally_mixed, singlet
from shared.models import SamplerConfig, SweepPoint
from shared.utils.errors import ScaledParameterRangeError
from tests.helpers import random_state
from workers.estimator_worker.ratios import estimate_ratios
from workers.estimator_worker.sweep import (
    ScaledGridDetector,
    SweepResult,
    admissibility_cutoffs,
    sweep_scaled_x,
    write_sweep_csv,
)


def _config(**overrides) -> SamplerConfig:
    values = {"dims": (2, 3), "n_samples": 80, "burn_in": 40, "thinning": 3, "seed": 11}
    values.update(overrides)
    return SamplerConfig(**values)


def test_admissibility_cutoffs():
    cutoffs = admissibility_cutoffs((2, 3))
    assert cutoffs["A"] == {"M=4": 1.0, "M=2": 1.0}
    assert cutoffs["B"] == pytest.approx({"M=9": 1.0, "M=5": 1.0, "M=3": 1.0, "M=2": 2 / 3})


def test_grid_detector_on_analytic_states():
    detector = ScaledGridDetector((2, 2), [(1.0, 1.0), (0.6, 0.6), (1.0, 0.75)])
    np.testing.assert_array_equal(detector.detect(singlet().matrix), [True, True, True])
    mixed = maximally_mixed((2, 2)).matrix
    np.testing.assert_array_equal(detector.detect(mixed), [False, False, False])


def test_grid_detector_matches_rescaled_criterion(rng):
    points = [(0.6, 0.4), (0.8, 0.9), (1.0, 1.0), (0.55, 2 / 3)]
    detector = ScaledGridDetector((2, 3), points)
    for _ in range(20):
        rho = random_state((2, 3), rng)
        expected = [rescaled_joint_criterion(rho, 2, 3, xa, xb).detected for xa, xb in points]
        np.testing.assert_array_equal(detector.detect(rho.matrix), expected)


def test_sweep_grid_is_x_tilde_a_major():
    result = sweep_scaled_x((2, 3), ([0.75, 1.0], [0.5, 1.0]), _config())
    assert [(p.x_tilde_a, p.x_tilde_b) for p in result.points] == [
        (0.75, 0.5),
        (0.75, 1.0),
        (1.0, 0.5),
        (1.0, 1.0),
    ]
    assert all(p.n_samples == 80 for p in result.points)
    assert result.cutoffs == admissibility_cutoffs((2, 3))


def test_sweep_corner_equals_sic_ratio():
    config = _config()
    corner = sweep_scaled_x((2, 3), ([1.0], [1.0]), config).points[0]
    (sic,) = estimate_ratios((2, 3), config, criteria=["RESCALED"])
    assert corner.ratio == sic.ratio
    assert corner.std_error == pytest.approx(sic.std_error)


@pytest.mark.parametrize("grid", [([0.5], [1.0]), ([1.0], [0.3]), ([1.2], [1.0])])
def test_sweep_rejects_inadmissible_grid(grid):
    with pytest.raises(ScaledParameterRangeError):
        sweep_scaled_x((2, 3), grid, _config())


def test_sweep_csv_format():
    result = SweepResult(
        dims=(2, 3),
        points=[
            SweepPoint(x_tilde_a=1.0, x_tilde_b=0.5, ratio=0.125, std_error=0.0, n_samples=8)
        ],
        cutoffs=admissibility_cutoffs((2, 3)),
    )
    buffer = io.StringIO()
    write_sweep_csv(result, buffer)
    lines = buffer.getvalue().split("\n")
    assert lines[0] == "# cutoff A M=4 x_tilde<=1"
    assert "# cutoff B M=2 x_tilde<=0.66666666666666663" in lines
    assert lines[-3] == "x_tilde_a,x_tilde_b,ratio,std_error,n_samples"
    assert lines[-2] == "1,0.5,0.125,0,8"
    assert lines[-1] == ""
