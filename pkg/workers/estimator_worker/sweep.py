"""
Scaled-Parameter Sweeps

Volume ratios of the purity-free rescaled joint-probability criterion over
a grid of scaled parameters (x~_A, x~_B), all grid points evaluated on one
shared sample set.
"""

import csv
from collections.abc import Sequence
from typing import Any, TextIO

import numpy as np

from services.criteria_service.criteria import check_scaled_x, pair_kernel, rescaled_weights
from services.linalg_service.loo_basis import gell_mann_basis
from services.povm_service.nm_povm import informationally_complete_classes, scaled_x_range
from shared.models import SamplerConfig, SweepPoint
from shared.models.base import Base
from shared.utils.errors import ComputationError, DimensionMismatchError
from shared.utils.logging import get_logger
from workers.estimator_worker.ratios import batch_means, collect_flags
from workers.sampler_worker.tasks import run_chains

logger = get_logger("estimator_worker")

CSV_COLUMNS = ("x_tilde_a", "x_tilde_b", "ratio", "std_error", "n_samples")


class SweepResult(Base):
    """Grid-major sweep points plus per-side admissibility cutoffs."""

    dims: tuple[int, int]
    points: list[SweepPoint]
    cutoffs: dict[str, dict[str, float]]


class ScaledGridDetector:
    """
    Purity-free rescaled criterion at every grid point for one state.

    Q_{mu nu} = Tr{G_mu (x) G_nu rho} is computed once per state; the
    weighted trace norms of all grid points come from one stacked SVD.
    """

    def __init__(self, dims: tuple[int, int], points: Sequence[tuple[float, float]]):
        self.dims = dims
        self.points = list(points)
        d_a, d_b = dims
        self._kernel = pair_kernel(gell_mann_basis(d_a), gell_mann_basis(d_b))
        self._q_shape = (d_a * d_a, d_b * d_b)
        self._root_a = np.sqrt([rescaled_weights(d_a, xa) for xa, _ in self.points])
        self._root_b = np.sqrt([rescaled_weights(d_b, xb) for _, xb in self.points])
        self._rhs = np.array([np.sqrt(1.0 + xa) * np.sqrt(1.0 + xb) for xa, xb in self.points])

    def detect(self, matrix: np.ndarray) -> np.ndarray:
        q = (self._kernel @ matrix.ravel()).real.reshape(self._q_shape)
        weighted = self._root_a[:, :, None] * q[None] * self._root_b[:, None, :]
        try:
            lhs = np.linalg.svd(weighted, compute_uv=False).sum(axis=-1)
        except np.linalg.LinAlgError as e:
            raise ComputationError(f"singular value decomposition failed: {e}") from e
        return lhs - self._rhs > 0.0


def admissibility_cutoffs(dims: tuple[int, int]) -> dict[str, dict[str, float]]:
    """Largest scaled parameter min(1, M/d) per informationally complete M on each side."""
    cutoffs = {}
    for side, d in zip(("A", "B"), dims):
        cutoffs[side] = {
            f"M={m}": scaled_x_range(d, m)[1] for _, m in informationally_complete_classes(d)
        }
    return cutoffs


def sweep_scaled_x(
    dims: tuple[int, int],
    grid: tuple[Sequence[float], Sequence[float]],
    config: SamplerConfig,
    n_chains: int | None = None,
    max_workers: int | None = None,
) -> SweepResult:
    """
    Evaluate the purity-free rescaled criterion over a grid.

    Args:
        dims: (d_A, d_B)
        grid: (x~_A values, x~_B values); rows are x~_A-major
        config: Sampler configuration

    Returns:
        SweepResult with one point per (x~_A, x~_B) pair

    Raises:
        ScaledParameterRangeError: If a grid value lies outside (1/d, 1]
    """
    if tuple(config.dims) != tuple(dims):
        raise DimensionMismatchError(f"sampler dims {config.dims} differ from {dims}")
    xs_a, xs_b = list(grid[0]), list(grid[1])
    for xa in xs_a:
        check_scaled_x(dims[0], xa, "A")
    for xb in xs_b:
        check_scaled_x(dims[1], xb, "B")

    points = [(xa, xb) for xa in xs_a for xb in xs_b]
    logger.info("Sweeping scaled parameters", dims=dims, n_points=len(points))
    detector = ScaledGridDetector(dims, points)
    flags = collect_flags(run_chains(config, detector, n_chains, max_workers))

    n = int(flags.shape[0])
    sweep_points = [
        SweepPoint(
            x_tilde_a=xa,
            x_tilde_b=xb,
            ratio=float(flags[:, k].sum()) / n,
            std_error=batch_means(flags[:, k]),
            n_samples=n,
        )
        for k, (xa, xb) in enumerate(points)
    ]
    return SweepResult(dims=dims, points=sweep_points, cutoffs=admissibility_cutoffs(dims))


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_sweep_csv(result: SweepResult, stream: TextIO) -> None:
    """
    CSV with '#' metadata lines for the cutoffs, then a header row and one
    row per grid point; 17 significant digits, LF line endings.
    """
    for side, values in result.cutoffs.items():
        for label, cutoff in values.items():
            stream.write(f"# cutoff {side} {label} x_tilde<={_fmt(cutoff)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in result.points:
        writer.writerow(
            [_fmt(p.x_tilde_a), _fmt(p.x_tilde_b), _fmt(p.ratio), _fmt(p.std_error), p.n_samples]
        )


def sweep_to_json(result: SweepResult) -> dict[str, Any]:
    return result.to_dict()
