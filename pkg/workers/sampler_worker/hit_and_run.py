"""
Hit-and-Run Sampler

Random walk inside the convex body of density matrices that converges to the
uniform (Hilbert-Schmidt) measure. Each step draws an isotropic traceless
direction D, finds the chord {rho + tD >= 0} exactly from the spectrum of
rho^(-1/2) D rho^(-1/2) and jumps to a uniform point on it.
"""

from collections.abc import Iterator
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from services.linalg_service.hermitian import OperatorLike, as_matrix, resymmetrize
from services.linalg_service.loo_basis import traceless_ops
from shared.models import DensityMatrix, HermitianOp, SamplerConfig
from shared.utils.config import get_settings
from shared.utils.errors import ComputationError, InvalidSpecError, NotInteriorError
from shared.utils.logging import get_logger

logger = get_logger(__name__)

_MAX_HALVINGS = 60


@dataclass(frozen=True)
class ChainState:
    """Current interior point of a chain and the generator that drives it."""

    current: DensityMatrix
    rng: np.random.Generator
    steps: int = 0


def _direction(ops: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    coords = rng.standard_normal(ops.shape[0])
    coords /= np.linalg.norm(coords)
    return np.tensordot(coords, ops, axes=1)


def random_traceless_direction(dim: int, rng: np.random.Generator) -> HermitianOp:
    """
    Unit-norm traceless Hermitian direction, uniform on its sphere.

    Standard-normal coordinates over the orthonormal traceless Gell-Mann
    operators, normalized.

    Raises:
        InvalidSpecError: If dim < 2
    """
    if dim < 2:
        raise InvalidSpecError(f"traceless directions need dim >= 2, got {dim}")
    return HermitianOp(matrix=_direction(traceless_ops(dim), rng))


def _bisect_chord(rho: np.ndarray, direction: np.ndarray) -> tuple[float, float]:
    """Chord endpoints by root finding on t -> min eig(rho + tD)."""
    eigs = np.linalg.eigvalsh(direction)

    def min_eig(t: float) -> float:
        return float(np.linalg.eigvalsh(rho + t * direction)[0])

    # rho + tD >= 0 needs t * min eig(D) >= -1, so these brackets contain the roots
    t_max = scipy.optimize.brentq(min_eig, 0.0, 1.0 / abs(eigs[0]), xtol=1e-15)
    t_min = scipy.optimize.brentq(min_eig, -1.0 / eigs[-1], 0.0, xtol=1e-15)
    return float(t_min), float(t_max)


def _eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigendecomposition failed: {e}") from e


def _whitened_chord(
    rho: np.ndarray,
    w: np.ndarray,
    v: np.ndarray,
    direction: np.ndarray,
    max_condition: float,
) -> tuple[float, float]:
    """Chord from the eigendecomposition rho = v diag(w) v^dagger, w ascending."""
    if w[-1] > max_condition * w[0]:
        logger.debug("Chord by bisection", condition=float(w[-1] / w[0]))
        return _bisect_chord(rho, direction)
    # diag(w^-1/2) v^dagger D v diag(w^-1/2) is similar to rho^-1/2 D rho^-1/2
    s = w**-0.5
    nu = np.linalg.eigvalsh((v.conj().T @ direction @ v) * np.outer(s, s))
    return -1.0 / nu[-1], -1.0 / nu[0]


def chord_bounds(rho: OperatorLike, direction: OperatorLike) -> tuple[float, float]:
    """
    Maximal interval (t_min, t_max) with rho + tD positive semidefinite.

    With nu the eigenvalues of rho^(-1/2) D rho^(-1/2): t_min = -1/max(nu),
    t_max = -1/min(nu). Falls back to bisection when rho is ill-conditioned.

    Raises:
        NotInteriorError: If rho has a non-positive eigenvalue
        InvalidSpecError: If D is zero
    """
    matrix, d = as_matrix(rho), as_matrix(direction)
    w, v = _eigh(matrix)
    if w[0] <= 0.0:
        raise NotInteriorError(f"state is not interior (min eigenvalue {w[0]:.3e})")
    if not np.any(d):
        raise InvalidSpecError("chord direction is zero")
    return _whitened_chord(matrix, w, v, d, get_settings().max_condition)


class _Walker:
    """
    Chain position together with its eigendecomposition.

    Each move costs one eigvalsh for the chord and one eigh of the new
    point; that eigh both proves the point interior and feeds the next chord.
    """

    def __init__(self, rho: np.ndarray, rng: np.random.Generator):
        settings = get_settings()
        dim = rho.shape[0]
        ops = traceless_ops(dim)
        self._flat_ops = np.ascontiguousarray(ops.reshape(len(ops), dim * dim))
        self._n_ops, self._dim = len(ops), dim
        self._shrink = 1.0 - settings.chord_margin
        self._max_condition = settings.max_condition
        self.rng = rng
        self.rho = rho
        self._w, self._v = _eigh(rho)
        if self._w[0] <= 0.0:
            raise NotInteriorError(f"state is not interior (min eigenvalue {self._w[0]:.3e})")

    def step(self) -> np.ndarray:
        # the norm of D does not change the point drawn on the chord
        coords = self.rng.standard_normal(self._n_ops)
        direction = (coords @ self._flat_ops).reshape(self._dim, self._dim)
        t_min, t_max = _whitened_chord(self.rho, self._w, self._v, direction, self._max_condition)
        t = self.rng.uniform(t_min * self._shrink, t_max * self._shrink)

        for _ in range(_MAX_HALVINGS):
            candidate = self.rho + t * direction
            trace = candidate.trace().real
            candidate /= trace
            w, v = _eigh(candidate)
            if w[0] > 0.0:
                self.rho, self._w, self._v = candidate, w, v
                return candidate
            t *= 0.5
        raise NotInteriorError("no interior point found along the chord")

    def settle(self) -> np.ndarray:
        """Clear rounding asymmetry accumulated by the moves and return the position."""
        self.rho = resymmetrize(self.rho)
        return self.rho


def hit_and_run_step(state: ChainState) -> ChainState:
    """
    One hit-and-run move.

    The chord is shrunk by the relative margin chord_margin before t is drawn;
    the new point is trace-normalized and re-symmetrized.
    """
    rho = state.current
    walker = _Walker(rho.matrix, state.rng)
    walker.step()
    matrix = walker.settle()
    return replace(state, current=DensityMatrix.trusted(matrix, rho.dims), steps=state.steps + 1)


def iter_states(
    config: SamplerConfig,
    rng: np.random.Generator | None = None,
) -> Iterator[np.ndarray]:
    """
    Raw matrices emitted by a chain: start at I/D, discard burn_in steps,
    then yield every thinning-th state, n_samples in total.
    """
    dim = config.dim
    if dim < 2:
        raise InvalidSpecError(f"sampling needs total dimension >= 2, got {dim}")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    burn_in, thinning = int(config.burn_in or 0), int(config.thinning or 1)

    walker = _Walker(np.eye(dim, dtype=np.complex128) / dim, rng)
    for _ in range(burn_in):
        walker.step()

    report_every = max(1, config.n_samples // 10)
    for i in range(config.n_samples):
        for _ in range(thinning):
            walker.step()
        if (i + 1) % report_every == 0:
            logger.debug("Sampling progress", emitted=i + 1, n_samples=config.n_samples)
        yield walker.settle()


def sample_states(config: SamplerConfig) -> list[DensityMatrix]:
    """
    Validated states of one chain seeded with config.seed.

    Same seed and config give the same sequence.
    """
    logger.info(
        "Sampling states",
        dims=config.dims,
        n_samples=config.n_samples,
        burn_in=config.burn_in,
        thinning=config.thinning,
    )
    return [DensityMatrix(matrix=m, dims=config.dims) for m in iter_states(config)]
