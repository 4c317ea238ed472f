"""Random states and unitaries shared by the tests."""

import numpy as np

from shared.models import DensityMatrix


def random_state(dims: tuple[int, ...], rng: np.random.Generator) -> DensityMatrix:
    """Full-rank Hilbert-Schmidt random state G G^dagger / Tr."""
    dim = int(np.prod(dims))
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T) / np.trace(m).real
    return DensityMatrix(matrix=m, dims=dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
