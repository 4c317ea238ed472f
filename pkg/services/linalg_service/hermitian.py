"""
Hermitian Linear Algebra

Hilbert-Schmidt geometry of Hermitian operators and density matrices:
inner products, trace norms, Kronecker products, partial trace and partial
transpose. Subsystem A is always the slow (leftmost) Kronecker factor.
"""

from typing import Union

import numpy as np
import scipy.linalg

from shared.models import DensityMatrix, HermitianOp, Subsystem
from shared.utils.config import get_settings
from shared.utils.errors import ComputationError, DimensionMismatchError, InvalidSpecError

OperatorLike = Union[HermitianOp, DensityMatrix, np.ndarray]


def as_matrix(value: OperatorLike) -> np.ndarray:
    """Return the underlying complex matrix of an operator-like value."""
    if isinstance(value, (HermitianOp, DensityMatrix)):
        return value.matrix
    return np.asarray(value, dtype=np.complex128)


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part (A + A^dagger) / 2."""
    return 0.5 * (matrix + matrix.conj().T)


def resymmetrize(matrix: np.ndarray) -> np.ndarray:
    """Symmetrize only when accumulated asymmetry exceeds the configured threshold."""
    if np.max(np.abs(matrix - matrix.conj().T)) > get_settings().symmetrize_threshold:
        return symmetrize(matrix)
    return matrix


def parse_subsystem(sub: Subsystem | str) -> Subsystem:
    try:
        return Subsystem(sub)
    except ValueError as e:
        raise InvalidSpecError(f"invalid subsystem id {sub!r}; expected 'A' or 'B'") from e


def _bipartite_dims(rho: DensityMatrix) -> tuple[int, int]:
    if not rho.is_bipartite:
        raise DimensionMismatchError(f"state with dims {rho.dims} is not bipartite")
    d_a, d_b = rho.dims
    return d_a, d_b


# =============================================================================
# Scalar functionals
# =============================================================================

def hs_inner(a: OperatorLike, b: OperatorLike) -> float:
    """
    Hilbert-Schmidt scalar product Tr{A^dagger B}.

    Args:
        a: Left operator
        b: Right operator

    Returns:
        Real part of Tr{A^dagger B} (exact for Hermitian arguments)

    Raises:
        DimensionMismatchError: If the operators differ in shape
    """
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"cannot pair shapes {ma.shape} and {mb.shape}")
    return float(np.vdot(ma, mb).real)


def trace_norm(matrix: np.ndarray) -> float:
    """
    Trace norm (sum of singular values) of a rectangular complex matrix.

    Raises:
        ComputationError: If the SVD does not converge
    """
    m = np.asarray(matrix)
    if m.size == 0:
        return 0.0
    try:
        return float(np.sum(scipy.linalg.svdvals(m)))
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ComputationError(f"singular value decomposition failed: {e}") from e


def trace_norm_hermitian(matrix: OperatorLike) -> float:
    """Trace norm of a Hermitian matrix as the sum of absolute eigenvalues."""
    try:
        return float(np.sum(np.abs(np.linalg.eigvalsh(as_matrix(matrix)))))
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigendecomposition failed: {e}") from e


def purity(rho: OperatorLike) -> float:
    """Tr{rho^2}."""
    m = as_matrix(rho)
    return float(np.vdot(m, m).real)


def min_eigenvalue(h: OperatorLike) -> float:
    """Smallest eigenvalue of a Hermitian operator."""
    try:
        return float(np.linalg.eigvalsh(as_matrix(h))[0])
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigendecomposition failed: {e}") from e


# =============================================================================
# Composite systems
# =============================================================================

def tensor(a: OperatorLike, b: OperatorLike) -> HermitianOp:
    """Kronecker product A (x) B, A indexing the slow axis."""
    return HermitianOp(matrix=np.kron(as_matrix(a), as_matrix(b)))


def reduce_matrix(matrix: np.ndarray, dims: tuple[int, int], keep: Subsystem) -> np.ndarray:
    """Partial trace on a raw bipartite matrix, keeping one factor."""
    d_a, d_b = dims
    blocks = matrix.reshape(d_a, d_b, d_a, d_b)
    if keep is Subsystem.A:
        return np.einsum("ijkj->ik", blocks)
    return np.einsum("ijil->jl", blocks)


def transpose_factor(matrix: np.ndarray, dims: tuple[int, int], sub: Subsystem) -> np.ndarray:
    """Partial transpose on a raw bipartite matrix."""
    d_a, d_b = dims
    blocks = matrix.reshape(d_a, d_b, d_a, d_b)
    axes = (2, 1, 0, 3) if sub is Subsystem.A else (0, 3, 2, 1)
    return blocks.transpose(axes).reshape(d_a * d_b, d_a * d_b)


def partial_trace(rho: DensityMatrix, keep: Subsystem | str) -> DensityMatrix:
    """
    Reduced state of one factor.

    Args:
        rho: Bipartite state
        keep: Subsystem whose reduced state is returned

    Returns:
        rho^A = Tr_B{rho} or rho^B = Tr_A{rho}
    """
    sub = parse_subsystem(keep)
    dims = _bipartite_dims(rho)
    reduced = symmetrize(reduce_matrix(rho.matrix, dims, sub))
    d_keep = dims[0] if sub is Subsystem.A else dims[1]
    return DensityMatrix(matrix=reduced, dims=(d_keep,))


def partial_transpose(rho: DensityMatrix, sub: Subsystem | str) -> HermitianOp:
    """Transpose the indices of one factor of a bipartite state."""
    which = parse_subsystem(sub)
    dims = _bipartite_dims(rho)
    return HermitianOp(matrix=transpose_factor(rho.matrix, dims, which))
