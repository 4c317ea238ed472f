"""
Local Orthonormal Operator Bases

Generalized Gell-Mann bases in canonical form (normalized identity first),
orthogonal rotations of bases and basis validation.
"""

from functools import lru_cache

import numpy as np

from services.linalg_service.hermitian import OperatorLike, as_matrix
from shared.models import LOOBasis, LooValidationReport
from shared.utils.config import get_settings
from shared.utils.errors import DimensionMismatchError, InvalidSpecError
from shared.utils.logging import get_logger

logger = get_logger(__name__)

_SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=16)
def gell_mann_basis(d: int) -> LOOBasis:
    """
    Canonical generalized Gell-Mann basis with unit Hilbert-Schmidt norm.

    Ordering: I/sqrt(d); the d(d-1)/2 symmetric operators (E_jk + E_kj)/sqrt(2)
    for j < k in lexicographic order; the d(d-1)/2 antisymmetric operators
    (-i E_jk + i E_kj)/sqrt(2) in the same order; the d-1 diagonal operators
    with l = 1..d-1.

    Args:
        d: Hilbert space dimension (>= 2)

    Returns:
        LOOBasis of d^2 operators

    Raises:
        InvalidSpecError: If d < 2
    """
    if d < 2:
        raise InvalidSpecError(f"Gell-Mann basis needs d >= 2, got {d}")

    ops = np.zeros((d * d, d, d), dtype=np.complex128)
    ops[0] = np.eye(d) / np.sqrt(d)
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    n_pairs = len(pairs)

    for n, (j, k) in enumerate(pairs, start=1):
        ops[n, j, k] = ops[n, k, j] = 1 / _SQRT2
        ops[n + n_pairs, j, k] = -1j / _SQRT2
        ops[n + n_pairs, k, j] = 1j / _SQRT2

    offset = 1 + 2 * n_pairs
    for level in range(1, d):
        diag = np.zeros(d)
        diag[:level] = 1.0
        diag[level] = -level
        ops[offset + level - 1] = np.diag(diag) / np.sqrt(level * (level + 1))

    logger.debug("Built Gell-Mann basis", d=d)
    return LOOBasis(d=d, ops=ops)


def traceless_ops(d: int) -> np.ndarray:
    """The d^2 - 1 traceless elements of the canonical basis, shape (d^2-1, d, d)."""
    return gell_mann_basis(d).ops[1:]


def check_orthogonal(o: np.ndarray, size: int, name: str = "O") -> np.ndarray:
    """Validate a real orthogonal matrix of the given size and return it as float array."""
    mat = np.asarray(o)
    if mat.shape != (size, size):
        raise DimensionMismatchError(f"{name} must be {size}x{size}, got {mat.shape}")
    if np.iscomplexobj(mat):
        if np.max(np.abs(mat.imag)) > 0:
            raise InvalidSpecError(f"{name} must be real")
        mat = mat.real
    mat = mat.astype(np.float64)
    deviation = float(np.max(np.abs(mat @ mat.T - np.eye(size)))) if size else 0.0
    if deviation > get_settings().orthogonality_tol:
        raise InvalidSpecError(f"{name} is not orthogonal (max |O O^T - I| = {deviation:.3e})")
    return mat


def rotate_basis(basis: LOOBasis, o: np.ndarray) -> LOOBasis:
    """
    Rotated basis G'_mu = sum_nu O_{mu nu} G_nu.

    Raises:
        InvalidSpecError: If O is not orthogonal
        DimensionMismatchError: If O is not d^2 x d^2
    """
    rotation = check_orthogonal(o, len(basis))
    return LOOBasis(d=basis.d, ops=np.tensordot(rotation, basis.ops, axes=1))


def coordinates(basis: LOOBasis, operator: OperatorLike) -> np.ndarray:
    """Real coordinates Tr{G_mu H} of a Hermitian operator."""
    m = as_matrix(operator)
    if m.shape != basis.ops.shape[1:]:
        raise DimensionMismatchError(f"operator shape {m.shape} does not match basis d={basis.d}")
    return np.einsum("mij,ji->m", basis.ops, m).real


def expand(basis: LOOBasis, coords: np.ndarray) -> np.ndarray:
    """Operator sum_mu c_mu G_mu."""
    return np.tensordot(np.asarray(coords, dtype=np.float64), basis.ops, axes=1)


def validate_loo(basis: LOOBasis) -> LooValidationReport:
    """
    Measure how far a basis is from canonical LOO form.

    Returns:
        Report with max Gram deviation, max Hermiticity deviation and the
        deviation of the identity direction (ops[0] vs I/sqrt(d), traces of the rest)
    """
    ops = basis.ops
    d = basis.d
    gram = np.einsum("aij,bij->ab", ops.conj(), ops).real
    gram_deviation = float(np.max(np.abs(gram - np.eye(len(basis)))))
    hermiticity = float(np.max(np.abs(ops - ops.conj().transpose(0, 2, 1))))

    identity_error = float(np.max(np.abs(ops[0] - np.eye(d) / np.sqrt(d))))
    traces = np.abs(np.trace(ops[1:], axis1=1, axis2=2)) if len(basis) > 1 else np.zeros(1)
    identity_deviation = max(identity_error, float(np.max(traces)))

    return LooValidationReport(
        gram_deviation=gram_deviation,
        hermiticity_deviation=hermiticity,
        identity_deviation=identity_deviation,
        tolerance=get_settings().orthogonality_tol,
    )
