"""
(N,M)-POVM Construction

Builds informationally complete (N,M)-POVMs from the spectral decomposition
of S^T S: Pi = G^T S with S = O^T sqrt(Lambda) X^T, where G is the canonical
Gell-Mann basis, X holds block-wise Helmert eigenvectors and O = 1 (+) O'.
Positivity of the elements is validated, never assumed.
"""

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy.stats import ortho_group

from services.linalg_service.loo_basis import check_orthogonal, gell_mann_basis
from shared.models import EigenFrame, NMPovm, NMPovmSpec, PovmValidationReport
from shared.utils.config import get_settings
from shared.utils.errors import (
    ComputationError,
    DimensionMismatchError,
    InvalidSpecError,
    PositivityViolation,
)
from shared.utils.logging import get_logger

logger = get_logger(__name__)


# =============================================================================
# Parameter algebra
# =============================================================================

def _check_triple(d: int, n: int, m: int) -> None:
    if d < 1 or n < 1 or m < 2:
        raise InvalidSpecError(f"need d >= 1, N >= 1, M >= 2; got d={d}, N={n}, M={m}")


def feasible_x_range(d: int, n: int, m: int) -> tuple[float, float]:
    """
    Admissible purity parameters as the interval (lower, upper].

    Returns:
        (d/M^2, min(d^2/M^2, d/M)); the lower end is excluded
    """
    _check_triple(d, n, m)
    return d / m**2, min(d**2 / m**2, d / m)


def is_informationally_complete(d: int, n: int, m: int) -> bool:
    """(M-1)N + 1 == d^2."""
    return (m - 1) * n + 1 == d**2


def informationally_complete_classes(d: int) -> list[tuple[int, int]]:
    """All (N, M) with M >= 2 and (M-1)N + 1 = d^2, ordered by N."""
    target = d**2 - 1
    classes = [(target // (m - 1), m) for m in range(2, d**2 + 1) if target % (m - 1) == 0]
    return sorted(classes)


def gamma(spec: NMPovmSpec) -> float:
    """
    Stretch factor (x M^2 - d) / (M (M - 1)).

    Defined on the closed interval [d/M^2, upper]; it vanishes at the lower end.

    Raises:
        InvalidSpecError: If x lies outside that interval
    """
    upper = spec.x_upper * (1 + 1e-12)
    if not spec.x_lower * (1 - 1e-12) <= spec.x <= upper:
        raise InvalidSpecError(
            f"x={spec.x} outside [{spec.x_lower}, {spec.x_upper}] for d={spec.d}, M={spec.M}"
        )
    return max(0.0, (spec.x * spec.M**2 - spec.d) / (spec.M * (spec.M - 1)))


def rescale_factor(spec: NMPovmSpec) -> float:
    """Common factor d(d-1) / (M(M-1)) of the rescaled joint-probability bounds."""
    return spec.d * (spec.d - 1) / (spec.M * (spec.M - 1))


def scaled_x(spec: NMPovmSpec) -> float:
    """x M^2 / d^2."""
    return spec.x * spec.M**2 / spec.d**2


def scaled_x_range(d: int, m: int) -> tuple[float, float]:
    """Admissible scaled parameters (1/d, min(1, M/d)] for M outcomes."""
    return 1.0 / d, min(1.0, m / d)


def sts_spectrum(spec: NMPovmSpec) -> np.ndarray:
    """
    Eigenvalues of S^T S with multiplicities, ascending.

    Gamma with multiplicity N(M-1), dN/M once and 0 with multiplicity N-1
    (no zero eigenvalue when N = 1).
    """
    g = gamma(spec)
    values = [g] * (spec.N * (spec.M - 1)) + [spec.d * spec.N / spec.M] + [0.0] * (spec.N - 1)
    return np.sort(np.array(values))


# =============================================================================
# Construction
# =============================================================================

def random_rotation(dim: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Haar-random real orthogonal dim x dim matrix (for O')."""
    if dim == 1:
        return np.ones((1, 1))
    return ortho_group.rvs(dim, random_state=rng)


def build_eigframe(
    n: int,
    m: int,
    d: int,
    x: float,
    rotation_prime: np.ndarray | None = None,
) -> EigenFrame:
    """
    Assemble the eigenvector matrix X, eigenvalues Lambda and rotation O.

    Column 0 of X is constant 1/sqrt(NM); block alpha contributes its M-1
    Helmert vectors (orthonormal, zero block sum) supported on rows
    alpha*M .. alpha*M + M - 1. O = 1 (+) O', O' defaulting to the identity.

    Args:
        n: Number of POVMs N
        m: Outcomes per POVM M
        d: Hilbert space dimension
        x: Purity parameter (fixes Gamma)
        rotation_prime: Optional (d^2-1) x (d^2-1) orthogonal matrix

    Raises:
        InvalidSpecError: If (d, N, M) is not informationally complete or O' is not orthogonal
    """
    spec = NMPovmSpec(d=d, N=n, M=m, x=x)
    if not spec.is_informationally_complete:
        raise InvalidSpecError(f"(d, N, M) = ({d}, {n}, {m}) is not informationally complete")

    dim = d * d
    X = np.zeros((n * m, dim))
    X[:, 0] = 1.0 / np.sqrt(n * m)
    helmert = scipy.linalg.helmert(m)  # (M-1) x M, rows orthonormal and orthogonal to ones
    for alpha in range(n):
        rows = slice(alpha * m, (alpha + 1) * m)
        cols = slice(1 + alpha * (m - 1), 1 + (alpha + 1) * (m - 1))
        X[rows, cols] = helmert.T

    eigenvalues = np.full(dim, gamma(spec))
    eigenvalues[0] = d * n / m

    if rotation_prime is None:
        o_prime = np.eye(dim - 1)
    else:
        o_prime = check_orthogonal(rotation_prime, dim - 1, name="O'")
    rotation = scipy.linalg.block_diag(np.ones((1, 1)), o_prime)

    return EigenFrame(X=X, eigenvalues=eigenvalues, rotation=rotation)


def _assemble(frame: EigenFrame, d: int) -> np.ndarray:
    """Elements Pi_i = sum_mu G_mu S_{mu i} in the canonical basis."""
    elements = np.tensordot(frame.s.T, gell_mann_basis(d).ops, axes=1)
    return 0.5 * (elements + elements.conj().transpose(0, 2, 1))


def _min_element_eigenvalue(elements: np.ndarray) -> float:
    try:
        return float(np.min(np.linalg.eigvalsh(elements)[:, 0]))
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigendecomposition of POVM elements failed: {e}") from e


def _require_constructible(spec: NMPovmSpec) -> None:
    if not spec.is_informationally_complete:
        raise InvalidSpecError(
            f"(d, N, M) = ({spec.d}, {spec.N}, {spec.M}) is not informationally complete"
        )
    if not spec.in_feasible_range:
        raise InvalidSpecError(
            f"x={spec.x} outside ({spec.x_lower}, {spec.x_upper}] for d={spec.d}, M={spec.M}"
        )


def build_povm(spec: NMPovmSpec, rotation_prime: np.ndarray | None = None) -> NMPovm:
    """
    Construct an informationally complete (N,M)-POVM and validate its axioms.

    Args:
        spec: Parameters (d, N, M, x)
        rotation_prime: Optional O' rotating the traceless directions

    Returns:
        NMPovm with elements indexed alpha*M + a

    Raises:
        InvalidSpecError: If spec is not informationally complete or x is infeasible
        PositivityViolation: If an element has eigenvalue below -psd_tol
        ComputationError: If the constructed elements violate the POVM axioms
    """
    _require_constructible(spec)
    frame = build_eigframe(spec.N, spec.M, spec.d, spec.x, rotation_prime)
    povm = NMPovm(spec=spec, frame=frame, elements=_assemble(frame, spec.d))

    report = validate_povm(povm)
    logger.debug(
        "Constructed (N,M)-POVM",
        d=spec.d,
        N=spec.N,
        M=spec.M,
        x=spec.x,
        gamma=gamma(spec),
        min_eigenvalue=report.min_eigenvalue,
    )
    if report.positivity >= report.tolerance:
        raise PositivityViolation(
            f"x={spec.x} yields a non-positive element (min eigenvalue "
            f"{report.min_eigenvalue:.3e}); x is too large for this frame",
            min_eigenvalue=report.min_eigenvalue,
        )
    axioms = [report.completeness, report.trace, report.same_overlap, report.cross_overlap or 0.0]
    if max(axioms) >= report.tolerance:
        raise ComputationError(f"constructed POVM violates its axioms: {report.to_dict()}")
    return povm


def max_feasible_x(
    d: int,
    n: int,
    m: int,
    rotation_prime: np.ndarray | None = None,
) -> float:
    """
    Largest x for which build_povm succeeds with the given frame.

    The minimum element eigenvalue 1/M + sqrt(Gamma) * min eig(T_i) decreases
    monotonically in x, so the positivity boundary is bracketed between the
    lower end (all elements I/M) and the algebraic upper bound.
    """
    lower, upper = feasible_x_range(d, n, m)
    settings = get_settings()

    def min_eig(x: float) -> float:
        frame = build_eigframe(n, m, d, x, rotation_prime)
        return _min_element_eigenvalue(_assemble(frame, d))

    if min_eig(upper) >= -settings.psd_tol:
        return upper

    root = scipy.optimize.brentq(min_eig, lower, upper, xtol=settings.x_search_tol)
    x = float(root)
    while min_eig(x) < -settings.psd_tol and x > lower:
        x -= settings.x_search_tol
    logger.debug("Located positivity boundary", d=d, N=n, M=m, x_max=x)
    return x


def povm_from_elements(spec: NMPovmSpec, elements: np.ndarray) -> NMPovm:
    """
    Wrap an explicit element list (e.g. a known MUB) without a frame.

    Raises:
        DimensionMismatchError: If elements is not (N*M, d, d)
    """
    arr = np.asarray(elements, dtype=np.complex128)
    expected = (spec.n_elements, spec.d, spec.d)
    if arr.shape != expected:
        raise DimensionMismatchError(f"expected elements of shape {expected}, got {arr.shape}")
    return NMPovm(spec=spec, elements=arr)


# =============================================================================
# Validation
# =============================================================================

def validate_povm(povm: NMPovm) -> PovmValidationReport:
    """
    Max deviation of each defining relation.

    completeness: sum_a Pi_(alpha,a) = I for every alpha
    trace: Tr{Pi} = d/M
    same_overlap: Tr{Pi_(alpha,a) Pi_(alpha,a')} = x or (d - Mx)/(M(M-1))
    cross_overlap: Tr{Pi_(alpha,a) Pi_(beta,b)} = d/M^2 for alpha != beta (None when N = 1)
    """
    spec = povm.spec
    d, n, m, x = spec.d, spec.N, spec.M, spec.x
    elements = povm.elements
    blocks = elements.reshape(n, m, d, d)

    completeness = float(np.max(np.abs(blocks.sum(axis=1) - np.eye(d))))
    traces = np.trace(elements, axis1=1, axis2=2)
    trace = float(np.max(np.abs(traces - d / m)))

    overlaps = np.einsum("iab,jba->ij", elements, elements).real
    alpha_of = np.repeat(np.arange(n), m)
    same = alpha_of[:, None] == alpha_of[None, :]
    expected = np.where(np.eye(n * m, dtype=bool), x, (d - m * x) / (m * (m - 1)))
    same_overlap = float(np.max(np.abs(overlaps - expected)[same]))
    cross_overlap = None
    if n > 1:
        cross_overlap = float(np.max(np.abs(overlaps - d / m**2)[~same]))

    return PovmValidationReport(
        completeness=completeness,
        trace=trace,
        same_overlap=same_overlap,
        cross_overlap=cross_overlap,
        min_eigenvalue=_min_element_eigenvalue(elements),
        tolerance=get_settings().povm_axiom_tol,
    )


def expansion_coefficients(povm: NMPovm) -> np.ndarray:
    """S_{mu i} = Tr{G_mu Pi_i} in the canonical Gell-Mann basis, shape (d^2, NM)."""
    ops = gell_mann_basis(povm.d).ops
    return np.einsum("mab,iba->mi", ops, povm.elements).real


def numeric_sts_spectrum(povm: NMPovm) -> np.ndarray:
    """Ascending eigenvalues of S^T S computed from the elements."""
    s = expansion_coefficients(povm)
    return np.linalg.eigvalsh(s.T @ s)
