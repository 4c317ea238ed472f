"""
Entanglement Criteria

Sufficient entanglement conditions built from correlation matrices and
joint probabilities of local measurements, plus the NPT reference test.
Every criterion returns a CriterionReport carrying its bound components.

POVM arguments are either constructed NMPovm objects (evaluated element by
element) or bare NMPovmSpec records. For a spec the joint-probability norm is
evaluated spectrally as ||sqrt(Lambda_A) Q sqrt(Lambda_B)||_1 with
Q_{mu nu} = Tr{G_mu (x) G_nu rho}; this value does not depend on the
rotation O, so it needs no positive frame.
"""

from typing import Literal, Union

import numpy as np

from services.linalg_service.hermitian import (
    reduce_matrix,
    symmetrize,
    trace_norm,
    transpose_factor,
)
from services.linalg_service.loo_basis import gell_mann_basis
from services.povm_service.nm_povm import gamma
from shared.models import (
    CriterionId,
    CriterionReport,
    DensityMatrix,
    LOOBasis,
    NMPovm,
    NMPovmSpec,
    Subsystem,
)
from shared.utils.config import get_settings
from shared.utils.errors import (
    ComputationError,
    DimensionMismatchError,
    InvalidSpecError,
    ScaledParameterRangeError,
)

OperatorList = Union[LOOBasis, NMPovm, np.ndarray]
PovmLike = Union[NMPovm, NMPovmSpec]


def _op_stack(ops: OperatorList) -> np.ndarray:
    if isinstance(ops, LOOBasis):
        return ops.ops
    if isinstance(ops, NMPovm):
        return ops.elements
    stack = np.asarray(ops, dtype=np.complex128)
    if stack.ndim == 2:
        stack = stack[None]
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DimensionMismatchError(f"expected a stack of square operators, got {stack.shape}")
    return stack


def _dims(rho: DensityMatrix) -> tuple[int, int]:
    if not rho.is_bipartite:
        raise DimensionMismatchError(f"state with dims {rho.dims} is not bipartite")
    d_a, d_b = rho.dims
    return d_a, d_b


def _check_factor(stack: np.ndarray, d: int, side: str) -> None:
    if stack.shape[1] != d:
        raise DimensionMismatchError(
            f"{side} operators act on dimension {stack.shape[1]}, state factor has {d}"
        )


def _reduced(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    dims = _dims(rho)
    rho_a = symmetrize(reduce_matrix(rho.matrix, dims, Subsystem.A))
    rho_b = symmetrize(reduce_matrix(rho.matrix, dims, Subsystem.B))
    return rho_a, rho_b


def _purity(matrix: np.ndarray) -> float:
    return float(np.vdot(matrix, matrix).real)


# =============================================================================
# Matrices
# =============================================================================

def expectation_matrix(rho: DensityMatrix, a_ops: OperatorList, b_ops: OperatorList) -> np.ndarray:
    """
    Joint expectations E_ij = Tr{A_i (x) B_j rho}.

    Raises:
        DimensionMismatchError: If the operators do not act on rho's factors
    """
    d_a, d_b = _dims(rho)
    a, b = _op_stack(a_ops), _op_stack(b_ops)
    _check_factor(a, d_a, "A")
    _check_factor(b, d_b, "B")
    rho4 = rho.matrix.reshape(d_a, d_b, d_a, d_b)
    return np.einsum("iac,jbd,cdab->ij", a, b, rho4, optimize=True).real


def pair_kernel(a_ops: OperatorList, b_ops: OperatorList) -> np.ndarray:
    """
    Flat expectation kernel K of shape (n_A n_B, D^2).

    (K @ rho.ravel()).real reshaped to (n_A, n_B) equals the expectation
    matrix of a raw row-major state matrix rho; one matmul per state.
    """
    a, b = _op_stack(a_ops), _op_stack(b_ops)
    n_a, d_a = a.shape[:2]
    n_b, d_b = b.shape[:2]
    # Tr{X rho} = sum X_{(ab),(cd)} rho_{(cd),(ab)}
    kernel = np.einsum("iac,jbd->ijcdab", a, b)
    return np.ascontiguousarray(kernel.reshape(n_a * n_b, (d_a * d_b) ** 2))


def correlation_matrix(rho: DensityMatrix, a_ops: OperatorList, b_ops: OperatorList) -> np.ndarray:
    """
    Correlation matrix C_ij = Tr{A_i (x) B_j (rho - rho^A (x) rho^B)}.

    Args:
        rho: Bipartite state
        a_ops: Operators on factor A (LOOBasis, NMPovm or (n, d_A, d_A) stack)
        b_ops: Operators on factor B

    Returns:
        Real (n_A, n_B) matrix

    Raises:
        DimensionMismatchError: If the operators do not act on rho's factors
    """
    joint = expectation_matrix(rho, a_ops, b_ops)
    rho_a, rho_b = _reduced(rho)
    mean_a = np.einsum("iac,ca->i", _op_stack(a_ops), rho_a).real
    mean_b = np.einsum("jbd,db->j", _op_stack(b_ops), rho_b).real
    return joint - np.outer(mean_a, mean_b)


def joint_probability(rho: DensityMatrix, povm_a: NMPovm, povm_b: NMPovm) -> np.ndarray:
    """P_ij = Tr{Pi^A_i (x) Pi^B_j rho}, shape (N_A M_A, N_B M_B)."""
    return expectation_matrix(rho, povm_a, povm_b)


def product_joint_norm(rho: DensityMatrix, povm_a: NMPovm, povm_b: NMPovm) -> float:
    """||P(Pi^A, Pi^B | rho^A (x) rho^B)||_1 for the product of rho's marginals."""
    rho_a, rho_b = _reduced(rho)
    p_a = np.einsum("iac,ca->i", povm_a.elements, rho_a).real
    p_b = np.einsum("jbd,db->j", povm_b.elements, rho_b).real
    return trace_norm(np.outer(p_a, p_b))


# =============================================================================
# POVM parameters
# =============================================================================

def _spec_of(povm: PovmLike) -> NMPovmSpec:
    spec = povm.spec if isinstance(povm, NMPovm) else povm
    if not spec.is_informationally_complete:
        raise InvalidSpecError(
            f"(d, N, M) = ({spec.d}, {spec.N}, {spec.M}) is not informationally complete"
        )
    return spec


def spectral_weights(spec: NMPovmSpec) -> np.ndarray:
    """Nonzero eigenvalues of S^T S along the canonical directions: dN/M then Gamma."""
    weights = np.full(spec.d**2, gamma(spec))
    weights[0] = spec.d * spec.N / spec.M
    return weights


def _joint_norm(rho: DensityMatrix, povm_a: PovmLike, povm_b: PovmLike) -> float:
    if isinstance(povm_a, NMPovm) and isinstance(povm_b, NMPovm):
        return trace_norm(joint_probability(rho, povm_a, povm_b))
    spec_a, spec_b = _spec_of(povm_a), _spec_of(povm_b)
    q = expectation_matrix(rho, gell_mann_basis(spec_a.d), gell_mann_basis(spec_b.d))
    root_a = np.sqrt(spectral_weights(spec_a))
    root_b = np.sqrt(spectral_weights(spec_b))
    return trace_norm(root_a[:, None] * q * root_b[None, :])


def purity_bounds(spec: NMPovmSpec, purity: float) -> tuple[float, float]:
    """(Sigma, U) = (Gamma (1 - p), p Gamma + (dN/M - Gamma)/d)."""
    g = gamma(spec)
    sigma = g * (1.0 - purity)
    u = purity * g + (spec.d * spec.N / spec.M - g) / spec.d
    return sigma, u


def purity_free_bound(spec: NMPovmSpec) -> float:
    """Sigma + U = Gamma (1 - 1/d) + N/M."""
    return gamma(spec) * (1.0 - 1.0 / spec.d) + spec.N / spec.M


# =============================================================================
# Criteria
# =============================================================================

def loo_criterion(rho: DensityMatrix, basis_a: LOOBasis, basis_b: LOOBasis) -> CriterionReport:
    """
    ||C(G^A, G^B | rho)||_1^2 > (1 - Tr{(rho^A)^2})(1 - Tr{(rho^B)^2}).
    """
    norm = trace_norm(correlation_matrix(rho, basis_a, basis_b))
    rho_a, rho_b = _reduced(rho)
    purity_a, purity_b = _purity(rho_a), _purity(rho_b)
    return CriterionReport.from_inequality(
        CriterionId.LOO,
        lhs=norm**2,
        rhs=(1.0 - purity_a) * (1.0 - purity_b),
        trace_norm=norm,
        purity_a=purity_a,
        purity_b=purity_b,
    )


def povm_correlation_criterion(
    rho: DensityMatrix,
    povm_a: PovmLike,
    povm_b: PovmLike,
) -> CriterionReport:
    """
    ||C(Pi^A, Pi^B | rho)||_1^2 > Gamma_A Gamma_B (1 - Tr{(rho^A)^2})(1 - Tr{(rho^B)^2}).

    For explicit POVMs lhs is computed from the elements; for specs through
    ||C(Pi)||_1 = sqrt(Gamma_A Gamma_B) ||C(G)||_1.
    """
    spec_a, spec_b = _spec_of(povm_a), _spec_of(povm_b)
    g_a, g_b = gamma(spec_a), gamma(spec_b)
    if isinstance(povm_a, NMPovm) and isinstance(povm_b, NMPovm):
        norm = trace_norm(correlation_matrix(rho, povm_a, povm_b))
    else:
        loo = correlation_matrix(rho, gell_mann_basis(spec_a.d), gell_mann_basis(spec_b.d))
        norm = np.sqrt(g_a * g_b) * trace_norm(loo)
    rho_a, rho_b = _reduced(rho)
    purity_a, purity_b = _purity(rho_a), _purity(rho_b)
    return CriterionReport.from_inequality(
        CriterionId.POVM_CORR,
        lhs=norm**2,
        rhs=g_a * g_b * (1.0 - purity_a) * (1.0 - purity_b),
        gamma_a=g_a,
        gamma_b=g_b,
        purity_a=purity_a,
        purity_b=purity_b,
    )


def joint_purity_criterion(
    rho: DensityMatrix,
    povm_a: PovmLike,
    povm_b: PovmLike,
) -> CriterionReport:
    """
    ||P(Pi^A, Pi^B | rho)||_1 > sqrt(Sigma_A Sigma_B) + sqrt(U_A U_B).
    """
    spec_a, spec_b = _spec_of(povm_a), _spec_of(povm_b)
    rho_a, rho_b = _reduced(rho)
    purity_a, purity_b = _purity(rho_a), _purity(rho_b)
    sigma_a, u_a = purity_bounds(spec_a, purity_a)
    sigma_b, u_b = purity_bounds(spec_b, purity_b)
    return CriterionReport.from_inequality(
        CriterionId.JOINT_PURITY,
        lhs=_joint_norm(rho, povm_a, povm_b),
        rhs=float(np.sqrt(sigma_a * sigma_b) + np.sqrt(u_a * u_b)),
        sigma_a=sigma_a,
        sigma_b=sigma_b,
        u_a=u_a,
        u_b=u_b,
        gamma_a=gamma(spec_a),
        gamma_b=gamma(spec_b),
        purity_a=purity_a,
        purity_b=purity_b,
    )


def joint_purity_free_criterion(
    rho: DensityMatrix,
    povm_a: PovmLike,
    povm_b: PovmLike,
) -> CriterionReport:
    """
    ||P(Pi^A, Pi^B | rho)||_1 > sqrt(Sigma_A + U_A) sqrt(Sigma_B + U_B).

    The bound uses the purity-independent sums Gamma (1 - 1/d) + N/M.
    """
    spec_a, spec_b = _spec_of(povm_a), _spec_of(povm_b)
    bound_a, bound_b = purity_free_bound(spec_a), purity_free_bound(spec_b)
    return CriterionReport.from_inequality(
        CriterionId.JOINT_PURITY_FREE,
        lhs=_joint_norm(rho, povm_a, povm_b),
        rhs=float(np.sqrt(bound_a * bound_b)),
        bound_a=bound_a,
        bound_b=bound_b,
        gamma_a=gamma(spec_a),
        gamma_b=gamma(spec_b),
    )


def rescaled_weights(d: int, x_tilde: float) -> np.ndarray:
    """Lambda / gamma along the canonical directions: d + 1, then (d x~ - 1)/(d - 1)."""
    weights = np.full(d * d, (d * x_tilde - 1.0) / (d - 1))
    weights[0] = d + 1.0
    return weights


def check_scaled_x(d: int, x_tilde: float, side: str) -> None:
    """Raise ScaledParameterRangeError unless 1/d < x_tilde <= 1."""
    if d < 2:
        raise ScaledParameterRangeError(f"scaled parameters need d >= 2, got d_{side}={d}")
    if not 1.0 / d < x_tilde <= 1.0 + 1e-12:
        raise ScaledParameterRangeError(
            f"x_tilde_{side}={x_tilde} outside (1/{d}, 1] = ({1.0 / d:.6g}, 1]"
        )


def rescaled_joint_criterion(
    rho: DensityMatrix,
    d_a: int,
    d_b: int,
    x_tilde_a: float,
    x_tilde_b: float,
    which: Literal["purity", "purity-free"] = "purity-free",
) -> CriterionReport:
    """
    Joint-probability criterion expressed in the scaled parameters only.

    lhs = ||diag(sqrt(w_A)) Q diag(sqrt(w_B))||_1 with Q_{mu nu} = Tr{G_mu (x) G_nu rho}
    and w the rescaled weights; purity-free rhs = sqrt(1 + x~_A) sqrt(1 + x~_B).
    Decisions coincide with the element-level criteria for every (N,M)-POVM
    pair with the same scaled parameters.

    Raises:
        ScaledParameterRangeError: If a scaled parameter lies outside (1/d, 1]
        DimensionMismatchError: If (d_a, d_b) differ from rho's factors
    """
    if _dims(rho) != (d_a, d_b):
        raise DimensionMismatchError(f"state dims {rho.dims} differ from ({d_a}, {d_b})")
    if which not in ("purity", "purity-free"):
        raise InvalidSpecError(f"unknown rescaled variant {which!r}")
    check_scaled_x(d_a, x_tilde_a, "A")
    check_scaled_x(d_b, x_tilde_b, "B")

    w_a, w_b = rescaled_weights(d_a, x_tilde_a), rescaled_weights(d_b, x_tilde_b)
    q = expectation_matrix(rho, gell_mann_basis(d_a), gell_mann_basis(d_b))
    lhs = trace_norm(np.sqrt(w_a)[:, None] * q * np.sqrt(w_b)[None, :])

    if which == "purity-free":
        rhs = float(np.sqrt(1.0 + x_tilde_a) * np.sqrt(1.0 + x_tilde_b))
        return CriterionReport.from_inequality(
            CriterionId.RESCALED, lhs=lhs, rhs=rhs, x_tilde_a=x_tilde_a, x_tilde_b=x_tilde_b
        )

    rho_a, rho_b = _reduced(rho)
    purity_a, purity_b = _purity(rho_a), _purity(rho_b)
    sigma_a = w_a[1] * (1.0 - purity_a)
    sigma_b = w_b[1] * (1.0 - purity_b)
    u_a = purity_a * w_a[1] + (d_a + 1.0 - w_a[1]) / d_a
    u_b = purity_b * w_b[1] + (d_b + 1.0 - w_b[1]) / d_b
    return CriterionReport.from_inequality(
        CriterionId.RESCALED,
        lhs=lhs,
        rhs=float(np.sqrt(sigma_a * sigma_b) + np.sqrt(u_a * u_b)),
        x_tilde_a=x_tilde_a,
        x_tilde_b=x_tilde_b,
        sigma_a=sigma_a,
        sigma_b=sigma_b,
        u_a=u_a,
        u_b=u_b,
        purity_a=purity_a,
        purity_b=purity_b,
    )


def npt_criterion(rho: DensityMatrix) -> CriterionReport:
    """
    Negative partial transpose on factor A.

    lhs = -min eig(rho^{T_A}), rhs = 0; detected iff min eig < -npt_tol.
    """
    dims = _dims(rho)
    try:
        min_eig = float(np.linalg.eigvalsh(transpose_factor(rho.matrix, dims, Subsystem.A))[0])
    except np.linalg.LinAlgError as e:
        raise ComputationError(f"eigendecomposition of partial transpose failed: {e}") from e
    return CriterionReport(
        criterion_id=CriterionId.NPT,
        lhs=-min_eig,
        rhs=0.0,
        margin=-min_eig,
        detected=bool(min_eig < -get_settings().npt_tol),
        auxiliary={"min_eigenvalue": min_eig},
    )
