"""
Criterion Suites

Bundles a list of criteria with their local measurements so the sampler can
evaluate all of them on one shared state. Measurements default to qudit SIC
parameters (N, M) = (1, d^2), x = 1/d^2 on each side (scaled parameter 1).
"""

from collections.abc import Sequence

import numpy as np

from services.criteria_service.criteria import (
    PovmLike,
    check_scaled_x,
    joint_purity_criterion,
    joint_purity_free_criterion,
    loo_criterion,
    npt_criterion,
    pair_kernel,
    povm_correlation_criterion,
    purity_bounds,
    purity_free_bound,
    rescaled_joint_criterion,
    rescaled_weights,
    spectral_weights,
)
from services.linalg_service.hermitian import trace_norm, transpose_factor
from services.linalg_service.loo_basis import gell_mann_basis
from services.povm_service.nm_povm import gamma, scaled_x
from shared.models import (
    CriterionId,
    CriterionReport,
    DensityMatrix,
    NMPovm,
    NMPovmSpec,
    Subsystem,
)
from shared.utils.config import get_settings
from shared.utils.errors import ComputationError, DimensionMismatchError, InvalidSpecError
from shared.utils.logging import get_logger

logger = get_logger(__name__)

DEFAULT_CRITERIA: tuple[CriterionId, ...] = (
    CriterionId.NPT,
    CriterionId.LOO,
    CriterionId.JOINT_PURITY,
    CriterionId.JOINT_PURITY_FREE,
)


def sic_spec(d: int) -> NMPovmSpec:
    """Parameters of a (generalized) SIC-POVM on dimension d."""
    return NMPovmSpec(d=d, N=1, M=d * d, x=1.0 / d**2)


def parse_criteria(names: Sequence[str | CriterionId]) -> list[CriterionId]:
    """Map names (case-insensitive, '-' or '_') to criterion ids, keeping order."""
    ids = []
    for name in names:
        if isinstance(name, CriterionId):
            ids.append(name)
            continue
        key = name.strip().upper().replace("-", "_")
        try:
            ids.append(CriterionId(key))
        except ValueError as e:
            valid = ", ".join(c.value for c in CriterionId)
            raise InvalidSpecError(f"unknown criterion {name!r}; expected one of {valid}") from e
    return ids


class CriterionSuite:
    """
    Criteria evaluated together on bipartite states of fixed dimensions.

    Args:
        dims: (d_A, d_B)
        criteria: Criteria to evaluate, in report order
        povm_a: Measurement on A (NMPovm or NMPovmSpec); SIC parameters if None
        povm_b: Measurement on B
        rescaled: Variant of the RESCALED criterion ("purity" or "purity-free")
    """

    def __init__(
        self,
        dims: tuple[int, int],
        criteria: Sequence[CriterionId | str] = DEFAULT_CRITERIA,
        povm_a: PovmLike | None = None,
        povm_b: PovmLike | None = None,
        rescaled: str = "purity-free",
    ):
        if len(dims) != 2:
            raise DimensionMismatchError(f"criteria need bipartite dims, got {dims}")
        self.dims = (int(dims[0]), int(dims[1]))
        self.criteria = parse_criteria(criteria)
        if not self.criteria:
            raise InvalidSpecError("criterion list is empty")
        self.povm_a = povm_a if povm_a is not None else sic_spec(self.dims[0])
        self.povm_b = povm_b if povm_b is not None else sic_spec(self.dims[1])
        self.rescaled = rescaled

        self._check_side(self.povm_a, self.dims[0], "A")
        self._check_side(self.povm_b, self.dims[1], "B")
        self._basis_a = gell_mann_basis(self.dims[0])
        self._basis_b = gell_mann_basis(self.dims[1])
        self.x_tilde_a = scaled_x(self._spec(self.povm_a))
        self.x_tilde_b = scaled_x(self._spec(self.povm_b))
        if CriterionId.RESCALED in self.criteria:
            if rescaled not in ("purity", "purity-free"):
                raise InvalidSpecError(f"unknown rescaled variant {rescaled!r}")
            check_scaled_x(self.dims[0], self.x_tilde_a, "A")
            check_scaled_x(self.dims[1], self.x_tilde_b, "B")
        self._prepare_kernels()

        logger.debug(
            "Criterion suite ready",
            dims=self.dims,
            criteria=[c.value for c in self.criteria],
            x_tilde_a=self.x_tilde_a,
            x_tilde_b=self.x_tilde_b,
        )

    @staticmethod
    def _spec(povm: PovmLike) -> NMPovmSpec:
        return povm.spec if isinstance(povm, NMPovm) else povm

    @classmethod
    def _check_side(cls, povm: PovmLike, d: int, side: str) -> None:
        spec = cls._spec(povm)
        if spec.d != d:
            raise DimensionMismatchError(f"POVM on {side} has d={spec.d}, factor has d={d}")
        if not spec.is_informationally_complete:
            raise InvalidSpecError(
                f"POVM on {side} with (d, N, M) = ({spec.d}, {spec.N}, {spec.M}) "
                "is not informationally complete"
            )
        gamma(spec)  # raises for infeasible x

    def evaluate_one(self, rho: DensityMatrix, criterion: CriterionId) -> CriterionReport:
        if criterion is CriterionId.NPT:
            return npt_criterion(rho)
        if criterion is CriterionId.LOO:
            return loo_criterion(rho, self._basis_a, self._basis_b)
        if criterion is CriterionId.POVM_CORR:
            return povm_correlation_criterion(rho, self.povm_a, self.povm_b)
        if criterion is CriterionId.JOINT_PURITY:
            return joint_purity_criterion(rho, self.povm_a, self.povm_b)
        if criterion is CriterionId.JOINT_PURITY_FREE:
            return joint_purity_free_criterion(rho, self.povm_a, self.povm_b)
        return rescaled_joint_criterion(
            rho, *self.dims, self.x_tilde_a, self.x_tilde_b, which=self.rescaled
        )

    def evaluate(self, rho: DensityMatrix) -> list[CriterionReport]:
        """Full reports, one per criterion in suite order."""
        if tuple(rho.dims) != self.dims:
            raise DimensionMismatchError(
                f"state dims {rho.dims} differ from suite dims {self.dims}"
            )
        return [self.evaluate_one(rho, c) for c in self.criteria]

    # =========================================================================
    # Sampler path
    # =========================================================================

    def _prepare_kernels(self) -> None:
        spec_a, spec_b = self._spec(self.povm_a), self._spec(self.povm_b)
        d_a, d_b = self.dims
        self._kernel = pair_kernel(self._basis_a, self._basis_b)
        self._q_shape = (d_a * d_a, d_b * d_b)
        self._marginal_scale = np.sqrt(d_a * d_b)
        self._gammas = (gamma(spec_a), gamma(spec_b))
        self._free_rhs = float(np.sqrt(purity_free_bound(spec_a) * purity_free_bound(spec_b)))
        self._root_a = np.sqrt(spectral_weights(spec_a))
        self._root_b = np.sqrt(spectral_weights(spec_b))

        # Pi_i = sum_mu Tr{G_mu Pi_i} G_mu, so P = coeffs_A Q coeffs_B^T
        self._coeffs = None
        if isinstance(self.povm_a, NMPovm) and isinstance(self.povm_b, NMPovm):
            self._coeffs = tuple(
                np.einsum("iab,mba->im", povm.elements, basis.ops).real
                for povm, basis in ((self.povm_a, self._basis_a), (self.povm_b, self._basis_b))
            )

        self._rescaled = None
        if CriterionId.RESCALED in self.criteria:
            self._rescaled = (
                rescaled_weights(d_a, self.x_tilde_a),
                rescaled_weights(d_b, self.x_tilde_b),
            )

    def _joint_norm(self, q: np.ndarray) -> float:
        if self._coeffs is not None:
            coeffs_a, coeffs_b = self._coeffs
            return trace_norm(coeffs_a @ q @ coeffs_b.T)
        return trace_norm(self._root_a[:, None] * q * self._root_b[None, :])

    def _rescaled_detected(self, q: np.ndarray, purity_a: float, purity_b: float) -> bool:
        weights_a, weights_b = self._rescaled
        lhs = trace_norm(np.sqrt(weights_a)[:, None] * q * np.sqrt(weights_b)[None, :])
        if self.rescaled == "purity-free":
            rhs = float(np.sqrt(1.0 + self.x_tilde_a) * np.sqrt(1.0 + self.x_tilde_b))
            return lhs - rhs > 0.0
        (d_a, d_b), w_a, w_b = self.dims, weights_a[1], weights_b[1]
        sigma_a, sigma_b = w_a * (1.0 - purity_a), w_b * (1.0 - purity_b)
        u_a = purity_a * w_a + (d_a + 1.0 - w_a) / d_a
        u_b = purity_b * w_b + (d_b + 1.0 - w_b) / d_b
        return lhs - float(np.sqrt(sigma_a * sigma_b) + np.sqrt(u_a * u_b)) > 0.0

    def _npt_detected(self, matrix: np.ndarray) -> bool:
        try:
            min_eig = np.linalg.eigvalsh(transpose_factor(matrix, self.dims, Subsystem.A))[0]
        except np.linalg.LinAlgError as e:
            raise ComputationError(f"eigendecomposition of partial transpose failed: {e}") from e
        return bool(min_eig < -get_settings().npt_tol)

    def detect(self, matrix: np.ndarray) -> np.ndarray:
        """
        Detection flags for a raw matrix already known to be a valid state.

        Same decisions as evaluate(), computed from the Gell-Mann expectation
        matrix Q (one matmul per state) without building reports.
        """
        q = (self._kernel @ matrix.ravel()).real.reshape(self._q_shape)
        d_a, d_b = self.dims
        # Q_{mu 0} = Tr{G_mu rho^A}/sqrt(d_B) and Q_{0 nu} = Tr{G_nu rho^B}/sqrt(d_A)
        purity_a = d_b * float(q[:, 0] @ q[:, 0])
        purity_b = d_a * float(q[0] @ q[0])
        mixedness = (1.0 - purity_a) * (1.0 - purity_b)

        joint = loo_norm = None
        flags = np.empty(len(self.criteria), dtype=bool)
        for k, criterion in enumerate(self.criteria):
            if criterion is CriterionId.NPT:
                flags[k] = self._npt_detected(matrix)
            elif criterion in (CriterionId.LOO, CriterionId.POVM_CORR):
                if loo_norm is None:
                    loo_norm = trace_norm(q - self._marginal_scale * np.outer(q[:, 0], q[0]))
                if criterion is CriterionId.LOO:
                    flags[k] = loo_norm**2 - mixedness > 0.0
                else:
                    g = self._gammas[0] * self._gammas[1]
                    flags[k] = self._povm_corr_lhs(q, loo_norm) - g * mixedness > 0.0
            elif criterion in (CriterionId.JOINT_PURITY, CriterionId.JOINT_PURITY_FREE):
                if joint is None:
                    joint = self._joint_norm(q)
                if criterion is CriterionId.JOINT_PURITY_FREE:
                    flags[k] = joint - self._free_rhs > 0.0
                else:
                    spec_a, spec_b = self._spec(self.povm_a), self._spec(self.povm_b)
                    sigma_a, u_a = purity_bounds(spec_a, purity_a)
                    sigma_b, u_b = purity_bounds(spec_b, purity_b)
                    rhs = float(np.sqrt(sigma_a * sigma_b) + np.sqrt(u_a * u_b))
                    flags[k] = joint - rhs > 0.0
            else:
                flags[k] = self._rescaled_detected(q, purity_a, purity_b)
        return flags

    def _povm_corr_lhs(self, q: np.ndarray, loo_norm: float) -> float:
        if self._coeffs is None:
            return self._gammas[0] * self._gammas[1] * loo_norm**2
        coeffs_a, coeffs_b = self._coeffs
        correlations = q - self._marginal_scale * np.outer(q[:, 0], q[0])
        return trace_norm(coeffs_a @ correlations @ coeffs_b.T) ** 2
