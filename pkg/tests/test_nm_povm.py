"""Test (N,M)-POVM construction and validation."""

import numpy as np
import pytest

from services.linalg_service.states import PAULI_X, PAULI_Y, PAULI_Z
from services.povm_service.nm_povm import (
    build_eigframe,
    build_povm,
    expansion_coefficients,
    feasible_x_range,
    gamma,
    informationally_complete_classes,
    is_informationally_complete,
    max_feasible_x,
    numeric_sts_spectrum,
    povm_from_elements,
    random_rotation,
    rescale_factor,
    scaled_x,
    scaled_x_range,
    sts_spectrum,
    validate_povm,
)
from shared.models import NMPovmSpec
from shared.utils.errors import InvalidSpecError, PositivityViolation


def test_feasible_x_range():
    np.testing.assert_allclose(feasible_x_range(2, 3, 2), (0.5, 1.0))
    np.testing.assert_allclose(feasible_x_range(3, 1, 9), (1 / 27, 1 / 9))
    np.testing.assert_allclose(feasible_x_range(3, 4, 3), (1 / 3, 1.0))


@pytest.mark.parametrize(
    "d, n, m, expected",
    [(2, 3, 2, True), (3, 4, 3, True), (2, 2, 2, False), (2, 1, 4, True), (3, 1, 9, True)],
)
def test_is_informationally_complete(d, n, m, expected):
    assert is_informationally_complete(d, n, m) is expected


def test_informationally_complete_classes():
    assert informationally_complete_classes(2) == [(1, 4), (3, 2)]
    assert informationally_complete_classes(3) == [(1, 9), (2, 5), (4, 3), (8, 2)]


def test_gamma_values():
    np.testing.assert_allclose(gamma(NMPovmSpec(d=2, N=1, M=4, x=0.25)), 1 / 6)
    np.testing.assert_allclose(gamma(NMPovmSpec(d=2, N=3, M=2, x=1.0)), 1.0)
    assert gamma(NMPovmSpec(d=3, N=4, M=3, x=1 / 3)) == pytest.approx(0.0, abs=1e-15)


def test_gamma_outside_range():
    with pytest.raises(InvalidSpecError):
        gamma(NMPovmSpec(d=2, N=3, M=2, x=1.5))


def test_scaled_parameters():
    assert scaled_x(NMPovmSpec(d=2, N=1, M=4, x=0.25)) == pytest.approx(1.0)
    assert scaled_x(NMPovmSpec(d=3, N=4, M=3, x=1.0)) == pytest.approx(1.0)
    assert scaled_x(NMPovmSpec(d=3, N=1, M=9, x=1 / 27)) == pytest.approx(1 / 3)
    assert rescale_factor(NMPovmSpec(d=2, N=1, M=4, x=0.25)) == pytest.approx(1 / 6)
    assert scaled_x_range(3, 2) == pytest.approx((1 / 3, 2 / 3))


def test_sts_spectrum_formula():
    np.testing.assert_allclose(
        sts_spectrum(NMPovmSpec(d=2, N=3, M=2, x=1.0)), [0, 0, 1, 1, 1, 3]
    )
    np.testing.assert_allclose(
        sts_spectrum(NMPovmSpec(d=2, N=1, M=4, x=0.25)), [1 / 6, 1 / 6, 1 / 6, 0.5]
    )
    assert len(sts_spectrum(NMPovmSpec(d=3, N=2, M=5, x=0.2))) == 10


def test_eigframe_structure():
    frame = build_eigframe(3, 2, 2, 1.0)
    np.testing.assert_allclose(frame.X.T @ frame.X, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(frame.X[:, 0], 1 / np.sqrt(6))
    np.testing.assert_allclose(frame.X.reshape(3, 2, 4)[:, :, 1:].sum(axis=1), 0.0, atol=1e-15)
    np.testing.assert_allclose(frame.eigenvalues, [3, 1, 1, 1])
    np.testing.assert_allclose(frame.rotation, np.eye(4))


def test_eigframe_rejects_incomplete_triple():
    with pytest.raises(InvalidSpecError):
        build_eigframe(2, 2, 2, 0.75)


def test_qubit_sic_construction(qubit_sic):
    assert qubit_sic.elements.shape == (4, 2, 2)
    for element in qubit_sic.elements:
        np.testing.assert_allclose(np.linalg.eigvalsh(element), [0.0, 0.5], atol=1e-12)
    overlaps = np.einsum("iab,jba->ij", qubit_sic.elements, qubit_sic.elements).real
    expected = np.full((4, 4), 1 / 12) + np.eye(4) * (0.25 - 1 / 12)
    np.testing.assert_allclose(overlaps, expected, atol=1e-12)


def test_qubit_mub_construction(qubit_mub):
    paulis = [PAULI_X, PAULI_Y, PAULI_Z]
    for alpha, sigma in enumerate(paulis):
        plus, minus = (np.eye(2) + sigma) / 2, (np.eye(2) - sigma) / 2
        np.testing.assert_allclose(qubit_mub.element(alpha, 0), plus, atol=1e-14)
        np.testing.assert_allclose(qubit_mub.element(alpha, 1), minus, atol=1e-14)


def test_build_rejects_infeasible_specs():
    with pytest.raises(InvalidSpecError):
        build_povm(NMPovmSpec(d=2, N=2, M=2, x=0.75))
    with pytest.raises(InvalidSpecError):
        build_povm(NMPovmSpec(d=2, N=3, M=2, x=0.5))
    with pytest.raises(InvalidSpecError):
        build_povm(NMPovmSpec(d=2, N=1, M=4, x=0.3))


def test_build_reports_non_positive_elements():
    # the canonical frame puts G_1 and G_2 into one qutrit element, which is not positive at x = 1
    with pytest.raises(PositivityViolation) as excinfo:
        build_povm(NMPovmSpec(d=3, N=4, M=3, x=1.0))
    assert excinfo.value.min_eigenvalue < 0.0


def test_build_with_rotation():
    o_prime = random_rotation(3, np.random.default_rng(5))
    povm = build_povm(NMPovmSpec(d=2, N=1, M=4, x=0.2), o_prime)
    assert validate_povm(povm).passed
    np.testing.assert_allclose(povm.frame.rotation[0], [1, 0, 0, 0])


def test_max_feasible_x_reaches_algebraic_bound_for_qubits():
    assert max_feasible_x(2, 1, 4) == pytest.approx(0.25, abs=1e-6)
    assert max_feasible_x(2, 3, 2) == pytest.approx(1.0, abs=1e-6)


def test_max_feasible_x_for_qutrit_mub_frame():
    x_max = max_feasible_x(3, 4, 3)
    assert 1 / 3 < x_max < 1.0
    povm = build_povm(NMPovmSpec(d=3, N=4, M=3, x=x_max))
    assert validate_povm(povm).passed
    with pytest.raises(PositivityViolation):
        build_povm(NMPovmSpec(d=3, N=4, M=3, x=x_max + 1e-4))


@pytest.mark.parametrize("d, n, m, x", [(2, 1, 4, 0.25), (2, 3, 2, 1.0), (2, 3, 2, 0.7)])
def test_constructed_povm_satisfies_axioms(d, n, m, x):
    report = validate_povm(build_povm(NMPovmSpec(d=d, N=n, M=m, x=x)))
    assert report.completeness < 1e-10
    assert report.trace < 1e-10
    assert report.same_overlap < 1e-10
    assert report.cross_overlap is None or report.cross_overlap < 1e-10
    assert report.passed


def test_hand_built_mub_cross_overlap():
    elements = np.stack(
        [(np.eye(2) + s * p) / 2 for p in (PAULI_X, PAULI_Y, PAULI_Z) for s in (1, -1)]
    )
    povm = povm_from_elements(NMPovmSpec(d=2, N=3, M=2, x=1.0), elements)
    overlap = np.trace(povm.element(0, 0) @ povm.element(2, 0)).real
    assert overlap == pytest.approx(0.5)
    assert validate_povm(povm).cross_overlap < 1e-14


def test_scaled_element_breaks_trace_axiom(qubit_sic):
    elements = np.array(qubit_sic.elements)
    elements[0] *= 1.1
    report = validate_povm(povm_from_elements(qubit_sic.spec, elements))
    assert report.trace == pytest.approx(0.1 * 2 / 4)
    assert not report.passed


@pytest.mark.parametrize("d, n, m, x", [(2, 1, 4, 0.25), (2, 3, 2, 1.0), (3, 4, 3, 0.4)])
def test_numeric_spectrum_matches_formula(d, n, m, x):
    spec = NMPovmSpec(d=d, N=n, M=m, x=x)
    povm = build_povm(spec)
    np.testing.assert_allclose(numeric_sts_spectrum(povm), sts_spectrum(spec), atol=1e-10)


def test_expansion_coefficients_match_frame(qubit_sic):
    np.testing.assert_allclose(expansion_coefficients(qubit_sic), qubit_sic.frame.s, atol=1e-14)


@pytest.mark.parametrize("fraction", [0.5, 1.0])
def test_qutrit_sic_frame_satisfies_axioms(fraction):
    lower = feasible_x_range(3, 1, 9)[0]
    x_max = max_feasible_x(3, 1, 9)
    assert x_max == pytest.approx(0.05708, abs=1e-4)
    x = lower + fraction * (x_max - lower)
    report = validate_povm(build_povm(NMPovmSpec(d=3, N=1, M=9, x=x)))
    assert max(report.completeness, report.trace, report.same_overlap) < 1e-10
    assert report.min_eigenvalue > -1e-10
    assert report.passed


@pytest.mark.parametrize(
    "d, n, m, x",
    [(2, 1, 4, 0.25), (2, 3, 2, 0.8), (3, 4, 3, 0.4), (3, 1, 9, 0.05)],
)
def test_outcome_vector_stretches_traceless_operators_by_sqrt_gamma(d, n, m, x, rng):
    spec = NMPovmSpec(d=d, N=n, M=m, x=x)
    povm = build_povm(spec)
    for _ in range(5):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        t = g + g.conj().T
        t -= np.trace(t) / d * np.eye(d)
        outcomes = np.einsum("iab,ba->i", povm.elements, t).real
        np.testing.assert_allclose(
            np.linalg.norm(outcomes), np.sqrt(gamma(spec)) * np.linalg.norm(t), rtol=1e-10
        )
