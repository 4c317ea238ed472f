#!/usr/bin/env python3
"""
Validation Script for Volume-Ratio Acceptance

Regenerates the reference volume ratios at desk scale and checks them
against the published values and wall-time budgets, per-state inclusion of
the SIC1, SIC2 and LOO detected sets, the analytic oracles, the decision
equivalences, the POVM correlation scaling law, sampler uniformity and the
(2,3) sweep corner.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy import stats

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from services.criteria_service.criteria import (
    joint_purity_criterion,
    joint_purity_free_criterion,
    loo_criterion,
    npt_criterion,
    povm_correlation_criterion,
)
from services.criteria_service.suite import CriterionSuite, sic_spec
from services.linalg_service.loo_basis import gell_mann_basis
from services.linalg_service.states import singlet, werner
from services.povm_service.nm_povm import build_povm, random_rotation
from shared.models import CriterionId, NMPovmSpec, SamplerConfig
from shared.utils.config import get_settings
from shared.utils.logging import get_logger, setup_logging
from workers.estimator_worker.ratios import collect_flags, summarize
from workers.estimator_worker.sweep import sweep_scaled_x
from workers.sampler_worker.hit_and_run import iter_states, sample_states
from workers.sampler_worker.tasks import run_chains

setup_logging()
logger = get_logger(__name__)
settings = get_settings()

SUITE = [
    CriterionId.NPT,
    CriterionId.LOO,
    CriterionId.JOINT_PURITY,
    CriterionId.JOINT_PURITY_FREE,
]
LABELS = {
    CriterionId.NPT: "R_NPT",
    CriterionId.LOO: "R_LOO",
    CriterionId.JOINT_PURITY: "R_SIC2",
    CriterionId.JOINT_PURITY_FREE: "R_SIC1",
}

# (dims, samples, wall-time budget in seconds, {label: (reference, tolerance)})
REFERENCE = [
    (
        (2, 2),
        100_000,
        120.0,
        {
            "R_NPT": (0.75784, 0.015),
            "R_LOO": (0.68860, 0.015),
            "R_SIC2": (0.67947, 0.015),
            "R_SIC1": (0.67060, 0.015),
        },
    ),
    (
        (2, 3),
        100_000,
        300.0,
        {
            "R_NPT": (0.97303, 0.01),
            "R_SIC1": (0.39732, 0.02),
            "R_SIC2": (0.42998, 0.02),
            "R_LOO": (0.43853, 0.02),
        },
    ),
    ((3, 3), 50_000, 600.0, {"R_LOO": (0.76364, 0.03)}),
]

G2 = gell_mann_basis(2)
G3 = gell_mann_basis(3)


def _mark(ok: bool) -> str:
    return "✅" if ok else "❌"


def check_table_row(
    dims: tuple[int, int],
    n_samples: int,
    budget: float,
    expected: dict[str, tuple[float, float]],
    seed: int,
) -> tuple[bool, list[str]]:
    """Estimate one row of ratios, compare against the reference values and budget."""
    config = SamplerConfig(dims=dims, seed=seed, n_samples=n_samples)
    suite = CriterionSuite(dims, SUITE)
    start = time.time()
    flags = collect_flags(run_chains(config, suite))
    elapsed = time.time() - start

    ratios = {LABELS[e.criterion_id]: e for e in summarize(suite.criteria, flags)}
    in_budget = elapsed <= budget
    passed = in_budget
    lines = [f"{n_samples:,} samples in {elapsed:.1f}s", f"{_mark(in_budget)} budget {budget:.0f}s"]
    for label, (reference, tolerance) in expected.items():
        est = ratios[label]
        ok = abs(est.ratio - reference) <= tolerance
        passed &= ok
        lines.append(
            f"{_mark(ok)} {label} = {est.ratio:.5f} ± {est.std_error:.5f} "
            f"(reference {reference:.5f} ± {tolerance})"
        )

    if dims == (3, 3):
        ok = ratios["R_NPT"].ratio >= 0.995
        passed &= ok
        lines.append(f"{_mark(ok)} R_NPT = {ratios['R_NPT'].ratio:.5f} (>= 0.995)")

    # per-state inclusion SIC1 in SIC2 in LOO
    _, loo, sic2, sic1 = flags.T
    violations = int(np.sum(sic1 & ~sic2) + np.sum(sic2 & ~loo))
    ok = violations == 0
    passed &= ok
    lines.append(f"{_mark(ok)} inclusion SIC1 ⊆ SIC2 ⊆ LOO ({violations} violating states)")
    return passed, lines


def check_analytic_oracles() -> tuple[bool, list[str]]:
    """Closed-form values on the singlet and the Werner threshold."""
    rho, sic = singlet(), sic_spec(2)
    loo = loo_criterion(rho, G2, G2)
    joint = joint_purity_criterion(rho, sic, sic)
    free = joint_purity_free_criterion(rho, sic, sic)
    npt = npt_criterion(rho)
    checks = [
        ("singlet ||C||_1 = 3/2", loo.auxiliary["trace_norm"], 1.5),
        ("singlet ||P||_1 (SIC, SIC) = 1/2", joint.lhs, 0.5),
        ("singlet SIC2 bound = 1/3", joint.rhs, 1 / 3),
        ("singlet SIC1 bound = 1/3", free.rhs, 1 / 3),
        ("singlet partial transpose min eigenvalue = -1/2", npt.auxiliary["min_eigenvalue"], -0.5),
    ]
    passed, lines = True, []
    for name, value, expected in checks:
        ok = abs(value - expected) <= 1e-12
        passed &= ok
        lines.append(f"{_mark(ok)} {name} (got {value:.15f})")

    below, above = werner(0.333), werner(0.334)
    for name, criterion in (
        ("LOO", lambda r: loo_criterion(r, G2, G2)),
        ("SIC2", lambda r: joint_purity_criterion(r, sic, sic)),
        ("SIC1", lambda r: joint_purity_free_criterion(r, sic, sic)),
        ("NPT", npt_criterion),
    ):
        ok = not criterion(below).detected and criterion(above).detected
        passed &= ok
        lines.append(f"{_mark(ok)} {name} flips on Werner states between p = 0.333 and 0.334")
    return passed, lines


def check_equivalences(n_samples: int, seed: int) -> tuple[bool, list[str]]:
    """POVM_CORR decides like LOO and the MUB pair decides like the SIC pair."""
    povm_a = build_povm(NMPovmSpec(d=2, N=3, M=2, x=0.9), random_rotation(3, seed))
    povm_b = build_povm(NMPovmSpec(d=2, N=1, M=4, x=0.22), random_rotation(3, seed + 1))
    correlations = CriterionSuite((2, 2), ["LOO", "POVM_CORR"], povm_a=povm_a, povm_b=povm_b)
    mub = NMPovmSpec(d=2, N=3, M=2, x=1.0)
    sic_free = CriterionSuite((2, 2), ["JOINT_PURITY_FREE"])
    mub_free = CriterionSuite((2, 2), ["JOINT_PURITY_FREE"], povm_a=mub, povm_b=mub)

    corr_mismatch = free_mismatch = 0
    for matrix in iter_states(SamplerConfig(dims=(2, 2), n_samples=n_samples, seed=seed)):
        loo, corr = correlations.detect(matrix)
        corr_mismatch += int(loo != corr)
        free_mismatch += int(sic_free.detect(matrix)[0] != mub_free.detect(matrix)[0])

    lines = [
        f"{_mark(corr_mismatch == 0)} POVM_CORR vs LOO on {n_samples:,} (2,2) states: "
        f"{corr_mismatch} disagreements",
        f"{_mark(free_mismatch == 0)} MUB vs SIC purity-free on {n_samples:,} (2,2) states: "
        f"{free_mismatch} disagreements",
    ]
    return corr_mismatch == 0 and free_mismatch == 0, lines


def check_scaling_law(n_states: int, n_frames: int, seed: int) -> tuple[bool, str]:
    """||C(Pi)||_1^2 = Gamma_A Gamma_B ||C(G)||_1^2 on sampled (2,3) states for rotated frames."""
    frames = [
        (
            build_povm(NMPovmSpec(d=2, N=3, M=2, x=0.9), random_rotation(3, seed + k)),
            build_povm(NMPovmSpec(d=3, N=1, M=9, x=0.04), random_rotation(8, seed + 1000 + k)),
        )
        for k in range(n_frames)
    ]
    worst = 0.0
    for rho in sample_states(SamplerConfig(dims=(2, 3), n_samples=n_states, seed=seed)):
        loo_lhs = loo_criterion(rho, G2, G3).lhs
        for povm_a, povm_b in frames:
            report = povm_correlation_criterion(rho, povm_a, povm_b)
            g = report.auxiliary["gamma_a"] * report.auxiliary["gamma_b"]
            worst = max(worst, abs(report.lhs - g * loo_lhs) / max(g * loo_lhs, 1e-300))
    ok = worst <= 1e-10
    return ok, f"{n_states} states x {n_frames} frames, max relative deviation {worst:.2e}"


def check_uniformity(n_samples: int, seed: int) -> tuple[bool, str]:
    """Qubit samples fill the Bloch ball uniformly: |r|^3 ~ U(0, 1) and mean purity 4/5."""
    config = SamplerConfig(dims=(2,), n_samples=n_samples, seed=seed)
    purities = np.array([np.vdot(m, m).real for m in iter_states(config)])
    radius = np.sqrt(np.clip(2 * purities - 1, 0.0, None))
    pvalue = float(stats.kstest(radius**3, "uniform").pvalue)
    mean = float(purities.mean())
    ok = pvalue > 0.01 and abs(mean - 0.8) <= 0.003
    return ok, f"KS p = {pvalue:.3f}, mean purity {mean:.4f} (0.8 ± 0.003)"


def check_sweep_corner(n_samples: int, seed: int) -> tuple[bool, str]:
    """The (1, 1) corner of the (2,3) sweep reproduces R_SIC1(2,3) within 3 sigma."""
    config = SamplerConfig(dims=(2, 3), seed=seed, n_samples=n_samples)
    result = sweep_scaled_x((2, 3), ([1.0], [1.0]), config)
    point = result.points[0]
    ok = abs(point.ratio - 0.39732) <= 3 * point.std_error + 0.005
    return ok, f"ratio {point.ratio:.5f} ± {point.std_error:.5f} (reference 0.39732)"


def main() -> int:
    """Run all validation checks."""
    parser = argparse.ArgumentParser(description="Check volume ratios against reference values.")
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument(
        "--scale", type=float, default=1.0, help="multiply sample counts (e.g. 0.1 for a smoke run)"
    )
    args = parser.parse_args()

    def scaled(n: int) -> int:
        return max(1000, int(n * args.scale))

    print("=" * 60)
    print("🔍 Entanglement Volume - Acceptance Validation")
    print("=" * 60)

    all_passed = True
    results = []

    def report(name: str, passed: bool, lines: list[str]) -> None:
        nonlocal all_passed
        for line in lines:
            print(f"   {line}")
        results.append((name, passed, lines[0]))
        all_passed &= passed

    for index, (dims, n_samples, budget, expected) in enumerate(REFERENCE, start=1):
        print(f"\n📊 Check {index}: volume ratios for dims {dims}")
        n = scaled(n_samples)
        passed, lines = check_table_row(dims, n, budget * n / n_samples, expected, args.seed)
        report(f"Ratios {dims}", passed, lines)

    print("\n📐 Analytic oracles")
    report("Analytic oracles", *check_analytic_oracles())

    print("\n🔁 Decision equivalences")
    report("Equivalences", *check_equivalences(scaled(10_000), args.seed))

    print("\n📏 POVM correlation scaling law")
    passed, message = check_scaling_law(max(50, int(500 * args.scale)), 20, args.seed)
    report("Scaling law", passed, [f"{'✅ PASS' if passed else '❌ FAIL'}: {message}"])

    print("\n🎲 Sampler uniformity on the Bloch ball")
    passed, message = check_uniformity(scaled(100_000), args.seed)
    report("Uniformity", passed, [f"{'✅ PASS' if passed else '❌ FAIL'}: {message}"])

    print("\n🧭 Sweep corner x~ = (1, 1) for dims (2, 3)")
    passed, message = check_sweep_corner(scaled(100_000), args.seed)
    report("Sweep corner", passed, [f"{'✅ PASS' if passed else '❌ FAIL'}: {message}"])

    # Summary
    print("\n" + "=" * 60)
    print("📋 VALIDATION SUMMARY")
    print("=" * 60)

    for name, passed, value in results:
        print(f"   {_mark(passed)} {name}: {value}")

    print()
    if all_passed:
        print("🎉 ALL CHECKS PASSED")
        return 0
    else:
        print("⚠️  SOME CHECKS FAILED - See details above")
        return 1


if __name__ == "__main__":
    sys.exit(main())
