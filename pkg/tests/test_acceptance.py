"""Acceptance suite: every stated criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all).
The Monte Carlo runs are shared between criteria through module fixtures so
the whole suite stays within its runtime budget.
"""

import numpy as np
import pytest

from usid.linalg import operator_norm
from usid.montecarlo import moment_check, run_monte_carlo
from usid.povm import (
    closed_form_global,
    closed_form_separable,
    exact_success_probability,
    global_optimal_povm,
    optimal_separable_povm,
    validate,
    x_operator,
    x_spectrum,
)
from usid.protocol import build_protocol, induced_povm, run_protocol_trials
from usid.symmetry import (
    SpaceSpec,
    build_DA,
    dimension_identity_gap,
    sector_dims,
    young_projectors,
)

MC_SAMPLES = 100_000
PROTOCOL_RUNS = 10_000


def record(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def mc_runs():
    spec21 = SpaceSpec(2, 1)
    spec41 = SpaceSpec(4, 1)
    spec22 = SpaceSpec(2, 2)
    return {
        "global_d2_w1": run_monte_carlo(global_optimal_povm(2), spec21, MC_SAMPLES, seed=2024),
        "global_d2_w4": run_monte_carlo(
            global_optimal_povm(2), spec21, MC_SAMPLES, seed=2024, workers=4
        ),
        "global_d4": run_monte_carlo(global_optimal_povm(4), spec41, MC_SAMPLES, seed=2025),
        "separable_22": run_monte_carlo(
            optimal_separable_povm(spec22), spec22, MC_SAMPLES, seed=2026
        ),
    }


@pytest.fixture(scope="module")
def protocol_run():
    tree = build_protocol(SpaceSpec(2, 2))
    stats, _ = run_protocol_trials(tree, PROTOCOL_RUNS, seed=777)
    return stats


def test_criterion_01_global_closed_form():
    worst = 0.0
    for d in (2, 3, 4, 6):
        p = exact_success_probability(global_optimal_povm(d), SpaceSpec(d, 1))
        worst = max(worst, abs(p - closed_form_global(d)))
    record("criterion 1: global trace probability equals (d-1)/(3d) for d in {2,3,4,6}",
           worst <= 1e-10, f"max gap {worst:.2e}")


def test_criterion_02_two_qubit_headline_numbers():
    spec = SpaceSpec(2, 2)
    p_sep = exact_success_probability(optimal_separable_povm(spec), spec)
    p_glob = exact_success_probability(global_optimal_povm(4), spec)
    ok = (
        abs(p_sep - 19 / 80) <= 1e-10
        and abs(p_glob - 0.25) <= 1e-10
        and abs((p_glob - p_sep) - 1 / 80) <= 1e-10
    )
    record("criterion 2: two-qubit values 19/80, 1/4 and gap 1/80",
           ok, f"p_sep={p_sep:.12f} p_glob={p_glob:.12f}")


def test_criterion_03_separable_closed_form():
    worst = 0.0
    for d_a, d_b in ((2, 2), (2, 3), (3, 2), (3, 3), (1, 2), (2, 1)):
        spec = SpaceSpec(d_a, d_b)
        p = exact_success_probability(optimal_separable_povm(spec), spec)
        worst = max(worst, abs(p - closed_form_separable(d_a, d_b)))
    record("criterion 3: separable trace probability equals the closed form",
           worst <= 1e-10, f"max gap {worst:.2e}")


def test_criterion_04_strict_gap():
    ok = all(
        closed_form_global(d_a * d_b) > closed_form_separable(d_a, d_b)
        for d_a in range(2, 7)
        for d_b in range(2, 7)
    )
    record("criterion 4: global strictly beats separable for 2 <= d_a,d_b <= 6", ok)


def test_criterion_05_operator_identities():
    worst = 0.0
    counts_ok = True
    for d in (2, 3, 4):
        diff, avg = build_DA(d)
        _, _, m3 = young_projectors(d)
        eye = np.eye(d**3)
        worst = max(
            worst,
            operator_norm(diff @ diff - 0.75 * m3),
            operator_norm(avg @ avg + diff @ diff - eye),
            operator_norm(diff @ avg + avg @ diff),
        )
        dim_m = sector_dims(d)[2]
        evals = np.linalg.eigvalsh(m3 @ avg @ m3)
        n_plus = int(np.sum(np.abs(evals - 0.5) <= 1e-8))
        n_minus = int(np.sum(np.abs(evals + 0.5) <= 1e-8))
        counts_ok = counts_ok and n_plus == dim_m // 2 and n_minus == dim_m // 2
    record("criterion 5: exchange-operator identities and mixed-sector spectrum at d=2,3,4",
           worst <= 1e-12 and counts_ok, f"max residual {worst:.2e}")


def test_criterion_06_dimension_identity():
    ok = all(
        dimension_identity_gap(d_a, d_b) == 0
        for d_a in range(2, 7)
        for d_b in range(2, 7)
    )
    record("criterion 6: mixed-sector dimension identity exact for 2 <= d_a,d_b <= 6", ok)


def test_criterion_07_x_spectrum():
    spec = SpaceSpec(2, 2)
    _, _, m_a = sector_dims(2)
    multiplicity = (m_a // 2) * (m_a // 2)
    padding = spec.d**3 - 4 * multiplicity
    worst = 0.0
    for betas in ((0.5, 0.5), (0.3, 0.5), (0.6, 0.0)):
        analytic = np.repeat(x_spectrum(*betas), multiplicity)
        expected = np.sort(np.concatenate([analytic, np.zeros(padding)]))
        numeric = np.linalg.eigvalsh(x_operator(spec, *betas))
        worst = max(worst, float(np.max(np.abs(numeric - expected))))
    boundary = np.linalg.eigvalsh(x_operator(spec, 0.5, 0.5))[-1]
    ok = worst <= 1e-8 and abs(boundary - 1.0) <= 1e-10
    record("criterion 7: analytic block spectrum matches diagonalization; boundary saturates",
           ok, f"max gap {worst:.2e}, max eigenvalue {boundary:.12f}")


def test_criterion_08_no_error(mc_runs, protocol_run):
    worst_op = 0.0
    for povm, spec in (
        (global_optimal_povm(2), SpaceSpec(2, 1)),
        (global_optimal_povm(4), SpaceSpec(4, 1)),
        (optimal_separable_povm(SpaceSpec(2, 2)), SpaceSpec(2, 2)),
    ):
        worst_op = max(worst_op, max(validate(povm, spec).no_error_residuals))
    worst_sample = max(run.max_error_sample for run in mc_runs.values())
    ok = worst_op <= 1e-12 and worst_sample <= 1e-10 and protocol_run.misidentification_count == 0
    record(
        "criterion 8: no-error operator residuals, per-sample error, protocol misidentification",
        ok,
        f"op {worst_op:.2e}, sample {worst_sample:.2e}, "
        f"misident {protocol_run.misidentification_count}/{protocol_run.n_trials}",
    )


def test_criterion_09_locc_equivalence():
    worst = 0.0
    for d_a, d_b in ((2, 2), (2, 3)):
        spec = SpaceSpec(d_a, d_b)
        induced = induced_povm(build_protocol(spec))
        target = optimal_separable_povm(spec)
        for mu in range(3):
            worst = max(worst, operator_norm(induced[mu] - target[mu]))
    record("criterion 9: protocol-induced POVM matches the separable optimum at (2,2), (2,3)",
           worst <= 1e-10, f"max residual {worst:.2e}")


def test_criterion_10_monte_carlo_concordance(mc_runs):
    targets = {
        "global_d2_w1": closed_form_global(2),
        "global_d4": closed_form_global(4),
        "separable_22": closed_form_separable(2, 2),
    }
    worst_z = 0.0
    for key, target in targets.items():
        run = mc_runs[key]
        worst_z = max(worst_z, abs(run.mean_success - target) / run.stderr_success)
    identical = mc_runs["global_d2_w1"] == mc_runs["global_d2_w4"]
    record(
        "criterion 10: Monte Carlo within 4 stderr of closed forms; workers 1 and 4 bit-identical",
        worst_z <= 4.0 and identical,
        f"max z {worst_z:.2f}, bit-identical {identical}",
    )


def test_criterion_11_moment_oracle():
    gap1 = moment_check(1, 2, MC_SAMPLES, seed=4141)
    gap2 = moment_check(2, 2, MC_SAMPLES, seed=4242)
    record("criterion 11: empirical moments within 0.02/0.03 of the symmetric averages",
           gap1 <= 0.02 and gap2 <= 0.03, f"first {gap1:.4f}, second {gap2:.4f}")
