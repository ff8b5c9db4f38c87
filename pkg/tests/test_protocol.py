"""Tests for the protocol tree, its induced measurement and run simulation."""

import itertools

import numpy as np
import pytest

from usid.errors import DimensionMismatch
from usid.linalg import operator_norm
from usid.montecarlo import haar_state, sample_rng
from usid.povm import optimal_separable_povm
from usid.protocol import (
    Sector,
    build_protocol,
    final_label,
    induced_povm,
    run_protocol_trials,
    simulate_run,
    verify_equivalence,
)
from usid.symmetry import SpaceSpec, embed_party_operator, pair_projectors, young_projectors


@pytest.fixture(scope="module")
def tree22():
    return build_protocol(SpaceSpec(2, 2))


class TestTreeStructure:
    def test_step_completeness(self, tree22):
        spec = tree22.spec
        for step in tree22.steps():
            d_p = spec.party_dim(step.party)
            total = sum(step.elements)
            if step.step_id.startswith("sector"):
                target = np.eye(d_p**3)
            else:
                target = young_projectors(d_p)[2]
            assert operator_norm(total - target) <= 1e-12, step.step_id

    def test_confirmation_steps_are_orthogonal_projectors(self, tree22):
        branch = tree22.branches[(Sector.MIXED, Sector.MIXED)]
        for step in branch.conditional.values():
            f1, f2 = step.elements
            assert operator_norm(f1 @ f1 - f1) <= 1e-12
            assert operator_norm(f2 @ f2 - f2) <= 1e-12
            assert operator_norm(f1 @ f2) <= 1e-12
            assert operator_norm(f1 + f2 - young_projectors(tree22.spec.d_b)[2]) <= 1e-12

    def test_antisymmetric_sector_empty_for_qubit_party(self, tree22):
        a3 = tree22.sector_projector("a", Sector.ANTISYMMETRIC)
        assert operator_norm(a3) == 0.0

    def test_branch_table_covers_all_sector_pairs(self, tree22):
        assert set(tree22.branches) == set(itertools.product(Sector, Sector))

    def test_commuting_along_every_leaf_path(self, tree22):
        # the operators encountered on any single execution path commute
        # after embedding (different outcomes of one step never co-occur)
        emb = tree22.embedded
        order = list(tree22.alice_sector.outcomes)
        for (sa, sb), branch in tree22.branches.items():
            base = [
                emb["sector_a"].operators[order.index(sa)],
                emb["sector_b"].operators[order.index(sb)],
            ]
            paths = [base]
            if branch.first is not None:
                first_ops = emb[branch.first.step_id].operators
                paths = []
                for outcome, op in zip(branch.first.outcomes, first_ops):
                    if branch.conditional is None:
                        paths.append(base + [op])
                        continue
                    second = branch.conditional[outcome[0]]
                    for f_op in emb[second.step_id].operators:
                        paths.append(base + [op, f_op])
            for path in paths:
                for x, y in itertools.combinations(path, 2):
                    assert operator_norm(x @ y - y @ x) <= 1e-12


class TestInducedPovm:
    @pytest.mark.parametrize("spec", [SpaceSpec(2, 2), SpaceSpec(2, 3), SpaceSpec(1, 2)])
    def test_matches_separable_optimum(self, spec):
        tree = build_protocol(spec)
        induced = induced_povm(tree)
        target = optimal_separable_povm(spec)
        for mu in range(3):
            assert operator_norm(induced[mu] - target[mu]) <= 1e-10

    def test_leaves_sum_to_identity(self, tree22):
        induced = induced_povm(tree22)
        total = induced[0] + induced[1] + induced[2]
        assert operator_norm(total - np.eye(tree22.spec.d**3)) <= 1e-10

    def test_symmetric_mixed_branch_term(self, tree22):
        # label-1 leaf of the (S, M) branch is (2/3) S3^a (x) M3^b A^b(02)
        spec = tree22.spec
        branch = tree22.branches[(Sector.SYMMETRIC, Sector.MIXED)]
        idx = branch.first.outcomes.index(1)
        leaf = (
            tree22.sector_projector("a", Sector.SYMMETRIC),
            branch.first.elements[idx],
        )
        got = embed_party_operator(leaf[0], "a", spec) @ embed_party_operator(leaf[1], "b", spec)
        s3_a = young_projectors(spec.d_a)[0]
        m3_b = young_projectors(spec.d_b)[2]
        _, a02_b = pair_projectors(0, 2, spec.d_b)
        expected = (2.0 / 3.0) * (
            embed_party_operator(s3_a, "a", spec)
            @ embed_party_operator(m3_b @ a02_b, "b", spec)
        )
        assert operator_norm(got - expected) <= 1e-12

    def test_equivalence_report(self, tree22):
        report = verify_equivalence(tree22)
        assert report.max_element_residual <= 1e-10
        assert abs(report.probability_gap) <= 1e-10

    def test_equivalence_at_2_3(self):
        report = verify_equivalence(build_protocol(SpaceSpec(2, 3)))
        assert report.max_element_residual <= 1e-10
        assert abs(report.probability_gap) <= 1e-10


class TestSimulateRun:
    def test_rejects_wrong_dimension(self, tree22):
        rng = np.random.default_rng(0)
        phi = haar_state(2, rng)
        with pytest.raises(DimensionMismatch):
            simulate_run(tree22, phi, phi, phi, rng)

    def test_transcript_structure(self, tree22):
        rng = np.random.default_rng(1)
        phi1 = haar_state(4, rng)
        phi2 = haar_state(4, rng)
        transcript = simulate_run(tree22, phi1, phi1, phi2, rng)
        assert transcript.events[0][:2] == ("a", "sector_a")
        assert transcript.events[1][:2] == ("b", "sector_b")
        assert transcript.final_label in (0, 1, 2)
        path = transcript.branch_path()
        assert path[:2] == transcript.sectors[0].value + transcript.sectors[1].value

    def test_no_misidentification_when_input_is_first(self, tree22):
        for idx in range(300):
            rng = sample_rng(71, idx)
            phi1 = haar_state(4, rng)
            phi2 = haar_state(4, rng)
            transcript = simulate_run(tree22, phi1, phi1, phi2, rng)
            assert transcript.final_label != 2

    def test_no_misidentification_when_input_is_second(self, tree22):
        for idx in range(300):
            rng = sample_rng(73, idx)
            phi1 = haar_state(4, rng)
            phi2 = haar_state(4, rng)
            transcript = simulate_run(tree22, phi2, phi1, phi2, rng)
            assert transcript.final_label != 1

    def test_statistics_match_induced_povm(self, tree22):
        # empirical label frequencies against <psi| E_mu |psi> for five fixed
        # pairs, 2e4 runs each (1e5 runs total)
        induced = induced_povm(tree22)
        n_runs = 20000
        for pair_seed in (11, 12, 13, 14, 15):
            pair_rng = sample_rng(pair_seed, 0)
            phi1 = haar_state(4, pair_rng)
            phi2 = haar_state(4, pair_rng)
            psi = np.kron(np.kron(phi1, phi1), phi2)
            expected = np.array(
                [float(np.vdot(psi, induced[mu] @ psi).real) for mu in range(3)]
            )
            counts = np.zeros(3)
            for idx in range(n_runs):
                transcript = simulate_run(tree22, phi1, phi1, phi2, sample_rng(1000 + pair_seed, idx))
                counts[transcript.final_label] += 1
            freqs = counts / n_runs
            sigma = np.sqrt(np.maximum(expected * (1 - expected), 1e-12) / n_runs)
            assert np.all(np.abs(freqs - expected) <= 4.0 * sigma + 1e-9)

    def test_unreachable_sector_pairs_have_zero_weight(self):
        # the symmetric/antisymmetric sector pairs lie in the totally
        # antisymmetric global sector, which valid inputs never populate
        spec = SpaceSpec(2, 3)
        s3_a, a3_a, _ = young_projectors(spec.d_a)
        s3_b, a3_b, _ = young_projectors(spec.d_b)
        weight_ops = (
            embed_party_operator(s3_a, "a", spec) @ embed_party_operator(a3_b, "b", spec),
            embed_party_operator(a3_a, "a", spec) @ embed_party_operator(s3_b, "b", spec),
        )
        for idx in range(50):
            rng = sample_rng(55, idx)
            phi1 = haar_state(spec.d, rng)
            phi2 = haar_state(spec.d, rng)
            for phi_in in (phi1, phi2):
                psi = np.kron(np.kron(phi_in, phi1), phi2)
                for op in weight_ops:
                    assert abs(np.vdot(psi, op @ psi).real) <= 1e-14

        tree = build_protocol(spec)
        for idx in range(200):
            rng = sample_rng(57, idx)
            phi1 = haar_state(spec.d, rng)
            phi2 = haar_state(spec.d, rng)
            transcript = simulate_run(tree, phi1, phi1, phi2, rng)
            assert transcript.sectors not in (
                (Sector.SYMMETRIC, Sector.ANTISYMMETRIC),
                (Sector.ANTISYMMETRIC, Sector.SYMMETRIC),
            )


class TestRunTrials:
    def test_no_misidentification(self, tree22):
        stats, records = run_protocol_trials(tree22, 1000, seed=3)
        assert stats.misidentification_count == 0
        assert stats.n_trials == 1000
        assert len(records) == 1000
        assert sum(stats.label_counts) == 1000

    def test_exchange_symmetric_label_frequencies(self, tree22):
        # labels 1 and 2 are equally likely over symmetric preparation
        stats, _ = run_protocol_trials(tree22, 20000, seed=9)
        n1, n2 = stats.label_counts[1], stats.label_counts[2]
        total = n1 + n2
        assert abs(n1 - n2) <= 4.0 * np.sqrt(total / 4.0) + 1.0

    def test_success_rate_near_closed_form(self, tree22):
        from usid.povm import closed_form_separable

        stats, _ = run_protocol_trials(tree22, 20000, seed=13)
        p = closed_form_separable(2, 2)
        rate = stats.success_count / stats.n_trials
        assert abs(rate - p) <= 4.0 * np.sqrt(p * (1 - p) / stats.n_trials)

    def test_worker_count_invariance(self, tree22):
        stats1, records1 = run_protocol_trials(tree22, 300, seed=21, workers=1)
        stats4, records4 = run_protocol_trials(tree22, 300, seed=21, workers=4)
        assert stats1 == stats4
        assert records1 == records4

    def test_degenerate_party_runs(self):
        tree = build_protocol(SpaceSpec(1, 2))
        stats, _ = run_protocol_trials(tree, 200, seed=1)
        assert stats.misidentification_count == 0


class TestFinalLabel:
    def test_leaf(self):
        assert final_label((Sector.SYMMETRIC, Sector.SYMMETRIC), ()) == 0

    def test_single_step(self):
        assert final_label((Sector.SYMMETRIC, Sector.MIXED), (1,)) == 1
        assert final_label((Sector.MIXED, Sector.ANTISYMMETRIC), (0,)) == 0

    def test_mixed_mixed_agreement(self):
        mm = (Sector.MIXED, Sector.MIXED)
        assert final_label(mm, ((1, 2), 2)) == 1
        assert final_label(mm, ((2, 1), 1)) == 2
        assert final_label(mm, ((1, 2), 1)) == 0
        assert final_label(mm, ((2, 2), 1)) == 0
