"""Two-party measurement protocol attaining the separable optimum.

The protocol tree: both parties first measure the permutation sector of their
own three factors.  Symmetric/symmetric and antisymmetric/antisymmetric pairs
end inconclusive; a mixed party opposite a symmetric (antisymmetric) party
finishes with a local three-outcome POVM (its primed variant); when both are
mixed, Alice applies a four-outcome POVM tagging a candidate label and a pair
orientation, Bob confirms with a conditional projective measurement, and the
candidate label stands only when the tags agree.

All measurement operators along any branch commute after embedding, so the
branch statistics equal the expectations of the accumulated products and are
independent of the post-measurement convention (the square-root instrument is
used here).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, NumericalUnderflow, ZeroSamples
from .linalg import operator_norm, psd_sqrt
from .montecarlo import haar_state, sample_rng
from .povm import Povm, closed_form_separable, exact_success_probability, optimal_separable_povm
from .symmetry import (
    Sector,
    SpaceSpec,
    build_DA,
    embed_party_operator,
    pair_projectors,
    young_projectors,
)

UNDERFLOW_TOL = 1e-14

SECTOR_ORDER = (Sector.SYMMETRIC, Sector.MIXED, Sector.ANTISYMMETRIC)


@dataclass(frozen=True)
class MeasurementStep:
    """One party-local measurement: ordered outcomes and their operators.

    Operators act on the party's own triple space ``(C^{d_p})^(x3)``; the
    outcome order is the sampling order of the inverse-CDF draw.
    """

    party: str
    step_id: str
    kind: str  # "projective" | "general"
    outcomes: tuple
    elements: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Branch:
    """Follow-up plan for one pair of sector outcomes.

    ``first`` is None for immediate inconclusive leaves; ``conditional`` maps
    the leading entry of ``first``'s outcome to the other party's final step
    (only the mixed/mixed branch uses it).
    """

    sectors: tuple[Sector, Sector]
    first: MeasurementStep | None = None
    conditional: Mapping[int, MeasurementStep] | None = None


@dataclass(frozen=True)
class Transcript:
    """Ordered record of one protocol run."""

    events: tuple[tuple[str, str, object], ...]  # (party, step_id, outcome)
    sectors: tuple[Sector, Sector]
    final_label: int

    def branch_path(self) -> str:
        """Compact path string: sector letters, then follow-up outcome codes."""
        parts = [self.sectors[0].value + self.sectors[1].value]
        for _, _, outcome in self.events[2:]:
            if isinstance(outcome, tuple):
                parts.append("".join(str(x) for x in outcome))
            else:
                parts.append(str(outcome))
        return ":".join(parts)


@dataclass(frozen=True)
class _EmbeddedStep:
    """Step operators embedded in the global space with cached square roots."""

    operators: tuple[np.ndarray, ...]
    sqrts: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class ProtocolTree:
    """Immutable protocol plan plus cached embedded operators."""

    spec: SpaceSpec
    alice_sector: MeasurementStep
    bob_sector: MeasurementStep
    branches: Mapping[tuple[Sector, Sector], Branch]
    embedded: Mapping[str, _EmbeddedStep] = field(repr=False, default_factory=dict)

    def steps(self) -> list[MeasurementStep]:
        out = [self.alice_sector, self.bob_sector]
        for branch in self.branches.values():
            if branch.first is not None:
                out.append(branch.first)
            if branch.conditional is not None:
                out.extend(branch.conditional.values())
        return out

    def sector_projector(self, party: str, sector: Sector) -> np.ndarray:
        step = self.alice_sector if party == "a" else self.bob_sector
        return step.elements[step.outcomes.index(sector)]


def _sector_step(party: str, d_p: int) -> MeasurementStep:
    s3, a3, m3 = young_projectors(d_p)
    by_sector = {Sector.SYMMETRIC: s3, Sector.MIXED: m3, Sector.ANTISYMMETRIC: a3}
    return MeasurementStep(
        party=party,
        step_id=f"sector_{party}",
        kind="projective",
        outcomes=SECTOR_ORDER,
        elements=tuple(by_sector[s] for s in SECTOR_ORDER),
    )


def _mixed_povm(party: str, d_p: int, primed: bool) -> MeasurementStep:
    """Three-outcome POVM on the mixed sector; the primed variant swaps the
    pair-symmetry roles (used when the other party is antisymmetric)."""
    _, _, m3 = young_projectors(d_p)
    s01, a01 = pair_projectors(0, 1, d_p)
    s02, a02 = pair_projectors(0, 2, d_p)
    _, avg = build_DA(d_p)
    eye = np.eye(d_p**3, dtype=complex)
    if primed:
        e1 = (2.0 / 3.0) * (m3 @ s02)
        e2 = (2.0 / 3.0) * (m3 @ s01)
        e0 = (m3 @ (eye - 2.0 * avg)) / 3.0
    else:
        e1 = (2.0 / 3.0) * (m3 @ a02)
        e2 = (2.0 / 3.0) * (m3 @ a01)
        e0 = (m3 @ (eye + 2.0 * avg)) / 3.0
    suffix = "_primed" if primed else ""
    return MeasurementStep(
        party=party,
        step_id=f"mixed_povm{suffix}_{party}",
        kind="general",
        outcomes=(0, 1, 2),
        elements=(e0, e1, e2),
    )


def _tag_povm(party: str, d_p: int) -> MeasurementStep:
    """Alice's four-outcome POVM in the mixed/mixed branch.

    Outcome (a1, a2): a1 is the candidate label, a2 the pair-orientation tag.
    """
    _, _, m3 = young_projectors(d_p)
    s01, a01 = pair_projectors(0, 1, d_p)
    s02, a02 = pair_projectors(0, 2, d_p)
    return MeasurementStep(
        party=party,
        step_id=f"tag_povm_{party}",
        kind="general",
        outcomes=((1, 1), (1, 2), (2, 1), (2, 2)),
        elements=(
            0.5 * (m3 @ a02),
            0.5 * (m3 @ s02),
            0.5 * (m3 @ a01),
            0.5 * (m3 @ s01),
        ),
    )


def _confirm_step(party: str, d_p: int, primed: bool) -> MeasurementStep:
    """Bob's conditional projective confirmation in the mixed/mixed branch."""
    _, _, m3 = young_projectors(d_p)
    s01, a01 = pair_projectors(0, 1, d_p)
    s02, a02 = pair_projectors(0, 2, d_p)
    suffix = "_primed" if primed else ""
    s, a = (s01, a01) if primed else (s02, a02)
    return MeasurementStep(
        party=party,
        step_id=f"confirm{suffix}_{party}",
        kind="projective",
        outcomes=(1, 2),
        elements=(m3 @ s, m3 @ a),
    )


def build_protocol(spec: SpaceSpec) -> ProtocolTree:
    """Build the protocol tree for a bipartite space, with operator caches."""
    alice_sector = _sector_step("a", spec.d_a)
    bob_sector = _sector_step("b", spec.d_b)

    S, M, A = Sector.SYMMETRIC, Sector.MIXED, Sector.ANTISYMMETRIC
    confirm = _confirm_step("b", spec.d_b, primed=False)
    confirm_primed = _confirm_step("b", spec.d_b, primed=True)
    branches = {
        (S, S): Branch(sectors=(S, S)),
        (A, A): Branch(sectors=(A, A)),
        # unreachable on valid inputs: the states carry no totally
        # antisymmetric component, kept to assert their weight vanishes
        (S, A): Branch(sectors=(S, A)),
        (A, S): Branch(sectors=(A, S)),
        (S, M): Branch(sectors=(S, M), first=_mixed_povm("b", spec.d_b, primed=False)),
        (A, M): Branch(sectors=(A, M), first=_mixed_povm("b", spec.d_b, primed=True)),
        (M, S): Branch(sectors=(M, S), first=_mixed_povm("a", spec.d_a, primed=False)),
        (M, A): Branch(sectors=(M, A), first=_mixed_povm("a", spec.d_a, primed=True)),
        (M, M): Branch(
            sectors=(M, M),
            first=_tag_povm("a", spec.d_a),
            conditional={1: confirm, 2: confirm_primed},
        ),
    }

    tree = ProtocolTree(
        spec=spec,
        alice_sector=alice_sector,
        bob_sector=bob_sector,
        branches=branches,
        embedded={},
    )
    for step in tree.steps():
        if step.step_id in tree.embedded:
            continue
        ops = tuple(embed_party_operator(e, step.party, spec) for e in step.elements)
        sqrts = tuple(
            embed_party_operator(psd_sqrt(e), step.party, spec) for e in step.elements
        )
        tree.embedded[step.step_id] = _EmbeddedStep(operators=ops, sqrts=sqrts)
    return tree


def final_label(sectors: tuple[Sector, Sector], outcomes: tuple) -> int:
    """Final label rule: leaf sectors give 0, a single follow-up outcome is the
    label, and in the mixed/mixed branch the candidate stands iff the tags agree."""
    if not outcomes:
        return 0
    if len(outcomes) == 1:
        return int(outcomes[0])
    (a1, a2), b = outcomes
    return int(a1) if a2 == b else 0


def induced_povm(tree: ProtocolTree) -> Povm:
    """Accumulate every leaf's operator product into the effective global POVM."""
    d3 = tree.spec.d**3
    acc = [np.zeros((d3, d3), dtype=complex) for _ in range(3)]
    emb = tree.embedded
    for (sa, sb), branch in tree.branches.items():
        base = (
            emb["sector_a"].operators[SECTOR_ORDER.index(sa)]
            @ emb["sector_b"].operators[SECTOR_ORDER.index(sb)]
        )
        if branch.first is None:
            acc[0] += base
            continue
        first_ops = emb[branch.first.step_id].operators
        if branch.conditional is None:
            for outcome, op in zip(branch.first.outcomes, first_ops):
                acc[final_label(branch.sectors, (outcome,))] += base @ op
            continue
        for outcome, op in zip(branch.first.outcomes, first_ops):
            second = branch.conditional[outcome[0]]
            second_ops = emb[second.step_id].operators
            for b_outcome, f_op in zip(second.outcomes, second_ops):
                label = final_label(branch.sectors, (outcome, b_outcome))
                acc[label] += base @ op @ f_op
    return Povm(tuple(acc))


def _measure(
    tree: ProtocolTree,
    step: MeasurementStep,
    psi: np.ndarray,
    rng: np.random.Generator,
    events: list,
):
    """Sample one step, update the state with the square-root instrument.

    Outcomes whose probability falls below ``UNDERFLOW_TOL`` are excluded from
    the draw; if everything underflows the state has no support left and
    NumericalUnderflow is raised.
    """
    cache = tree.embedded[step.step_id]
    probs = np.array([max(float(np.vdot(psi, op @ psi).real), 0.0) for op in cache.operators])
    probs[probs < UNDERFLOW_TOL] = 0.0
    total = probs.sum()
    if total <= 0.0:
        raise NumericalUnderflow(f"all outcome probabilities underflowed at step {step.step_id}")
    u = rng.random() * total
    cumulative = np.cumsum(probs)
    k = min(int(np.searchsorted(cumulative, u, side="right")), len(probs) - 1)
    if probs[k] == 0.0:  # rounding edge: fall back to the last live outcome
        k = int(np.max(np.nonzero(probs)))
    psi = cache.sqrts[k] @ psi
    psi = psi / np.linalg.norm(psi)
    outcome = step.outcomes[k]
    events.append((step.party, step.step_id, outcome))
    return psi, outcome


def simulate_run(
    tree: ProtocolTree,
    phi_in: np.ndarray,
    phi1: np.ndarray,
    phi2: np.ndarray,
    rng: np.random.Generator,
) -> Transcript:
    """Simulate one round-by-round run on the input ``phi_in (x) phi1 (x) phi2``."""
    d = tree.spec.d
    for phi in (phi_in, phi1, phi2):
        if np.asarray(phi).shape != (d,):
            raise DimensionMismatch(f"state vectors must have length d = {d}")
    psi = np.kron(np.kron(np.asarray(phi_in, complex), np.asarray(phi1, complex)),
                  np.asarray(phi2, complex))
    events: list = []
    psi, sa = _measure(tree, tree.alice_sector, psi, rng, events)
    psi, sb = _measure(tree, tree.bob_sector, psi, rng, events)
    branch = tree.branches[(sa, sb)]
    outcomes: tuple = ()
    if branch.first is not None:
        psi, first_outcome = _measure(tree, branch.first, psi, rng, events)
        outcomes = (first_outcome,)
        if branch.conditional is not None:
            second = branch.conditional[first_outcome[0]]
            psi, second_outcome = _measure(tree, second, psi, rng, events)
            outcomes = (first_outcome, second_outcome)
    return Transcript(
        events=tuple(events),
        sectors=(sa, sb),
        final_label=final_label((sa, sb), outcomes),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Residuals between the protocol-induced POVM and the separable optimum."""

    element_residuals: tuple[float, float, float]
    probability_gap: float

    @property
    def max_element_residual(self) -> float:
        return max(self.element_residuals)


def verify_equivalence(tree: ProtocolTree) -> EquivalenceReport:
    """Compare the induced POVM against the closed-form separable optimum."""
    induced = induced_povm(tree)
    target = optimal_separable_povm(tree.spec)
    residuals = tuple(operator_norm(induced[mu] - target[mu]) for mu in (0, 1, 2))
    gap = exact_success_probability(induced, tree.spec) - closed_form_separable(
        tree.spec.d_a, tree.spec.d_b
    )
    return EquivalenceReport(element_residuals=residuals, probability_gap=float(gap))


@dataclass(frozen=True)
class TrialRecord:
    """One protocol trial: which reference was prepared and the transcript."""

    index: int
    prepared: int
    transcript: Transcript


@dataclass(frozen=True)
class ProtocolStats:
    """Aggregate counts over protocol trials."""

    n_trials: int
    label_counts: tuple[int, int, int]
    success_count: int
    misidentification_count: int
    seed: int


def run_protocol_trials(
    tree: ProtocolTree, n_trials: int, seed: int, workers: int = 1
) -> tuple[ProtocolStats, list[TrialRecord]]:
    """Run repeated protocol trials on fresh unitary-invariant reference pairs.

    Each trial draws its references and the prepared-input coin from the
    substream of (seed, trial index), then consumes the same substream for the
    measurement outcomes; results are worker-count independent.
    """
    if n_trials < 1:
        raise ZeroSamples(f"n_trials must be >= 1, got {n_trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    d = tree.spec.d
    records: list[TrialRecord | None] = [None] * n_trials

    def fill(worker: int) -> None:
        for idx in range(worker, n_trials, workers):
            rng = sample_rng(seed, idx)
            phi1 = haar_state(d, rng)
            phi2 = haar_state(d, rng)
            prepared = int(rng.integers(1, 3))
            phi_in = phi1 if prepared == 1 else phi2
            transcript = simulate_run(tree, phi_in, phi1, phi2, rng)
            records[idx] = TrialRecord(index=idx, prepared=prepared, transcript=transcript)

    if workers == 1:
        fill(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(workers)))

    labels = [0, 0, 0]
    success = 0
    misident = 0
    for record in records:
        label = record.transcript.final_label
        labels[label] += 1
        if label == record.prepared:
            success += 1
        elif label != 0:
            misident += 1
    return (
        ProtocolStats(
            n_trials=n_trials,
            label_counts=tuple(labels),
            success_count=success,
            misidentification_count=misident,
            seed=seed,
        ),
        records,
    )
