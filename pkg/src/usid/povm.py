"""Construction and validation of the identification measurements.

Builds the optimal global three-outcome measurement, the six-coefficient
separable family and its optimum, checks positivity / completeness / the
no-error conditions, and evaluates success probabilities both by exact traces
and by closed formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InfeasibleCoefficients
from .linalg import operator_norm
from .symmetry import (
    SpaceSpec,
    build_DA,
    conjugate_by_transposition,
    embed_party_operator,
    pair_projectors,
    symmetric_subspace_dim,
    young_projectors,
)

POSITIVITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-10
NO_ERROR_TOL = 1e-12
FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class Povm:
    """Three-outcome measurement; ``elements[mu]`` is the operator for outcome mu.

    Outcome 1 and 2 name the first and second reference state, outcome 0 is
    the inconclusive result.
    """

    elements: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __getitem__(self, label: int) -> np.ndarray:
        return self.elements[label]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


@dataclass(frozen=True)
class SeparableCoefficients:
    """Nonnegative weights of the six-term separable measurement ansatz."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    beta1: float
    beta2: float

    @property
    def beta(self) -> float:
        return (self.beta1 + self.beta2) / 2.0

    @property
    def delta(self) -> float:
        return (self.beta1 - self.beta2) / 2.0

    @property
    def alphas(self) -> tuple[float, float, float, float]:
        return (self.alpha1, self.alpha2, self.alpha3, self.alpha4)

    def max_block_eigenvalue(self) -> float:
        """Largest eigenvalue of the mixed-mixed block operator for these betas."""
        return 1.25 * self.beta + math.sqrt(0.5625 * self.beta**2 + self.delta**2)

    def is_feasible(self, tol: float = FEASIBILITY_TOL) -> bool:
        """Whether the inconclusive element stays positive semidefinite."""
        coeffs = self.alphas + (self.beta1, self.beta2)
        if min(coeffs) < -tol:
            return False
        if max(self.alphas) > 2.0 / 3.0 + tol:
            return False
        return self.max_block_eigenvalue() <= 1.0 + tol

    @classmethod
    def optimal(cls) -> "SeparableCoefficients":
        """The coefficients maximizing the separable success probability."""
        two_thirds = 2.0 / 3.0
        return cls(two_thirds, two_thirds, two_thirds, two_thirds, 0.5, 0.5)


@dataclass(frozen=True)
class ValidationReport:
    """Positivity, completeness and no-error diagnostics of a measurement."""

    min_eigenvalues: tuple[float, float, float]
    completeness_residual: float
    no_error_residuals: tuple[float, float]  # (|E1 S(02)|, |E2 S(01)|)
    passed: bool


def closed_form_global(d: int) -> float:
    """Optimal mean success probability of the global scheme, (d-1)/(3d)."""
    if d < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {d}")
    return (d - 1) / (3.0 * d)


def closed_form_separable(d_a: int, d_b: int) -> float:
    """Optimal mean success probability of the separable/LOCC scheme."""
    if d_a < 1 or d_b < 1:
        raise DimensionMismatch(f"party dimensions must be >= 1, got ({d_a}, {d_b})")
    da2, db2 = d_a * d_a, d_b * d_b
    return (11.0 * da2 * db2 + da2 + db2 - 13.0) / (36.0 * d_a * d_b * (d_a * d_b + 1))


def x_spectrum(beta1: float, beta2: float) -> tuple[float, float, float, float]:
    """Analytic eigenvalues (0, 3*beta/2, lambda+, lambda-) of the mixed-mixed block.

    Each value occurs on every 4-dimensional block of the mixed-mixed sector,
    so its total multiplicity is (dim V_M^a / 2) * (dim V_M^b / 2).
    """
    beta = (beta1 + beta2) / 2.0
    delta = (beta1 - beta2) / 2.0
    root = math.sqrt(0.5625 * beta**2 + delta**2)
    return (0.0, 1.5 * beta, 1.25 * beta + root, 1.25 * beta - root)


def _party_blocks(d_p: int):
    """Per-party projector products used by the separable construction."""
    s3, a3, m3 = young_projectors(d_p)
    s01, a01 = pair_projectors(0, 1, d_p)
    s02, a02 = pair_projectors(0, 2, d_p)
    return {
        "S3": s3,
        "A3": a3,
        "MS01": m3 @ s01,
        "MA01": m3 @ a01,
        "MS02": m3 @ s02,
        "MA02": m3 @ a02,
    }


def global_optimal_povm(d: int) -> Povm:
    """The optimal global measurement on (C^d)^(x3).

    Outcome elements: E1 = (2/3) M3 A(02), E2 = (2/3) M3 A(01) and
    E0 = (1/3) M3 (1 + 2A) + S3 + A3.
    """
    if d < 2:
        raise DimensionMismatch(f"global scheme needs d >= 2, got {d}")
    s3, a3, m3 = young_projectors(d)
    _, a01 = pair_projectors(0, 1, d)
    _, a02 = pair_projectors(0, 2, d)
    _, avg = build_DA(d)
    e1 = (2.0 / 3.0) * (m3 @ a02)
    e2 = (2.0 / 3.0) * (m3 @ a01)
    e0 = (m3 @ (np.eye(d**3, dtype=complex) + 2.0 * avg)) / 3.0 + s3 + a3
    return Povm((e0, e1, e2))


def separable_povm(spec: SpaceSpec, coeffs: SeparableCoefficients) -> Povm:
    """Separable measurement with the given six-term coefficients.

    Raises InfeasibleCoefficients when the inconclusive element would acquire
    a negative eigenvalue.
    """
    if not coeffs.is_feasible():
        raise InfeasibleCoefficients(
            f"coefficients {coeffs} violate positivity "
            f"(alphas <= 2/3 and block eigenvalue {coeffs.max_block_eigenvalue():.6f} <= 1 required)"
        )
    blk_a = _party_blocks(spec.d_a)
    blk_b = _party_blocks(spec.d_b)

    def term(weight: float, op_a: str, op_b: str) -> np.ndarray:
        return weight * (
            embed_party_operator(blk_a[op_a], "a", spec)
            @ embed_party_operator(blk_b[op_b], "b", spec)
        )

    e1 = (
        term(coeffs.alpha1, "S3", "MA02")
        + term(coeffs.alpha2, "A3", "MS02")
        + term(coeffs.alpha3, "MS02", "A3")
        + term(coeffs.alpha4, "MA02", "S3")
        + term(coeffs.beta1, "MS02", "MA02")
        + term(coeffs.beta2, "MA02", "MS02")
    )
    e2 = conjugate_by_transposition(e1, 1, 2, spec.d)
    e0 = np.eye(spec.d**3, dtype=complex) - e1 - e2
    return Povm((e0, e1, e2))


def optimal_separable_povm(spec: SpaceSpec) -> Povm:
    """The separable measurement at the extremal coefficients."""
    return separable_povm(spec, SeparableCoefficients.optimal())


def x_operator(spec: SpaceSpec, beta1: float, beta2: float) -> np.ndarray:
    """Mixed-mixed block operator embedded in the global space (zero elsewhere).

    Its nonzero spectrum is the ``x_spectrum`` multiset, each value with
    multiplicity (dim V_M^a / 2) * (dim V_M^b / 2).
    """
    blk_a = _party_blocks(spec.d_a)
    blk_b = _party_blocks(spec.d_b)

    def pair(op_a: str, op_b: str) -> np.ndarray:
        return embed_party_operator(blk_a[op_a], "a", spec) @ embed_party_operator(
            blk_b[op_b], "b", spec
        )

    return beta1 * (pair("MS02", "MA02") + pair("MS01", "MA01")) + beta2 * (
        pair("MA02", "MS02") + pair("MA01", "MS01")
    )


def exact_success_probability(povm: Povm, spec: SpaceSpec) -> float:
    """Mean success probability over unitary-invariant reference pairs.

    Computed from the exact trace form
    p = (tr[E1 S(01)] + tr[E2 S(02)]) / (2 d_2 d_1).
    """
    d = spec.d
    if povm.dim != d**3:
        raise DimensionMismatch(f"measurement dimension {povm.dim} != d^3 = {d**3}")
    s01, _ = pair_projectors(0, 1, d)
    s02, _ = pair_projectors(0, 2, d)
    t1 = np.einsum("ij,ji->", povm[1], s01).real
    t2 = np.einsum("ij,ji->", povm[2], s02).real
    d1 = symmetric_subspace_dim(1, d)
    d2 = symmetric_subspace_dim(2, d)
    return float((t1 + t2) / (2.0 * d2 * d1))


def validate(povm: Povm, spec: SpaceSpec) -> ValidationReport:
    """Check positivity, completeness and the no-error conditions."""
    d = spec.d
    if povm.dim != d**3:
        raise DimensionMismatch(f"measurement dimension {povm.dim} != d^3 = {d**3}")
    min_eigs = tuple(float(np.linalg.eigvalsh(povm[mu])[0]) for mu in (0, 1, 2))
    total = povm[0] + povm[1] + povm[2]
    completeness = operator_norm(total - np.eye(d**3))
    s01, _ = pair_projectors(0, 1, d)
    s02, _ = pair_projectors(0, 2, d)
    no_error = (operator_norm(povm[1] @ s02), operator_norm(povm[2] @ s01))
    passed = (
        min(min_eigs) >= -POSITIVITY_TOL
        and completeness <= COMPLETENESS_TOL
        and max(no_error) <= NO_ERROR_TOL
    )
    return ValidationReport(min_eigs, completeness, no_error, passed)
