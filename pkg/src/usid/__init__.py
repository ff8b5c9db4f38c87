"""Measurement schemes for unambiguous identification of two bipartite pure states.

Given one copy each of two independent unitary-invariant reference states and
an input promised to equal one of them, the library constructs the optimal
global three-outcome measurement and the optimal separable measurement,
implements the two-party protocol that attains the separable bound, and
verifies every operator identity and closed-form probability numerically.
"""

from .errors import (
    BadSystemIndex,
    DimensionMismatch,
    InfeasibleCoefficients,
    NonHermitianInput,
    NotPositive,
    NumericalUnderflow,
    UsidError,
    ZeroSamples,
)
from .linalg import (
    EigenDecomposition,
    hermitian_eig,
    kron,
    operator_norm,
    psd_sqrt,
)
from .montecarlo import (
    McReport,
    haar_state,
    haar_unitary,
    instance_probabilities,
    moment_check,
    run_monte_carlo,
    sample_rng,
)
from .povm import (
    Povm,
    SeparableCoefficients,
    ValidationReport,
    closed_form_global,
    closed_form_separable,
    exact_success_probability,
    global_optimal_povm,
    optimal_separable_povm,
    separable_povm,
    validate,
    x_operator,
    x_spectrum,
)
from .protocol import (
    Branch,
    EquivalenceReport,
    MeasurementStep,
    ProtocolStats,
    ProtocolTree,
    Transcript,
    TrialRecord,
    build_protocol,
    induced_povm,
    run_protocol_trials,
    simulate_run,
    verify_equivalence,
)
from .symmetry import (
    DimensionTable,
    Sector,
    SpaceSpec,
    build_DA,
    dimension_identity_gap,
    embed_party_operator,
    pair_projectors,
    permutation_operator,
    sector_dims,
    symmetric_subspace_dim,
    symmetrizer,
    transposition,
    young_projectors,
)

__all__ = [
    "BadSystemIndex",
    "Branch",
    "DimensionMismatch",
    "DimensionTable",
    "EigenDecomposition",
    "EquivalenceReport",
    "InfeasibleCoefficients",
    "McReport",
    "MeasurementStep",
    "NonHermitianInput",
    "NotPositive",
    "NumericalUnderflow",
    "Povm",
    "ProtocolStats",
    "ProtocolTree",
    "Sector",
    "SeparableCoefficients",
    "SpaceSpec",
    "Transcript",
    "TrialRecord",
    "UsidError",
    "ValidationReport",
    "ZeroSamples",
    "build_DA",
    "build_protocol",
    "closed_form_global",
    "closed_form_separable",
    "dimension_identity_gap",
    "embed_party_operator",
    "exact_success_probability",
    "global_optimal_povm",
    "haar_state",
    "haar_unitary",
    "hermitian_eig",
    "induced_povm",
    "instance_probabilities",
    "kron",
    "moment_check",
    "operator_norm",
    "optimal_separable_povm",
    "pair_projectors",
    "permutation_operator",
    "psd_sqrt",
    "run_monte_carlo",
    "run_protocol_trials",
    "sample_rng",
    "sector_dims",
    "separable_povm",
    "simulate_run",
    "symmetric_subspace_dim",
    "symmetrizer",
    "transposition",
    "validate",
    "verify_equivalence",
    "x_operator",
    "x_spectrum",
    "young_projectors",
]

__version__ = "0.1.0"
