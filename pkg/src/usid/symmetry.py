"""Permutation operators and symmetry projectors on three tensor factors.

Everything acts on ``(C^d)^(x3)`` with basis index ``i0*d^2 + i1*d + i2``
(system 0 most significant).  Permutation operators are built by explicit
basis-index permutation so their entries are exact 0/1, and conjugation by a
transposition or embedding of a party-local operator into the global space is
done by index gymnastics rather than matrix products, which keeps structurally
exact quantities free of rounding noise.

For a bipartite system ``C^d = C^{d_a} (x) C^{d_b}`` each system index splits
as ``i_k = a_k*d_b + b_k``; a party operator acts on the triple of its own
digits and as identity on the other party's.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb

import numpy as np

from .errors import BadSystemIndex, DimensionMismatch

N_SYSTEMS = 3


class Sector(str, Enum):
    """Permutation-symmetry sector of the three-fold tensor space."""

    SYMMETRIC = "S"
    MIXED = "M"
    ANTISYMMETRIC = "A"


@dataclass(frozen=True)
class SpaceSpec:
    """Dimensions of the two parties and the fixed three-system layout."""

    d_a: int
    d_b: int

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise DimensionMismatch(f"party dimensions must be >= 1, got ({self.d_a}, {self.d_b})")

    @property
    def d(self) -> int:
        return self.d_a * self.d_b

    @property
    def n_systems(self) -> int:
        return N_SYSTEMS

    def party_dim(self, party: str) -> int:
        if party == "a":
            return self.d_a
        if party == "b":
            return self.d_b
        raise ValueError(f"party must be 'a' or 'b', got {party!r}")


def symmetric_subspace_dim(n: int, d: int) -> int:
    """Dimension of the totally symmetric subspace of n copies of C^d (exact integer)."""
    return comb(n + d - 1, d - 1)


def sector_dims(d: int) -> tuple[int, int, int]:
    """Exact dimensions (symmetric, antisymmetric, mixed) of the three-fold sectors."""
    dim_s = d * (d + 1) * (d + 2) // 6
    dim_a = d * (d - 1) * (d - 2) // 6
    dim_m = 2 * d * (d * d - 1) // 3
    return dim_s, dim_a, dim_m


def dimension_identity_gap(d_a: int, d_b: int) -> int:
    """Exact-integer defect of the mixed-sector dimension decomposition.

    Twice the global mixed dimension minus twice its expansion into party
    sector products (the half-weighted mixed-mixed term counted once); zero
    iff the identity holds.
    """
    s_a, a_a, m_a = sector_dims(d_a)
    s_b, a_b, m_b = sector_dims(d_b)
    _, _, m = sector_dims(d_a * d_b)
    return 2 * m - 2 * (s_a * m_b + a_a * m_b + m_a * a_b + m_a * s_b) - m_a * m_b


@dataclass(frozen=True)
class DimensionTable:
    """Symmetric-subspace and sector dimensions for a bipartite space."""

    spec: SpaceSpec
    sym_dims: tuple[int, int, int]  # d_1, d_2, d_3 for n = 1, 2, 3 copies of C^d
    global_sectors: tuple[int, int, int]  # (S, A, M)
    party_a_sectors: tuple[int, int, int]
    party_b_sectors: tuple[int, int, int]

    @classmethod
    def from_spec(cls, spec: SpaceSpec) -> "DimensionTable":
        d = spec.d
        return cls(
            spec=spec,
            sym_dims=tuple(symmetric_subspace_dim(n, d) for n in (1, 2, 3)),
            global_sectors=sector_dims(d),
            party_a_sectors=sector_dims(spec.d_a),
            party_b_sectors=sector_dims(spec.d_b),
        )


def _check_system_indices(i: int, j: int) -> None:
    if i == j or not (0 <= i < N_SYSTEMS) or not (0 <= j < N_SYSTEMS):
        raise BadSystemIndex(f"need two distinct system indices in 0..2, got ({i}, {j})")


@lru_cache(maxsize=None)
def _digit_split(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-system digits (i0, i1, i2) of every basis index of (C^d)^(x3)."""
    idx = np.arange(d**3)
    i0, rest = np.divmod(idx, d * d)
    i1, i2 = np.divmod(rest, d)
    return i0, i1, i2


def permutation_index_map(perm: tuple[int, int, int], d: int) -> np.ndarray:
    """Basis-index map of the operator sending system k's state to slot perm[k]."""
    digits = _digit_split(d)
    out = np.zeros(d**3, dtype=np.int64)
    # slot perm[k] receives the digit previously at slot k
    weights = (d * d, d, 1)
    for k in range(N_SYSTEMS):
        out += digits[k] * weights[perm[k]]
    return out


def permutation_operator(perm: tuple[int, int, int], d: int) -> np.ndarray:
    """Exact 0/1 matrix permuting the three tensor factors of (C^d)^(x3)."""
    if sorted(perm) != [0, 1, 2]:
        raise BadSystemIndex(f"not a permutation of (0, 1, 2): {perm}")
    target = permutation_index_map(perm, d)
    op = np.zeros((d**3, d**3), dtype=complex)
    op[target, np.arange(d**3)] = 1.0
    return op


def transposition_index_map(i: int, j: int, d: int) -> np.ndarray:
    """Basis-index map of the transposition swapping factors i and j."""
    _check_system_indices(i, j)
    perm = [0, 1, 2]
    perm[i], perm[j] = perm[j], perm[i]
    return permutation_index_map(tuple(perm), d)


def transposition(i: int, j: int, d: int) -> np.ndarray:
    """Exchange operator of tensor factors i and j on (C^d)^(x3)."""
    _check_system_indices(i, j)
    perm = [0, 1, 2]
    perm[i], perm[j] = perm[j], perm[i]
    return permutation_operator(tuple(perm), d)


def conjugate_by_transposition(m: np.ndarray, i: int, j: int, d: int) -> np.ndarray:
    """T(ij) m T(ij) computed by exact index permutation (no arithmetic)."""
    sigma = transposition_index_map(i, j, d)
    return np.ascontiguousarray(m[np.ix_(sigma, sigma)])


_SIGN = {0: 1, 1: -1}


def young_projectors(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projectors (S3, A3, M3) onto the symmetric, antisymmetric and mixed sectors."""
    sym = np.zeros((d**3, d**3), dtype=complex)
    alt = np.zeros_like(sym)
    for perm in itertools.permutations(range(N_SYSTEMS)):
        op = permutation_operator(perm, d)
        sym += op
        inversions = sum(1 for a, b in itertools.combinations(range(3), 2) if perm[a] > perm[b])
        alt += op if inversions % 2 == 0 else -op
    s3 = sym / 6.0
    a3 = alt / 6.0
    m3 = np.eye(d**3, dtype=complex) - s3 - a3
    return s3, a3, m3


def pair_projectors(i: int, j: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Complementary projectors (S(ij), A(ij)) onto the pair-(anti)symmetric subspaces."""
    t = transposition(i, j, d)
    eye = np.eye(d**3, dtype=complex)
    return (eye + t) / 2.0, (eye - t) / 2.0


def build_DA(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Half-difference and half-sum of the two input-reference exchange operators.

    D = (T(01) - T(02))/2 and A = (T(01) + T(02))/2; both Hermitian, with
    D^2 = (3/4) M3, A^2 + D^2 = 1 and DA + AD = 0.
    """
    t01 = transposition(0, 1, d)
    t02 = transposition(0, 2, d)
    return (t01 - t02) / 2.0, (t01 + t02) / 2.0


def symmetrizer(n: int, d: int) -> np.ndarray:
    """Projector onto the totally symmetric subspace of n copies of C^d, n in {1, 2, 3}."""
    if n == 1:
        return np.eye(d, dtype=complex)
    if n == 2:
        idx = np.arange(d * d)
        i, j = np.divmod(idx, d)
        swap = np.zeros((d * d, d * d), dtype=complex)
        swap[j * d + i, idx] = 1.0
        return (np.eye(d * d, dtype=complex) + swap) / 2.0
    if n == 3:
        return young_projectors(d)[0]
    raise ValueError(f"n must be in {{1, 2, 3}}, got {n}")


@lru_cache(maxsize=None)
def _interleave_map(d_a: int, d_b: int) -> np.ndarray:
    """Map from global basis index to (party-a triple, party-b triple) grouped index.

    Grouped index is alpha*d_b^3 + beta with alpha, beta the row-major triple
    indices of each party's digits.  Cached once per (d_a, d_b).
    """
    d = d_a * d_b
    digits = _digit_split(d)
    alpha = np.zeros(d**3, dtype=np.int64)
    beta = np.zeros(d**3, dtype=np.int64)
    for k in range(N_SYSTEMS):
        a_k, b_k = np.divmod(digits[k], d_b)
        alpha = alpha * d_a + a_k
        beta = beta * d_b + b_k
    return alpha * d_b**3 + beta


def embed_party_operator(op: np.ndarray, party: str, spec: SpaceSpec) -> np.ndarray:
    """Embed an operator on one party's triple space into the global triple space.

    The operator acts on the three tensor-factor digits belonging to ``party``
    and as identity on the other party's digits.  Realized as an exact index
    permutation of ``op (x) identity``.
    """
    d_p = spec.party_dim(party)
    op = np.asarray(op, dtype=complex)
    if op.shape != (d_p**3, d_p**3):
        raise DimensionMismatch(
            f"party {party!r} operator must have dimension {d_p**3}, got {op.shape}"
        )
    d_other = spec.d_b if party == "a" else spec.d_a
    if party == "a":
        grouped = np.kron(op, np.eye(d_other**3, dtype=complex))
    else:
        grouped = np.kron(np.eye(d_other**3, dtype=complex), op)
    perm = _interleave_map(spec.d_a, spec.d_b)
    return np.ascontiguousarray(grouped[np.ix_(perm, perm)])
