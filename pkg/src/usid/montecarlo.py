"""Unitary-invariant sampling and Monte Carlo estimates of the scheme statistics.

Sampling contract: every sample index gets its own generator seeded from
``(seed, index)``, and worker ``w`` of ``n`` processes indices congruent to
``w mod n``, so results are bit-identical for any worker count.  Complex
amplitudes are drawn as independent standard Gaussians for real and imaginary
part (``numpy`` Generator.standard_normal) and normalized, which realizes the
uniform distribution on the state-vector sphere.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroSamples
from .linalg import operator_norm
from .povm import Povm
from .symmetry import SpaceSpec, symmetric_subspace_dim, symmetrizer


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a unit vector in C^d from the unitary-invariant distribution."""
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a d x d unitary from the invariant measure (Ginibre + phase-fixed QR)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


@dataclass(frozen=True)
class McReport:
    """Summary statistics of a Monte Carlo identification run."""

    n_samples: int
    mean_success: float
    stderr_success: float
    mean_error: float
    max_error_sample: float
    seed: int


def _triple(phi_in: np.ndarray, phi1: np.ndarray, phi2: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(phi_in, phi1), phi2)


def instance_probabilities(
    povm: Povm, phi1: np.ndarray, phi2: np.ndarray
) -> tuple[float, float, float]:
    """Success, misidentification and inconclusive probabilities for one reference pair.

    The input state is the first or second reference with equal weight, so
    each probability averages the two preparations.  Computed as vector
    sandwiches <psi| E |psi> rather than operator traces.
    """
    phi1 = np.asarray(phi1, dtype=complex)
    phi2 = np.asarray(phi2, dtype=complex)
    d3 = phi1.size ** 3
    if phi1.shape != phi2.shape or phi1.ndim != 1 or povm.dim != d3:
        raise DimensionMismatch(
            f"states of length {phi1.shape}/{phi2.shape} do not match measurement dimension {povm.dim}"
        )
    psi1 = _triple(phi1, phi1, phi2)  # input equals reference 1
    psi2 = _triple(phi2, phi1, phi2)  # input equals reference 2

    def sandwich(mat: np.ndarray, psi: np.ndarray) -> float:
        return float(np.vdot(psi, mat @ psi).real)

    success = 0.5 * (sandwich(povm[1], psi1) + sandwich(povm[2], psi2))
    error = 0.5 * (sandwich(povm[1], psi2) + sandwich(povm[2], psi1))
    inconclusive = 0.5 * (sandwich(povm[0], psi1) + sandwich(povm[0], psi2))
    return success, error, inconclusive


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Per-sample generator derived from (seed, sample index)."""
    return np.random.default_rng([seed, index])


def run_monte_carlo(
    povm: Povm, spec: SpaceSpec, n_samples: int, seed: int, workers: int = 1
) -> McReport:
    """Estimate mean success/error probabilities over i.i.d. reference pairs.

    Deterministic for fixed (seed, n_samples) regardless of ``workers``: each
    sample is computed from its own substream and the reduction runs in index
    order.
    """
    if n_samples < 1:
        raise ZeroSamples(f"n_samples must be >= 1, got {n_samples}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    d = spec.d
    if povm.dim != d**3:
        raise DimensionMismatch(f"measurement dimension {povm.dim} != d^3 = {d**3}")

    success = np.empty(n_samples)
    error = np.empty(n_samples)

    def fill(worker: int) -> None:
        for idx in range(worker, n_samples, workers):
            rng = sample_rng(seed, idx)
            phi1 = haar_state(d, rng)
            phi2 = haar_state(d, rng)
            s, e, _ = instance_probabilities(povm, phi1, phi2)
            success[idx] = s
            error[idx] = e

    if workers == 1:
        fill(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(workers)))

    mean_success = float(np.mean(success))
    stderr = float(np.std(success, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return McReport(
        n_samples=n_samples,
        mean_success=mean_success,
        stderr_success=stderr,
        mean_error=float(np.mean(error)),
        max_error_sample=float(np.max(error)),
        seed=seed,
    )


def moment_check(n_copies: int, d: int, n_samples: int, seed: int) -> float:
    """Spectral-norm gap between the empirical mean of rho^(x n) and its exact average.

    The exact average of rho^(x n) over the unitary-invariant ensemble is the
    symmetric projector divided by its dimension.
    """
    if n_copies not in (1, 2, 3):
        raise ValueError(f"n_copies must be in {{1, 2, 3}}, got {n_copies}")
    if n_samples < 1:
        raise ZeroSamples(f"n_samples must be >= 1, got {n_samples}")
    dim = d**n_copies
    acc = np.zeros((dim, dim), dtype=complex)
    for idx in range(n_samples):
        rng = sample_rng(seed, idx)
        phi = haar_state(d, rng)
        psi = phi
        for _ in range(n_copies - 1):
            psi = np.kron(psi, phi)
        acc += np.outer(psi, psi.conj())
    target = symmetrizer(n_copies, d) / symmetric_subspace_dim(n_copies, d)
    return operator_norm(acc / n_samples - target)
