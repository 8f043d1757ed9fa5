"""Quantum Fisher information from the spectral decomposition of the state.

For a state rho = sum_a lambda_a |a><a| and a phase generated by G, the QFI
for the phase is

    F = 4 * sum_{a<b} (lambda_a - lambda_b)^2 / (lambda_a + lambda_b) |<a|G|b>|^2,

which reduces to 4*Var(G) on pure states.  Frequency estimation over an
interrogation time T carries F_freq = T^2 * F, and 1/F lower-bounds the
variance of any unbiased estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collective_basis import Generator, StateMatrix

RECONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in descending order with matching orthonormal column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(rho: StateMatrix) -> EigenDecomposition:
    """Spectral decomposition with a deterministic ordering and phase convention.

    Eigenvalues descend; each eigenvector is rescaled so that its first
    component of magnitude above 1e-11 is positive real.
    """
    eigvals, eigvecs = np.linalg.eigh(rho.matrix)
    eigvals = eigvals[::-1].copy()
    eigvecs = eigvecs[:, ::-1].copy()
    for j in range(eigvecs.shape[1]):
        significant = np.flatnonzero(np.abs(eigvecs[:, j]) > 1e-11)
        if significant.size:
            lead = eigvecs[significant[0], j]
            eigvecs[:, j] *= lead.conjugate() / abs(lead)
    return EigenDecomposition(eigvals, eigvecs)


def qfi_phase(rho: StateMatrix, g: Generator, eps_sum: float = 1e-12) -> float:
    """QFI for phase estimation with the z-diagonal generator g.

    Eigenvalue pairs whose sum falls below eps_sum * max(lambda) are
    excluded: their analytic contribution is zero but the ratio is 0/0 in
    floating point.  Tiny negative eigenvalues are clamped to zero first.
    """
    if g.basis != rho.basis:
        raise ValueError("generator and state live on different bases")
    dec = eigh(rho)
    lam = np.clip(dec.eigenvalues, 0.0, None)
    overlaps = (dec.eigenvectors.conj().T * g.diagonal) @ dec.eigenvectors
    sums = lam[:, None] + lam[None, :]
    diffs = lam[:, None] - lam[None, :]
    keep = sums > eps_sum * lam.max()
    weights = np.zeros_like(sums)
    np.divide(diffs * diffs, sums, out=weights, where=keep)
    # full double sum counts each a<b pair twice, hence the factor 2 not 4
    return float(2.0 * np.sum(weights * np.abs(overlaps) ** 2))


def qfi_frequency(rho_T: StateMatrix, g: Generator, T: float) -> float:
    """QFI for frequency estimation after interrogating for time T."""
    if T < 0:
        raise ValueError(f"time must be nonnegative, got {T!r}")
    return T * T * qfi_phase(rho_T, g)


def cramer_rao_bound(F: float) -> float:
    """Lower bound 1/F on the estimator variance; infinite when F is not positive."""
    if F <= 0:
        return math.inf
    return 1.0 / F


def repeated_frequency_precision(F_phi: float, T: float, t_total: float) -> float:
    """Inverse-variance bound t_total * T * F_phi for repeated runs of length T."""
    if T <= 0:
        raise ValueError(f"single-run time must be positive, got {T!r}")
    if T > t_total:
        raise ValueError(f"single-run time {T!r} exceeds total time {t_total!r}")
    return t_total * T * F_phi


def max_qfi_bound(g: Generator) -> float:
    """Largest phase QFI any state can reach with generator g.

    Equals the squared spectral span of g; saturated by an equal
    superposition of the extremal eigenvectors.
    """
    span = float(np.max(g.diagonal) - np.min(g.diagonal))
    return span * span
