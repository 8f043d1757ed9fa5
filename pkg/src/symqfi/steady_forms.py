"""Closed-form steady-state and decay results, usable as independent oracles.

Everything here is evaluated without building density matrices, so these
functions cross-check the numeric pipeline (and scale to qubit numbers the
pipeline never touches).  Notation: n qubits split n1 | n2 = n - n1, k1/k2
excitations prepared per partition, k = k1 + k2 total, and k' the total
excitation number labelling a steady-state block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .collective_basis import wigner_d_matrix
from .dephasing import NoiseParams, phase_variance_c

# steady-state blocks below this probability carry no weight and an
# undefined conditional variance, so they are skipped
BLOCK_PROBABILITY_FLOOR = 1e-15


@dataclass(frozen=True)
class SplitChoice:
    """A bipartite splitting with per-partition excitation numbers."""

    n: int
    n1: int
    k1: int
    k: int

    def __post_init__(self):
        if not 0 <= self.n1 <= self.n:
            raise ValueError(f"partition size n1={self.n1} outside 0..{self.n}")
        if not 0 <= self.k1 <= min(self.k, self.n1):
            raise ValueError(f"k1={self.k1} outside 0..min(k={self.k}, n1={self.n1})")
        if self.k - self.k1 > self.n - self.n1:
            raise ValueError(
                f"partition 2 cannot hold k2={self.k - self.k1} excitations "
                f"with {self.n - self.n1} qubits"
            )

    @property
    def n2(self) -> int:
        return self.n - self.n1

    @property
    def k2(self) -> int:
        return self.k - self.k1


def ghz_qfi_analytic(n: int, T: float, p: NoiseParams) -> float:
    """Phase QFI n^2 * exp(-n^2 C(T)) of an n-qubit GHZ probe at time T."""
    return n * n * math.exp(-n * n * phase_variance_c(T, p))


def product_steady_qfi(n: int, n1: int) -> float:
    """Steady-state differential-scheme QFI n1(n - n1)/n of the |+>^n probe."""
    if not 0 <= n1 <= n:
        raise ValueError(f"partition size n1={n1} outside 0..{n}")
    return n1 * (n - n1) / n


def ghz_bipartite_steady_qfi(n: int) -> float:
    """Steady-state QFI n^2/8 of the equal-split GHZ ⊗ GHZ probe."""
    if n % 2:
        raise ValueError(f"equal splitting requires an even qubit count, got {n}")
    return n * n / 8


def dfs_piecewise_qfi(n: int, n1: int, k: int) -> float:
    """Best QFI of a fixed-excitation (dephasing-free) state for a given split.

    The optimum pairs the extremal partition-2 weights reachable with k
    total excitations, which caps at min(n1, n2)^2 in the middle range.
    """
    if not 0 <= n1 <= n:
        raise ValueError(f"partition size n1={n1} outside 0..{n}")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    lo, hi = min(n1, n - n1), max(n1, n - n1)
    if k <= lo:
        return float(k * k)
    if k <= hi:
        return float(lo * lo)
    return float((n - k) * (n - k))


@lru_cache(maxsize=None)
def _rotation_weights(n: int) -> np.ndarray:
    """Squared pi/2 Wigner-d matrix; column k is the excitation distribution
    of the rotated Dicke state with k excitations."""
    if n == 0:
        w = np.ones((1, 1))
    else:
        d = wigner_d_matrix(n, math.pi / 2)
        w = d * d
    w.setflags(write=False)
    return w


def _block_moments(c: SplitChoice) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block moments of the partition-2 weight for a rotated BSD probe.

    Entry k' of the convolution sums over all (q, k'-q) consistent with the
    partition sizes, which is exactly the valid index range.
    """
    w1 = _rotation_weights(c.n1)[:, c.k1]
    w2 = _rotation_weights(c.n2)[:, c.k2]
    m2 = np.arange(c.n2 + 1) - c.n2 / 2
    s0 = np.convolve(w1, w2)
    s1 = np.convolve(w1, w2 * m2)
    s2 = np.convolve(w1, w2 * m2 * m2)
    return s0, s1, s2


def block_probabilities(c: SplitChoice) -> np.ndarray:
    """Probability of each total-excitation block k' = 0..n for a BSD probe."""
    return _block_moments(c)[0]


def bsd_steady_qfi(c: SplitChoice) -> float:
    """Steady-state QFI of a rotated bipartite Dicke probe.

    Four times the probability-weighted conditional variance of the
    partition-2 weight across the surviving fixed-excitation blocks.
    """
    s0, s1, s2 = _block_moments(c)
    keep = s0 > BLOCK_PROBABILITY_FLOOR
    return float(4.0 * np.sum(s2[keep] - s1[keep] ** 2 / s0[keep]))


@dataclass(frozen=True)
class SplitOptimum:
    """Best steady-state QFI at fixed total excitation number k."""

    k: int
    max_qfi: float
    argmax: tuple[tuple[int, int], ...]  # (n1, k1) pairs, lexicographic


def optimize_bsd_split(n: int) -> list[SplitOptimum]:
    """Exhaustive scan of all splittings, one optimum record per k = 0..n.

    All maximizers within a 1e-9 relative tie window are kept; equivalent
    splittings occur for odd k.
    """
    if n < 2:
        raise ValueError(f"need at least two qubits to split, got n={n}")
    table = []
    for k in range(n + 1):
        evaluated = []
        for n1 in range(n + 1):
            for k1 in range(max(0, k - (n - n1)), min(k, n1) + 1):
                f = bsd_steady_qfi(SplitChoice(n, n1, k1, k))
                evaluated.append((f, n1, k1))
        best = max(f for f, _, _ in evaluated)
        tie = best - 1e-9 * max(abs(best), 1.0)
        argmax = tuple(sorted((n1, k1) for f, n1, k1 in evaluated if f >= tie))
        table.append(SplitOptimum(k=k, max_qfi=best, argmax=argmax))
    return table
