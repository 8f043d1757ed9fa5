"""States and operators of qubit ensembles restricted to their symmetric sector.

An ensemble of n exchangeable qubits never leaves the span of the Dicke
states |D_n^k> (k = number of excited qubits), so everything here is
represented in that (n+1)-dimensional sector, or in the tensor product of
two such sectors for bipartite probes.  This keeps all constructions exact
while avoiding the full 2^n space.

Index conventions: basis index k runs 0..n and carries the collective
z-weight m(k) = k - n/2.  Bipartite indices (q, r) are flattened row-major,
q*(n2+1) + r, which matches ``numpy.kron`` of the two partition vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

NORM_TOL = 1e-12
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True)
class SymmetricBasis:
    """Dicke basis of an n-qubit ensemble, basis vectors |D_n^0> .. |D_n^n>."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"particle count must be a positive integer, got {self.n}")

    @property
    def dimension(self) -> int:
        return self.n + 1

    def excitations(self) -> np.ndarray:
        """Total excitation number of each basis vector."""
        return np.arange(self.n + 1)

    def z_weights(self) -> np.ndarray:
        """Collective z-weight m(k) = k - n/2 of each basis vector."""
        return np.arange(self.n + 1) - self.n / 2


@dataclass(frozen=True)
class BipartiteSymmetricBasis:
    """Product of two Dicke sectors, |D_n1^q> ⊗ |D_n2^r>, flattened row-major."""

    n1: int
    n2: int

    def __post_init__(self):
        for label, size in (("n1", self.n1), ("n2", self.n2)):
            if not isinstance(size, int) or size < 1:
                raise ValueError(f"partition size {label} must be a positive integer, got {size}")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def dimension(self) -> int:
        return (self.n1 + 1) * (self.n2 + 1)

    def _qr(self) -> tuple[np.ndarray, np.ndarray]:
        q = np.repeat(np.arange(self.n1 + 1), self.n2 + 1)
        r = np.tile(np.arange(self.n2 + 1), self.n1 + 1)
        return q, r

    def excitations(self) -> np.ndarray:
        """Total excitation number q + r of each flattened basis vector."""
        q, r = self._qr()
        return q + r

    def z_weights(self) -> np.ndarray:
        """Total collective z-weight (q - n1/2) + (r - n2/2)."""
        q, r = self._qr()
        return (q - self.n1 / 2) + (r - self.n2 / 2)

    def partition1_weights(self) -> np.ndarray:
        q, _ = self._qr()
        return q - self.n1 / 2

    def partition2_weights(self) -> np.ndarray:
        _, r = self._qr()
        return r - self.n2 / 2


Basis = SymmetricBasis | BipartiteSymmetricBasis


class GeneratorLabel(Enum):
    SZ_TOTAL = "sz_total"
    SZ_PARTITION2 = "sz_partition2"


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over a symmetric or bipartite-symmetric basis."""

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected ({self.basis.dimension},)"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: ||psi|| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def density_matrix(self) -> "StateMatrix":
        return StateMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class StateMatrix:
    """Density matrix over a symmetric or bipartite-symmetric basis.

    Construction checks Hermiticity, unit trace and positivity (eigenvalues
    above -1e-10), so a successfully built StateMatrix is a valid state.
    """

    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = self.basis.dimension
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({dim}, {dim})")
        herm_dev = np.max(np.abs(mat - mat.conj().T))
        if herm_dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |A - A^dag| = {herm_dev!r}")
        trace_dev = abs(mat.trace() - 1.0)
        if trace_dev > TRACE_TOL:
            raise ValueError(f"matrix does not have unit trace: |tr - 1| = {trace_dev!r}")
        lam_min = float(np.linalg.eigvalsh(mat)[0])
        if lam_min < EIGENVALUE_FLOOR:
            raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {lam_min!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True, eq=False)
class Generator:
    """Z-diagonal Hermitian generator of the signal phase."""

    basis: Basis
    diagonal: np.ndarray
    label: GeneratorLabel

    def __post_init__(self):
        diag = np.asarray(self.diagonal, dtype=float)
        if diag.shape != (self.basis.dimension,):
            raise ValueError("generator diagonal does not match basis dimension")
        diag.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)


def dicke_state(n: int, k: int) -> PureState:
    """Dicke state |D_n^k> with k of n qubits excited."""
    basis = SymmetricBasis(n)
    if not 0 <= k <= n:
        raise ValueError(f"excitation count k={k} outside 0..{n}")
    amps = np.zeros(basis.dimension, dtype=complex)
    amps[k] = 1.0
    return PureState(basis, amps)


def ghz_state(n: int) -> PureState:
    """Equal superposition of the all-ground and all-excited states."""
    basis = SymmetricBasis(n)
    amps = np.zeros(basis.dimension, dtype=complex)
    amps[0] = amps[n] = 1.0 / math.sqrt(2.0)
    return PureState(basis, amps)


def plus_product_state(n: int) -> PureState:
    """Product state |+>^n, binomial amplitude sqrt(C(n,k))/2^(n/2) at index k."""
    basis = SymmetricBasis(n)
    amps = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    amps = np.sqrt(amps) / 2 ** (n / 2)
    return PureState(basis, amps.astype(complex))


@lru_cache(maxsize=None)
def _sy_eigensystem(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the collective y-spin restricted to the Dicke sector."""
    # tridiagonal: <k+1| Sy |k> = (i/2) sqrt((k+1)(n-k)), anti-Hermitian imaginary part
    k = np.arange(n)
    c = 0.5 * np.sqrt((k + 1.0) * (n - k))
    sy = np.zeros((n + 1, n + 1), dtype=complex)
    sy[k + 1, k] = 1j * c
    sy[k, k + 1] = -1j * c
    eigvals, eigvecs = np.linalg.eigh(sy)
    eigvals.setflags(write=False)
    eigvecs.setflags(write=False)
    return eigvals, eigvecs


def wigner_d_matrix(n: int, angle: float) -> np.ndarray:
    """Collective y-rotation matrix between Dicke states.

    Entry [k', k] is <D_n^k'| exp(-i*angle*Sy) |D_n^k>.  The result is real
    and orthogonal; at angle 0 it is the identity, and the diagonal corner
    d[0, 0] = cos(angle/2)^n is positive for angle in (0, pi).

    Evaluated through the eigendecomposition of the tridiagonal Sy block,
    which stays numerically stable for large n (the textbook alternating
    binomial sum does not).
    """
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    eigvals, eigvecs = _sy_eigensystem(n)
    d = (eigvecs * np.exp(-1j * angle * eigvals)) @ eigvecs.conj().T
    return np.ascontiguousarray(d.real)


def rotate_y(state: PureState, angle: float) -> PureState:
    """Rotate a state about the collective y-axis.

    On a bipartite basis the rotation acts collectively on every qubit, so
    it factorizes into one Wigner-d block per partition.
    """
    if angle == 0.0:
        return state
    basis = state.basis
    if isinstance(basis, SymmetricBasis):
        amps = wigner_d_matrix(basis.n, angle) @ state.amplitudes
    else:
        d1 = wigner_d_matrix(basis.n1, angle)
        d2 = wigner_d_matrix(basis.n2, angle)
        block = state.amplitudes.reshape(basis.n1 + 1, basis.n2 + 1)
        amps = (d1 @ block @ d2.T).reshape(basis.dimension)
    return PureState(basis, amps)


def tensor_bipartite(a: PureState, b: PureState) -> PureState:
    """Tensor product of two symmetric-sector states, one per partition."""
    if not isinstance(a.basis, SymmetricBasis) or not isinstance(b.basis, SymmetricBasis):
        raise ValueError("tensor_bipartite expects two single-partition states")
    basis = BipartiteSymmetricBasis(a.basis.n, b.basis.n)
    return PureState(basis, np.kron(a.amplitudes, b.amplitudes))


def generator(basis: Basis, label: GeneratorLabel) -> Generator:
    """Build the z-diagonal signal generator for a basis.

    SZ_TOTAL is the collective z-spin of all qubits and exists on every
    basis; SZ_PARTITION2 acts on the second partition only and requires a
    bipartite basis.
    """
    if label is GeneratorLabel.SZ_TOTAL:
        diag = basis.z_weights()
    elif label is GeneratorLabel.SZ_PARTITION2:
        if not isinstance(basis, BipartiteSymmetricBasis):
            raise ValueError("SZ_PARTITION2 requires a bipartite basis")
        diag = basis.partition2_weights()
    else:
        raise ValueError(f"unknown generator label {label!r}")
    return Generator(basis, diag, label)
