"""Dense complex linear algebra over qubit registers.

Convention used everywhere in this package: site 0 is the leftmost (most
significant) tensor factor, so the computational-basis index of
|b_0 b_1 ... b_{N-1}> is sum_s b_s * 2^(N-1-s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL, dense_cap
from .errors import DenseCapExceededError

__all__ = [
    "HermitianOperator",
    "UnitaryOperator",
    "PureState",
    "DensityMatrix",
    "pauli_operators",
    "hermitian_eig",
    "unitary_from_hamiltonian",
    "embed_local",
    "reduced_density_matrix",
    "apply_on_site",
    "apply_on_all_sites",
]


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(array)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Square complex matrix equal to its conjugate transpose."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("entries must form a square matrix of dimension >= 1")
        if np.abs(m - m.conj().T).max() > TOL.hermiticity:
            raise ValueError("entries are not Hermitian within tolerance")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """Square complex matrix with U U^dagger = identity."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("entries must form a square matrix of dimension >= 1")
        defect = np.abs(m @ m.conj().T - np.eye(m.shape[0])).max()
        if defect > TOL.unitarity:
            raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.size < 1:
            raise ValueError("state vector must have dimension >= 1")
        norm_sq = float(np.real(v.conj() @ v))
        if abs(norm_sq - 1.0) > TOL.state_norm:
            raise ValueError(f"state vector is not normalised (|psi|^2 = {norm_sq!r})")
        object.__setattr__(self, "amplitudes", _frozen(v))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_sites(self) -> int:
        n = self.dim.bit_length() - 1
        if 2**n != self.dim:
            raise ValueError("state dimension is not a power of two")
        return n


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("entries must form a square matrix of dimension >= 1")
        if np.abs(m - m.conj().T).max() > TOL.hermiticity:
            raise ValueError("density matrix is not Hermitian within tolerance")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TOL.trace_one:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        min_eig = float(np.linalg.eigvalsh(m).min())
        if min_eig < -TOL.density_psd:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


def pauli_operators() -> tuple[HermitianOperator, HermitianOperator, HermitianOperator, HermitianOperator]:
    """The unnormalised Pauli matrices (x, y, z) followed by the identity."""
    return (
        HermitianOperator(_SIGMA_X),
        HermitianOperator(_SIGMA_Y),
        HermitianOperator(_SIGMA_Z),
        HermitianOperator(_ID2),
    )


def pauli_matrix(k: int) -> np.ndarray:
    """Raw 2x2 array for Pauli direction k in {1, 2, 3}."""
    if k not in (1, 2, 3):
        raise ValueError(f"Pauli direction must be 1, 2 or 3, got {k}")
    return (_SIGMA_X, _SIGMA_Y, _SIGMA_Z)[k - 1]


def hermitian_eig(op: HermitianOperator) -> tuple[np.ndarray, UnitaryOperator]:
    """Eigendecomposition H = V diag(w) V^dagger with ascending eigenvalues.

    Eigensolver convergence failures propagate as numpy.linalg.LinAlgError.
    """
    w, v = np.linalg.eigh(op.entries)
    return w, UnitaryOperator(v)


def unitary_from_hamiltonian(op: HermitianOperator) -> UnitaryOperator:
    """exp(-i H) computed through the eigendecomposition of H."""
    w, v = np.linalg.eigh(op.entries)
    u = (v * np.exp(-1j * w)) @ v.conj().T
    return UnitaryOperator(u)


def embed_local(op: HermitianOperator, site: int, n_sites: int) -> HermitianOperator:
    """Embed a single-site operator as identity (x) ... (x) op (x) ... (x) identity."""
    if op.dim != 2:
        raise ValueError("embed_local expects a single-qubit (2x2) operator")
    if n_sites < 1 or n_sites > dense_cap():
        raise DenseCapExceededError(
            f"n_sites={n_sites} outside the dense range [1, {dense_cap()}]"
        )
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} out of range for {n_sites} sites")
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_sites - site - 1), dtype=complex)
    return HermitianOperator(np.kron(np.kron(left, op.entries), right))


def reduced_density_matrix(psi: PureState, sites) -> DensityMatrix:
    """Partial trace of |psi><psi| onto one or two sites, in the order given."""
    if isinstance(sites, (int, np.integer)):
        sites = (int(sites),)
    sites = tuple(int(s) for s in sites)
    n = psi.n_sites
    if n > dense_cap():
        raise DenseCapExceededError(f"{n} sites exceeds the dense cap {dense_cap()}")
    if len(sites) not in (1, 2):
        raise ValueError("sites must be a singleton or an ordered pair")
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    if any(not 0 <= s < n for s in sites):
        raise ValueError(f"sites {sites} out of range for {n} sites")

    tensor = psi.amplitudes.reshape((2,) * n)
    traced = [ax for ax in range(n) if ax not in sites]
    rho = np.tensordot(tensor, tensor.conj(), axes=(traced, traced))
    # tensordot leaves the kept axes in ascending site order; restore the
    # caller's ordering on both the ket and bra halves.
    k = len(sites)
    ascending = sorted(sites)
    order = [ascending.index(s) for s in sites]
    rho = rho.transpose(order + [o + k for o in order])
    return DensityMatrix(rho.reshape(2**k, 2**k))


def apply_on_site(mat: np.ndarray, amplitudes: np.ndarray, n_sites: int, site: int) -> np.ndarray:
    """Apply a 2x2 matrix to one site of a dense amplitude vector."""
    tensor = amplitudes.reshape((2,) * n_sites)
    tensor = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [site])), 0, site)
    return tensor.reshape(-1)


def apply_on_all_sites(mat: np.ndarray, amplitudes: np.ndarray, n_sites: int) -> np.ndarray:
    """Apply the same 2x2 matrix to every site of a dense amplitude vector."""
    out = amplitudes
    for site in range(n_sites):
        out = apply_on_site(mat, out, n_sites, site)
    return out
