"""Single-site generator algebra for a uniform field on qubits.

The field enters through dimensionless phases phi = (phi_1, phi_2, phi_3),
one per Pauli direction. Everything downstream (Fisher matrices, measurement
gradients) is built from two derived single-site operators:

* the effective generator of parameter translations, obtained by averaging
  the bare generator over the unitary flow of the site Hamiltonian, and
* its two-sided cousin whose Pauli traces give the generator pair traces in
  closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .operators import HermitianOperator, pauli_matrix, unitary_from_hamiltonian

__all__ = [
    "FieldParams",
    "GeneratorSet",
    "PauliReduction",
    "site_hamiltonian",
    "site_unitary",
    "local_generator",
    "generator_pair_kernel",
    "generator_pair_trace",
    "pauli_coefficients",
    "phase_filter",
    "sinc",
]


@dataclass(frozen=True, eq=False)
class FieldParams:
    """Dimensionless field phases, one per Pauli direction."""

    phi: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.phi, dtype=float).reshape(-1)
        if v.size != 3:
            raise ValueError("expected exactly three field phases")
        if not np.all(np.isfinite(v)):
            raise ValueError("field phases must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "phi", v)

    @property
    def magnitude(self) -> float:
        """Euclidean norm of the phase vector."""
        return float(np.linalg.norm(self.phi))


def as_field_params(params) -> FieldParams:
    if isinstance(params, FieldParams):
        return params
    return FieldParams(np.asarray(params, dtype=float))


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """A family of single-site Hermitian generators sharing one dimension."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("generator set must not be empty")
        if not all(isinstance(g, HermitianOperator) for g in gens):
            raise ValueError("generators must be HermitianOperator instances")
        dims = {g.dim for g in gens}
        if len(dims) != 1:
            raise ValueError(f"generators have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "generators", gens)

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def local_dim(self) -> int:
        return self.generators[0].dim

    @classmethod
    def pauli_xyz(cls) -> "GeneratorSet":
        return cls(tuple(HermitianOperator(pauli_matrix(k)) for k in (1, 2, 3)))


def sinc(x: float) -> float:
    """sin(x)/x with a series branch below the cancellation threshold."""
    x = float(x)
    if abs(x) < TOL.sinc_series:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return float(np.sin(x) / x)


def sinc_sq_deficit_ratio(x: float) -> float:
    """(1 - sinc(x)^2) / x^2, finite and smooth through x = 0."""
    x = float(x)
    if abs(x) < TOL.sinc_series:
        x2 = x * x
        return 1.0 / 3.0 - 2.0 * x2 / 45.0 + x2 * x2 / 315.0
    s = np.sin(x) / x
    return float((1.0 - s * s) / (x * x))


def phase_filter(x) -> np.ndarray:
    """The spectral filter (exp(ix) - 1) / (ix) with filter(0) = 1.

    Evaluated as exp(ix/2) * sin(x/2)/(x/2) away from zero and by its Taylor
    series below the branch threshold, so both branches are accurate to full
    precision at the seam.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < TOL.filter_series
    xs = x[small]
    out[small] = 1.0 + 0.5j * xs - xs**2 / 6.0 - 1j * xs**3 / 24.0
    xl = x[~small]
    half = 0.5 * xl
    out[~small] = np.exp(1j * half) * np.sin(half) / half
    return out


def site_hamiltonian(params) -> HermitianOperator:
    """The single-site Hamiltonian sum_k phi_k sigma_k."""
    phi = as_field_params(params).phi
    h = sum(phi[k] * pauli_matrix(k + 1) for k in range(3))
    return HermitianOperator(h)


def _resolve_site_hamiltonian(params, gens: GeneratorSet | None):
    """(h matrix, generator matrices) for either the Pauli field or a
    caller-supplied generator family."""
    if gens is None:
        phi = as_field_params(params).phi
        mats = [pauli_matrix(k) for k in (1, 2, 3)]
    else:
        phi = np.asarray(params, dtype=float).reshape(-1)
        if phi.size != gens.d:
            raise ValueError(f"expected {gens.d} coefficients, got {phi.size}")
        mats = [g.entries for g in gens.generators]
    h = sum(c * m for c, m in zip(phi, mats))
    return h, mats


def site_unitary(params, gens: GeneratorSet | None = None) -> np.ndarray:
    """exp(-i h) of the single-site Hamiltonian, as a raw matrix."""
    h, _ = _resolve_site_hamiltonian(params, gens)
    return unitary_from_hamiltonian(HermitianOperator(h)).entries


def local_generator(params, k: int, gens: GeneratorSet | None = None) -> HermitianOperator:
    """Effective single-site generator of translations in parameter k.

    This is the average of the bare generator over the unitary flow
    exp(i a h) for a in [0, 1], evaluated exactly in the eigenbasis of the
    site Hamiltonian: matrix element (m, n) of the bare generator is scaled
    by phase_filter(w_m - w_n).

    Parameter indices are 1-based (k = 1, 2, 3 for the Pauli field).
    """
    h, mats = _resolve_site_hamiltonian(params, gens)
    if not 1 <= k <= len(mats):
        raise ValueError(f"parameter index {k} out of range 1..{len(mats)}")
    w, v = np.linalg.eigh(h)
    hk_eig = v.conj().T @ mats[k - 1] @ v
    gaps = w[:, None] - w[None, :]
    a = v @ (hk_eig * phase_filter(gaps)) @ v.conj().T
    return HermitianOperator(0.5 * (a + a.conj().T))


def generator_pair_kernel(params, k: int) -> HermitianOperator:
    """Closed-form two-sided average of sigma_k over the site Hamiltonian flow.

    Its Pauli traces reproduce the generator pair traces:
    Tr[sigma_l . kernel_k] = Tr[a_k a_l] for the effective generators a_k.
    The zero-field limit is sigma_k itself.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"parameter index {k} out of range 1..3")
    phi = as_field_params(params).phi
    xi = float(np.linalg.norm(phi))
    s2 = sinc(xi) ** 2
    ratio = sinc_sq_deficit_ratio(xi)  # (1 - sinc^2) / xi^2, finite at 0
    coeffs = ratio * phi[k - 1] * phi
    coeffs[k - 1] += s2
    out = sum(coeffs[l] * pauli_matrix(l + 1) for l in range(3))
    return HermitianOperator(out)


def generator_pair_trace(params, k: int, l: int) -> float:
    """Tr[a_k a_l] for the effective single-site generators, in closed form."""
    if l not in (1, 2, 3):
        raise ValueError(f"parameter index {l} out of range 1..3")
    kernel = generator_pair_kernel(params, k)
    return float(np.real(np.trace(pauli_matrix(l) @ kernel.entries)))


@dataclass(frozen=True)
class PauliReduction:
    """Pauli coefficients of a qubit Hamiltonian.

    ``sigma_coeffs`` are the coefficients in the unnormalised sigma basis;
    ``identity_coeff`` is the identity component, reported separately because
    it only contributes an unobservable global phase.
    """

    sigma_coeffs: tuple
    identity_coeff: float


def pauli_coefficients(gens: GeneratorSet, params) -> PauliReduction:
    """Reduce sum_j phi_j h_j (qubit generators) to the three Pauli axes.

    Lets any number of 2x2 generators be traded for at most three effective
    field phases, since c_k = sum_j phi_j Tr[sigma_k h_j] / 2.
    """
    if gens.local_dim != 2:
        raise ValueError("Pauli reduction requires 2x2 generators")
    phi = np.asarray(params, dtype=float).reshape(-1)
    if phi.size != gens.d:
        raise ValueError(f"expected {gens.d} coefficients, got {phi.size}")
    h = sum(c * g.entries for c, g in zip(phi, gens.generators))
    sigma = [
        float(np.real(np.trace(pauli_matrix(k) @ h))) / 2.0 for k in (1, 2, 3)
    ]
    identity = float(np.real(np.trace(h))) / 2.0
    return PauliReduction(tuple(sigma), identity)
