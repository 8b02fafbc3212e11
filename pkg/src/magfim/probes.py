"""GHZ states and the triple-GHZ probe as superpositions of uniform product states.

Every state here is a weighted sum of terms, each term being the same
single-qubit state repeated on all sites. That structure is what the
transfer-matrix engine exploits; it also admits exact closed forms for the
normalisation and the few-site marginals at any system size.

Local eigenvector conventions (first nonzero component real positive):
sigma_z -> (1,0), (0,1); sigma_x -> (1,+-1)/sqrt2; sigma_y -> (1,+-i)/sqrt2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import TOL, dense_cap
from .errors import DenseCapExceededError
from .operators import DensityMatrix, PureState, pauli_matrix

__all__ = [
    "ProductStateSuperposition",
    "pauli_eigenvectors",
    "ghz_state",
    "probe_normalization",
    "triple_ghz_probe",
    "probe_two_site_marginal",
    "single_site_marginal",
    "two_site_marginal",
    "dense_statevector",
    "dense_amplitudes",
    "admissible_probe_deltas",
    "DELTA_GRID",
]

#: Discrete grid searched when admissible phases are determined numerically.
DELTA_GRID = (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)


@dataclass(frozen=True, eq=False)
class ProductStateSuperposition:
    """Weighted sum of N-fold products of single-qubit states.

    ``weights[j]`` multiplies the product state ``local_states[j]`` repeated
    on every site. When ``normalized`` is set the overall norm, computed from
    the exact term Gram matrix, must be 1.
    """

    n_sites: int
    weights: np.ndarray
    local_states: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise ValueError("n_sites must be >= 1")
        w = np.asarray(self.weights, dtype=complex).reshape(-1)
        locs = np.asarray(self.local_states, dtype=complex)
        if locs.ndim != 2 or locs.shape != (w.size, 2):
            raise ValueError("local_states must have shape (n_terms, 2)")
        norms = np.linalg.norm(locs, axis=1)
        if np.abs(norms - 1.0).max() > TOL.state_norm:
            raise ValueError("every local state must have unit norm")
        w = w.copy()
        locs = locs.copy()
        w.setflags(write=False)
        locs.setflags(write=False)
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "local_states", locs)
        if self.normalized:
            nrm = self.norm()
            if abs(nrm - 1.0) > TOL.superposition_norm:
                raise ValueError(f"state flagged normalized has norm {nrm!r}")

    @property
    def n_terms(self) -> int:
        return self.weights.size

    def term_gram(self) -> np.ndarray:
        """Gram matrix of the product terms: <alpha_i|alpha_j>^N."""
        single = self.local_states.conj() @ self.local_states.T
        return single**self.n_sites

    def norm(self) -> float:
        g = self.term_gram()
        val = np.real(self.weights.conj() @ g @ self.weights)
        return float(np.sqrt(max(val, 0.0)))


def pauli_eigenvectors(k: int) -> tuple[np.ndarray, np.ndarray]:
    """(+1, -1) eigenvectors of sigma_k under the fixed phase convention."""
    if k == 1:
        plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
        minus = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
    elif k == 2:
        plus = np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0)
        minus = np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0)
    elif k == 3:
        plus = np.array([1.0, 0.0], dtype=complex)
        minus = np.array([0.0, 1.0], dtype=complex)
    else:
        raise ValueError(f"Pauli direction must be 1, 2 or 3, got {k}")
    return plus, minus


def ghz_state(k: int, n_sites: int, delta: float = 0.0) -> ProductStateSuperposition:
    """GHZ state along direction k: (|+k>^N + e^{i delta} |-k>^N)/sqrt(2).

    The two product terms are orthogonal, so the state is normalised for
    every N >= 1 and any relative phase.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    plus, minus = pauli_eigenvectors(k)
    weights = np.array([1.0, np.exp(1j * float(delta))], dtype=complex) / np.sqrt(2.0)
    return ProductStateSuperposition(
        n_sites=n_sites,
        weights=weights,
        local_states=np.stack([plus, minus]),
        normalized=True,
    )


def _probe_terms(deltas) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled weights and local states of the six-term probe."""
    deltas = np.asarray(deltas, dtype=float).reshape(-1)
    if deltas.size != 3:
        raise ValueError("expected three phases")
    weights = []
    locals_ = []
    for k in (1, 2, 3):
        plus, minus = pauli_eigenvectors(k)
        phase = np.exp(1j * deltas[k - 1]) / np.sqrt(2.0)
        weights += [phase, phase]
        locals_ += [plus, minus]
    return np.array(weights, dtype=complex), np.stack(locals_)


def probe_normalization(n_sites: int) -> float:
    """Overall scale of the phase-free six-term probe.

    Computed from the exact 6x6 term Gram matrix; tends to 1/sqrt(6) from
    below along N = 8, 16, 24, ... as the cross-direction overlaps decay
    like 2^(-N/2).
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    _, locs = _probe_terms((0.0, 0.0, 0.0))
    # The conventional scale multiplies the bare six-term sum, so the bracket
    # is the full Gram sum with unit weights.
    raw = ProductStateSuperposition(n_sites, np.ones(6, dtype=complex), locs)
    bracket = np.real(raw.weights.conj() @ raw.term_gram() @ raw.weights)
    if bracket <= 0.0:
        raise ValueError(f"non-positive normalisation bracket {bracket!r} at N={n_sites}")
    return float(1.0 / np.sqrt(bracket))


def triple_ghz_probe(n_sites: int, deltas=(0.0, 0.0, 0.0)) -> ProductStateSuperposition:
    """Equal superposition of the three GHZ states with adjustable phases.

    The six-term normalisation comes from the exact term Gram matrix, so the
    state is exactly normalised at every N >= 2.
    """
    if n_sites < 2:
        raise ValueError("the probe needs at least two sites")
    weights, locs = _probe_terms(deltas)
    raw = ProductStateSuperposition(n_sites, weights, locs)
    nrm = raw.norm()
    if nrm <= 0.0:
        raise ValueError(f"probe normalisation vanished at N={n_sites}")
    return ProductStateSuperposition(n_sites, weights / nrm, locs, normalized=True)


def probe_two_site_marginal(n_sites: int) -> tuple[DensityMatrix, bool]:
    """Two-site marginal of the probe in its large-N closed form.

    Returns (1/4) I (x) I + (1/12) sum_k sigma_k (x) sigma_k together with a
    flag that is True exactly when the closed form is exact (N = 8, 16, ...).
    For other N the true marginal deviates by an exponentially small amount.
    """
    if n_sites < 2:
        raise ValueError("the probe needs at least two sites")
    rho = 0.25 * np.eye(4, dtype=complex)
    for k in (1, 2, 3):
        sk = pauli_matrix(k)
        rho += np.kron(sk, sk) / 12.0
    return DensityMatrix(rho), n_sites % 8 == 0


def single_site_marginal(state: ProductStateSuperposition) -> DensityMatrix:
    """Exact one-site marginal of a uniform product-state superposition."""
    w = state.weights
    locs = state.local_states
    single = locs.conj() @ locs.T
    coeff = (w.conj()[:, None] * w[None, :]) * single ** (state.n_sites - 1)
    rho = np.einsum("ij,ja,ib->ab", coeff, locs, locs.conj())
    return DensityMatrix(rho)


def two_site_marginal(state: ProductStateSuperposition) -> DensityMatrix:
    """Exact two-site marginal of a uniform product-state superposition."""
    if state.n_sites < 2:
        raise ValueError("two-site marginal needs at least two sites")
    w = state.weights
    locs = state.local_states
    single = locs.conj() @ locs.T
    coeff = (w.conj()[:, None] * w[None, :]) * single ** (state.n_sites - 2)
    pair = np.einsum("ja,jb->jab", locs, locs).reshape(state.n_terms, 4)
    rho = np.einsum("ij,ja,ib->ab", coeff, pair, pair.conj())
    return DensityMatrix(rho)


def dense_amplitudes(state: ProductStateSuperposition) -> np.ndarray:
    """Raw dense amplitude vector (no normalisation requirement)."""
    n = state.n_sites
    if n > dense_cap():
        raise DenseCapExceededError(f"{n} sites exceeds the dense cap {dense_cap()}")
    out = np.zeros(2**n, dtype=complex)
    for weight, local in zip(state.weights, state.local_states):
        term = np.array([1.0], dtype=complex)
        for _ in range(n):
            term = np.kron(term, local)
        out += weight * term
    return out


def dense_statevector(state: ProductStateSuperposition) -> PureState:
    """Dense statevector of a normalised superposition."""
    if not state.normalized:
        raise ValueError("dense_statevector requires a state flagged normalized")
    return PureState(dense_amplitudes(state))


def admissible_probe_deltas(n_sites: int, tol: float = 1e-10) -> tuple[float, float, float]:
    """First phase triple on the discrete grid giving an exactly maximally
    mixed one-site probe marginal.

    The phase choices that work depend on N mod 8; they are determined
    numerically rather than from a closed form. (0, 0, 0) is returned
    whenever it qualifies.
    """
    if n_sites % 2 != 0:
        raise ValueError("admissible phases are defined for even N")
    target = 0.5 * np.eye(2)
    for deltas in itertools.product(DELTA_GRID, repeat=3):
        probe = triple_ghz_probe(n_sites, deltas)
        dev = np.abs(single_site_marginal(probe).entries - target).max()
        if dev <= tol:
            return deltas
    raise ValueError(f"no admissible probe phases on the grid for N={n_sites}")
