"""Exact transfer-matrix evaluation for uniform product-state superpositions.

Overlaps of N-site states whose terms are uniform products reduce to N-th
powers of single-site scalars. Those powers are taken in the log domain
(log-magnitude plus explicitly accumulated phase N * arg), so system sizes up
to 10^4 sites cost the same as small ones and never overflow or underflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .operators import UnitaryOperator, pauli_matrix
from .probes import ProductStateSuperposition

__all__ = [
    "LogComplex",
    "overlap",
    "apply_local_unitary",
    "pauli_string_expectation",
    "inserted_sum_overlap",
]


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as (log magnitude, phase).

    ``log_magnitude`` is -inf for exact zero. Phases are kept unreduced so
    integer powers stay exact: (r e^{i t})^n maps to (n log r, n t).
    """

    log_magnitude: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), cmath.phase(z))

    def to_complex(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0.0 + 0.0j
        return cmath.rect(math.exp(self.log_magnitude), self.phase)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.log_magnitude == -math.inf or other.log_magnitude == -math.inf:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def power(self, n: int) -> "LogComplex":
        if n == 0:
            return LogComplex(0.0, 0.0)
        if self.log_magnitude == -math.inf:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(n * self.log_magnitude, n * self.phase)

    @staticmethod
    def sum(terms) -> complex:
        """Sum of LogComplex terms, factoring out the largest magnitude."""
        terms = [t for t in terms if t.log_magnitude != -math.inf]
        if not terms:
            return 0.0 + 0.0j
        anchor = max(t.log_magnitude for t in terms)
        acc = 0.0 + 0.0j
        for t in terms:
            acc += cmath.rect(math.exp(t.log_magnitude - anchor), t.phase)
        if acc == 0:
            return 0.0 + 0.0j
        return cmath.rect(math.exp(anchor + math.log(abs(acc))), cmath.phase(acc))


def _check_compatible(a: ProductStateSuperposition, b: ProductStateSuperposition):
    if a.n_sites != b.n_sites:
        raise ValueError(f"site counts differ: {a.n_sites} vs {b.n_sites}")


def overlap(a: ProductStateSuperposition, b: ProductStateSuperposition) -> complex:
    """<a|b> accumulated in the log domain over all term pairs."""
    _check_compatible(a, b)
    n = a.n_sites
    singles = a.local_states.conj() @ b.local_states.T
    pieces = []
    for i in range(a.n_terms):
        for j in range(b.n_terms):
            w = LogComplex.from_complex(np.conj(a.weights[i]) * b.weights[j])
            pieces.append(w * LogComplex.from_complex(singles[i, j]).power(n))
    return LogComplex.sum(pieces)


def apply_local_unitary(state: ProductStateSuperposition, u) -> ProductStateSuperposition:
    """Apply the same single-qubit unitary to every site.

    The term structure is preserved: each local state is mapped through the
    unitary (and re-normalised against rounding drift).
    """
    mat = u.entries if isinstance(u, UnitaryOperator) else np.asarray(u, dtype=complex)
    if mat.shape != (2, 2):
        raise ValueError("expected a 2x2 unitary")
    new_locals = state.local_states @ mat.T
    new_locals = new_locals / np.linalg.norm(new_locals, axis=1)[:, None]
    return ProductStateSuperposition(
        n_sites=state.n_sites,
        weights=state.weights,
        local_states=new_locals,
        normalized=state.normalized,
    )


def pauli_string_expectation(state: ProductStateSuperposition, k: int) -> float:
    """Expectation of the all-sites Pauli string sigma_k^(xN)."""
    flipped = apply_local_unitary(state, pauli_matrix(k))
    val = overlap(state, flipped)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Pauli string expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def inserted_sum_overlap(
    a: ProductStateSuperposition, b: ProductStateSuperposition, op
) -> complex:
    """<a| sum_n op^[n] |b> for a single-site operator op.

    For each term pair the N single-site insertions collapse to
    N * <alpha|op|beta> * <alpha|beta>^(N-1), evaluated with direct log-domain
    powers (never by dividing out the plain overlap). A vanishing single-site
    overlap kills the pair for N >= 2.
    """
    _check_compatible(a, b)
    n = a.n_sites
    mat = np.asarray(op.entries if hasattr(op, "entries") else op, dtype=complex)
    if mat.shape != (2, 2):
        raise ValueError("expected a 2x2 operator")
    singles = a.local_states.conj() @ b.local_states.T
    inserted = a.local_states.conj() @ mat @ b.local_states.T
    pieces = []
    log_n = LogComplex.from_complex(complex(n))
    for i in range(a.n_terms):
        for j in range(b.n_terms):
            if singles[i, j] == 0 and n >= 2:
                continue
            w = LogComplex.from_complex(np.conj(a.weights[i]) * b.weights[j])
            piece = (
                w
                * log_n
                * LogComplex.from_complex(inserted[i, j])
                * LogComplex.from_complex(singles[i, j]).power(n - 1)
            )
            pieces.append(piece)
    return LogComplex.sum(pieces)
