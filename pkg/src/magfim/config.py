"""Central numerical configuration: tolerances and the dense-backend cap."""

from __future__ import annotations

import os
from dataclasses import dataclass

#: Environment variable overriding the dense statevector cap.
DENSE_CAP_ENV = "MAGFIM_DENSE_CAP"

#: Default maximum number of qubits handled by dense statevector routines.
DEFAULT_DENSE_CAP = 14

#: Stand-in for "phases approaching zero"; the closed-form field-direction
#: unit vector is undefined at exactly zero field.
PHI_NEAR_ZERO = (1e-7, 1e-7, 1e-7)


@dataclass(frozen=True)
class Tolerances:
    """All tolerances used across the package, in one record."""

    hermiticity: float = 1e-12
    unitarity: float = 1e-12
    state_norm: float = 1e-12
    trace_one: float = 1e-12
    density_psd: float = 1e-10
    superposition_norm: float = 1e-10
    fisher_symmetry: float = 1e-10
    fisher_psd: float = 1e-8
    rank_rtol: float = 1e-10
    degenerate_gap: float = 1e-8
    filter_series: float = 1e-6
    sinc_series: float = 1e-4
    marginal_consistency: float = 1e-8
    attainability: float = 1e-8
    gram_reorth: float = 1e-8
    povm_psd: float = 1e-10
    povm_completeness: float = 1e-10
    probability_bound: float = 1e-12
    probability_sum: float = 1e-10
    prob_floor: float = 1e-14
    grad_consistency: float = 1e-4


TOL = Tolerances()


def dense_cap() -> int:
    """Dense-backend qubit cap, honouring the environment override."""
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{DENSE_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError(f"{DENSE_CAP_ENV} must be positive, got {cap}")
    return cap
