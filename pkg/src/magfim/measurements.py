"""Realistic measurement families and the classical Fisher information.

Two families are provided: projectors onto GHZ states in the three Pauli
directions (closed by a complement element) and global Pauli-string
mixtures. Outcome probabilities and their analytic parameter gradients are
available from a dense statevector backend (small N) and from the
transfer-matrix backend (any N); both agree to solver precision where they
overlap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import TOL, dense_cap
from .engine import (
    apply_local_unitary,
    inserted_sum_overlap,
    overlap,
    pauli_string_expectation,
)
from .errors import DenseCapExceededError, PovmValidityError
from .generators import GeneratorSet, local_generator, site_unitary
from .operators import apply_on_all_sites, apply_on_site, pauli_matrix
from .povm import (
    ComplementElement,
    DenseProjectorElement,
    PauliStringElement,
    Povm,
    ProjectorElement,
    check_validity,
)
from .probes import (
    DELTA_GRID,
    ProductStateSuperposition,
    dense_amplitudes,
    ghz_state,
    triple_ghz_probe,
)
from .qfim import FisherMatrix

__all__ = [
    "ProbabilityVector",
    "povm_ghz_projectors",
    "povm_pauli_strings",
    "outcome_probabilities",
    "probability_gradients",
    "probability_gradients_fd",
    "classical_fim",
    "measured_fim",
    "large_n_fim",
]

_DIRECTION_NAMES = {1: "x", 2: "y", 3: "z"}


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """Outcome probabilities: clamped to [0, 1], summing to one."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.min(initial=0.0) < -TOL.probability_bound or p.max(initial=0.0) > 1.0 + TOL.probability_bound:
            raise ValueError("probabilities outside [0, 1] beyond tolerance")
        total = float(p.sum())
        if abs(total - 1.0) > TOL.probability_sum:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __len__(self) -> int:
        return self.probs.size


def _ghz_projector_povm(n_sites: int, deltas) -> Povm:
    elements = [
        ProjectorElement(ghz_state(k, n_sites, deltas[k - 1])) for k in (1, 2, 3)
    ]
    elements.append(ComplementElement())
    labels = tuple(_DIRECTION_NAMES[k] for k in (1, 2, 3)) + ("complement",)
    return Povm(n_sites=n_sites, elements=tuple(elements), labels=labels, deltas=tuple(deltas))


def povm_ghz_projectors(n_sites: int, deltas=None) -> Povm:
    """GHZ projectors along x, y, z plus the normalising complement.

    With explicit ``deltas`` the set is built as requested and rejected if
    invalid. Otherwise the relative phases are searched on the discrete grid
    {0, pi/2, pi, 3pi/2}^3, preferring antisymmetric (pi) phases: those make
    the three projectors mutually orthogonal where admissible and place each
    outcome at the steep point of its fringe. The symmetric choice delta = 0
    is never admissible at small even N (the complement acquires an
    eigenvalue of about -2^(1-N/2)).
    """
    if n_sites < 2 or n_sites % 2 != 0:
        raise ValueError("GHZ projector family requires even N >= 2")
    if deltas is not None:
        deltas = tuple(float(d) for d in deltas)
        if len(deltas) != 3:
            raise ValueError("expected three phases")
        povm = _ghz_projector_povm(n_sites, deltas)
        report = check_validity(povm)
        if not report.ok:
            raise PovmValidityError(
                f"GHZ projector set at N={n_sites} with deltas={deltas} is invalid: {report.detail}"
            )
        return povm

    candidates = list(itertools.product(DELTA_GRID, repeat=3))
    ranked = sorted(
        range(len(candidates)),
        key=lambda i: (-sum(1 for x in candidates[i] if x == np.pi), i),
    )
    for idx in ranked:
        povm = _ghz_projector_povm(n_sites, candidates[idx])
        if check_validity(povm).ok:
            return povm
    raise PovmValidityError(f"no admissible phases on the grid for N={n_sites}")


def povm_pauli_strings(n_sites: int) -> Povm:
    """The six global Pauli-string elements (identity +- sigma_k^(xN))/6."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    elements = []
    labels = []
    for k in (1, 2, 3):
        for sign in (1, -1):
            elements.append(PauliStringElement(direction=k, sign=sign))
            labels.append(f"{_DIRECTION_NAMES[k]}{'+' if sign == 1 else '-'}")
    return Povm(n_sites=n_sites, elements=tuple(elements), labels=tuple(labels))


def _resolve_backend(backend: str, povm: Povm) -> str:
    if backend not in ("auto", "dense", "superposition"):
        raise ValueError(f"unknown backend {backend!r}")
    needs_dense = any(isinstance(e, DenseProjectorElement) for e in povm.elements)
    if backend == "auto":
        backend = "dense" if (needs_dense or povm.n_sites <= 12) else "superposition"
    if backend == "superposition" and needs_dense:
        raise ValueError("dense projector elements require the dense backend")
    if backend == "dense" and povm.n_sites > dense_cap():
        raise DenseCapExceededError(
            f"dense backend refused: {povm.n_sites} sites exceeds the cap {dense_cap()}"
        )
    return backend


def _complement_close(values: list[float]) -> float:
    rest = 1.0 - sum(values)
    if rest < -TOL.povm_psd:
        raise PovmValidityError(f"complement probability is {rest:.3e}; the set is not a POVM")
    return max(rest, 0.0)


def _dense_eval(probe, params, povm, gens, want_gradients):
    n = povm.n_sites
    amps = dense_amplitudes(probe)
    u = site_unitary(params, gens)
    psi_phi = apply_on_all_sites(u, amps, n)
    chis = []
    if want_gradients:
        d = 3 if gens is None else gens.d
        for k in range(1, d + 1):
            a = local_generator(params, k, gens).entries
            summed = np.zeros_like(amps)
            for site in range(n):
                summed += apply_on_site(a, amps, n, site)
            chis.append(apply_on_all_sites(u, summed, n))

    probs: list[float] = []
    grads: list[list[float]] = []
    comp_idx = None
    for idx, el in enumerate(povm.elements):
        if isinstance(el, ComplementElement):
            comp_idx = idx
            probs.append(0.0)
            grads.append([0.0] * len(chis))
            continue
        if isinstance(el, (ProjectorElement, DenseProjectorElement)):
            v = el.vector if isinstance(el, DenseProjectorElement) else dense_amplitudes(el.state)
            amp = complex(v.conj() @ psi_phi)
            probs.append(abs(amp) ** 2)
            grads.append([2.0 * float(np.imag(np.conj(amp) * (v.conj() @ chi))) for chi in chis])
        elif isinstance(el, PauliStringElement):
            flipped = apply_on_all_sites(pauli_matrix(el.direction), psi_phi, n)
            m = float(np.real(psi_phi.conj() @ flipped))
            probs.append((1.0 + el.sign * m) / 6.0)
            grads.append(
                [
                    (
                        2.0 * float(np.imag(psi_phi.conj() @ chi))
                        + el.sign * 2.0 * float(np.imag(flipped.conj() @ chi))
                    )
                    / 6.0
                    for chi in chis
                ]
            )
        else:
            raise ValueError(f"unsupported element {type(el).__name__}")
    if comp_idx is not None:
        others = [p for i, p in enumerate(probs) if i != comp_idx]
        probs[comp_idx] = _complement_close(others)
        if want_gradients:
            grads[comp_idx] = [
                -sum(g[k] for i, g in enumerate(grads) if i != comp_idx)
                for k in range(len(chis))
            ]
    return np.array(probs), np.array(grads).T if want_gradients else None


def _superposition_eval(probe, params, povm, gens, want_gradients):
    n = povm.n_sites
    if probe.n_sites != n:
        raise ValueError("probe and POVM disagree on the number of sites")
    u = site_unitary(params, gens)
    psi_phi = apply_local_unitary(probe, u)
    ops = []
    if want_gradients:
        d = 3 if gens is None else gens.d
        for k in range(1, d + 1):
            a = local_generator(params, k, gens).entries
            ops.append(u @ a @ u.conj().T)

    probs: list[float] = []
    grads: list[list[float]] = []
    comp_idx = None
    for idx, el in enumerate(povm.elements):
        if isinstance(el, ComplementElement):
            comp_idx = idx
            probs.append(0.0)
            grads.append([0.0] * len(ops))
            continue
        if isinstance(el, ProjectorElement):
            amp = overlap(el.state, psi_phi)
            probs.append(abs(amp) ** 2)
            grads.append(
                [
                    2.0 * float(np.imag(np.conj(amp) * inserted_sum_overlap(el.state, psi_phi, op)))
                    for op in ops
                ]
            )
        elif isinstance(el, PauliStringElement):
            m = pauli_string_expectation(psi_phi, el.direction)
            probs.append((1.0 + el.sign * m) / 6.0)
            flipped = apply_local_unitary(psi_phi, pauli_matrix(el.direction))
            grads.append(
                [
                    (
                        2.0 * float(np.imag(inserted_sum_overlap(psi_phi, psi_phi, op)))
                        + el.sign * 2.0 * float(np.imag(inserted_sum_overlap(flipped, psi_phi, op)))
                    )
                    / 6.0
                    for op in ops
                ]
            )
        else:
            raise ValueError(
                f"element {type(el).__name__} is not supported by the superposition backend"
            )
    if comp_idx is not None:
        others = [p for i, p in enumerate(probs) if i != comp_idx]
        probs[comp_idx] = _complement_close(others)
        if want_gradients:
            grads[comp_idx] = [
                -sum(g[k] for i, g in enumerate(grads) if i != comp_idx)
                for k in range(len(ops))
            ]
    return np.array(probs), np.array(grads).T if want_gradients else None


def outcome_probabilities(
    probe: ProductStateSuperposition, params, povm: Povm, backend: str = "auto",
    gens: GeneratorSet | None = None,
) -> ProbabilityVector:
    """p(outcome) = <psi_phi| element |psi_phi> for the evolved probe."""
    backend = _resolve_backend(backend, povm)
    evaluate = _dense_eval if backend == "dense" else _superposition_eval
    probs, _ = evaluate(probe, params, povm, gens, want_gradients=False)
    return ProbabilityVector(probs)


def probability_gradients(
    probe: ProductStateSuperposition, params, povm: Povm, backend: str = "auto",
    gens: GeneratorSet | None = None,
) -> np.ndarray:
    """Analytic gradients d p(outcome) / d phi_k, shape (d, outcomes).

    Built from the same effective-generator insertions that define the QFIM,
    so no finite differencing is involved.
    """
    backend = _resolve_backend(backend, povm)
    evaluate = _dense_eval if backend == "dense" else _superposition_eval
    _, grads = evaluate(probe, params, povm, gens, want_gradients=True)
    return grads


def probability_gradients_fd(
    probe: ProductStateSuperposition, params, povm: Povm, step: float = 1e-5,
    backend: str = "auto", gens: GeneratorSet | None = None,
) -> np.ndarray:
    """Central finite differences of the outcome probabilities (oracle)."""
    phi0 = np.asarray(params, dtype=float).reshape(-1)
    d = phi0.size
    cols = []
    for k in range(d):
        offset = np.zeros(d)
        offset[k] = step
        up = outcome_probabilities(probe, phi0 + offset, povm, backend, gens).probs
        down = outcome_probabilities(probe, phi0 - offset, povm, backend, gens).probs
        cols.append((up - down) / (2.0 * step))
    return np.stack(cols)


def classical_fim(probs, grads) -> FisherMatrix:
    """Classical Fisher information sum_n (d_k p_n)(d_l p_n) / p_n.

    Outcomes below the probability floor contribute only when their gradient
    is consistently small (|grad| <= sqrt(p) * 1e-4); otherwise they are
    skipped and flagged in the result's warnings, keeping the matrix finite
    and the decision auditable.
    """
    p = probs.probs if isinstance(probs, ProbabilityVector) else np.asarray(probs, float)
    g = np.asarray(grads, dtype=float)
    if g.ndim != 2 or g.shape[1] != p.size:
        raise ValueError("gradients must have shape (d, outcomes)")
    d = g.shape[0]
    fim = np.zeros((d, d))
    warnings = []
    for i in range(p.size):
        pi = float(p[i])
        gi = g[:, i]
        if pi >= TOL.prob_floor:
            fim += np.outer(gi, gi) / pi
            continue
        bound = np.sqrt(max(pi, 0.0)) * TOL.grad_consistency
        if np.abs(gi).max(initial=0.0) <= bound:
            if pi > 0.0:
                fim += np.outer(gi, gi) / pi
            continue
        warnings.append(
            f"outcome {i}: probability {pi:.3e} below floor with gradient "
            f"{np.abs(gi).max():.3e}; dropped from the information sum"
        )
    return FisherMatrix(0.5 * (fim + fim.T), warnings=tuple(warnings))


def measured_fim(
    probe: ProductStateSuperposition, params, povm: Povm, backend: str = "auto",
    gens: GeneratorSet | None = None,
) -> FisherMatrix:
    """Classical Fisher information of one probe/measurement pair."""
    backend = _resolve_backend(backend, povm)
    evaluate = _dense_eval if backend == "dense" else _superposition_eval
    probs, grads = evaluate(probe, params, povm, gens, want_gradients=True)
    return classical_fim(ProbabilityVector(probs), grads)


def large_n_fim(n_sites: int, params, povm_family: int, deltas=None) -> FisherMatrix:
    """Measured information of the default probe at arbitrary system size.

    Uses the transfer-matrix backend throughout, so the cost is independent
    of N apart from scalar powers; N up to 10^4 is routine.
    """
    if povm_family == 1:
        povm = povm_ghz_projectors(n_sites, deltas)
    elif povm_family == 2:
        povm = povm_pauli_strings(n_sites)
    else:
        raise ValueError(f"povm_family must be 1 or 2, got {povm_family!r}")
    probe = triple_ghz_probe(n_sites)
    return measured_fim(probe, params, povm, backend="superposition")
