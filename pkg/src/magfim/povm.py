"""POVM containers shared by the quantum-limit and measured-information code.

Elements are stored structurally (projectors onto product-state
superpositions, global Pauli-string mixtures, dense rank-one projectors, or
the complement that tops the set up to the identity) so that validity and
probabilities can be evaluated at system sizes far beyond the dense cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL, dense_cap
from .engine import overlap
from .errors import DenseCapExceededError, PovmValidityError
from .operators import apply_on_all_sites, pauli_matrix
from .probes import ProductStateSuperposition, dense_amplitudes

__all__ = [
    "ProjectorElement",
    "DenseProjectorElement",
    "PauliStringElement",
    "ComplementElement",
    "Povm",
    "ValidityReport",
    "check_validity",
    "check_validity_dense",
]


@dataclass(frozen=True, eq=False)
class ProjectorElement:
    """Rank-one projector onto a normalised product-state superposition."""

    state: ProductStateSuperposition

    def __post_init__(self):
        if not self.state.normalized:
            raise ValueError("projector element requires a normalised state")


@dataclass(frozen=True, eq=False)
class DenseProjectorElement:
    """Rank-one projector onto an explicit dense unit vector."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > TOL.state_norm:
            raise ValueError("dense projector vector must have unit norm")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)


@dataclass(frozen=True, eq=False)
class PauliStringElement:
    """(identity + sign * sigma_k^(xN)) / 6; eigenvalues are 0 and 1/3."""

    direction: int
    sign: int

    def __post_init__(self):
        if self.direction not in (1, 2, 3):
            raise ValueError("direction must be 1, 2 or 3")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


@dataclass(frozen=True, eq=False)
class ComplementElement:
    """Identity minus the sum of every other element in the set."""


PovmElement = (ProjectorElement, DenseProjectorElement, PauliStringElement, ComplementElement)


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite set of positive operators summing to the identity."""

    n_sites: int
    elements: tuple
    labels: tuple
    deltas: tuple | None = None

    def __post_init__(self):
        elements = tuple(self.elements)
        labels = tuple(self.labels)
        if len(elements) != len(labels):
            raise ValueError("one label per element is required")
        if not elements:
            raise ValueError("a POVM needs at least one element")
        if sum(isinstance(e, ComplementElement) for e in elements) > 1:
            raise ValueError("at most one complement element is allowed")
        for e in elements:
            if not isinstance(e, PovmElement):
                raise ValueError(f"unsupported element type {type(e).__name__}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", labels)
        if self.deltas is not None:
            object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def has_complement(self) -> bool:
        return any(isinstance(e, ComplementElement) for e in self.elements)


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    min_eigenvalue: float
    completeness_residual: float
    detail: str


def _projector_vectors_dense(povm: Povm) -> list[np.ndarray]:
    vecs = []
    for el in povm.elements:
        if isinstance(el, ProjectorElement):
            vecs.append(dense_amplitudes(el.state))
        elif isinstance(el, DenseProjectorElement):
            vecs.append(np.asarray(el.vector))
    return vecs


def check_validity(povm: Povm) -> ValidityReport:
    """Structural validity check, usable at any system size.

    Pauli-string sets are valid algebraically. For projector sets closed by a
    complement, every explicit element is positive by construction and the
    complement is positive exactly when the largest eigenvalue of the
    projector Gram matrix stays below one.
    """
    els = povm.elements
    if all(isinstance(e, PauliStringElement) for e in els):
        signs = {(e.direction, e.sign) for e in els}
        complete = signs == {(k, s) for k in (1, 2, 3) for s in (1, -1)}
        residual = 0.0 if complete else 1.0
        return ValidityReport(complete, 0.0, residual, "pauli-string family, algebraic check")

    if not povm.has_complement():
        raise PovmValidityError("projector sets must carry a complement element")
    projectors = [e for e in els if isinstance(e, ProjectorElement)]
    dense_proj = [e for e in els if isinstance(e, DenseProjectorElement)]
    if projectors and dense_proj:
        raise PovmValidityError("mixed projector representations are not supported")
    if projectors:
        m = len(projectors)
        gram = np.empty((m, m), dtype=complex)
        for i, a in enumerate(projectors):
            for j, b in enumerate(projectors):
                gram[i, j] = overlap(a.state, b.state)
    else:
        vecs = _projector_vectors_dense(povm)
        arr = np.stack(vecs)
        gram = arr.conj() @ arr.T
    top = float(np.linalg.eigvalsh(gram).max())
    min_eig = 1.0 - top
    ok = min_eig >= -TOL.povm_psd
    return ValidityReport(
        ok, min_eig, 0.0, f"complement min eigenvalue {min_eig:.3e} from the projector Gram"
    )


def element_matrix(element, n_sites: int) -> np.ndarray:
    """Dense matrix of a non-complement element (small systems only)."""
    dim = 2**n_sites
    if isinstance(element, ProjectorElement):
        v = dense_amplitudes(element.state)
        return np.outer(v, v.conj())
    if isinstance(element, DenseProjectorElement):
        v = element.vector
        if v.size != dim:
            raise ValueError("dense projector has the wrong dimension")
        return np.outer(v, v.conj())
    if isinstance(element, PauliStringElement):
        string = np.eye(dim, dtype=complex)
        string = np.stack(
            [
                apply_on_all_sites(pauli_matrix(element.direction), col, n_sites)
                for col in string.T
            ]
        ).T
        return (np.eye(dim, dtype=complex) + element.sign * string) / 6.0
    raise ValueError(f"cannot materialise element of type {type(element).__name__}")


def dense_matrices(povm: Povm) -> list[np.ndarray]:
    """All element matrices, with the complement materialised by subtraction."""
    n = povm.n_sites
    if n > dense_cap():
        raise DenseCapExceededError(f"{n} sites exceeds the dense cap {dense_cap()}")
    dim = 2**n
    out = []
    total = np.zeros((dim, dim), dtype=complex)
    complement_idx = None
    for idx, el in enumerate(povm.elements):
        if isinstance(el, ComplementElement):
            complement_idx = idx
            out.append(None)
            continue
        mat = element_matrix(el, n)
        total += mat
        out.append(mat)
    if complement_idx is not None:
        out[complement_idx] = np.eye(dim, dtype=complex) - total
    return out


def check_validity_dense(povm: Povm, matrix_cap: int = 10) -> ValidityReport:
    """Dense-oracle validity check: PSD of every element and completeness.

    Full matrices are materialised up to ``matrix_cap`` sites; above that
    (still within the dense cap) projector sets are checked through their
    dense statevector Gram, which carries the same spectral content.
    """
    n = povm.n_sites
    if n > dense_cap():
        raise DenseCapExceededError(f"{n} sites exceeds the dense cap {dense_cap()}")
    if n <= matrix_cap:
        mats = dense_matrices(povm)
        dim = 2**n
        min_eig = min(float(np.linalg.eigvalsh(m).min()) for m in mats)
        residual = float(np.abs(sum(mats) - np.eye(dim)).max())
        ok = min_eig >= -TOL.povm_psd and residual <= TOL.povm_completeness
        return ValidityReport(ok, min_eig, residual, "dense matrices")
    if all(isinstance(e, PauliStringElement) for e in povm.elements):
        return check_validity(povm)
    vecs = _projector_vectors_dense(povm)
    if not vecs or not povm.has_complement():
        raise PovmValidityError("cannot run the vector-based dense check on this set")
    arr = np.stack(vecs)
    gram = arr.conj() @ arr.T
    vec_defect = float(np.abs(np.linalg.norm(arr, axis=1) - 1.0).max())
    min_eig = 1.0 - float(np.linalg.eigvalsh(gram).max())
    ok = min_eig >= -TOL.povm_psd and vec_defect <= TOL.povm_completeness
    return ValidityReport(ok, min_eig, vec_defect, "dense statevector Gram")
