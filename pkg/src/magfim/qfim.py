"""Quantum Fisher information for unitary families of uniform site Hamiltonians.

The QFIM is computed by four independent routes (statevector correlation
matrix, central finite differences, one- and two-site marginals, and the
closed form for the triple-GHZ probe), plus the machinery around it: SLDs,
the commutator attainability test, the saturating projective measurement,
the product-probe rank bound and the three benchmark estimation strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PHI_NEAR_ZERO, TOL, dense_cap
from .errors import (
    AttainabilityError,
    DenseCapExceededError,
    LinearDependenceError,
    MarginalMismatchError,
    RankDeficiencyError,
)
from .generators import (
    GeneratorSet,
    as_field_params,
    local_generator,
    sinc,
    sinc_sq_deficit_ratio,
    site_unitary,
)
from .operators import (
    DensityMatrix,
    HermitianOperator,
    PureState,
    apply_on_all_sites,
    apply_on_site,
)
from .povm import ComplementElement, DenseProjectorElement, Povm

__all__ = [
    "FisherMatrix",
    "VarianceTriple",
    "qfim_dense",
    "qfim_finite_difference",
    "qfim_from_marginals",
    "qfim_closed_form",
    "total_variance",
    "scenario_variances",
    "sld_operators",
    "sld_commutator_expectation",
    "optimal_povm",
    "product_probe_qfim_rank",
    "single_param_qfi",
]


@dataclass(frozen=True, eq=False)
class FisherMatrix:
    """Real symmetric positive-semidefinite information matrix.

    ``warnings`` carries non-fatal diagnostics (for instance near-singular
    measurement outcomes) attached by the producing routine.
    """

    entries: np.ndarray
    warnings: tuple = ()

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must form a square matrix")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > TOL.fisher_symmetry * scale:
            raise ValueError("information matrix is not symmetric within tolerance")
        if float(np.linalg.eigvalsh(m).min()) < -TOL.fisher_psd * scale:
            raise ValueError("information matrix has a materially negative eigenvalue")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def d(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class VarianceTriple:
    """Total variances of the three benchmark strategies."""

    sep_individual: float
    ent_individual: float
    ent_simultaneous: float

    def __post_init__(self):
        for name in ("sep_individual", "ent_individual", "ent_simultaneous"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")


def _check_cap(n_sites: int):
    cap = dense_cap()
    if n_sites > cap:
        raise DenseCapExceededError(f"{n_sites} sites exceeds the dense cap {cap}")


def _resolve_psi(psi, n_sites: int) -> np.ndarray:
    amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, complex)
    if amps.size != 2**n_sites:
        raise ValueError(f"state dimension {amps.size} does not match {n_sites} sites")
    return amps


def _local_generators(params, gens: GeneratorSet | None):
    d = 3 if gens is None else gens.d
    mats = [local_generator(params, k, gens).entries for k in range(1, d + 1)]
    if mats[0].shape != (2, 2):
        raise ValueError("dense qubit routines require 2x2 generators")
    return mats


def _summed_generator_apply(a_mat: np.ndarray, amps: np.ndarray, n_sites: int) -> np.ndarray:
    """(sum_n a^[n]) |psi> without materialising the big operator."""
    out = np.zeros_like(amps)
    for site in range(n_sites):
        out += apply_on_site(a_mat, amps, n_sites, site)
    return out


def _symmetric(fill) -> np.ndarray:
    d = len(fill)
    m = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            m[i, j] = m[j, i] = fill[i][j]
    return m


def qfim_dense(psi, params, n_sites: int, gens: GeneratorSet | None = None) -> FisherMatrix:
    """QFIM as the correlation matrix of the summed effective generators.

    Entry (k, l) is 4 Re[<psi|A_k A_l|psi> - <psi|A_k|psi><psi|A_l|psi>]
    with A_k the sum over sites of the single-site effective generator.
    """
    _check_cap(n_sites)
    amps = _resolve_psi(psi, n_sites)
    a_mats = _local_generators(params, gens)
    vs = [_summed_generator_apply(a, amps, n_sites) for a in a_mats]
    means = [float(np.real(amps.conj() @ v)) for v in vs]
    d = len(a_mats)
    fill = [
        [4.0 * (float(np.real(vs[i].conj() @ vs[j])) - means[i] * means[j]) for j in range(d)]
        for i in range(d)
    ]
    return FisherMatrix(_symmetric(fill))


def qfim_finite_difference(
    psi, params, n_sites: int, step: float = 1e-5, gens: GeneratorSet | None = None
) -> FisherMatrix:
    """Independent QFIM oracle from central finite differences of the evolved state.

    4 Re[<d_k psi|d_l psi> - <d_k psi|psi><psi|d_l psi>] with derivatives of
    U(phi)|psi> taken numerically; agreement with the analytic routes is
    expected at order step^2.
    """
    if not 1e-6 <= step <= 1e-3:
        raise ValueError(f"step must lie in [1e-6, 1e-3], got {step}")
    _check_cap(n_sites)
    amps = _resolve_psi(psi, n_sites)
    phi0 = (
        as_field_params(params).phi
        if gens is None
        else np.asarray(params, dtype=float).reshape(-1)
    )
    d = phi0.size

    def evolved(phi):
        u = site_unitary(phi, gens)
        return apply_on_all_sites(u, amps, n_sites)

    centre = evolved(phi0)
    derivs = []
    for k in range(d):
        offset = np.zeros(d)
        offset[k] = step
        derivs.append((evolved(phi0 + offset) - evolved(phi0 - offset)) / (2.0 * step))
    overlaps = [complex(centre.conj() @ dk) for dk in derivs]
    fill = [
        [
            4.0
            * float(
                np.real(derivs[i].conj() @ derivs[j])
                - np.real(np.conj(overlaps[i]) * overlaps[j])
            )
            for j in range(d)
        ]
        for i in range(d)
    ]
    return FisherMatrix(_symmetric(fill))


def qfim_from_marginals(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    params,
    n_sites: int,
    gens: GeneratorSet | None = None,
) -> FisherMatrix:
    """QFIM of a permutationally invariant pure state from its marginals.

    The N-site QFIM collapses to 4N * (one-site part) + 4N(N-1) * (two-site
    part); the one-site part carries the shot-noise scaling and the two-site
    part all of the quantum enhancement.
    """
    if rho1.dim != 2 or rho2.dim != 4:
        raise ValueError("expected a 2x2 one-site and 4x4 two-site marginal")
    r2 = rho2.entries.reshape(2, 2, 2, 2)
    left = np.trace(r2, axis1=1, axis2=3)
    right = np.trace(r2, axis1=0, axis2=2)
    worst = max(np.abs(left - rho1.entries).max(), np.abs(right - rho1.entries).max())
    if worst > TOL.marginal_consistency:
        raise MarginalMismatchError(
            f"two-site marginal disagrees with the one-site marginal by {worst:.3e}"
        )
    a_mats = _local_generators(params, gens)
    d = len(a_mats)
    means = [float(np.real(np.trace(rho1.entries @ a))) for a in a_mats]
    one = [
        [
            float(np.real(np.trace(rho1.entries @ a_mats[i] @ a_mats[j])))
            - means[i] * means[j]
            for j in range(d)
        ]
        for i in range(d)
    ]
    two = [
        [
            float(np.real(np.trace(rho2.entries @ np.kron(a_mats[i], a_mats[j]))))
            - means[i] * means[j]
            for j in range(d)
        ]
        for i in range(d)
    ]
    n = n_sites
    fill = [
        [4.0 * n * one[i][j] + 4.0 * n * (n - 1) * 0.5 * (two[i][j] + two[j][i]) for j in range(d)]
        for i in range(d)
    ]
    return FisherMatrix(_symmetric(fill))


def qfim_closed_form(params, n_sites: int) -> FisherMatrix:
    """Closed-form QFIM of the triple-GHZ probe.

    (4/3) N (N+2) [ (1 - sinc^2 xi) eta_k eta_l + delta_kl sinc^2 xi ] with
    xi the field magnitude and eta its direction; the rank-one part is
    evaluated as a deficit ratio times phi_k phi_l so the zero-field limit is
    exact. Valid as stated at N = 8, 16, ... where the probe marginals take
    their closed form; exponentially close otherwise.
    """
    if n_sites < 2:
        raise ValueError("the probe needs at least two sites")
    phi = as_field_params(params).phi
    xi = float(np.linalg.norm(phi))
    scale = 4.0 * n_sites * (n_sites + 2) / 3.0
    m = sinc_sq_deficit_ratio(xi) * np.outer(phi, phi) + sinc(xi) ** 2 * np.eye(3)
    return FisherMatrix(scale * m)


def total_variance(fim: FisherMatrix) -> float:
    """Trace of the inverse information matrix (total estimation variance).

    Raises RankDeficiencyError when the matrix is singular at the relative
    rank tolerance; a pseudo-inverse would silently misstate the variance of
    the unresolvable directions.
    """
    w, v = np.linalg.eigh(fim.entries)
    top = float(w.max(initial=0.0))
    if top <= 0.0:
        raise RankDeficiencyError("information matrix is zero", null_directions=tuple(range(fim.d)))
    cut = TOL.rank_rtol * top
    null = [i for i in range(w.size) if w[i] <= cut]
    if null:
        directions = [tuple(np.round(v[:, i], 6)) for i in null]
        raise RankDeficiencyError(
            f"information matrix is rank deficient; null directions {directions}",
            null_directions=directions,
        )
    return float(np.sum(1.0 / w))


def scenario_variances(n_sites: int, params=PHI_NEAR_ZERO) -> VarianceTriple:
    """Total variances of the three benchmark strategies near zero field.

    Separable and individually entangled strategies split the register into
    three blocks of length N/3, so N must be divisible by three. The
    simultaneous strategy uses the full register and the closed-form QFIM.
    """
    if n_sites < 3 or n_sites % 3 != 0:
        raise ValueError("N not divisible by 3")
    xi = as_field_params(params).magnitude
    s2 = sinc(xi) ** 2
    sep = 9.0 / (4.0 * n_sites)
    ent_ind = 27.0 / (4.0 * n_sites**2)
    ent_sim = (3.0 + 6.0 / s2) / (4.0 * n_sites * (n_sites + 2))
    return VarianceTriple(sep, ent_ind, ent_sim)


def _evolved_vectors(psi, params, n_sites, gens):
    """U|psi> and the U A_k |psi> companions used by SLDs and the POVM."""
    amps = _resolve_psi(psi, n_sites)
    u = site_unitary(params, gens)
    a_mats = _local_generators(params, gens)
    evolved = apply_on_all_sites(u, amps, n_sites)
    companions = [
        apply_on_all_sites(u, _summed_generator_apply(a, amps, n_sites), n_sites)
        for a in a_mats
    ]
    return amps, evolved, companions


def sld_operators(psi, params, n_sites: int, gens: GeneratorSet | None = None):
    """Symmetric logarithmic derivatives of the evolved pure state.

    Each SLD is 2i U [|psi><psi|, A_k] U^dagger: rank at most two, with
    non-zero eigenvalues +-2 sqrt(<A_k^2> - <A_k>^2).
    """
    _check_cap(n_sites)
    amps, evolved, companions = _evolved_vectors(psi, params, n_sites, gens)
    slds = []
    for chi in companions:
        mat = 2j * (np.outer(evolved, chi.conj()) - np.outer(chi, evolved.conj()))
        slds.append(HermitianOperator(mat))
    return slds


def sld_commutator_expectation(
    psi, params, n_sites: int, k: int, l: int, gens: GeneratorSet | None = None
) -> complex:
    """Expectation of the SLD commutator [L_k, L_l] in the evolved state.

    Equals 8i Im[<psi|A_k A_l|psi>]; the quantum Cramer-Rao bound is
    attainable for this probe exactly when it vanishes for every pair.
    """
    _check_cap(n_sites)
    amps = _resolve_psi(psi, n_sites)
    a_mats = _local_generators(params, gens)
    d = len(a_mats)
    if not (1 <= k <= d and 1 <= l <= d):
        raise ValueError(f"parameter indices must lie in 1..{d}")
    vk = _summed_generator_apply(a_mats[k - 1], amps, n_sites)
    vl = _summed_generator_apply(a_mats[l - 1], amps, n_sites)
    return 8j * float(np.imag(vk.conj() @ vl))


def optimal_povm(psi, params, n_sites: int, gens: GeneratorSet | None = None) -> Povm:
    """Projective measurement saturating the quantum Cramer-Rao bound.

    Gram-Schmidt orthogonalisation of {U|psi>, U A_k|psi>}, seeded with the
    evolved probe state, gives d+1 rank-one projectors; the complement tops
    the set up to the identity. Requires vanishing SLD commutator
    expectations and a full-rank QFIM. The measured information of this set
    approaches the QFIM as the evaluation point approaches the construction
    point (at the construction point itself all informative outcomes have
    probability exactly zero).
    """
    _check_cap(n_sites)
    amps, evolved, companions = _evolved_vectors(psi, params, n_sites, gens)
    d = len(companions)
    for k in range(d):
        for l in range(k + 1, d):
            comm = sld_commutator_expectation(psi, params, n_sites, k + 1, l + 1, gens)
            if abs(comm) > TOL.attainability:
                raise AttainabilityError(
                    f"SLD commutator expectation for ({k + 1}, {l + 1}) is {comm:.3e}"
                )
    # Schur-complement positivity of the candidate Gram matrix is the QFIM
    # itself (up to the factor 4); a singular QFIM means dependent vectors.
    info = qfim_dense(psi, params, n_sites, gens)
    eigs = np.linalg.eigvalsh(info.entries)
    if eigs.min() <= TOL.rank_rtol * max(eigs.max(), 0.0):
        raise LinearDependenceError(
            "candidate vectors are linearly dependent (QFIM is rank deficient)"
        )

    basis = []
    for x in [evolved, *companions]:
        v = x.astype(complex).copy()
        original = np.linalg.norm(v)
        for b in basis:
            v -= (b.conj() @ v) * b
        if np.linalg.norm(v) < TOL.gram_reorth * original:
            # Re-orthogonalise once against accumulated rounding before
            # declaring dependence.
            for b in basis:
                v -= (b.conj() @ v) * b
        nrm = np.linalg.norm(v)
        if nrm < TOL.gram_reorth * original:
            raise LinearDependenceError("Gram-Schmidt collapsed a candidate vector")
        basis.append(v / nrm)
    elements = [DenseProjectorElement(b) for b in basis] + [ComplementElement()]
    labels = ["evolved_probe"] + [f"generator_{k}" for k in range(1, d + 1)] + ["complement"]
    return Povm(n_sites=n_sites, elements=tuple(elements), labels=tuple(labels))


def product_probe_qfim_rank(
    local_state, params, n_sites: int, gens: GeneratorSet | None = None
) -> tuple[int, int]:
    """Numerical QFIM rank of a uniform product probe and its ceiling 2(D-1)."""
    _check_cap(n_sites)
    local = np.asarray(local_state, dtype=complex).reshape(-1)
    if local.size != 2:
        raise ValueError("expected a single-qubit local state")
    local = local / np.linalg.norm(local)
    amps = np.array([1.0], dtype=complex)
    for _ in range(n_sites):
        amps = np.kron(amps, local)
    info = qfim_dense(amps, params, n_sites, gens)
    w = np.linalg.eigvalsh(info.entries)
    top = float(w.max(initial=0.0))
    rank = int(np.sum(w > TOL.rank_rtol * top)) if top > 0 else 0
    local_dim = 2 if gens is None else gens.local_dim
    return rank, 2 * (local_dim - 1)


def single_param_qfi(k: int, n_sites: int, strategy: str, params=PHI_NEAR_ZERO) -> float:
    """Best QFI for one field direction with product or GHZ probes.

    N g for optimal product probes and N^2 g for GHZ probes, where g is the
    squared spectral spread of the effective single-site generator (g -> 4
    at zero field).
    """
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if strategy not in ("product", "ghz"):
        raise ValueError(f"strategy must be 'product' or 'ghz', got {strategy!r}")
    a = local_generator(params, k)
    w = np.linalg.eigvalsh(a.entries)
    spread_sq = float((w.max() - w.min()) ** 2)
    factor = n_sites if strategy == "product" else n_sites**2
    return factor * spread_sq
