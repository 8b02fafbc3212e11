"""Simultaneous estimation of all three components of a uniform magnetic field.

Quantum and classical Fisher information for GHZ-type probes on N qubits,
saturating measurements, realistic measurement families and system-size
scans, with a transfer-matrix backend that keeps large N exact and cheap.
"""

from .config import DEFAULT_DENSE_CAP, DENSE_CAP_ENV, PHI_NEAR_ZERO, TOL, Tolerances, dense_cap
from .engine import LogComplex, apply_local_unitary, inserted_sum_overlap, overlap, pauli_string_expectation
from .errors import (
    AttainabilityError,
    ConfigError,
    DenseCapExceededError,
    LinearDependenceError,
    MagfimError,
    MarginalMismatchError,
    PovmValidityError,
    RankDeficiencyError,
)
from .generators import (
    FieldParams,
    GeneratorSet,
    PauliReduction,
    generator_pair_kernel,
    generator_pair_trace,
    local_generator,
    pauli_coefficients,
    phase_filter,
    sinc,
    site_hamiltonian,
    site_unitary,
)
from .measurements import (
    ProbabilityVector,
    classical_fim,
    large_n_fim,
    measured_fim,
    outcome_probabilities,
    povm_ghz_projectors,
    povm_pauli_strings,
    probability_gradients,
    probability_gradients_fd,
)
from .operators import (
    DensityMatrix,
    HermitianOperator,
    PureState,
    UnitaryOperator,
    embed_local,
    hermitian_eig,
    pauli_operators,
    reduced_density_matrix,
    unitary_from_hamiltonian,
)
from .povm import (
    ComplementElement,
    DenseProjectorElement,
    PauliStringElement,
    Povm,
    ProjectorElement,
    check_validity,
    check_validity_dense,
)
from .probes import (
    ProductStateSuperposition,
    admissible_probe_deltas,
    dense_statevector,
    ghz_state,
    pauli_eigenvectors,
    probe_normalization,
    probe_two_site_marginal,
    single_site_marginal,
    triple_ghz_probe,
    two_site_marginal,
)
from .qfim import (
    FisherMatrix,
    VarianceTriple,
    optimal_povm,
    product_probe_qfim_rank,
    qfim_closed_form,
    qfim_dense,
    qfim_finite_difference,
    qfim_from_marginals,
    scenario_variances,
    single_param_qfi,
    sld_commutator_expectation,
    sld_operators,
    total_variance,
)
from .scan import (
    DEFAULT_N_VALUES,
    DEFAULT_PHI,
    ScanConfig,
    ScenarioRecord,
    ValidationReport,
    emit_report,
    run_scan,
    run_validation,
)

__version__ = "0.1.0"
