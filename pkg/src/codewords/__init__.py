"""Exact simulator and verification toolkit for quantum codewords.

Encodes a logical qubit into physical qubits, corrupts it with coherent,
mixed, or environment-entangling errors, recovers it by purely unitary means
(no syndrome is ever measured), and exposes the constrained-dynamics algebra
that lives on the codeword subspace.
"""

from .hilbert import (
    NORM_TOL,
    PRODUCT_TOL,
    UNITARY_TOL,
    DenseOperator,
    DensityMatrix,
    FactorizationReport,
    StateVector,
    apply,
    basis_state,
    embed,
    evolve_density,
    factorization,
    partial_trace,
    permute,
    qubit_state,
    random_state,
    random_unitary,
    tensor,
    tensor_operators,
)
from .codes import (
    BUILTIN_CODES,
    CodeSpec,
    NonOrthonormalBasis,
    OverlapReport,
    QuantumCode,
    build_code,
    builtin_code,
    builtin_spec,
    load_spec,
    save_spec,
)
from .errors import (
    BranchDecomposition,
    BranchStates,
    EnvironmentModel,
    ErrorEvent,
    apply_coherent,
    apply_mixture,
    branch_decompose,
    branch_states,
    entangle_environment,
    reconstruct_from_branches,
)
from .recovery import (
    NotAProduct,
    NotCorrigible,
    RecoveryOutcome,
    SyndromeTransferUnitary,
    build_syndrome_transfer,
    fidelity,
    recover_by_decoding,
    recover_in_place,
    recover_mixture,
    refresh_ancilla,
)
from .constraints import (
    ConstraintOperator,
    ConstraintSet,
    NotLegal,
    commutator_closure,
    constraint_basis,
    constraint_operator,
    gauge_lift,
    little_group_element,
    logical_lift,
    multi_codeword_constraint,
    representation_matrix,
    scalar_product_check,
    two_qubit_lift,
)

__version__ = "0.1.0"
