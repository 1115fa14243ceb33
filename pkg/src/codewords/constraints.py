"""Constrained dynamics on the codeword subspace.

Because codewords span only a corner of the physical Hilbert space, the
unitaries driving a computation are fixed only up to transformations of the
syndrome content -- a finite-dimensional cousin of gauge freedom.  This
module realizes that structure explicitly: ancilla ("gauge") transformations
lifted through the encoder, logical unitaries, the orthonormal basis of the
illegal subspace, the induced unitary representation on it, Hermitian
constraint operators that annihilate every legal state and close under
commutation, and the invariance of logical scalar products under shared
corruption.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codes import QuantumCode
from .hilbert import (
    DenseOperator,
    StateVector,
    embed,
    haar_unitary,
)

LEGAL_TOL = 1e-10


class NotLegal(Exception):
    """The unitary does not preserve the legal (codeword) subspace."""


def little_group_element(n_ancilla: int, seed: int) -> DenseOperator:
    """A random ancilla unitary fixing |a=0> exactly: the block 1 (+) g'.

    The residual block g' is Haar-random of order 2**n - 1.
    """
    if n_ancilla < 1:
        raise ValueError("need at least one ancilla qubit")
    dim = 2 ** n_ancilla
    g = np.zeros((dim, dim), dtype=np.complex128)
    g[0, 0] = 1.0
    g[1:, 1:] = haar_unitary(dim - 1, np.random.default_rng(seed))
    return DenseOperator(g, (dim,))


def gauge_lift(code: QuantumCode, g: DenseOperator) -> DenseOperator:
    """Lift an ancilla unitary to the physical space: E (1 (x) g) E+.

    The result reshuffles syndrome content only; it never touches the
    logical qubit, so corrigible corruptions map to corrigible corruptions.
    """
    if g.dim != code.n_syndromes:
        raise ValueError(f"expected an ancilla unitary of order {code.n_syndromes}")
    middle = np.kron(np.eye(2), g.entries)
    return DenseOperator(code.encoding @ middle @ code.encoding.conj().T,
                         (2,) * code.n_physical)


def logical_lift(code: QuantumCode, u: DenseOperator) -> DenseOperator:
    """Lift a one-qubit logical unitary to the physical space: E (u (x) 1) E+."""
    if u.dim != 2:
        raise ValueError("expected a single-qubit unitary")
    middle = np.kron(u.entries, np.eye(code.n_syndromes))
    return DenseOperator(code.encoding @ middle @ code.encoding.conj().T,
                         (2,) * code.n_physical)


def two_qubit_lift(code1: QuantumCode, code2: QuantumCode,
                   u12: DenseOperator,
                   g1: DenseOperator | None = None,
                   g2: DenseOperator | None = None) -> DenseOperator:
    """Lift a two-qubit logical unitary across two separately encoded qubits.

    In the decoded picture the factors are (logical1, ancilla1, logical2,
    ancilla2); ``u12`` acts on the two logical slots and the optional ``g``s
    on their ancillas.  Logical steps built this way are unaffected by
    corrigible corruptions of either codeword.
    """
    if u12.dim != 4:
        raise ValueError("expected a two-qubit logical unitary")
    decoded_factors = (2, code1.n_syndromes, 2, code2.n_syndromes)
    middle = embed(DenseOperator(u12.entries, (2, 2)), (0, 2), decoded_factors)
    if g1 is not None:
        middle = middle @ embed(g1, (1,), decoded_factors)
    if g2 is not None:
        middle = middle @ embed(g2, (3,), decoded_factors)
    enc = np.kron(code1.encoding, code2.encoding)
    lifted = enc @ middle.entries @ enc.conj().T
    return DenseOperator(lifted, (code1.dim, code2.dim))


@dataclass(frozen=True)
class ConstraintSet:
    """Orthonormal basis of the illegal subspace of one code.

    Column alpha of ``matrix`` is the encoded basis state with logical value
    z' and nonzero syndrome a, ordered with z' major and a = 1..2**n - 1
    minor.  Every legal (error-free encoded) state is orthogonal to all of
    them, and there are 2 (2**n - 1).
    """

    code: QuantumCode
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    def vector(self, alpha: int) -> StateVector:
        return StateVector(self.matrix[:, alpha], (2,) * self.code.n_physical)

    def vectors(self) -> list[StateVector]:
        return [self.vector(i) for i in range(self.count)]


def constraint_basis(code: QuantumCode) -> ConstraintSet:
    """The 2(2**n - 1) encoded nonzero-syndrome states spanning illegality."""
    n_syn = code.n_syndromes
    columns = [z * n_syn + a for z in (0, 1) for a in range(1, n_syn)]
    return ConstraintSet(code, code.encoding[:, columns])


def representation_matrix(cs: ConstraintSet, w: DenseOperator) -> np.ndarray:
    """The unitary matrix by which a legal unitary acts on the illegal basis.

    Returns A with ``w C_beta = sum_alpha C_alpha A[alpha, beta]``, i.e.
    ``A[alpha, beta] = <C_alpha, w C_beta>``.  With this convention the map
    w -> A(w) is a homomorphism: A(w1 w2) = A(w1) A(w2).  Raises NotLegal if
    ``w`` leaks encoded states out of the legal subspace.
    """
    code = cs.code
    if w.dim != code.dim:
        raise ValueError("unitary dimension mismatch")
    for z in (0, 1):
        legal = code.encoding[:, z * code.n_syndromes]
        leak = np.linalg.norm(cs.matrix.conj().T @ (w.entries @ legal))
        if leak > LEGAL_TOL:
            raise NotLegal(
                f"unitary moves the legal subspace into the constraints "
                f"(leak {leak:.3e})"
            )
    image = w.entries @ cs.matrix
    a = cs.matrix.conj().T @ image
    residual = float(np.max(np.abs(image - cs.matrix @ a)))
    if residual > LEGAL_TOL:
        raise NotLegal(
            f"unitary moves constraint vectors out of the illegal subspace "
            f"(residual {residual:.3e})"
        )
    return a


@dataclass(frozen=True)
class ConstraintOperator:
    """A Hermitian operator supported on the illegal subspace.

    Built as ``sum_ab C_a coeffs[a, b] <C_b|``; annihilates every legal
    state by construction.
    """

    constraint_set: ConstraintSet
    coeffs: np.ndarray
    operator: DenseOperator

    @property
    def dim(self) -> int:
        return self.operator.dim


def constraint_operator(cs: ConstraintSet, coeffs: np.ndarray) -> ConstraintOperator:
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    m = cs.count
    if coeffs.shape != (m, m):
        raise ValueError(f"coefficient matrix must be {m}x{m}")
    if np.max(np.abs(coeffs - coeffs.conj().T)) > LEGAL_TOL:
        raise ValueError("coefficient matrix is not Hermitian")
    op = cs.matrix @ coeffs @ cs.matrix.conj().T
    return ConstraintOperator(cs, coeffs,
                              DenseOperator(op, (2,) * cs.code.n_physical))


def commutator_closure(m_op: ConstraintOperator,
                       n_op: ConstraintOperator) -> ConstraintOperator:
    """The Hermitian P with [M, N] = iP, still a constraint operator.

    Orthonormality of the constraint basis turns the operator commutator
    into the coefficient-level one, so P has coefficients -i [Mc, Nc].
    The operator-level identity is re-checked before returning.
    """
    if m_op.constraint_set is not n_op.constraint_set and not np.array_equal(
            m_op.constraint_set.matrix, n_op.constraint_set.matrix):
        raise ValueError("constraint operators live on different constraint sets")
    mc, nc = m_op.coeffs, n_op.coeffs
    p = constraint_operator(m_op.constraint_set, -1j * (mc @ nc - nc @ mc))
    commutator = (m_op.operator.entries @ n_op.operator.entries
                  - n_op.operator.entries @ m_op.operator.entries)
    residual = float(np.max(np.abs(commutator - 1j * p.operator.entries)))
    if residual > LEGAL_TOL:
        raise ArithmeticError(f"commutator closure residual {residual:.3e}")
    return p


def multi_codeword_constraint(ops: Sequence[ConstraintOperator],
                              psi_multi: StateVector) -> float:
    """Residual norm of (M1 (x) M2 (x) ...) applied to a multi-codeword state.

    ``psi_multi``'s factors must match the operators' codeword dimensions in
    order.  The residual vanishes for products and entanglements of legal
    codewords; corrupted codewords overlap the constraint vectors and give a
    nonzero value.  The per-factor application never materializes the
    Kronecker product, so large codes are fine.
    """
    dims = tuple(op.dim for op in ops)
    if psi_multi.factors != dims:
        raise ValueError(
            f"state factors {psi_multi.factors} do not match operator dims {dims}"
        )
    tens = psi_multi.tensor_view()
    for i, op in enumerate(ops):
        tens = np.moveaxis(
            np.tensordot(op.operator.entries, tens, axes=([1], [i])), 0, i)
    return float(np.linalg.norm(tens))


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    """Seeded random Hermitian matrix with O(1) entries."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


def scalar_product_check(code: QuantumCode, phi: StateVector, psi: StateVector,
                         syndrome_amps: np.ndarray) -> tuple[complex, complex, float]:
    """Compare logical and encoded scalar products under a shared corruption.

    Both logical states are encoded with the same syndrome superposition
    (a corruption caused by the environment does not depend on the logical
    content), and the encoded scalar product must equal the logical one.
    Returns (encoded product, logical product, absolute deviation).
    """
    c = np.asarray(syndrome_amps, dtype=np.complex128)
    if abs(np.linalg.norm(c) - 1.0) > LEGAL_TOL:
        raise ValueError("syndrome coefficient vector is not normalized")
    big_phi = code.encode_with_syndrome(phi, c)
    big_psi = code.encode_with_syndrome(psi, c)
    lhs = big_phi.inner(big_psi)
    rhs = phi.inner(psi)
    return lhs, rhs, abs(lhs - rhs)
