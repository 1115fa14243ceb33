"""Tests for the gauge and constraint-operator algebra."""

import numpy as np
import pytest

from codewords.constraints import (
    NotLegal,
    commutator_closure,
    constraint_basis,
    constraint_operator,
    gauge_lift,
    little_group_element,
    logical_lift,
    multi_codeword_constraint,
    random_hermitian,
    representation_matrix,
    scalar_product_check,
    two_qubit_lift,
)
from codewords.codes import PAULI_X
from codewords.hilbert import (
    DenseOperator,
    StateVector,
    apply,
    basis_state,
    haar_unitary,
    qubit_state,
    random_state,
    tensor,
)
from codewords.recovery import recover_by_decoding


def random_qubit_unitary(seed):
    return DenseOperator(haar_unitary(2, np.random.default_rng(seed)), (2,))


def test_little_group_fixes_zero_syndrome():
    for seed in (0, 1, 2):
        g = little_group_element(4, seed)
        assert g.unitary_deviation() <= 1e-12
        e0 = np.zeros(16)
        e0[0] = 1.0
        np.testing.assert_array_equal(g.entries @ e0, e0)
        np.testing.assert_array_equal(g.entries[0, :], e0)


def test_little_group_single_ancilla_is_a_phase():
    g = little_group_element(1, seed=5)
    assert g.entries[0, 0] == 1.0
    assert abs(abs(g.entries[1, 1]) - 1.0) <= 1e-14
    assert abs(g.entries[0, 1]) == 0.0 and abs(g.entries[1, 0]) == 0.0


def test_gauge_lift_identity(perfect5):
    g = DenseOperator(np.eye(16), (16,))
    lifted = gauge_lift(perfect5, g)
    np.testing.assert_allclose(lifted.entries, np.eye(32), atol=1e-14)


def test_gauge_lift_keeps_logical_content(perfect5):
    psi = random_state(2, 7)
    g = little_group_element(4, seed=8)
    lifted = gauge_lift(perfect5, g)
    corrupted = apply(lifted, perfect5.encode(psi))
    out = recover_by_decoding(perfect5, corrupted, psi)
    assert out.fidelity >= 1 - 1e-10
    # The decoded ancilla is the first column of g.
    decoded = perfect5.decode(corrupted)
    matrix = decoded.amplitudes.reshape(2, 16)
    junk = matrix[int(np.argmax(np.abs(psi.amplitudes)))]
    junk = junk / np.linalg.norm(junk)
    assert abs(np.vdot(junk, g.entries[:, 0])) >= 1 - 1e-12


def test_gauge_lift_is_a_homomorphism(perfect5):
    g1 = little_group_element(4, seed=1)
    g2 = little_group_element(4, seed=2)
    lhs = gauge_lift(perfect5, g1) @ gauge_lift(perfect5, g2)
    rhs = gauge_lift(perfect5, g1 @ g2)
    assert np.max(np.abs(lhs.entries - rhs.entries)) <= 1e-12


def test_gauge_lift_preserves_logical_sectors(perfect5):
    # Sector z spans the columns of the encoder with logical value z; a
    # gauge transformation must not connect the two sectors.
    g = little_group_element(4, seed=3)
    lifted = gauge_lift(perfect5, g)
    sector0 = perfect5.encoding[:, :16]
    sector1 = perfect5.encoding[:, 16:]
    block = sector1.conj().T @ lifted.entries @ sector0
    assert np.max(np.abs(block)) <= 1e-10


def test_logical_lift_identity_and_flip(repetition3):
    eye = logical_lift(repetition3, DenseOperator(np.eye(2), (2,)))
    np.testing.assert_allclose(eye.entries, np.eye(8), atol=1e-14)
    flip = logical_lift(repetition3, DenseOperator(PAULI_X, (2,)))
    out = apply(flip, repetition3.logical_state(0))
    np.testing.assert_allclose(out.amplitudes,
                               repetition3.logical_state(1).amplitudes,
                               atol=1e-14)


def test_logical_and_gauge_lifts_commute(perfect5):
    u = random_qubit_unitary(11)
    g = little_group_element(4, seed=12)
    lhs = logical_lift(perfect5, u) @ gauge_lift(perfect5, g)
    rhs = gauge_lift(perfect5, g) @ logical_lift(perfect5, u)
    assert np.max(np.abs(lhs.entries - rhs.entries)) <= 1e-12


def test_two_qubit_lift_identity(repetition3):
    lifted = two_qubit_lift(repetition3, repetition3,
                            DenseOperator(np.eye(4), (4,)))
    np.testing.assert_allclose(lifted.entries, np.eye(64), atol=1e-13)


def test_two_qubit_lift_cnot_columns(repetition3):
    cnot = DenseOperator(np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                                   [0, 0, 0, 1], [0, 0, 1, 0]]), (4,))
    lifted = two_qubit_lift(repetition3, repetition3, cnot)
    assert lifted.unitary_deviation() <= 1e-12

    def encoded_pair(z1, z2):
        return tensor(
            StateVector(repetition3.logical_state(z1).amplitudes, (8,)),
            StateVector(repetition3.logical_state(z2).amplitudes, (8,)))

    out = apply(lifted, encoded_pair(0, 1))
    np.testing.assert_allclose(out.amplitudes, encoded_pair(0, 1).amplitudes,
                               atol=1e-13)
    out = apply(lifted, encoded_pair(1, 0))
    np.testing.assert_allclose(out.amplitudes, encoded_pair(1, 1).amplitudes,
                               atol=1e-13)


def test_two_qubit_lift_survives_coherent_errors(repetition3, perfect5):
    # Corrupt both codewords coherently, apply the lifted CNOT, recover both:
    # the logical result is the CNOT of the logical inputs.
    from codewords.errors import apply_coherent
    from codewords.hilbert import factorization, permute

    cnot = DenseOperator(np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                                   [0, 0, 0, 1], [0, 0, 1, 0]]), (4,))
    g1 = little_group_element(repetition3.n_ancilla, seed=31)
    g2 = little_group_element(perfect5.n_ancilla, seed=32)
    lifted = two_qubit_lift(repetition3, perfect5, cnot, g1, g2)

    rng = np.random.default_rng(33)
    psi1, psi2 = random_state(2, rng), random_state(2, rng)
    c1 = np.zeros(4)
    c1[1] = 1.0  # a standard error is a coherent error with a basis vector
    c2 = random_state(16, rng).amplitudes
    enc1 = apply_coherent(repetition3, repetition3.encode(psi1), c1)
    enc2 = apply_coherent(perfect5, perfect5.encode(psi2), c2)
    pair = tensor(StateVector(enc1.amplitudes, (8,)),
                  StateVector(enc2.amplitudes, (32,)))
    moved = apply(lifted, pair)

    # Decode both codewords and cut (logical1, logical2) | (ancillas).
    both_decoders = np.kron(repetition3.encoding.conj().T,
                            perfect5.encoding.conj().T)
    decoded = StateVector(both_decoders @ moved.amplitudes, (2, 4, 2, 16))
    report = factorization(decoded, left=(0, 2))
    assert report.is_product
    expected = cnot.entries @ np.kron(psi1.amplitudes, psi2.amplitudes)
    overlap = abs(np.vdot(report.left_factor.amplitudes, expected))
    assert overlap ** 2 >= 1 - 1e-10


@pytest.mark.parametrize("name,count", [("repetition3", 6), ("perfect5", 30),
                                        ("steane7", 126)])
def test_constraint_basis_counts(name, count, request):
    code = request.getfixturevalue(name)
    cs = constraint_basis(code)
    assert cs.count == count
    gram = cs.matrix.conj().T @ cs.matrix
    assert np.max(np.abs(gram - np.eye(count))) <= 1e-12


def test_constraints_annihilate_encoded_states(perfect5):
    cs = constraint_basis(perfect5)
    for z in (0, 1):
        overlaps = cs.matrix.conj().T @ perfect5.logical_state(z).amplitudes
        assert np.max(np.abs(overlaps)) <= 1e-12
    psi = perfect5.encode(random_state(2, 17))
    assert np.max(np.abs(cs.matrix.conj().T @ psi.amplitudes)) <= 1e-12


def test_representation_identity(perfect5):
    cs = constraint_basis(perfect5)
    a = representation_matrix(cs, DenseOperator(np.eye(32), (32,)))
    np.testing.assert_allclose(a, np.eye(30), atol=1e-13)


def test_representation_unitary_and_homomorphic(perfect5):
    cs = constraint_basis(perfect5)
    for seed in range(10):
        w1 = gauge_lift(perfect5, little_group_element(4, seed=2 * seed)) \
            @ logical_lift(perfect5, random_qubit_unitary(3 * seed + 1))
        w2 = gauge_lift(perfect5, little_group_element(4, seed=2 * seed + 1))
        a1 = representation_matrix(cs, w1)
        a2 = representation_matrix(cs, w2)
        eye = np.eye(cs.count)
        assert np.max(np.abs(a1.conj().T @ a1 - eye)) <= 1e-10
        a12 = representation_matrix(cs, w1 @ w2)
        assert np.max(np.abs(a12 - a1 @ a2)) <= 1e-10


def test_representation_rejects_illegal_unitary(perfect5):
    cs = constraint_basis(perfect5)
    mover = perfect5.standard_error_operator(3)  # moves codewords off-span
    with pytest.raises(NotLegal):
        representation_matrix(cs, mover)


def test_constraint_operator_zero_and_projector(repetition3):
    cs = constraint_basis(repetition3)
    zero = constraint_operator(cs, np.zeros((6, 6)))
    assert np.max(np.abs(zero.operator.entries)) == 0.0
    proj = constraint_operator(cs, np.eye(6))
    p = proj.operator.entries
    assert np.max(np.abs(p @ p - p)) <= 1e-12


def test_constraint_operator_annihilates_legal_states(perfect5):
    cs = constraint_basis(perfect5)
    m_op = constraint_operator(cs, random_hermitian(30, seed=13))
    assert m_op.operator.hermitian_deviation() <= 1e-12
    rng = np.random.default_rng(14)
    for _ in range(20):
        psi = perfect5.encode(random_state(2, rng))
        assert np.linalg.norm(m_op.operator.entries @ psi.amplitudes) <= 1e-10


def test_constraint_operator_rejects_non_hermitian(repetition3):
    cs = constraint_basis(repetition3)
    bad = np.zeros((6, 6))
    bad[0, 1] = 1.0
    with pytest.raises(ValueError, match="Hermitian"):
        constraint_operator(cs, bad)


def test_commutator_self_is_zero(perfect5):
    cs = constraint_basis(perfect5)
    m_op = constraint_operator(cs, random_hermitian(30, seed=40))
    p = commutator_closure(m_op, m_op)
    assert np.max(np.abs(p.coeffs)) <= 1e-12


def test_commutator_of_pauli_blocks(repetition3):
    # sigma_x and sigma_y blocks commute to 2 sigma_z, embedded in the
    # top-left corner of the coefficient space.
    cs = constraint_basis(repetition3)
    mc = np.zeros((6, 6), dtype=complex)
    nc = np.zeros((6, 6), dtype=complex)
    mc[:2, :2] = np.array([[0, 1], [1, 0]])
    nc[:2, :2] = np.array([[0, -1j], [1j, 0]])
    p = commutator_closure(constraint_operator(cs, mc),
                           constraint_operator(cs, nc))
    expected = np.zeros((6, 6), dtype=complex)
    expected[:2, :2] = 2 * np.diag([1, -1])
    np.testing.assert_allclose(p.coeffs, expected, atol=1e-14)


def test_commutator_closure_random(perfect5):
    cs = constraint_basis(perfect5)
    rng = np.random.default_rng(50)
    for trial in range(5):
        m_op = constraint_operator(cs, random_hermitian(30, seed=100 + trial))
        n_op = constraint_operator(cs, random_hermitian(30, seed=200 + trial))
        p = commutator_closure(m_op, n_op)
        assert p.operator.hermitian_deviation() <= 1e-10
        commutator = (m_op.operator.entries @ n_op.operator.entries
                      - n_op.operator.entries @ m_op.operator.entries)
        assert np.max(np.abs(commutator - 1j * p.operator.entries)) <= 1e-10
        psi = perfect5.encode(random_state(2, rng))
        assert np.linalg.norm(p.operator.entries @ psi.amplitudes) <= 1e-10


def test_multi_codeword_constraint_legal(repetition3):
    cs = constraint_basis(repetition3)
    m_op = constraint_operator(cs, random_hermitian(6, seed=1))
    n_op = constraint_operator(cs, random_hermitian(6, seed=2))
    pair = tensor(
        StateVector(repetition3.encode(random_state(2, 3)).amplitudes, (8,)),
        StateVector(repetition3.encode(random_state(2, 4)).amplitudes, (8,)))
    assert multi_codeword_constraint([m_op, n_op], pair) <= 1e-10


def test_multi_codeword_constraint_flags_illegal(repetition3):
    cs = constraint_basis(repetition3)
    m_op = constraint_operator(cs, random_hermitian(6, seed=1))
    n_op = constraint_operator(cs, random_hermitian(6, seed=2))
    illegal = np.kron(repetition3.encoding[:, 1], repetition3.encoding[:, 2])
    legal = np.kron(repetition3.encode(basis_state(0, (2,))).amplitudes,
                    repetition3.encode(basis_state(1, (2,))).amplitudes)
    psi = StateVector((legal + illegal) / np.sqrt(2), (8, 8))
    assert multi_codeword_constraint([m_op, n_op], psi) > 0.1


def test_multi_codeword_constraint_zero_operator(repetition3):
    cs = constraint_basis(repetition3)
    zero = constraint_operator(cs, np.zeros((6, 6)))
    n_op = constraint_operator(cs, random_hermitian(6, seed=2))
    pair = tensor(
        StateVector(repetition3.encode(basis_state(0, (2,))).amplitudes, (8,)),
        StateVector(repetition3.encode(basis_state(1, (2,))).amplitudes, (8,)))
    assert multi_codeword_constraint([zero, n_op], pair) == 0.0


def test_multi_codeword_constraint_factor_mismatch(repetition3, perfect5):
    m_op = constraint_operator(constraint_basis(repetition3),
                               random_hermitian(6, seed=1))
    n_op = constraint_operator(constraint_basis(perfect5),
                               random_hermitian(30, seed=2))
    pair = tensor(StateVector(repetition3.logical_state(0).amplitudes, (8,)),
                  StateVector(repetition3.logical_state(1).amplitudes, (8,)))
    with pytest.raises(ValueError, match="factors"):
        multi_codeword_constraint([m_op, n_op], pair)


def test_scalar_product_trivial_cases(perfect5):
    c = np.zeros(16)
    c[2] = 1.0
    psi = qubit_state(0.6, 0.8j)
    lhs, rhs, dev = scalar_product_check(perfect5, psi, psi, c)
    assert abs(lhs - 1.0) <= 1e-12 and dev <= 1e-12
    phi = qubit_state(0.8, -0.6j)  # orthogonal to psi
    lhs, rhs, dev = scalar_product_check(perfect5, phi, psi, c)
    assert abs(lhs) <= 1e-12 and abs(rhs) <= 1e-12


def test_scalar_product_random_triples(all_codes):
    for code in all_codes:
        rng = np.random.default_rng(21)
        for _ in range(50):
            phi, psi = random_state(2, rng), random_state(2, rng)
            c = random_state(code.n_syndromes, rng).amplitudes
            _, _, dev = scalar_product_check(code, phi, psi, c)
            assert dev <= 1e-12


def test_scalar_product_rejects_unnormalized(perfect5):
    with pytest.raises(ValueError, match="normalized"):
        scalar_product_check(perfect5, qubit_state(1, 0), qubit_state(0, 1),
                             np.ones(16))
