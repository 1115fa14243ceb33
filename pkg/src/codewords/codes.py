"""Quantum code construction and structural verification.

A code is defined by two logical basis states over ``n_physical`` qubits and
an ordered list of 2**n "standard errors" (n = n_physical - 1 ancilla qubits),
each a product of single-qubit operators from {I, X, Z, W}, where W = X@Z is
the real combined bit-phase flip.  Applying the standard errors to the two
logical states must produce a complete orthonormal basis of the physical
space; the encoding matrix maps ``|z> (x) |a>`` to the a-th corruption of the
z-th logical state, column by column.

Everything is kept real whenever the declared basis states are real, so the
encoding matrix of all built-in codes is a real orthogonal matrix and
decoding is its plain transpose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from pathlib import Path

import numpy as np

from .hilbert import (
    NORM_TOL,
    DenseOperator,
    StateVector,
    basis_state,
    bits_to_index,
)

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI_W = PAULI_X @ PAULI_Z  # [[0,-1],[1,0]]; real stand-in for the Y error

_LETTER_OPS = {"I": PAULI_I, "X": PAULI_X, "Z": PAULI_Z, "W": PAULI_W}

BUILTIN_CODES = ("repetition3", "perfect5", "steane7")


class NonOrthonormalBasis(Exception):
    """The declared standard errors do not generate an orthonormal basis."""


@dataclass(frozen=True)
class CodeSpec:
    """Declarative code definition: logical states plus the error list."""

    name: str
    n_physical: int
    logical_basis: tuple[StateVector, StateVector]
    standard_errors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "logical_basis", tuple(self.logical_basis))
        object.__setattr__(self, "standard_errors", tuple(self.standard_errors))
        n = self.n_physical - 1
        if self.n_physical < 2:
            raise ValueError("a code needs at least two physical qubits")
        if len(self.standard_errors) != 2 ** n:
            raise ValueError(
                f"{self.name}: expected {2 ** n} standard errors, "
                f"got {len(self.standard_errors)}"
            )
        if self.standard_errors[0] != "I" * self.n_physical:
            raise ValueError(f"{self.name}: standard error 0 must be the identity")
        for label in self.standard_errors:
            if len(label) != self.n_physical or any(c not in _LETTER_OPS for c in label):
                raise ValueError(f"{self.name}: bad error label {label!r}")
        zero, one = self.logical_basis
        if zero.factors != (2,) * self.n_physical or one.factors != zero.factors:
            raise ValueError(f"{self.name}: logical states must be {self.n_physical}-qubit")
        if abs(zero.inner(one)) > NORM_TOL:
            raise ValueError(f"{self.name}: logical basis states are not orthogonal")

    @property
    def n_ancilla(self) -> int:
        return self.n_physical - 1

    @property
    def dim(self) -> int:
        return 2 ** self.n_physical


def _apply_label(label: str, amplitudes: np.ndarray) -> np.ndarray:
    """Apply a per-qubit operator string to a state, one local factor at a time."""
    n = len(label)
    tens = amplitudes.reshape((2,) * n)
    for k, letter in enumerate(label):
        if letter == "I":
            continue
        op = _LETTER_OPS[letter]
        tens = np.moveaxis(np.tensordot(op, tens, axes=([1], [k])), 0, k)
    return tens.reshape(-1)


@dataclass(frozen=True)
class SingledQubitSplit:
    """One codeword written as part0 (x) |0>_k + part1 (x) |1>_k.

    ``part0`` and ``part1`` live on the remaining qubits in their original
    order and are sub-normalized.
    """

    qubit: int
    logical_value: int
    part0: StateVector
    part1: StateVector

    def reassemble(self) -> StateVector:
        n = len(self.part0.factors) + 1
        tens = np.stack(
            [self.part0.tensor_view(), self.part1.tensor_view()], axis=self.qubit
        )
        return StateVector(tens.reshape(-1), (2,) * n)


@dataclass(frozen=True)
class OverlapCheck:
    """One of the ten scalar products among the four split components."""

    left: tuple[int, int]   # (z, y) labels of the bra component
    right: tuple[int, int]
    value: complex
    expected: float
    passed: bool


@dataclass(frozen=True)
class OverlapReport:
    """Result of checking the half-delta overlap pattern at one qubit."""

    qubit: int
    products: tuple[OverlapCheck, ...]
    branch_gram_deviation: float
    passed: bool


class QuantumCode:
    """A validated code: orthonormal corrupted-codeword basis and encoder.

    The encoding matrix has the corruption ``a`` of logical state ``z`` in
    column ``z * 2**n + a``, so encoding is one matrix application and
    decoding is the conjugate transpose.
    """

    def __init__(self, spec: CodeSpec, encoding: np.ndarray):
        encoding = np.array(encoding, dtype=np.complex128)
        encoding.setflags(write=False)
        self.spec = spec
        self.encoding = encoding

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def n_physical(self) -> int:
        return self.spec.n_physical

    @property
    def n_ancilla(self) -> int:
        return self.spec.n_ancilla

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def n_syndromes(self) -> int:
        return 2 ** self.n_ancilla

    def encoding_operator(self) -> DenseOperator:
        return DenseOperator(self.encoding, (2,) * self.n_physical)

    def decoding_operator(self) -> DenseOperator:
        return DenseOperator(self.encoding.conj().T, (2,) * self.n_physical)

    def basis_state(self, z: int, a: int) -> StateVector:
        """The corrupted codeword: standard error ``a`` applied to logical ``z``."""
        if z not in (0, 1) or not 0 <= a < self.n_syndromes:
            raise IndexError(f"no basis state (z={z}, a={a})")
        return StateVector(self.encoding[:, z * self.n_syndromes + a],
                           (2,) * self.n_physical)

    def logical_state(self, z: int) -> StateVector:
        return self.basis_state(z, 0)

    def encode(self, logical: StateVector) -> StateVector:
        """Unitary encoding of a one-qubit state with a fresh zero ancilla."""
        if logical.dim != 2:
            raise ValueError("encode() expects a single logical qubit")
        padded = np.zeros(self.dim, dtype=np.complex128)
        padded[0] = logical.amplitudes[0]
        padded[self.n_syndromes] = logical.amplitudes[1]
        return StateVector(self.encoding @ padded, (2,) * self.n_physical,
                           normalized=logical.normalized)

    def encode_with_syndrome(self, logical: StateVector,
                             syndrome_amps: np.ndarray) -> StateVector:
        """Encode ``logical`` with the ancilla in the given superposition."""
        c = np.asarray(syndrome_amps, dtype=np.complex128)
        if logical.dim != 2 or c.size != self.n_syndromes:
            raise ValueError("bad logical or syndrome dimension")
        physical = self.encoding @ np.kron(logical.amplitudes, c)
        return StateVector(physical, (2,) * self.n_physical,
                           normalized=logical.normalized and
                           abs(np.linalg.norm(c) - 1.0) <= NORM_TOL)

    def decode(self, physical: StateVector) -> StateVector:
        """Apply the decoder to the leading codeword factors, identity elsewhere.

        The first factors of ``physical`` must multiply to the codeword
        dimension; any trailing factors (environment, extra ancillas) are
        carried through untouched.  The result is relabeled as
        (logical qubit, ancilla, *extras).
        """
        split = 0
        leading = 1
        for d in physical.factors:
            if leading == self.dim:
                break
            leading *= d
            split += 1
        if leading != self.dim:
            raise ValueError(
                f"leading factors of {physical.factors} do not form a "
                f"codeword of dimension {self.dim}"
            )
        rest = physical.factors[split:]
        rest_dim = math.prod(rest) if rest else 1
        matrix = physical.amplitudes.reshape(self.dim, rest_dim)
        decoded = (self.encoding.conj().T @ matrix).reshape(-1)
        return StateVector(decoded, (2, self.n_syndromes) + rest,
                           normalized=physical.normalized)

    def single_out(self, z: int, k: int) -> SingledQubitSplit:
        """Split logical state ``z`` on qubit ``k`` into its |0>/|1> components."""
        if not 0 <= k < self.n_physical:
            raise IndexError(f"qubit {k} out of range")
        tens = self.logical_state(z).tensor_view()
        part = np.moveaxis(tens, k, 0)
        rest_factors = (2,) * (self.n_physical - 1)
        return SingledQubitSplit(
            qubit=k,
            logical_value=z,
            part0=StateVector(part[0].reshape(-1), rest_factors, normalized=False),
            part1=StateVector(part[1].reshape(-1), rest_factors, normalized=False),
        )

    def standard_error_operator(self, a: int) -> DenseOperator:
        """The dense Pauli product realizing standard error ``a``."""
        if not 0 <= a < self.n_syndromes:
            raise IndexError(f"syndrome {a} out of range")
        label = self.spec.standard_errors[a]
        mat = reduce(np.kron, (_LETTER_OPS[c] for c in label))
        return DenseOperator(mat, (2,) * self.n_physical)

    def apply_standard_error(self, a: int, psi: StateVector) -> StateVector:
        """Same action as the dense operator, without materializing it."""
        if not 0 <= a < self.n_syndromes:
            raise IndexError(f"syndrome {a} out of range")
        label = self.spec.standard_errors[a]
        return StateVector(_apply_label(label, psi.amplitudes), psi.factors,
                           normalized=psi.normalized)

    def syndrome_of_label(self, label: str) -> int:
        """Index of a standard error by its label string."""
        return self.spec.standard_errors.index(label)

    def single_qubit_error_syndromes(self, k: int) -> dict[str, int] | None:
        """Syndrome indices of X, Z and W at qubit ``k``, if all are declared."""
        out = {}
        for letter in "XZW":
            label = "I" * k + letter + "I" * (self.n_physical - k - 1)
            if label not in self.spec.standard_errors:
                return None
            out[letter] = self.syndrome_of_label(label)
        return out

    def verify_single_qubit_overlaps(self, k: int) -> OverlapReport:
        """Check the overlap pattern that makes qubit ``k`` fully correctable.

        The four split components (two per logical value) must satisfy
        <part(z,y), part(z',y')> = (1/2) delta_zz' delta_yy'; there are ten
        distinct products.  The report also records how far the eight
        corruption-branch states (correct/phase/bit/both for z = 0, 1) are
        from being orthonormal.
        """
        comps: dict[tuple[int, int], StateVector] = {}
        for z in (0, 1):
            split = self.single_out(z, k)
            comps[(z, 0)] = split.part0
            comps[(z, 1)] = split.part1
        labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
        checks = []
        for i, li in enumerate(labels):
            for lj in labels[i:]:
                value = comps[li].inner(comps[lj])
                expected = 0.5 if li == lj else 0.0
                checks.append(OverlapCheck(
                    left=li, right=lj, value=value, expected=expected,
                    passed=abs(value - expected) <= NORM_TOL,
                ))
        branches = []
        for z in (0, 1):
            p0 = comps[(z, 0)].tensor_view()
            p1 = comps[(z, 1)].tensor_view()
            for sign, swap in ((1, False), (-1, False), (1, True), (-1, True)):
                a, b = (p1, p0) if swap else (p0, p1)
                branches.append(np.stack([a, sign * b], axis=k).reshape(-1))
        gram = np.array([[np.vdot(u, v) for v in branches] for u in branches])
        gram_dev = float(np.max(np.abs(gram - np.eye(8))))
        return OverlapReport(
            qubit=k,
            products=tuple(checks),
            branch_gram_deviation=gram_dev,
            passed=all(c.passed for c in checks),
        )


def build_code(spec: CodeSpec) -> QuantumCode:
    """Construct and validate the code defined by ``spec``.

    Raises NonOrthonormalBasis if the corrupted codewords fail to form an
    orthonormal basis, i.e. the spec is not a valid code for its declared
    error set.
    """
    dim = spec.dim
    n_syn = 2 ** spec.n_ancilla
    encoding = np.zeros((dim, dim), dtype=np.complex128)
    for z in (0, 1):
        base = spec.logical_basis[z].amplitudes
        for a, label in enumerate(spec.standard_errors):
            encoding[:, z * n_syn + a] = _apply_label(label, base)
    gram = encoding.conj().T @ encoding
    deviation = float(np.max(np.abs(gram - np.eye(dim))))
    if deviation > NORM_TOL:
        raise NonOrthonormalBasis(
            f"{spec.name}: corrupted codewords are not orthonormal "
            f"(Gram deviation {deviation:.3e}); the declared standard errors "
            f"do not define a valid code"
        )
    return QuantumCode(spec, encoding)


# --- built-in code specs ---------------------------------------------------

def _repetition3_spec() -> CodeSpec:
    zero = basis_state(0b000, (2, 2, 2))
    one = basis_state(0b111, (2, 2, 2))
    return CodeSpec(
        name="repetition3",
        n_physical=3,
        logical_basis=(zero, one),
        standard_errors=("III", "XII", "IXI", "IIX"),
    )


_FIVE_QUBIT_GENERATORS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


def _perfect5_spec() -> CodeSpec:
    # Uniform superposition over the stabilizer-group orbit of |00000> (and of
    # |11111> for logical one); each group element contributes a distinct
    # basis state with sign +-1, so the amplitudes are exactly +-1/4.
    def project(seed_index: int) -> StateVector:
        v = basis_state(seed_index, (2,) * 5).amplitudes.copy()
        for gen in _FIVE_QUBIT_GENERATORS:
            v = v + _apply_label(gen, v)
        return StateVector(v / np.linalg.norm(v), (2,) * 5)

    errors = ["I" * 5]
    for k in range(5):
        for letter in "XZW":
            errors.append("I" * k + letter + "I" * (5 - k - 1))
    return CodeSpec(
        name="perfect5",
        n_physical=5,
        logical_basis=(project(0b00000), project(0b11111)),
        standard_errors=tuple(errors),
    )


# Parity checks of the [7,4,3] Hamming code; column j is the binary label j+1.
_HAMMING_CHECKS = np.array(
    [[0, 0, 0, 1, 1, 1, 1],
     [0, 1, 1, 0, 0, 1, 1],
     [1, 0, 1, 0, 1, 0, 1]], dtype=np.int64)


def _steane7_spec() -> CodeSpec:
    # Logical zero: uniform superposition of the even-weight Hamming codewords
    # (the dual code, spanned by the check rows); logical one: the coset
    # shifted by 1111111.  Normalization 1/sqrt(8).
    words = []
    for mask in range(8):
        word = np.zeros(7, dtype=np.int64)
        for row in range(3):
            if (mask >> row) & 1:
                word ^= _HAMMING_CHECKS[row]
        words.append(word)

    def superpose(shift: int) -> StateVector:
        amps = np.zeros(2 ** 7, dtype=np.complex128)
        for word in words:
            amps[bits_to_index(word ^ shift)] = 1.0
        return StateVector(amps / np.sqrt(8), (2,) * 7)

    errors = ["I" * 7]
    for k in range(7):
        for letter in "XZW":
            errors.append("I" * k + letter + "I" * (7 - k - 1))
    for i in range(7):  # phase error at i combined with a bit error at j != i
        for j in range(7):
            if i == j:
                continue
            label = ["I"] * 7
            label[i] = "Z"
            label[j] = "X"
            errors.append("".join(label))
    return CodeSpec(
        name="steane7",
        n_physical=7,
        logical_basis=(superpose(0), superpose(1)),
        standard_errors=tuple(errors),
    )


_BUILTIN_FACTORIES = {
    "repetition3": _repetition3_spec,
    "perfect5": _perfect5_spec,
    "steane7": _steane7_spec,
}


def builtin_spec(name: str) -> CodeSpec:
    """One of the bundled code definitions; see BUILTIN_CODES."""
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown code {name!r}; available: {BUILTIN_CODES}") from None
    return factory()


@lru_cache(maxsize=None)
def builtin_code(name: str) -> QuantumCode:
    return build_code(builtin_spec(name))


# --- spec file format ------------------------------------------------------
#
# JSON document with keys:
#   name            string
#   n_physical      int
#   logical_basis   two lists of [basis_index, real, imag] triples
#   standard_errors list of strings over {I, X, Z, W}, order significant
#
# Floats round-trip exactly through json (repr-based), so re-ingesting an
# exported spec reproduces the encoding matrix bit for bit.

def spec_to_dict(spec: CodeSpec) -> dict:
    basis = []
    for state in spec.logical_basis:
        triples = [
            [int(i), float(a.real), float(a.imag)]
            for i, a in enumerate(state.amplitudes)
            if a != 0
        ]
        basis.append(triples)
    return {
        "name": spec.name,
        "n_physical": spec.n_physical,
        "logical_basis": basis,
        "standard_errors": list(spec.standard_errors),
    }


def spec_from_dict(data: dict) -> CodeSpec:
    for field_name in ("name", "n_physical", "logical_basis", "standard_errors"):
        if field_name not in data:
            raise ValueError(f"code spec file is missing field {field_name!r}")
    n_physical = int(data["n_physical"])
    dim = 2 ** n_physical
    states = []
    for triples in data["logical_basis"]:
        amps = np.zeros(dim, dtype=np.complex128)
        for index, re, im in triples:
            amps[int(index)] = complex(re, im)
        states.append(StateVector(amps, (2,) * n_physical))
    if len(states) != 2:
        raise ValueError("field 'logical_basis' must hold exactly two states")
    return CodeSpec(
        name=str(data["name"]),
        n_physical=n_physical,
        logical_basis=(states[0], states[1]),
        standard_errors=tuple(data["standard_errors"]),
    )


def save_spec(spec: CodeSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n")


def load_spec(path: str | Path) -> CodeSpec:
    return spec_from_dict(json.loads(Path(path).read_text()))
