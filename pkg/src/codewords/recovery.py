"""Logical-qubit recovery without syndrome measurements.

Two routes are provided.  Decoding recovery applies the decoder, checks that
the state factors as (logical qubit) (x) (junk), and detaches the junk.
In-place recovery brings in a second ancilla and applies a fixed unitary that
moves the syndrome content onto it, leaving the codeword restored and still
encoded; the transfer unitary has order 2**(2n+1) and is applied lazily, so
the largest codes never materialize it as a dense matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import QuantumCode
from .hilbert import (
    PRODUCT_TOL,
    DenseOperator,
    DensityMatrix,
    FactorizationReport,
    StateVector,
    basis_state,
    factorization,
    partial_trace,
    permute,
    tensor,
)


class NotCorrigible(Exception):
    """The corruption left the logical content entangled with the junk."""


class NotAProduct(Exception):
    """A state expected to factor as logical (x) junk does not."""


def fidelity(a: StateVector | DensityMatrix, b: StateVector | DensityMatrix) -> float:
    """Squared overlap of two states; trace overlap when either is mixed."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch in fidelity")
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
    if isinstance(a, StateVector):
        return float(np.vdot(a.amplitudes, b.entries @ a.amplitudes).real)
    if isinstance(b, StateVector):
        return fidelity(b, a)
    return float(np.trace(a.entries @ b.entries).real)


@dataclass(frozen=True)
class RecoveryOutcome:
    """What a recovery attempt produced.

    ``logical_state`` is the detached one-qubit state (a density matrix for
    mixture recovery), ``junk`` the discarded ancilla(-and-environment)
    content, ``factored`` the product-structure evidence, and ``fidelity``
    the squared overlap with the reference logical input.  In-place recovery
    also reports the restored, still-encoded state.
    """

    logical_state: StateVector | DensityMatrix
    junk: StateVector | DensityMatrix | None
    factored: FactorizationReport | None
    fidelity: float
    restored: StateVector | None = None


def recover_by_decoding(code: QuantumCode, corrupted: StateVector,
                        reference_logical: StateVector) -> RecoveryOutcome:
    """Decode, verify the logical qubit detaches, and return it.

    ``corrupted`` holds the codeword in its leading factors; any trailing
    factors (e.g. an environment) ride along into the junk.  Raises
    NotCorrigible when the cut between the logical qubit and the rest has
    Schmidt rank above one, which signals a corruption outside the code's
    declared error set.
    """
    decoded = code.decode(corrupted)
    report = factorization(decoded, left=(0,))
    if not report.is_product:
        raise NotCorrigible(
            f"logical qubit stays entangled with the junk "
            f"(second Schmidt value {report.second_schmidt:.3e})"
        )
    logical = StateVector(report.left_factor.amplitudes, (2,))
    return RecoveryOutcome(
        logical_state=logical,
        junk=report.right_factor,
        factored=report,
        fidelity=fidelity(logical, reference_logical),
    )


def recover_mixture(code: QuantumCode, rho: DensityMatrix,
                    reference_logical: StateVector) -> RecoveryOutcome:
    """Decode a mixed corruption and trace out the junk ancilla.

    The recovered logical state must be pure for a corrigible mixture; a
    mixed result means some component lay outside the corrigible span.
    """
    if rho.dim != code.dim:
        raise ValueError("density matrix dimension mismatch")
    decoded = code.encoding.conj().T @ rho.entries @ code.encoding
    decoded_dm = DensityMatrix(decoded, (2, code.n_syndromes))
    logical = partial_trace(decoded_dm, keep=(0,))
    junk = partial_trace(decoded_dm, keep=(1,))
    spectrum = logical.eigenvalues()
    if spectrum[1] > PRODUCT_TOL:
        raise NotCorrigible(
            f"recovered logical state is mixed (second eigenvalue {spectrum[1]:.3e})"
        )
    return RecoveryOutcome(
        logical_state=logical,
        junk=junk,
        factored=None,
        fidelity=fidelity(reference_logical, logical),
    )


class SyndromeTransferUnitary:
    """Unitary of order 2**(2n+1) moving the syndrome onto a second ancilla.

    On the specified columns it acts as ``(corrupted a) (x) |b=0>  ->
    (error-free) (x) |b=a>``; the completion on the remaining columns swaps
    the syndrome content of the two ancillas, which keeps the whole map an
    involution and manifestly unitary (it is the decoder-conjugated swap of
    the two ancilla registers).
    """

    def __init__(self, code: QuantumCode):
        self.code = code
        self._matrix: DenseOperator | None = None

    @property
    def order(self) -> int:
        return 2 ** (2 * self.code.n_ancilla + 1)

    def apply(self, state: StateVector) -> StateVector:
        """Apply to a state whose leading factors are (codeword, |b>, *extras)."""
        code = self.code
        n_syn = code.n_syndromes
        # Locate the codeword block and the second ancilla factor.
        leading = 1
        split = 0
        for d in state.factors:
            if leading == code.dim:
                break
            leading *= d
            split += 1
        if leading != code.dim or split >= len(state.factors) \
                or state.factors[split] != n_syn:
            raise ValueError(
                f"expected factors (codeword..., {n_syn}, ...), got {state.factors}"
            )
        extras = state.factors[split + 1:]
        rest = math.prod(extras) if extras else 1
        block = state.amplitudes.reshape(code.dim, n_syn * rest)
        decoded = (code.encoding.conj().T @ block)
        tens = decoded.reshape(2, n_syn, n_syn, rest).swapaxes(1, 2)
        recoded = code.encoding @ tens.reshape(code.dim, n_syn * rest)
        return StateVector(recoded.reshape(-1), state.factors,
                           normalized=state.normalized)

    def as_operator(self) -> DenseOperator:
        """Materialize the dense matrix; refused above order 2**11."""
        if self._matrix is None:
            if self.order > 2048:
                raise ValueError(
                    f"order {self.order} too large to materialize; use apply()"
                )
            code = self.code
            n_syn = code.n_syndromes
            swap = np.zeros((n_syn * n_syn, n_syn * n_syn))
            for a in range(n_syn):
                for b in range(n_syn):
                    swap[b * n_syn + a, a * n_syn + b] = 1.0
            big_e = np.kron(code.encoding, np.eye(n_syn))
            middle = np.kron(np.eye(2), swap)
            self._matrix = DenseOperator(
                big_e @ middle @ big_e.conj().T,
                (2,) * code.n_physical + (n_syn,),
            )
        return self._matrix


def build_syndrome_transfer(code: QuantumCode) -> SyndromeTransferUnitary:
    return SyndromeTransferUnitary(code)


def recover_in_place(code: QuantumCode, corrupted: StateVector,
                     transfer: SyndromeTransferUnitary,
                     reference_logical: StateVector) -> RecoveryOutcome:
    """Restore the codeword in place via the syndrome-transfer unitary.

    A fresh second ancilla ``|b=0>`` is attached and the transfer applied;
    the codeword must then detach from (second ancilla, environment).  The
    logical state is read off by decoding the restored codeword, which is
    returned still encoded.
    """
    if transfer.code is not code:
        raise ValueError("transfer unitary was built for a different code")
    n_cw = code.n_physical
    fresh = basis_state(0, (code.n_syndromes,))
    extras = corrupted.factors[n_cw:]
    if corrupted.factors[:n_cw] != (2,) * n_cw:
        raise ValueError("expected a codeword in the leading qubit factors")
    joined = tensor(corrupted, fresh)
    if extras:
        # Move the fresh ancilla next to the codeword: (codeword, b, extras).
        order = tuple(range(n_cw)) + (len(joined.factors) - 1,) + tuple(
            range(n_cw, n_cw + len(extras)))
        joined = permute(joined, order)
    transferred = transfer.apply(joined)
    report = factorization(transferred, left=tuple(range(n_cw)))
    if not report.is_product:
        raise NotCorrigible(
            f"codeword stays entangled after syndrome transfer "
            f"(second Schmidt value {report.second_schmidt:.3e})"
        )
    restored = StateVector(report.left_factor.amplitudes, (2,) * n_cw)
    decoded = code.decode(restored)
    logical = StateVector(decoded.amplitudes.reshape(2, code.n_syndromes)[:, 0], (2,))
    return RecoveryOutcome(
        logical_state=logical,
        junk=report.right_factor,
        factored=report,
        fidelity=fidelity(logical, reference_logical),
        restored=restored,
    )


def refresh_ancilla(decoded: StateVector) -> StateVector:
    """Detach the junk from a decoded state and attach a zeroed ancilla.

    ``decoded`` must factor as (logical qubit) (x) (junk); the result is
    logical (x) |a=0> over the original ancilla dimension, ready for
    re-encoding.  Raises NotAProduct otherwise.
    """
    if len(decoded.factors) < 2 or decoded.factors[0] != 2:
        raise ValueError("expected factors (2, ancilla, ...)")
    report = factorization(decoded, left=(0,))
    if not report.is_product:
        raise NotAProduct(
            f"logical qubit is entangled with the junk "
            f"(second Schmidt value {report.second_schmidt:.3e})"
        )
    logical = StateVector(report.left_factor.amplitudes, (2,))
    return tensor(logical, basis_state(0, (decoded.factors[1],)))
