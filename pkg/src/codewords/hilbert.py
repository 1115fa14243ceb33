"""Exact dense linear algebra over small labeled tensor-product spaces.

Everything is kept as explicit complex128 arrays: state vectors carry an
ordered list of subsystem dimensions, operators are dense square matrices.
Factor 0 is the leftmost tensor slot and the most significant digit of a
basis-index label, so for five qubits ``|01001>`` is basis index 9.

Values are immutable after construction (the underlying arrays are marked
read-only) and all operations are pure functions, so everything here is safe
to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Shared numerical tolerances.  Dimensions stay at or below 2**10, which keeps
# rounding errors orders of magnitude smaller than any of these.
NORM_TOL = 1e-10
UNITARY_TOL = 1e-10
PRODUCT_TOL = 1e-8


def _as_complex(values, *, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != 1 and what == "amplitudes":
        arr = arr.reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """A vector of complex amplitudes over an ordered tensor factorization.

    ``factors`` lists the subsystem dimensions; their product must equal the
    amplitude count.  States are normalized by default; pass
    ``normalized=False`` for sub-normalized branch vectors.
    """

    amplitudes: np.ndarray
    factors: tuple[int, ...]
    normalized: bool = True

    def __post_init__(self):
        amps = _as_complex(self.amplitudes, what="amplitudes")
        factors = tuple(int(d) for d in self.factors)
        if any(d < 1 for d in factors):
            raise ValueError(f"factor dimensions must be positive, got {factors}")
        if math.prod(factors) != amps.size:
            raise ValueError(
                f"product of factors {factors} != amplitude count {amps.size}"
            )
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "factors", factors)
        if self.normalized and abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {self.norm()} deviates from 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: StateVector) -> complex:
        """Scalar product, conjugate-linear in self."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in scalar product")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape(self.factors)


@dataclass(frozen=True)
class DenseOperator:
    """A dense square matrix acting on a labeled tensor-product space."""

    entries: np.ndarray
    factors: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.entries, dtype=np.complex128)
        factors = tuple(int(d) for d in self.factors)
        dim = math.prod(factors)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} != ({dim}, {dim})")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> DenseOperator:
        return DenseOperator(self.entries.conj().T, self.factors)

    def unitary_deviation(self) -> float:
        eye = np.eye(self.dim)
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - eye)))

    def hermitian_deviation(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitary_deviation() <= tol

    def is_hermitian(self, tol: float = UNITARY_TOL) -> bool:
        return self.hermitian_deviation() <= tol

    def __matmul__(self, other: DenseOperator) -> DenseOperator:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in operator product")
        return DenseOperator(self.entries @ other.entries, self.factors)


@dataclass(frozen=True)
class DensityMatrix:
    """Positive semidefinite, trace-one matrix over a labeled tensor space."""

    entries: np.ndarray
    factors: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(self.entries, dtype=np.complex128)
        factors = tuple(int(d) for d in self.factors)
        dim = math.prod(factors)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} != ({dim}, {dim})")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {np.trace(mat)} deviates from 1")
        if np.linalg.eigvalsh(mat).min() < -NORM_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)
        object.__setattr__(self, "factors", factors)

    @classmethod
    def from_state(cls, psi: StateVector) -> DensityMatrix:
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.factors)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)[::-1]


@dataclass(frozen=True)
class FactorizationReport:
    """Outcome of a Schmidt (singular-value) test across a bipartition."""

    is_product: bool
    schmidt_values: np.ndarray
    left_factor: StateVector | None = None
    right_factor: StateVector | None = None

    def __post_init__(self):
        sv = np.array(self.schmidt_values, dtype=float)
        sv.setflags(write=False)
        object.__setattr__(self, "schmidt_values", sv)

    @property
    def second_schmidt(self) -> float:
        return float(self.schmidt_values[1]) if self.schmidt_values.size > 1 else 0.0


def basis_state(index: int, factors: Sequence[int]) -> StateVector:
    """The computational basis vector with a single 1 at ``index``."""
    dim = math.prod(factors)
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, tuple(factors))


def qubit_state(alpha: complex, beta: complex) -> StateVector:
    return StateVector(np.array([alpha, beta]), (2,))


def bits_to_index(bits: Sequence[int]) -> int:
    """Binary label -> basis index, most significant bit first."""
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product; resulting factors are the concatenated factor lists."""
    if not states:
        raise ValueError("tensor() needs at least one state")
    amps = states[0].amplitudes
    factors: tuple[int, ...] = states[0].factors
    normalized = states[0].normalized
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
        factors = factors + s.factors
        normalized = normalized and s.normalized
    return StateVector(amps, factors, normalized=normalized)


def tensor_operators(*ops: DenseOperator) -> DenseOperator:
    if not ops:
        raise ValueError("tensor_operators() needs at least one operator")
    mat = ops[0].entries
    factors: tuple[int, ...] = ops[0].factors
    for op in ops[1:]:
        mat = np.kron(mat, op.entries)
        factors = factors + op.factors
    return DenseOperator(mat, factors)


def apply(op: DenseOperator, psi: StateVector) -> StateVector:
    """Matrix-vector product ``op @ psi``; keeps the state's factor labels."""
    if op.dim != psi.dim:
        raise ValueError(f"operator dim {op.dim} != state dim {psi.dim}")
    return StateVector(op.entries @ psi.amplitudes, psi.factors,
                       normalized=psi.normalized)


def evolve_density(op: DenseOperator, rho: DensityMatrix) -> DensityMatrix:
    """Unitary conjugation ``op rho op^dagger``."""
    if op.dim != rho.dim:
        raise ValueError(f"operator dim {op.dim} != density dim {rho.dim}")
    return DensityMatrix(op.entries @ rho.entries @ op.entries.conj().T, rho.factors)


def permute(psi: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder tensor factors; ``order[i]`` is the old position of new slot i."""
    order = tuple(order)
    if sorted(order) != list(range(len(psi.factors))):
        raise ValueError(f"{order} is not a permutation of the factor slots")
    tens = psi.tensor_view().transpose(order)
    new_factors = tuple(psi.factors[i] for i in order)
    return StateVector(tens.reshape(-1), new_factors, normalized=psi.normalized)


def embed(op: DenseOperator, targets: Sequence[int],
          full_factors: Sequence[int]) -> DenseOperator:
    """Lift an operator on a subset of factors to the full space.

    The result acts as ``op`` on the factors listed in ``targets`` (in that
    order) and as the identity elsewhere.  Unitarity and hermiticity are
    preserved because the construction is an exact permutation of
    ``op (x) identity``.
    """
    full = tuple(int(d) for d in full_factors)
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target indices in {targets}")
    if any(t < 0 or t >= len(full) for t in targets):
        raise ValueError(f"target index out of range in {targets}")
    target_dims = tuple(full[t] for t in targets)
    if target_dims != op.factors:
        raise ValueError(
            f"operator factors {op.factors} do not match target dims {target_dims}"
        )
    rest = tuple(i for i in range(len(full)) if i not in targets)
    rest_dim = math.prod(full[i] for i in rest) if rest else 1
    big = np.kron(op.entries, np.eye(rest_dim))
    # big is ordered (targets..., rest...) on rows and columns; permute both
    # index groups back to the natural factor order.
    grouped = targets + rest
    inverse = tuple(np.argsort(grouped))
    dims_grouped = tuple(full[i] for i in grouped)
    dim = math.prod(full)
    tens = big.reshape(dims_grouped + dims_grouped)
    axes = inverse + tuple(i + len(full) for i in inverse)
    return DenseOperator(tens.transpose(axes).reshape(dim, dim), full)


def factorization(psi: StateVector, left: Iterable[int]) -> FactorizationReport:
    """Schmidt decomposition of ``psi`` across the (left | rest) bipartition.

    ``left`` lists the factor indices forming one side of the cut; the factors
    are permuted so the cut is contiguous, then the amplitude matrix is
    analyzed by SVD.  The state is a product across the cut iff every Schmidt
    value beyond the first is at most PRODUCT_TOL.
    """
    left = tuple(left)
    right = tuple(i for i in range(len(psi.factors)) if i not in left)
    if not left or not right:
        raise ValueError("both sides of the cut must be nonempty")
    if len(set(left)) != len(left) or any(i < 0 or i >= len(psi.factors) for i in left):
        raise ValueError(f"invalid cut {left} for factors {psi.factors}")
    arranged = permute(psi, left + right)
    dl = math.prod(arranged.factors[: len(left)])
    dr = math.prod(arranged.factors[len(left):])
    matrix = arranged.amplitudes.reshape(dl, dr)
    u, sv, vh = np.linalg.svd(matrix, full_matrices=False)
    is_product = bool(np.all(sv[1:] <= PRODUCT_TOL))
    left_state = right_state = None
    if is_product:
        lvec, rvec = u[:, 0], vh[0, :]
        # Fix the left factor's arbitrary SVD phase so outputs are reproducible;
        # the compensating phase moves to the right factor.
        pivot = lvec[np.argmax(np.abs(lvec))]
        phase = pivot / abs(pivot)
        lvec = lvec / phase
        rvec = rvec * phase
        lfactors = tuple(psi.factors[i] for i in left)
        rfactors = tuple(psi.factors[i] for i in right)
        left_state = StateVector(lvec, lfactors, normalized=False)
        right_state = StateVector(rvec, rfactors, normalized=False)
    return FactorizationReport(is_product, sv, left_state, right_state)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every factor not listed in ``keep``."""
    keep = tuple(keep)
    n = len(rho.factors)
    if not keep or len(set(keep)) != len(keep) or any(i < 0 or i >= n for i in keep):
        raise ValueError(f"invalid keep set {keep} for factors {rho.factors}")
    tens = rho.entries.reshape(rho.factors + rho.factors)
    # Contract row/column axes of each traced factor, highest axis first so
    # the remaining axis numbers stay valid.
    traced = sorted(set(range(n)) - set(keep), reverse=True)
    current = n
    for i in traced:
        tens = np.trace(tens, axis1=i, axis2=i + current)
        current -= 1
    kept = tuple(sorted(keep))
    dim = math.prod(rho.factors[i] for i in kept)
    out = tens.reshape(dim, dim)
    if kept != keep:
        # Reorder the kept factors to the caller's order.
        dims = tuple(rho.factors[i] for i in kept)
        order = tuple(kept.index(i) for i in keep)
        t = out.reshape(dims + dims)
        t = t.transpose(order + tuple(len(kept) + i for i in order))
        out = t.reshape(dim, dim)
    return DensityMatrix(out, tuple(rho.factors[i] for i in keep))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The diagonal of R is rotated onto the positive real axis, which removes
    the QR phase ambiguity and makes the distribution exactly Haar.
    """
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unitary(dim: int, seed: int) -> DenseOperator:
    """Seeded Haar-random unitary; identical seeds give identical matrices."""
    return DenseOperator(haar_unitary(dim, np.random.default_rng(seed)), (dim,))


def random_state(dim: int, rng: np.random.Generator | int) -> StateVector:
    """Haar-random pure state of the given dimension."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(z / np.linalg.norm(z), (dim,))
