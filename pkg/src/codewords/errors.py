"""Error generation: standard errors, coherent superpositions, mixtures, and
unitary entanglement of one physical qubit with an unknown environment.

The environment story: an interaction V on (qubit, environment) sends
``|0> (x) eta`` to ``|0> (x) w00 + |1> (x) w01`` and ``|1> (x) eta`` to
``|0> (x) w10 + |1> (x) w11``.  Regrouping the four environment vectors w_ij
splits the corrupted codeword into four branches -- correct codeword, phase
error, bit error, combined error -- each tensored with a fixed environment
state.  That decomposition is the module's core identity and is what makes
environment entanglement just another corrigible mixture.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .codes import QuantumCode
from .hilbert import (
    NORM_TOL,
    UNITARY_TOL,
    DenseOperator,
    DensityMatrix,
    StateVector,
    apply,
    embed,
    haar_unitary,
    random_state,
    tensor,
)


@dataclass(frozen=True)
class EnvironmentModel:
    """An environment of dimension ``dim`` with initial state and interaction.

    ``interaction`` is a unitary of order 2*dim acting on (qubit, environment)
    with the qubit as the leading factor.
    """

    dim: int
    initial_state: StateVector
    interaction: DenseOperator

    def __post_init__(self):
        if self.initial_state.dim != self.dim:
            raise ValueError("initial state dimension mismatch")
        if self.interaction.dim != 2 * self.dim:
            raise ValueError("interaction must act on qubit (x) environment")
        if not self.interaction.is_unitary(UNITARY_TOL):
            raise ValueError("interaction is not unitary")

    @classmethod
    def random(cls, dim: int, seed: int) -> EnvironmentModel:
        """Haar-random interaction and initial state, deterministic per seed."""
        rng = np.random.default_rng(seed)
        v = haar_unitary(2 * dim, rng)
        eta = random_state(dim, rng)
        return cls(dim, eta, DenseOperator(v, (2, dim)))

    @classmethod
    def from_qubit_unitary(cls, qubit_op: np.ndarray, dim: int = 2,
                           initial_state: StateVector | None = None) -> EnvironmentModel:
        """A non-entangling model: ``qubit_op (x) identity`` on the environment."""
        eta = initial_state if initial_state is not None else _basis_env(dim)
        v = np.kron(np.asarray(qubit_op, dtype=np.complex128), np.eye(dim))
        return cls(dim, eta, DenseOperator(v, (2, dim)))


def _basis_env(dim: int) -> StateVector:
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, (dim,))


@dataclass(frozen=True)
class BranchDecomposition:
    """The four environment vectors produced by one qubit-environment step.

    ``components[i, o]`` is the (sub-normalized) environment vector attached
    to the qubit transition |i> -> |o>.  Unitarity of the interaction imposes
    the row-norm and cross-orthogonality constraints checked on construction.
    """

    dim: int
    components: np.ndarray  # shape (2, 2, dim)

    def __post_init__(self):
        comp = np.array(self.components, dtype=np.complex128)
        if comp.shape != (2, 2, self.dim):
            raise ValueError("components must have shape (2, 2, dim)")
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)
        row0 = np.linalg.norm(comp[0]) ** 2
        row1 = np.linalg.norm(comp[1]) ** 2
        cross = np.vdot(comp[0, 0], comp[1, 0]) + np.vdot(comp[0, 1], comp[1, 1])
        if abs(row0 - 1.0) > NORM_TOL or abs(row1 - 1.0) > NORM_TOL:
            raise ValueError("row norms violate unitarity of the interaction")
        if abs(cross) > NORM_TOL:
            raise ValueError("cross products violate unitarity of the interaction")

    def component(self, qubit_in: int, qubit_out: int) -> np.ndarray:
        return self.components[qubit_in, qubit_out]

    def error_components(self) -> dict[str, np.ndarray]:
        """Environment vectors attached to the four corruption branches."""
        c = self.components
        return {
            "correct": (c[0, 0] + c[1, 1]) / 2,
            "phase": (c[0, 0] - c[1, 1]) / 2,
            "bit": (c[1, 0] + c[0, 1]) / 2,
            "both": (c[0, 1] - c[1, 0]) / 2,
        }


def branch_decompose(model: EnvironmentModel) -> BranchDecomposition:
    """Extract the four environment vectors from the interaction columns."""
    d = model.dim
    eta = model.initial_state.amplitudes
    components = np.empty((2, 2, d), dtype=np.complex128)
    for q_in in (0, 1):
        column = np.zeros(2 * d, dtype=np.complex128)
        column[q_in * d:(q_in + 1) * d] = eta
        image = model.interaction.entries @ column
        components[q_in, 0] = image[:d]
        components[q_in, 1] = image[d:]
    total = np.linalg.norm(
        [np.linalg.norm(v) for v in branch_values(components)]
    )
    # Parallelogram identity: the four branch vectors carry the full norm.
    assert abs(total - 1.0) <= NORM_TOL
    return BranchDecomposition(d, components)


def branch_values(components: np.ndarray) -> tuple[np.ndarray, ...]:
    c = components
    return ((c[0, 0] + c[1, 1]) / 2, (c[0, 0] - c[1, 1]) / 2,
            (c[1, 0] + c[0, 1]) / 2, (c[0, 1] - c[1, 0]) / 2)


@dataclass(frozen=True)
class BranchStates:
    """The four corruption branches of one codeword at one qubit position.

    ``correct``/``phase``/``bit``/``both`` are the codeword itself and its
    phase-, bit-, and combined-error corruptions at the singled-out qubit.
    For a code whose overlap conditions hold at that qubit, the eight vectors
    (both logical values) are orthonormal; ``orthonormal`` records the check.
    """

    correct: StateVector
    phase: StateVector
    bit: StateVector
    both: StateVector
    orthonormal: bool

    def as_dict(self) -> dict[str, StateVector]:
        return {"correct": self.correct, "phase": self.phase,
                "bit": self.bit, "both": self.both}


def branch_states(code: QuantumCode, z: int, k: int) -> BranchStates:
    split = code.single_out(z, k)
    p0 = split.part0.tensor_view()
    p1 = split.part1.tensor_view()

    def assemble(low, high) -> StateVector:
        tens = np.stack([low, high], axis=k)
        return StateVector(tens.reshape(-1), (2,) * code.n_physical,
                           normalized=False)

    report = code.verify_single_qubit_overlaps(k)
    return BranchStates(
        correct=assemble(p0, p1),
        phase=assemble(p0, -p1),
        bit=assemble(p1, p0),
        both=assemble(-p1, p0),
        orthonormal=report.passed,
    )


def interaction_operator(factors: Sequence[int], k: int,
                         model: EnvironmentModel) -> DenseOperator:
    """The interaction lifted to a full state space with trailing environment.

    ``factors`` must end with the environment dimension; ``k`` indexes the
    qubit factor the environment couples to.
    """
    factors = tuple(factors)
    env_slot = len(factors) - 1
    if factors[env_slot] != model.dim:
        raise ValueError("last factor must be the environment")
    if not 0 <= k < env_slot or factors[k] != 2:
        raise ValueError(f"invalid qubit index {k} for factors {factors}")
    return embed(model.interaction, (k, env_slot), factors)


def entangle_environment(code: QuantumCode, psi_physical: StateVector, k: int,
                         model: EnvironmentModel) -> StateVector:
    """Couple physical qubit ``k`` to the environment; environment goes last."""
    if psi_physical.factors != (2,) * code.n_physical:
        raise ValueError("expected a bare physical codeword state")
    joint = tensor(psi_physical, model.initial_state)
    op = interaction_operator(joint.factors, k, model)
    return apply(op, joint)


def reconstruct_from_branches(code: QuantumCode, z: int, k: int,
                              decomposition: BranchDecomposition) -> StateVector:
    """Rebuild the entangled state as the sum of the four corruption branches.

    Independent of entangle_environment (no lifted interaction matrix is
    involved), which makes the agreement of the two routes the module's
    core consistency check.
    """
    states = branch_states(code, z, k).as_dict()
    env = decomposition.error_components()
    total = np.zeros(code.dim * decomposition.dim, dtype=np.complex128)
    for name, state in states.items():
        total += np.kron(state.amplitudes, env[name])
    return StateVector(total, (2,) * code.n_physical + (decomposition.dim,))


def apply_coherent(code: QuantumCode, psi_physical: StateVector,
                   coefficients: np.ndarray) -> StateVector:
    """Corrupt a codeword by the superposition sum_a c_a (standard error a).

    The input must lie in the span of the two error-free codewords; the
    result is the same logical content with the ancilla pushed into the
    superposition ``c`` of syndromes.
    """
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.size != code.n_syndromes:
        raise ValueError(f"expected {code.n_syndromes} coefficients")
    if abs(np.linalg.norm(c) - 1.0) > NORM_TOL:
        raise ValueError("coefficient vector is not normalized")
    logical = _logical_components(code, psi_physical)
    return code.encode_with_syndrome(
        StateVector(logical, (2,), normalized=False), c)


def _logical_components(code: QuantumCode, psi_physical: StateVector) -> np.ndarray:
    decoded = code.decode(psi_physical)
    matrix = decoded.amplitudes.reshape(2, code.n_syndromes)
    residual = np.linalg.norm(matrix[:, 1:])
    if residual > NORM_TOL:
        raise ValueError(
            f"state is not in the error-free codeword span (residual {residual:.3e})"
        )
    return matrix[:, 0].copy()


def validate_mixture(mixture: Sequence[tuple[float, np.ndarray]],
                     n_syndromes: int) -> list[tuple[float, np.ndarray]]:
    cleaned = []
    total = 0.0
    for p, c in mixture:
        p = float(p)
        c = np.asarray(c, dtype=np.complex128)
        if p <= 0:
            raise ValueError("mixture probabilities must be positive")
        if c.size != n_syndromes:
            raise ValueError(f"expected coefficient vectors of length {n_syndromes}")
        if abs(np.linalg.norm(c) - 1.0) > NORM_TOL:
            raise ValueError("mixture coefficient vector is not normalized")
        total += p
        cleaned.append((p, c))
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"mixture probabilities sum to {total}, not 1")
    return cleaned


def apply_mixture(code: QuantumCode, state: StateVector | DensityMatrix,
                  mixture: Sequence[tuple[float, np.ndarray]]) -> DensityMatrix:
    """Probabilistic mixture of coherent corruptions, as a density matrix.

    Accepts either an encoded pure state or a density matrix supported on the
    error-free codeword span.
    """
    mixture = validate_mixture(mixture, code.n_syndromes)
    if isinstance(state, StateVector):
        logical = _logical_components(code, state)
        rho_logical = np.outer(logical, logical.conj())
    else:
        decoded = code.encoding.conj().T @ state.entries @ code.encoding
        block = decoded.reshape(2, code.n_syndromes, 2, code.n_syndromes)
        rho_logical = block[:, 0, :, 0].copy()
        off = np.linalg.norm(decoded) ** 2 - np.linalg.norm(rho_logical) ** 2
        if off > NORM_TOL:
            raise ValueError("density matrix is not supported on the codeword span")
    out = np.zeros((code.dim, code.dim), dtype=np.complex128)
    for p, c in mixture:
        out += p * np.kron(rho_logical, np.outer(c, c.conj()))
    corrupted = code.encoding @ out @ code.encoding.conj().T
    return DensityMatrix(corrupted, (2,) * code.n_physical)


# --- error events (the CLI's serialized corruption descriptions) ------------

@dataclass(frozen=True)
class ErrorEvent:
    """One corruption to apply to an encoded state.

    kind is one of "standard" (index a), "coherent" (coefficient vector),
    "mixture" (list of (p, coefficients)), or "environment" (qubit index plus
    an EnvironmentModel).
    """

    kind: str
    syndrome: int | None = None
    coefficients: np.ndarray | None = None
    terms: tuple[tuple[float, np.ndarray], ...] | None = None
    qubit: int | None = None
    model: EnvironmentModel | None = None

    def apply(self, code: QuantumCode,
              encoded: StateVector) -> StateVector | DensityMatrix:
        if self.kind == "standard":
            return code.apply_standard_error(self.syndrome, encoded)
        if self.kind == "coherent":
            return apply_coherent(code, encoded, self.coefficients)
        if self.kind == "mixture":
            return apply_mixture(code, encoded, self.terms)
        if self.kind == "environment":
            return entangle_environment(code, encoded, self.qubit, self.model)
        raise ValueError(f"unknown error kind {self.kind!r}")


def random_coefficients(dim: int, rng: np.random.Generator | int) -> np.ndarray:
    return random_state(dim, rng).amplitudes


def random_mixture(dim: int, terms: int,
                   rng: np.random.Generator | int) -> tuple[tuple[float, np.ndarray], ...]:
    """A random mixture of ``terms`` coherent errors with Dirichlet weights."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    probs = rng.dirichlet(np.ones(terms))
    return tuple((float(p), random_coefficients(dim, rng)) for p in probs)


def parse_event_spec(text: str) -> dict:
    """Parse a CLI error description like ``env:qubit=2,dim=2,seed=9``.

    Returns the raw fields; instantiate_event() resolves them against a code.
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    aliases = {"env": "environment", "std": "standard"}
    kind = aliases.get(kind, kind)
    if kind not in ("standard", "coherent", "mixture", "environment"):
        raise ValueError(f"unknown error kind {kind!r} in {text!r}")
    fields: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"malformed error field {item!r} in {text!r}")
            fields[key.strip()] = value.strip()
    return {"kind": kind, **fields}


def instantiate_event(code: QuantumCode, params: dict, *,
                      default_env_dim: int = 2,
                      rng: np.random.Generator | None = None) -> ErrorEvent:
    """Turn parsed event fields into a concrete ErrorEvent for ``code``.

    Events that carry their own ``seed`` are deterministic; events without
    one draw from ``rng`` (so a trial loop can vary them).
    """
    kind = params["kind"]

    def event_rng(*salt: int) -> np.random.Generator:
        if "seed" in params:
            return np.random.default_rng((int(params["seed"]),) + salt)
        if rng is None:
            raise ValueError(f"{kind} event needs seed=... (no fallback generator)")
        return rng

    if kind == "standard":
        a = int(params.get("a", 0))
        if not 0 <= a < code.n_syndromes:
            raise ValueError(f"syndrome a={a} out of range for {code.name}")
        return ErrorEvent(kind="standard", syndrome=a)
    if kind == "coherent":
        c = random_coefficients(code.n_syndromes, event_rng())
        return ErrorEvent(kind="coherent", coefficients=c)
    if kind == "mixture":
        if "file" in params:
            import json

            data = json.loads(open(params["file"]).read())
            terms = tuple(
                (float(t["p"]), np.array([complex(re, im) for re, im in t["c"]]))
                for t in data
            )
            return ErrorEvent(kind="mixture",
                              terms=tuple(validate_mixture(terms, code.n_syndromes)))
        terms_n = int(params.get("terms", 2))
        return ErrorEvent(
            kind="mixture",
            terms=random_mixture(code.n_syndromes, terms_n, event_rng()))
    if kind == "environment":
        qubit = int(params.get("qubit", 0))
        dim = int(params.get("dim", default_env_dim))
        if not 0 <= qubit < code.n_physical:
            raise ValueError(f"qubit={qubit} out of range for {code.name}")
        if "seed" in params:
            model = EnvironmentModel.random(dim, int(params["seed"]))
        else:
            gen = event_rng()
            model = EnvironmentModel(
                dim, random_state(dim, gen),
                DenseOperator(haar_unitary(2 * dim, gen), (2, dim)))
        return ErrorEvent(kind="environment", qubit=qubit, model=model)
    raise ValueError(f"unknown error kind {kind!r}")
