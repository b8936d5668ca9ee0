"""Small dense statevector simulator with the gate set used in the protocols.

Conventions
-----------
- Qubit 0 is the most significant bit of a basis index, so ``|ab>`` on qubits
  (0, 1) has index ``2*a + b``.
- ``Z_theta = exp(-i theta Z / 2)`` and ``V_theta = exp(-i theta V / 2)`` in
  general; ``S = X_{pi/2}`` is the native square root of X and
  ``S_theta = Z_theta^dag S Z_theta``.
- Two-qubit gates come in two directions with
  ``<a'b'|G_up|ab> = <b'a'|G_down|ba>``. ``CNOT_down`` has its control on the
  first target qubit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 8
UNITARY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def rotation(generator: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta V / 2) for an involution V (V @ V = identity)."""
    eye = np.eye(generator.shape[0], dtype=complex)
    return np.cos(theta / 2) * eye - 1j * np.sin(theta / 2) * generator


@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"gate {self.label!r}: unsupported shape {m.shape}")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if dev > UNITARY_TOL:
            raise ValueError(f"gate {self.label!r} is not unitary (deviation {dev:.2e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return 1 if self.matrix.shape[0] == 2 else 2

    def __matmul__(self, other: "Gate") -> "Gate":
        return Gate(self.matrix @ other.matrix, f"{self.label}.{other.label}")

    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, f"{self.label}^dag")


def tensor(*gates: Gate) -> Gate:
    m = np.array([[1.0 + 0j]])
    for g in gates:
        m = np.kron(m, g.matrix)
    return Gate(m, "".join(g.label for g in gates))


def gate_identity() -> Gate:
    return Gate(I2, "I")


def gate_x() -> Gate:
    return Gate(PAULI_X, "X")


def gate_y() -> Gate:
    return Gate(PAULI_Y, "Y")


def gate_pauli_z() -> Gate:
    return Gate(PAULI_Z, "Zp")


def gate_s() -> Gate:
    """Native pi/2 rotation (sigma_0 - i sigma_1)/sqrt(2)."""
    return Gate((I2 - 1j * PAULI_X) / np.sqrt(2), "S")


def gate_z(theta: float) -> Gate:
    return Gate(rotation(PAULI_Z, theta), f"Z({theta:.6g})")


def gate_s_theta(theta: float) -> Gate:
    z = rotation(PAULI_Z, theta)
    return Gate(z.conj().T @ gate_s().matrix @ z, f"S({theta:.6g})")


def gate_y_rot(sign: int) -> Gate:
    """Y_{+-} = Y_{+-pi/2}."""
    return Gate(rotation(PAULI_Y, sign * np.pi / 2), "Y+" if sign > 0 else "Y-")


def gate_h() -> Gate:
    return Gate((PAULI_Z + PAULI_X) / np.sqrt(2), "H")


def _orient(m: np.ndarray, direction: str) -> np.ndarray:
    if direction == "down":
        return m
    if direction == "up":
        return _SWAP @ m @ _SWAP
    raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def gate_cnot(direction: str = "down") -> Gate:
    m = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    return Gate(_orient(m, direction), f"CNOT{'v' if direction == 'down' else '^'}")


def gate_cr(sign: int) -> Gate:
    """Cross-resonance CR+- = (ZX)_{+-pi/4}."""
    return Gate(rotation(np.kron(PAULI_Z, PAULI_X), sign * np.pi / 4), "CR+" if sign > 0 else "CR-")


def gate_ecr(direction: str = "down") -> Gate:
    """Echoed cross resonance, ECR_down = CR- (X x I) CR+."""
    m = gate_cr(-1).matrix @ np.kron(PAULI_X, I2) @ gate_cr(+1).matrix
    return Gate(_orient(m, direction), f"ECR{'v' if direction == 'down' else '^'}")


def gate_swap() -> Gate:
    return Gate(_SWAP, "SWAP")


# --- states ------------------------------------------------------------------


def _apply_matrix(amps: np.ndarray, mat: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    k = len(targets)
    psi = amps.reshape((2,) * n)
    psi = np.moveaxis(psi, list(targets), list(range(k)))
    shape = psi.shape
    psi = (mat @ psi.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(psi, list(range(k)), list(targets)).reshape(-1)


def _check_targets(targets: Sequence[int], n: int) -> tuple[int, ...]:
    t = tuple(int(q) for q in targets)
    if any(q < 0 or q >= n for q in t):
        raise IndexError(f"qubit index out of range in {t} for {n} qubits")
    if len(set(t)) != len(t):
        raise ValueError(f"repeated target qubit in {t}")
    return t


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        q = a.size.bit_length() - 1
        if a.size != 2**q or q < 1:
            raise ValueError(f"amplitude vector length {a.size} is not a power of two")
        if q > MAX_QUBITS:
            raise ValueError(f"{q} qubits exceeds the simulator cap of {MAX_QUBITS}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zero(cls, qubit_count: int) -> "StateVector":
        a = np.zeros(2**qubit_count, dtype=complex)
        a[0] = 1
        return cls(a)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        a = np.zeros(2 ** len(bits), dtype=complex)
        a[int(bits, 2)] = 1
        return cls(a)

    @property
    def qubit_count(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def marginal(self, qubits: Sequence[int]) -> np.ndarray:
        """Outcome distribution over ``qubits``; the first listed is the MSB."""
        n = self.qubit_count
        qs = _check_targets(qubits, n)
        p = self.probabilities().reshape((2,) * n)
        rest = tuple(q for q in range(n) if q not in qs)
        p = p.sum(axis=rest)
        # remaining axes are in increasing qubit order; reorder to requested
        return np.transpose(p, _perm_to(qs)).reshape(-1)

    def density_matrix(self, qubits: Sequence[int] | None = None) -> np.ndarray:
        """Reduced density matrix on ``qubits`` (all qubits when omitted)."""
        n = self.qubit_count
        if qubits is None:
            return np.outer(self.amplitudes, self.amplitudes.conj())
        qs = _check_targets(qubits, n)
        rest = [q for q in range(n) if q not in qs]
        psi = np.moveaxis(self.amplitudes.reshape((2,) * n), list(qs) + rest, list(range(n)))
        psi = psi.reshape(2 ** len(qs), -1)
        return psi @ psi.conj().T


def _perm_to(qs: tuple[int, ...]) -> list[int]:
    # axes after summation are sorted qubit labels; map requested order onto them
    srt = sorted(qs)
    return [srt.index(q) for q in qs]


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    n = state.qubit_count
    t = _check_targets(targets, n)
    if len(t) != gate.arity:
        raise ValueError(f"gate {gate.label!r} acts on {gate.arity} qubits, got targets {t}")
    return StateVector(_apply_matrix(state.amplitudes, gate.matrix, t, n))


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    ops: tuple = ()
    initial: str = ""

    def __post_init__(self):
        if not 1 <= self.qubit_count <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}")
        init = self.initial or "0" * self.qubit_count
        if len(init) != self.qubit_count or set(init) - {"0", "1"}:
            raise ValueError(f"bad initial state label {self.initial!r}")
        object.__setattr__(self, "initial", init)
        ops = []
        for gate, targets in self.ops:
            t = _check_targets(targets, self.qubit_count)
            if len(t) != gate.arity:
                raise ValueError(f"gate {gate.label!r} arity mismatch with targets {t}")
            ops.append((gate, t))
        object.__setattr__(self, "ops", tuple(ops))

    def then(self, gate: Gate, *targets: int) -> "Circuit":
        return Circuit(self.qubit_count, self.ops + ((gate, targets),), self.initial)

    def extend(self, ops: Iterable[tuple[Gate, Sequence[int]]]) -> "Circuit":
        return Circuit(self.qubit_count, self.ops + tuple((g, tuple(t)) for g, t in ops), self.initial)

    def run(self, state: StateVector | None = None) -> StateVector:
        amps = (state or StateVector.from_bits(self.initial)).amplitudes
        n = self.qubit_count
        for gate, t in self.ops:
            amps = _apply_matrix(amps, gate.matrix, t, n)
        return StateVector(amps)

    def unitary(self) -> np.ndarray:
        """Full matrix of the circuit, columns indexed by input basis states."""
        dim = 2**self.qubit_count
        cols = [self.run(StateVector(np.eye(dim, dtype=complex)[k])).amplitudes for k in range(dim)]
        return np.array(cols).T

    def __len__(self) -> int:
        return len(self.ops)


# --- observables ---------------------------------------------------------------


@dataclass(frozen=True)
class Observable:
    """Hermitian effect 0 <= A <= 1 on one or more qubits."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("observable must be a square matrix")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError(f"observable {self.label!r} is not Hermitian")
        ev = np.linalg.eigvalsh(m)
        if ev.min() < -1e-10 or ev.max() > 1 + 1e-10:
            raise ValueError(f"observable {self.label!r} eigenvalues outside [0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def qubit_count(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @classmethod
    def identity(cls, qubits: int = 1) -> "Observable":
        return cls(np.eye(2**qubits), "I")


@dataclass(frozen=True)
class Povm:
    effects: tuple

    def __post_init__(self):
        effects = tuple(e if isinstance(e, Observable) else Observable(e) for e in self.effects)
        dims = {e.matrix.shape for e in effects}
        if len(dims) != 1:
            raise ValueError("POVM effects act on different registers")
        total = sum(e.matrix for e in effects)
        dev = np.max(np.abs(total - np.eye(total.shape[0])))
        if dev > 1e-12:
            raise ValueError(f"POVM effects do not sum to identity (deviation {dev:.2e})")
        object.__setattr__(self, "effects", effects)

    def __len__(self) -> int:
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)


def bloch_projector(a: Sequence[float]) -> Observable:
    """(I + a.sigma)/2, the projector on the +1 eigenstate of a.sigma."""
    v = np.asarray(a, dtype=float)
    if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-12:
        raise ValueError(f"expected a unit 3-vector, got {a!r}")
    return Observable((I2 + sum(c * s for c, s in zip(v, PAULIS))) / 2)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch components Tr(rho sigma_k) of a 2x2 operator."""
    return np.array([np.real(np.trace(rho @ s)) for s in PAULIS])


def tetrahedron_vectors() -> np.ndarray:
    """The four directions m_1..m_4 of the rotated tetrahedron."""
    a, b = np.sqrt(2 / 3), 1 / np.sqrt(3)
    return np.array([[a, 0, -b], [0, a, b], [-a, 0, -b], [0, -a, b]])


def tetrahedron_povm() -> Povm:
    """Five-outcome POVM M_j = (1 + m_j.sigma)/8 for j <= 4 and M_5 = 1/2."""
    effects = [
        Observable((I2 + sum(c * s for c, s in zip(m, PAULIS))) / 8, f"M{j + 1}")
        for j, m in enumerate(tetrahedron_vectors())
    ]
    effects.append(Observable(I2 / 2, "M5"))
    return Povm(tuple(effects))


def joint_probability(
    state,
    a: Observable,
    b: Observable,
    a_qubits: Sequence[int] | None = None,
    b_qubits: Sequence[int] | None = None,
) -> float:
    """Tr((A x B) rho) with A and B acting on disjoint qubit registers.

    ``state`` is a :class:`StateVector` or a density matrix. By default A acts on
    the leading qubits and B on the ones right after.
    """
    if isinstance(state, StateVector):
        n = state.qubit_count
        rho = None
        amps = state.amplitudes
    else:
        rho = np.asarray(state, dtype=complex)
        n = rho.shape[0].bit_length() - 1
    ka, kb = a.qubit_count, b.qubit_count
    aq = tuple(range(ka)) if a_qubits is None else tuple(a_qubits)
    bq = tuple(range(ka, ka + kb)) if b_qubits is None else tuple(b_qubits)
    if set(aq) & set(bq):
        raise ValueError(f"registers overlap: {aq} and {bq}")
    targets = _check_targets(aq + bq, n)
    op = np.kron(a.matrix, b.matrix)
    if rho is None:
        return float(np.real(np.vdot(amps, _apply_matrix(amps, op, targets, n))))
    # act on rows of rho: Tr(O rho) = sum_i (O rho)_ii
    cols = [_apply_matrix(rho[:, c], op, targets, n) for c in range(rho.shape[1])]
    return float(np.real(np.trace(np.stack(cols, axis=1))))


# --- the Q block ---------------------------------------------------------------

ETA = float(np.arccos(np.sqrt(1 / 3)))


def q_gate_ops(working: int, ancilla: int) -> list[tuple[Gate, tuple[int, ...]]]:
    """Gate sequence mapping the working qubit onto the tetrahedron outcomes.

    The ancilla starts in |0>. Afterwards the two-bit outcome
    (working, ancilla) = 00, 10, 01, 11 is the projection on m_1..m_4.
    """
    s = gate_s()
    return [
        (s, (ancilla,)),
        (gate_z(ETA), (ancilla,)),
        (s, (ancilla,)),
        (gate_z(np.pi / 4), (ancilla,)),
        (gate_z(-np.pi / 4), (working,)),
        (gate_cnot("down"), (ancilla, working)),
        (gate_z(np.pi / 2), (ancilla,)),
        (s, (ancilla,)),
    ]


def gate_q() -> Circuit:
    """Two-qubit Q fragment with the working qubit as qubit 0."""
    return Circuit(2).extend(q_gate_ops(0, 1))


def q_gate_povm() -> Povm:
    """Effects on the working qubit induced by Q and a computational readout.

    Effect k belongs to outcome (working, ancilla) = (k % 2, k // 2).
    """
    u = gate_q().unitary()
    kraus = u[:, [0, 2]]  # ancilla in |0>, working qubit free
    effects = []
    for k in range(4):
        row = kraus[2 * (k % 2) + k // 2]
        effects.append(np.outer(row.conj(), row))
    return Povm(tuple(effects))


# --- gate identities -------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    deviation: float
    phase: complex = field(default=1 + 0j)

    @property
    def ok(self) -> bool:
        return self.deviation < 1e-12


def match_up_to_phase(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, complex]:
    """Max deviation of lhs from phase * rhs, with the best-fitting unit phase."""
    overlap = np.vdot(rhs, lhs)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0 + 0j
    return float(np.max(np.abs(lhs - phase * rhs))), complex(phase)


def verify_gate_identities() -> list[IdentityCheck]:
    s, h, x = gate_s().matrix, gate_h().matrix, PAULI_X
    zp, zm = gate_z(np.pi / 2).matrix, gate_z(-np.pi / 2).matrix
    yp, ym = gate_y_rot(+1).matrix, gate_y_rot(-1).matrix
    ecr = gate_ecr("down").matrix
    k = np.kron
    printed_ecr = np.array([[0, 0, 1, 1j], [0, 0, 1j, 1], [1, -1j, 0, 0], [-1j, 1, 0, 0]]) / np.sqrt(2)
    checks = [
        ("ECRv = CR- (XI) CR+ = printed matrix", ecr, printed_ecr),
        ("ECRv = (XI - YX)/sqrt2", ecr, (k(x, I2) - k(PAULI_Y, x)) / np.sqrt(2)),
        ("ECRv ECRv = II", ecr @ ecr, np.eye(4)),
        ("ECR^ = (IX - XY)/sqrt2", gate_ecr("up").matrix, (k(I2, x) - k(x, PAULI_Y)) / np.sqrt(2)),
        ("ECR^ = (HH) ECRv (Y+ Y-)", gate_ecr("up").matrix, k(h, h) @ ecr @ k(yp, ym)),
        ("CNOTv = (Z+ I) ECRv (X S)", gate_cnot("down").matrix, k(zp, I2) @ ecr @ k(x, s)),
        ("CNOT^ = (HH) CNOTv (HH)", gate_cnot("up").matrix, k(h, h) @ gate_cnot("down").matrix @ k(h, h)),
        ("CNOT^ = (HH) ECRv (SS) (Z- H)", gate_cnot("up").matrix, k(h, h) @ ecr @ k(s, s) @ k(zm, h)),
        ("H = Z+ S Z+", h, zp @ s @ zp),
        ("H H = I", h @ h, I2),
        ("Y+ = Z+ S Z-", yp, zp @ s @ zm),
        ("Y- = Z- S Z+", ym, zm @ s @ zp),
        ("Y+ = H Z", yp, h @ PAULI_Z),
        ("Y- = Z H", ym, PAULI_Z @ h),
        ("X- = Z X+ Z", rotation(x, -np.pi / 2), PAULI_Z @ s @ PAULI_Z),
    ]
    out = []
    for name, lhs, rhs in checks:
        dev, phase = match_up_to_phase(np.asarray(lhs, complex), np.asarray(rhs, complex))
        out.append(IdentityCheck(name, dev, phase))
    return out
