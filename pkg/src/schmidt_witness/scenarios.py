"""Builders for the two measurement protocols and the prepare-measure counterexample.

Protocol A prepares a two-qubit singlet between the end qubits of a short chain
and measures each end along one of four Bloch directions (binary outcome,
"yes" = bit 0 after the basis rotation). Protocol B measures each end qubit
with the five-outcome tetrahedron POVM realised on three qubits per party.

Canonical orderings (the witness sign depends on them):

* set vectors are used in the order returned by :func:`measurement_set_i` /
  :func:`measurement_set_ii`; party B uses the negated vectors;
* protocol A per-setting outcomes are ordered (A bit, B bit) = 00, 01, 10, 11,
  i.e. yes/yes, yes/no, no/yes, no/no;
* protocol B outcomes 1..4 are working/ancilla bits (a1 a2) = 00, 10, 01, 11 on
  the branch where the spectator bit equals the chosen value; outcome 5 lumps
  the other branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import exact_determinant
from .qsim import (
    Circuit,
    Observable,
    StateVector,
    bloch_projector,
    bloch_vector,
    gate_cnot,
    gate_s,
    gate_s_theta,
    gate_x,
    gate_z,
    joint_probability,
    q_gate_ops,
)
from .witness import ProbabilityMatrix

SET_NAMES = ("SetI", "SetII", "Tetrahedron")

_R3 = np.sqrt(3.0)


def measurement_set_i() -> np.ndarray:
    """(+-1, +-1, 1)/sqrt3 in reading order."""
    return np.array([[1, 1, 1], [1, -1, 1], [-1, 1, 1], [-1, -1, 1]], dtype=float) / _R3


def measurement_set_ii() -> np.ndarray:
    return np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1 / _R3, 1 / _R3, 1 / _R3]])


def measurement_vectors(name: str) -> np.ndarray:
    if name == "SetI":
        return measurement_set_i()
    if name == "SetII":
        return measurement_set_ii()
    raise ValueError(f"no binary measurement set named {name!r}")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    measurement_set: str
    middle_qubits: int = 2
    spectator: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.kind == "A":
            if self.measurement_set not in ("SetI", "SetII"):
                raise ValueError("kind A requires SetI or SetII")
            if self.middle_qubits not in (2, 3):
                raise ValueError(f"kind A supports 2 or 3 middle qubits, got {self.middle_qubits}")
        elif self.kind == "B":
            if self.measurement_set != "Tetrahedron":
                raise ValueError("kind B requires the Tetrahedron measurement")
            if self.middle_qubits != 1:
                raise ValueError("kind B uses exactly one connector qubit")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        if tuple(self.spectator) not in ((0, 0), (0, 1), (1, 0), (1, 1)):
            raise ValueError(f"spectator choice must be a bit pair, got {self.spectator!r}")
        object.__setattr__(self, "spectator", tuple(int(b) for b in self.spectator))

    @classmethod
    def a(cls, measurement_set: str = "SetI", middle_qubits: int = 2) -> "ScenarioSpec":
        return cls("A", measurement_set, middle_qubits)

    @classmethod
    def b(cls, spectator: tuple[int, int] = (0, 0)) -> "ScenarioSpec":
        return cls("B", "Tetrahedron", 1, spectator)

    @property
    def name(self) -> str:
        if self.kind == "B":
            return "b"
        return {"SetI": "a-set1", "SetII": "a-set2"}[self.measurement_set]

    @classmethod
    def from_name(cls, name: str, middle_qubits: int = 2) -> "ScenarioSpec":
        table = {"a-set1": ("A", "SetI"), "a-set2": ("A", "SetII")}
        if name == "b":
            return cls.b()
        if name not in table:
            raise ValueError(f"unknown scenario {name!r}; expected a-set1, a-set2 or b")
        return cls(*table[name], middle_qubits)


# --- protocol A ------------------------------------------------------------------

# columns are the physical images of logical |+> and |-> for party B
B_FRAME = np.array([[0, 1], [1j, 0]])


def rotation_angles(a) -> tuple[float, float]:
    """Angles (theta1, theta2) with S_theta2 S_theta1 mapping the +1 eigenstate of a.sigma to |0>."""
    v = np.asarray(a, dtype=float)
    alpha = float(np.arctan2(v[1], v[0]))
    beta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
    return np.pi - alpha, beta - alpha


def basis_rotation_ops(a, qubit: int) -> list:
    t1, t2 = rotation_angles(a)
    return [(gate_s_theta(t1), (qubit,)), (gate_s_theta(t2), (qubit,))]


def physical_direction_b(a) -> np.ndarray:
    """Physical Bloch vector measured by B to realise logical direction a."""
    proj = B_FRAME @ bloch_projector(a).matrix @ B_FRAME.conj().T
    return bloch_vector(proj)


def end_qubits(spec: ScenarioSpec) -> tuple[int, int]:
    return 0, spec.middle_qubits + 1


def entangling_ops(middle_qubits: int) -> list:
    cx = gate_cnot("down")
    if middle_qubits == 2:
        return [
            (gate_s(), (1,)),
            (cx, (1, 2)),
            (cx, (1, 0)),
            (cx, (0, 1)),
            (cx, (2, 3)),
            (cx, (3, 2)),
        ]
    if middle_qubits == 3:
        return [
            (gate_s(), (2,)),
            (cx, (2, 3)),
            (cx, (2, 1)),
            (cx, (1, 2)),
            (cx, (3, 4)),
            (cx, (4, 3)),
            (cx, (1, 0)),
            (cx, (0, 1)),
        ]
    raise ValueError(f"unsupported middle qubit count {middle_qubits}")


def build_circuit_a(spec: ScenarioSpec, setting: tuple[int, int] | None = None) -> Circuit:
    """Chain circuit; with ``setting=(i, j)`` (1-based) the basis rotations are appended."""
    if spec.kind != "A":
        raise ValueError("build_circuit_a needs a kind A scenario")
    c = Circuit(spec.middle_qubits + 2).extend(entangling_ops(spec.middle_qubits))
    if setting is None:
        return c
    i, j = setting
    vecs = measurement_vectors(spec.measurement_set)
    qa, qb = end_qubits(spec)
    c = c.extend(basis_rotation_ops(vecs[i - 1], qa))
    return c.extend(basis_rotation_ops(physical_direction_b(-vecs[j - 1]), qb))


def setting_distribution_a(spec: ScenarioSpec, i: int, j: int) -> np.ndarray:
    """Outcome probabilities (yy, yn, ny, nn) for setting (i, j) by simulation."""
    state = build_circuit_a(spec, (i, j)).run()
    return state.marginal(end_qubits(spec))


def ideal_settings_a(spec: ScenarioSpec) -> np.ndarray:
    """Array (4, 4, 4): per setting (i, j) the four outcome probabilities."""
    return np.array([[setting_distribution_a(spec, i, j) for j in range(1, 5)] for i in range(1, 5)])


def matrix_from_settings(settings: np.ndarray) -> ProbabilityMatrix:
    """Kind A matrix from per-setting outcome frequencies, marginals averaged over settings."""
    s = np.asarray(settings, dtype=float)
    n = s.shape[0]
    p = np.ones((n + 1, n + 1))
    p[1:, 1:] = s[..., 0]
    p[1:, 0] = (s[..., 0] + s[..., 1]).mean(axis=1)
    p[0, 1:] = (s[..., 0] + s[..., 2]).mean(axis=0)
    return ProbabilityMatrix(p, "A")


def ideal_matrix_a(spec: ScenarioSpec) -> ProbabilityMatrix:
    return matrix_from_settings(ideal_settings_a(spec)).validate()


def singlet_matrix_a(vectors) -> ProbabilityMatrix:
    """Same matrix from the Born rule on a bare two-qubit singlet, no circuit involved."""
    vecs = np.asarray(vectors, dtype=float)
    singlet = StateVector(np.array([0, 1, -1, 0]) / np.sqrt(2))
    one = Observable.identity()
    pa = [one] + [bloch_projector(v) for v in vecs]
    pb = [one] + [bloch_projector(-v) for v in vecs]
    p = np.array([[joint_probability(singlet, x, y) for y in pb] for x in pa])
    return ProbabilityMatrix(p, "A")


# --- protocol B ------------------------------------------------------------------

# party qubits as (spectator, working, ancilla)
QUBITS_A = (0, 1, 2)
CONNECTOR = 3
QUBITS_B = (6, 5, 4)


def build_circuit_b() -> Circuit:
    cx = gate_cnot("down")
    s = gate_s()
    zp = gate_z(np.pi / 2)
    a0, a1, a2 = QUBITS_A
    b0, b1, b2 = QUBITS_B
    ops = [
        (s, (CONNECTOR,)),
        (cx, (CONNECTOR, a1)),
        (cx, (CONNECTOR, b1)),
        (cx, (a1, CONNECTOR)),
        (gate_z(-np.pi / 2), (b1,)),
        (gate_x(), (b1,)),
        (cx, (a1, a0)),
        (cx, (b1, b0)),
        (zp, (a0,)),
        (s, (a0,)),
        (zp, (b0,)),
        (s, (b0,)),
    ]
    ops += q_gate_ops(a1, a2)
    ops += q_gate_ops(b1, b2)
    return Circuit(7).extend(ops)


def raw_distribution_b(circuit: Circuit | None = None) -> np.ndarray:
    """Distribution indexed [a0, a1, a2, b0, b1, b2], shape (2,) * 6."""
    state = (circuit or build_circuit_b()).run()
    return state.marginal(QUBITS_A + QUBITS_B).reshape((2,) * 6)


def outcome_label(bits: tuple[int, int, int], spectator: int) -> int:
    """Zero-based aggregated outcome (0..4) of a party's raw (s, w, a) triple."""
    s, w, a = bits
    return w + 2 * a if s == spectator else 4


@dataclass(frozen=True)
class OutcomeLabeling:
    spectator: tuple[int, int]

    def party_labels(self, party: int) -> np.ndarray:
        """Label for each raw triple index 4*s + 2*w + a."""
        sv = self.spectator[party]
        return np.array([outcome_label(t, sv) for t in itertools.product((0, 1), repeat=3)])

    def matrix(self) -> np.ndarray:
        """25 x 64 zero/one map from raw to aggregated probabilities."""
        la, lb = self.party_labels(0), self.party_labels(1)
        m = np.zeros((25, 64))
        for ra, rb in itertools.product(range(8), repeat=2):
            m[5 * la[ra] + lb[rb], 8 * ra + rb] = 1
        return m


def aggregate_b(raw, spectator: tuple[int, int] = (0, 0)) -> ProbabilityMatrix:
    r = np.asarray(raw, dtype=float).reshape(-1)
    if r.size != 64:
        raise ValueError(f"expected 64 raw probabilities, got {r.size}")
    if abs(r.sum() - 1) > 1e-10:
        raise ValueError(f"raw distribution sums to {r.sum()!r}")
    p = (OutcomeLabeling(tuple(spectator)).matrix() @ r).reshape(5, 5)
    return ProbabilityMatrix(p, "B")


def ideal_matrix_b(spectator: tuple[int, int] = (0, 0)) -> ProbabilityMatrix:
    return aggregate_b(raw_distribution_b(), spectator).validate()


def ideal_matrix(spec: ScenarioSpec) -> ProbabilityMatrix:
    if spec.kind == "A":
        return ideal_matrix_a(spec)
    return ideal_matrix_b(spec.spectator)


# --- prepare-and-measure counterexample ----------------------------------------------

_X, _Y, _Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def _neg(v):
    return tuple(-c for c in v)


PRINTED_COUNTEREXAMPLE = tuple(
    tuple(Fraction(x) for x in row.split())
    for row in (
        "1 1/2 1/2 0 0 0 0",
        "1/2 1 1/2 0 0 0 0",
        "1/2 1/2 1 0 0 0 0",
        "1/2 0 0 1 1/2 1/2 0",
        "0 1/2 0 1/2 1 1/2 0",
        "0 0 1/2 1/2 1/2 1 0",
        "1/2 0 0 1/2 0 0 1/2",
    )
)


def counterexample_vectors() -> dict[str, list[tuple[int, int, int]]]:
    """Measurement (c, d) and state (a, b) Bloch vectors as listed.

    The listing assigns y to a_{6,8,10} and then z to a_{8,10,12}; we read
    the second group as a_12 = z (a_13 = -z), which is the only assignment
    consistent with the 14 states.
    """
    c = [_X] * 3 + [_Y] * 3 + [_Z]
    d = [_X, _Y, _Z, _X, _Y, _Z, _X]
    a = [_X, _neg(_X)] * 3 + [_Y, _neg(_Y)] * 3 + [_Z, _neg(_Z)]
    b_even = {0: _X, 2: _Y, 4: _Z, 6: _X, 8: _Y, 10: _Z, 12: _X}
    b = []
    for k in range(14):
        if k % 2 == 0:
            b.append(b_even[k])
        else:
            prev = b_even[k - 1]
            b.append(_neg(prev) if k < 6 else prev)
    return {"c": c, "d": d, "a": a, "b": b}


def _dot(u, v) -> int:
    return sum(x * y for x, y in zip(u, v))


def construct_counterexample(b_override=None) -> list[list[Fraction]]:
    """p_ij = p(i|2j) - p(i|2j+1) with p(k|i) = (1 + c_i.a_k)(1 + d_i.b_k)/4."""
    v = counterexample_vectors()
    b = v["b"] if b_override is None else list(b_override)

    def prob(i, k):
        return Fraction((1 + _dot(v["c"][i], v["a"][k])) * (1 + _dot(v["d"][i], b[k])), 4)

    return [[prob(i, 2 * j) - prob(i, 2 * j + 1) for j in range(7)] for i in range(7)]


@dataclass(frozen=True)
class CounterexampleResult:
    constructed: tuple
    printed: tuple
    det_constructed: Fraction
    det_printed: Fraction

    @property
    def matches(self) -> bool:
        return self.constructed == self.printed

    def mismatches(self) -> list[tuple[int, int, Fraction, Fraction]]:
        return [
            (i, j, self.constructed[i][j], self.printed[i][j])
            for i in range(7)
            for j in range(7)
            if self.constructed[i][j] != self.printed[i][j]
        ]


def prepare_measure_counterexample() -> CounterexampleResult:
    built = tuple(tuple(r) for r in construct_counterexample())
    return CounterexampleResult(
        constructed=built,
        printed=PRINTED_COUNTEREXAMPLE,
        det_constructed=exact_determinant(built),
        det_printed=exact_determinant(PRINTED_COUNTEREXAMPLE),
    )

