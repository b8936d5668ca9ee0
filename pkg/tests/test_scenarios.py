from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schmidt_witness.linalg import exact_determinant
from schmidt_witness.qsim import PAULIS, StateVector, bloch_projector
from schmidt_witness.scenarios import (
    PRINTED_COUNTEREXAMPLE,
    OutcomeLabeling,
    ScenarioSpec,
    aggregate_b,
    basis_rotation_ops,
    build_circuit_b,
    construct_counterexample,
    ideal_matrix,
    ideal_matrix_a,
    ideal_matrix_b,
    ideal_settings_a,
    matrix_from_settings,
    measurement_vectors,
    outcome_label,
    prepare_measure_counterexample,
    raw_distribution_b,
    rotation_angles,
    singlet_matrix_a,
)
from schmidt_witness.qsim import Circuit
from schmidt_witness.witness import witness

SPECTATORS = [(0, 0), (0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize("mset", ["SetI", "SetII"])
def test_kind_a_matches_singlet_formula(mset):
    # circuit simulation against p_ij = (1 + a_i.a_j)/4 from the singlet directly
    spec = ScenarioSpec.a(mset)
    a = measurement_vectors(mset)
    expected = np.ones((5, 5))
    expected[1:, 1:] = (1 + a @ a.T) / 4
    expected[0, 1:] = expected[1:, 0] = 0.5
    assert np.allclose(ideal_matrix_a(spec).entries, expected, atol=1e-14)
    assert np.allclose(singlet_matrix_a(a).entries, expected, atol=1e-14)


@pytest.mark.parametrize("mset", ["SetI", "SetII"])
def test_middle_qubit_count_irrelevant(mset):
    two = ideal_settings_a(ScenarioSpec.a(mset, 2))
    three = ideal_settings_a(ScenarioSpec.a(mset, 3))
    assert np.allclose(two, three, atol=1e-14)


@pytest.mark.parametrize("mset", ["SetI", "SetII"])
def test_kind_a_null(mset):
    p = ideal_matrix_a(ScenarioSpec.a(mset))
    assert abs(witness(p)) < 1e-12
    assert not p.violations()


def test_setting_distributions_normalised():
    s = ideal_settings_a(ScenarioSpec.a("SetII"))
    assert s.shape == (4, 4, 4)
    assert np.allclose(s.sum(axis=-1), 1)
    # each party is unbiased in every setting
    assert np.allclose(s[..., 0] + s[..., 1], 0.5)
    assert np.allclose(s[..., 0] + s[..., 2], 0.5)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, np.pi - 0.01), st.floats(-np.pi, np.pi))
def test_rotation_maps_direction_to_zero(theta, phi):
    a = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    _, vecs = np.linalg.eigh(bloch_projector(a).matrix)
    out = Circuit(1).extend(basis_rotation_ops(a, 0)).run(StateVector(vecs[:, 1]))
    assert out.probabilities()[0] == pytest.approx(1.0, abs=1e-12)


def test_rotation_angles_for_z():
    t1, t2 = rotation_angles([0, 0, 1])
    assert t1 == pytest.approx(np.pi)
    assert t2 == pytest.approx(0.0)


def test_raw_distribution_zero_pattern():
    raw = raw_distribution_b()
    assert raw.shape == (2,) * 6
    assert raw.sum() == pytest.approx(1.0, abs=1e-14)
    zeros = 0
    for a0, a1, a2, b0, b1, b2 in np.ndindex(raw.shape):
        v = raw[a0, a1, a2, b0, b1, b2]
        if a1 == b1 and (a0 + a2 - b0 - b2) % 2 == 0:
            zeros += 1
            assert abs(v) < 1e-12
        else:
            assert v == pytest.approx(1 / 48, abs=1e-12)
    assert zeros == 16


def test_raw_distribution_has_seven_qubits():
    assert build_circuit_b().qubit_count == 7


@pytest.mark.parametrize("spectator", SPECTATORS)
def test_kind_b_null_every_spectator(spectator):
    p = ideal_matrix_b(spectator)
    assert not p.violations()
    assert abs(witness(p)) < 1e-12


@pytest.mark.parametrize("spectator", SPECTATORS)
def test_kind_b_matches_tetrahedron_povm(spectator):
    # independent route: singlet with tetrahedron effects (1 + m.sigma)/8 and lump 1/2
    from schmidt_witness.qsim import tetrahedron_vectors

    m = tetrahedron_vectors()
    core = (1 - m @ m.T) / 64
    expected = np.zeros((5, 5))
    expected[:4, :4] = core
    expected[4, :4] = expected[:4, 4] = 1 / 16
    expected[4, 4] = 1 / 4
    assert np.allclose(np.sort(ideal_matrix_b(spectator).entries.ravel()), np.sort(expected.ravel()), atol=1e-12)


def test_outcome_labeling_is_a_partition():
    for s in (0, 1):
        labels = [outcome_label(b, s) for b in np.ndindex(2, 2, 2)]
        assert sorted(labels) == [0, 1, 2, 3, 4, 4, 4, 4]
    m = OutcomeLabeling((1, 0)).matrix()
    assert m.shape == (25, 64)
    assert np.all(m.sum(axis=0) == 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(SPECTATORS))
def test_aggregate_preserves_mass(seed, spectator):
    raw = np.random.default_rng(seed).dirichlet(np.ones(64))
    p = aggregate_b(raw, spectator)
    assert p.entries.sum() == pytest.approx(1.0, abs=1e-12)
    assert not p.violations()


def test_matrix_from_settings_product_data_vanishes():
    # local deterministic model: product distributions per setting
    rng = np.random.default_rng(0)
    pa, pb = rng.uniform(size=4), rng.uniform(size=4)
    s = np.empty((4, 4, 4))
    for i in range(4):
        for j in range(4):
            s[i, j] = [pa[i] * pb[j], pa[i] * (1 - pb[j]), (1 - pa[i]) * pb[j], (1 - pa[i]) * (1 - pb[j])]
    assert abs(witness(matrix_from_settings(s))) < 1e-15


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("A", "Tetrahedron")
    with pytest.raises(ValueError):
        ScenarioSpec("B", "Tetrahedron", 2)
    with pytest.raises(ValueError):
        ScenarioSpec.a("SetI", 4)
    with pytest.raises(ValueError):
        ScenarioSpec.from_name("c")
    assert ScenarioSpec.from_name("a-set2").measurement_set == "SetII"
    assert ideal_matrix(ScenarioSpec.b((1, 1))).kind == "B"


def test_printed_counterexample_determinant():
    assert exact_determinant(PRINTED_COUNTEREXAMPLE) == Fraction(1, 8)


def test_counterexample_reconstruction_differs_in_two_cells():
    res = prepare_measure_counterexample()
    assert res.det_printed == Fraction(1, 8)
    assert res.det_constructed == Fraction(1, 4)
    cells = {(i, j) for i, j, _, _ in res.mismatches()}
    assert cells == {(6, 3), (6, 6)}


def test_counterexample_entries_are_probability_differences():
    built = construct_counterexample()
    assert all(-1 <= v <= 1 for row in built for v in row)
    assert all(v.denominator in (1, 2) for row in built for v in row)


def test_pauli_constants():
    x, y, z = PAULIS
    assert np.allclose(x @ y, 1j * z)
