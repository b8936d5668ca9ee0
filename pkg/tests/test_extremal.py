from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schmidt_witness.extremal import (
    B_COMPLEX_43,
    B_COMPLEX_43_ROOT,
    B_REAL_43,
    TABLE_I,
    TABLE_I_EXACT,
    TABLE_II,
    ExtremalProblem,
    bipartite_matrix,
    classical_matrix,
    classical_max_a,
    classical_witness,
    complex_43_closed_form,
    complex_43_quartic,
    complex_43_root,
    complex_frame_43,
    etf_value,
    exact_classical_witness,
    frame_witness_b,
    hadamard_columns,
    known_etf,
    max_b,
    polish_weights,
    projector,
    quantum_matrix_a,
    quantum_max_a,
    quantum_witness_a,
    rank_forced_zero,
    real_frame_43,
    ququart_witness,
    verify_absolute_bound,
    verify_appendix_configs,
)


def random_unit(rng, n, d, cplx):
    v = rng.normal(size=(n, d)) + (1j * rng.normal(size=(n, d)) if cplx else 0)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 4), st.integers(2, 3), st.booleans())
def test_fast_quantum_matrix_matches_general_route(seed, n, d, cplx):
    rng = np.random.default_rng(seed)
    psi = rng.uniform(0.1, 1, d)
    psi /= np.linalg.norm(psi)
    v = random_unit(rng, n, d, cplx)
    effects = [projector(x) for x in v]
    general = bipartite_matrix(np.diag(psi), effects, [e.conj() for e in effects], "A")
    assert np.allclose(quantum_matrix_a(psi, v), general, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 4))
def test_classical_matrix_is_cauchy_binet_sum(seed, n):
    rng = np.random.default_rng(seed)
    d = n + 2
    binary = rng.integers(0, 2, (n, d))
    rho = rng.dirichlet(np.ones(d))
    m = np.vstack([np.ones(d), binary])
    total = 0.0
    import itertools

    for cols in itertools.combinations(range(d), n + 1):
        total += np.linalg.det(m[:, cols]) ** 2 * np.prod(rho[list(cols)])
    assert classical_witness(binary, rho) == pytest.approx(total, abs=1e-14)
    assert classical_matrix(binary, rho)[0, 0] == pytest.approx(1.0)


def test_exact_classical_witness_uniform_identity():
    binary = [[1, 0, 0], [0, 1, 0]]
    assert exact_classical_witness(binary, [Fraction(1, 3)] * 3) == Fraction(1, 27)


@pytest.mark.parametrize("n, d", [(2, 2), (3, 3), (4, 4), (5, 5)])
def test_classical_rank_forced_zero(n, d):
    assert rank_forced_zero(n, d, "classical")
    assert classical_max_a(n, d).value == 0.0


@pytest.mark.parametrize("n, d, field", [(3, 2, "real"), (4, 2, "complex"), (6, 3, "real")])
def test_quantum_rank_forced_zero(n, d, field):
    assert rank_forced_zero(n, d, field)
    assert quantum_max_a(n, d, field).value == 0.0


@pytest.mark.parametrize("n, d", [(2, 3), (2, 4), (3, 4), (4, 5), (4, 6), (4, 7), (4, 8)])
def test_classical_maxima_small(n, d):
    res = classical_max_a(n, d)
    target = TABLE_I_EXACT.get((n, d), TABLE_I[(n, d)])
    tol = 1e-10 if (n, d) in TABLE_I_EXACT or target in (0.0, 1.0) else 0.005
    assert res.value == pytest.approx(target, abs=tol)
    assert res.reevaluate() == pytest.approx(res.value, abs=1e-12)


@pytest.mark.parametrize("n, d", [(1, 3), (2, 5), (3, 5), (3, 8)])
def test_classical_blank_cells_saturate(n, d):
    assert classical_max_a(n, d).value == pytest.approx(1.0, abs=1e-10)


def test_classical_search_is_seed_deterministic():
    a = classical_max_a(5, 6, restarts=8, seed=3)
    b = classical_max_a(5, 6, restarts=8, seed=3)
    assert a.value == b.value
    assert np.array_equal(a.parameters["binary"], b.parameters["binary"])


def test_polish_weights_improves_or_keeps():
    m = np.array([[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1]], dtype=float)
    rho0 = np.array([0.4, 0.3, 0.2, 0.1])
    rho = polish_weights(m, rho0)
    assert rho.sum() == pytest.approx(1.0)
    assert np.linalg.det(m @ np.diag(rho) @ m.T) >= np.linalg.det(m @ np.diag(rho0) @ m.T) - 1e-15


@pytest.mark.parametrize("n, d, field", [(2, 2, "real"), (3, 2, "complex")])
def test_quantum_maxima_saturating(n, d, field):
    res = quantum_max_a(n, d, field, restarts=10)
    assert res.value == pytest.approx(1.0, abs=1e-8)
    assert res.reevaluate() == pytest.approx(res.value, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("n, field", [(3, "real"), (4, "real"), (4, "complex")])
def test_quantum_maxima_qutrit(n, field):
    res = quantum_max_a(n, 3, field, restarts=20)
    assert res.value == pytest.approx(TABLE_II[(n, 3, field)], abs=0.01)


def test_problem_validation():
    with pytest.raises(ValueError):
        ExtremalProblem(0, 2, "classical")
    with pytest.raises(ValueError):
        ExtremalProblem(2, 2, "bogus")
    assert ExtremalProblem(3, 2, "real").scale == 64.0


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_etf_values(n):
    v = known_etf(n, n, "real")
    assert v is not None
    assert frame_witness_b(v) == pytest.approx(etf_value(n, n), rel=1e-10)


def test_sic_and_icosahedral_frames():
    assert frame_witness_b(known_etf(3, 2, "complex")) == pytest.approx(etf_value(3, 2), rel=1e-10)
    assert frame_witness_b(known_etf(5, 3, "real")) == pytest.approx(etf_value(5, 3), rel=1e-10)


def test_case_b_real_43_exact():
    assert frame_witness_b(real_frame_43()) == pytest.approx(B_REAL_43, abs=1e-15)


def test_case_b_complex_43_root_and_value():
    x = complex_43_root()
    assert abs(complex_43_quartic(x)) < 1e-12
    assert x == pytest.approx(B_COMPLEX_43_ROOT, abs=1e-12)
    assert complex_43_closed_form(x) == pytest.approx(B_COMPLEX_43, abs=1e-11)
    assert frame_witness_b(complex_frame_43(x)) == pytest.approx(B_COMPLEX_43, abs=1e-11)


@pytest.mark.parametrize("n, d", [(2, 3), (3, 4), (4, 6), (5, 8)])
def test_case_b_large_d_uniform(n, d):
    res = max_b(n, d, "classical")
    assert res.value == pytest.approx(float(n + 1) ** (-n - 1), rel=1e-13)


def test_case_b_numeric_real_43():
    res = max_b(4, 3, "real", restarts=10)
    assert res.value == pytest.approx(B_REAL_43, abs=1e-9)


def test_appendix_configurations():
    for c in verify_appendix_configs(n7_restarts=20):
        assert c.ok, (c.name, c.value, c.published)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
def test_hadamard_construction_saturates_bound(n):
    binary, rho = hadamard_columns(n)
    assert classical_witness(binary, rho) * 4**n == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n, field", [(3, "real"), (9, "real"), (15, "complex")])
def test_ququart_saturates_bound(n, field):
    assert ququart_witness(n, field) * 4**n == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kind", ["A", "B"])
def test_random_configurations_respect_bound(kind):
    chk = verify_absolute_bound(3, kind, samples=400, seed=1)
    assert chk.ok
    assert chk.max_random < 1.0 + 1e-10


def test_table_sizes():
    assert len(TABLE_II) == 32
    assert sum(1 for v in TABLE_I.values() if 0 < v < 1) == 6
    assert math.isclose(TABLE_I_EXACT[(5, 7)], 4**5 / 12**3)
