import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamard_lab.catalogue import dita_d6, m6_discrete, tao_s6
from hadamard_lab.classify import (
    CLASS_TOL,
    FREE,
    REAL_DIAGONAL_PATTERNS,
    Solution,
    SymmetricAnsatz,
    ansatz_from_pattern,
    classify_solutions,
    jacobian,
    levenberg_marquardt,
    parse_pattern,
    residual,
    solve,
    solve_pattern,
)
from hadamard_lab.core import conjugate
from hadamard_lab.equivalence import are_equivalent

M6_TIE = (1, 1, -1, -1)


def m6_ansatz():
    return ansatz_from_pattern((1, -1, 1, 1, FREE, FREE), tied_row2=M6_TIE)


def residual_loops(H):
    n = H.shape[0]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            g = sum(H[i, k] * np.conj(H[j, k]) for k in range(n))
            out += [g.real, g.imag]
    return np.array(out)


def test_parse_pattern():
    assert len(parse_pattern("1,-1,-1,-1,*,*")) == 4
    assert parse_pattern("1,1,f") == [(1.0, 1.0, FREE)]
    assert len(parse_pattern("1, *, *, *")) == 8
    for bad in ("1,2,1", "1,x"):
        with pytest.raises(ValueError):
            parse_pattern(bad)


def test_parameter_counts():
    assert ansatz_from_pattern((1, 1, 1, 1, 1, 1)).n_params == 10
    assert ansatz_from_pattern((1, -1, FREE, FREE, FREE, FREE)).n_params == 14
    assert m6_ansatz().n_params == 1 + 2 + 6
    with pytest.raises(ValueError):
        ansatz_from_pattern((-1, 1, 1))
    with pytest.raises(ValueError):
        SymmetricAnsatz(diag=(1, 1, 1), fixed=(((1, 2), 1), ((2, 1), 1)))


def test_realize_is_symmetric_dephased(rng):
    A = m6_ansatz()
    H = A.realize(rng.uniform(0, 7, A.n_params)).entries
    assert np.allclose(H, H.T)
    assert np.allclose(H[0], 1) and np.allclose(H[:, 0], 1)
    assert np.allclose(np.diag(H)[:4], [1, -1, 1, 1])
    assert np.allclose(H[1, 2:], H[1, 2] * np.array(M6_TIE))


@given(st.integers(min_value=0, max_value=2**31))
def test_residual_matches_loop_oracle(seed):
    r = np.random.default_rng(seed)
    A = ansatz_from_pattern((1, -1, FREE, 1, FREE, -1))
    th = r.uniform(0, 2 * np.pi, A.n_params)
    assert residual(A, th).shape == (30,)
    assert np.allclose(residual(A, th), residual_loops(A.realize(th).entries), atol=1e-12)


def test_residual_examples():
    A = ansatz_from_pattern((1, 1, 1, 1, 1, 1))
    # all-ones matrix: every inner product is 6
    r = residual(A, np.zeros(A.n_params))
    assert np.allclose(r[0::2], 6) and np.allclose(r[1::2], 0)
    assert np.max(np.abs(residual(A, A.phases_of(tao_s6())))) < 1e-12
    assert np.max(np.abs(residual(m6_ansatz(), m6_ansatz().phases_of(m6_discrete())))) < 1e-12


def test_phases_of_rejects_misfit():
    with pytest.raises(ValueError):
        ansatz_from_pattern((1, 1, 1, 1, 1, 1)).phases_of(m6_discrete())


def test_jacobian_against_finite_differences(rng):
    step = 1e-6
    for A in (m6_ansatz(), ansatz_from_pattern((1, -1, -1, 1, FREE, FREE))):
        for _ in range(10):
            th = rng.uniform(0, 2 * np.pi, A.n_params)
            J = jacobian(A, th)
            fd = np.empty_like(J)
            for k in range(A.n_params):
                e = np.zeros(A.n_params)
                e[k] = step
                fd[:, k] = (residual(A, th + e) - residual(A, th - e)) / (2 * step)
            assert np.max(np.abs(J - fd)) <= 1e-5 * max(1.0, np.max(np.abs(J)))


def test_lm_recovers_m6_from_nearby_start(rng):
    A = m6_ansatz()
    th0 = A.phases_of(m6_discrete()) + 1e-3 * rng.standard_normal((5, A.n_params))
    th, res = levenberg_marquardt(A, th0)
    assert np.all(res <= 1e-9)
    for t in th:
        assert are_equivalent(A.realize(t), m6_discrete(), CLASS_TOL) is not None


def test_small_run_tao_pattern():
    rep = solve(ansatz_from_pattern((1, 1, 1, 1, 1, 1)), n_seeds=200, rng_seed=3)
    assert rep.converged_count > 0
    assert rep.matched_names == {"S6"}
    assert sum(c.size for c in rep.classes) == rep.converged_count
    assert all(s.residual <= 1e-9 for s in rep.solutions)


def test_tied_row_run_finds_m6():
    rep = solve_pattern("1,-1,1,1,f,f", n_seeds=300, rng_seed=5, tied_row2=M6_TIE)
    assert rep.converged_count > 0
    assert rep.matched_names <= {"M6", "M6*"}


def test_determinism_and_threads(monkeypatch):
    monkeypatch.setenv("HADAMARD_LAB_THREADS", "1")
    a = solve_pattern("1,-1,-1,-1,*,*", n_seeds=300, rng_seed=11).dumps()
    b = solve_pattern("1,-1,-1,-1,*,*", n_seeds=300, rng_seed=11).dumps()
    monkeypatch.setenv("HADAMARD_LAB_THREADS", "3")
    c = solve_pattern("1,-1,-1,-1,*,*", n_seeds=300, rng_seed=11).dumps()
    assert a == b == c


def test_report_json_shape():
    rep = solve_pattern("1,-1,-1,-1,*,*", n_seeds=300, rng_seed=2)
    js = json.loads(rep.dumps())
    assert set(js) == {"pattern", "seeds_run", "converged", "best_residual", "classes"}
    assert js["seeds_run"] == 1200
    assert all(set(c) == {"label", "representative_matrix", "matched_catalogue_name", "size"} for c in js["classes"])
    assert rep.matched_names <= {"D6"}
    assert "converged" in rep.summary()


def test_empty_report_summary():
    rep = solve_pattern("1,-1,-1,1,*,*", n_seeds=50, rng_seed=0)
    assert rep.converged_count == 0 and rep.best_residual > 1e-3
    assert "no solution" in rep.summary()


def test_classify_groups_equivalent_solutions():
    sols = [Solution(H, 0.0, np.zeros(1)) for H in (m6_discrete(), conjugate(m6_discrete()), tao_s6(), dita_d6())]
    classes = classify_solutions(sols)
    assert [s.class_label for s in sols] == [0, 0, 1, 2]
    assert [c.matched for c in classes] == ["M6", "S6", "D6"]


def test_real_patterns_constant():
    assert len(REAL_DIAGONAL_PATTERNS) == 4
    with pytest.raises(ValueError):
        solve(ansatz_from_pattern((1, 1)), n_seeds=0)
