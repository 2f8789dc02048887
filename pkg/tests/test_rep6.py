from __future__ import annotations

from itertools import product

from z22osp.algebra import FAMILIES, LoopGenerator, bracket, hom_f
from z22osp.gaussian import Gaussian
from z22osp.grading import G00, G10
from z22osp.ring import Expr, jet
from z22osp.rep6 import (
    LaurentMatrix,
    block_grade,
    kdv_lax_element,
    lax_matrix_kdv,
    matrix_graded_bracket,
    rep_element,
    rep_matrix,
    respects_block_grades,
    verify_rep,
)

I = Gaussian(0, 1)


def g(text: str) -> LoopGenerator:
    return LoopGenerator.parse(text)


def dense(m: LaurentMatrix, power: int = 0) -> list[list]:
    return [[m.entry(i, j).get(power, Expr()).constant_term() for j in range(6)] for i in range(6)]


def test_cartan_matrix_is_diagonal():
    d = dense(rep_matrix(g("K0_0")))
    assert [d[k][k] for k in range(6)] == [1, -1, 1, -1, 0, 0]
    assert sum(1 for i, j in product(range(6), range(6)) if d[i][j]) == 4


def test_modes_become_lambda_powers():
    m = rep_matrix(g("K+_3"))
    assert m.powers() == {3}
    assert set(m.entries) == {(0, 1), (2, 3)}
    assert m.shift(-3) == rep_matrix(g("K+_0"))


def test_l0_is_off_diagonal_sigma3():
    d = dense(rep_matrix(g("L0_0")))
    assert (d[0][2], d[1][3], d[2][0], d[3][1]) == (1, -1, 1, -1)


def test_matrix_brackets_examples():
    q_anti = matrix_graded_bracket(rep_matrix(g("Q+_0")), g("Q+_0").grade, rep_matrix(g("Q-_0")), g("Q-_0").grade)
    assert q_anti == rep_matrix(g("K0_0"))
    k_comm = matrix_graded_bracket(rep_matrix(g("K0_0")), G00, rep_matrix(g("K+_0")), G00)
    assert k_comm == rep_matrix(g("K+_0")).scale(2)
    a = rep_matrix(g("P-_1"))
    assert matrix_graded_bracket(a, G10, a, G10) == (a @ a).scale(2)


def test_matrix_brackets_match_the_table_on_window_1():
    for x, y in product([LoopGenerator(f, m) for f in FAMILIES for m in (-1, 0, 1)], repeat=2):
        lhs = matrix_graded_bracket(rep_matrix(x), x.grade, rep_matrix(y), y.grade)
        rhs = LaurentMatrix()
        for z, c in bracket(x, y).items():
            rhs = rhs + rep_matrix(z).scale(Expr.const(c))
        assert lhs == rhs, (x, y)


def test_verify_rep_report():
    rep = verify_rep(2)
    assert rep["pairs"] == 50 * 50 and rep["ok"]
    assert verify_rep(0)["ok"]


def test_block_grades():
    for f in FAMILIES:
        assert respects_block_grades(rep_matrix(LoopGenerator(f, 0)), LoopGenerator(f, 0).grade)
    assert block_grade(0, 4) == G10


def test_homogeneous_relabelling():
    # rep(hom_f(X_m)) = lambda^{4m} D rep(X_0) D^{-1},  D = diag(lambda^{1,-1,1,-1,0,0})
    w = (1, -1, 1, -1, 0, 0)
    for f, m in product(FAMILIES, (-1, 0, 2)):
        x = LoopGenerator(f, m)
        base = rep_matrix(LoopGenerator(f, 0))
        expected = LaurentMatrix({(i, j): {4 * m + w[i] - w[j]: c[0]} for (i, j), c in base.entries.items()})
        assert rep_matrix(hom_f(x)) == expected


def test_kdv_lax_matrix_entries():
    m = lax_matrix_kdv()
    assert m.entry(1, 0) == {2: Expr.const(1)}
    assert m.entry(0, 3) == {-2: jet("U11")}
    assert m.entry(4, 3) == {1: jet("sigma01").scale(I)}
    assert m.entry(0, 1) == {2: Expr.const(1), -2: jet("U00")}


def test_kdv_lax_matrix_is_the_represented_element():
    assert rep_element(kdv_lax_element()) == lax_matrix_kdv()


def test_json_round_trip():
    m = lax_matrix_kdv()
    assert LaurentMatrix.from_json(m.to_json()) == m
    assert "\\begin{pmatrix}" in m.to_latex()
