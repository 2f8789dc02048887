from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

from z22osp.algebra import (
    BRACKET_TABLE,
    FAMILIES,
    LoopGenerator,
    bracket,
    bracket_linear,
    bracket_table_latex,
    derivation_act,
    derivation_rule_holds,
    derivations_commute,
    grading_operator_act,
    hom_f,
    hom_f_linear,
    jacobi_check,
    jacobi_sweep,
    principal_grade,
    structure_constants,
    window,
)
from z22osp.gaussian import Gaussian
from z22osp.grading import G00, G01, G10, G11, grade_sign

I = Gaussian(0, 1)


def g(text: str) -> LoopGenerator:
    return LoopGenerator.parse(text)


def test_listed_brackets():
    assert bracket(g("K0_1"), g("K+_2")) == {g("K+_3"): 2}
    assert bracket(g("P+_0"), g("Q-_0")) == {g("L0_0"): I}
    assert bracket(g("K0_0"), g("K0_5")) == {}
    assert bracket(g("Q+_2"), g("Q-_-1")) == {g("K0_1"): 1}
    assert bracket(g("P-_1"), g("Q+_1")) == {g("L0_2"): I}
    assert bracket(g("P+_0"), g("P+_0")) == {g("K+_0"): 2}


def test_unlisted_mixed_pairs_vanish():
    for a, b in [("K+", "L+"), ("K-", "L-"), ("L0", "L0"), ("K0", "L0")]:
        assert bracket(g(f"{a}_1"), g(f"{b}_2")) == {}


def test_grades_of_generators():
    assert [LoopGenerator(f, 0).grade for f in ("K0", "L+", "P-", "Q+")] == [G00, G11, G10, G01]


def test_graded_antisymmetry_window_4():
    gens = window(4)
    for x, y in product(gens, gens):
        s = -grade_sign(x.grade, y.grade)
        assert bracket(x, y) == {k: v * s for k, v in bracket(y, x).items()}


def test_bracket_respects_both_gradings():
    gens = window(2)
    for x, y in product(gens, gens):
        for z in bracket(x, y):
            assert z.grade == x.grade + y.grade
            assert z.mode == x.mode + y.mode
            assert principal_grade(z) == principal_grade(x) + principal_grade(y)


def test_jacobi_examples():
    assert jacobi_check(g("P+_0"), g("P-_0"), g("Q+_0"))
    assert jacobi_check(g("K0_0"), g("K+_0"), g("K-_0"))
    assert jacobi_check(g("K0_1"), g("K0_-2"), g("K0_0"))


def test_jacobi_window_1_and_a_slice_of_window_2():
    assert jacobi_sweep(1) == []
    assert jacobi_sweep(2, first=[g("P+_2"), g("Q-_-2"), g("L+_1")]) == []


def test_derivation_examples():
    assert derivation_act("d00", g("P+_3")) == {g("P+_3"): 3}
    assert derivation_act("d11", g("K+_2")) == {g("L+_2"): 2}
    assert derivation_act("d11", g("Q+_1")) == {g("P+_1"): -I}
    assert derivation_act("d11", g("K0_0")) == {}


def test_derivations_on_window_2():
    gens = window(2)
    for d in ("d00", "d11"):
        assert all(derivation_rule_holds(d, x, y) for x, y in product(gens, gens))
    assert all(derivations_commute(x) for x in gens)


def test_principal_grade_examples():
    assert principal_grade(g("P+_0")) == Fraction(1, 2)
    assert principal_grade(g("K-_1")) == 1
    assert principal_grade(g("L0_0")) == 0
    assert principal_grade(g("Q-_-1")) == Fraction(-5, 2)


def test_grading_operator_has_principal_eigenvalues():
    for x in window(3):
        p = principal_grade(x)
        assert grading_operator_act(x) == ({x: Gaussian(p)} if p else {})


def test_hom_f_examples_and_homomorphism():
    assert hom_f(g("K0_1")) == g("K0_4")
    assert hom_f(g("P-_0")) == g("P-_-1")
    assert hom_f(g("K+_0")) == g("K+_2")
    gens = window(3)
    images = {hom_f(x) for x in gens}
    assert len(images) == len(gens)
    for x, y in product(gens, gens):
        assert hom_f_linear(bracket(x, y)) == bracket(hom_f(x), hom_f(y))


def test_bracket_linear_is_bilinear():
    u = {g("P+_0"): Gaussian(2), g("Q+_0"): I}
    v = {g("P-_1"): Gaussian(1)}
    # [Q+, P-] = -[P-, Q+] = -i L0, so the Q+ term contributes i * (-i) = 1
    expected = {g("K0_1"): Gaussian(2), g("L0_1"): Gaussian(1)}
    assert bracket_linear(u, v) == expected


def test_structure_constant_dump_is_json_and_complete():
    recs = structure_constants()
    json.dumps(recs)
    assert len(recs) == sum(len(v) for v in BRACKET_TABLE.values())
    assert {r["left"] for r in recs} <= set(FAMILIES)


def test_latex_table_mentions_every_pair():
    tex = bracket_table_latex()
    assert tex.startswith(r"\begin{alignat}") and tex.endswith(r"\end{alignat}")
    assert r"[ P^{+}_m, Q^{-}_n ] &= i L^{0}_{m+n}" in tex
    assert r"\{ Q^{+}_m, Q^{-}_n \} &= K^{0}_{m+n}" in tex
