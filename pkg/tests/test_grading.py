from __future__ import annotations

from itertools import product

import pytest

from z22osp.grading import ALL_GRADES, G00, G01, G10, G11, Grade, grade_add, grade_of_suffix, grade_sign


def test_grade_addition_examples():
    assert grade_add(G10, G01) == G11
    assert grade_add(G11, G11) == G00
    for g in ALL_GRADES:
        assert grade_add(G00, g) == g
        assert g + g == G00


def test_grade_sign_examples():
    assert grade_sign(G10, G10) == -1
    assert grade_sign(G10, G01) == 1
    assert grade_sign(G11, G10) == -1
    assert grade_sign(G11, G11) == 1


def test_exactly_four_grades():
    assert len(set(ALL_GRADES)) == 4
    assert {str(g) for g in ALL_GRADES} == {"[00]", "[10]", "[01]", "[11]"}


def test_addition_is_an_abelian_group():
    for a, b, c in product(ALL_GRADES, repeat=3):
        assert grade_add(a, b) == grade_add(b, a)
        assert grade_add(grade_add(a, b), c) == grade_add(a, grade_add(b, c))


def test_sign_is_symmetric_bicharacter():
    for a, b in product(ALL_GRADES, repeat=2):
        assert grade_sign(a, b) == grade_sign(b, a)
    for a, b, c in product(ALL_GRADES, repeat=3):
        assert grade_sign(a + b, c) == grade_sign(a, c) * grade_sign(b, c)


def test_parity_is_a_homomorphism():
    assert [g.parity for g in (G00, G11, G10, G01)] == [0, 0, 1, 1]
    for a, b in product(ALL_GRADES, repeat=2):
        assert (a + b).parity == (a.parity + b.parity) % 2


def test_parse_and_suffix():
    assert Grade.parse("[10]") == G10
    assert grade_of_suffix("sigma01") == G01
    with pytest.raises(ValueError):
        Grade.parse("[2]")
    with pytest.raises(ValueError):
        grade_of_suffix("phi")
