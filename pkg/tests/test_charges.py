from __future__ import annotations

from fractions import Fraction

import pytest

from oracles import brute_force_antiderivative
from z22osp.charges import (
    ConservedDensity,
    ResidualNonlocal,
    charge_report,
    column_residuals,
    extract_densities,
    gamma_solve,
    graded_charge_checks,
    kdv_charge_4,
    kdv_charge_8,
    map_charges_via_miura,
    mkdv_charge_4,
    mkdv_charge_8,
    printed_relations,
    proportionality,
    remove_antiderivatives,
    required_entries,
    verify_conservation,
)
from z22osp.gaussian import Gaussian
from z22osp.lax import Sigma00, Sigma11, mkdv_printed_eom
from z22osp.miura import kdv_eom
from z22osp.rep6 import kdv_lax_element, rep_element
from z22osp.ring import Expr, derive, dx, jet

I = Gaussian(0, 1)


@pytest.fixture(scope="module", params=[1, -1], ids=["eps+", "eps-"])
def col(request):
    return gamma_solve(8, request.param)


def _times(a: dict, b: dict) -> dict:
    out: dict = {}
    for p, x in a.items():
        for q, y in b.items():
            out[p + q] = out.get(p + q, Expr()) + x * y
    return out


def _has_open_unknowns(e: Expr) -> bool:
    return any(g.kind == "jet" and g.field.startswith("G") for g in e.generators())


def test_column_solves_the_matrix_riccati_equation(col):
    # recomputed from the represented Lax element, with (L Gamma)_22 taken from the product itself
    lax = rep_element(kdv_lax_element())
    parity = {1: 0, 2: 0, 3: 0, 4: 0, 5: 1, 6: 1}
    gam = [{-k: col.get(r, k) for k in range(parity[r], col.max_order + 1, 2)} for r in range(1, 7)]
    lg = []
    for i in range(6):
        acc: dict = {}
        for k in range(6):
            for p, c in _times(lax.entry(i, k), gam[k]).items():
                acc[p] = acc.get(p, Expr()) + c
        lg.append(acc)
    lowest = 2 - col.max_order
    assert {p: col.reduce(c) for p, c in lg[1].items() if p >= lowest and col.reduce(c)} == {
        p + 2: col.reduce(c) for p, c in gam[0].items() if p + 2 >= lowest and col.reduce(c)
    }
    checked = set()
    for i in range(6):
        res = {p: dx(c) for p, c in gam[i].items()}
        for p, c in lg[i].items():
            res[p] = res.get(p, Expr()) - c
        for p, c in _times(gam[i], lg[1]).items():
            res[p] = res.get(p, Expr()) + c
        for p, c in res.items():
            if p < lowest:
                continue
            r = col.reduce(c)
            if _has_open_unknowns(r):
                continue
            assert not r, (i + 1, p, r)
            checked.add((i + 1, p))
    # the top rows are fully determined at every power down to the cutoff
    assert {(1, p) for p in range(lowest, 3, 2)} <= checked
    assert {(r, p) for r in (5, 6) for p in range(lowest + 1, 2, 2)} <= checked


def test_required_entries_are_determined(col):
    for row, k in required_entries(8):
        assert not _has_open_unknowns(col.get(row, k)), (row, k)
    assert column_residuals(col) == {}
    assert [g.field for g in col.antiderivatives] == ["W32_2", "W32_6"]


def test_low_order_entries(col):
    eps = col.epsilon
    assert col.get(1, 0) == Expr.const(eps)
    assert col.get(5, 1) == jet("sigma10").scale(-eps)
    assert col.get(6, 1) == jet("sigma01").scale(-eps)
    assert col.get(1, 4).scale(2 * eps) == jet("U00") - Sigma00()
    assert col.get(4, 4) == (Sigma11().scale(I) - dx(col.get(3, 2))).scale(Fraction(1, 2))
    assert dx(col.get(3, 2)).scale(2) == jet("U11") - Sigma11().scale(I)


def test_displayed_relations_hold_except_one(col):
    bad = {k: v for k, v in printed_relations(col).items() if v}
    assert len(printed_relations(col)) == 21
    # the displayed right side carries +i Sigma11'; the solution needs -i Sigma11'
    assert bad == {"d_x(Gamma42^(4) - eps Gamma32^(4))": dx(Sigma11()).scale(-2 * I)}


def test_densities(col):
    dens = {d.order: d.density for d in extract_densities(col)}
    eps = col.epsilon
    assert dens[0] == Expr.const(eps) and not dens[2] and not dens[6]
    assert proportionality(dens[4], kdv_charge_4()) == Gaussian(Fraction(eps, 2))
    assert proportionality(dens[8], kdv_charge_8()) == Gaussian(Fraction(-eps, 8))


def test_densities_flip_with_epsilon():
    a = {d.order: d.density for d in extract_densities(gamma_solve(8, 1))}
    b = {d.order: d.density for d in extract_densities(gamma_solve(8, -1))}
    for k in (4, 8):
        assert proportionality(a[k], b[k]) == Gaussian(-1)


@pytest.mark.parametrize("density", [kdv_charge_4(), kdv_charge_8()], ids=["Q4", "Q8"])
def test_kdv_charges_are_conserved(density):
    flux = kdv_eom().normalize(derive(density, 1))
    assert verify_conservation(density, kdv_eom())
    # independent ansatz: find F with d_x F equal to the time derivative
    f = brute_force_antiderivative(flux)
    assert f is not None and dx(f) == flux


def test_non_charge_is_not_conserved():
    u = jet("U00")
    assert not verify_conservation(u * u, kdv_eom())
    assert brute_force_antiderivative(kdv_eom().normalize(derive(u * u, 1))) is None


@pytest.mark.parametrize("order, kdv, mkdv", [(4, kdv_charge_4(), mkdv_charge_4()), (8, kdv_charge_8(), mkdv_charge_8())])
def test_miura_images(order, kdv, mkdv):
    img = map_charges_via_miura(ConservedDensity(order, kdv))
    assert proportionality(img.density, mkdv) == Gaussian(1)
    assert verify_conservation(img, mkdv_printed_eom())


def test_charge_report(col):
    for name, r in charge_report(col).items():
        assert r.ok, (name, r.residual)


def test_graded_charges():
    for name, r in graded_charge_checks().items():
        assert r.ok, name


def test_antiderivative_removal(col):
    w = col.get(3, 2)
    # W' W is exact: d_x(W^2 / 2) with W odd-odd graded, so it reduces to zero
    assert remove_antiderivatives(col.reduce(dx(w) * w + jet("U00"))) == jet("U00")
    with pytest.raises(ResidualNonlocal):
        remove_antiderivatives(w * jet("U00"))


def test_argument_guards():
    with pytest.raises(ValueError):
        gamma_solve(14)
    with pytest.raises(ValueError):
        gamma_solve(4, 0)
