from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from z22osp.lax import AlgebraElement, G, _sigma_flow, curvature_residual, mkdv_lax_t, mkdv_lax_x, mkdv_printed_coefficients
from z22osp.miura import (
    classical_miura_check,
    d00_f11_consistency,
    gauge_check,
    gauge_generator,
    gauge_transform,
    kdv_eom,
    kdv_lax_t,
    kdv_lax_x,
    kdv_reductions,
    miura_apply,
    miura_factorization_check,
    riccati_form_check,
    verify_kdv,
)
from z22osp.ring import Expr, dx, jet, substitute_fields

U_jets = st.builds(lambda f, a: jet(f, a), st.sampled_from(["U00", "U11", "sigma10", "sigma01"]), st.integers(0, 2))


@st.composite
def u_polys(draw):
    out = Expr()
    for gens in draw(st.lists(st.lists(U_jets, min_size=1, max_size=3), max_size=3)):
        m = Expr.const(draw(st.integers(-3, 3)))
        for g in gens:
            m = m * g
        out = out + m
    return out


def test_miura_map_examples():
    u, w = jet("u00"), jet("u11")
    assert miura_apply(jet("U00")) == -jet("u00", 1) + u * u + w * w
    assert miura_apply(jet("U11")) == -jet("u11", 1) + (u * w).scale(2)
    assert substitute_fields(miura_apply(jet("U00")), {"u11": Expr()}) == -jet("u00", 1) + u * u
    assert miura_apply(jet("sigma10", 2)) == jet("sigma10", 2)


@settings(max_examples=40, deadline=None)
@given(u_polys())
def test_miura_commutes_with_dx(p):
    assert miura_apply(dx(p)) == dx(miura_apply(p))


def test_factorization_identities_hold_off_shell():
    r = miura_factorization_check()
    assert r.ok, r.residual


def test_classical_factorization():
    assert classical_miura_check().ok


def test_riccati_form():
    assert riccati_form_check().ok


def test_d00_f11_agree_through_miura():
    assert d00_f11_consistency() == {}


def test_gauge_transform_reproduces_the_kdv_pair():
    for name, r in gauge_check().items():
        assert r.ok, (name, r.residual)


def test_trivial_gauge_is_identity():
    l = mkdv_lax_t(mkdv_printed_coefficients())
    assert gauge_transform(l, 1, AlgebraElement()) == l
    n0 = gauge_generator().map(lambda c: substitute_fields(c, {"u00": Expr(), "u11": Expr()}))
    assert not n0
    assert gauge_transform(mkdv_lax_x(), 0, n0) == mkdv_lax_x()


def test_gauged_x_operator_has_the_kdv_shape():
    gx = gauge_transform(mkdv_lax_x(), 0)
    assert set(gx.terms) == {G("K+", -1), G("L+", -1), G("P+"), G("Q+"), G("K+"), G("K-", 1)}
    assert gx.terms[G("K+", -1)] == miura_apply(jet("U00"))


def test_kdv_is_flat():
    r = verify_kdv()
    assert r.ok, r.residual


def test_kdv_sigma_rules_are_the_mkdv_ones_with_U_primitive():
    eom = kdv_eom()
    t10, t01 = _sigma_flow(jet("U00"), jet("U11"))
    assert eom.rules["sigma10"].rhs == t10 and eom.rules["sigma01"].rhs == t01


def test_kdv_reductions():
    for r in kdv_reductions().values():
        assert r.ok, r.residual


def test_kdv_pair_is_not_flat_without_the_flow():
    res = curvature_residual(kdv_lax_x(), kdv_lax_t(), kdv_eom().without("U00"))
    assert res
