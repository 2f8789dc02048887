"""Miura map from graded mKdV to graded KdV, gauge equivalence of the Lax pairs."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from z22osp.lax import (
    AlgebraElement,
    G,
    I,
    Report,
    Sigma00,
    Sigma11,
    U00_of_u,
    U11_of_u,
    _sigma_flow,
    algebra_bracket,
    curvature_residual,
    mkdv_lax_t,
    mkdv_lax_x,
    mkdv_printed_coefficients,
    mkdv_printed_eom,
    reduce_rule,
)
from z22osp.algebra import principal_grade
from z22osp.ring import EomSystem, Expr, Rule, derive, jet, substitute_fields

GRADE_FLOOR = -4


def miura_map() -> dict[str, Expr]:
    return {"U00": U00_of_u(), "U11": U11_of_u()}


def miura_apply(p: Expr) -> Expr:
    """Rewrite U-jets (x and t derivatives alike) in terms of u-jets."""
    return substitute_fields(p, miura_map())


# ---------------------------------------------------------------- KdV data in U variables


def A00() -> Expr:
    U0, U1 = jet("U00"), jet("U11")
    S0, S1 = Sigma00(), Sigma11()
    return (
        jet("U00", 2)
        - (U0 * U0 + U1 * U1 + derive(S0, 0, 2)).scale(3)
        + (U0 * S0 + (U1 * S1).scale(I)).scale(6)
    )


def B11() -> Expr:
    U0, U1 = jet("U00"), jet("U11")
    S0, S1 = Sigma00(), Sigma11()
    return (
        jet("U11", 2)
        - ((U0 * U1).scale(2) + derive(S1, 0, 2).scale(I)).scale(3)
        + (U1 * S0 + (U0 * S1).scale(I)).scale(6)
    )


def kdv_flow() -> tuple[Expr, Expr]:
    """Right sides of the U00 and U11 equations."""
    U0, U1 = jet("U00"), jet("U11")
    dS0, dS1 = derive(Sigma00(), 0), derive(Sigma11(), 0)
    t00 = derive(A00(), 0) + (U0 * dS0 + (U1 * dS1).scale(I)).scale(6)
    t11 = derive(B11(), 0) + (U1 * dS0 + (U0 * dS1).scale(I)).scale(6)
    return t00, t11


def kdv_eom() -> EomSystem:
    t00, t11 = kdv_flow()
    t10, t01 = _sigma_flow(jet("U00"), jet("U11"))
    return EomSystem(
        [
            Rule("U00", (0, 1), t00),
            Rule("U11", (0, 1), t11),
            Rule("sigma10", (0, 1), t10),
            Rule("sigma01", (0, 1), t01),
        ]
    )


def kdv_d00() -> Expr:
    return (-jet("U00") + Sigma00().scale(3)).scale(2)


def kdv_f11() -> Expr:
    return (-jet("U11") + Sigma11().scale(3 * I)).scale(2)


def kdv_lax_x() -> AlgebraElement:
    return AlgebraElement.of(
        (jet("U00"), G("K+", -1)),
        (jet("U11"), G("L+", -1)),
        (jet("sigma10"), G("P+")),
        (jet("sigma01"), G("Q+")),
        (1, G("K+")),
        (1, G("K-", 1)),
    )


def kdv_lax_t() -> AlgebraElement:
    U0, U1 = jet("U00"), jet("U11")
    s10, s01 = jet("sigma10"), jet("sigma01")
    d, f = kdv_d00(), kdv_f11()
    half = Fraction(1, 2)
    return AlgebraElement.of(
        (A00() + U0 * U0 + U1 * U1, G("K+", -1)),
        (B11() + (U0 * U1).scale(2), G("L+", -1)),
        (derive(d, 0).scale(half), G("K0")),
        (derive(f, 0).scale(half), G("L0")),
        (jet("sigma10", 2).scale(4) + d * s10 + (f * s01).scale(I), G("P+")),
        (jet("sigma01", 2).scale(4) + d * s01 - (f * s10).scale(I), G("Q+")),
        ((U0 + Sigma00()).scale(2), G("K+")),
        ((U1 + Sigma11().scale(I)).scale(2), G("L+")),
        (d, G("K-", 1)),
        (f, G("L-", 1)),
        (jet("sigma10", 1).scale(-4), G("P-", 1)),
        (jet("sigma01", 1).scale(-4), G("Q-", 1)),
        (s10.scale(4), G("P+", 1)),
        (s01.scale(4), G("Q+", 1)),
        (4, G("K+", 1)),
        (4, G("K-", 2)),
    )


def verify_kdv() -> Report:
    res = curvature_residual(kdv_lax_x(), kdv_lax_t(), kdv_eom())
    return Report("zero curvature KdV", not res, res)


# ---------------------------------------------------------------- identities


def miura_factorization_check() -> Report:
    """The two operator identities relating the mKdV and KdV flows, off-shell."""
    u0, u1 = jet("u00"), jet("u11")
    c = mkdv_printed_coefficients()
    e00 = -jet("u00", 0, 1) + derive(c["a00"], 0)
    e11 = -jet("u11", 0, 1) + derive(c["b11"], 0)
    t00, t11 = kdv_flow()
    rhs00 = miura_apply(-jet("U00", 0, 1) + t00)
    rhs11 = miura_apply(-jet("U11", 0, 1) + t11)
    lhs00 = -derive(e00, 0) + (u0 * e00).scale(2) + (u1 * e11).scale(2)
    lhs11 = -derive(e11, 0) + (u0 * e11).scale(2) + (u1 * e00).scale(2)
    d00, d11 = lhs00 - rhs00, lhs11 - rhs11
    mk = mkdv_printed_eom()
    on_shell = (mk.normalize(rhs00), mk.normalize(rhs11))
    ok = not d00 and not d11 and not any(on_shell)
    return Report(
        "Miura factorization",
        ok,
        {"identity00": d00, "identity11": d11, "kdv00_on_mkdv_shell": on_shell[0], "kdv11_on_mkdv_shell": on_shell[1]},
    )


def classical_miura_check() -> Report:
    """(-d_x + 2u)(-u_t + (u'' - 2u^3)') = -(U_t - (U'' - 3U^2)'),  U = -u' + u^2."""
    u = jet("u00")
    mk = -jet("u00", 0, 1) + derive(jet("u00", 2) - (u * u * u).scale(2), 0)
    lhs = -derive(mk, 0) + (u * mk).scale(2)
    U = -jet("u00", 1) + u * u
    rhs = -(derive(U, 1) - derive(derive(U, 0, 2) - (U * U).scale(3), 0))
    return Report("classical Miura factorization", lhs == rhs, lhs - rhs)


def riccati_form_check() -> Report:
    """U = Y' + Y^2 with U = [[U00, U11], [U11, U00]] and Y = -[[u00, u11], [u11, u00]]."""
    u0, u1 = jet("u00"), jet("u11")
    Y = [[-u0, -u1], [-u1, -u0]]
    U = [[U00_of_u(), U11_of_u()], [U11_of_u(), U00_of_u()]]
    diffs = {}
    for r in range(2):
        for c in range(2):
            y2 = Y[r][0] * Y[0][c] + Y[r][1] * Y[1][c]
            d = derive(Y[r][c], 0) + y2 - U[r][c]
            if d:
                diffs[(r, c)] = d
    return Report("matrix Riccati form", not diffs, diffs)


def d00_f11_consistency() -> dict[str, Expr]:
    """KdV-side d00, f11 pulled back by Miura minus the mKdV-side ones (empty when equal)."""
    c = mkdv_printed_coefficients()
    out = {}
    for name, val in (("d00", kdv_d00()), ("f11", kdv_f11())):
        d = miura_apply(val) - c[name]
        if d:
            out[name] = d
    return out


# ---------------------------------------------------------------- gauge transformation


def gauge_generator() -> AlgebraElement:
    return AlgebraElement.of((jet("u00"), G("K+", -1)), (jet("u11"), G("L+", -1)))


def adjoint_series(n: AlgebraElement, l: AlgebraElement) -> AlgebraElement:
    """exp(-ad_n)(l), for n of principal grade -1 so each step lowers the grade by one."""
    out = l
    term = l
    k = 0
    while term:
        k += 1
        term = algebra_bracket(n, term)
        if term and min(principal_grade(g) for g in term.terms) < GRADE_FLOOR:
            raise RuntimeError("adjoint series passed the grade floor")
        if term:
            out = out + term.map(lambda c, k=k: c.scale(Fraction((-1) ** k, factorial(k))))
    return out


def gauge_transform(l: AlgebraElement, direction: int, n: AlgebraElement | None = None) -> AlgebraElement:
    """g^{-1} L g - g^{-1} d g with g = exp(n); the two terms of n commute so g^{-1} d g = d n."""
    n = n if n is not None else gauge_generator()
    return adjoint_series(n, l) - n.derive(direction)


def gauge_check() -> dict[str, Report]:
    """Gauge the mKdV pair and compare with the Miura image of the KdV pair."""
    mk = mkdv_printed_eom()
    c = mkdv_printed_coefficients()
    gx = gauge_transform(mkdv_lax_x(), 0).normalize(mk)
    gt = gauge_transform(mkdv_lax_t(c), 1).normalize(mk)
    want_x = kdv_lax_x().map(miura_apply)
    want_t = kdv_lax_t().map(miura_apply)
    dx_ = (gx - want_x).normalize(mk)
    dt_ = (gt - want_t).normalize(mk)
    flat = curvature_residual(gx, gt, mk)
    return {
        "x": Report("gauge transform of L_x", not dx_, dx_),
        "t": Report("gauge transform of L_t", not dt_, dt_),
        "flat": Report("gauged pair is flat", not flat, flat),
    }


def kdv_reductions() -> dict[str, Report]:
    eom = kdv_eom()
    U, U1, U3 = jet("U00"), jet("U00", 1), jet("U00", 3)
    classical = U3 - (U * U1).scale(6)
    got = reduce_rule(eom, "U00", ("U11", "sigma10", "sigma01"))
    out = {"classical": Report("KdV classical reduction", got == classical, got - classical)}
    ss = jet("sigma10", 1) * jet("sigma10")
    super_U = classical + (U1 * ss).scale(6) + (U * derive(ss, 0)).scale(12) - derive(ss, 0, 3).scale(3)
    super_s = jet("sigma10", 3).scale(4) - (U * jet("sigma10", 1)).scale(6) - (U1 * jet("sigma10")).scale(3)
    gU = reduce_rule(eom, "U00", ("U11", "sigma01"))
    gs = reduce_rule(eom, "sigma10", ("U11", "sigma01"))
    out["super"] = Report("KdV super reduction", gU == super_U and gs == super_s, {"U00": gU - super_U, "sigma10": gs - super_s})
    return out
