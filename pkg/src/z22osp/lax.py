"""Algebra-valued Lax operators and the zero-curvature hierarchy.

Covers the negative flows (Liouville, sinh-Gordon, cosh-Gordon) in light-cone
coordinates and the positive flow that yields the graded mKdV system.  Ring
direction 0 is d_+ (or d_x), direction 1 is d_- (or d_t).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from z22osp.algebra import FAMILIES, LoopGenerator, bracket, principal_grade
from z22osp.gaussian import Gaussian
from z22osp.grading import G00, grade_sign
from z22osp.linsolve import LinearSolver
from z22osp.ring import (
    EomSystem,
    Expr,
    Rule,
    chiral,
    cosh_,
    derive,
    exp_,
    jet,
    sinh_,
    substitute_fields,
)

I = Gaussian(0, 1)
_FAMILY_INDEX = {f: k for k, f in enumerate(FAMILIES)}


def _gen_key(g: LoopGenerator) -> tuple:
    return (principal_grade(g), _FAMILY_INDEX[g.family], g.mode)


class AlgebraElement:
    """Finite sum of ring coefficients times loop generators, one term per generator."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable | None = None):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else [(g, c) for c, g in (terms or [])]
        for g, c in items:
            c = Expr.coerce(c)
            acc[g] = acc.get(g, Expr()) + c
        self.terms: dict = {g: c for g, c in acc.items() if c}

    @classmethod
    def of(cls, *pairs) -> AlgebraElement:
        """AlgebraElement.of((coef, generator), ...)."""
        return cls(list(pairs))

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, Expr()) + c
        return AlgebraElement(out)

    def __neg__(self) -> AlgebraElement:
        return AlgebraElement({g: -c for g, c in self.terms.items()})

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + (-other)

    def lmul(self, factor) -> AlgebraElement:
        """factor * self, the factor placed to the left of every coefficient."""
        f = Expr.coerce(factor)
        return AlgebraElement({g: f * c for g, c in self.terms.items()})

    def map(self, fn) -> AlgebraElement:
        return AlgebraElement({g: fn(c) for g, c in self.terms.items()})

    def derive(self, direction: int) -> AlgebraElement:
        return self.map(lambda c: derive(c, direction))

    def normalize(self, eom: EomSystem) -> AlgebraElement:
        return self.map(eom.normalize)

    def substitute_fields(self, mapping: Mapping[str, Expr]) -> AlgebraElement:
        return self.map(lambda c: substitute_fields(c, mapping))

    def coefficient(self, g: LoopGenerator) -> Expr:
        return self.terms.get(g, Expr())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def generators(self) -> list[LoopGenerator]:
        return sorted(self.terms, key=_gen_key)

    def is_total_grade_00(self) -> bool:
        return all(c.is_homogeneous(g.grade) for g, c in self.terms.items())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[g]})*{g}" for g in self.generators())

    __repr__ = __str__

    def to_latex(self) -> str:
        from z22osp.emit import expr_to_latex

        if not self.terms:
            return "0"
        parts = []
        for g in self.generators():
            c = self.terms[g]
            body = expr_to_latex(c)
            if body == "1":
                parts.append(g.latex())
            elif body == "-1":
                parts.append("-" + g.latex())
            else:
                parts.append(f"\\big({body}\\big) {g.latex()}" if len(c) > 1 else f"{body}\\, {g.latex()}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [{"generator": str(g), "coeff": self.terms[g].to_json()} for g in self.generators()]

    @classmethod
    def from_json(cls, data: list) -> AlgebraElement:
        return cls({LoopGenerator.parse(t["generator"]): Expr.from_json(t["coeff"]) for t in data})


def algebra_bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """[[cX, dY]] = grade_sign(grade X, grade d) * (c d) [[X, Y]], extended bilinearly."""
    acc: dict = {}
    for x, c in a.terms.items():
        for y, d in b.terms.items():
            table = bracket(x, y)
            if not table:
                continue
            for gd in sorted(d.grades()):
                dh = d.homogeneous_part(gd)
                cd = c * dh
                if not cd:
                    continue
                s = grade_sign(x.grade, gd)
                for z, k in table.items():
                    acc[z] = acc.get(z, Expr()) + cd.scale(k * s)
    return AlgebraElement(acc)


def zero_curvature(lp: AlgebraElement, lm: AlgebraElement, dirs: tuple[int, int] = (0, 1)) -> AlgebraElement:
    """F = d_2 Lp - d_1 Lm + [[Lp, Lm]]; flatness of (d_1 - Lp, d_2 - Lm) is F = 0."""
    d1, d2 = dirs
    return lp.derive(d2) - lm.derive(d1) + algebra_bracket(lp, lm)


def grade_decompose(f: AlgebraElement) -> dict[Fraction, AlgebraElement]:
    out: dict = {}
    for g, c in f.terms.items():
        out.setdefault(principal_grade(g), {})[g] = c
    return {k: AlgebraElement(v) for k, v in sorted(out.items())}


def G(name: str, mode: int = 0) -> LoopGenerator:
    return LoopGenerator(name, mode)


# ---------------------------------------------------------------- shared field expressions


def Sigma00() -> Expr:
    return jet("sigma10", 1) * jet("sigma10") + jet("sigma01", 1) * jet("sigma01")


def Sigma11() -> Expr:
    return jet("sigma01", 1) * jet("sigma10") - jet("sigma10", 1) * jet("sigma01")


# ---------------------------------------------------------------- negative hierarchy


def _chiral_or_const(v) -> Expr:
    if isinstance(v, str):
        return chiral(v)
    return Expr.const(v)


def negative_coefficients(k, l) -> dict[str, Expr]:
    """Integrated grade -1 coefficients; k, l are constants or chiral symbol names."""
    kk, ll = _chiral_or_const(k), _chiral_or_const(l)
    e_p, e_m = exp_("phi00", 2), exp_("phi00", -2)
    ch, sh = cosh_("phi11", 2), sinh_("phi11", 2)
    return {
        "a00": kk * e_p * ch,
        "b00": ll * e_m * ch,
        "c11": kk * e_p * sh,
        "d11": -(ll * e_m * sh),
    }


def build_negative_pair(k, l) -> tuple[AlgebraElement, AlgebraElement]:
    c = negative_coefficients(k, l)
    lp = AlgebraElement.of(
        (jet("phi00", 1), G("K0")),
        (jet("phi11", 1), G("L0")),
        (jet("sigma10"), G("P+")),
        (jet("sigma01"), G("Q+")),
        (1, G("K+")),
        (1, G("K-", 1)),
    )
    lm = AlgebraElement.of(
        (jet("rho10"), G("P-")),
        (jet("rho01"), G("Q-")),
        (c["a00"], G("K+", -1)),
        (c["b00"], G("K-")),
        (c["c11"], G("L+", -1)),
        (c["d11"], G("L-")),
    )
    return lp, lm


def _sigma_rules() -> list[Rule]:
    return [Rule("sigma10", (0, 1), jet("rho10")), Rule("sigma01", (0, 1), jet("rho01"))]


def negative_eom_general(k, l) -> EomSystem:
    """The six-equation system with arbitrary k, l, before specialization."""
    c = negative_coefficients(k, l)
    s10, s01, r10, r01 = jet("sigma10"), jet("sigma01"), jet("rho10"), jet("rho01")
    p00, p11 = jet("phi00", 1), jet("phi11", 1)
    return EomSystem(
        [
            Rule("phi00", (1, 1), c["a00"] - c["b00"] - r10 * s10 - r01 * s01),
            Rule("phi11", (1, 1), c["c11"] - c["d11"] + (r10 * s01 - r01 * s10).scale(I)),
            Rule("rho10", (1, 0), -(p00 * r10) - (p11 * r01).scale(I) + s10 * c["b00"] - (s01 * c["d11"]).scale(I)),
            Rule("rho01", (1, 0), -(p00 * r01) + (p11 * r10).scale(I) + s01 * c["b00"] + (s10 * c["d11"]).scale(I)),
            *_sigma_rules(),
        ]
    )


def _sinh00(k) -> Expr:
    return (exp_("phi00", k) - exp_("phi00", -k)).scale(Fraction(1, 2))


def _cosh00(k) -> Expr:
    return (exp_("phi00", k) + exp_("phi00", -k)).scale(Fraction(1, 2))


def _printed_system(phi00_rhs: Expr, phi11_rhs: Expr, rho_factor) -> EomSystem:
    """Systems printed for the three specializations.

    ``rho_factor`` multiplies e^{-2 phi00}(sigma10 cosh 2phi11 + i sigma01 sinh 2phi11) in the
    rho10 equation and its partner in the rho01 equation.
    """
    s10, s01, r10, r01 = jet("sigma10"), jet("sigma01"), jet("rho10"), jet("rho01")
    p00, p11 = jet("phi00", 1), jet("phi11", 1)
    em = exp_("phi00", -2)
    ch, sh = cosh_("phi11", 2), sinh_("phi11", 2)
    f = Expr.const(rho_factor)
    bilinear00 = -(r10 * s10) - r01 * s01
    bilinear11 = (r10 * s01 - r01 * s10).scale(I)
    return EomSystem(
        [
            Rule("phi00", (1, 1), phi00_rhs + bilinear00),
            Rule("phi11", (1, 1), phi11_rhs + bilinear11),
            Rule("rho10", (1, 0), -(p00 * r10) - (p11 * r01).scale(I) + f * em * (s10 * ch + (s01 * sh).scale(I))),
            Rule("rho01", (1, 0), -(p00 * r01) + (p11 * r10).scale(I) + f * em * (s01 * ch - (s10 * sh).scale(I))),
            *_sigma_rules(),
        ]
    )


NEGATIVE_CASES = {
    # name: ((k, l), printed phi00 source, printed phi11 source, printed rho prefactor)
    "liouville": ((0, -1), lambda: exp_("phi00", -2) * cosh_("phi11", 2), lambda: -(exp_("phi00", -2) * sinh_("phi11", 2)), -1),
    "sinh": ((Fraction(1, 2), Fraction(1, 2)), lambda: _sinh00(2) * cosh_("phi11", 2), lambda: _cosh00(2) * sinh_("phi11", 2), Fraction(-1, 2)),
    "cosh": ((Fraction(1, 2), Fraction(-1, 2)), lambda: _cosh00(2) * cosh_("phi11", 2), lambda: _sinh00(2) * sinh_("phi11", 2), Fraction(1, 2)),
}


def negative_eom_printed(case: str) -> EomSystem:
    _, src00, src11, rho_factor = NEGATIVE_CASES[case]
    return _printed_system(src00(), src11(), rho_factor)


def negative_eom(case: str, source: str = "printed") -> EomSystem:
    """EOM for a named case; source 'printed' uses the displayed system, 'general' specializes k, l."""
    if source == "printed":
        return negative_eom_printed(case)
    k, l = NEGATIVE_CASES[case][0]
    return negative_eom_general(k, l)


@dataclass
class Report:
    name: str
    ok: bool
    residual: object = None
    details: dict | None = None

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}"


def curvature_residual(lp: AlgebraElement, lm: AlgebraElement, eom: EomSystem, dirs=(0, 1)) -> AlgebraElement:
    return zero_curvature(lp, lm, dirs).normalize(eom)


def verify_negative_hierarchy(case: str, source: str = "printed") -> Report:
    (k, l) = NEGATIVE_CASES[case][0]
    lp, lm = build_negative_pair(k, l)
    res = curvature_residual(lp, lm, negative_eom(case, source))
    return Report(f"zero curvature {case} ({source})", not res, res)


def verify_negative_general() -> Report:
    lp, lm = build_negative_pair("k", "l")
    res = curvature_residual(lp, lm, negative_eom_general("k", "l"))
    return Report("zero curvature, chiral k and l", not res, res)


def compare_printed_with_general(case: str) -> dict[str, Expr]:
    """Per rule, printed right side minus the specialized general one (empty when they agree)."""
    printed, general = negative_eom(case, "printed"), negative_eom(case, "general")
    out = {}
    for rule in printed:
        diff = rule.rhs - general.rules[rule.field].rhs
        if diff:
            out[rule.field] = diff
    return out


def change_variables_check(eom: EomSystem | None = None) -> Report:
    """Rewrite the psi form of the sinh-Gordon system in sigma/rho fields and compare.

    Works with psi_hat = sqrt(2) psi so every coefficient stays rational:
    psi_hat10 = sigma10, psi_hat01 = -i sigma01, and psibar as in the field map.
    """
    eom = eom or negative_eom("sinh", "printed")
    r10, r01, s10, s01 = jet("rho10"), jet("rho01"), jet("sigma10"), jet("sigma01")
    ep, em1 = exp_("phi00", 1), exp_("phi00", -1)
    c1, s1 = cosh_("phi11", 1), sinh_("phi11", 1)
    ps10 = s10
    ps01 = -s01.scale(I)
    pb10 = ep * (r10 * c1 - (r01 * s1).scale(I))
    pb01 = ep * (r10 * s1 - (r01 * c1).scale(I))
    A = ps10 * pb10 - ps01 * pb01
    B = ps01 * pb10 - ps10 * pb01
    checks = {
        "phi00": (jet("phi00", 1, 1), _sinh00(2) * cosh_("phi11", 2) + em1 * (A * c1 + B * s1)),
        "phi11": (jet("phi11", 1, 1), _cosh00(2) * sinh_("phi11", 2) - em1 * (s1 * A + c1 * B)),
        "psi10": (derive(ps10, 1), em1 * (pb10 * c1 - pb01 * s1)),
        "psibar10": (derive(pb10, 0), (em1 * (ps10 * c1 - ps01 * s1)).scale(Fraction(-1, 2))),
        "psi01": (derive(ps01, 1), em1 * (pb01 * c1 - pb10 * s1)),
        "psibar01": (derive(pb01, 0), (em1 * (ps01 * c1 - ps10 * s1)).scale(Fraction(-1, 2))),
    }
    residuals = {k: eom.normalize(lhs - rhs) for k, (lhs, rhs) in checks.items()}
    bad = {k: v for k, v in residuals.items() if v}
    return Report("field redefinition, sinh-Gordon", not bad, bad)


def classical_limit_sinh() -> Expr:
    """phi00 source of the sinh-Gordon system with every other field set to zero."""
    rule = negative_eom("sinh").rules["phi00"]
    return substitute_fields(rule.rhs, {f: Expr() for f in ("phi11", "sigma10", "sigma01", "rho10", "rho01")})


# ---------------------------------------------------------------- positive hierarchy

MKDV_UNKNOWNS = (
    "a00", "b11", "rho10", "rho01", "c00", "d00", "e11", "f11",
    "xi10", "xi01", "h00", "k11", "eta10", "eta01", "l00", "p00", "r11", "s11",
)
MKDV_FIELDS = ("u00", "u11", "sigma10", "sigma01")
MKDV_INTEGRATION_CONSTANTS = {"l00": 4, "p00": 4}


def mkdv_lax_x() -> AlgebraElement:
    return AlgebraElement.of(
        (jet("u00"), G("K0")),
        (jet("u11"), G("L0")),
        (jet("sigma10"), G("P+")),
        (jet("sigma01"), G("Q+")),
        (1, G("K+")),
        (1, G("K-", 1)),
    )


MKDV_LT_SLOTS = (
    ("a00", "K0", 0), ("b11", "L0", 0),
    ("rho10", "P+", 0), ("rho01", "Q+", 0),
    ("c00", "K+", 0), ("d00", "K-", 1), ("e11", "L+", 0), ("f11", "L-", 1),
    ("xi10", "P-", 1), ("xi01", "Q-", 1),
    ("h00", "K0", 1), ("k11", "L0", 1),
    ("eta10", "P+", 1), ("eta01", "Q+", 1),
    ("l00", "K+", 1), ("p00", "K-", 2), ("r11", "L+", 1), ("s11", "L-", 2),
)


def mkdv_lax_t(coefficients: Mapping[str, Expr] | None = None) -> AlgebraElement:
    """L_t with unknown coefficient fields, or with the given coefficients substituted."""
    pairs = []
    for name, fam, mode in MKDV_LT_SLOTS:
        c = coefficients[name] if coefficients is not None else jet(name)
        pairs.append((c, G(fam, mode)))
    return AlgebraElement(pairs)


@dataclass
class HierarchySolution:
    coefficients: dict[str, Expr]
    eom: EomSystem
    log: list

    def lax_pair(self) -> tuple[AlgebraElement, AlgebraElement]:
        return mkdv_lax_x(), mkdv_lax_t(self.coefficients)


def solve_positive_hierarchy(constants: Mapping[str, object] | None = None) -> HierarchySolution:
    """Solve the mKdV curvature grade by grade, from the top grade down."""
    consts = dict(MKDV_INTEGRATION_CONSTANTS if constants is None else constants)
    f = zero_curvature(mkdv_lax_x(), mkdv_lax_t(), dirs=(0, 1))
    solver = LinearSolver(list(MKDV_UNKNOWNS), t_fields=MKDV_FIELDS, constants=consts)
    for grade, part in sorted(grade_decompose(f).items(), reverse=True):
        eqs = [(part.terms[g], f"grade {grade}, {g}") for g in sorted(part.terms, key=_gen_key)]
        solver.add(eqs)
    sol = solver.finish()
    coeffs = {n: sol[n] for n in MKDV_UNKNOWNS}
    eom = EomSystem([Rule(fld, (0, 1), sol[fld]) for fld in MKDV_FIELDS])
    return HierarchySolution(coeffs, eom, solver.log)


def U00_of_u() -> Expr:
    u, w = jet("u00"), jet("u11")
    return -jet("u00", 1) + u * u + w * w


def U11_of_u() -> Expr:
    u, w = jet("u00"), jet("u11")
    return -jet("u11", 1) + (u * w).scale(2)


def mkdv_printed_coefficients() -> dict[str, Expr]:
    u, w = jet("u00"), jet("u11")
    u1, w1 = jet("u00", 1), jet("u11", 1)
    u2, w2 = jet("u00", 2), jet("u11", 2)
    s10, s01 = jet("sigma10"), jet("sigma01")
    S00, S11 = Sigma00(), Sigma11()
    dS00, dS11 = derive(S00, 0), derive(S11, 0)
    d00 = u1.scale(2) - (u * u + w * w).scale(2) + S00.scale(6)
    f11 = w1.scale(2) - (u * w).scale(4) + S11.scale(6 * I)
    return {
        "a00": u2 - (u * u * u).scale(2) - (u * w * w).scale(6) + dS00.scale(3) + (u * S00).scale(6) + (w * S11).scale(6 * I),
        "b11": w2 - (w * w * w).scale(2) - (u * u * w).scale(6) + dS11.scale(3 * I) + (u * S11).scale(6 * I) + (w * S00).scale(6),
        "rho10": (jet("sigma10", 2) + u * jet("sigma10", 1) + (w * jet("sigma01", 1)).scale(I)).scale(4) + d00 * s10 + (f11 * s01).scale(I),
        "rho01": (jet("sigma01", 2) + u * jet("sigma01", 1) - (w * jet("sigma10", 1)).scale(I)).scale(4) + d00 * s01 - (f11 * s10).scale(I),
        "c00": (u1 + u * u + w * w - S00).scale(-2),
        "d00": d00,
        "e11": w1.scale(-2) - (u * w).scale(4) + S11.scale(2 * I),
        "f11": f11,
        "xi10": jet("sigma10", 1).scale(-4),
        "xi01": jet("sigma01", 1).scale(-4),
        "h00": u.scale(4),
        "k11": w.scale(4),
        "eta10": s10.scale(4),
        "eta01": s01.scale(4),
        "l00": Expr.const(4),
        "p00": Expr.const(4),
        "r11": Expr(),
        "s11": Expr(),
    }


def mkdv_printed_eom() -> EomSystem:
    c = mkdv_printed_coefficients()
    U0, U1 = U00_of_u(), U11_of_u()
    return EomSystem(_mkdv_rules(derive(c["a00"], 0), derive(c["b11"], 0), U0, U1))


def _sigma_flow(U0: Expr, U1: Expr) -> tuple[Expr, Expr]:
    s10, s01 = jet("sigma10"), jet("sigma01")
    s10_1, s01_1 = jet("sigma10", 1), jet("sigma01", 1)
    dU0, dU1 = derive(U0, 0), derive(U1, 0)
    t10 = (
        jet("sigma10", 3).scale(4) - (U0 * s10_1).scale(6) - (U1 * s01_1).scale(6 * I)
        - (dU0 * s10).scale(3) - (dU1 * s01).scale(3 * I)
    )
    t01 = (
        jet("sigma01", 3).scale(4) - (U0 * s01_1).scale(6) + (U1 * s10_1).scale(6 * I)
        - (dU0 * s01).scale(3) + (dU1 * s10).scale(3 * I)
    )
    return t10, t01


def _mkdv_rules(t00: Expr, t11: Expr, U0: Expr, U1: Expr) -> list[Rule]:
    t10, t01 = _sigma_flow(U0, U1)
    return [
        Rule("u00", (0, 1), t00),
        Rule("u11", (0, 1), t11),
        Rule("sigma10", (0, 1), t10),
        Rule("sigma01", (0, 1), t01),
    ]


def verify_mkdv(coefficients: Mapping[str, Expr] | None = None, eom: EomSystem | None = None) -> Report:
    coeffs = coefficients if coefficients is not None else mkdv_printed_coefficients()
    eom = eom if eom is not None else mkdv_printed_eom()
    res = curvature_residual(mkdv_lax_x(), mkdv_lax_t(coeffs), eom)
    return Report("zero curvature mKdV", not res, res)


def compare_coefficients(found: Mapping[str, Expr], expected: Mapping[str, Expr]) -> dict[str, Expr]:
    """Names whose difference is nonzero, mapped to found - expected."""
    return {n: found[n] - expected[n] for n in expected if found.get(n, Expr()) != expected[n]}


def reduce_rule(eom: EomSystem, field: str, zero_fields: Iterable[str]) -> Expr:
    """Right side of one flow after setting the listed fields to zero."""
    return substitute_fields(eom.rules[field].rhs, {f: Expr() for f in zero_fields})


def mkdv_reductions(eom: EomSystem | None = None) -> dict[str, Report]:
    eom = eom or mkdv_printed_eom()
    u, u1, u2, u3 = (jet("u00", k) for k in range(4))
    s, s1, s2, s3 = (jet("sigma10", k) for k in range(4))
    classical = u3 - (u1 * u * u).scale(6)
    got = reduce_rule(eom, "u00", ("u11", "sigma10", "sigma01"))
    out = {"classical": Report("mKdV classical reduction", got == classical, got - classical)}
    super_u = classical + derive(s2 * s + (u * s1 * s).scale(2), 0).scale(3)
    super_s = s3.scale(4) - ((-u1 + u * u) * s1).scale(6) - ((-u2 + (u1 * u).scale(2)) * s).scale(3)
    gu = reduce_rule(eom, "u00", ("u11", "sigma01"))
    gs = reduce_rule(eom, "sigma10", ("u11", "sigma01"))
    ok = gu == super_u and gs == super_s
    out["super"] = Report("mKdV super reduction", ok, {"u00": gu - super_u, "sigma10": gs - super_s})
    return out
