"""Conserved charges of graded KdV from the second column of Gamma, and their mKdV images.

Gamma solves d_x Gamma_i2 = (L_x Gamma)_i2 - Gamma_i2 (L_x Gamma)_22 with no sum over
the repeated index, L_x being the KdV Lax matrix in the homogeneous gradation.  The
column is expanded as Gamma_i2 = sum_k Gamma_i2^(k) lambda^(-k), even k for rows
1, 3, 4 and odd k for rows 5, 6, with Gamma_22 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from z22osp.gaussian import Gaussian
from z22osp.grading import G00, G01, G10, G11, Grade
from z22osp.lax import I, Report, Sigma00, Sigma11, mkdv_printed_coefficients, mkdv_printed_eom
from z22osp.linsolve import LinearSolver
from z22osp.miura import kdv_eom, miura_apply
from z22osp.rep6 import lax_matrix_kdv
from z22osp.ring import (
    EomSystem,
    Expr,
    GeneratorId,
    NotExact,
    Rule,
    _split_off,
    antiderivative,
    antiderivative_definition,
    derive,
    dx,
    euler,
    integrate_x,
    is_total_derivative,
    jet,
    jet_id,
    reduce_density,
    towers,
)

MAX_ORDER_CAP = 12
ROW_GRADE = {1: G00, 3: G11, 4: G11, 5: G10, 6: G01}
ROW_PARITY = {1: 0, 3: 0, 4: 0, 5: 1, 6: 1}


class ResidualNonlocal(RuntimeError):
    """An antiderivative symbol survived the reduction of a density."""


def gamma_name(row: int, k: int) -> str:
    return f"G{row}2_{k}"


def gamma(row: int, k: int) -> Expr:
    return jet(gamma_name(row, k), grade=ROW_GRADE[row])


def _antiderivative_name(unknown: str) -> str:
    return "W" + unknown[1:]


@dataclass
class GammaColumn:
    epsilon: int
    max_order: int
    entries: dict  # (row, k) -> Expr
    system: EomSystem
    antiderivatives: list = field(default_factory=list)
    log: list = field(default_factory=list)
    open_equations: list = field(default_factory=list)

    def get(self, row: int, k: int) -> Expr:
        if row == 2:
            return Expr.const(1 if k == 0 else 0)
        if (row, k) in self.entries:
            return self.entries[(row, k)]
        return self.system.normalize(gamma(row, k))

    def reduce(self, p: Expr) -> Expr:
        return self.system.normalize(p)


def _gamma_series(max_order: int) -> list[dict]:
    """Gamma column as 6 Laurent polynomials {power: Expr}, unknowns as jets."""
    col = []
    for row in range(1, 7):
        if row == 2:
            col.append({0: Expr.const(1)})
            continue
        col.append({-k: gamma(row, k) for k in range(ROW_PARITY[row], max_order + 1, 2)})
    return col


def _mul_poly(a: dict, b: dict) -> dict:
    out: dict = {}
    for p, x in a.items():
        for q, y in b.items():
            out[p + q] = out.get(p + q, Expr()) + x * y
    return out


def gamma_equations(max_order: int) -> dict[int, list[tuple[int, Expr]]]:
    """For each power of lambda (high to low), the row equations whose terms are all kept.

    Row equation: d_x Gamma_i2 - (L Gamma)_i2 + Gamma_i2 * lambda^2 Gamma_12.
    """
    lax = lax_matrix_kdv()
    col = _gamma_series(max_order)
    j22 = {p + 2: c for p, c in col[0].items()}  # (L Gamma)_22 = lambda^2 Gamma_12
    out: dict = {}
    lowest = 2 - max_order
    for i in range(6):
        if i == 1:
            continue
        poly: dict = {p: dx(c) for p, c in col[i].items()}
        for k in range(6):
            entry = lax.entry(i, k)
            if entry:
                for p, c in _mul_poly(entry, col[k]).items():
                    poly[p] = poly.get(p, Expr()) - c
        for p, c in _mul_poly(col[i], j22).items():
            poly[p] = poly.get(p, Expr()) + c
        for p, c in poly.items():
            if p >= lowest and c:
                out.setdefault(p, []).append((i + 1, c))
    return dict(sorted(out.items(), reverse=True))


def _unknown_order(max_order: int) -> list[str]:
    names = []
    for k in range(max_order + 1):
        for row in (1, 5, 6, 4, 3):
            if k % 2 == ROW_PARITY[row]:
                names.append(gamma_name(row, k))
    return names


def gamma_solve(max_order: int = 8, epsilon: int = 1) -> GammaColumn:
    """Solve the column order by order in lambda, down to lambda^(2 - max_order)."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if max_order > MAX_ORDER_CAP or max_order < 0:
        raise ValueError(f"max_order must lie in [0, {MAX_ORDER_CAP}]")
    introduced: list = []

    def hook(unknown: str, derivative: Expr) -> Expr:
        name = _antiderivative_name(unknown)
        grade = ROW_GRADE[int(unknown[1])]
        try:
            g = antiderivative(name, grade, derivative)
        except ValueError:
            g = antiderivative(f"{name}e{'p' if epsilon > 0 else 'm'}", grade, derivative)
        introduced.append(g)
        return Expr.gen(g)

    solver = LinearSolver(
        _unknown_order(max_order),
        antiderivative_hook=hook,
        base_rules=(Rule(gamma_name(1, 0), (0, 0), Expr.const(epsilon)),),
    )
    for p, eqs in gamma_equations(max_order).items():
        solver.add([(e, f"lambda^{p}, row {row}") for row, e in eqs])
    sol = solver.solution()
    entries = {}
    for name, value in sol.items():
        row, k = int(name[1]), int(name.split("_")[1])
        entries[(row, k)] = value
    entries[(1, 0)] = Expr.const(epsilon)
    open_eqs = [(e.label, e.expr) for e in solver.pending]
    return GammaColumn(epsilon, max_order, entries, solver.system(), introduced, solver.log, open_eqs)


def required_entries(max_order: int) -> list[tuple[int, int]]:
    """Entries that must come out determined when solving to max_order."""
    req = [(1, k) for k in range(0, max_order + 1, 2)]
    req += [(r, k) for r in (5, 6) for k in range(1, max_order, 2)]
    req += [(4, k) for k in range(0, max_order - 3, 2)]
    req += [(3, k) for k in range(0, max_order - 3, 2)]
    return req


def column_residuals(col: GammaColumn) -> dict[int, list]:
    """Re-substitute the solution into every kept equation; report nonzero ones free of open unknowns."""
    bad: dict = {}
    for p, eqs in gamma_equations(col.max_order).items():
        for row, e in eqs:
            r = col.reduce(e)
            if r and not any(g.kind == "jet" and g.field.startswith("G") for g in r.generators()):
                bad.setdefault(p, []).append((row, r))
    return bad


# ---------------------------------------------------------------- printed relations


def printed_relations(col: GammaColumn) -> dict[str, Expr]:
    """Each displayed relation written as lhs - rhs and reduced with the solution."""
    eps = col.epsilon
    g = col.get
    U0, U1 = jet("U00"), jet("U11")
    s10, s01 = jet("sigma10"), jet("sigma01")
    S0, S1 = Sigma00(), Sigma11()
    W = g(3, 2)
    rel = {
        "Gamma12^(0) = eps": g(1, 0) - eps,
        "Gamma42^(0) = eps Gamma32^(0)": g(4, 0) - g(3, 0).scale(eps),
        "Gamma32^(0) = 0": g(3, 0),
        "Gamma52^(1)": g(5, 1) - (-s10.scale(eps) + (s01 * g(3, 0)).scale(I)),
        "Gamma62^(1)": g(6, 1) - (-s01.scale(eps) - (s10 * g(3, 0)).scale(I)),
        "Gamma12^(2) = 0": g(1, 2),
        "Gamma42^(2) = eps Gamma32^(2)": g(4, 2) - W.scale(eps),
        "Gamma52^(3)": g(5, 3) - ((s01 * W).scale(I) + jet("sigma10", 1)),
        "Gamma62^(3)": g(6, 3) - (-(s10 * W).scale(I) + jet("sigma01", 1)),
        "2 eps Gamma12^(4)": g(1, 4).scale(2 * eps) - (U0 - S0),
        "2 d_x Gamma32^(2)": dx(W).scale(2) - (U1 - S1.scale(I)),
        "Gamma42^(4) = eps Gamma32^(4) - d_x Gamma32^(2)": g(4, 4) - (g(3, 4).scale(eps) - dx(W)),
        "eps Gamma52^(5)": g(5, 5).scale(eps) - ((s01 * g(4, 4)).scale(I) + (g(1, 4) * s10).scale(eps) - dx(g(5, 3))),
        "eps Gamma62^(5)": g(6, 5).scale(eps) - (-(s10 * g(4, 4)).scale(I) + (g(1, 4) * s01).scale(eps) - dx(g(6, 3))),
        "Gamma12^(6)": g(1, 6) - dx(W * W + S0 - g(1, 4).scale(eps)).scale(Fraction(1, 2)),
        "d_x(Gamma42^(4) + eps Gamma32^(4))": dx(g(4, 4) + g(3, 4).scale(eps)) - dx(S1).scale(I),
        "d_x(Gamma42^(4) - eps Gamma32^(4))": dx(g(4, 4) - g(3, 4).scale(eps))
        - ((g(4, 6) - g(3, 6).scale(eps)).scale(-2 * eps) - (g(1, 4) * W).scale(2 * eps) + dx(S1).scale(I)),
        "Gamma42^(4) closed form": g(4, 4) - (S1.scale(I) - dx(W)).scale(Fraction(1, 2)),
    }
    if col.max_order >= 8:
        rel["eps Gamma52^(7)"] = g(5, 7).scale(eps) - (
            (s01 * g(4, 6)).scale(I) - g(1, 4) * g(5, 3) + (g(1, 6) * s10).scale(eps) - dx(g(5, 5))
        )
        rel["eps Gamma62^(7)"] = g(6, 7).scale(eps) - (
            -(s10 * g(4, 6)).scale(I) - g(1, 4) * g(6, 3) + (g(1, 6) * s01).scale(eps) - dx(g(6, 5))
        )
        rel["2 eps Gamma12^(8)"] = g(1, 8).scale(2 * eps) - gamma12_8_printed(col)
    return {k: col.reduce(v) for k, v in rel.items()}


def gamma12_8_printed(col: GammaColumn) -> Expr:
    U0, U1 = jet("U00"), jet("U11")
    S0, S1 = Sigma00(), Sigma11()
    W = col.get(3, 2)
    local = (
        (U0 * U0 + U1 * U1).scale(Fraction(-1, 4))
        + (U0 * S0 + (U1 * S1).scale(I)).scale(Fraction(3, 2))
        + jet("sigma10", 2) * jet("sigma10", 1)
        + jet("sigma01", 2) * jet("sigma01", 1)
    )
    return local - dx(col.get(1, 6) - (S1 * W).scale(I) + dx(S0))


# ---------------------------------------------------------------- densities


@dataclass
class ConservedDensity:
    order: int
    density: Expr
    grade: Grade = G00

    def to_json(self) -> dict:
        return {"order": self.order, "grade": str(self.grade), "density": self.density.to_json()}


def _split_power(p: Expr, w: GeneratorId) -> dict[int, Expr]:
    """p = sum_k A_k * w^k with w moved to the right."""
    out: dict = {}
    for m, c in p.terms.items():
        k = m.count(w)
        sign, rest = 1, m
        for _ in range(k):
            s, rest = _split_off(rest, w)
            sign *= s
        out[k] = out.get(k, Expr()) + Expr({rest: c * sign})
    return out


def remove_antiderivatives(p: Expr, max_rounds: int = 50) -> Expr:
    """Subtract total derivatives d_x(B w^k) until no antiderivative symbol w remains."""
    for _ in range(max_rounds):
        ws = sorted({g for g in p.generators() if g.kind == "antider"})
        if not ws:
            return p
        w = ws[0]
        parts = _split_power(p, w)
        top = max(parts)
        a = parts[top]
        # a = c * (d_x w) + d_x b gives a w^k = d_x(c w^(k+1)/(k+1) + b w^k) up to lower powers
        c = Gaussian(0)
        if not is_total_derivative(a):
            c = proportionality(a, antiderivative_definition(w.field))
            if c is None:
                raise ResidualNonlocal(f"{w.field}^{top} has a non-exact coefficient")
        b = integrate_x(a - antiderivative_definition(w.field).scale(c))
        wk = Expr.gen(w) ** top
        p = p - dx(b * wk + (wk * Expr.gen(w)).scale(c / (top + 1)))
    raise ResidualNonlocal("antiderivative removal did not terminate")


def density_class(p: Expr) -> Expr:
    return reduce_density(remove_antiderivatives(p))


def extract_densities(col: GammaColumn) -> list[ConservedDensity]:
    out = []
    for k in range(0, col.max_order + 1, 2):
        d = density_class(col.get(1, k))
        out.append(ConservedDensity(k, d, G00))
    return out


def proportionality(p: Expr, q: Expr) -> Gaussian | None:
    """c with p - c*q a total x-derivative, or None.  Both must be antiderivative-free."""
    if not q or is_total_derivative(q):
        return Gaussian(0) if is_total_derivative(p) else None
    c = None
    for f, b, gr in sorted(towers(q) | towers(p)):
        eq = euler(q, f, b, gr)
        if eq:
            m, v = next(iter(sorted(eq.terms.items())))
            ep = euler(p, f, b, gr)
            c = ep.terms.get(m, Gaussian(0)) / v
            break
    if c is None:
        return None
    return c if is_total_derivative(p - q.scale(c)) else None


def verify_conservation(d: ConservedDensity | Expr, eom: EomSystem) -> bool:
    p = d.density if isinstance(d, ConservedDensity) else d
    return is_total_derivative(eom.normalize(derive(p, 1)))


def map_charges_via_miura(d: ConservedDensity) -> ConservedDensity:
    return ConservedDensity(d.order, reduce_density(miura_apply(d.density)), d.grade)


# ---------------------------------------------------------------- printed charges


def kdv_charge_4() -> Expr:
    return jet("U00") - Sigma00()


def kdv_charge_8() -> Expr:
    U0, U1 = jet("U00"), jet("U11")
    return (
        U0 * U0 + U1 * U1
        - (U0 * Sigma00() + (U1 * Sigma11()).scale(I)).scale(6)
        - (jet("sigma10", 2) * jet("sigma10", 1) + jet("sigma01", 2) * jet("sigma01", 1)).scale(4)
    )


def mkdv_charge_4() -> Expr:
    u, w = jet("u00"), jet("u11")
    return u * u + w * w - Sigma00()


def mkdv_charge_8() -> Expr:
    u, w = jet("u00"), jet("u11")
    u1, w1 = jet("u00", 1), jet("u11", 1)
    return (
        u ** 4 + w ** 4 + (u * u * w * w).scale(6) + u1 * u1 + w1 * w1
        + ((u1 - u * u - w * w) * Sigma00()).scale(6)
        + ((w1 - (u * w).scale(2)) * Sigma11()).scale(6 * I)
        - (jet("sigma10", 2) * jet("sigma10", 1) + jet("sigma01", 2) * jet("sigma01", 1)).scale(4)
    )


def charge_report(col: GammaColumn) -> dict[str, Report]:
    dens = {d.order: d for d in extract_densities(col)}
    kdv, mk = kdv_eom(), mkdv_printed_eom()
    out = {}
    for order, printed, mprinted in ((4, kdv_charge_4(), mkdv_charge_4()), (8, kdv_charge_8(), mkdv_charge_8())):
        d = dens[order]
        c = proportionality(d.density, printed)
        out[f"Q{order} matches"] = Report(f"Q2^({order}) matches printed density", c is not None and bool(c), c)
        out[f"Q{order} conserved"] = Report(f"Q2^({order}) conserved under KdV", verify_conservation(d, kdv))
        img = map_charges_via_miura(ConservedDensity(order, printed))
        cm = proportionality(img.density, mprinted)
        out[f"Q{order} miura"] = Report(f"Miura image of Q2^({order}) matches printed mKdV charge", cm == 1, cm)
        out[f"Q{order} mkdv conserved"] = Report(f"Miura image of Q2^({order}) conserved under mKdV", verify_conservation(img, mk))
    d6 = dens[6].density if 6 in dens else Expr()
    out["Q6 trivial"] = Report("Q2^(6) is a total derivative", not d6 or is_total_derivative(d6), d6)
    return out


def graded_charge_checks(col: GammaColumn | None = None) -> dict[str, Report]:
    col = col or gamma_solve(4, 1)
    mk, kdv = mkdv_printed_eom(), kdv_eom()
    u11_t = mk.normalize(jet("u11", 0, 1))
    b11 = mkdv_printed_coefficients()["b11"]
    exact = u11_t == dx(b11)
    cand = jet("U11") - Sigma11().scale(I)
    w = col.get(3, 2)
    is_dx = bool(w) and dx(w).scale(2) == cand and all(g.kind == "antider" for g in w.generators())
    return {
        "u11 conserved": Report("d_t u11 = d_x b11 under mKdV", exact and is_total_derivative(u11_t)),
        "U11 - i Sigma11 = 2 d_x Gamma32^(2)": Report("U11 - i Sigma11 is twice d_x of Gamma32^(2)", is_dx, w),
        "U11 - i Sigma11 conserved": Report("d_t(U11 - i Sigma11) is a total derivative under KdV", verify_conservation(cand, kdv)),
    }
