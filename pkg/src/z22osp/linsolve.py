"""Successive elimination for systems linear in unknown coefficient functions.

Equations arrive in batches (one batch per grade or per power of lambda).  After
each batch the solver repeatedly looks for a pivot:

* algebraic: an unknown that appears undifferentiated, alone in its monomial,
  with a constant coefficient, and nowhere else in that equation;
* differential: an equation whose only unknown is ``c * X^(n)`` (n = 1) with c
  constant, solved by :func:`integrate_x` plus an integration constant.

Solutions are stored as rewrite rules so later equations are reduced by plain
normalization.  Unknowns listed in ``t_fields`` are the t-derivatives of known
fields; solving one of them produces an equation of motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from z22osp.gaussian import Gaussian
from z22osp.ring import EomSystem, Expr, GeneratorId, NotExact, Rule, _split_off, integrate_x


class UnderDetermined(RuntimeError):
    """Some unknowns were left free after all equations were used."""


class Inconsistent(RuntimeError):
    """An equation free of unknowns did not reduce to zero."""


@dataclass
class Equation:
    expr: Expr
    label: str


@dataclass
class LinearSolver:
    unknowns: list[str]
    t_fields: tuple[str, ...] = ()
    constants: dict = field(default_factory=dict)
    # called as hook(field_name, derivative_value) when integrate_x fails; returns X or raises
    antiderivative_hook: Callable[[str, Expr], Expr] | None = None
    base_rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        self.order = {name: k for k, name in enumerate(list(self.unknowns) + list(self.t_fields))}
        self.rules: dict[str, Rule] = {}
        self.pending: list[Equation] = []
        self.log: list[tuple[str, str, str]] = []  # (field, kind, equation label)
        self._system = EomSystem(self.base_rules)

    # -- bookkeeping
    def system(self) -> EomSystem:
        return self._system

    def _unknown(self, g: GeneratorId) -> bool:
        if g.kind != "jet" or g.field in self.rules:
            return False
        if g.field in self.t_fields:
            return g.b >= 1
        return g.field in self.order

    def reduce(self, p: Expr) -> Expr:
        return self._system.normalize(p)

    def _install(self, name: str, base: tuple, rhs: Expr, kind: str, label: str) -> None:
        self.rules[name] = Rule(name, base, rhs)
        self._system = EomSystem(list(self.base_rules) + list(self.rules.values()))
        self.log.append((name, kind, label))
        self.pending = [Equation(self.reduce(e.expr), e.label) for e in self.pending]
        self.pending = [e for e in self.pending if e.expr]

    # -- analysis of one equation
    def _linear_parts(self, p: Expr):
        """Map unknown generator -> coefficient Expr, plus the unknown-free remainder.

        Returns None when some monomial holds two unknowns.
        """
        parts: dict = {}
        known = {}
        for m, c in p.terms.items():
            hits = [g for g in m if self._unknown(g)]
            if not hits:
                known[m] = c
                continue
            if len(hits) > 1 or m.count(hits[0]) > 1:
                return None
            g = hits[0]
            sign, rest = _split_off(m, g)
            parts.setdefault(g, {})
            parts[g][rest] = parts[g].get(rest, Gaussian(0)) + c * sign
        return {g: Expr(t) for g, t in parts.items()}, Expr(known)

    def _find_pivot(self):
        best = None
        for idx, eq in enumerate(self.pending):
            lin = self._linear_parts(eq.expr)
            if lin is None:
                continue
            parts, known = lin
            if not parts:
                continue
            by_field: dict = {}
            for g in parts:
                by_field.setdefault(g.field, []).append(g)
            for name, gens in by_field.items():
                if len(gens) != 1:
                    continue
                g = gens[0]
                coef = parts[g]
                if not coef.is_constant():
                    continue
                base_b = 1 if name in self.t_fields else 0
                if g.a == 0 and g.b == base_b:
                    rest = eq.expr - Expr.gen(g) * coef
                    cand = (0, self.order[name], idx, "algebraic", g, coef, rest)
                elif g.a == 1 and g.b == base_b and len(parts) == 1:
                    cand = (1, self.order[name], idx, "differential", g, coef, known)
                else:
                    continue
                if best is None or cand[:3] < best[:3]:
                    best = cand
        return best

    # -- driver
    def add(self, equations: Iterable[tuple[Expr, str]]) -> None:
        for expr, label in equations:
            expr = self.reduce(expr)
            if expr:
                self.pending.append(Equation(expr, label))
        self.solve_pending()

    def solve_pending(self) -> None:
        while True:
            pivot = self.pending and self._find_pivot()
            if not pivot:
                return
            _, _, idx, kind, g, coef, rest = pivot
            label = self.pending[idx].label
            value = -rest / coef.constant_term()
            base = (0, 1 if g.field in self.t_fields else 0)
            if kind == "differential":
                try:
                    value = integrate_x(value)
                except NotExact:
                    if self.antiderivative_hook is None:
                        raise NotExact(f"{g.field} from {label}: {value}") from None
                    value = self.antiderivative_hook(g.field, value)
                value = value + Expr.coerce(self.constants.get(g.field, 0))
            self._install(g.field, base, value, kind, label)

    def finish(self, required: Iterable[str] | None = None) -> dict[str, Expr]:
        leftovers = [e for e in self.pending if e.expr]
        for e in leftovers:
            if self._linear_parts(e.expr) == ({}, e.expr):
                raise Inconsistent(f"{e.label}: {e.expr}")
        names = list(required) if required is not None else list(self.order)
        free = [n for n in names if n not in self.rules]
        if free or leftovers:
            detail = "; ".join(f"{e.label}: {e.expr}" for e in leftovers)
            raise UnderDetermined(f"free unknowns {free}; unused equations: {detail}")
        return self.solution(names)

    def solution(self, names: Iterable[str] | None = None) -> dict[str, Expr]:
        names = list(names) if names is not None else list(self.rules)
        return {n: self.reduce(self.rules[n].rhs) for n in names if n in self.rules}
