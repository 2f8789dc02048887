"""Registry of the verified flat pairs and their mutation probes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from z22osp.algebra import bracket

from z22osp.lax import (
    NEGATIVE_CASES,
    AlgebraElement,
    Report,
    build_negative_pair,
    curvature_residual,
    mkdv_lax_t,
    mkdv_lax_x,
    mkdv_printed_coefficients,
    mkdv_printed_eom,
    negative_eom,
)
from z22osp.miura import kdv_eom, kdv_lax_t, kdv_lax_x
from z22osp.ring import EomSystem, Expr, Rule


def _negative(case: str, source: str) -> Callable:
    def build():
        lp, lm = build_negative_pair(*NEGATIVE_CASES[case][0])
        return lp, lm, negative_eom(case, source)

    return build


SYSTEMS: dict[str, Callable[[], tuple[AlgebraElement, AlgebraElement, EomSystem]]] = {
    "liouville": _negative("liouville", "printed"),
    "sinh": _negative("sinh", "printed"),
    "cosh": _negative("cosh", "printed"),
    "sinh-general": _negative("sinh", "general"),
    "cosh-general": _negative("cosh", "general"),
    "mkdv": lambda: (mkdv_lax_x(), mkdv_lax_t(mkdv_printed_coefficients()), mkdv_printed_eom()),
    "kdv": lambda: (kdv_lax_x(), kdv_lax_t(), kdv_eom()),
}


def verify_system(name: str) -> Report:
    lp, lm, eom = SYSTEMS[name]()
    res = curvature_residual(lp, lm, eom)
    return Report(f"zero curvature {name}", not res, res)


def _bump(a: AlgebraElement, g) -> AlgebraElement:
    terms = dict(a.terms)
    terms[g] = terms.get(g, Expr()) + 1
    return AlgebraElement(terms)


def _central_shift(g, other: AlgebraElement) -> bool:
    """A constant shift of the g-coefficient cannot change F when g brackets to zero with every term of other.

    Decided from the bracket table alone, independently of the normalizer.
    """
    return all(not bracket(g, h) for h in other.terms)


@dataclass
class MutationReport:
    system: str
    detected: list[str]
    symmetries: list[str]  # survivors explained by a vanishing bracket
    survivors: list[str]  # unexplained: the normalizer missed a nonzero residual

    @property
    def ok(self) -> bool:
        return not self.survivors


def mutation_report(name: str) -> MutationReport:
    """Perturb each Lax coefficient and each even equation of motion by +1 and recompute F."""
    lp, lm, eom = SYSTEMS[name]()
    rep = MutationReport(name, [], [], [])
    for side, elem, other in (("Lp", lp, lm), ("Lm", lm, lp)):
        for g in elem.generators():
            pair = (_bump(lp, g), lm) if side == "Lp" else (lp, _bump(lm, g))
            label = f"{side}:{g}"
            if curvature_residual(pair[0], pair[1], eom):
                rep.detected.append(label)
            elif _central_shift(g, other):
                rep.symmetries.append(label)
            else:
                rep.survivors.append(label)
    for rule in eom:
        if rule.rhs and rule.rhs.is_homogeneous() and rule.rhs.grade().parity:
            continue  # +1 would break the grade of an odd field
        mutated = EomSystem([r if r.field != rule.field else Rule(r.field, r.base, r.rhs + 1) for r in eom])
        label = f"eom:{rule.field}"
        (rep.detected if curvature_residual(lp, lm, mutated) else rep.survivors).append(label)
    return rep
