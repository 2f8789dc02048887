"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import sys

import pytest

from z22osp.algebra import LoopGenerator
from z22osp.charges import charge_report, density_class, gamma_solve, graded_charge_checks, printed_relations
from z22osp.cli import parallel_jacobi
from z22osp.gaussian import Gaussian
from z22osp.lax import (
    Sigma00,
    Sigma11,
    compare_coefficients,
    compare_printed_with_general,
    mkdv_printed_coefficients,
    mkdv_printed_eom,
    mkdv_reductions,
    solve_positive_hierarchy,
    verify_mkdv,
    verify_negative_hierarchy,
)
from z22osp.miura import gauge_check, kdv_d00, kdv_eom, kdv_f11, kdv_lax_t, kdv_reductions, miura_factorization_check, verify_kdv
from z22osp.rep6 import matrix_graded_bracket, rep_matrix, verify_rep
from z22osp.ring import Expr, dx, jet, substitute_fields
from z22osp.systems import SYSTEMS, mutation_report, verify_system

I = Gaussian(0, 1)


def criterion_1() -> tuple[bool, str]:
    failures = parallel_jacobi(2, 1)
    return not failures, f"graded Jacobi, |mode| <= 2, {len(failures)} failing triples"


def criterion_2() -> tuple[bool, str]:
    rep = verify_rep(3)
    g = LoopGenerator.parse
    examples = [(g("Q+_1"), g("Q-_-3"), rep_matrix(g("K0_-2")))]
    for a, b, m, n in (("P+", "Q-", 2, -1), ("P-", "Q+", -3, 3)):
        examples.append((g(f"{a}_{m}"), g(f"{b}_{n}"), rep_matrix(g(f"L0_{m + n}")).scale(Expr.const(I))))
    ok_examples = all(matrix_graded_bracket(rep_matrix(x), x.grade, rep_matrix(y), y.grade) == want for x, y, want in examples)
    return rep["ok"] and ok_examples, f"matrix brackets vs table, {rep['pairs']} pairs, {len(rep['mismatches'])} mismatches"


def criterion_3() -> tuple[bool, str]:
    ok = {c: verify_negative_hierarchy(c, "printed").ok for c in ("liouville", "sinh", "cosh")}
    general = all(verify_negative_hierarchy(c, "general").ok for c in ("sinh", "cosh"))
    why = ""
    if not all(ok.values()):
        diffs = {c: sorted(compare_printed_with_general(c)) for c in ok if not ok[c]}
        why = f"; displayed rho sources have the wrong overall sign ({diffs}); general-(k,l) sources flat: {general}"
    return all(ok.values()), f"zero curvature liouville/sinh/cosh: {ok}{why}"


def criterion_4() -> tuple[bool, str]:
    sol = solve_positive_hierarchy()
    printed = mkdv_printed_coefficients()
    u, w, s0 = jet("u00"), jet("u11"), Sigma00()
    a00 = jet("u00", 2) - (u * u * u).scale(2) - (u * w * w).scale(6) + dx(s0).scale(3) + (u * s0).scale(6) + (w * Sigma11()).scale(6 * I)
    eom = mkdv_printed_eom()
    ok = (
        len(sol.coefficients) == 18
        and compare_coefficients(sol.coefficients, printed) == {}
        and sol.coefficients["a00"] == a00
        and sol.coefficients["eta01"] == jet("sigma01").scale(4)
        and all(r.rhs == eom.rules[r.field].rhs for r in sol.eom)
        and verify_mkdv().ok
    )
    return ok, "18 coefficients, flows and zero curvature of the mKdV pair"


def criterion_5() -> tuple[bool, str]:
    u = jet("u00")
    zero = {"u11": Expr(), "sigma10": Expr(), "sigma01": Expr()}
    classical = substitute_fields(mkdv_printed_eom().rules["u00"].rhs, zero) == jet("u00", 3) - (jet("u00", 1) * u * u).scale(6)
    U = jet("U00")
    zero_kdv = {"U11": Expr(), "sigma10": Expr(), "sigma01": Expr()}
    classical_kdv = substitute_fields(kdv_eom().rules["U00"].rhs, zero_kdv) == jet("U00", 3) - (U * jet("U00", 1)).scale(6)
    reports = [*mkdv_reductions().values(), *kdv_reductions().values()]
    return classical and classical_kdv and all(r.ok for r in reports), "classical and super reductions of mKdV and KdV"


def criterion_6() -> tuple[bool, str]:
    r = miura_factorization_check()
    return r.ok, "Miura operator identities off-shell"


def criterion_7() -> tuple[bool, str]:
    reports = gauge_check()
    t = kdv_lax_t()
    coeffs = (
        kdv_d00() == (-jet("U00") + Sigma00().scale(3)).scale(2)
        and kdv_f11() == (-jet("U11") + Sigma11().scale(3 * I)).scale(2)
        and kdv_d00() in t.terms.values()
    )
    ok = all(r.ok for r in reports.values()) and coeffs and verify_kdv().ok
    return ok, f"gauge transform term-by-term {[k for k, r in reports.items() if r.ok]}, KdV zero curvature"


ITEMIZED = [
    "Gamma12^(0) = eps",
    "Gamma12^(2) = 0",
    "2 eps Gamma12^(4)",
    "Gamma42^(4) closed form",
    "Gamma52^(1)",
    "Gamma62^(1)",
    "Gamma52^(3)",
    "Gamma62^(3)",
    "eps Gamma52^(5)",
    "eps Gamma62^(5)",
    "eps Gamma52^(7)",
    "eps Gamma62^(7)",
    "2 eps Gamma12^(8)",
]


def criterion_8() -> tuple[bool, str]:
    ok, notes = True, []
    for eps in (1, -1):
        col = gamma_solve(8, eps)
        rel = printed_relations(col)
        ok &= all(not rel[k] for k in ITEMIZED)
        # the closed form of Gamma12^(8) carries the stated local part minus a total derivative
        U0, U1 = jet("U00"), jet("U11")
        local = (
            (U0 * U0 + U1 * U1).scale(Gaussian(-1, 0) / 4)
            + (U0 * Sigma00() + (U1 * Sigma11()).scale(I)).scale(Gaussian(3, 0) / 2)
            + jet("sigma10", 2) * jet("sigma10", 1)
            + jet("sigma01", 2) * jet("sigma01", 1)
        )
        ok &= not density_class(col.get(1, 8).scale(2 * eps) - local)
        off = {k: v for k, v in rel.items() if v and k not in ITEMIZED}
        ok &= all(v == dx(Sigma11()).scale(-2 * I) for v in off.values())
        if off:
            notes.append(f"eps={eps}: intermediate relation {sorted(off)} holds only with -i Sigma11' in place of +i Sigma11'")
    return ok, "Gamma recursion to lambda^-8, both signs of eps" + ("; " + "; ".join(notes) if notes else "")


def criterion_9() -> tuple[bool, str]:
    reports = charge_report(gamma_solve(8, 1))
    bad = [k for k, r in reports.items() if not r.ok]
    return not bad, f"densities Q4, Q8, conservation and Miura images ({len(reports) - len(bad)}/{len(reports)})"


def criterion_10() -> tuple[bool, str]:
    reports = graded_charge_checks()
    return all(r.ok for r in reports.values()), "u11 conserved under mKdV; U11 - i Sigma11 is a total derivative"


def criterion_11() -> tuple[bool, str]:
    flat = [n for n in SYSTEMS if verify_system(n).ok]
    reps = [mutation_report(n) for n in flat]
    detected = sum(len(r.detected) for r in reps)
    sym = [s for r in reps for s in r.symmetries]
    survivors = [(r.system, s) for r in reps for s in r.survivors]
    # a survivor is allowed only when its generator brackets to zero with the whole other operator
    return not survivors and detected > 0, f"{detected} perturbations detected over {flat}; central shifts {sym}; unexplained {survivors}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("n", range(1, 12))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


def main() -> int:
    failed = 0
    for n, crit in enumerate(CRITERIA, 1):
        ok, detail = crit()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
