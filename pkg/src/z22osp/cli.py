"""Command-line driver: verifications, derivations and emitters.

Exit status: 0 when every check passes, 1 when a check fails, 2 on an internal
error (non-exact integration, underdetermined solve, guard trips).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Iterable

from z22osp import algebra, charges, lax, miura, rep6, systems
from z22osp.gaussian import Gaussian
from z22osp.emit import dumps, expr_to_latex
from z22osp.lax import AlgebraElement, Report
from z22osp.ring import Expr

WORKERS_ENV = "Z22OSP_WORKERS"


class Stream:
    """Writes PASS/FAIL lines as they are produced and keeps the tally for the summary."""

    def __init__(self, out):
        self.out = out
        self.results: list[tuple[str, bool]] = []

    def report(self, r: Report) -> None:
        self.results.append((r.name, r.ok))
        self.out.write(r.line() + "\n")
        if not r.ok and r.residual is not None:
            for line in _render(r.residual).splitlines():
                self.out.write(f"    {line}\n")
        self.out.flush()

    def summary(self, command: str) -> int:
        failed = [n for n, ok in self.results if not ok]
        data = {"command": command, "checks": len(self.results), "failed": failed, "status": "FAIL" if failed else "PASS"}
        self.out.write("SUMMARY " + json.dumps(data, sort_keys=True) + "\n")
        return 1 if failed else 0


def _render(obj) -> str:
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {_render(v)}" for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return "\n".join(_render(v) for v in obj)
    return str(obj)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- verify-algebra


def _jacobi_chunk(args: tuple[int, list]) -> list[tuple]:
    w, first = args
    return algebra.jacobi_sweep(w, [algebra.LoopGenerator(*g) for g in first])


def parallel_jacobi(mode_window: int, workers: int) -> list[tuple]:
    gens = algebra.window(mode_window)
    if workers <= 1:
        return algebra.jacobi_sweep(mode_window)
    chunks = [(mode_window, [tuple(g) for g in gens[k::workers]]) for k in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        found = [t for part in pool.map(_jacobi_chunk, chunks) for t in part]
    index = {g: k for k, g in enumerate(gens)}
    return sorted(found, key=lambda t: tuple(index[g] for g in t))


def algebra_reports(mode_window: int, workers: int = 1) -> Iterable[Report]:
    gens = algebra.window(mode_window)
    fails = parallel_jacobi(mode_window, workers)
    yield Report(f"graded Jacobi identity, |mode| <= {mode_window}, {len(gens) ** 3} triples", not fails, [" ".join(map(str, t)) for t in fails[:20]])
    for d in ("d00", "d11"):
        bad = [f"{x} {y}" for x, y in product(gens, gens) if not algebra.derivation_rule_holds(d, x, y)]
        yield Report(f"{d} is a graded derivation", not bad, bad[:20])
    bad = [str(x) for x in gens if not algebra.derivations_commute(x)]
    yield Report("[d11, d00] = 0", not bad, bad)
    bad = [str(x) for x in gens if algebra.grading_operator_act(x) != ({x: Gaussian(algebra.principal_grade(x))} if algebra.principal_grade(x) else {})]
    yield Report("principal grade is the eigenvalue of K0_0/2 + 2 d00", not bad, bad)
    bad = [
        f"{x} {y}"
        for x, y in product(gens, gens)
        if algebra.hom_f_linear(algebra.bracket(x, y)) != algebra.bracket(algebra.hom_f(x), algebra.hom_f(y))
    ]
    yield Report("principal-to-homogeneous map is a homomorphism", not bad, bad[:20])


# ---------------------------------------------------------------- verify-rep


def rep_reports(mode_window: int) -> Iterable[Report]:
    res = rep6.verify_rep(mode_window)
    yield Report(f"matrix brackets match the table, {res['pairs']} pairs", not res["mismatches"], res["mismatches"][:5])
    yield Report("representation respects the block grading", not res["block_grade_errors"], res["block_grade_errors"])
    diff = rep6.rep_element(rep6.kdv_lax_element()) - rep6.lax_matrix_kdv()
    yield Report("KdV Lax element in the representation", not diff, diff.to_text() if diff else None)


# ---------------------------------------------------------------- verify SYSTEM


def system_reports(system: str, source: str, mutations: bool) -> Iterable[Report]:
    if system in lax.NEGATIVE_CASES:
        yield lax.verify_negative_hierarchy(system, source)
        if system == "sinh":
            yield lax.change_variables_check()
        key = system if source == "printed" or system == "liouville" else f"{system}-general"
    elif system == "mkdv":
        yield lax.verify_mkdv()
        yield from lax.mkdv_reductions().values()
        key = "mkdv"
    else:
        yield miura.verify_kdv()
        yield from miura.kdv_reductions().values()
        key = "kdv"
    if mutations:
        m = systems.mutation_report(key)
        yield Report(
            f"mutation soundness {key}: {len(m.detected)} detected, {len(m.symmetries)} explained by vanishing brackets",
            m.ok,
            m.survivors,
        )


# ---------------------------------------------------------------- derive-mkdv


def derive_mkdv(fmt: str) -> tuple[list[Report], str]:
    sol = lax.solve_positive_hierarchy()
    diff = lax.compare_coefficients(sol.coefficients, lax.mkdv_printed_coefficients())
    printed = lax.mkdv_printed_eom()
    eom_diff = {r.field: r.rhs - printed.rules[r.field].rhs for r in sol.eom if r.rhs != printed.rules[r.field].rhs}
    reports = [
        Report("derived coefficients equal the reference table", not diff, diff),
        Report("derived equations of motion equal the reference system", not eom_diff, eom_diff),
        lax.verify_mkdv(sol.coefficients, sol.eom),
    ]
    items = list(sol.coefficients.items()) + [(f"d_t {r.field}", r.rhs) for r in sol.eom]
    return reports, _format_named(items, fmt)


def _format_named(items: list[tuple[str, Expr]], fmt: str) -> str:
    if fmt == "json":
        return dumps({k: v.to_json() for k, v in items})
    if fmt == "latex":
        return "\n".join(f"{k} &= {expr_to_latex(v)} \\\\" for k, v in items)
    return "\n".join(f"{k} = {v}" for k, v in items)


# ---------------------------------------------------------------- miura-check


def miura_reports() -> Iterable[Report]:
    yield miura.miura_factorization_check()
    yield miura.classical_miura_check()
    yield miura.riccati_form_check()
    d = miura.d00_f11_consistency()
    yield Report("d00 and f11 agree on both sides of the Miura map", not d, d)
    yield from miura.gauge_check().values()
    yield miura.verify_kdv()


# ---------------------------------------------------------------- charges


def charges_run(order: int, epsilon: int, system: str, fmt: str) -> tuple[list[Report], str]:
    col = charges.gamma_solve(order, epsilon)
    dens = [d for d in charges.extract_densities(col) if not d.density.is_constant()]
    eom = miura.kdv_eom() if system == "kdv" else lax.mkdv_printed_eom()
    if system == "mkdv":
        dens = [charges.map_charges_via_miura(d) for d in dens]
    reports = [Report("recursion residuals vanish at every power", not charges.column_residuals(col), charges.column_residuals(col))]
    for d in dens:
        if d.density:
            reports.append(Report(f"order {d.order} density is conserved under the {system} flow", charges.verify_conservation(d, eom)))
    nonzero = [d for d in dens if d.density]
    if fmt == "json":
        payload = dumps({"system": system, "epsilon": epsilon, "order": order, "densities": [d.to_json() for d in nonzero]})
    elif fmt == "latex":
        payload = "\n".join(f"Q^{{({d.order})}} &= \\int dx\\, \\left({expr_to_latex(d.density)}\\right) \\\\" for d in nonzero)
    else:
        payload = "\n".join(f"order {d.order} [{d.grade}]: {d.density}" for d in nonzero)
    return reports, payload


# ---------------------------------------------------------------- emit

EMITTABLE = ("bracket-table", "rep-matrices", "kdv-lax-matrix", "mkdv-coefficients", "mkdv-lax-pair")


def emit(what: str, fmt: str) -> str:
    if what == "bracket-table":
        if fmt == "latex":
            return algebra.bracket_table_latex()
        recs = algebra.structure_constants()
        if fmt == "json":
            return dumps(recs)
        return "\n".join(f"[{r['left']}_m, {r['right']}_n] -> {r['coeff']['re']}+{r['coeff']['im']}i {r['result']}_m+n" for r in recs)
    if what == "rep-matrices":
        mats = [(f, rep6.rep_matrix(algebra.LoopGenerator(f, 0))) for f in algebra.FAMILIES]
        if fmt == "json":
            return dumps({f: m.to_json() for f, m in mats})
        if fmt == "latex":
            return "\n\n".join(f"{algebra.LoopGenerator(f, 0).latex()} = {m.to_latex()}" for f, m in mats)
        return "\n\n".join(f"{f}_0:\n{m.to_text()}" for f, m in mats)
    if what == "kdv-lax-matrix":
        m = rep6.lax_matrix_kdv()
        return {"json": lambda: dumps(m.to_json()), "latex": m.to_latex, "text": m.to_text}[fmt]()
    if what == "mkdv-coefficients":
        return _format_named(list(lax.mkdv_printed_coefficients().items()), fmt)
    pair: list[tuple[str, AlgebraElement]] = [("L_x", lax.mkdv_lax_x()), ("L_t", lax.mkdv_lax_t(lax.mkdv_printed_coefficients()))]
    if fmt == "json":
        return dumps({k: v.to_json() for k, v in pair})
    if fmt == "latex":
        return "\n".join(f"\\mathcal{{L}}_{k[-1]} &= {v.to_latex()} \\\\" for k, v in pair)
    return "\n".join(f"{k} = {v}" for k, v in pair)


# ---------------------------------------------------------------- argument parsing


def _epsilon(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("epsilon must be 1 or -1")
    return v


def _order(text: str) -> int:
    v = int(text)
    if v < 2 or v % 2 or v > charges.MAX_ORDER_CAP:
        raise argparse.ArgumentTypeError(f"order must be even, between 2 and {charges.MAX_ORDER_CAP}")
    return v


def _window(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("mode window must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="z22osp", description="Exact checks for loop-extended Z2xZ2-graded osp(1|2) and its hierarchy.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-algebra", help="graded Jacobi sweep, derivations and gradations")
    s.add_argument("--mode-window", type=_window, default=2)

    s = sub.add_parser("verify-rep", help="6-dim matrix representation against the bracket table")
    s.add_argument("--mode-window", type=_window, default=3)

    s = sub.add_parser("verify", help="zero curvature of a Lax pair under its equations of motion")
    s.add_argument("system", choices=["liouville", "sinh", "cosh", "mkdv", "kdv"])
    s.add_argument("--source", choices=["printed", "general"], default="printed", help="for the Toda-type systems: reference equations or the general (k, l) system")
    s.add_argument("--mutations", action="store_true", help="also check that +1 perturbations are detected")

    sub.add_parser("derive-mkdv", help="solve the positive hierarchy grade by grade").add_argument(
        "--format", choices=["text", "latex", "json"], default="text"
    )
    sub.add_parser("miura-check", help="Miura factorization and gauge equivalence")

    s = sub.add_parser("charges", help="conserved densities from the Gamma recursion")
    s.add_argument("--order", type=_order, default=8)
    s.add_argument("--epsilon", type=_epsilon, default=1)
    s.add_argument("--system", choices=["kdv", "mkdv"], default="kdv")
    s.add_argument("--format", choices=["text", "latex", "json"], default="text")

    s = sub.add_parser("emit", help="render tables and Lax data")
    s.add_argument("what", choices=EMITTABLE)
    s.add_argument("--format", choices=["text", "latex", "json"], default="text")

    for name in ("derive-mkdv", "charges", "emit"):
        sub.choices[name].add_argument("--output", help="write the emitted document to this file instead of stdout")
    return p


def run(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    stream = Stream(out)
    payload = None
    reports: Iterable[Report]
    if args.command == "verify-algebra":
        reports = algebra_reports(args.mode_window, _workers())
    elif args.command == "verify-rep":
        reports = rep_reports(args.mode_window)
    elif args.command == "verify":
        reports = system_reports(args.system, args.source, args.mutations)
    elif args.command == "derive-mkdv":
        reports, payload = derive_mkdv(args.format)
    elif args.command == "miura-check":
        reports = miura_reports()
    elif args.command == "charges":
        reports, payload = charges_run(args.order, args.epsilon, args.system, args.format)
    else:
        reports, payload = [], emit(args.what, args.format)
    if payload is not None:
        if getattr(args, "output", None):
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
        else:
            out.write(payload + "\n")
    for r in reports:
        stream.report(r)
    return stream.summary(args.command)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except Exception as exc:  # internal errors map to exit status 2
        sys.stdout.flush()
        print(f"ERROR {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
