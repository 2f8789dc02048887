"""Independent reference computations used by the tests.

Nothing here calls the engine's integration or Euler routines; the only engine
pieces used are ring multiplication and differentiation.
"""

from __future__ import annotations

from itertools import combinations_with_replacement

from z22osp.gaussian import Gaussian
from z22osp.ring import Expr, dx, jet


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def ansatz_basis(p: Expr) -> list[Expr]:
    """Every differential monomial that could have d_x-image overlapping a term of p.

    For each term: same multiset of fields, one fewer x-derivative in total.
    """
    seen: set = set()
    basis = []
    for mono in p.terms:
        fields = sorted(g.field for g in mono)
        order = sum(g.a for g in mono)
        if order == 0:
            continue
        for split in _compositions(order - 1, len(fields)):
            key = tuple(sorted(zip(fields, split)))
            if key in seen:
                continue
            seen.add(key)
            e = Expr.const(1)
            for f, a in key:
                e = e * jet(f, a)
            if e:
                basis.append(e)
    return basis


def solve_linear(rows: list[list[Gaussian]], rhs: list[Gaussian]) -> list[Gaussian] | None:
    """Exact Gaussian elimination; any solution of rows * x = rhs, or None if inconsistent."""
    n = len(rows[0]) if rows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Gaussian(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in m[r:]):
        return None
    x = [Gaussian(0)] * n
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return x


def brute_force_antiderivative(p: Expr) -> Expr | None:
    """q with d_x q = p found by a linear solve over the ansatz basis, or None."""
    if not p:
        return Expr()
    basis = ansatz_basis(p)
    images = [dx(b) for b in basis]
    monos = sorted(set(p.terms).union(*(set(i.terms) for i in images)))
    rows = [[img.terms.get(mo, Gaussian(0)) for img in images] for mo in monos]
    rhs = [p.terms.get(mo, Gaussian(0)) for mo in monos]
    if not basis:
        return None
    sol = solve_linear(rows, rhs)
    if sol is None:
        return None
    out = Expr()
    for c, b in zip(sol, basis):
        out = out + b.scale(c)
    return out


def total_derivative_by_ansatz(p: Expr) -> bool:
    return brute_force_antiderivative(p) is not None


def all_monomials(fields: list[str], max_order: int, degree: int) -> list[Expr]:
    gens = [jet(f, a) for f in fields for a in range(max_order + 1)]
    out = []
    for combo in combinations_with_replacement(range(len(gens)), degree):
        e = Expr.const(1)
        for k in combo:
            e = e * gens[k]
        if e:
            out.append(e)
    return out
