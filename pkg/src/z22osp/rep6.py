"""Six-dimensional graded representation with spectral parameter lambda."""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping

from z22osp.algebra import FAMILIES, LoopGenerator, bracket
from z22osp.gaussian import Gaussian
from z22osp.grading import G00, G01, G10, G11, Grade, grade_add, grade_sign
from z22osp.ring import Expr, jet

N = 6

# grade of each basis vector; a matrix unit E_ij has grade ROW_GRADES[i] + ROW_GRADES[j]
ROW_GRADES: tuple[Grade, ...] = (G00, G00, G11, G11, G10, G01)


class LaurentMatrix:
    """Sparse 6x6 matrix whose entries are Laurent polynomials in lambda with Expr coefficients.

    ``entries`` maps (row, col) (0-based) to {power: Expr}; zero entries are absent.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping | None = None):
        clean: dict = {}
        for key, poly in (entries or {}).items():
            poly = {p: Expr.coerce(c) for p, c in poly.items() if c}
            if poly:
                clean[key] = poly
        self.entries = clean

    @classmethod
    def zero(cls) -> LaurentMatrix:
        return cls()

    @classmethod
    def constant(cls, rows: Iterable[Iterable], power: int = 0) -> LaurentMatrix:
        entries = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = {power: Expr.const(v)}
        return cls(entries)

    def entry(self, i: int, j: int) -> dict:
        return dict(self.entries.get((i, j), {}))

    def __add__(self, other: LaurentMatrix) -> LaurentMatrix:
        out = {k: dict(v) for k, v in self.entries.items()}
        for key, poly in other.entries.items():
            tgt = out.setdefault(key, {})
            for p, c in poly.items():
                tgt[p] = tgt.get(p, Expr()) + c
        return LaurentMatrix(out)

    def __neg__(self) -> LaurentMatrix:
        return LaurentMatrix({k: {p: -c for p, c in v.items()} for k, v in self.entries.items()})

    def __sub__(self, other: LaurentMatrix) -> LaurentMatrix:
        return self + (-other)

    def scale(self, factor) -> LaurentMatrix:
        f = Expr.coerce(factor)
        return LaurentMatrix({k: {p: f * c for p, c in v.items()} for k, v in self.entries.items()})

    def shift(self, power: int) -> LaurentMatrix:
        """Multiply by lambda**power."""
        return LaurentMatrix({k: {p + power: c for p, c in v.items()} for k, v in self.entries.items()})

    def __matmul__(self, other: LaurentMatrix) -> LaurentMatrix:
        by_row: dict = {}
        for (k, j), poly in other.entries.items():
            by_row.setdefault(k, []).append((j, poly))
        out: dict = {}
        for (i, k), left in self.entries.items():
            for j, right in by_row.get(k, ()):
                tgt = out.setdefault((i, j), {})
                for p, a in left.items():
                    for q, b in right.items():
                        tgt[p + q] = tgt.get(p + q, Expr()) + a * b
        return LaurentMatrix(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(frozenset((k, frozenset(v.items())) for k, v in self.entries.items()))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def powers(self) -> set[int]:
        return {p for v in self.entries.values() for p in v}

    def __repr__(self) -> str:
        return f"LaurentMatrix({self.to_text()})"

    # -- rendering
    def to_text(self) -> str:
        rows = []
        for i in range(N):
            rows.append("[" + ", ".join(_poly_text(self.entries.get((i, j), {})) for j in range(N)) + "]")
        return "[" + ", ".join(rows) + "]"

    def to_json(self) -> list:
        return [
            [{str(p): c.to_json() for p, c in sorted(self.entries.get((i, j), {}).items())} for j in range(N)]
            for i in range(N)
        ]

    @classmethod
    def from_json(cls, data: list) -> LaurentMatrix:
        return cls(
            {(i, j): {int(p): Expr.from_json(c) for p, c in cell.items()} for i, row in enumerate(data) for j, cell in enumerate(row)}
        )

    def to_latex(self) -> str:
        from z22osp.emit import expr_to_latex

        lines = []
        for i in range(N):
            cells = []
            for j in range(N):
                poly = self.entries.get((i, j), {})
                cells.append(_poly_latex(poly, expr_to_latex) if poly else "0")
            lines.append("\t" + " & ".join(cells))
        return "\\begin{pmatrix}\n" + " \\\\\n".join(lines) + "\n\\end{pmatrix}"


def _poly_text(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for p, c in sorted(poly.items(), reverse=True):
        lam = "" if p == 0 else ("lam" if p == 1 else f"lam^{p}")
        body = str(c)
        if lam:
            body = lam if body == "1" else f"{lam}*({body})"
        parts.append(body)
    return " + ".join(parts)


def _poly_latex(poly: dict, render) -> str:
    parts = []
    for p, c in sorted(poly.items(), reverse=True):
        lam = "" if p == 0 else ("\\lambda" if p == 1 else f"\\lambda^{{{p}}}")
        body = render(c)
        if not lam:
            parts.append(body)
        elif body == "1":
            parts.append(lam)
        elif body == "-1":
            parts.append("-" + lam)
        elif len(c) == 1 and not body.startswith("-"):
            parts.append(f"{lam} {body}")
        else:
            parts.append(f"{lam} ({body})")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------- generator matrices

i = Gaussian(0, 1)
_SP = ((0, 1), (0, 0))
_SM = ((0, 0), (1, 0))
_S3 = ((1, 0), (0, -1))
_S11 = ((1, 0), (0, 0))
_S22 = ((0, 0), (0, 1))
_Z = ((0, 0), (0, 0))


def _scaled(c, block):
    return tuple(tuple(c * v for v in row) for row in block)


def _blocks(grid) -> tuple:
    """Assemble a 3x3 grid of 2x2 blocks into a 6x6 constant table."""
    rows = []
    for bi in range(3):
        for r in range(2):
            row = []
            for bj in range(3):
                row.extend(grid[bi][bj][r])
            rows.append(tuple(row))
    return tuple(rows)


MODE0_MATRICES: dict[str, tuple] = {
    "K0": tuple(tuple((v if a == b else 0) for b in range(N)) for a, v in enumerate((1, -1, 1, -1, 0, 0))),
    "K+": _blocks(((_SP, _Z, _Z), (_Z, _SP, _Z), (_Z, _Z, _Z))),
    "K-": _blocks(((_SM, _Z, _Z), (_Z, _SM, _Z), (_Z, _Z, _Z))),
    "L0": _blocks(((_Z, _S3, _Z), (_S3, _Z, _Z), (_Z, _Z, _Z))),
    "L+": _blocks(((_Z, _SP, _Z), (_SP, _Z, _Z), (_Z, _Z, _Z))),
    "L-": _blocks(((_Z, _SM, _Z), (_SM, _Z, _Z), (_Z, _Z, _Z))),
    # the (3,3) block of P+ is left blank where it is printed; zero is what the brackets require
    "P+": _blocks(((_Z, _Z, _S11), (_Z, _Z, _scaled(i, _SP)), (_SP, _scaled(-i, _S22), _Z))),
    "P-": _blocks(((_Z, _Z, _scaled(-1, _SM)), (_Z, _Z, _scaled(-i, _S22)), (_S11, _scaled(-i, _SM), _Z))),
    "Q+": _blocks(((_Z, _Z, _SP), (_Z, _Z, _scaled(-i, _S11)), (_S22, _scaled(i, _SP), _Z))),
    "Q-": _blocks(((_Z, _Z, _scaled(-1, _S22)), (_Z, _Z, _scaled(i, _SM)), (_SM, _scaled(i, _S11), _Z))),
}


def rep_matrix(x: LoopGenerator) -> LaurentMatrix:
    """Mode-zero matrix of the family times lambda**mode."""
    return LaurentMatrix.constant(MODE0_MATRICES[x.family], power=x.mode)


def matrix_graded_bracket(a: LaurentMatrix, ga: Grade, b: LaurentMatrix, gb: Grade) -> LaurentMatrix:
    """AB - (-1)^{a.b} BA."""
    ab, ba = a @ b, b @ a
    return ab - ba if grade_sign(ga, gb) == 1 else ab + ba


def rep_bracket_result(result: dict) -> LaurentMatrix:
    out = LaurentMatrix()
    for g, c in result.items():
        out = out + rep_matrix(g).scale(Expr.const(c))
    return out


def rep_element(terms: Iterable[tuple[Expr, LoopGenerator]]) -> LaurentMatrix:
    """Representation of sum c * X with ring coefficients.

    Moving c past the basis vector of row r costs grade_sign(grade c, grade r), so
    that matrix products reproduce the algebra bracket on total-grade [00] elements.
    """
    entries: dict = {}
    for coef, x in terms:
        coef = Expr.coerce(coef)
        if not coef:
            continue
        gc = coef.grade()
        for (r, col), poly in rep_matrix(x).entries.items():
            s = grade_sign(gc, ROW_GRADES[r])
            tgt = entries.setdefault((r, col), {})
            for p, v in poly.items():
                tgt[p] = tgt.get(p, Expr()) + (coef * v).scale(s)
    return LaurentMatrix(entries)


def block_grade(i: int, j: int) -> Grade:
    return grade_add(ROW_GRADES[i], ROW_GRADES[j])


def respects_block_grades(m: LaurentMatrix, grade: Grade) -> bool:
    """True when every nonzero entry sits where a constant generator of this grade may sit."""
    return all(block_grade(i, j) == grade for (i, j) in m.entries)


def verify_rep(mode_window: int) -> dict:
    """Compare matrix brackets with the algebra bracket on all pairs |mode| <= window."""
    gens = [LoopGenerator(f, m) for m in range(-mode_window, mode_window + 1) for f in FAMILIES]
    mats = {g: rep_matrix(g) for g in gens}
    mismatches = []
    checked = 0
    for x, y in product(gens, gens):
        lhs = matrix_graded_bracket(mats[x], x.grade, mats[y], y.grade)
        rhs = rep_bracket_result(bracket(x, y))
        checked += 1
        if lhs != rhs:
            mismatches.append({"left": str(x), "right": str(y), "matrix": lhs.to_text(), "table": rhs.to_text()})
    grade_errors = [f for f in FAMILIES if not respects_block_grades(rep_matrix(LoopGenerator(f, 0)), LoopGenerator(f, 0).grade)]
    return {"pairs": checked, "mismatches": mismatches, "block_grade_errors": grade_errors, "ok": not mismatches and not grade_errors}


# ---------------------------------------------------------------- KdV Lax matrix


def kdv_lax_element() -> list[tuple[Expr, LoopGenerator]]:
    """L_x of the graded KdV system in the homogeneous gradation."""
    return [
        (jet("U00"), LoopGenerator("K+", -2)),
        (jet("U11"), LoopGenerator("L+", -2)),
        (jet("sigma10"), LoopGenerator("P+", 1)),
        (jet("sigma01"), LoopGenerator("Q+", 1)),
        (Expr.const(1), LoopGenerator("K+", 2)),
        (Expr.const(1), LoopGenerator("K-", 2)),
    ]


def lax_matrix_kdv() -> LaurentMatrix:
    """The printed KdV Lax matrix, entered entry by entry (0-based indices)."""
    U00, U11 = jet("U00"), jet("U11")
    s10, s01 = jet("sigma10"), jet("sigma01")
    one = Expr.const(1)
    ii = Expr.const(i)
    return LaurentMatrix(
        {
            (0, 1): {2: one, -2: U00},
            (0, 3): {-2: U11},
            (0, 4): {1: s10},
            (0, 5): {1: s01},
            (1, 0): {2: one},
            (2, 1): {-2: U11},
            (2, 3): {2: one, -2: U00},
            (2, 4): {1: ii * s01},
            (2, 5): {1: -ii * s10},
            (3, 2): {2: one},
            (4, 1): {1: -s10},
            (4, 3): {1: ii * s01},
            (5, 1): {1: -s01},
            (5, 3): {1: -ii * s10},
        }
    )
