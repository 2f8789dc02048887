"""Loop extension of Z2xZ2-graded osp(1|2): generators, bracket, derivations, gradations.

The algebra admits two central extensions (one [00], one [11]) which commute
with everything, derivations included.  Nothing downstream uses them, so the
bracket here never produces a central term.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import NamedTuple

from z22osp.gaussian import Gaussian
from z22osp.grading import G00, G01, G10, G11, Grade, grade_sign

FAMILIES = ("K0", "K+", "K-", "L0", "L+", "L-", "P+", "P-", "Q+", "Q-")
_FAMILY_INDEX = {f: i for i, f in enumerate(FAMILIES)}
_FAMILY_GRADE = {"K": G00, "L": G11, "P": G10, "Q": G01}


class LoopGenerator(NamedTuple):
    family: str
    mode: int

    @property
    def grade(self) -> Grade:
        return _FAMILY_GRADE[self.family[0]]

    def __str__(self) -> str:
        return f"{self.family}_{self.mode}"

    def latex(self) -> str:
        letter, sup = self.family[0], self.family[1]
        return f"{letter}^{{{sup}}}_{{{self.mode}}}"

    @classmethod
    def parse(cls, text: str) -> LoopGenerator:
        fam, _, mode = text.partition("_")
        if fam not in _FAMILY_INDEX:
            raise ValueError(f"unknown family {fam!r}")
        return cls(fam, int(mode))


def K0(m: int = 0) -> LoopGenerator:
    return LoopGenerator("K0", m)


def gen(name: str, m: int = 0) -> LoopGenerator:
    return LoopGenerator(name, m)


BracketResult = dict  # LoopGenerator -> Gaussian, zero coefficients absent

i = Gaussian(0, 1)

# Non-vanishing relations, each read as [[A_m, B_n]] = sum coef * C_{m+n}.
_RELATIONS = [
    # g_[0] sector
    ("K0", "K+", 2, "K+"), ("K0", "K-", -2, "K-"),
    ("K+", "K-", 1, "K0"),
    ("L0", "L+", 2, "K+"), ("L0", "L-", -2, "K-"),
    ("L+", "L-", 1, "K0"),
    ("K0", "L+", 2, "L+"), ("K0", "L-", -2, "L-"),
    ("K+", "L-", 1, "L0"), ("K-", "L+", -1, "L0"),
    ("L0", "K+", 2, "L+"), ("L0", "K-", -2, "L-"),
    # g_[0] with g_[1]
    ("K0", "P+", 1, "P+"), ("K0", "P-", -1, "P-"),
    ("K+", "P-", -1, "P+"), ("K-", "P+", -1, "P-"),
    ("K0", "Q+", 1, "Q+"), ("K0", "Q-", -1, "Q-"),
    ("K+", "Q-", -1, "Q+"), ("K-", "Q+", -1, "Q-"),
    ("L0", "P+", i, "Q+"), ("L0", "P-", -i, "Q-"),
    ("L-", "P+", -i, "Q-"), ("L+", "P-", -i, "Q+"),
    ("L0", "Q+", -i, "P+"), ("L0", "Q-", i, "P-"),
    ("L-", "Q+", i, "P-"), ("L+", "Q-", i, "P+"),
    # g_[1] sector
    ("P+", "P+", 2, "K+"), ("P-", "P-", -2, "K-"),
    ("P+", "P-", 1, "K0"),
    ("P+", "Q+", 2 * i, "L+"), ("P-", "Q-", -2 * i, "L-"),
    ("P+", "Q-", i, "L0"), ("P-", "Q+", i, "L0"),
    ("Q+", "Q+", 2, "K+"), ("Q-", "Q-", -2, "K-"),
    ("Q+", "Q-", 1, "K0"),
]


def _family_grade(fam: str) -> Grade:
    return _FAMILY_GRADE[fam[0]]


def _build_table() -> dict:
    table: dict = {}
    for a, b, coef, c in _RELATIONS:
        coef = Gaussian.coerce(coef)
        if _FAMILY_INDEX[a] > _FAMILY_INDEX[b]:
            coef = coef * (-grade_sign(_family_grade(a), _family_grade(b)))
            a, b = b, a
        entry = table.setdefault((a, b), {})
        if c in entry and entry[c] != coef:
            raise AssertionError(f"conflicting relation for ({a}, {b})")
        entry[c] = coef
    return table


# one-sided: keys (A, B) with A not after B in FAMILIES
BRACKET_TABLE = _build_table()


@lru_cache(maxsize=None)
def _bracket(x: LoopGenerator, y: LoopGenerator) -> tuple:
    fx, fy = x.family, y.family
    m = x.mode + y.mode
    if _FAMILY_INDEX[fx] <= _FAMILY_INDEX[fy]:
        entry = BRACKET_TABLE.get((fx, fy), {})
        return tuple((LoopGenerator(c, m), coef) for c, coef in entry.items())
    entry = BRACKET_TABLE.get((fy, fx), {})
    s = -grade_sign(x.grade, y.grade)
    return tuple((LoopGenerator(c, m), coef * s) for c, coef in entry.items())


def bracket(x: LoopGenerator, y: LoopGenerator) -> BracketResult:
    """Graded bracket of two loop generators; unlisted pairs give {}."""
    return dict(_bracket(x, y))


def _accumulate(acc: dict, terms, factor) -> None:
    for g, c in terms:
        v = acc.get(g, Gaussian(0)) + c * factor
        if v:
            acc[g] = v
        else:
            acc.pop(g, None)


def bracket_linear(u: dict, v: dict) -> dict:
    """Bilinear extension to constant-coefficient combinations."""
    acc: dict = {}
    for x, a in u.items():
        for y, b in v.items():
            _accumulate(acc, _bracket(x, y), a * b)
    return acc


def jacobi_terms(a: LoopGenerator, b: LoopGenerator, c: LoopGenerator) -> dict:
    ga, gb, gc = a.grade, b.grade, c.grade
    acc: dict = {}
    for (p, q, r), s in (
        ((a, b, c), grade_sign(ga, gc)),
        ((b, c, a), grade_sign(gb, ga)),
        ((c, a, b), grade_sign(gc, gb)),
    ):
        inner = bracket(q, r)
        _accumulate(acc, bracket_linear({p: Gaussian(1)}, inner).items(), s)
    return acc


def jacobi_check(a: LoopGenerator, b: LoopGenerator, c: LoopGenerator) -> bool:
    return not jacobi_terms(a, b, c)


def window(mode_window: int) -> list[LoopGenerator]:
    return [LoopGenerator(f, m) for m in range(-mode_window, mode_window + 1) for f in FAMILIES]


def jacobi_sweep(mode_window: int, first: list[LoopGenerator] | None = None) -> list[tuple]:
    """All failing triples with |mode| <= mode_window (optionally a slice of first entries)."""
    gens = window(mode_window)
    failures = []
    for a in first if first is not None else gens:
        for b, c in product(gens, gens):
            if not jacobi_check(a, b, c):
                failures.append((a, b, c))
    return failures


# ---------------------------------------------------------------- derivations

_D11 = {
    "K0": (1, "L0"), "L0": (1, "K0"),
    "K+": (1, "L+"), "K-": (1, "L-"),
    "L+": (1, "K+"), "L-": (1, "K-"),
    "P+": (i, "Q+"), "P-": (i, "Q-"),
    "Q+": (-i, "P+"), "Q-": (-i, "P-"),
}

DERIVATION_GRADE = {"d00": G00, "d11": G11}


def derivation_act(d: str, x: LoopGenerator) -> BracketResult:
    """Action of the derivation d00 (mode counting) or d11 on a generator."""
    if not x.mode:
        return {}
    if d == "d00":
        return {x: Gaussian(x.mode)}
    if d == "d11":
        coef, fam = _D11[x.family]
        return {LoopGenerator(fam, x.mode): Gaussian.coerce(coef) * x.mode}
    raise ValueError(f"unknown derivation {d!r}")


def derivation_linear(d: str, u: dict) -> dict:
    acc: dict = {}
    for x, a in u.items():
        _accumulate(acc, derivation_act(d, x).items(), a)
    return acc


def derivation_rule_holds(d: str, x: LoopGenerator, y: LoopGenerator) -> bool:
    """d([[x, y]]) == [[d x, y]] + (-1)^{d.x} [[x, d y]]."""
    lhs = derivation_linear(d, bracket(x, y))
    rhs = bracket_linear(derivation_act(d, x), {y: Gaussian(1)})
    s = grade_sign(DERIVATION_GRADE[d], x.grade)
    _accumulate(rhs, bracket_linear({x: Gaussian(1)}, derivation_act(d, y)).items(), s)
    return lhs == rhs


def derivations_commute(x: LoopGenerator) -> bool:
    """[d11, d00] = 0 evaluated on x."""
    a = derivation_linear("d11", derivation_act("d00", x))
    b = derivation_linear("d00", derivation_act("d11", x))
    return a == b


# ---------------------------------------------------------------- gradations


def principal_grade(x: LoopGenerator) -> Fraction:
    """Eigenvalue of K0_0/2 + 2 d00 on x."""
    m = Fraction(x.mode)
    fam = x.family
    if fam[1] == "0":
        return 2 * m
    if fam[0] in "PQ":
        return 2 * m + (Fraction(1, 2) if fam[1] == "+" else Fraction(-1, 2))
    return 2 * m + (1 if fam[1] == "+" else -1)


def grading_operator_act(x: LoopGenerator) -> dict:
    """[K0_0/2 + 2 d00, x] computed from the bracket and the derivation."""
    acc = {g: c * Fraction(1, 2) for g, c in bracket(LoopGenerator("K0", 0), x).items()}
    _accumulate(acc, derivation_act("d00", x).items(), 2)
    return acc


def hom_f(x: LoopGenerator) -> LoopGenerator:
    """Injective map from the principal to the homogeneous gradation."""
    fam, m = x.family, x.mode
    if fam[1] == "0":
        return LoopGenerator(fam, 4 * m)
    if fam[0] in "PQ":
        return LoopGenerator(fam, 4 * m + (1 if fam[1] == "+" else -1))
    if fam[1] == "+":
        return LoopGenerator(fam, 4 * m + 2)
    return LoopGenerator(fam, 4 * m - 2)


def hom_f_linear(u: dict) -> dict:
    return {hom_f(x): c for x, c in u.items()}


# ---------------------------------------------------------------- emitters


def structure_constants() -> list[dict]:
    """One-sided table as JSON-ready records (mode offset is always m + n)."""
    out = []
    for (a, b), entry in sorted(BRACKET_TABLE.items(), key=lambda kv: (_FAMILY_INDEX[kv[0][0]], _FAMILY_INDEX[kv[0][1]])):
        for c, coef in sorted(entry.items()):
            out.append({"left": a, "right": b, "result": c, "mode_offset": "m+n", "coeff": coef.to_json()})
    return out


def bracket_table_latex() -> str:
    lines = [r"\begin{alignat}{3}"]
    rows = []
    for (a, b), entry in sorted(BRACKET_TABLE.items(), key=lambda kv: (_FAMILY_INDEX[kv[0][0]], _FAMILY_INDEX[kv[0][1]])):
        ga, gb = _family_grade(a), _family_grade(b)
        op = ("[", "]") if grade_sign(ga, gb) == 1 else (r"\{", r"\}")
        rhs = " + ".join(f"{_coef_latex(c)}{LoopGenerator(f, 0).latex().replace('_{0}', '_{m+n}')}" for f, c in sorted(entry.items()))
        la = LoopGenerator(a, 0).latex().replace("_{0}", "_m")
        lb = LoopGenerator(b, 0).latex().replace("_{0}", "_n")
        rows.append(f"{op[0]} {la}, {lb} {op[1]} &= {rhs}")
    for k in range(0, len(rows), 3):
        chunk = rows[k : k + 3]
        lines.append(", &\\qquad ".join(chunk) + (r" \nonumber \\" if k + 3 < len(rows) else ""))
    lines.append(r"\end{alignat}")
    return "\n".join(lines)


def _coef_latex(c: Gaussian) -> str:
    if c == 1:
        return ""
    if c == -1:
        return "-"
    if c.im and not c.re:
        mag = abs(c.im)
        return ("-" if c.im < 0 else "") + ("" if mag == 1 else str(mag)) + "i "
    return f"{c} "
