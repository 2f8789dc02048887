"""Graded-commutative differential ring of field jets.

Every dynamical quantity lives here: jets of the fields, the transcendental
generators ``exp(k*phi00)``, ``cosh(k*phi11)``, ``sinh(k*phi11)``, chiral
symbols annihilated by the first derivation, and formal antiderivatives.

Two derivations act on the ring.  Index 0 is ``d_+`` (read as ``d_x`` in the
mKdV/KdV setting), index 1 is ``d_-`` (``d_t``).  A jet records how many times
each one has been applied, so mixed partials commute by construction.

An :class:`Expr` is a finite map from canonical monomials to Gaussian
rational coefficients.  A monomial is a sorted tuple of generators, repeated
for multiplicity; the sign from graded reordering is absorbed into the
coefficient and monomials repeating an odd generator are dropped.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

from z22osp.gaussian import ONE, Gaussian
from z22osp.grading import G00, Grade, grade_of_suffix

PLUS = X = 0
MINUS = T = 1

TRANSCENDENTAL = ("cosh", "exp", "sinh")


class NotExact(ValueError):
    """The expression is not a total x-derivative reachable by the integrator."""


class EomDivergence(RuntimeError):
    """Normalization did not terminate: the rewrite rules are mis-oriented."""


class GeneratorId(NamedTuple):
    """One ring generator.  Tuple order is the canonical generator order."""

    field: str
    kind: str  # antider | chiral | cosh | exp | jet | sinh
    a: int = 0  # applications of d_+ / d_x
    b: int = 0  # applications of d_- / d_t
    param: Fraction = Fraction(0)
    grade: Grade = G00

    @property
    def odd(self) -> bool:
        return (self.grade[0] + self.grade[1]) % 2 == 1

    @property
    def order(self) -> int:
        return self.a

    def shifted(self, direction: int) -> GeneratorId:
        if direction == 0:
            return self._replace(a=self.a + 1)
        return self._replace(b=self.b + 1)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "field": self.field,
            "index": [self.a, self.b],
            "param": str(self.param),
            "grade": str(self.grade),
        }

    @classmethod
    def from_json(cls, data: dict) -> GeneratorId:
        a, b = data["index"]
        return cls(
            data["field"], data["kind"], int(a), int(b), Fraction(data["param"]), Grade.parse(data["grade"])
        )


Monomial = tuple  # tuple[GeneratorId, ...], sorted, repeats for multiplicity


def field_grade(field: str) -> Grade:
    return grade_of_suffix(field)


# ---------------------------------------------------------------- registry

_antiderivatives: dict[str, tuple[Grade, Expr]] = {}
_registry_lock = threading.Lock()


def new_antiderivative(name: str, grade: Grade, defining: Expr) -> GeneratorId:
    """Register a formal symbol ``W`` with ``d_x W = defining``."""
    with _registry_lock:
        if name in _antiderivatives:
            raise ValueError(f"antiderivative {name!r} already registered")
        if not defining.is_homogeneous(grade):
            raise ValueError(f"defining expression of {name!r} is not homogeneous of grade {grade}")
        _antiderivatives[name] = (grade, defining)
    return GeneratorId(name, "antider", 0, 0, Fraction(0), grade)


def antiderivative(name: str, grade: Grade, defining: Expr) -> GeneratorId:
    """Like :func:`new_antiderivative` but reuses an identical registration."""
    with _registry_lock:
        existing = _antiderivatives.get(name)
    if existing is not None:
        if existing[0] != grade or existing[1] != defining:
            raise ValueError(f"antiderivative {name!r} already registered with another definition")
        return GeneratorId(name, "antider", 0, 0, Fraction(0), grade)
    return new_antiderivative(name, grade, defining)


def antiderivative_definition(name: str) -> Expr:
    try:
        return _antiderivatives[name][1]
    except KeyError:
        raise KeyError(f"unknown antiderivative {name!r}") from None


# ---------------------------------------------------------------- monomials


def _sort_with_sign(gens: list) -> tuple[int, tuple]:
    """Insertion sort tracking the graded sign of every transposition."""
    items = list(gens)
    sign = 1
    for i in range(1, len(items)):
        cur = items[i]
        j = i - 1
        cg = cur.grade
        while j >= 0 and items[j] > cur:
            og = items[j].grade
            if (og[0] * cg[0] + og[1] * cg[1]) % 2:
                sign = -sign
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = cur
    return sign, tuple(items)


def _hyperbolic_product(factors: list) -> list:
    """Linearize a product of cosh/sinh of one field: list of (coef, kind, k)."""
    acc = [(Fraction(1), "cosh", Fraction(0))]
    half = Fraction(1, 2)
    for f in factors:
        nxt = []
        for c, kind, k in acc:
            fk = f.param
            s, d = k + fk, k - fk
            if kind == "cosh" and f.kind == "cosh":
                nxt += [(c * half, "cosh", s), (c * half, "cosh", d)]
            elif kind == "sinh" and f.kind == "sinh":
                nxt += [(c * half, "cosh", s), (-c * half, "cosh", d)]
            elif kind == "sinh":
                nxt += [(c * half, "sinh", s), (c * half, "sinh", d)]
            else:
                nxt += [(c * half, "sinh", s), (-c * half, "sinh", d)]
        acc = nxt
    out: dict = defaultdict(Fraction)
    for c, kind, k in acc:
        if k < 0:
            k = -k
            if kind == "sinh":
                c = -c
        if kind == "sinh" and k == 0:
            continue
        out[(kind, k)] += c
    return [(c, kind, k) for (kind, k), c in out.items() if c]


def _linearize(mono: tuple) -> list:
    """Collapse several transcendental generators of one field into one."""
    groups: dict = defaultdict(list)
    for g in mono:
        if g.kind in TRANSCENDENTAL:
            groups[(g.field, g.kind == "exp")].append(g)
    if all(len(v) < 2 for v in groups.values()):
        return [(ONE, mono)]
    results = [(Fraction(1), [g for g in mono if g.kind not in TRANSCENDENTAL])]
    for (field, is_exp), gens in sorted(groups.items()):
        if is_exp:
            k = sum((g.param for g in gens), Fraction(0))
            extra = [] if k == 0 else [gens[0]._replace(param=k)]
            results = [(c, rest + extra) for c, rest in results]
            continue
        pieces = _hyperbolic_product(gens)
        sinh_grade = next((g.grade for g in gens if g.kind == "sinh"), G00)
        new = []
        for c, rest in results:
            for pc, kind, k in pieces:
                if kind == "cosh" and k == 0:
                    new.append((c * pc, rest))
                else:
                    grade = sinh_grade if kind == "sinh" else G00
                    new.append((c * pc, rest + [GeneratorId(field, kind, 0, 0, k, grade)]))
        results = new
    out = []
    for c, rest in results:
        # the merged factors commute with everything in their field block
        out.append((Gaussian(c), tuple(sorted(rest))))
    return out


@lru_cache(maxsize=None)
def multiply_monomials(m1: tuple, m2: tuple) -> tuple:
    """Product of two canonical monomials as ((coef, monomial), ...)."""
    if not m1:
        return ((ONE, m2),)
    if not m2:
        return ((ONE, m1),)
    sign, merged = _sort_with_sign(list(m1) + list(m2))
    prev = None
    for g in merged:
        if g == prev and g.odd:
            return ()
        prev = g
    pieces = _linearize(merged)
    if sign == 1:
        return tuple(pieces)
    return tuple((-c, m) for c, m in pieces)


def canonical_monomial(gens: Iterable[GeneratorId]) -> tuple[int, tuple]:
    """Sort ``gens`` into canonical order; returns (sign, monomial) or (0, ())."""
    sign, merged = _sort_with_sign(list(gens))
    prev = None
    for g in merged:
        if g == prev and g.odd:
            return 0, ()
        prev = g
    return sign, merged


# ---------------------------------------------------------------- expressions


class Expr:
    """Element of the graded differential ring, in canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        self.terms: dict = {m: c for m, c in (terms or {}).items() if c}

    # -- constructors
    @classmethod
    def const(cls, value) -> Expr:
        c = Gaussian.coerce(value)
        return cls({(): c}) if c else cls()

    @classmethod
    def gen(cls, g: GeneratorId, coef=1) -> Expr:
        return cls({(g,): Gaussian.coerce(coef)})

    @classmethod
    def monomial(cls, gens: Iterable[GeneratorId], coef=1) -> Expr:
        gens = list(gens)
        expr = cls.const(coef)
        for g in gens:
            expr = expr * cls.gen(g)
        return expr

    @classmethod
    def _raw(cls, terms: dict) -> Expr:
        e = cls.__new__(cls)
        e.terms = terms
        return e

    # -- arithmetic
    @staticmethod
    def coerce(value) -> Expr:
        if isinstance(value, Expr):
            return value
        return Expr.const(value)

    def __add__(self, other) -> Expr:
        other = Expr.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m)
            if s is None:
                terms[m] = c
            else:
                s = s + c
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return Expr._raw(terms)

    __radd__ = __add__

    def __neg__(self) -> Expr:
        return Expr._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Expr:
        return self + (-Expr.coerce(other))

    def __rsub__(self, other) -> Expr:
        return Expr.coerce(other) - self

    def scale(self, factor) -> Expr:
        factor = Gaussian.coerce(factor)
        if not factor:
            return Expr()
        return Expr._raw({m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other) -> Expr:
        if not isinstance(other, Expr):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Expr()
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                cc = c1 * c2
                for pc, m in multiply_monomials(m1, m2):
                    v = cc * pc if pc != ONE else cc
                    s = acc.get(m)
                    acc[m] = v if s is None else s + v
        return Expr._raw({m: c for m, c in acc.items() if c})

    def __rmul__(self, other) -> Expr:
        return self.scale(other)

    def __truediv__(self, other) -> Expr:
        return self.scale(ONE / Gaussian.coerce(other))

    def __pow__(self, n: int) -> Expr:
        out = Expr.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            try:
                other = Expr.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    # -- queries
    def generators(self) -> set:
        return {g for m in self.terms for g in m}

    def constant_term(self) -> Gaussian:
        return self.terms.get((), Gaussian(0))

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def grades(self) -> set:
        return {monomial_grade(m) for m in self.terms}

    def is_homogeneous(self, grade: Grade | None = None) -> bool:
        gs = self.grades()
        if not gs:
            return True
        if len(gs) > 1:
            return False
        return grade is None or gs == {grade}

    def grade(self) -> Grade:
        gs = self.grades()
        if len(gs) != 1:
            raise ValueError("expression is not homogeneous" if gs else "zero has no grade")
        return next(iter(gs))

    def homogeneous_part(self, grade: Grade) -> Expr:
        return Expr._raw({m: c for m, c in self.terms.items() if monomial_grade(m) == grade})

    def coefficient(self, gens: Iterable[GeneratorId]) -> Gaussian:
        sign, mono = canonical_monomial(gens)
        if not sign:
            return Gaussian(0)
        return self.terms.get(mono, Gaussian(0)) * sign

    def __str__(self) -> str:
        from z22osp.emit import expr_to_text

        return expr_to_text(self)

    def __repr__(self) -> str:
        return f"Expr({self})"

    def to_json(self) -> dict:
        out = []
        for m, c in sorted(self.terms.items()):
            counted: list = []
            for g in m:
                if counted and counted[-1][0] == g:
                    counted[-1][1] += 1
                else:
                    counted.append([g, 1])
            out.append({"coeff": c.to_json(), "monomial": [[g.to_json(), k] for g, k in counted]})
        return {"terms": out}

    @classmethod
    def from_json(cls, data: dict) -> Expr:
        terms: dict = {}
        for t in data["terms"]:
            gens = []
            for desc, k in t["monomial"]:
                gens += [GeneratorId.from_json(desc)] * int(k)
            sign, mono = canonical_monomial(gens)
            if sign:
                terms[mono] = terms.get(mono, Gaussian(0)) + Gaussian.from_json(t["coeff"]) * sign
        return cls(terms)


def monomial_grade(mono: tuple) -> Grade:
    g1 = g2 = 0
    for g in mono:
        g1 += g.grade[0]
        g2 += g.grade[1]
    return Grade(g1 % 2, g2 % 2)


# ---------------------------------------------------------------- builders


def jet_id(field: str, a: int = 0, b: int = 0, grade: Grade | None = None) -> GeneratorId:
    return GeneratorId(field, "jet", a, b, Fraction(0), grade if grade is not None else field_grade(field))


def jet(field: str, a: int = 0, b: int = 0, grade: Grade | None = None) -> Expr:
    return Expr.gen(jet_id(field, a, b, grade))


def chiral(name: str, b: int = 0) -> Expr:
    """A [00] function of the second coordinate only, killed by ``d_+``."""
    return Expr.gen(GeneratorId(name, "chiral", 0, b, Fraction(0), G00))


def exp_(field: str, k) -> Expr:
    k = Fraction(k)
    if k == 0:
        return Expr.const(1)
    return Expr.gen(GeneratorId(field, "exp", 0, 0, k, G00))


def cosh_(field: str, k) -> Expr:
    k = abs(Fraction(k))
    if k == 0:
        return Expr.const(1)
    return Expr.gen(GeneratorId(field, "cosh", 0, 0, k, G00))


def sinh_(field: str, k) -> Expr:
    k = Fraction(k)
    if k == 0:
        return Expr()
    sign = 1 if k > 0 else -1
    return Expr.gen(GeneratorId(field, "sinh", 0, 0, abs(k), field_grade(field)), sign)


def const(value) -> Expr:
    return Expr.const(value)


# ---------------------------------------------------------------- derivations


@lru_cache(maxsize=None)
def _derive_generator(g: GeneratorId, direction: int) -> Expr:
    kind = g.kind
    if kind == "jet":
        return Expr.gen(g.shifted(direction))
    if kind == "chiral":
        return Expr() if direction == 0 else Expr.gen(g.shifted(1))
    if kind == "antider":
        if direction == 1:
            return Expr.gen(g.shifted(1))
        out = antiderivative_definition(g.field)
        for _ in range(g.b):
            out = derive(out, 1)
        return out
    base = jet_id(g.field, 1 if direction == 0 else 0, 0 if direction == 0 else 1)
    if kind == "exp":
        return Expr.gen(base, g.param) * Expr.gen(g)
    if kind == "cosh":
        return Expr.gen(base, g.param) * sinh_(g.field, g.param)
    if kind == "sinh":
        return Expr.gen(base, g.param) * cosh_(g.field, g.param)
    raise ValueError(f"unknown generator kind {kind!r}")


@lru_cache(maxsize=None)
def _derive_monomial(mono: tuple, direction: int) -> Expr:
    out = Expr()
    for i, g in enumerate(mono):
        dg = _derive_generator(g, direction)
        if not dg:
            continue
        piece = dg
        if i:
            piece = Expr._raw({mono[:i]: ONE}) * piece
        if i + 1 < len(mono):
            piece = piece * Expr._raw({mono[i + 1 :]: ONE})
        out = out + piece
    return out


def derive(p: Expr, direction: int = 0, times: int = 1) -> Expr:
    """Apply the even derivation ``direction`` (0 = d_+/d_x, 1 = d_-/d_t)."""
    for _ in range(times):
        out = Expr()
        for m, c in p.terms.items():
            if m:
                out = out + _derive_monomial(m, direction).scale(c)
        p = out
    return p


def dx(p: Expr, times: int = 1) -> Expr:
    return derive(p, 0, times)


def dt(p: Expr, times: int = 1) -> Expr:
    return derive(p, 1, times)


# ---------------------------------------------------------------- substitution


def substitute(p: Expr, replace: Callable[[GeneratorId], Expr | None]) -> Expr:
    """Replace generators in place; each replacement must keep the generator's grade."""
    cache: dict = {}
    out = Expr()
    for m, c in p.terms.items():
        factors = []
        changed = False
        for g in m:
            if g not in cache:
                r = replace(g)
                if r is not None and r and not r.is_homogeneous(g.grade):
                    raise ValueError(f"replacement for {g} changes its grade")
                cache[g] = r
            r = cache[g]
            if r is None:
                factors.append(None)
            else:
                changed = True
                factors.append(r)
        if not changed:
            out = out + Expr._raw({m: c})
            continue
        piece = Expr.const(c)
        for g, r in zip(m, factors):
            piece = piece * (Expr.gen(g) if r is None else r)
            if not piece:
                break
        out = out + piece
    return out


def substitute_fields(p: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Substitute whole fields, prolonged to all their jets.

    Transcendental generators of a substituted field are only supported when the
    field is sent to zero.
    """
    mapping = {k: Expr.coerce(v) for k, v in mapping.items()}

    def repl(g: GeneratorId):
        if g.field not in mapping:
            return None
        target = mapping[g.field]
        if g.kind in ("jet", "chiral"):
            out = target
            out = derive(out, 0, g.a)
            out = derive(out, 1, g.b)
            return out
        if g.kind in TRANSCENDENTAL:
            if target:
                raise ValueError("transcendental generators only substitute to zero fields")
            return Expr() if g.kind == "sinh" else Expr.const(1)
        raise ValueError(f"cannot substitute generator {g}")

    return substitute(p, repl)


# ---------------------------------------------------------------- equations of motion


class Rule(NamedTuple):
    field: str
    base: tuple  # (a0, b0): jets (a, b) with a >= a0 and b >= b0 are rewritten
    rhs: Expr


class EomSystem:
    """Oriented rewrite rules ``d^base field -> rhs``, prolonged to derivatives."""

    max_depth = 400

    def __init__(self, rules: Iterable[Rule] | Mapping = ()):
        if isinstance(rules, Mapping):
            rules = [Rule(f, tuple(base), rhs) for (f, base), rhs in rules.items()]
        self.rules: dict[str, Rule] = {}
        for r in rules:
            if r.field in self.rules:
                raise ValueError(f"overlapping rules for field {r.field!r}")
            self.rules[r.field] = r
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __contains__(self, field: str) -> bool:
        return field in self.rules

    def __iter__(self):
        return iter(self.rules.values())

    def extended(self, *rules: Rule) -> EomSystem:
        return EomSystem(list(self.rules.values()) + list(rules))

    def without(self, *fields: str) -> EomSystem:
        return EomSystem([r for r in self.rules.values() if r.field not in fields])

    def reducible(self, g: GeneratorId) -> bool:
        if g.kind != "jet":
            return False
        r = self.rules.get(g.field)
        return r is not None and g.a >= r.base[0] and g.b >= r.base[1]

    def _norm_gen(self, g: GeneratorId, depth: int) -> Expr:
        hit = self._cache.get(g)
        if hit is not None:
            return hit
        if depth > self.max_depth:
            raise EomDivergence(f"rewrite of {g} exceeded depth {self.max_depth}")
        rule = self.rules[g.field]
        a0, b0 = rule.base
        if (g.a, g.b) == (a0, b0):
            out = self._normalize(rule.rhs, depth + 1)
        elif g.a > a0:
            lower = self._norm_gen(g._replace(a=g.a - 1), depth + 1)
            out = self._normalize(derive(lower, 0), depth + 1)
        else:
            lower = self._norm_gen(g._replace(b=g.b - 1), depth + 1)
            out = self._normalize(derive(lower, 1), depth + 1)
        self._cache[g] = out
        return out

    def _normalize(self, p: Expr, depth: int) -> Expr:
        out = Expr()
        for m, c in p.terms.items():
            if not any(self.reducible(g) for g in m):
                out = out + Expr._raw({m: c})
                continue
            piece = Expr.const(c)
            for g in m:
                piece = piece * (self._norm_gen(g, depth) if self.reducible(g) else Expr.gen(g))
                if not piece:
                    break
            out = out + piece
        return out

    def normalize(self, p: Expr) -> Expr:
        with self._lock:
            return self._normalize(p, 0)


def normalize_with_eom(p: Expr, eom: EomSystem) -> Expr:
    return eom.normalize(p)


# ---------------------------------------------------------------- variational calculus


def towers(p: Expr) -> set:
    """Jet towers (field, t-order) the expression depends on, in the x-direction."""
    out = set()
    for g in p.generators():
        if g.kind == "jet":
            out.add((g.field, g.b, g.grade))
        elif g.kind in TRANSCENDENTAL:
            out.add((g.field, 0, field_grade(g.field)))
    return out


def partial(p: Expr, var: GeneratorId) -> Expr:
    """Left partial derivative with respect to the jet coordinate ``var``."""
    out = Expr()
    vg = var.grade
    for m, c in p.terms.items():
        sign = 1
        for i, g in enumerate(m):
            piece = None
            if g == var:
                piece = Expr.const(1)
            elif var.a == 0 and var.b == 0 and g.field == var.field and g.kind in TRANSCENDENTAL:
                if g.kind == "exp":
                    piece = Expr.gen(g, g.param)
                elif g.kind == "cosh":
                    piece = sinh_(g.field, g.param).scale(g.param)
                else:
                    piece = cosh_(g.field, g.param).scale(g.param)
            if piece is not None:
                if i:
                    piece = Expr._raw({m[:i]: ONE}) * piece
                if i + 1 < len(m):
                    piece = piece * Expr._raw({m[i + 1 :]: ONE})
                out = out + piece.scale(c * sign)
            gg = g.grade
            if (gg[0] * vg[0] + gg[1] * vg[1]) % 2:
                sign = -sign
    return out


def euler(p: Expr, field: str, b: int = 0, grade: Grade | None = None) -> Expr:
    """Graded Euler operator sum_j (-d_x)^j d p / d field^(j) on one jet tower."""
    grade = grade if grade is not None else field_grade(field)
    top = max((g.a for g in p.generators() if g.kind == "jet" and g.field == field and g.b == b), default=0)
    out = Expr()
    for j in range(top + 1):
        piece = partial(p, GeneratorId(field, "jet", j, b, Fraction(0), grade))
        if j % 2:
            piece = -piece
        out = out + derive(piece, 0, j)
    return out


def _x_constant(mono: tuple) -> bool:
    return all(g.kind == "chiral" for g in mono)


def is_total_derivative(p: Expr) -> bool:
    """True iff ``p`` is ``d_x`` of a local expression (Euler-operator test)."""
    if any(g.kind == "antider" for g in p.generators()):
        raise ValueError("Euler test needs an expression free of antiderivative symbols")
    if any(_x_constant(m) for m in p.terms):
        return False
    return all(not euler(p, f, b, gr) for f, b, gr in towers(p))


# ---------------------------------------------------------------- integration


def _jet_rank(g: GeneratorId) -> tuple:
    return (g.a, g.field, g.b)


def _split_off(mono: tuple, target: GeneratorId) -> tuple[int, tuple]:
    """Write mono = sign * rest * target (target moved to the right end)."""
    i = mono.index(target)
    rest = mono[:i] + mono[i + 1 :]
    sign = 1
    tg = target.grade
    for g in mono[i + 1 :]:
        gg = g.grade
        if (gg[0] * tg[0] + gg[1] * tg[1]) % 2:
            sign = -sign
    return sign, rest


def _power_times_transcendental(var: GeneratorId, k: int, kind: str, kappa: Fraction) -> Expr:
    """Antiderivative in ``var`` of ``var**k * T(kappa*var)`` for T in exp/cosh/sinh."""
    partner = {"exp": "exp", "cosh": "sinh", "sinh": "cosh"}[kind]
    build = {"exp": exp_, "cosh": cosh_, "sinh": sinh_}[partner]
    head = Expr.gen(var) ** k * build(var.field, kappa) * Gaussian(1 / kappa)
    if k == 0:
        return head
    tail = _power_times_transcendental(var, k - 1, partner, kappa)
    return head - tail.scale(Gaussian(Fraction(k) / kappa))


def _antipartial(rest: tuple, var: GeneratorId) -> Expr:
    """R whose x-derivative has ``rest * var'`` as its ``var'``-linear part (var of x-order 0)."""
    k = rest.count(var)
    if var.odd and k:
        raise NotExact("odd jet pairs with its own lower derivative")
    trans = [g for g in rest if var.b == 0 and g.field == var.field and g.kind in TRANSCENDENTAL]
    if not trans:
        return Expr._raw({rest: ONE}) * Expr.gen(var) * Gaussian(Fraction(1, k + 1))
    if len(trans) != 1:
        raise NotExact("unsupported transcendental product")
    t = trans[0]
    others = [g for g in rest if g != t and g != var]
    # rest = sign * others * var**k * t
    sign, _ = canonical_monomial(others + [var] * k + [t])
    return Expr.monomial(others).scale(sign) * _power_times_transcendental(var, k, t.kind, t.param)


def integrate_x(p: Expr, max_steps: int = 5000) -> Expr:
    """Find q with d_x q = p by stripping the top-ranked jet of each term.

    Raises :class:`NotExact` when p is not a total derivative (or the greedy
    route cannot certify it).  The result is always re-differentiated.
    """
    if not p:
        return Expr()
    has_antider = any(g.kind == "antider" for g in p.generators())
    if not has_antider and not is_total_derivative(p):
        raise NotExact("Euler operator does not vanish")
    acc = Expr()
    rem = p
    for _ in range(max_steps):
        if not rem:
            break
        jets = [g for g in rem.generators() if g.kind == "jet" and g.a >= 1]
        if not jets:
            raise NotExact("remainder has no x-derivatives left to strip")
        top = max(jets, key=_jet_rank)
        below = top._replace(a=top.a - 1)
        q = Expr()
        for m, c in rem.terms.items():
            if top not in m:
                continue
            if m.count(top) > 1:
                raise NotExact(f"top jet {top.field} enters nonlinearly")
            sign, rest = _split_off(m, top)
            if any(g.kind == "jet" and g.a >= top.a for g in rest):
                raise NotExact("several jets of top order in one term")
            q = q + _antipartial(rest, below).scale(c * sign)
        if not q:
            raise NotExact("no integrable part found")
        rem = rem - dx(q)
        acc = acc + q
    else:
        raise NotExact("integration did not terminate")
    if dx(acc) != p:
        raise NotExact("integration check failed")
    return acc


def reduce_density(p: Expr, max_steps: int = 5000) -> Expr:
    """Representative of ``p`` modulo total x-derivatives.

    Integrates by parts any term whose top-ranked jet is linear and whose
    remaining factors have strictly lower x-order, keeping the step only when
    every newly generated monomial ranks below the term it replaces.
    """
    kept = Expr()
    rem = p
    for _ in range(max_steps):
        if not rem:
            return kept
        # pick the term with the highest-ranked monomial
        mono = max(rem.terms, key=_mono_rank)
        c = rem.terms[mono]
        jets = [g for g in mono if g.kind == "jet"]
        step = None
        if jets:
            top = max(jets, key=_jet_rank)
            if top.a >= 1 and mono.count(top) == 1:
                sign, rest = _split_off(mono, top)
                if not any(g.kind == "jet" and g.a >= top.a for g in rest):
                    below = top._replace(a=top.a - 1)
                    try:
                        q = _antipartial(rest, below).scale(c * sign)
                    except NotExact:
                        q = None
                    if q is not None:
                        new = rem - dx(q)
                        fresh = [m for m in new.terms if m not in rem.terms or m == mono]
                        if mono not in new.terms and all(_mono_rank(m) < _mono_rank(mono) for m in fresh):
                            step = new
        if step is None:
            kept = kept + Expr._raw({mono: c})
            rem = rem - Expr._raw({mono: c})
        else:
            rem = step
    raise NotExact("density reduction did not terminate")


def _mono_rank(mono: tuple) -> tuple:
    return tuple(sorted((_jet_rank(g) for g in mono if g.kind == "jet"), reverse=True)), len(mono)
