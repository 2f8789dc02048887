"""Text, LaTeX and JSON renderers for ring elements, algebra elements and matrices."""

from __future__ import annotations

import json
from fractions import Fraction

from z22osp.gaussian import Gaussian

_GREEK = {
    "phi": ("phi", r"\varphi"),
    "sigma": ("sigma", r"\sigma"),
    "rho": ("rho", r"\rho"),
    "xi": ("xi", r"\xi"),
    "eta": ("eta", r"\eta"),
    "psi": ("psi", r"\psi"),
    "psibar": ("psibar", r"\bar{\psi}"),
    "Sigma": ("Sigma", r"\Sigma"),
}


def _split_name(field: str) -> tuple[str, str]:
    if len(field) > 2 and field[-2:].isdigit():
        return field[:-2], field[-2:]
    return field, ""


def field_latex(field: str) -> str:
    stem, tag = _split_name(field)
    if stem in _GREEK:
        stem = _GREEK[stem][1]
    elif stem in ("l", "ell"):
        stem = r"\ell"
    elif len(stem) > 1 and not stem.startswith("\\"):
        stem = r"\mathrm{" + stem + "}"
    return f"{stem}_{{{tag}}}" if tag else stem


def _gen_text(g, style: str) -> str:
    if g.kind in ("cosh", "sinh", "exp"):
        k = "" if g.param == 1 else f"{g.param}*"
        return f"{g.kind}({k}{g.field})"
    name = g.field
    if g.kind == "chiral":
        name = f"{g.field}(x-)"
    if style == "pm":
        ops = ""
        if g.a:
            ops += "d+" + (f"^{g.a}" if g.a > 1 else "")
        if g.b:
            ops += "d-" + (f"^{g.b}" if g.b > 1 else "")
        return f"{ops}({name})" if ops else name
    out = name + ("'" * g.a if g.a <= 3 else f"^({g.a})")
    if g.b:
        out = f"d_t{'^' + str(g.b) if g.b > 1 else ''}({out})"
    return out


def _gen_latex(g, style: str) -> str:
    if g.kind in ("cosh", "sinh", "exp"):
        k = "" if g.param == 1 else _frac_latex(g.param)
        if g.kind == "exp":
            return f"e^{{{k}{field_latex(g.field)}}}"
        return f"\\{g.kind} {k}{field_latex(g.field)}"
    base = field_latex(g.field)
    if g.kind == "chiral":
        base = f"{g.field if g.field != 'l' else chr(92) + 'ell'}(x_-)"
    if style == "pm":
        ops = ""
        if g.a:
            ops += r"\partial_+" + (f"^{{{g.a}}}" if g.a > 1 else "")
        if g.b:
            ops += r"\partial_-" + (f"^{{{g.b}}}" if g.b > 1 else "")
        return f"{ops}{base}" if ops else base
    out = base + ("'" * g.a if g.a <= 3 else f"^{{({g.a})}}")
    if g.b:
        out = r"\partial_t" + (f"^{{{g.b}}}" if g.b > 1 else "") + " " + out
    return out


def _frac_latex(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    sign = "-" if q < 0 else ""
    return f"{sign}\\tfrac{{{abs(q.numerator)}}}{{{q.denominator}}}"


def _coef_text(c: Gaussian, first: bool) -> tuple[str, str]:
    """Sign and magnitude text; magnitude is '' for unit coefficients."""
    if c.im and c.re:
        return ("" if first else "+"), f"({c})"
    if c.im:
        sign = "-" if c.im < 0 else ("" if first else "+")
        mag = abs(c.im)
        return sign, ("i" if mag == 1 else f"{mag}i")
    sign = "-" if c.re < 0 else ("" if first else "+")
    mag = abs(c.re)
    return sign, ("" if mag == 1 else str(mag))


def _group(mono):
    out: list = []
    for g in mono:
        if out and out[-1][0] == g:
            out[-1][1] += 1
        else:
            out.append([g, 1])
    return out


def expr_to_text(p, style: str = "xt") -> str:
    if not p.terms:
        return "0"
    parts = []
    for i, (m, c) in enumerate(sorted(p.terms.items())):
        sign, mag = _coef_text(c, i == 0)
        factors = [(_gen_text(g, style) + (f"^{k}" if k > 1 else "")) for g, k in _group(m)]
        body = "*".join(([mag] if mag else []) + factors) or (mag or "1")
        parts.append(f"{sign}{body}" if i == 0 else f" {sign} {body}")
    return "".join(parts)


def expr_to_latex(p, style: str = "xt") -> str:
    if not p.terms:
        return "0"
    parts = []
    for i, (m, c) in enumerate(sorted(p.terms.items())):
        if c.im and c.re:
            sign, mag = ("" if i == 0 else "+"), f"({_frac_latex(c.re)}{'+' if c.im > 0 else '-'}{_frac_latex(abs(c.im))}i)"
        elif c.im:
            sign = "-" if c.im < 0 else ("" if i == 0 else "+")
            mag = "i" if abs(c.im) == 1 else _frac_latex(abs(c.im)) + "i"
        else:
            sign = "-" if c.re < 0 else ("" if i == 0 else "+")
            mag = "" if abs(c.re) == 1 else _frac_latex(abs(c.re))
        factors = []
        for g, k in _group(m):
            t = _gen_latex(g, style)
            if k > 1:
                t = f"({t})^{{{k}}}" if ("'" in t or "\\" in t and " " in t) else f"{t}^{{{k}}}"
            factors.append(t)
        body = mag + " ".join(factors) if factors else (mag or "1")
        parts.append(f"{sign}{body}" if i == 0 else f" {sign} {body}")
    return "".join(parts)


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True)
