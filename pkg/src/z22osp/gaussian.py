"""Exact Gaussian rationals ``re + i*im`` with Fraction parts."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class Gaussian:
    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)
        self._hash = None

    @classmethod
    def coerce(cls, value) -> Gaussian:
        if isinstance(value, Gaussian):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value, 0)
        if isinstance(value, complex):
            # only exact for dyadic floats; callers should prefer Gaussian(re, im)
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot coerce {value!r} to Gaussian")

    @classmethod
    def parse(cls, text: str) -> Gaussian:
        text = text.replace(" ", "")
        if text.endswith("i"):
            body = text[:-1]
            # split at the last sign that is not the leading one or an exponent
            for pos in range(len(body) - 1, 0, -1):
                if body[pos] in "+-":
                    im = body[pos:]
                    im = im + "1" if im in "+-" else im
                    return cls(Fraction(body[:pos]), Fraction(im))
            im = body if body not in ("", "+", "-") else body + "1"
            return cls(0, Fraction(im))
        return cls(Fraction(text), 0)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gaussian):
            try:
                other = Gaussian.coerce(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.re, self.im))
        return self._hash

    def __add__(self, other) -> Gaussian:
        other = Gaussian.coerce(other)
        return Gaussian(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> Gaussian:
        other = Gaussian.coerce(other)
        return Gaussian(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> Gaussian:
        return Gaussian.coerce(other) - self

    def __neg__(self) -> Gaussian:
        return Gaussian(-self.re, -self.im)

    def __mul__(self, other) -> Gaussian:
        other = Gaussian.coerce(other)
        if not other.im and not self.im:
            return Gaussian(self.re * other.re, 0)
        return Gaussian(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> Gaussian:
        return Gaussian(self.re, -self.im)

    def __truediv__(self, other) -> Gaussian:
        other = Gaussian.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * other.conjugate()
        return Gaussian(num.re / norm, num.im / norm)

    def __rtruediv__(self, other) -> Gaussian:
        return Gaussian.coerce(other) / self

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self) -> str:
        return f"Gaussian({self})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return "i" if self.im == 1 else "-i" if self.im == -1 else f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        return f"{self.re}{sign}{'' if mag == 1 else mag}i"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im)}

    @classmethod
    def from_json(cls, data: dict) -> Gaussian:
        return cls(Fraction(data["re"]), Fraction(data["im"]))


ZERO = Gaussian(0)
ONE = Gaussian(1)
I = Gaussian(0, 1)
