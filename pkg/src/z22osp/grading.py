"""Z2 x Z2 grades and the bicharacter sign rule."""

from __future__ import annotations

from typing import NamedTuple


class Grade(NamedTuple):
    g1: int
    g2: int

    def __add__(self, other):  # type: ignore[override]
        return grade_add(self, other)

    @property
    def parity(self) -> int:
        """Z2 reduction: 0 for [00] and [11], 1 for [10] and [01]."""
        return (self.g1 + self.g2) % 2

    @property
    def is_odd(self) -> bool:
        return self.parity == 1

    def __str__(self) -> str:
        return f"[{self.g1}{self.g2}]"

    @classmethod
    def parse(cls, text: str) -> Grade:
        digits = [c for c in text if c in "01"]
        if len(digits) != 2:
            raise ValueError(f"not a grade: {text!r}")
        return cls(int(digits[0]), int(digits[1]))


G00 = Grade(0, 0)
G10 = Grade(1, 0)
G01 = Grade(0, 1)
G11 = Grade(1, 1)
ALL_GRADES = (G00, G10, G01, G11)


def grade_add(a: Grade, b: Grade) -> Grade:
    return Grade((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)


def grade_dot(a: Grade, b: Grade) -> int:
    return (a[0] * b[0] + a[1] * b[1]) % 2


def grade_sign(a: Grade, b: Grade) -> int:
    """(-1)**(a.b): the sign picked up when two homogeneous objects swap."""
    return -1 if (a[0] * b[0] + a[1] * b[1]) % 2 else 1


def grade_of_suffix(name: str) -> Grade:
    """Grade encoded by a trailing two-digit tag, e.g. ``sigma10`` -> [10]."""
    tail = name[-2:]
    if len(tail) != 2 or any(c not in "01" for c in tail):
        raise ValueError(f"field name {name!r} carries no grade suffix")
    return Grade(int(tail[0]), int(tail[1]))
