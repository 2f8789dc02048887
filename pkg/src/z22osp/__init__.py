"""Exact symbolic engine for the loop extension of Z2xZ2-graded osp(1|2).

Covers the graded bracket tables, the zero-curvature hierarchy built on them
(Liouville, sinh-Gordon, cosh-Gordon, mKdV), the Miura map to the graded KdV
system, and the recursion that produces its conserved charges.
"""

from z22osp.grading import Grade, grade_add, grade_sign

__all__ = ["Grade", "grade_add", "grade_sign"]
__version__ = "0.1.0"
