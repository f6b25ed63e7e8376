"""Cohomological quantifier elimination over projective spaces.

Formulas over products of projective spaces are turned into join formulas,
whose (pseudo-)Poincare polynomials feed a chain of polynomial operators that
yields the polynomial of the quantified formula.  Linear instances are
computed exactly by :mod:`cohomqe.motivic` and :mod:`cohomqe.cohomology`.
"""
from .errors import CohomQEError
from .polyring import BlockSignature, IntPoly

__all__ = ["BlockSignature", "CohomQEError", "IntPoly"]
__version__ = "0.1.0"
