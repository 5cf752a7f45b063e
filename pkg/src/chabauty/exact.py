"""Exact scalars — rationals and quadratic surds, parsed and decomposed with sympy.

An exact scalar is a finite sum  q₁ + q₂√d₂ + …  with rational qᵢ and distinct
squarefree integers dᵢ > 1.  Its *components* map each squarefree d (with 1 for
the rational part) to the rational coefficient of √d; since the √d are linearly
independent over ℚ this map is injective, which is what the closure
computation relies on.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Integral

import sympy as sp

from chabauty.errors import DescriptorError, InexactInputError

Components = dict[int, sp.Rational]

_LITERAL = re.compile(r"^[0-9+\-*/()\s]*(sqrt[0-9+\-*/()\s]*)*$")


def parse_exact(value: object) -> sp.Expr:
    """Parse an int, Fraction, sympy number or string like ``"3/4*sqrt(5)"``."""
    if isinstance(value, bool):
        raise DescriptorError(f"not a number: {value!r}")
    if isinstance(value, Integral):
        return sp.Integer(int(value))
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        raise InexactInputError(f"floating value {value!r} given where an exact number is required")
    if isinstance(value, sp.Expr):
        expr = value
    elif isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.replace("sqrt", ""):
            raise InexactInputError(f"decimal literal {value!r} given where an exact number is required")
        if not text or not _LITERAL.match(text):
            raise DescriptorError(f"cannot parse exact number {value!r}")
        try:
            expr = sp.sympify(text)
        except (sp.SympifyError, SyntaxError, TypeError) as exc:
            raise DescriptorError(f"cannot parse exact number {value!r}: {exc}") from None
    else:
        raise DescriptorError(f"not a number: {value!r}")
    expr = sp.expand(expr)
    components(expr)  # validates the surd form
    return expr


def components(expr: sp.Expr) -> Components:
    """Decompose an expanded exact scalar into {squarefree d: rational coefficient}."""
    out: Components = {}
    for term in sp.Add.make_args(sp.expand(expr)):
        if term == 0:
            continue
        coeff, rest = term.as_coeff_Mul()
        if not coeff.is_Rational:
            raise InexactInputError(f"non-rational coefficient in {expr}")
        if rest == 1:
            d = 1
        elif rest.is_Pow and rest.base.is_Integer and rest.exp == sp.Rational(1, 2) and rest.base > 0:
            d = int(rest.base)
        else:
            raise DescriptorError(f"{expr} is not a rational combination of square roots")
        out[d] = out.get(d, sp.Integer(0)) + coeff
    return {d: q for d, q in out.items() if q != 0}


def surd_product(d: int, e: int) -> tuple[int, int]:
    """√d·√e = g·√f for squarefree d, e; returns (g, f) with f squarefree."""
    g = math.gcd(d, e)
    return g, (d // g) * (e // g)


def multiply(a: Components, b: Components) -> Components:
    """Product of two exact scalars in component form."""
    out: Components = {}
    for d, p in a.items():
        for e, q in b.items():
            g, f = surd_product(d, e)
            out[f] = out.get(f, sp.Integer(0)) + p * q * g
    return {d: q for d, q in out.items() if q != 0}


def is_rational(expr: sp.Expr) -> bool:
    return set(components(expr)) <= {1}


def format_exact(expr: sp.Expr) -> str:
    """Printable form that :func:`parse_exact` reads back."""
    return str(expr)
