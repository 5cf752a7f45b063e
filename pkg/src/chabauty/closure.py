"""Closure of a finitely generated subgroup of ℂ with exact (surd) generators.

The closure is decided from two integers: the real dimension s of the span of
the generators and their rank r over ℚ.  With s = 1 the closure is cyclic
(r = 1) or the whole line.  With s = 2 and r = 2 it is a lattice, whose basis
comes from a Hermite normal form.  With s = 2 and r ≥ 3 it is computed through
its annihilator {w : ⟨w, g⟩ ∈ ℤ for every generator g}, which is either 0
(closure ℂ) or ℤw (closure ℝ·iw ⊕ ℤ-translates at spacing 1/|w|).
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Iterable, Sequence

import sympy as sp
from sympy.matrices.normalforms import hermite_normal_form

from chabauty.errors import DescriptorError, NumericError
from chabauty.euclid import (
    ClosedSubgroupC,
    ClosedSubgroupR,
    Cyclic,
    Full,
    Lattice,
    Line,
    LineCyclic,
    Zero,
)
from chabauty.exact import components, multiply, parse_exact, surd_product

log = logging.getLogger(__name__)

ExactPair = tuple[sp.Expr, sp.Expr]


def parse_generator(value: object) -> ExactPair:
    """A generator is a pair [re, im] of exact scalars, or a bare real scalar."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise DescriptorError(f"generator must be a [re, im] pair, got {value!r}")
        return parse_exact(value[0]), parse_exact(value[1])
    return parse_exact(value), sp.Integer(0)


def _cross(a: ExactPair, b: ExactPair) -> sp.Expr:
    return sp.expand(a[0] * b[1] - a[1] * b[0])


def _to_complex(g: ExactPair) -> complex:
    return complex(float(g[0]), float(g[1]))


def _component_vectors(gens: Sequence[ExactPair]) -> list[list[sp.Rational]]:
    per_gen = [(components(x), components(y)) for x, y in gens]
    keys = sorted({(axis, d) for cx, cy in per_gen for axis, comp in ((0, cx), (1, cy)) for d in comp})
    return [
        [(cx if axis == 0 else cy).get(d, sp.Integer(0)) for axis, d in keys]
        for cx, cy in per_gen
    ]


def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    values = [abs(v) for v in values if v != 0]
    if not values:
        return Fraction(0)
    den = math.lcm(*(v.denominator for v in values))
    num = math.gcd(*(int(v * den) for v in values))
    return Fraction(num, den)


def _fraction(q: sp.Rational) -> Fraction:
    q = sp.Rational(q)
    return Fraction(int(q.p), int(q.q))


def _surd_closure(ds: Iterable[int]) -> list[int]:
    """Squarefree products of the given radicands; a ℚ-basis of ℚ(√d, …)."""
    closed = {1}
    for d in ds:
        closed |= {surd_product(d, e)[1] for e in closed}
    return sorted(closed)


# ── public API ───────────────────────────────────────────────────────────────


def closure(generators: Sequence[object]) -> ClosedSubgroupC:
    """Closed subgroup of ℂ generated by finitely many exact complex numbers."""
    gens = [parse_generator(g) for g in generators]
    gens = [g for g in gens if g[0] != 0 or g[1] != 0]
    if not gens:
        return Zero()

    base = gens[0]
    partner = next((g for g in gens[1:] if _cross(base, g) != 0), None)
    s = 1 if partner is None else 2
    vectors = _component_vectors(gens)
    r = sp.Matrix(vectors).rank()
    log.debug("closure of %d generators: real span %d, rational rank %d", len(gens), s, r)

    if s == 1:
        if r >= 2:
            return Line.through(_to_complex(base))
        v0 = vectors[0]
        k = next(i for i, c in enumerate(v0) if c != 0)
        step = _rational_gcd(_fraction(v[k] / v0[k]) for v in vectors)
        return Cyclic(float(step) * _to_complex(base))

    if r == 2:
        return _lattice_closure(gens, vectors, base, partner)
    return _dense_closure(gens)


def closure_r(generators: Sequence[object]) -> ClosedSubgroupR:
    """Closed subgroup of ℝ generated by finitely many exact reals."""
    for g in generators:
        if isinstance(g, (list, tuple)):
            raise DescriptorError(f"real generator expected, got pair {g!r}")
    c = closure(generators)
    if isinstance(c, Zero):
        return ClosedSubgroupR.trivial()
    if isinstance(c, Cyclic):
        return ClosedSubgroupR.cyclic(abs(c.generator))
    return ClosedSubgroupR.full()


def _lattice_closure(
    gens: Sequence[ExactPair],
    vectors: list[list[sp.Rational]],
    b1: ExactPair,
    b2: ExactPair,
) -> Lattice:
    basis = sp.Matrix.hstack(sp.Matrix(vectors[gens.index(b1)]), sp.Matrix(vectors[gens.index(b2)]))
    coords = []
    for v in vectors:
        sol, params = basis.gauss_jordan_solve(sp.Matrix(v))
        if params.shape[0]:
            raise NumericError("rank-2 generators have a non-unique expansion")
        coords.append((_fraction(sol[0]), _fraction(sol[1])))
    den = math.lcm(*(q.denominator for pair in coords for q in pair))
    cols = sp.Matrix([[int(q1 * den) for q1, _ in coords], [int(q2 * den) for _, q2 in coords]])
    hnf = hermite_normal_form(cols)
    columns = [hnf[:, j] for j in range(hnf.shape[1]) if any(hnf[:, j])]
    if len(columns) != 2:
        raise NumericError(f"expected a rank-2 Hermite form, got {len(columns)} columns")
    w1, w2 = _to_complex(b1), _to_complex(b2)
    z, zp = (complex(int(col[0]) * w1 + int(col[1]) * w2) / den for col in columns)
    return Lattice(z, zp)


def _dense_closure(gens: Sequence[ExactPair]) -> Full | LineCyclic:
    comps = [(components(x), components(y)) for x, y in gens]
    radicands = {d for cx, cy in comps for d in (*cx, *cy)} - {1}
    field = _surd_closure(radicands)
    n = len(field)

    # w = (Σ a_f √f, Σ b_f √f); unknowns ordered a_f then b_f
    def pairing(i: int, unknown: int) -> dict[int, sp.Rational]:
        cx, cy = comps[i]
        coord = cx if unknown < n else cy
        return multiply({field[unknown % n]: sp.Integer(1)}, coord)

    targets = sorted({h for i in range(len(gens)) for u in range(2 * n) for h in pairing(i, u)} - {1})
    rows = []
    for i in range(len(gens)):
        table = [pairing(i, u) for u in range(2 * n)]
        for h in targets:
            rows.append([table[u].get(h, sp.Integer(0)) for u in range(2 * n)])
    system = sp.Matrix(rows) if rows else sp.zeros(1, 2 * n)
    null = system.nullspace()
    log.debug("annihilator search over %d radicands: nullity %d", n, len(null))
    if not null:
        return Full()
    if len(null) > 1:
        raise NumericError(f"annihilator of a dense subgroup has dimension {len(null)}")

    w0 = null[0]
    values = [
        _fraction(sum((pairing(i, u).get(1, sp.Integer(0)) * w0[u] for u in range(2 * n)), sp.Integer(0)))
        for i in range(len(gens))
    ]
    g = _rational_gcd(values)
    if g == 0:
        raise NumericError("annihilator is orthogonal to every generator")
    alpha = sum(float(w0[u]) * math.sqrt(field[u]) for u in range(n)) / float(g)
    beta = sum(float(w0[n + u]) * math.sqrt(field[u]) for u in range(n)) / float(g)
    w = complex(alpha, beta)
    return LineCyclic.from_vectors(1j * w, w / abs(w) ** 2)
