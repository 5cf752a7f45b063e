"""Tests for Heisenberg group arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chabauty.ambient import (
    IDENTITY,
    HeisAutomorphism,
    HeisElement,
    aut_apply,
    dilate,
    heis_commutator,
    heis_mul,
    heis_power,
)
from chabauty.errors import DegenerateBasisError, DomainError

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elements = st.builds(HeisElement, rationals, rationals, rationals)
nonzero = rationals.filter(lambda q: q != 0)


@st.composite
def automorphisms(draw):
    a, b, c, d = (draw(rationals) for _ in range(4))
    if a * d - b * c == 0:
        a, d = a + 1, d + 1
        if a * d - b * c == 0:
            b += 1
    return HeisAutomorphism((a, b, c, d), (draw(rationals), draw(rationals)))


class TestProduct:
    """The group law on ℂ × ℝ."""

    def test_identity(self):
        x = HeisElement(2, -1, 5)
        assert IDENTITY * x == x
        assert x * IDENTITY == x

    def test_one_times_i(self):
        assert heis_mul(HeisElement(1, 0, 0), HeisElement(0, 1, 0)) == HeisElement(1, 1, Fraction(-1, 2))

    def test_inverse(self):
        x = HeisElement(Fraction(1, 3), 2, 7)
        assert x * x.inverse() == IDENTITY
        assert x.inverse() * x == IDENTITY

    def test_power_matches_product(self):
        x = HeisElement(1, 2, Fraction(1, 2))
        assert heis_power(x, 3) == x * x * x
        assert heis_power(x, -2) == x.inverse() * x.inverse()

    @given(elements, elements, elements)
    @settings(max_examples=200, deadline=None)
    def test_associative(self, x, y, z):
        assert (x * y) * z == x * (y * z)

    def test_central_elements(self):
        c = HeisElement(0, 0, 3)
        assert c.is_central
        assert not HeisElement(1, 0, 0).is_central
        x = HeisElement(4, -2, 1)
        assert c * x == x * c


class TestCommutator:
    """[x, y] = (xy)⁻¹(yx) = (0, Im(conj z₁·z₂))."""

    def test_closed_form_values(self):
        assert heis_commutator(HeisElement(1, 0, 5), HeisElement(0, 1, 7)) == HeisElement(0, 0, 1)

    def test_self_commutator(self):
        x = HeisElement(3, 4, 5)
        assert heis_commutator(x, x) == IDENTITY

    def test_collinear(self):
        assert heis_commutator(HeisElement(2, 0, 0), HeisElement(3, 0, 0)) == IDENTITY

    @given(elements, elements)
    @settings(max_examples=1000, deadline=None)
    def test_closed_form_matches_product(self, x, y):
        assert heis_commutator(x, y) == (x * y).inverse() * (y * x)


class TestAutomorphisms:
    """Linear part (z, t) ↦ (Mz, det(M)·t) composed with conjugation."""

    def test_identity(self):
        x = HeisElement(1, 2, 3)
        assert aut_apply(HeisAutomorphism(), x) == x

    def test_rotation(self):
        rot = HeisAutomorphism((0, -1, 1, 0))
        assert aut_apply(rot, HeisElement(1, 0, 1)) == HeisElement(0, 1, 1)

    def test_diagonal_is_dilation(self):
        x = HeisElement(1, 1, 3)
        assert aut_apply(HeisAutomorphism((2, 0, 0, 2)), x) == dilate(2, x) == HeisElement(2, 2, 12)

    def test_conjugation_fixes_projection(self):
        alpha = HeisAutomorphism.conjugation(complex(1, 2))
        x = HeisElement(3, -1, 0)
        assert aut_apply(alpha, x).z == x.z

    def test_conjugation_is_inner(self):
        w = HeisElement(1, 2, 0)
        alpha = HeisAutomorphism.conjugation((1, 2))
        x = HeisElement(Fraction(1, 2), 3, 4)
        assert aut_apply(alpha, x) == w * x * w.inverse()

    def test_singular_rejected(self):
        with pytest.raises(DegenerateBasisError):
            HeisAutomorphism((1, 2, 2, 4))

    @given(automorphisms(), elements, elements)
    @settings(max_examples=1000, deadline=None)
    def test_homomorphism(self, alpha, x, y):
        assert aut_apply(alpha, x * y) == aut_apply(alpha, x) * aut_apply(alpha, y)

    @given(automorphisms(), elements, elements)
    @settings(max_examples=200, deadline=None)
    def test_commutator_scales_by_det(self, alpha, x, y):
        lhs = heis_commutator(aut_apply(alpha, x), aut_apply(alpha, y))
        assert lhs == HeisElement(0, 0, alpha.det * heis_commutator(x, y).t)

    @given(automorphisms(), automorphisms(), elements)
    @settings(max_examples=200, deadline=None)
    def test_composition(self, alpha, beta, x):
        assert alpha.compose(beta)(x) == alpha(beta(x))


class TestDilation:
    """φ_s(z, t) = (sz, s²t)."""

    def test_unit(self):
        x = HeisElement(1, 2, 3)
        assert dilate(1, x) == x

    def test_formula(self):
        assert dilate(2, HeisElement(1, 1, 3)) == HeisElement(2, 2, 12)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            dilate(0, HeisElement(1, 0, 0))
        with pytest.raises(DomainError):
            HeisAutomorphism.dilation(-1)

    @given(nonzero.map(abs), elements, elements)
    @settings(max_examples=200, deadline=None)
    def test_homomorphism(self, s, x, y):
        assert dilate(s, x * y) == dilate(s, x) * dilate(s, y)
