"""Tests for closed subgroups of the Heisenberg group."""

import math
from unittest.mock import patch
from fractions import Fraction

import numpy as np
import pytest

from chabauty.ambient import HeisAutomorphism, HeisElement, heis_commutator
from chabauty.errors import DescriptorError, NumericError, StratumError
from chabauty.euclid import ClosedSubgroupR, Cyclic, Full, Lattice, Line, LineCyclic, Zero, isclose
from chabauty.heisenberg import (
    Central,
    HeisLattice,
    Planar,
    PullbackCenter,
    Trivial,
    aut_apply_lattice,
    center,
    center_index,
    central,
    classify_heis,
    collapsing_lattice,
    collapsing_limit,
    commutator_subgroup,
    dilate_lattice,
    heis_contains,
    heis_dist_points,
    heis_enumerate,
    heis_group_dist_points,
    heis_isclose,
    heis_membership,
    planar,
    project,
    pullback_center,
    standard_lattice,
)


def _generated(n: int, box: int = 3, t_box: int = 6) -> set[tuple]:
    """Elements of ⟨(1, 0), (i, 0), (0, 1/n)⟩ reachable inside a bounding box."""
    gens = [HeisElement(1, 0, 0), HeisElement(0, 1, 0), HeisElement(0, 0, Fraction(1, n))]
    gens += [g.inverse() for g in gens]
    seen = {HeisElement(0, 0, 0)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if abs(y.x) <= box and abs(y.y) <= box and abs(y.t) <= t_box and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return {e.as_tuple() for e in seen}


class TestStandardLattice:
    """Λ_n = ⟨(1, 0), (i, 0), (0, 1/n)⟩."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_membership_matches_generated_group(self, n):
        oracle = _generated(n)
        lat = standard_lattice(n)
        for x in range(-1, 2):
            for y in range(-1, 2):
                for T in range(-2 * n, 2 * n + 1):
                    e = HeisElement(x, y, Fraction(T, 2 * n))
                    assert heis_membership(lat, e) == (e.as_tuple() in oracle), e

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_odd_closed_form(self, n):
        lat = standard_lattice(n)
        for x in range(-2, 3):
            for y in range(-2, 3):
                for T in range(-3 * n, 3 * n + 1):
                    expected = (x * y - T) % 2 == 0
                    assert heis_membership(lat, HeisElement(x, y, Fraction(T, 2 * n))) == expected

    @pytest.mark.parametrize("n", [2, 4])
    def test_even_closed_form(self, n):
        lat = standard_lattice(n)
        for x in range(-2, 3):
            for y in range(-2, 3):
                for m in range(-n, n + 1):
                    assert heis_membership(lat, HeisElement(x, y, Fraction(m, n)))
                assert not heis_membership(lat, HeisElement(x, y, Fraction(1, 2 * n)))

    def test_word_lift(self):
        lat = standard_lattice(1)
        assert heis_membership(lat, HeisElement(1, 1, Fraction(1, 2)))
        assert not heis_membership(lat, HeisElement(1, 1, 0))
        assert lat.word_t(3, 2) == -3

    def test_off_projection(self):
        assert not heis_membership(standard_lattice(2), HeisElement(0.5, 0, 0))

    def test_invalid_index(self):
        with pytest.raises(DescriptorError):
            standard_lattice(0)
        with pytest.raises(DescriptorError):
            HeisLattice(1, 1j, n=0)


class TestLatticeInvariants:
    """Centre, commutator subgroup and central index."""

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_center_and_commutator(self, n):
        lat = standard_lattice(n)
        assert center(lat).sub.step == pytest.approx(1 / n)
        assert commutator_subgroup(lat).sub.step == pytest.approx(1)
        assert center_index(lat) == n
        assert classify_heis(lat) == f"L_{n}(H)"

    def test_commutator_of_generators(self):
        g1, g2, _ = standard_lattice(3).generators()
        c = heis_commutator(g1, g2)
        assert c == HeisElement(0, 0, 1)
        assert heis_contains(commutator_subgroup(standard_lattice(3)), c)

    def test_canonical_lifts(self):
        # (1, 0)⁻⁵ · (5 + i, 0) = (i, 5/2)
        assert heis_isclose(HeisLattice(1, complex(5, 1)), HeisLattice(1, 1j, 0.0, 0.5))
        assert not heis_isclose(HeisLattice(1, complex(5, 1)), HeisLattice(1, 1j))

    def test_projection(self, gaussian):
        assert isclose(project(standard_lattice(4)), gaussian)


class TestCollapsingLattices:
    """Central index n for every k; projections degenerate."""

    @pytest.mark.parametrize("n, k", [(1, 1), (1, 4), (2, 3), (3, 5)])
    def test_shape(self, n, k):
        lat = collapsing_lattice(n, k)
        assert center_index(lat) == n
        assert lat.covolume == pytest.approx(k * n)
        assert center(lat).sub.step == pytest.approx(k)
        assert isclose(project(lat), Lattice(1 / k, 1j * k * k * n))

    def test_limit(self):
        lim = collapsing_limit()
        assert classify_heis(lim) == "C_Z2(H)"
        assert isclose(project(lim), Cyclic(1))

    def test_rejects_bad_parameters(self):
        with pytest.raises(DescriptorError):
            collapsing_lattice(1, 0)

    def test_inconsistent_construction_is_reported(self):
        with patch("chabauty.heisenberg.heis_membership", return_value=False):
            with pytest.raises(NumericError, match="misses generator"):
                collapsing_lattice(1, 3)


class TestProjection:
    """p(S) for planar lattices: commensurable real parts give a cyclic group."""

    def test_step_is_gcd_of_real_parts(self):
        assert isclose(project(Planar(0.0, Lattice(1, complex(1 / 7, 1)))), Cyclic(1 / 7))
        assert isclose(project(Planar(0.0, Lattice(1, complex(1.5, 1)))), Cyclic(0.5))

    def test_denominator_bound(self):
        plane = Planar(0.0, Lattice(1, complex(1 / 7, 1)))
        assert isclose(project(plane, max_denominator=7), Cyclic(1 / 7))
        with pytest.raises(StratumError, match="dense"):
            project(plane, max_denominator=5)

    def test_irrational_ratio_refused(self):
        plane = Planar(0.0, Lattice(1, complex(math.sqrt(2) - 1, 1)))
        with pytest.raises(StratumError):
            project(plane, max_denominator=1000)

    def test_vertical_real_part(self):
        assert isclose(project(Planar(0.0, Lattice(2, 1j))), Cyclic(2))


class TestStrata:
    """Factories pick a unique representation."""

    def test_central(self):
        assert central(ClosedSubgroupR.trivial()) == Trivial()
        assert central(ClosedSubgroupR.full()) == PullbackCenter(Zero())
        assert classify_heis(central(ClosedSubgroupR.cyclic(2))) == "C_Z(H)"

    def test_planar_vertical_cases(self):
        assert planar(0.0, Zero()) == Trivial()
        assert isinstance(planar(0.0, Cyclic(2j)), Central)
        assert planar(0.0, Line(math.pi / 2)) == PullbackCenter(Zero())
        assert classify_heis(planar(0.3, LineCyclic(math.pi / 2, 2))) == "C_RZ(H)"
        assert classify_heis(planar(0.0, Full())) == "C_R2(H)"

    def test_planar_labels(self, gaussian):
        assert classify_heis(planar(0.0, Cyclic(1))) == "C_Z(H)"
        assert classify_heis(planar(0.0, Line(0))) == "C_R(H)"
        assert classify_heis(planar(0.0, LineCyclic(0, 1))) == "C_RZ(H)"
        assert classify_heis(planar(0.0, gaussian)) == "C_Z2(H)"

    def test_pullback_labels(self, gaussian):
        assert classify_heis(pullback_center(gaussian)) == "L_inf(H)"
        assert classify_heis(pullback_center(LineCyclic(0, 1))) == "pullback_RZ"
        assert classify_heis(pullback_center(Full())) == "H"

    def test_planar_angle_wrapped(self):
        p = Planar(math.pi + 0.2, Cyclic(complex(1, 1)))
        assert p.angle == pytest.approx(0.2)
        assert heis_contains(p, HeisElement(-math.cos(0.2), -math.sin(0.2), 1))

    def test_central_requires_cyclic(self):
        with pytest.raises(StratumError):
            Central(ClosedSubgroupR.full())


class TestContainment:
    """Membership across strata."""

    def test_central(self):
        c = central(ClosedSubgroupR.cyclic(2))
        assert heis_contains(c, HeisElement(0, 0, 4))
        assert not heis_contains(c, HeisElement(0, 0, 3))
        assert not heis_contains(c, HeisElement(1, 0, 4))

    def test_planar(self, gaussian):
        p = planar(0.0, gaussian)
        assert heis_contains(p, HeisElement(1, 0, 1))
        assert not heis_contains(p, HeisElement(1, 1, 1))

    def test_pullback(self):
        assert heis_contains(pullback_center(Cyclic(2)), HeisElement(2, 0, 17.3))
        assert not heis_contains(pullback_center(Cyclic(2)), HeisElement(1, 0, 0))

    def test_trivial(self):
        assert heis_contains(Trivial(), HeisElement(0, 0, 0))
        assert not heis_contains(Trivial(), HeisElement(0, 0, 1))


class TestEnumeration:
    """Supports inside the coordinate ball."""

    def test_standard_lattice_unit_ball(self):
        pts = heis_enumerate(standard_lattice(1), 1.0).points
        assert len(pts) == 7

    def test_all_points_are_members(self):
        lat = standard_lattice(3)
        for x, y, t in heis_enumerate(lat, 2.0).points:
            assert heis_membership(lat, HeisElement(x, y, t), 1e-9)

    def test_central(self):
        assert len(heis_enumerate(central(ClosedSubgroupR.cyclic(0.5)), 1.0).points) == 5

    def test_pullback_segments(self):
        sup = heis_enumerate(pullback_center(Cyclic(1)), 2.0)
        assert len(sup.segments) == 5
        assert not sup.is_discrete

    def test_radius_must_be_positive(self):
        with pytest.raises(StratumError):
            heis_enumerate(Trivial(), 0)


class TestDistances:
    """Coordinate and group-translate distances."""

    def test_lattice(self):
        lat = standard_lattice(1)
        d = heis_dist_points(lat, np.array([[0.5, 0, 0], [0, 0, 0.5], [1, 1, -0.5]]))
        assert d == pytest.approx([0.5, 0.5, 0])

    def test_group_distance_vanishes_on_members(self):
        lat = standard_lattice(2)
        assert heis_group_dist_points(lat, np.array([[1, 1, 0.0], [2, -1, 0.5]])) == pytest.approx([0, 0], abs=1e-12)

    def test_group_distance_of_central_offset(self):
        lat = standard_lattice(1)
        assert heis_group_dist_points(lat, np.array([[0, 0, 0.25]])) == pytest.approx([0.25])

    def test_pullback_ignores_t(self):
        d = heis_dist_points(pullback_center(Cyclic(1)), np.array([[0.25, 0, 9.0]]))
        assert d == pytest.approx([0.25])

    def test_planar(self):
        p = planar(0.0, Lattice(1, 1j))
        assert heis_dist_points(p, np.array([[0, 0.3, 0]])) == pytest.approx([0.3])


class TestAutomorphisms:
    """Images of lattices."""

    def test_rotation_preserves_standard_lattice(self):
        lat = standard_lattice(2)
        rot = HeisAutomorphism((0, -1, 1, 0))
        assert heis_isclose(aut_apply_lattice(rot, lat), lat)

    def test_dilation(self):
        img = dilate_lattice(standard_lattice(1), 2)
        assert img.covolume == pytest.approx(4)
        assert img.central_step == pytest.approx(4)
        assert heis_membership(img, HeisElement(2, 2, -2))

    def test_index_is_invariant(self):
        alpha = HeisAutomorphism((2, 1, 1, 1), (0.5, 0.25))
        assert center_index(aut_apply_lattice(alpha, standard_lattice(3))) == 3

    def test_different_index_not_close(self):
        assert not heis_isclose(standard_lattice(1), standard_lattice(2))
