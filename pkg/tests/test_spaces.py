"""Tests for the ambient-space plugins."""

import numpy as np
import pytest

from chabauty.config import MetricConfig
from chabauty.errors import DescriptorError
from chabauty.euclid import ClosedSubgroupR, Cyclic, Full, Lattice, LineCyclic, Segment, Zero
from chabauty.heisenberg import collapsing_limit, pullback_center, standard_lattice
from chabauty.spaces import (
    HEISENBERG,
    LINE,
    PLANE,
    get_space,
    heis_is_discrete,
    sampled_violation,
    segment_sup,
    uncovered_point,
)


P0, P1 = np.array([0.0, 0.0]), np.array([1.0, 0.0])
ENDS = np.array([[0.0, 0.0], [1.0, 0.0]])


class TestUncoveredPoint:
    """Covering a segment by closed ε-balls."""

    def test_gap_between_balls(self):
        hit = uncovered_point(P0, P1, ENDS, 0.4)
        assert hit == pytest.approx([0.5, 0.0])

    def test_covered(self):
        assert uncovered_point(P0, P1, ENDS, 0.6) is None

    def test_no_centres(self):
        assert uncovered_point(P0, P1, np.zeros((0, 2)), 0.4) == pytest.approx([0, 0])

    def test_uncovered_ends(self):
        assert uncovered_point(P0, P1, np.array([[0.0, 0.0]]), 0.4) == pytest.approx([1, 0])
        assert uncovered_point(P0, P1, np.array([[1.0, 0.0]]), 0.4) == pytest.approx([0, 0])

    def test_degenerate_segment(self):
        p = np.array([0.0, 0.0, 1.0])
        assert uncovered_point(p, p, np.array([[0.0, 0.0, 1.2]]), 0.3) is None
        assert uncovered_point(p, p, np.array([[0.0, 0.0, 2.0]]), 0.3) == pytest.approx(p)


class TestPlaneGeometry:
    """Exact suprema over segments."""

    def test_segment_against_lattice(self, gaussian):
        hit = segment_sup(0j, complex(1, 1), gaussian, 0.5, 10_000)
        assert hit is not None
        assert hit[1] == pytest.approx(2**-0.5)

    def test_segment_against_line_cyclic(self):
        hit = segment_sup(0j, 3j, LineCyclic(0, 1), 0.4, 10_000)
        assert hit[1] == pytest.approx(0.5)
        assert segment_sup(0j, 3j, LineCyclic(0, 1), 0.6, 10_000) is None

    def test_full_plane_covers(self, gaussian):
        assert PLANE.violation(gaussian, Full(), 10, 0.01, MetricConfig()) is None

    def test_ball_witness(self, gaussian):
        w = PLANE.violation(Full(), gaussian, 3, 0.5, MetricConfig())
        assert w.distance == pytest.approx(2**-0.5)

    def test_line_space(self):
        cfg = MetricConfig()
        assert LINE.violation(ClosedSubgroupR.cyclic(1), ClosedSubgroupR.cyclic(1.05), 3, 0.2, cfg) is None
        w = LINE.violation(ClosedSubgroupR.full(), ClosedSubgroupR.cyclic(1), 3, 0.4, cfg)
        assert len(w.point) == 1
        assert w.distance == pytest.approx(0.5)


class TestSampling:
    """Grid refinement decided by the Lipschitz bound."""

    def test_finds_far_point(self):
        seg = Segment((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
        w = sampled_violation("segment", seg, lambda p: np.abs(p[:, 0]), 0.5, MetricConfig())
        assert w.distance == pytest.approx(1)

    def test_refines_then_clears(self):
        seg = Segment((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
        assert sampled_violation("segment", seg, lambda p: 0.5 * np.abs(p[:, 0]), 0.6, MetricConfig()) is None

    def test_ball_against_lattice(self):
        assert HEISENBERG.violation(pullback_center(Full()), standard_lattice(4), 1.5, 0.8, MetricConfig()) is None


class TestHeisenbergSpace:
    """Discreteness and witnesses in H."""

    def test_discreteness(self, gaussian):
        assert heis_is_discrete(standard_lattice(2))
        assert heis_is_discrete(collapsing_limit())
        assert not heis_is_discrete(pullback_center(gaussian))

    def test_point_witness(self):
        w = HEISENBERG.violation(standard_lattice(2), standard_lattice(1), 2, 0.3, MetricConfig())
        assert w is not None
        assert w.distance == pytest.approx(0.5)

    def test_pullback_witness(self):
        w = HEISENBERG.violation(pullback_center(Cyclic(1)), pullback_center(Zero()), 2, 0.3, MetricConfig())
        assert w.distance > 0.3

    def test_group_distance_flag(self):
        cfg = MetricConfig()
        w = HEISENBERG.violation(standard_lattice(2), standard_lattice(1), 2, 0.5, cfg, group=True, closed=True)
        assert w is not None


class TestRegistry:
    """Lookup by name."""

    def test_case_insensitive(self):
        assert get_space("c") is PLANE
        assert get_space("H") is HEISENBERG

    def test_unknown(self):
        with pytest.raises(DescriptorError):
            get_space("Q")

    def test_lattice_types(self):
        assert PLANE.isclose(Lattice(1, 1j), Lattice(1, complex(1, 1)), 1e-9)
