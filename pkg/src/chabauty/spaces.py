"""Ambient-space plugins for the Chabauty metric engine — ℝ, ℂ and H.

A plugin answers one question for the engine: is there a point of F₁ in the
closed ball of radius ρ whose distance to F₂ exceeds ε?  ``violation``
returns a :class:`Witness` for such a point, or None.  ℝ and ℂ are handled
exactly.  In H, points, segments against discrete sets, and every piece
against a pullback p⁻¹(C) are exact; the remaining continuous pieces are
sampled on a grid refined until the 1-Lipschitz bound decides the question.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np
from scipy.spatial import cKDTree

from chabauty.config import MetricConfig
from chabauty.errors import DescriptorError, EnumerationOverflow, NumericError, StratumError
from chabauty.euclid import (
    ClosedSubgroupC,
    ClosedSubgroupR,
    Cyclic,
    Full,
    Lattice,
    Line,
    LineCyclic,
    Segment,
    Support,
    Zero,
    covering_radius,
    deep_hole,
    dist_points,
    enumerate_points,
    is_discrete,
    isclose,
)
from chabauty.heisenberg import (
    Central,
    HeisLattice,
    HeisSubgroup,
    Planar,
    PullbackCenter,
    Trivial,
    heis_dist_points,
    heis_enumerate,
    heis_group_dist_points,
    heis_isclose,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    point: tuple[float, ...]
    distance: float


class AmbientSpace(Protocol):
    name: str
    dim: int

    def norm(self, x: np.ndarray) -> float: ...

    def support(self, f, radius: float, cap: int) -> Support: ...

    def dist_points(self, f, pts: np.ndarray) -> np.ndarray: ...

    def isclose(self, f, g, tol: float) -> bool: ...

    def violation(
        self, f1, f2, radius: float, eps: float, cfg: MetricConfig, group: bool = False, closed: bool = False
    ) -> Witness | None: ...


def _exceeds(d: float, eps: float, closed: bool) -> bool:
    return d >= eps if closed else d > eps


# ── shared geometry ──────────────────────────────────────────────────────────


def uncovered_point(p0: np.ndarray, p1: np.ndarray, centres: np.ndarray, eps: float) -> np.ndarray | None:
    """A point of the segment [p0, p1] farther than ``eps`` from every centre,
    or None if the closed ε-balls around the centres cover it."""
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    length = float(np.linalg.norm(p1 - p0))
    if length == 0:
        if len(centres) and np.min(np.linalg.norm(centres - p0, axis=1)) <= eps:
            return None
        return p0
    e = (p1 - p0) / length
    rel = np.asarray(centres, float).reshape(-1, len(p0)) - p0
    foot = rel @ e
    perp2 = np.maximum(np.einsum("ij,ij->i", rel, rel) - foot**2, 0.0)
    hit = perp2 <= eps * eps
    half = np.sqrt(eps * eps - perp2[hit])
    starts, ends = foot[hit] - half, foot[hit] + half
    keep = (ends >= 0) & (starts <= length)
    starts, ends = starts[keep], ends[keep]
    order = np.argsort(starts, kind="stable")
    reach = None
    for s, t in zip(starts[order], ends[order]):
        if reach is None:
            if s > 0:
                return p0
            reach = t
        elif s > reach:
            return p0 + (reach + s) / 2 * e
        else:
            reach = max(reach, t)
        if reach >= length:
            return None
    return p0 if reach is None else p1


def _sample(kind: str, piece, h: float) -> tuple[np.ndarray, float]:
    """Grid points of a segment, flat disk or centred ball with spacing ≤ h,
    and the radius within which every point of the piece has a sample."""
    if kind == "segment":
        p0, p1 = np.asarray(piece.start, float), np.asarray(piece.end, float)
        m = max(2, int(math.ceil(np.linalg.norm(p1 - p0) / h)) + 1)
        s = np.linspace(0.0, 1.0, m)[:, None]
        step = np.linalg.norm(p1 - p0) / (m - 1)
        return p0 + s * (p1 - p0), step / 2
    if kind == "disk":
        r = piece.radius
        m = max(2, int(math.ceil(2 * r / h)) + 1)
        axis = np.linspace(-r, r, m)
        u, v = (g.ravel() for g in np.meshgrid(axis, axis))
        scale = np.minimum(1.0, r / np.maximum(np.hypot(u, v), 1e-300))
        u, v = u * scale, v * scale
        pts = np.asarray(piece.center) + u[:, None] * np.asarray(piece.e1) + v[:, None] * np.asarray(piece.e2)
        return pts, (2 * r / (m - 1)) * math.sqrt(2) / 2
    r = piece
    m = max(2, int(math.ceil(2 * r / h)) + 1)
    axis = np.linspace(-r, r, m)
    pts = np.stack([g.ravel() for g in np.meshgrid(axis, axis, axis)], axis=1)
    norms = np.linalg.norm(pts, axis=1)
    pts = pts * np.minimum(1.0, r / np.maximum(norms, 1e-300))[:, None]
    return pts, (2 * r / (m - 1)) * math.sqrt(3) / 2


def sampled_violation(
    kind: str,
    piece,
    dist: Callable[[np.ndarray], np.ndarray],
    eps: float,
    cfg: MetricConfig,
    lipschitz: float = 1.0,
    closed: bool = False,
) -> Witness | None:
    h = cfg.mesh
    while True:
        pts, slack = _sample(kind, piece, h)
        if len(pts) > cfg.max_points:
            raise EnumerationOverflow(len(pts), cfg.max_points)
        d = dist(pts)
        k = int(np.argmax(d))
        if _exceeds(float(d[k]), eps, closed):
            return Witness(tuple(float(v) for v in pts[k]), float(d[k]))
        if d[k] + lipschitz * slack < eps:
            return None
        if h / 2 < cfg.min_mesh:
            if cfg.strict:
                raise NumericError(
                    f"{kind} piece undecided at mesh {h:.3g}: sampled distance {float(d[k]):.6g} vs eps {eps:.6g}",
                    residual=float(eps - d[k]),
                )
            log.warning(
                "%s piece undecided at mesh %.3g: sampled distance %.6g vs eps %.6g", kind, h, float(d[k]), eps
            )
            return None
        log.debug("refining %s mesh to %.3g (max %.6g, eps %.6g)", kind, h / 2, float(d[k]), eps)
        h /= 2


# ── ℂ ────────────────────────────────────────────────────────────────────────


def _disk_sup(c: ClosedSubgroupC, radius: float) -> tuple[complex, float]:
    """Farthest point from C inside the closed disk |x| ≤ radius, and its distance."""
    match c:
        case Full():
            return 0j, 0.0
        case Zero():
            return complex(radius), radius
        case Cyclic(generator=g):
            return radius * 1j * g / abs(g), radius
        case Line():
            return radius * 1j * c.direction, radius
        case LineCyclic():
            if radius <= c.height / 2:
                return radius * 1j * c.direction, radius
            return c.height / 2 * 1j * c.direction, c.height / 2
        case Lattice():
            hole = deep_hole(c)
            mu = abs(hole)
            if radius <= mu:
                return radius * hole / mu, radius
            return hole, mu
    raise StratumError(f"not a closed subgroup of C: {c!r}")


def segment_sup(p0: complex, p1: complex, c: ClosedSubgroupC, eps: float, cap: int) -> tuple[complex, float] | None:
    """A point of [p0, p1] farther than ``eps`` from C (exact), else None."""
    match c:
        case Full():
            return None
        case Line() | LineCyclic():
            ends = dist_points(c, np.array([p0, p1]))
            best = (p0, float(ends[0])) if ends[0] >= ends[1] else (p1, float(ends[1]))
            if isinstance(c, LineCyclic):
                u, h = c.direction, c.height
                q0, q1 = (np.conj(u) * p0).imag, (np.conj(u) * p1).imag
                lo, hi = min(q0, q1), max(q0, q1)
                mid = h * (math.floor(lo / h - 0.5) + 1.5)
                if lo <= mid <= hi and q1 != q0:
                    x = p0 + (mid - q0) / (q1 - q0) * (p1 - p0)
                    best = (x, h / 2)
            return best if best[1] > eps else None
    reach = max(abs(p0), abs(p1)) + eps
    pts = enumerate_points(c, reach, cap).points
    hit = uncovered_point(np.array([p0.real, p0.imag]), np.array([p1.real, p1.imag]), pts, eps)
    if hit is None:
        return None
    x = complex(hit[0], hit[1])
    return x, float(dist_points(c, np.array([x]))[0])


class PlaneSpace:
    """ℂ with the Euclidean norm."""

    name = "C"
    dim = 2

    def norm(self, x) -> float:
        return float(np.linalg.norm(x))

    def support(self, f: ClosedSubgroupC, radius: float, cap: int) -> Support:
        return enumerate_points(f, radius, cap)

    def dist_points(self, f: ClosedSubgroupC, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return dist_points(f, pts[:, 0] + 1j * pts[:, 1])

    def group_dist_points(self, f: ClosedSubgroupC, pts: np.ndarray) -> np.ndarray:
        return self.dist_points(f, pts)

    def isclose(self, f: ClosedSubgroupC, g: ClosedSubgroupC, tol: float) -> bool:
        return isclose(f, g, tol)

    def violation(
        self,
        f1: ClosedSubgroupC,
        f2: ClosedSubgroupC,
        radius: float,
        eps: float,
        cfg: MetricConfig,
        group: bool = False,
        closed: bool = False,
    ) -> Witness | None:
        if radius < 0 or isinstance(f2, Full):
            return None
        sup = enumerate_points(f1, radius, cfg.max_points) if radius > 0 else Support(2, np.zeros((1, 2)))
        if len(sup.points):
            d = self.dist_points(f2, sup.points)
            k = int(np.argmax(d))
            if _exceeds(float(d[k]), eps, closed):
                return Witness(tuple(float(v) for v in sup.points[k]), float(d[k]))
        for sg in sup.segments:
            hit = segment_sup(complex(*sg.start), complex(*sg.end), f2, eps, cfg.max_points)
            if hit is not None and _exceeds(hit[1], eps, closed):
                return Witness((hit[0].real, hit[0].imag), hit[1])
        if sup.ball is not None:
            x, d = _disk_sup(f2, sup.ball)
            if _exceeds(d, eps, closed):
                return Witness((x.real, x.imag), d)
        return None


# ── ℝ ────────────────────────────────────────────────────────────────────────


class LineSpace:
    """ℝ, embedded in ℂ as the real axis."""

    name = "R"
    dim = 1

    def __init__(self) -> None:
        self._plane = PlaneSpace()

    def norm(self, x) -> float:
        return float(np.linalg.norm(x))

    def support(self, f: ClosedSubgroupR, radius: float, cap: int) -> Support:
        sup = self._plane.support(f.to_complex(), radius, cap)
        segments = [Segment((sg.start[0],), (sg.end[0],)) for sg in sup.segments]
        return Support(1, sup.points[:, :1], segments)

    def dist_points(self, f: ClosedSubgroupR, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, float).reshape(-1, 1)
        return self._plane.dist_points(f.to_complex(), np.column_stack([pts[:, 0], np.zeros(len(pts))]))

    def group_dist_points(self, f: ClosedSubgroupR, pts: np.ndarray) -> np.ndarray:
        return self.dist_points(f, pts)

    def isclose(self, f: ClosedSubgroupR, g: ClosedSubgroupR, tol: float) -> bool:
        return isclose(f.to_complex(), g.to_complex(), tol)

    def violation(
        self,
        f1: ClosedSubgroupR,
        f2: ClosedSubgroupR,
        radius: float,
        eps: float,
        cfg: MetricConfig,
        group: bool = False,
        closed: bool = False,
    ) -> Witness | None:
        w = self._plane.violation(f1.to_complex(), f2.to_complex(), radius, eps, cfg, group, closed)
        return None if w is None else Witness(w.point[:1], w.distance)


# ── H ────────────────────────────────────────────────────────────────────────


def heis_is_discrete(s: HeisSubgroup) -> bool:
    if isinstance(s, Planar):
        return is_discrete(s.plane)
    return isinstance(s, (Trivial, Central, HeisLattice))


class HeisenbergSpace:
    """H with the Euclidean norm on coordinates (x, y, t)."""

    name = "H"
    dim = 3

    def norm(self, x) -> float:
        return float(np.linalg.norm(x))

    def support(self, f: HeisSubgroup, radius: float, cap: int) -> Support:
        return heis_enumerate(f, radius, cap)

    def dist_points(self, f: HeisSubgroup, pts: np.ndarray) -> np.ndarray:
        return heis_dist_points(f, pts)

    def group_dist_points(self, f: HeisSubgroup, pts: np.ndarray) -> np.ndarray:
        return heis_group_dist_points(f, pts)

    def isclose(self, f: HeisSubgroup, g: HeisSubgroup, tol: float) -> bool:
        return heis_isclose(f, g, tol)

    def violation(
        self,
        f1: HeisSubgroup,
        f2: HeisSubgroup,
        radius: float,
        eps: float,
        cfg: MetricConfig,
        group: bool = False,
        closed: bool = False,
    ) -> Witness | None:
        if radius < 0 or (isinstance(f2, PullbackCenter) and isinstance(f2.base, Full)):
            return None
        sup = heis_enumerate(f1, radius, cfg.max_points) if radius > 0 else Support(3, np.zeros((1, 3)))
        dist = self.group_dist_points if group else self.dist_points
        discrete = heis_is_discrete(f2)
        # points of f2 are only needed against point and open segment pieces
        needs_near = discrete and not group and (len(sup.points) > 0 or (bool(sup.segments) and not closed))
        near = heis_enumerate(f2, radius + eps, cfg.max_points).points if needs_near else None

        if len(sup.points):
            if discrete and not group:
                tree = cKDTree(near) if len(near) else None
                d = np.full(len(sup.points), math.inf) if tree is None else tree.query(sup.points)[0]
            else:
                d = dist(f2, sup.points)
            k = int(np.argmax(d))
            if _exceeds(float(d[k]), eps, closed):
                p = sup.points[k]
                exact = float(dist(f2, p[None, :])[0])
                return Witness(tuple(float(v) for v in p), exact)

        if isinstance(f2, PullbackCenter):
            return self._pullback_violation(sup, f2.base, eps, cfg, closed)

        lipschitz = 1.0 + radius if group else 1.0
        for sg in sup.segments:
            if discrete and not group and not closed:
                hit = uncovered_point(np.array(sg.start), np.array(sg.end), near, eps)
                if hit is not None:
                    return Witness(tuple(float(v) for v in hit), float(dist(f2, hit[None, :])[0]))
                continue
            w = sampled_violation("segment", sg, lambda p: dist(f2, p), eps, cfg, lipschitz, closed)
            if w is not None:
                return w
        for disk in sup.disks:
            w = sampled_violation("disk", disk, lambda p: dist(f2, p), eps, cfg, lipschitz, closed)
            if w is not None:
                return w
        if sup.ball is not None:
            return self._ball_violation(sup.ball, f2, dist, eps, cfg, lipschitz, group, closed)
        return None

    def _pullback_violation(
        self, sup: Support, base: ClosedSubgroupC, eps: float, cfg: MetricConfig, closed: bool
    ) -> Witness | None:
        """Distance to p⁻¹(C) only sees the projection to ℂ."""
        pieces: list[tuple[np.ndarray, np.ndarray]] = [(np.array(sg.start), np.array(sg.end)) for sg in sup.segments]
        for disk in sup.disks:
            c, e1 = np.asarray(disk.center), np.asarray(disk.e1)
            pieces.append((c - disk.radius * e1, c + disk.radius * e1))
        for p0, p1 in pieces:
            z0, z1 = complex(p0[0], p0[1]), complex(p1[0], p1[1])
            if abs(z1 - z0) <= 1e-15:
                d = float(dist_points(base, np.array([z0]))[0])
                if _exceeds(d, eps, closed):
                    return Witness(tuple(float(v) for v in p0), d)
                continue
            hit = segment_sup(z0, z1, base, eps, cfg.max_points)
            if hit is not None and _exceeds(hit[1], eps, closed):
                frac = abs(hit[0] - z0) / abs(z1 - z0)
                p = p0 + frac * (p1 - p0)
                return Witness(tuple(float(v) for v in p), hit[1])
        if sup.ball is not None:
            x, d = _disk_sup(base, sup.ball)
            if _exceeds(d, eps, closed):
                return Witness((x.real, x.imag, 0.0), d)
        return None

    def _ball_violation(self, radius, f2, dist, eps, cfg, lipschitz, group, closed) -> Witness | None:
        if isinstance(f2, (Trivial, Central)) and not group:
            return Witness((radius, 0.0, 0.0), radius) if _exceeds(radius, eps, closed) else None
        if isinstance(f2, HeisLattice) and not group:
            bound = math.hypot(covering_radius(f2.projection), f2.central_step / 2)
            if bound < eps or (bound == eps and not closed):
                return None
        return sampled_violation("ball", radius, lambda p: dist(f2, p), eps, cfg, lipschitz, closed)


LINE = LineSpace()
PLANE = PlaneSpace()
HEISENBERG = HeisenbergSpace()

SPACES: dict[str, AmbientSpace] = {"R": LINE, "C": PLANE, "H": HEISENBERG}


def get_space(name: str) -> AmbientSpace:
    try:
        return SPACES[name.upper()]
    except KeyError:
        raise DescriptorError(f"unknown space {name!r}, expected one of {sorted(SPACES)}") from None
