"""Closed subgroups of the Heisenberg group H.

Representations, each canonical:

* :class:`Trivial`
* :class:`Central` — a cyclic subgroup of the centre Z(H) = {0} × ℝ
* :class:`Planar` — an abelian subgroup inside ℝu × ℝ, written as a closed
  subgroup P of ℂ through the frame (s, t) ↦ (s·u, t) ↔ s + it
* :class:`PullbackCenter` — p⁻¹(C) for a closed subgroup C of ℂ
* :class:`HeisLattice` — generated by lifts (z, t), (z′, t′) of a positively
  oriented basis of L = p(Λ) and the central element (0, covol(L)/n)

The factories :func:`central`, :func:`planar` and :func:`pullback_center`
pick the right representation, so a subgroup has exactly one.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar

import numpy as np

from chabauty.ambient import HeisAutomorphism, HeisElement, aut_apply
from chabauty.errors import DescriptorError, EnumerationOverflow, NumericError, StratumError
from chabauty.euclid import (
    DEFAULT_CAP,
    ClosedSubgroupC,
    ClosedSubgroupR,
    Cyclic,
    Disk,
    Full,
    Lattice,
    Line,
    LineCyclic,
    Segment,
    Support,
    Zero,
    canonical_basis,
    canonical_tol,
    contains,
    dist_points,
    enumerate_points,
    isclose,
    lattice_coordinates,
    lattice_coords,
    linear_image,
)

log = logging.getLogger(__name__)

_T_AXIS = (0.0, 0.0, 1.0)


# ── lattices ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class HeisLattice:
    z: complex
    zp: complex
    t: float = 0.0
    tp: float = 0.0
    n: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DescriptorError(f"central index must be a positive integer, got {self.n!r}")
        n = int(self.n)
        z, zp = complex(self.z), complex(self.zp)
        w, wp, ((a, b), (c, d)) = canonical_basis(z, zp)
        omega = (z.conjugate() * zp).imag
        step = abs(omega) / n
        t, tp = float(self.t), float(self.tp)

        def lift(p: int, q: int) -> float:
            # t-part of (z, t)^p · (z′, t′)^q
            return _wrap(p * t + q * tp - 0.5 * p * q * omega, step)

        object.__setattr__(self, "z", w)
        object.__setattr__(self, "zp", wp)
        object.__setattr__(self, "t", lift(a, b))
        object.__setattr__(self, "tp", lift(c, d))
        object.__setattr__(self, "n", n)

    @property
    def projection(self) -> Lattice:
        return Lattice(self.z, self.zp)

    @property
    def covolume(self) -> float:
        return (self.z.conjugate() * self.zp).imag

    @property
    def central_step(self) -> float:
        return self.covolume / self.n

    @property
    def stratum(self) -> str:
        return f"L_{self.n}(H)"

    def word_t(self, a, b):
        """t-coordinate of (z, t)^a · (z′, t′)^b; broadcasts over arrays."""
        return a * self.t + b * self.tp - 0.5 * a * b * self.covolume

    def generators(self) -> tuple[HeisElement, HeisElement, HeisElement]:
        return (
            HeisElement.from_complex(self.z, self.t),
            HeisElement.from_complex(self.zp, self.tp),
            HeisElement(0.0, 0.0, self.central_step),
        )


def _wrap(value: float, step: float) -> float:
    r = value - step * math.floor(value / step)
    if r >= step * (1 - 1e-12) or r < 0:
        r = 0.0
    return r


# ── the other strata ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Trivial:
    stratum: ClassVar[str] = "e"


@dataclass(frozen=True)
class Central:
    """A cyclic subgroup {0} × σℤ of the centre."""

    sub: ClosedSubgroupR
    stratum: ClassVar[str] = "C_Z(H)"

    def __post_init__(self) -> None:
        if self.sub.kind != "cyclic":
            raise StratumError(f"use central() for the {self.sub.kind} subgroup of the centre")


_PLANAR_LABELS = {"cyclic": "C_Z(H)", "line": "C_R(H)", "line_cyclic": "C_RZ(H)", "lattice": "C_Z2(H)"}
_PULLBACK_LABELS = {
    "zero": "C_R(H)",
    "cyclic": "C_RZ(H)",
    "line": "C_R2(H)",
    "line_cyclic": "pullback_RZ",
    "lattice": "L_inf(H)",
    "full": "H",
}


@dataclass(frozen=True)
class Planar:
    """{(s·u, t) : s + it ∈ plane} with u = e^{i·angle}, angle ∈ [0, π)."""

    angle: float
    plane: ClosedSubgroupC

    def __post_init__(self) -> None:
        angle = math.fmod(float(self.angle), 2 * math.pi)
        if angle < 0:
            angle += 2 * math.pi
        plane = self.plane
        if angle >= 2 * math.pi - 1e-12:
            angle = 0.0
        elif angle >= math.pi - 1e-12:
            angle = max(angle - math.pi, 0.0)
            plane = linear_image(plane, (-1, 0, 0, 1))
        object.__setattr__(self, "angle", angle)
        object.__setattr__(self, "plane", plane)

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.angle)

    @property
    def stratum(self) -> str:
        return _PLANAR_LABELS[self.plane.stratum]


@dataclass(frozen=True)
class PullbackCenter:
    base: ClosedSubgroupC

    @property
    def stratum(self) -> str:
        return _PULLBACK_LABELS[self.base.stratum]


HeisSubgroup = Trivial | Central | Planar | PullbackCenter | HeisLattice


def central(sub: ClosedSubgroupR) -> HeisSubgroup:
    if sub.kind == "trivial":
        return Trivial()
    if sub.kind == "full":
        return PullbackCenter(Zero())
    return Central(sub)


def pullback_center(c: ClosedSubgroupC) -> PullbackCenter:
    """p⁻¹(C) = C × ℝ."""
    return PullbackCenter(c)


def _vertical(v: complex, tol: float | None = None) -> bool:
    tol = canonical_tol() if tol is None else tol
    return abs(v.real) <= tol * abs(v)


def planar(angle: float, plane: ClosedSubgroupC) -> HeisSubgroup:
    """Abelian subgroup of ℝu × ℝ; subgroups inside or containing the centre
    are returned in their central or pullback form."""
    p = Planar(angle, plane)
    u, plane = p.direction, p.plane
    match plane:
        case Zero():
            return Trivial()
        case Cyclic(generator=g) if _vertical(g):
            return central(ClosedSubgroupR.cyclic(abs(g)))
        case Line() if _vertical(plane.direction):
            return PullbackCenter(Zero())
        case LineCyclic() if _vertical(plane.direction):
            return PullbackCenter(Cyclic(plane.height * u))
        case Full():
            return PullbackCenter(Line.through(u))
    return p


def standard_lattice(n: int) -> HeisLattice:
    """The lattice generated by (1, 0), (i, 0) and (0, 1/n)."""
    if n < 1:
        raise DescriptorError(f"n must be positive, got {n}")
    return HeisLattice(1, 1j, 0.0, 0.0, n)


def collapsing_lattice(n: int, k: int) -> HeisLattice:
    """The lattice generated by (1, 0), (−1/k, 1) and (−ik²n, 0).

    p(Λ) = (1/k)ℤ ⊕ ℤ·ik²n has covolume kn and Z(Λ) = {0} × kℤ, so Λ has
    central index n for every k.  As k → ∞ these converge to ℤ × ℤ in ℝ × ℝ.
    """
    if n < 1 or k < 1:
        raise DescriptorError(f"n and k must be positive, got n={n}, k={k}")
    lat = HeisLattice(1 / k, 1j * k * k * n, -1.0, 0.0, n)
    for g in (HeisElement(1, 0, 0), HeisElement(-1 / k, 0, 1), HeisElement(0, -k * k * n, 0), HeisElement(0, 0, k)):
        if not heis_membership(lat, g):
            raise NumericError(f"collapsing lattice (n={n}, k={k}) misses generator {g}")
    if lat.n != n:
        raise NumericError(f"collapsing lattice (n={n}, k={k}) has central index {lat.n}")
    return lat


def collapsing_limit() -> Planar:
    return Planar(0.0, Lattice(1, 1j))


# ── invariants ───────────────────────────────────────────────────────────────


def center(lat: HeisLattice) -> Central:
    """Z(Λ) = Λ ∩ Z(H)."""
    return Central(ClosedSubgroupR.cyclic(lat.central_step))


def commutator_subgroup(lat: HeisLattice) -> Central:
    """[Λ, Λ] = {0} × covol(p(Λ))·ℤ."""
    return Central(ClosedSubgroupR.cyclic(lat.covolume))


def center_index(lat: HeisLattice) -> int:
    return lat.n


def classify_heis(s: HeisSubgroup) -> str:
    return s.stratum


def project(s: HeisSubgroup, tol: float | None = None, max_denominator: int = 10**6) -> ClosedSubgroupC:
    """p(S) for the subgroups whose projection is closed.

    For a planar lattice the projection onto ℝu is generated by the real parts
    s₁, s₂ of its basis.  They count as commensurable when s₂/s₁ lies within
    ``tol`` (relative) of some p/q in lowest terms with q ≤ ``max_denominator``;
    the projection is then the cyclic group of step |s₁|/q.  Any other ratio is
    treated as irrational and the projection, dense in the line, is refused.
    """
    tol = canonical_tol() if tol is None else tol
    match s:
        case Trivial() | Central():
            return Zero()
        case HeisLattice():
            return s.projection
        case PullbackCenter(base=c):
            return c
        case Planar(plane=Cyclic(generator=g)):
            return Cyclic(g.real * s.direction)
        case Planar(plane=Line() | LineCyclic()):
            return Line.through(s.direction)
        case Planar(plane=Lattice() as lat):
            s1, s2 = lat.z.real, lat.zp.real
            if abs(s1) <= tol:
                return Cyclic(s2 * s.direction)
            if abs(s2) <= tol:
                return Cyclic(s1 * s.direction)
            ratio = Fraction(s2 / s1).limit_denominator(max_denominator)
            if abs(float(ratio) - s2 / s1) > tol * max(1.0, abs(s2 / s1)):
                raise StratumError(f"projection of {s!r} is dense in a line, not closed")
            step = abs(s1) / ratio.denominator
            return Cyclic(step * s.direction)
    raise StratumError(f"not a closed subgroup of H: {s!r}")


# ── membership ───────────────────────────────────────────────────────────────


def _lattice_point(lat: HeisLattice, x: complex, tol: float) -> tuple[int, int] | None:
    a, b = lattice_coords(lat.projection, np.array([x]))
    a, b = int(round(a[0])), int(round(b[0]))
    if abs(x - (a * lat.z + b * lat.zp)) > tol * max(1.0, abs(x)):
        return None
    return a, b


def heis_membership(lat: HeisLattice, x: HeisElement, tol: float | None = None) -> bool:
    tol = canonical_tol() if tol is None else tol
    ab = _lattice_point(lat, complex(float(x.x), float(x.y)), tol)
    if ab is None:
        return False
    rest = float(x.t) - lat.word_t(*ab)
    step = lat.central_step
    return abs(rest - step * round(rest / step)) <= tol * max(1.0, abs(float(x.t)))


def heis_contains(s: HeisSubgroup, x: HeisElement, tol: float | None = None) -> bool:
    tol = canonical_tol() if tol is None else tol
    z, t = complex(float(x.x), float(x.y)), float(x.t)
    scale_ = tol * max(1.0, abs(z), abs(t))
    match s:
        case Trivial():
            return x.norm() <= scale_
        case Central(sub=sub):
            r = t - sub.step * round(t / sub.step)
            return abs(z) <= scale_ and abs(r) <= scale_
        case Planar():
            u = s.direction
            along, off = (u.conjugate() * z).real, (u.conjugate() * z).imag
            return abs(off) <= scale_ and contains(s.plane, complex(along, t), tol)
        case PullbackCenter(base=c):
            return contains(c, z, tol)
        case HeisLattice():
            return heis_membership(s, x, tol)
    raise StratumError(f"not a closed subgroup of H: {s!r}")


# ── enumeration ──────────────────────────────────────────────────────────────


def _lift_support(sup: Support, u: complex) -> Support:
    """Embed the support of a planar subgroup via (s, t) ↦ (s·u, t)."""

    def embed(p) -> tuple[float, float, float]:
        return (p[0] * u.real, p[0] * u.imag, p[1])

    pts = np.column_stack([sup.points[:, 0] * u.real, sup.points[:, 0] * u.imag, sup.points[:, 1]])
    segments = [Segment(embed(sg.start), embed(sg.end)) for sg in sup.segments]
    disks = []
    if sup.ball is not None:
        disks.append(Disk((0.0, 0.0, 0.0), (u.real, u.imag, 0.0), _T_AXIS, sup.ball))
    return Support(3, pts, segments, disks)


def heis_enumerate(s: HeisSubgroup, radius: float, cap: int = DEFAULT_CAP) -> Support:
    """Everything of S with Euclidean coordinate norm ≤ radius; lattice points
    come in lexicographic (a, b, m) order."""
    if not radius > 0:
        raise StratumError(f"radius must be positive, got {radius}")
    match s:
        case Trivial():
            return Support(3, np.zeros((1, 3)))
        case Central(sub=sub):
            kmax = int(math.floor(radius / sub.step * (1 + 1e-12)))
            if 2 * kmax + 1 > cap:
                raise EnumerationOverflow(2 * kmax + 1, cap)
            k = np.arange(-kmax, kmax + 1) * sub.step
            return Support(3, np.column_stack([np.zeros_like(k), np.zeros_like(k), k]))
        case Planar():
            return _lift_support(enumerate_points(s.plane, radius, cap), s.direction)
        case PullbackCenter(base=c):
            return _pullback_support(c, radius, cap)
        case HeisLattice():
            return _lattice_support(s, radius, cap)
    raise StratumError(f"not a closed subgroup of H: {s!r}")


def _pullback_support(c: ClosedSubgroupC, radius: float, cap: int) -> Support:
    if isinstance(c, Full):
        return Support(3, np.zeros((0, 3)), ball=radius)
    base = enumerate_points(c, radius, cap)
    segments = []
    for x, y in base.points:
        h = math.sqrt(max(radius**2 - x * x - y * y, 0.0))
        segments.append(Segment((x, y, -h), (x, y, h)))
    disks = []
    for sg in base.segments:
        (x0, y0), (x1, y1) = sg.start, sg.end
        half = math.hypot(x1 - x0, y1 - y0) / 2
        if half == 0:
            continue
        centre = ((x0 + x1) / 2, (y0 + y1) / 2, 0.0)
        e1 = ((x1 - x0) / (2 * half), (y1 - y0) / (2 * half), 0.0)
        disks.append(Disk(centre, e1, _T_AXIS, half))
    return Support(3, np.zeros((0, 3)), segments, disks)


def _lattice_support(lat: HeisLattice, radius: float, cap: int) -> Support:
    ab = lattice_coordinates(lat.z, lat.zp, radius, cap)
    a, b = ab[:, 0], ab[:, 1]
    zs = a * lat.z + b * lat.zp
    base_t = lat.word_t(a, b)
    room = np.sqrt(np.maximum(radius**2 - np.abs(zs) ** 2, 0.0))
    step = lat.central_step
    lo = np.ceil((-room - base_t) / step - 1e-12).astype(np.int64)
    hi = np.floor((room - base_t) / step + 1e-12).astype(np.int64)
    counts = np.maximum(hi - lo + 1, 0)
    total = int(counts.sum())
    if total > cap:
        raise EnumerationOverflow(total, cap)
    idx = np.repeat(np.arange(len(ab)), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    m = lo[idx] + offsets
    pts = np.column_stack([zs.real[idx], zs.imag[idx], base_t[idx] + m * step])
    keep = np.einsum("ij,ij->i", pts, pts) <= radius**2 * (1 + 1e-12)
    log.debug("enumerated %d lattice points of H within R=%.3g", int(keep.sum()), radius)
    return Support(3, pts[keep])


# ── distances ────────────────────────────────────────────────────────────────


def _split(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return pts[:, 0] + 1j * pts[:, 1], pts[:, 2]


def _lattice_dist(lat: HeisLattice, pts: np.ndarray, group: bool, cap: int) -> np.ndarray:
    zs, ts = _split(pts)
    if len(zs) == 0:
        return np.zeros(0)
    alpha, beta = lattice_coords(lat.projection, zs)
    a0, b0 = np.round(alpha), np.round(beta)
    step = lat.central_step

    def fiber(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        cz = a * lat.z + b * lat.zp
        rest = ts[:, None] - lat.word_t(a, b)
        if group:
            rest = rest + 0.5 * (np.conj(cz) * zs[:, None]).imag
        rest = rest - step * np.round(rest / step)
        return np.sqrt(np.abs(zs[:, None] - cz) ** 2 + rest**2)

    first = fiber(a0[:, None], b0[:, None])[:, 0]
    reach = float(np.max(first + np.abs(zs - (a0 * lat.z + b0 * lat.zp))))
    offs = lattice_coordinates(lat.z, lat.zp, reach, cap)
    return fiber(a0[:, None] + offs[:, 0], b0[:, None] + offs[:, 1]).min(axis=1)


def heis_dist_points(s: HeisSubgroup, pts: np.ndarray, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Euclidean distance in coordinates (x, y, t) from each point to S."""
    zs, ts = _split(pts)
    match s:
        case Trivial():
            return np.sqrt(np.abs(zs) ** 2 + ts**2)
        case Central(sub=sub):
            r = ts - sub.step * np.round(ts / sub.step)
            return np.sqrt(np.abs(zs) ** 2 + r**2)
        case Planar():
            w = np.conj(s.direction) * zs
            return np.sqrt(w.imag**2 + dist_points(s.plane, w.real + 1j * ts) ** 2)
        case PullbackCenter(base=c):
            return dist_points(c, zs)
        case HeisLattice():
            return _lattice_dist(s, pts, group=False, cap=cap)
    raise StratumError(f"not a closed subgroup of H: {s!r}")


def heis_group_dist_points(s: HeisSubgroup, pts: np.ndarray, cap: int = DEFAULT_CAP) -> np.ndarray:
    """min over c ∈ S of ‖c⁻¹x‖ for each point x."""
    zs, ts = _split(pts)
    match s:
        case Trivial() | Central() | PullbackCenter():
            return heis_dist_points(s, pts, cap)
        case Planar():
            w = np.conj(s.direction) * zs
            out = np.empty(len(zs))
            for i, (along, off, t) in enumerate(zip(w.real, w.imag, ts)):
                sheared = linear_image(s.plane, (1.0, 0.0, -off / 2, 1.0))
                out[i] = math.hypot(off, float(dist_points(sheared, np.array([complex(along, t)]))[0]))
            return out
        case HeisLattice():
            return _lattice_dist(s, pts, group=True, cap=cap)
    raise StratumError(f"not a closed subgroup of H: {s!r}")


# ── automorphisms ────────────────────────────────────────────────────────────


def aut_apply_lattice(alpha: HeisAutomorphism, lat: HeisLattice) -> HeisLattice:
    g1, g2, _ = lat.generators()
    h1, h2 = aut_apply(alpha, g1), aut_apply(alpha, g2)
    return HeisLattice(h1.z, h2.z, float(h1.t), float(h2.t), lat.n)


def dilate_lattice(lat: HeisLattice, s: float) -> HeisLattice:
    """φ_s(Λ) for s > 0."""
    return aut_apply_lattice(HeisAutomorphism.dilation(s), lat)


def heis_isclose(s: HeisSubgroup, other: HeisSubgroup, tol: float | None = None) -> bool:
    tol = canonical_tol() if tol is None else tol
    if type(s) is not type(other):
        return False
    match s:
        case Trivial():
            return True
        case Central(sub=sub):
            return abs(sub.step - other.sub.step) <= tol * max(1.0, sub.step)
        case Planar():
            d = abs(s.angle - other.angle) % math.pi
            if min(d, math.pi - d) > tol:
                return False
            plane = other.plane
            if d > math.pi / 2:
                plane = linear_image(plane, (-1, 0, 0, 1))
            return isclose(s.plane, plane, tol)
        case PullbackCenter(base=c):
            return isclose(c, other.base, tol)
        case HeisLattice():
            return (
                s.n == other.n
                and isclose(s.projection, other.projection, tol)
                and all(heis_membership(other, g, tol) for g in s.generators())
            )
    return False


def central_refinement(lat: Lattice, eps: float, max_n: int = 1_000, cfg=None) -> HeisLattice:
    """Smallest-n lattice over ``lat`` (lifts 0) within Chabauty distance ``eps``
    of p⁻¹(lat)."""
    from chabauty.metric import chabauty_distance
    from chabauty.spaces import HEISENBERG

    target = PullbackCenter(lat)
    for n in range(1, max_n + 1):
        candidate = HeisLattice(lat.z, lat.zp, 0.0, 0.0, n)
        d = chabauty_distance(HEISENBERG, candidate, target, cfg=cfg)
        log.debug("central refinement n=%d: distance %.4g", n, d)
        if d <= eps:
            return candidate
    raise StratumError(f"no central refinement within {eps} up to n={max_n}")
