"""Closed subgroups of ℝ and ℂ — canonical forms, reduction, duality, distances.

Every closed subgroup of ℂ is one of six strata: {0}, ℤω, ℝu, ℝu ⊕ ℤv, a
lattice, or ℂ.  Each stratum is a frozen dataclass whose ``__post_init__``
brings its fields into canonical form, so two values describe the same
subgroup exactly when :func:`isclose` says so.

Canonical forms:
  * Cyclic ω: arg ω ∈ [0, π).
  * Line / LineCyclic: direction angle in [0, π); the transverse generator of
    LineCyclic is ``height·i·u`` with height > 0.
  * Lattice (z, z′): z a shortest vector with the smallest arg in [0, π),
    Im(conj z·z′) > 0 and Re(conj z·z′)/|z|² ∈ (−½, ½].
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np

from chabauty.config import CanonicalConfig
from chabauty.errors import (
    DegenerateBasisError,
    DescriptorError,
    DomainError,
    EnumerationOverflow,
    NumericError,
    StratumError,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 500_000
_canonical = CanonicalConfig()


def configure_canonical(cfg: CanonicalConfig) -> None:
    """Install the [canonical] section used by every later canonicalisation and comparison."""
    global _canonical
    _canonical = cfg
    log.debug("canonical tolerance %g", cfg.tol)


def canonical_tol() -> float:
    return _canonical.tol


IntMatrix = tuple[tuple[int, int], tuple[int, int]]


def _canon_angle(theta: float) -> float:
    theta = math.fmod(theta, math.pi)
    if theta < 0:
        theta += math.pi
    if theta >= math.pi - 1e-12:
        theta = 0.0
    return theta


def _upper(v: complex, tol: float | None = None) -> complex:
    """±v with arg in [0, π)."""
    tol = canonical_tol() if tol is None else tol
    if abs(v.imag) <= tol * abs(v):
        return complex(abs(v.real), 0.0) if v.real < 0 else v
    return -v if v.imag < 0 else v


def _arg_upper(v: complex) -> float:
    if abs(v.imag) <= canonical_tol() * abs(v):
        return 0.0
    return _canon_angle(cmath.phase(v))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _egcd(b, a % b)
    return g, t, s - (a // b) * t


# ── subgroups of ℝ ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ClosedSubgroupR:
    """{0}, σℤ (``step`` σ > 0) or ℝ.

    The parameter p ∈ [0, ∞] identifies the space of closed subgroups with an
    interval: p = 0 ↔ {0}, p = λ ↔ (1/λ)ℤ, p = ∞ ↔ ℝ.
    """

    kind: str
    step: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("trivial", "cyclic", "full"):
            raise DescriptorError(f"unknown subgroup kind {self.kind!r}")
        if self.kind == "cyclic":
            if self.step is None or not self.step > 0 or math.isinf(self.step):
                raise DegenerateBasisError(f"cyclic step must be positive and finite, got {self.step}")
            object.__setattr__(self, "step", float(self.step))
        elif self.step is not None:
            object.__setattr__(self, "step", None)

    @classmethod
    def trivial(cls) -> ClosedSubgroupR:
        return cls("trivial")

    @classmethod
    def cyclic(cls, step: float) -> ClosedSubgroupR:
        return cls("cyclic", abs(step))

    @classmethod
    def full(cls) -> ClosedSubgroupR:
        return cls("full")

    @classmethod
    def from_param(cls, p: float) -> ClosedSubgroupR:
        if p < 0:
            raise DomainError(f"parameter must lie in [0, inf], got {p}")
        if p == 0:
            return cls.trivial()
        if math.isinf(p):
            return cls.full()
        return cls.cyclic(1.0 / p)

    @property
    def param(self) -> float:
        if self.kind == "trivial":
            return 0.0
        if self.kind == "full":
            return math.inf
        return 1.0 / self.step

    def to_complex(self) -> ClosedSubgroupC:
        """The same subgroup seen inside ℂ ⊃ ℝ."""
        if self.kind == "trivial":
            return Zero()
        if self.kind == "full":
            return Line(0.0)
        return Cyclic(complex(self.step, 0.0))


# ── subgroups of ℂ ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Zero:
    stratum: ClassVar[str] = "zero"


@dataclass(frozen=True)
class Full:
    stratum: ClassVar[str] = "full"


@dataclass(frozen=True)
class Cyclic:
    generator: complex
    stratum: ClassVar[str] = "cyclic"

    def __post_init__(self) -> None:
        g = complex(self.generator)
        if g == 0 or not cmath.isfinite(g):
            raise DegenerateBasisError(f"cyclic generator must be a finite nonzero number, got {g}")
        object.__setattr__(self, "generator", _upper(g))


@dataclass(frozen=True)
class Line:
    angle: float
    stratum: ClassVar[str] = "line"

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", _canon_angle(float(self.angle)))

    @classmethod
    def through(cls, u: complex) -> Line:
        if u == 0:
            raise DegenerateBasisError("line direction must be nonzero")
        return cls(cmath.phase(u))

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.angle)


@dataclass(frozen=True)
class LineCyclic:
    """ℝu ⊕ ℤ·(height·i·u)."""

    angle: float
    height: float
    stratum: ClassVar[str] = "line_cyclic"

    def __post_init__(self) -> None:
        if not self.height > 0 or math.isinf(self.height):
            raise DegenerateBasisError(f"transverse height must be positive and finite, got {self.height}")
        object.__setattr__(self, "angle", _canon_angle(float(self.angle)))
        object.__setattr__(self, "height", float(self.height))

    @classmethod
    def from_vectors(cls, u: complex, v: complex) -> LineCyclic:
        """ℝu ⊕ ℤv; only the component of v orthogonal to u matters."""
        if u == 0:
            raise DegenerateBasisError("line direction must be nonzero")
        unit = u / abs(u)
        h = (unit.conjugate() * v).imag
        if abs(h) <= canonical_tol() * max(1.0, abs(v)):
            raise DegenerateBasisError(f"transverse generator {v} is parallel to the line")
        return cls(cmath.phase(unit), abs(h))

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.angle)

    @property
    def transverse(self) -> complex:
        return 1j * self.height * self.direction


@dataclass(frozen=True)
class Lattice:
    z: complex
    zp: complex
    transform: IntMatrix = field(default=((1, 0), (0, 1)), compare=False, repr=False)
    stratum: ClassVar[str] = "lattice"

    def __post_init__(self) -> None:
        z, zp, u = canonical_basis(complex(self.z), complex(self.zp))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "zp", zp)
        object.__setattr__(self, "transform", u)

    @property
    def basis(self) -> tuple[complex, complex]:
        return self.z, self.zp

    @property
    def covolume(self) -> float:
        return (self.z.conjugate() * self.zp).imag


ClosedSubgroupC = Zero | Cyclic | Line | LineCyclic | Lattice | Full

STRATA = ("zero", "cyclic", "line", "line_cyclic", "lattice", "full")


def is_discrete(c: ClosedSubgroupC) -> bool:
    return isinstance(c, (Zero, Cyclic, Lattice))


def stratum_of(c: ClosedSubgroupC) -> str:
    if not hasattr(c, "stratum"):
        raise StratumError(f"not a closed subgroup of C: {c!r}")
    return c.stratum


# ── basis reduction ──────────────────────────────────────────────────────────


def _gauss(z: complex, zp: complex) -> tuple[complex, complex, list[list[int]]]:
    """Lagrange–Gauss reduction, tracking the integer change of basis."""
    u = [[1, 0], [0, 1]]

    def vec(row: list[int]) -> complex:
        return row[0] * z + row[1] * zp

    if abs(z) > abs(zp):
        u.reverse()
    for _ in range(10_000):
        b1, b2 = vec(u[0]), vec(u[1])
        mu = round((b1.conjugate() * b2).real / abs(b1) ** 2)
        if mu:
            u[1] = [u[1][0] - mu * u[0][0], u[1][1] - mu * u[0][1]]
            b2 = vec(u[1])
        if abs(b2) < abs(b1) * (1 - 1e-13):
            u.reverse()
            continue
        return vec(u[0]), vec(u[1]), u
    raise NumericError(f"Gauss reduction of ({z}, {zp}) did not terminate")


def canonical_basis(z: complex, zp: complex) -> tuple[complex, complex, IntMatrix]:
    """Canonical reduced basis of the lattice ℤz + ℤz′ and the integer matrix
    ``((a, b), (c, d))`` with w = az + bz′, w′ = cz + dz′."""
    area = (z.conjugate() * zp).imag
    if not (cmath.isfinite(z) and cmath.isfinite(zp)) or abs(area) <= canonical_tol() * abs(z) * abs(zp) or area == 0:
        raise DegenerateBasisError(f"basis ({z}, {zp}) is degenerate")
    w, wp, u = _gauss(z, zp)

    shortest = abs(w)
    ties = []
    for p in (-1, 0, 1):
        for q in (-1, 0, 1):
            v = p * w + q * wp
            if (p or q) and abs(v) <= shortest * (1 + 1e-9):
                a, b = p * u[0][0] + q * u[1][0], p * u[0][1] + q * u[1][1]
                up = _upper(v)
                if up != v:
                    a, b = -a, -b
                ties.append((_arg_upper(v), a, b))
    ties.sort()
    _, a, b = ties[0]

    _, s, t = _egcd(a, b)  # a·s + b·t = 1
    c, d = (-t, s) if area > 0 else (t, -s)
    first = a * z + b * zp
    second = c * z + d * zp
    mu = (first.conjugate() * second).real / abs(first) ** 2
    k = math.ceil(mu - 0.5)
    if mu - k < -0.5 + 1e-9:
        k -= 1
    c, d = c - k * a, d - k * b
    return first, c * z + d * zp, ((a, b), (c, d))


def reduce_basis(z: complex, zp: complex) -> tuple[complex, complex]:
    """Reduced, positively oriented basis of the same lattice; idempotent."""
    w, wp, _ = canonical_basis(complex(z), complex(zp))
    return w, wp


# ── invariants ───────────────────────────────────────────────────────────────


def covolume(c: ClosedSubgroupC) -> float:
    match c:
        case Lattice():
            return c.covolume
        case Zero() | Cyclic():
            return math.inf
        case _:
            return 0.0


def min_norm(c: ClosedSubgroupC) -> float:
    """Squared length of a shortest nonzero vector."""
    match c:
        case Cyclic(generator=g):
            return abs(g) ** 2
        case Lattice():
            return abs(c.z) ** 2
        case _:
            raise StratumError(f"min_norm is undefined on stratum {c.stratum!r}")


def deep_hole(lat: Lattice) -> complex:
    """Circumcentre of the acute Delaunay triangle at the origin."""
    a, b = lat.z, lat.zp
    if (a.conjugate() * b).real < 0:
        a = -a
    return 1j * (abs(b) ** 2 * a - abs(a) ** 2 * b) / (2 * (a.conjugate() * b).imag)


def covering_radius(lat: Lattice) -> float:
    """Largest distance from a point of ℂ to the lattice."""
    return abs(deep_hole(lat))


def dual(c: ClosedSubgroupC) -> ClosedSubgroupC:
    """C♯ = {z : Im(conj z·c) ∈ ℤ for all c ∈ C}."""
    match c:
        case Zero():
            return Full()
        case Full():
            return Zero()
        case Line():
            return c
        case Lattice():
            cov = c.covolume
            return Lattice(c.z / cov, c.zp / cov)
        case Cyclic(generator=g):
            return LineCyclic(cmath.phase(g), 1.0 / abs(g))
        case LineCyclic():
            return Cyclic(c.direction / c.height)
    raise StratumError(f"not a closed subgroup of C: {c!r}")


def linear_image(c: ClosedSubgroupC, matrix: Sequence[float]) -> ClosedSubgroupC:
    """Image under the real linear map x+iy ↦ (ax+by) + i(cx+dy)."""
    a, b, cc, d = (float(v) for v in matrix)
    if a * d - b * cc == 0:
        raise DegenerateBasisError(f"singular matrix {tuple(matrix)}")

    def apply(v: complex) -> complex:
        return complex(a * v.real + b * v.imag, cc * v.real + d * v.imag)

    match c:
        case Zero() | Full():
            return c
        case Cyclic(generator=g):
            return Cyclic(apply(g))
        case Line():
            return Line.through(apply(c.direction))
        case LineCyclic():
            return LineCyclic.from_vectors(apply(c.direction), apply(c.transverse))
        case Lattice():
            return Lattice(apply(c.z), apply(c.zp))
    raise StratumError(f"not a closed subgroup of C: {c!r}")


def scale(c: ClosedSubgroupC, factor: complex) -> ClosedSubgroupC:
    """factor·C for a nonzero complex factor."""
    factor = complex(factor)
    return linear_image(c, (factor.real, -factor.imag, factor.imag, factor.real))


# ── geometry ─────────────────────────────────────────────────────────────────


def dist_points(c: ClosedSubgroupC, xs: np.ndarray) -> np.ndarray:
    """Euclidean distance from each complex number in ``xs`` to the set C."""
    xs = np.asarray(xs, dtype=complex)
    match c:
        case Zero():
            return np.abs(xs)
        case Full():
            return np.zeros(xs.shape)
        case Line():
            return np.abs((np.conj(c.direction) * xs).imag)
        case LineCyclic():
            q = (np.conj(c.direction) * xs).imag
            return np.abs(q - c.height * np.round(q / c.height))
        case Cyclic(generator=g):
            k = np.round((np.conj(g) * xs).real / abs(g) ** 2)
            return np.abs(xs - k * g)
        case Lattice():
            a, b = lattice_coords(c, xs)
            offsets = np.arange(-1, 3)
            ca = np.floor(a)[..., None, None] + offsets[:, None]
            cb = np.floor(b)[..., None, None] + offsets[None, :]
            cand = ca * c.z + cb * c.zp
            return np.abs(cand - xs[..., None, None]).min(axis=(-2, -1))
    raise StratumError(f"not a closed subgroup of C: {c!r}")


def dist_point(c: ClosedSubgroupC, x: complex) -> float:
    return float(dist_points(c, np.array([complex(x)]))[0])


def contains(c: ClosedSubgroupC, x: complex, tol: float | None = None) -> bool:
    tol = canonical_tol() if tol is None else tol
    return dist_point(c, x) <= tol * max(1.0, abs(x))


def lattice_coords(lat: Lattice, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real coordinates (a, b) with x = a·z + b·z′."""
    cov = lat.covolume
    b = (np.conj(lat.z) * xs).imag / cov
    a = -(np.conj(lat.zp) * xs).imag / cov
    return a, b


def lattice_coordinates(z: complex, zp: complex, radius: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Integer pairs (a, b), lexicographically ordered, with |az + bz′| ≤ radius."""
    if radius < 0:
        return np.zeros((0, 2), dtype=np.int64)
    area = abs((z.conjugate() * zp).imag)
    height = area / abs(z)
    bmax = int(math.floor(radius / height + 1e-9))
    shift = (z.conjugate() * zp).real / abs(z) ** 2
    half = radius / abs(z)
    estimate = (2 * bmax + 1) * (2 * half + 2)
    if estimate > cap:
        raise EnumerationOverflow(int(estimate), cap)
    rows = []
    for b in range(-bmax, bmax + 1):
        lo = math.ceil(-b * shift - half - 1e-9)
        hi = math.floor(-b * shift + half + 1e-9)
        if hi < lo:
            continue
        a = np.arange(lo, hi + 1)
        rows.append(np.column_stack([a, np.full(a.shape, b)]))
    if not rows:
        return np.zeros((0, 2), dtype=np.int64)
    ab = np.concatenate(rows)
    norms = np.abs(ab[:, 0] * z + ab[:, 1] * zp)
    ab = ab[norms <= radius * (1 + 1e-12)]
    order = np.lexsort((ab[:, 1], ab[:, 0]))
    return ab[order]


@dataclass(frozen=True)
class Segment:
    start: tuple[float, ...]
    end: tuple[float, ...]


@dataclass(frozen=True)
class Disk:
    """Flat disk {center + s·e1 + r·e2 : s² + r² ≤ radius²} with orthonormal e1, e2."""

    center: tuple[float, ...]
    e1: tuple[float, ...]
    e2: tuple[float, ...]
    radius: float


@dataclass
class Support:
    """Part of a closed set inside a ball: isolated points, segments, flat disks,
    or the whole ball."""

    dim: int
    points: np.ndarray
    segments: list[Segment] = field(default_factory=list)
    disks: list[Disk] = field(default_factory=list)
    ball: float | None = None

    @classmethod
    def empty(cls, dim: int) -> Support:
        return cls(dim, np.zeros((0, dim)))

    @property
    def is_discrete(self) -> bool:
        return not self.segments and not self.disks and self.ball is None


def _as_xy(zs: np.ndarray) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    return np.column_stack([zs.real, zs.imag])


def enumerate_points(c: ClosedSubgroupC, radius: float, cap: int = DEFAULT_CAP) -> Support:
    """Everything of C inside the closed ball of the given radius."""
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    match c:
        case Zero():
            return Support(2, np.zeros((1, 2)))
        case Full():
            return Support(2, np.zeros((0, 2)), ball=radius)
        case Cyclic(generator=g):
            kmax = int(math.floor(radius / abs(g) * (1 + 1e-12)))
            if 2 * kmax + 1 > cap:
                raise EnumerationOverflow(2 * kmax + 1, cap)
            k = np.arange(-kmax, kmax + 1)
            return Support(2, _as_xy(k * g))
        case Lattice():
            ab = lattice_coordinates(c.z, c.zp, radius, cap)
            return Support(2, _as_xy(ab[:, 0] * c.z + ab[:, 1] * c.zp))
        case Line():
            u = c.direction
            return Support(2, np.zeros((0, 2)), [_segment(-radius * u, radius * u)])
        case LineCyclic():
            u = c.direction
            kmax = int(math.floor(radius / c.height * (1 + 1e-12)))
            if 2 * kmax + 1 > cap:
                raise EnumerationOverflow(2 * kmax + 1, cap)
            segments = []
            for k in range(-kmax, kmax + 1):
                offset = k * c.height
                half = math.sqrt(max(radius**2 - offset**2, 0.0))
                centre = offset * 1j * u
                segments.append(_segment(centre - half * u, centre + half * u))
            return Support(2, np.zeros((0, 2)), segments)
    raise StratumError(f"not a closed subgroup of C: {c!r}")


def _segment(a: complex, b: complex) -> Segment:
    return Segment((a.real, a.imag), (b.real, b.imag))


# ── equality ─────────────────────────────────────────────────────────────────


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _angles_close(a: float, b: float, tol: float) -> bool:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d) <= tol


def isclose(c: ClosedSubgroupC, d: ClosedSubgroupC, tol: float | None = None) -> bool:
    """Canonical equality within ``tol``, robust to the angle wrap at 0/π."""
    tol = canonical_tol() if tol is None else tol
    if c.stratum != d.stratum:
        return False
    match c:
        case Zero() | Full():
            return True
        case Cyclic(generator=g):
            h = d.generator
            scale_ = max(1.0, abs(g))
            return abs(g - h) <= tol * scale_ or abs(g + h) <= tol * scale_
        case Line():
            return _angles_close(c.angle, d.angle, tol)
        case LineCyclic():
            return _angles_close(c.angle, d.angle, tol) and _close(c.height, d.height, tol)
        case Lattice():
            if not _close(c.covolume, d.covolume, tol):
                return False
            return all(contains(d, v, tol) for v in c.basis) and all(contains(c, v, tol) for v in d.basis)
    return False
