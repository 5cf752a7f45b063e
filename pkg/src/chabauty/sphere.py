"""The sphere model of 𝒞(ℂ): S⁴ = ℂ² ∪ {∞} → closed subgroups of ℂ.

Inside the closed unit ball a point (a, b) ≠ 0 is moved along its weighted
orbit (v·a, v^{3/2}·b), v > 0, to the unit sphere; the subgroup with those
invariants is then rescaled by a radial factor h.  With r = ‖(a, b)‖:

  * off the curve a³ = 27b²: the lattice γ with invariants on S³ becomes
    γ/√h, h = r²·covol(γ); unimodular on S³, shrinking to {0} at the origin;
  * on the curve: γ = ℤω becomes ℤ·ω/√h, h = r²/(1 − r²), and the line ℝω on S³.

Outside the ball f(x) = f(σ(x))♯ and f(∞) = ℂ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from chabauty.config import SphereConfig
from chabauty.errors import NumericError, StratumError
from chabauty.euclid import (
    ClosedSubgroupC,
    Cyclic,
    Full,
    Lattice,
    Line,
    LineCyclic,
    Zero,
    covolume,
    dual,
    scale,
)
from chabauty.modular import G2_SCALE, G3_SCALE, cyclic_invariants, extended_g_prime, invert_g

log = logging.getLogger(__name__)

ON_SIGMA = "on_sigma"
ON_KNOT = "on_knot"
OFF = "off"


@dataclass(frozen=True)
class SpherePoint:
    a: complex = 0j
    b: complex = 0j
    infinite: bool = False

    def __post_init__(self) -> None:
        if self.infinite:
            object.__setattr__(self, "a", 0j)
            object.__setattr__(self, "b", 0j)
        else:
            object.__setattr__(self, "a", complex(self.a))
            object.__setattr__(self, "b", complex(self.b))

    @classmethod
    def infinity(cls) -> SpherePoint:
        return cls(infinite=True)

    @property
    def norm2(self) -> float:
        if self.infinite:
            return math.inf
        return abs(self.a) ** 2 + abs(self.b) ** 2

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm2)

    @property
    def is_origin(self) -> bool:
        return not self.infinite and self.a == 0 and self.b == 0


ORIGIN = SpherePoint()
INFINITY = SpherePoint.infinity()


def sigma(x: SpherePoint) -> SpherePoint:
    """Inversion in S³: x ↦ x/‖x‖², exchanging 0 and ∞."""
    if x.infinite:
        return ORIGIN
    if x.is_origin:
        return INFINITY
    n2 = x.norm2
    return SpherePoint(x.a / n2, x.b / n2)


def curve_membership(x: SpherePoint, tol: float | None = None) -> str:
    tol = SphereConfig.tol if tol is None else tol
    if x.infinite:
        raise StratumError("curve membership is defined for finite points only")
    size = abs(x.a) ** 3 + 27 * abs(x.b) ** 2
    if abs(x.a**3 - 27 * x.b**2) > tol * size:
        return OFF
    if abs(x.norm2 - 1) <= tol:
        return ON_KNOT
    return ON_SIGMA


def orbit_parameter(a: complex, b: complex, radius: float = 1.0) -> float:
    """The v > 0 with ‖(v·a, v^{3/2}·b)‖ = radius."""
    pa, pb = abs(a) ** 2, abs(b) ** 2
    if pa == 0 and pb == 0:
        raise StratumError("the origin has no weighted orbit")
    target = radius**2

    def excess(v: float) -> float:
        return pa * v**2 + pb * v**3 - target

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2
    lo = hi / 2
    while excess(lo) > 0:
        lo /= 2
    return brentq(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def weighted_orbit_point(a: complex, b: complex, radius: float = 1.0) -> SpherePoint:
    v = orbit_parameter(a, b, radius)
    return SpherePoint(v * a, v**1.5 * b)


# ── forward ──────────────────────────────────────────────────────────────────


def _knot_generator(a1: complex, b1: complex) -> complex:
    return complex(np.sqrt(2 * math.pi**2 * a1 / (9 * b1)))


def forward_f(x: SpherePoint, cfg: SphereConfig | None = None) -> ClosedSubgroupC:
    cfg = cfg or SphereConfig()
    if x.infinite:
        return Full()
    if x.is_origin:
        return Zero()
    r = x.norm
    if r > 1 + cfg.tol:
        return dual(forward_f(sigma(x), cfg))

    on_sphere = abs(r - 1) <= cfg.tol
    p = x if on_sphere else weighted_orbit_point(x.a, x.b)
    if curve_membership(x, cfg.tol) != OFF:
        gamma: ClosedSubgroupC = Cyclic(_knot_generator(p.a, p.b))
    else:
        gamma = invert_g(p.a, p.b)
    log.debug("f at radius %.6g: orbit point on S3 gives %s", r, gamma.stratum)

    match gamma:
        case Cyclic(generator=w):
            if on_sphere:
                return Line.through(w)
            h = r**2 / (1 - r**2)
            return Cyclic(w / math.sqrt(h))
        case Lattice():
            h = (1.0 if on_sphere else r**2) * gamma.covolume
            return scale(gamma, 1 / math.sqrt(h))
    raise NumericError(f"unexpected stratum {gamma.stratum!r} on the unit sphere")


# ── inverse ──────────────────────────────────────────────────────────────────


def inverse_f(c: ClosedSubgroupC, cfg: SphereConfig | None = None) -> SpherePoint:
    cfg = cfg or SphereConfig()
    match c:
        case Zero():
            return ORIGIN
        case Full():
            return INFINITY
        case Line():
            return weighted_orbit_point(*cyclic_invariants(c.direction))
        case Cyclic(generator=w):
            p = weighted_orbit_point(*cyclic_invariants(w))
            w1 = _knot_generator(p.a, p.b)
            h = abs(w1) ** 2 / abs(w) ** 2
            return weighted_orbit_point(p.a, p.b, math.sqrt(h / (1 + h)))
        case LineCyclic():
            return sigma(inverse_f(dual(c), cfg))
        case Lattice():
            area = covolume(c)
            if area < 1 - cfg.tol:
                return sigma(inverse_f(dual(c), cfg))
            a, b = extended_g_prime(c)
            radius = 1.0 if abs(area - 1) <= cfg.tol else 1 / math.sqrt(area)
            return weighted_orbit_point(a, b, radius)
    raise StratumError(f"not a closed subgroup of C: {c!r}")


# ── the knot ─────────────────────────────────────────────────────────────────


def _knot_radius() -> float:
    return brentq(lambda v: v**3 + 9 * v**2 - 1, 0.0, 1.0, xtol=1e-15)


def trefoil_points(count: int) -> np.ndarray:
    """``count`` points (a, b) of the curve a³ = 27b² on S³, as a (count, 2) complex array."""
    v = _knot_radius()
    theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    return np.column_stack([3 * v * np.exp(2j * theta), v**1.5 * np.exp(3j * theta)])


def knot_scale() -> float:
    """|ω| of the cyclic groups whose invariants lie on S³."""
    v = orbit_parameter(G2_SCALE, G3_SCALE)
    return v ** -0.25
