"""Eisenstein invariants g₂, g₃, Δ, j of planar lattices, their extension to
{0} and cyclic subgroups, and the inverse map (a, b) ↦ closed subgroup.

Two summation strategies are available:

``qseries``
    g₂ = (4π⁴/3)·E₄(τ)/z⁴ and g₃ = (8π⁶/27)·E₆(τ)/z⁶ for the reduced basis
    (z, z′), τ = z′/z, with the normalised series E₄ = 1 + 240Σσ₃(n)qⁿ and
    E₆ = 1 − 504Σσ₅(n)qⁿ in q = e^{2πiτ}.  The tail is bounded with
    σ_k(n) ≤ ζ(k)·n^k and a geometric ratio.

``shell``
    The defining sums 60Σ′v⁻⁴ and 140Σ′v⁻⁶ over all lattice points with
    |v| ≤ R; the tail beyond R is bounded by comparing each point with its
    Voronoi cell.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from sympy import divisor_sigma

from chabauty.config import InvariantsConfig
from chabauty.errors import ConvergenceError, EnumerationOverflow, NumericError, StratumError
from chabauty.euclid import ClosedSubgroupC, Cyclic, Lattice, Zero, covering_radius, lattice_coordinates

log = logging.getLogger(__name__)

G2_SCALE = 4 * math.pi**4 / 3  # 120·ζ(4)
G3_SCALE = 8 * math.pi**6 / 27  # 280·ζ(6)
RHO = complex(-0.5, math.sqrt(3) / 2)
INVERT_TOL = 1e-8


@dataclass(frozen=True)
class LatticeInvariants:
    g2: complex
    g3: complex
    delta: complex
    j: complex | None
    err: float
    method: str = "closed"

    @classmethod
    def from_g(cls, g2: complex, g3: complex, err: float = 0.0, method: str = "closed") -> LatticeInvariants:
        delta = g2**3 - 27 * g3**2
        j = 1728 * g2**3 / delta if delta != 0 else None
        return cls(complex(g2), complex(g3), complex(delta), None if j is None else complex(j), float(err), method)

    @property
    def pair(self) -> tuple[complex, complex]:
        return self.g2, self.g3


def printed_discriminant(inv: LatticeInvariants) -> complex:
    """g₂³ − 27g₃³, the variant with a cubed g₃, kept for comparison only."""
    return inv.g2**3 - 27 * inv.g3**3


# ── q-series ─────────────────────────────────────────────────────────────────


@lru_cache(maxsize=None)
def _sigma(k: int, n: int) -> int:
    return int(divisor_sigma(n, k))


def _tail(n: int, k: int, qa: float) -> float:
    """Bound on Σ_{m>n} m^k·|q|^m, or inf when the ratio test fails."""
    ratio = ((n + 2) / (n + 1)) ** k * qa
    if ratio >= 1:
        return math.inf
    return (n + 1) ** k * qa ** (n + 1) / (1 - ratio)


_ZETA3 = float(mpmath.zeta(3))
_ZETA5 = float(mpmath.zeta(5))


def _e4_e6(tau, tol4: float, tol6: float, max_terms: int = 5_000):
    """E₄(τ), E₆(τ) and certified truncation bounds, in the current mpmath precision."""
    q = mpmath.exp(2j * mpmath.pi * tau)
    qa = float(abs(q))
    e4 = mpmath.mpc(1)
    e6 = mpmath.mpc(1)
    qn = mpmath.mpc(1)
    for n in range(1, max_terms + 1):
        qn *= q
        e4 += 240 * _sigma(3, n) * qn
        e6 -= 504 * _sigma(5, n) * qn
        b4 = 240 * _ZETA3 * _tail(n, 3, qa)
        b6 = 504 * _ZETA5 * _tail(n, 5, qa)
        if b4 <= tol4 and b6 <= tol6:
            return e4, e6, b4, b6
    raise NumericError(f"q-series for tau={complex(tau)} did not reach the requested accuracy in {max_terms} terms")


def j_invariant(tau: complex, cfg: InvariantsConfig | None = None) -> complex:
    """Klein's j(τ) = 1728·E₄³/(E₄³ − E₆²) for Im τ > 0."""
    cfg = cfg or InvariantsConfig()
    if not tau.imag > 0:
        raise StratumError(f"tau must lie in the upper half plane, got {tau}")
    with mpmath.workdps(cfg.dps):
        t = reduce_tau(mpmath.mpc(tau.real, tau.imag))
        eps = mpmath.mpf(10) ** (-cfg.dps + 2)
        e4, e6, _, _ = _e4_e6(t, float(eps), float(eps))
        return complex(1728 * e4**3 / (e4**3 - e6**2))


def reduce_tau(tau):
    """SL₂(ℤ)-equivalent point with Re τ ∈ [−½, ½), |τ| ≥ 1, and Re τ ≤ 0 on |τ| = 1."""
    for _ in range(10_000):
        tau = tau - math.floor(float(tau.real) + 0.5)
        if float(abs(tau)) < 1 - 1e-14:
            tau = -1 / tau
            continue
        break
    else:
        raise NumericError(f"reduction of tau={complex(tau)} did not terminate")
    if abs(float(abs(tau)) - 1) <= 1e-14 and float(tau.real) > 0:
        tau = -1 / tau
    return tau


# ── forward map ──────────────────────────────────────────────────────────────


def _qseries(lat: Lattice, tol: float, cfg: InvariantsConfig) -> LatticeInvariants:
    z = lat.z
    za = abs(z)
    with mpmath.workdps(cfg.dps):
        tau = mpmath.mpc(lat.zp.real, lat.zp.imag) / mpmath.mpc(z.real, z.imag)
        tol4 = tol * za**4 / G2_SCALE
        tol6 = tol * za**6 / G3_SCALE
        e4, e6, b4, b6 = _e4_e6(tau, tol4, tol6)
        zm = mpmath.mpc(z.real, z.imag)
        g2 = mpmath.mpf(4) * mpmath.pi**4 / 3 * e4 / zm**4
        g3 = mpmath.mpf(8) * mpmath.pi**6 / 27 * e6 / zm**6
        err = max(G2_SCALE * b4 / za**4, G3_SCALE * b6 / za**6)
        return LatticeInvariants.from_g(complex(g2), complex(g3), err, "qseries")


def shell_tail(area: float, radius: float, delta: float, k: int) -> float:
    """Bound on Σ_{|v|>R} |v|^−k over a lattice of covolume ``area`` and
    covering radius ``delta``; valid for R > 2δ."""
    inner = radius - 2 * delta
    if inner <= 0:
        return math.inf
    return 2 * math.pi / area * (inner ** (2 - k) / (k - 2) + delta * inner ** (1 - k) / (k - 1))


def _shell(lat: Lattice, tol: float, cfg: InvariantsConfig) -> LatticeInvariants:
    area = lat.covolume
    delta = covering_radius(lat)
    radius = 4 * delta + abs(lat.zp)
    while 60 * shell_tail(area, radius, delta, 4) > tol or 140 * shell_tail(area, radius, delta, 6) > tol:
        radius *= 1.5
        estimate = math.pi * (radius + delta) ** 2 / area
        if estimate > cfg.max_points:
            raise EnumerationOverflow(int(estimate), cfg.max_points)
    ab = lattice_coordinates(lat.z, lat.zp, radius, cap=cfg.max_points)
    ab = ab[(ab[:, 0] != 0) | (ab[:, 1] != 0)]
    v = ab[:, 0] * lat.z + ab[:, 1] * lat.zp
    log.debug("shell summation over %d points, R=%.3g", len(v), radius)
    s4, s6 = v**-4.0, v**-6.0
    g2 = 60 * complex(math.fsum(s4.real), math.fsum(s4.imag))
    g3 = 140 * complex(math.fsum(s6.real), math.fsum(s6.imag))
    err = max(60 * shell_tail(area, radius, delta, 4), 140 * shell_tail(area, radius, delta, 6))
    return LatticeInvariants.from_g(g2, g3, err, "shell")


def eisenstein(
    lat: Lattice,
    tol: float | None = None,
    cfg: InvariantsConfig | None = None,
    method: str | None = None,
) -> LatticeInvariants:
    """g₂, g₃, Δ, j of a lattice with truncation error ≤ tol."""
    cfg = cfg or InvariantsConfig()
    tol = cfg.tol if tol is None else tol
    method = method or cfg.method
    if not isinstance(lat, Lattice):
        raise StratumError(f"eisenstein needs a lattice, got stratum {lat.stratum!r}")
    if not tol > 0:
        raise NumericError(f"tolerance must be positive, got {tol}")
    summation = {"shell": _shell, "qseries": _qseries}.get(method)
    if summation is None:
        raise StratumError(f"unknown summation method {method!r}")
    try:
        return summation(lat, tol, cfg)
    except (OverflowError, ZeroDivisionError) as exc:
        raise NumericError(f"invariants of {lat} out of floating range: {exc}") from exc


def cyclic_invariants(omega: complex) -> tuple[complex, complex]:
    return G2_SCALE * omega**-4, G3_SCALE * omega**-6


def invariants(c: ClosedSubgroupC, cfg: InvariantsConfig | None = None) -> LatticeInvariants:
    """Invariants of {0}, a cyclic group (closed forms) or a lattice."""
    match c:
        case Zero():
            return LatticeInvariants.from_g(0j, 0j)
        case Cyclic(generator=w):
            return LatticeInvariants.from_g(*cyclic_invariants(w))
        case Lattice():
            return eisenstein(c, cfg=cfg)
    raise StratumError(f"invariants are defined on zero, cyclic and lattice strata, got {c.stratum!r}")


def extended_g_prime(c: ClosedSubgroupC, cfg: InvariantsConfig | None = None) -> tuple[complex, complex]:
    return invariants(c, cfg).pair


# ── inverse map ──────────────────────────────────────────────────────────────


def _np_j(tau: np.ndarray, terms: int = 24) -> np.ndarray:
    q = np.exp(2j * np.pi * tau)
    c4 = [1.0] + [240.0 * _sigma(3, n) for n in range(1, terms)]
    c6 = [1.0] + [-504.0 * _sigma(5, n) for n in range(1, terms)]
    e4 = np.polynomial.polynomial.polyval(q, c4)
    e6 = np.polynomial.polynomial.polyval(q, c6)
    return 1728 * e4**3 / (e4**3 - e6**2)


def _initial_tau(J: complex) -> complex:
    if abs(J) > 1e5:
        return complex(reduce_tau(1j * np.log(J - 744) / (2 * np.pi)))
    re = np.linspace(-0.5, 0.5, 81)
    im = np.linspace(math.sqrt(3) / 2, 3.0, 81)
    grid = re[None, :] + 1j * im[:, None]
    grid = grid[np.abs(grid) >= 1 - 1e-12]
    k = int(np.argmin(np.abs(_np_j(grid) - J)))
    return complex(grid[k])


def _e_derivs(tau, tol: float, max_terms: int = 5_000):
    """E₄, E₆, dE₄/dτ and dE₆/dτ, truncated once the largest tail is below tol."""
    q = mpmath.exp(2j * mpmath.pi * tau)
    qa = float(abs(q))
    e4, e6 = mpmath.mpc(1), mpmath.mpc(1)
    d4, d6 = mpmath.mpc(0), mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for n in range(1, max_terms + 1):
        qn *= q
        t4 = 240 * _sigma(3, n) * qn
        t6 = 504 * _sigma(5, n) * qn
        e4 += t4
        e6 -= t6
        d4 += n * t4
        d6 -= n * t6
        if 2 * math.pi * 504 * _ZETA5 * _tail(n, 6, qa) <= tol:
            w = 2j * mpmath.pi
            return e4, e6, w * d4, w * d6
    raise NumericError(f"q-series derivatives at tau={complex(tau)} did not converge in {max_terms} terms")


def _reduce_pair(mu, tau):
    """Move τ into the fundamental domain, carrying μ = λ⁻² along with the basis (λ, λτ)."""
    for _ in range(10_000):
        tau = tau - math.floor(float(tau.real) + 0.5)
        if float(abs(tau)) < 1 - 1e-14:
            # (λ, λτ) → (λτ, −λ)
            mu = mu / tau**2
            tau = -1 / tau
            continue
        return mu, tau
    raise NumericError(f"reduction of tau={complex(tau)} did not terminate")


def _solve_basis(A: complex, B: complex, cfg: InvariantsConfig) -> tuple[complex, complex]:
    """(μ, τ) such that λ·(ℤ + ℤτ), μ = λ⁻², has invariants (A, B).

    Newton runs on (μ, τ) ↦ (c₂E₄(τ)μ² − A, c₃E₆(τ)μ³ − B) rather than on j,
    whose derivative vanishes at τ = i and τ = ρ.  The Jacobian determinant is
    c₂c₃μ⁴(2E₄E₆′ − 3E₆E₄′) = −2πi·c₂c₃μ⁴(E₄³ − E₆²), nonzero on every lattice.
    A and B are expected normalised, max(|A|^¼, |B|^⅙) = 1.
    """
    J = 1728 * A**3 / (A**3 - 27 * B**2)
    with mpmath.workdps(cfg.dps):
        eps = float(mpmath.mpf(10) ** (-cfg.dps + 2))
        goal = mpmath.mpf(10) ** (-cfg.dps + 8)
        ta, tb = mpmath.mpc(A.real, A.imag), mpmath.mpc(B.real, B.imag)
        c2 = 4 * mpmath.pi**4 / 3
        c3 = 8 * mpmath.pi**6 / 27

        def evaluate(mu, tau):
            series = _e_derivs(tau, eps)
            e4, e6 = series[0], series[1]
            return (c2 * e4 * mu**2 - ta, c3 * e6 * mu**3 - tb), series

        def size(f) -> mpmath.mpf:
            return max(abs(f[0]), abs(f[1]))

        tau0 = _initial_tau(J)
        tau = mpmath.mpc(tau0.real, tau0.imag)
        e4, e6, _, _ = _e_derivs(tau, eps)
        starts = []
        if ta != 0 and e4 != 0:
            starts += [mpmath.root(ta / (c2 * e4), 2, k) for k in range(2)]
        if tb != 0 and e6 != 0:
            starts += [mpmath.root(tb / (c3 * e6), 3, k) for k in range(3)]
        if not starts:
            raise ConvergenceError(f"no starting scale for invariants ({A}, {B})", residual=1.0)
        mu = min(starts, key=lambda m: size(evaluate(m, tau)[0]))

        f, (e4, e6, d4, d6) = evaluate(mu, tau)
        residual = size(f)
        for it in range(cfg.newton_max_iter):
            if residual <= goal:
                log.debug("Newton on (mu, tau) converged after %d steps, residual %.3g", it, float(residual))
                return complex(mu), complex(tau)
            j11, j12 = 2 * c2 * e4 * mu, c2 * d4 * mu**2
            j21, j22 = 3 * c3 * e6 * mu**2, c3 * d6 * mu**3
            det = j11 * j22 - j12 * j21
            if det == 0:
                break
            dmu = (f[0] * j22 - f[1] * j12) / det
            dtau = (j11 * f[1] - j21 * f[0]) / det
            # steps stay within half a unit in τ and half of |μ|
            damping = mpmath.mpf(1)
            if abs(dtau) > 0.5:
                damping = 0.5 / abs(dtau)
            if abs(dmu) > 0.5 * abs(mu):
                damping = min(damping, 0.5 * abs(mu) / abs(dmu))
            while damping > 1e-12:
                cand_tau = tau - damping * dtau
                if cand_tau.imag > 0.05:
                    cand_mu, cand_tau = _reduce_pair(mu - damping * dmu, cand_tau)
                    cand_f, cand_series = evaluate(cand_mu, cand_tau)
                    if size(cand_f) < residual:
                        mu, tau, f = cand_mu, cand_tau, cand_f
                        e4, e6, d4, d6 = cand_series
                        residual = size(cand_f)
                        break
                damping /= 2
            else:
                break
        raise ConvergenceError(
            f"Newton for invariants ({A}, {B}) did not converge", residual=float(residual)
        )


def _invert(a: complex, b: complex, tol: float, cfg: InvariantsConfig) -> ClosedSubgroupC:
    size = math.hypot(abs(a), abs(b))
    if size <= tol:
        return Zero()
    if not math.isfinite(size):
        raise NumericError(f"invariants ({a}, {b}) are not finite")

    # invariants of Λ/s are (s⁴g₂, s⁶g₃)
    scale = max(abs(a) ** 0.25, abs(b) ** (1 / 6))
    A, B = a / scale**4, b / scale**6
    disc = A**3 - 27 * B**2
    if abs(disc) <= tol * (abs(A) ** 3 + 27 * abs(B) ** 2):
        if abs(B) == 0:
            raise NumericError(f"({a}, {b}) lies on the cyclic curve but b vanishes", residual=abs(a))
        omega = np.sqrt(2 * math.pi**2 * A / (9 * B)) / scale
        result: ClosedSubgroupC = Cyclic(complex(omega))
        got = cyclic_invariants(result.generator)
    else:
        mu, tau = _solve_basis(A, B, cfg)
        lam = complex(1 / np.sqrt(mu)) / scale
        result = Lattice(lam, lam * tau)
        got = eisenstein(result, cfg=cfg).pair

    residual = math.hypot(abs(got[0] - a), abs(got[1] - b))
    if not residual <= tol * (1 + size):
        raise ConvergenceError(f"inversion of ({a}, {b}) left residual {residual:.3g}", residual=residual)
    return result


def invert_g(
    a: complex,
    b: complex,
    tol: float = INVERT_TOL,
    cfg: InvariantsConfig | None = None,
) -> ClosedSubgroupC:
    """Closed subgroup of ℂ with extended invariants (a, b): {0}, a cyclic group on
    the curve a³ = 27b², otherwise a lattice."""
    cfg = cfg or InvariantsConfig()
    a, b = complex(a), complex(b)
    try:
        return _invert(a, b, tol, cfg)
    except (OverflowError, ZeroDivisionError) as exc:
        raise NumericError(f"inversion of ({a}, {b}) failed: {exc}") from exc
