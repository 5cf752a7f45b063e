"""Chabauty metric engine — halo predicate, bisection distance, limit and
neighbourhood verdicts, Mahler-type compactness checks.

For closed sets F₁, F₂ of a proper metric space with base point *, the halo
predicate at ε holds when every point of Fᵢ in the ball B(*, 1/ε − ε) lies
within ε of the other set; the distance is the infimum of such ε.  Every
function takes an ambient-space plugin from :mod:`chabauty.spaces`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from chabauty.config import MetricConfig
from chabauty.errors import BracketError, NumericError, StratumError
from chabauty.euclid import ClosedSubgroupC, Lattice, canonical_tol, covolume, min_norm
from chabauty.heisenberg import HeisLattice, heis_enumerate
from chabauty.spaces import AmbientSpace, Witness

log = logging.getLogger(__name__)


def halo_predicate(space: AmbientSpace, f1, f2, eps: float, cfg: MetricConfig | None = None) -> bool:
    if not eps > 0:
        raise NumericError(f"eps must be positive, got {eps}")
    cfg = cfg or MetricConfig()
    radius = 1 / eps - eps
    if radius < 0:
        return True
    return space.violation(f1, f2, radius, eps, cfg) is None and space.violation(f2, f1, radius, eps, cfg) is None


@dataclass
class DistanceResult:
    distance: float
    trace: list[tuple[float, bool]] = field(default_factory=list)


def _check_monotone(trace: list[tuple[float, bool]]) -> None:
    seen_true = False
    for eps, ok in sorted(trace):
        if ok:
            seen_true = True
        elif seen_true:
            raise NumericError(f"halo predicate is not monotone in eps near {eps:g}")


def chabauty_trace(space: AmbientSpace, f1, f2, cfg: MetricConfig | None = None) -> DistanceResult:
    """Bisection on ε ∈ [eps_min, eps_max] down to ``cfg.tol``, with every evaluation."""
    cfg = cfg or MetricConfig()
    if space.isclose(f1, f2, canonical_tol()):
        return DistanceResult(0.0)
    trace: list[tuple[float, bool]] = []

    def evaluate(eps: float) -> bool:
        ok = halo_predicate(space, f1, f2, eps, cfg)
        trace.append((eps, ok))
        log.debug("halo(eps=%.6g) = %s", eps, ok)
        return ok

    lo, hi = cfg.eps_min, cfg.eps_max
    if not evaluate(hi):
        raise BracketError(f"halo predicate is false at eps_max={hi}; distance not bracketed")
    while hi - lo > cfg.tol:
        mid = (lo + hi) / 2
        if evaluate(mid):
            hi = mid
        else:
            lo = mid
    _check_monotone(trace)
    return DistanceResult(hi, trace)


def chabauty_distance(space: AmbientSpace, f1, f2, cfg: MetricConfig | None = None) -> float:
    return chabauty_trace(space, f1, f2, cfg).distance


# ── convergence ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LimitFailure:
    index: int
    condition: str  # "approximation" or "no-escape"
    witness: Witness


@dataclass
class LimitReport:
    passed: bool
    indices: list[int]
    failures: list[LimitFailure] = field(default_factory=list)


def limit_verdict(
    space: AmbientSpace,
    seq: Callable[[int], object],
    limit,
    radius: float,
    delta: float,
    start: int,
    stop: int | None = None,
    indices: Iterable[int] | None = None,
    cfg: MetricConfig | None = None,
) -> LimitReport:
    """Finite-scale check that seq(k) → limit inside B(*, radius) for k ≥ start:

    * approximation: each point of the limit in the ball is δ-close to seq(k);
    * no-escape: each point of seq(k) in B(*, radius − δ) is δ-close to the limit.
    """
    if not (radius > 0 and delta > 0):
        raise NumericError(f"radius and delta must be positive, got R={radius}, delta={delta}")
    cfg = cfg or MetricConfig()
    if indices is None:
        indices = range(start, stop if stop is not None else start + cfg.horizon)
    report = LimitReport(True, [])
    for k in indices:
        fk = seq(k)
        report.indices.append(k)
        w = space.violation(limit, fk, radius, delta, cfg)
        if w is not None:
            report.failures.append(LimitFailure(k, "approximation", w))
        w = space.violation(fk, limit, radius - delta, delta, cfg)
        if w is not None:
            report.failures.append(LimitFailure(k, "no-escape", w))
    report.passed = not report.failures
    log.debug("limit verdict over %d indices: %s", len(report.indices), "pass" if report.passed else "fail")
    return report


def neighborhood_check(
    space: AmbientSpace,
    c,
    d,
    k_radius: float,
    u_radius: float,
    cfg: MetricConfig | None = None,
) -> bool:
    """D ∩ K ⊂ C·U and C ∩ K ⊂ D·U, K the closed ball of radius k_radius and U
    the open ball of radius u_radius around the identity."""
    if not (k_radius > 0 and u_radius > 0):
        raise NumericError(f"radii must be positive, got K={k_radius}, U={u_radius}")
    cfg = cfg or MetricConfig()
    for f1, f2 in ((d, c), (c, d)):
        if space.violation(f1, f2, k_radius, u_radius, cfg, group=True, closed=True) is not None:
            return False
    return True


# ── compactness ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class MahlerReport:
    sup_covolume: float
    inf_min_norm: float
    certified: bool
    covolume_escaping: bool
    min_norm_collapsing: bool


def _trend_down(values: Sequence[float]) -> bool:
    return len(values) >= 3 and all(b <= a for a, b in zip(values, values[1:])) and values[-1] < values[0]


def mahler_verdict(family: Sequence[ClosedSubgroupC], c_big: float, c_small: float) -> MahlerReport:
    """Covolume ≤ C and squared minimal norm ≥ c over a finite sample of lattices."""
    if not family:
        raise StratumError("empty lattice family")
    for lat in family:
        if not isinstance(lat, Lattice):
            raise StratumError(f"Mahler verdict needs lattices, got stratum {lat.stratum!r}")
    covols = [covolume(lat) for lat in family]
    norms = [min_norm(lat) for lat in family]
    sup_cov, inf_norm = max(covols), min(norms)
    return MahlerReport(
        sup_covolume=sup_cov,
        inf_min_norm=inf_norm,
        certified=sup_cov <= c_big and inf_norm >= c_small,
        covolume_escaping=_trend_down([-v for v in covols]) and covols[-1] > c_big,
        min_norm_collapsing=_trend_down(norms) and norms[-1] < c_small,
    )


@dataclass(frozen=True)
class HeisMahlerReport:
    sup_volume: float
    shortest: float
    certified: bool
    volume_violations: list[int]
    neighborhood_violations: list[int]


def heis_volume(lat: HeisLattice) -> float:
    """Haar volume of H/Λ: covol(p(Λ)) times the central step."""
    return lat.covolume * lat.central_step


def shortest_element(lat: HeisLattice, radius: float, cap: int) -> float:
    """Norm of a shortest non-identity element of norm ≤ radius, else inf."""
    pts = heis_enumerate(lat, radius, cap).points
    norms = [math.sqrt(float(p @ p)) for p in pts]
    norms = [v for v in norms if v > 1e-12]
    return min(norms, default=math.inf)


def heis_mahler_verdict(
    family: Sequence[HeisLattice],
    c_big: float,
    u_radius: float,
    cfg: MetricConfig | None = None,
) -> HeisMahlerReport:
    """vol(H/Λ) ≤ C and Λ ∩ U = {e} (U open of radius u_radius) over a sample."""
    if not family:
        raise StratumError("empty lattice family")
    cfg = cfg or MetricConfig()
    vols, shortest = [], []
    for lat in family:
        if not isinstance(lat, HeisLattice):
            raise StratumError(f"Heisenberg Mahler verdict needs lattices, got {lat!r}")
        vols.append(heis_volume(lat))
        shortest.append(shortest_element(lat, u_radius, cfg.max_points))
    vol_bad = [i for i, v in enumerate(vols) if v > c_big]
    nbhd_bad = [i for i, s in enumerate(shortest) if s < u_radius]
    return HeisMahlerReport(
        sup_volume=max(vols),
        shortest=min(shortest),
        certified=not vol_bad and not nbhd_bad,
        volume_violations=vol_bad,
        neighborhood_violations=nbhd_bad,
    )
