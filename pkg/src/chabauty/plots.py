"""Plot data — tables behind the trefoil, strata and collapse figures.

Column schemas are fixed:

  trefoil          a_re, a_im, b_re, b_im
  strata-sample    a_re, a_im, b_re, b_im, stratum, covol
  collapse-trace   k, distance

Files ending in ``.json`` are written as a list of records, anything else as CSV.
Rendering is left to the caller.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from chabauty.config import Config, MetricConfig, SphereConfig
from chabauty.errors import DescriptorError
from chabauty.euclid import covolume
from chabauty.fsutil import atomic_write
from chabauty.heisenberg import collapsing_lattice, collapsing_limit
from chabauty.metric import chabauty_distance
from chabauty.spaces import HEISENBERG
from chabauty.sphere import SpherePoint, forward_f, trefoil_points

log = logging.getLogger(__name__)

TREFOIL_COLUMNS = ["a_re", "a_im", "b_re", "b_im"]
STRATA_COLUMNS = TREFOIL_COLUMNS + ["stratum", "covol"]
TRACE_COLUMNS = ["k", "distance"]

KINDS = ("trefoil", "strata-sample", "collapse-trace")
DEFAULT_TRACE_KS = (1, 2, 4, 8, 16, 32)


def trefoil_frame(samples: int) -> pd.DataFrame:
    pts = trefoil_points(samples)
    return pd.DataFrame(
        {
            "a_re": pts[:, 0].real,
            "a_im": pts[:, 0].imag,
            "b_re": pts[:, 1].real,
            "b_im": pts[:, 1].imag,
        },
        columns=TREFOIL_COLUMNS,
    )


def strata_frame(points: Iterable[tuple[complex, complex]], cfg: SphereConfig | None = None) -> pd.DataFrame:
    """Stratum and covolume of f(a, b) for each point."""
    rows = []
    for a, b in points:
        c = forward_f(SpherePoint(a, b), cfg)
        rows.append((a.real, a.imag, b.real, b.imag, c.stratum, covolume(c)))
    return pd.DataFrame(rows, columns=STRATA_COLUMNS)


def strata_grid(grid: int, radius: float) -> list[tuple[complex, complex]]:
    """The grid^4 points of [−radius, radius]^4 ⊂ ℂ²."""
    axis = np.linspace(-radius, radius, grid)
    ar, ai, br, bi = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    a = (ar + 1j * ai).ravel()
    b = (br + 1j * bi).ravel()
    return list(zip(a.tolist(), b.tolist()))


def collapse_trace_frame(n: int, ks: Sequence[int], cfg: MetricConfig | None = None) -> pd.DataFrame:
    limit = collapsing_limit()
    rows = []
    for k in ks:
        d = chabauty_distance(HEISENBERG, collapsing_lattice(n, k), limit, cfg)
        log.info("collapse trace n=%d k=%d: distance %.4g", n, k, d)
        rows.append((k, d))
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def build_frame(
    kind: str,
    cfg: Config | None = None,
    n: int = 1,
    ks: Sequence[int] = DEFAULT_TRACE_KS,
) -> pd.DataFrame:
    cfg = cfg or Config()
    if kind == "trefoil":
        return trefoil_frame(cfg.plot.samples)
    if kind == "strata-sample":
        return strata_frame(strata_grid(cfg.plot.grid, cfg.plot.radius), cfg.sphere)
    if kind == "collapse-trace":
        return collapse_trace_frame(n, ks, cfg.metric)
    raise DescriptorError(f"unknown plot kind {kind!r}, expected one of {', '.join(KINDS)}")


def write_frame(df: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    with atomic_write(path, "w") as fp:
        if path.suffix.lower() == ".json":
            df.to_json(fp, orient="records")
        else:
            df.to_csv(fp, index=False)
    log.info("Wrote %d rows to %s", len(df), path)
    return path


def emit_plot(
    kind: str,
    path: str | Path,
    cfg: Config | None = None,
    n: int = 1,
    ks: Sequence[int] = DEFAULT_TRACE_KS,
) -> pd.DataFrame:
    df = build_frame(kind, cfg, n=n, ks=ks)
    write_frame(df, path)
    return df
