"""Shared pytest fixtures."""

import math

import numpy as np
import pytest
from pathlib import Path

from chabauty.config import CanonicalConfig, MetricConfig
from chabauty.euclid import Cyclic, Full, Lattice, Line, LineCyclic, Zero, configure_canonical


@pytest.fixture
def project_root() -> Path:
    """Return the project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture
def tmp_config(tmp_path: Path) -> Path:
    """Return a temporary config file path."""
    return tmp_path / "config.toml"


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so randomized checks are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def gaussian() -> Lattice:
    """ℤ[i]."""
    return Lattice(1, 1j)


@pytest.fixture
def hexagonal() -> Lattice:
    """Hexagonal lattice of covolume 1."""
    s = math.sqrt(2 / math.sqrt(3))
    return Lattice(s, s * complex(0.5, math.sqrt(3) / 2))


@pytest.fixture
def samples_c(gaussian, hexagonal) -> list:
    """One or two subgroups of ℂ per stratum."""
    return [
        Zero(),
        Full(),
        Cyclic(2),
        Cyclic(complex(1, 1)),
        Line(0.3),
        LineCyclic(1.1, 0.7),
        gaussian,
        hexagonal,
        Lattice(2, complex(0.3, 1.7)),
    ]


@pytest.fixture
def metric_cfg() -> MetricConfig:
    """Metric settings used by distance tests."""
    return MetricConfig(tol=1e-3)


@pytest.fixture(autouse=True)
def canonical_defaults():
    """Each test starts and ends with the default canonical tolerance."""
    configure_canonical(CanonicalConfig())
    yield
    configure_canonical(CanonicalConfig())
