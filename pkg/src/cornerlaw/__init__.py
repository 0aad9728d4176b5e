"""Lattice counting of wedge-bipartition cut bonds and corners, orientation
averaging, corner-model fits and small-PEPS entanglement checks."""

__version__ = "0.1.0"

from .counting import (
    BipartitionResult,
    classify_sites,
    count_bipartition,
    count_corner_turns,
    count_cut_bonds,
    nearest_cell_corner_indicator,
    nearest_cell_skip_indicator,
)
from .fitting import BetaTrend, FitResult, beta_vs_radius, fit_corner_model, regressor
from .geometry import (
    Bond,
    SectorConfig,
    Site,
    enumerate_system_sites,
    normalize_angle,
    site_in_sector,
)
from .sweep import (
    SweepResult,
    SweepSpec,
    estimate_corner_rate,
    estimate_skip_probability,
    run_sweep,
)
