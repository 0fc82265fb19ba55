"""Fuzzy numbers on alpha-cut grids and weighted alpha-beta statistical
convergence of fuzzy-valued function sequences."""

__version__ = "0.1.0"

from .fuzzy import (
    DEFAULT_GRID,
    AlphaGrid,
    FuzzyNumber,
    GridMismatchError,
    InvalidFuzzyNumber,
    add,
    crisp,
    metric_d,
    scale,
    triangular,
)
from .schemes import (
    AlphaBetaScheme,
    WeightSequence,
    WindowAccumulation,
    accumulate,
    parse_scheme,
    parse_weights,
    preset,
    validate,
)
from .analyzer import (
    FuzzyFunctionSequence,
    SpatialGrid,
    alpha_cut_profiles,
    classify,
    continuity_probe,
    density_profile,
    exceedance_count,
    s_field,
    uniform_defect,
)
from .corpus import ExampleSpec, example, instantiate, oracle_value
from .theorems import theorem_suite
