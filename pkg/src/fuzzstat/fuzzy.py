"""Fuzzy numbers stored as stacks of alpha-cut intervals.

A fuzzy number is kept as its lower and upper endpoint at every level of a
fixed :class:`AlphaGrid`.  Arithmetic works level by level, and the
supremum metric becomes a maximum over the grid levels.  For endpoint
functions that are monotone and piecewise linear between grid levels (the
only kind that can be built here) that maximum is the exact supremum; any
other fuzzy number is approximated at grid resolution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AlphaGrid",
    "FuzzyNumber",
    "GridMismatchError",
    "InvalidFuzzyNumber",
    "DEFAULT_RESOLUTION",
    "DEFAULT_GRID",
    "crisp",
    "triangular",
    "add",
    "scale",
    "metric_d",
]

DEFAULT_RESOLUTION = 257


class GridMismatchError(ValueError):
    """Raised when two fuzzy numbers live on different alpha grids."""


class InvalidFuzzyNumber(ValueError):
    """Raised when an endpoint stack is not a valid nested family of cuts."""


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AlphaGrid:
    """Strictly increasing membership levels from 0 to 1."""

    levels: np.ndarray

    def __post_init__(self):
        levels = _frozen(self.levels)
        if levels.ndim != 1 or levels.size < 2:
            raise ValueError("an alpha grid needs at least two levels")
        if levels[0] != 0.0 or levels[-1] != 1.0:
            raise ValueError("alpha grid must start at 0 and end at 1")
        if not np.all(np.diff(levels) > 0):
            raise ValueError("alpha grid levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def uniform(cls, resolution: int = DEFAULT_RESOLUTION) -> "AlphaGrid":
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        return cls(np.linspace(0.0, 1.0, resolution))

    @property
    def resolution(self) -> int:
        return int(self.levels.size)

    def __eq__(self, other):
        if not isinstance(other, AlphaGrid):
            return NotImplemented
        return self is other or np.array_equal(self.levels, other.levels)

    def __hash__(self):
        return hash(self.levels.tobytes())

    def __repr__(self):
        return f"AlphaGrid(resolution={self.resolution})"


DEFAULT_GRID = AlphaGrid.uniform(DEFAULT_RESOLUTION)


@dataclass(frozen=True, eq=False)
class FuzzyNumber:
    """A fuzzy number given by its alpha-cuts ``[lower[i], upper[i]]``.

    Stacks are validated on construction: every cut must be a nonempty
    interval, cuts must be nested (``lower`` nondecreasing and ``upper``
    nonincreasing in alpha), and every endpoint must be finite.
    """

    grid: AlphaGrid
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _frozen(self.lower)
        upper = _frozen(self.upper)
        n = self.grid.resolution
        if lower.shape != (n,) or upper.shape != (n,):
            raise InvalidFuzzyNumber(
                f"expected {n} endpoints per side, got {lower.shape} and {upper.shape}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InvalidFuzzyNumber("endpoints must be finite")
        bad = np.flatnonzero(lower > upper)
        if bad.size:
            raise InvalidFuzzyNumber(f"empty cut at level index {bad[0]}")
        bad = np.flatnonzero(np.diff(lower) < 0)
        if bad.size:
            raise InvalidFuzzyNumber(f"lower endpoint decreases at level index {bad[0] + 1}")
        bad = np.flatnonzero(np.diff(upper) > 0)
        if bad.size:
            raise InvalidFuzzyNumber(f"upper endpoint increases at level index {bad[0] + 1}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def cut(self, index: int) -> tuple[float, float]:
        """Endpoints of the cut at grid level ``index``."""
        return float(self.lower[index]), float(self.upper[index])

    @property
    def core(self) -> tuple[float, float]:
        return self.cut(-1)

    @property
    def support(self) -> tuple[float, float]:
        return self.cut(0)

    @property
    def is_crisp(self) -> bool:
        return bool(np.all(self.lower == self.lower[0]) and np.all(self.upper == self.lower[0]))

    def __add__(self, other):
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return add(self, other)

    def __mul__(self, c):
        if isinstance(c, FuzzyNumber):
            return NotImplemented
        return scale(c, self)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(-1.0, self)

    def __eq__(self, other):
        if not isinstance(other, FuzzyNumber):
            return NotImplemented
        return (
            self.grid == other.grid
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def __hash__(self):
        return hash((self.grid, self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self):
        lo, hi = self.core
        s_lo, s_hi = self.support
        return f"FuzzyNumber(core=[{lo!r}, {hi!r}], support=[{s_lo!r}, {s_hi!r}])"

    def to_dict(self) -> dict:
        return {
            "levels": self.grid.levels.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FuzzyNumber":
        return cls(AlphaGrid(data["levels"]), data["lower"], data["upper"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FuzzyNumber":
        return cls.from_dict(json.loads(text))


def crisp(r: float, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    """The crisp embedding of ``r``: every cut is the single point ``r``."""
    if not math.isfinite(r):
        raise InvalidFuzzyNumber("crisp value must be finite")
    values = np.full(grid.resolution, float(r))
    return FuzzyNumber(grid, values, values)


def triangular(a: float, b: float, c: float, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    """Triangular number with cuts ``[a + alpha (b - a), c - alpha (c - b)]``."""
    if not a <= b <= c:
        raise InvalidFuzzyNumber("triangular number needs a <= b <= c")
    alpha = grid.levels
    # clipping at b keeps rounding from crossing the endpoints near the core
    lower = np.minimum(a + alpha * (b - a), b)
    upper = np.maximum(c - alpha * (c - b), b)
    return FuzzyNumber(grid, lower, upper)


def _check_grids(x: FuzzyNumber, y: FuzzyNumber):
    if x.grid != y.grid:
        raise GridMismatchError(f"{x.grid!r} != {y.grid!r}")


def add(x: FuzzyNumber, y: FuzzyNumber) -> FuzzyNumber:
    _check_grids(x, y)
    return FuzzyNumber(x.grid, x.lower + y.lower, x.upper + y.upper)


def scale(c: float, x: FuzzyNumber) -> FuzzyNumber:
    """Multiply every cut by ``c``; endpoints swap when ``c`` is negative."""
    c = float(c)
    if not math.isfinite(c):
        raise ValueError("scale factor must be finite")
    # + 0.0 turns the -0.0 produced by c == 0 into 0.0
    if c < 0:
        return FuzzyNumber(x.grid, c * x.upper + 0.0, c * x.lower + 0.0)
    return FuzzyNumber(x.grid, c * x.lower + 0.0, c * x.upper + 0.0)


def metric_d(x: FuzzyNumber, y: FuzzyNumber) -> float:
    """Supremum over levels of the larger endpoint difference."""
    _check_grids(x, y)
    gap = np.maximum(np.abs(x.lower - y.lower), np.abs(x.upper - y.upper))
    return float(gap.max())
