"""Canonical example sequences, seeded random families and brute-force oracles.

The four worked sequences are

``squares_indicator``
    ``1`` at perfect squares ``k``, ``0`` elsewhere, constant in ``x``.
``exp_decay``
    ``exp(-k x)`` on ``[0, 1]``.
``moving_hump``
    ``k x / (1 + k^2 x^2)`` on the arch ``[1/(k+2), 1/(k+1)]``, ``0`` elsewhere.
``power_xn``
    ``x^k`` on ``[0, 1]``, whose limit jumps at ``x = 1``.

All of them take crisp values.  The oracles in this module never call the
analyzer; they enumerate, sample or use exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analyzer import FuzzyFunctionSequence, SpatialGrid
from .fuzzy import DEFAULT_GRID, AlphaGrid

__all__ = [
    "NAMES",
    "ALIASES",
    "ExampleSpec",
    "example",
    "instantiate",
    "analysis_grid",
    "oracle_value",
    "on_arch_boundary",
    "manifest",
]

NAMES = ("squares_indicator", "exp_decay", "moving_hump", "power_xn", "random_crisp", "random_triangular")
ALIASES = {
    "squares": "squares_indicator",
    "exp-decay": "exp_decay",
    "moving-hump": "moving_hump",
    "power-xn": "power_xn",
    "random-crisp": "random_crisp",
    "random-triangular": "random_triangular",
}
_DEFAULT_DOMAIN = {name: (0.0, 1.0) for name in NAMES}

# dyadic lattice keeps every sum, difference and product in the random
# families exact in binary floating point
_LATTICE = 256


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    params: dict = field(default_factory=dict)
    domain: tuple = None

    def __post_init__(self):
        name = ALIASES.get(self.name, self.name)
        if name not in NAMES:
            raise ValueError(f"unknown example {self.name!r}; choose from {sorted(NAMES)}")
        object.__setattr__(self, "name", name)
        dom = _DEFAULT_DOMAIN[name] if self.domain is None else tuple(map(float, self.domain))
        if not dom[0] < dom[1]:
            raise ValueError("domain must satisfy a < b")
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "params", dict(self.params))


def example(name: str, **params) -> ExampleSpec:
    domain = params.pop("domain", None)
    return ExampleSpec(name, params, domain)


# -- generators --------------------------------------------------------------


def _is_square(k):
    k = np.asarray(k, dtype=np.int64)
    r = np.floor(np.sqrt(k.astype(float))).astype(np.int64)
    r = np.where((r + 1) * (r + 1) <= k, r + 1, r)
    r = np.where(r * r > k, r - 1, r)
    return r * r == k


def _squares(k, x):
    return np.broadcast_to(_is_square(k).astype(float), np.broadcast_shapes(np.shape(k), np.shape(x)))


def _zero(x):
    return np.zeros(np.shape(x))


def _exp_decay(k, x):
    return np.exp(-np.asarray(k, dtype=float) * x)


def _exp_probes(lo, hi):
    # points inside [0, 1/hi]: every member of the window stays >= 1/e there
    return [1.0 / hi, 0.5 / hi]


def _hump(k, x):
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    on = (x >= 1.0 / (k + 2)) & (x <= 1.0 / (k + 1))
    return np.where(on, k * x / (1.0 + k * k * x * x), 0.0)


def _arch_mid(k):
    return 0.5 * (1.0 / (k + 1) + 1.0 / (k + 2))


def _hump_probes(lo, hi):
    if lo == hi:
        return [1.0 / (lo + 1), _arch_mid(lo)]
    return [_arch_mid(lo), _arch_mid(hi)]


def _power(k, x):
    return np.power(np.asarray(x, dtype=float), np.asarray(k, dtype=float))


def _power_limit(x):
    return np.where(np.asarray(x) == 1.0, 1.0, 0.0)


def _power_probes(lo, hi):
    return [0.5 ** (1.0 / hi)]


def _tables(seed: int, cells: int, k_cap: int, spike_rate: float):
    rng = np.random.default_rng(seed)
    limit = rng.integers(-2 * _LATTICE, 2 * _LATTICE + 1, size=cells)
    ks = np.arange(1, k_cap + 1)
    spikes = rng.random((k_cap, cells)) < spike_rate
    radius = np.where(spikes, 2 * _LATTICE, np.floor(_LATTICE / np.sqrt(ks))[:, None]).astype(np.int64)
    offset = np.floor(rng.random((k_cap, cells)) * (2 * radius + 1)).astype(np.int64) - radius
    return limit, limit[None, :] + offset


class _Table:
    """Piecewise-constant (in x) lookup of a per-(k, cell) table."""

    def __init__(self, values: np.ndarray, domain, cells: int):
        self.values = values
        self.a, self.b = domain
        self.cells = cells

    def cell(self, x):
        frac = (np.asarray(x, dtype=float) - self.a) / (self.b - self.a)
        return np.clip(np.floor(frac * self.cells).astype(np.int64), 0, self.cells - 1)

    def member(self, k, x):
        k = np.asarray(k, dtype=np.int64)
        if np.any(k < 1) or np.any(k > self.values.shape[0]):
            raise IndexError(f"random family defined for 1 <= k <= {self.values.shape[0]}")
        return self.values[k - 1, self.cell(x)] / _LATTICE

    def limit(self, row, x):
        return row[self.cell(x)] / _LATTICE


def _random_family(spec: ExampleSpec, grid: AlphaGrid, triangular: bool) -> FuzzyFunctionSequence:
    p = spec.params
    seed = int(p.get("seed", 0))
    cells = int(p.get("cells", 9))
    k_cap = int(p.get("k_cap", 4096))
    rate = float(p.get("spike_rate", 0.1))
    limit_c, centers = _tables(seed, cells, k_cap, rate)
    ctab = _Table(centers, spec.domain, cells)
    if not triangular:
        return FuzzyFunctionSequence.from_crisp(
            spec.domain, ctab.member, lambda x: ctab.limit(limit_c, x), grid, name=spec.name
        )
    rng = np.random.default_rng([seed, 1])
    limit_s = rng.integers(0, _LATTICE + 1, size=cells)
    spreads = rng.integers(0, _LATTICE + 1, size=(k_cap, cells))
    stab = _Table(spreads, spec.domain, cells)
    width = 1.0 - grid.levels

    def cuts(k, x):
        c = ctab.member(k, x)[..., None]
        s = stab.member(k, x)[..., None]
        return c - s * width, c + s * width

    def limit_cuts(x):
        c = ctab.limit(limit_c, x)[..., None]
        s = stab.limit(limit_s, x)[..., None]
        return c - s * width, c + s * width

    return FuzzyFunctionSequence(spec.domain, cuts, limit_cuts, grid, name=spec.name)


def instantiate(spec: ExampleSpec, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyFunctionSequence:
    """Family and candidate limit for ``spec`` on the alpha grid ``grid``."""
    name = spec.name
    dom = spec.domain
    if name == "squares_indicator":
        return FuzzyFunctionSequence.from_crisp(dom, _squares, _zero, grid, name=name)
    if name == "exp_decay":
        return FuzzyFunctionSequence.from_crisp(dom, _exp_decay, _zero, grid, _exp_probes, name)
    if name == "moving_hump":
        return FuzzyFunctionSequence.from_crisp(dom, _hump, _zero, grid, _hump_probes, name)
    if name == "power_xn":
        return FuzzyFunctionSequence.from_crisp(dom, _power, _power_limit, grid, _power_probes, name)
    if name == "random_crisp":
        return _random_family(spec, grid, triangular=False)
    return _random_family(spec, grid, triangular=True)


def on_arch_boundary(x: float) -> bool:
    """Whether ``x`` equals ``1/j`` for an integer ``j >= 2`` (exact rational test)."""
    if x <= 0:
        return False
    inv = 1 / Fraction(x)
    return inv.denominator == 1 and inv.numerator >= 2


def analysis_grid(spec: ExampleSpec, size: int = 513) -> SpatialGrid:
    """Default spatial grid for an example.

    ``exp_decay`` drops ``x = 0``, where the sequence tends to 1 rather
    than to the candidate limit; ``moving_hump`` drops points shared by two
    arches.
    """
    grid = SpatialGrid.uniform(*spec.domain, size)
    if spec.name == "exp_decay":
        return grid.without(lambda x: x == 0.0)
    if spec.name == "moving_hump":
        return grid.without(on_arch_boundary)
    return grid


# -- oracles -----------------------------------------------------------------

_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_max(f, a: float, b: float, samples: int = 4001, iters: int = 200) -> float:
    xs = [a + (b - a) * i / (samples - 1) for i in range(samples)]
    i = max(range(samples), key=lambda j: f(xs[j]))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, samples - 1)]
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    for _ in range(iters):
        if f(c) >= f(d):
            hi = d
        else:
            lo = c
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
    return max(f(xs[i]), f((lo + hi) / 2), f(a), f(b))


def _count_squares(lo: int, hi: int) -> int:
    count, n = 0, 1
    while n * n <= hi:
        if n * n >= lo:
            count += 1
        n += 1
    return count


_QUANTITIES = {
    "squares_indicator": {"squares_count"},
    "exp_decay": {"exp_lower_bound", "exp_window_count"},
    "moving_hump": {"hump_sup", "hump_arch_sup", "hump_active_count"},
    "power_xn": {"power_limit_jump"},
}


def oracle_value(spec: ExampleSpec, quantity: str, **params) -> float:
    """Brute-force value of a published quantity.

    ``squares_count``: squares in ``[lo, hi]`` (or ``<= L``) by enumeration.
    ``exp_lower_bound``: smallest ``exp(-k x)`` over the corners of
    ``k in [m, 2m-1]``, ``x in [0, 1/(2m-1)]``.
    ``exp_window_count``: ``#{k in [lo, hi] : exp(-k x) >= eps}``.
    ``hump_sup``: golden-section maximum of ``n x/(1+n^2 x^2)`` over ``[0, 1]``.
    ``hump_arch_sup``: the same maximum restricted to the active arch.
    ``hump_active_count``: ``#{n <= m : x in [1/(n+2), 1/(n+1)]}`` in exact
    rationals.
    ``power_limit_jump``: jump of the limit of ``x^n`` at ``x = 1``.
    """
    if quantity not in _QUANTITIES.get(spec.name, ()):
        raise ValueError(f"quantity {quantity!r} does not belong to {spec.name}")
    if quantity == "squares_count":
        if "L" in params:
            return _count_squares(1, int(params["L"]))
        return _count_squares(int(params["lo"]), int(params["hi"]))
    if quantity == "exp_lower_bound":
        m = int(params["m"])
        corners = [(k, x) for k in (m, 2 * m - 1) for x in (0.0, 1.0 / (2 * m - 1))]
        return min(math.exp(-k * x) for k, x in corners)
    if quantity == "exp_window_count":
        x, eps = float(params["x"]), float(params["eps"])
        return sum(1 for k in range(int(params["lo"]), int(params["hi"]) + 1) if math.exp(-k * x) >= eps)
    if quantity == "hump_sup":
        n = int(params["n"])
        return _golden_max(lambda x: n * x / (1 + n * n * x * x), 0.0, 1.0)
    if quantity == "hump_arch_sup":
        n = int(params["n"])
        return _golden_max(lambda x: n * x / (1 + n * n * x * x), 1.0 / (n + 2), 1.0 / (n + 1))
    if quantity == "hump_active_count":
        x = Fraction(float(params["x"]))
        return sum(1 for n in range(1, int(params["m"]) + 1) if Fraction(1, n + 2) <= x <= Fraction(1, n + 1))
    # power_limit_jump: x^n at a huge n, just left of 1 and at 1
    n = int(params.get("n", 10**9))
    left = max((1.0 - 10.0**-j) ** n for j in range(3, 7))
    return abs(1.0**n - left)


# -- manifest ----------------------------------------------------------------


def manifest() -> dict:
    """Example specs with their published expected quantities."""
    return {
        "examples": [
            {
                "name": "squares_indicator",
                "domain": [0.0, 1.0],
                "expected": [
                    {"quantity": "squares_count", "params": {"L": 100}, "value": 10, "tolerance": 0},
                    {"quantity": "squares_count", "params": {"L": 10000}, "value": 100, "tolerance": 0},
                    {"quantity": "density", "params": {"scheme": "window:n,2n-1", "weights": "weights:unit",
                                                       "index_mode": "prefix", "theta": 0.75, "eps": 0.5,
                                                       "n": 10000}, "value": 0.1, "tolerance": 0},
                ],
            },
            {
                "name": "exp_decay",
                "domain": [0.0, 1.0],
                "expected": [
                    {"quantity": "exp_lower_bound", "params": {"m": 10}, "value": math.exp(-1), "tolerance": 1e-12},
                    {"quantity": "exp_window_count", "params": {"x": 0.1, "lo": 5, "hi": 9, "eps": 1 / 3},
                     "value": 5, "tolerance": 0},
                    {"quantity": "s_field", "params": {"scheme": "window:n,2n-1", "index_mode": "window",
                                                       "theta": 1.0, "eps": 1 / 3, "m": 10}, "value": 1.0,
                     "tolerance": 0},
                    {"quantity": "s_field", "params": {"scheme": "window:n,2n-1", "index_mode": "window",
                                                       "theta": 1.0, "eps": 1 / 3, "m": 100}, "value": 1.0,
                     "tolerance": 0},
                ],
            },
            {
                "name": "moving_hump",
                "domain": [0.0, 1.0],
                "expected": [
                    {"quantity": "hump_sup", "params": {"n": n}, "value": 0.5, "tolerance": 1e-9}
                    for n in (1, 2, 3, 10, 100, 1000)
                ] + [
                    {"quantity": "value", "params": {"k": 3, "x": 0.25}, "value": 0.48, "tolerance": 1e-12},
                ],
            },
            {
                "name": "power_xn",
                "domain": [0.0, 1.0],
                "expected": [
                    {"quantity": "power_limit_jump", "params": {"x": 1.0}, "value": 1.0, "tolerance": 1e-9},
                ],
            },
        ]
    }
