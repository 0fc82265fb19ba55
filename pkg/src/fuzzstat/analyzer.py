"""Exceedance counting, density profiles and convergence-mode verdicts.

For a sequence of fuzzy-valued functions ``f_k`` with candidate limit ``f``,
the exceedance set at ``x`` is ``{k : t_k d(f_k(x), f(x)) >= eps}`` taken
over an index set that depends on ``n``:

``prefix``
    ``k <= floor(T(n))``, as in the definitions of the three modes.
``window``
    ``k in [ceil(alpha_n), floor(beta_n)]``, as in the worked examples.

The density of order ``theta`` is the exceedance count divided by
``T(n) ** theta``.  Three modes are derived from it:

* pointwise: one density profile per spatial point,
* uniform: the profile of ``g_k = sup_x t_k d(f_k(x), f(x))``,
* equi: the profile of ``max_x S_n(x)``, the equi defect.

Suprema over ``x`` are maxima over a finite :class:`SpatialGrid`, optionally
extended by per-index probe points supplied with the family, and are
therefore lower bounds.  Verdicts look at a finite tail of each profile;
they are heuristics and every report says so.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .fuzzy import DEFAULT_GRID, AlphaGrid, FuzzyNumber
from .schemes import (
    AlphaBetaScheme,
    SchemeError,
    ValidationReport,
    WeightSequence,
    WindowAccumulation,
    accumulate_range,
    validate,
)

__all__ = [
    "MODES",
    "INDEX_MODES",
    "VERDICT_NOTE",
    "FuzzyFunctionSequence",
    "SpatialGrid",
    "DensityProfile",
    "ModeVerdict",
    "Analysis",
    "SField",
    "AlphaCutProfiles",
    "ContinuityProbe",
    "SchemeValidationError",
    "worker_count",
    "index_bounds",
    "exceedance_set",
    "exceedance_count",
    "density_profile",
    "s_field",
    "uniform_defect",
    "classify",
    "judge",
    "alpha_cut_profiles",
    "continuity_probe",
    "equicontinuity_check",
    "family_sum",
    "family_scale",
]

MODES = ("pointwise", "uniform", "equi")
INDEX_MODES = ("prefix", "window")
DECISIONS = ("converges", "inconclusive", "diverges")
VERDICT_NOTE = "finite-horizon heuristic, not a proof"

TAIL_FRACTION = 0.25
SLOPE_MARGIN = 0.1
DEFAULT_TOLERANCE = 0.05
_CHUNK_CELLS = 1_000_000


class SchemeValidationError(SchemeError):
    def __init__(self, report: ValidationReport):
        self.report = report
        names = ", ".join(f"{c.name}@{c.witness}" for c in report.failures())
        super().__init__(f"scheme/weight validation failed: {names}")


def worker_count() -> int:
    """Worker threads allowed by ``FUZZSTAT_THREADS`` (default: cpu count, at most 8)."""
    raw = os.environ.get("FUZZSTAT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"FUZZSTAT_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(8, os.cpu_count() or 1))


# -- families and grids ------------------------------------------------------


def _crisp_cuts(values):
    v = np.asarray(values, dtype=float)[..., None]
    return v, v


@dataclass(frozen=True)
class FuzzyFunctionSequence:
    """A family ``k -> f_k`` of fuzzy-valued functions on ``[a, b]``.

    ``cuts(k, x)`` takes broadcastable arrays and returns ``(lower, upper)``
    with one trailing level axis, of length 1 (same interval at every
    level, e.g. crisp values) or ``grid.resolution``.  ``limit_cuts(x)``
    does the same for the candidate limit.  ``probes(lo, hi)`` may return
    extra x-points where members ``lo..hi`` are worth evaluating; they are
    added to the spatial grid whenever a supremum over ``x`` is taken.
    """

    domain: tuple[float, float]
    cuts: Callable
    limit_cuts: Callable
    grid: AlphaGrid = DEFAULT_GRID
    probes: Optional[Callable[[int, int], Sequence[float]]] = None
    name: str = "family"

    @classmethod
    def from_crisp(cls, domain, values, limit, grid=DEFAULT_GRID, probes=None, name="family"):
        """Family of crisp numbers given by ``values(k, x)`` and ``limit(x)``."""
        return cls(
            tuple(map(float, domain)),
            lambda k, x: _crisp_cuts(values(k, x)),
            lambda x: _crisp_cuts(limit(x)),
            grid,
            probes,
            name,
        )

    def _full(self, lower, upper) -> FuzzyNumber:
        shape = (self.grid.resolution,)
        return FuzzyNumber(self.grid, np.broadcast_to(lower, shape), np.broadcast_to(upper, shape))

    def value(self, k: int, x: float) -> FuzzyNumber:
        lower, upper = self.cuts(np.asarray(k), np.asarray(float(x)))
        return self._full(lower, upper)

    def limit(self, x: float) -> FuzzyNumber:
        lower, upper = self.limit_cuts(np.asarray(float(x)))
        return self._full(lower, upper)

    def endpoint_gaps(self, k, x):
        """``|lower_k - lower|`` and ``|upper_k - upper|`` with a level axis."""
        k = np.asarray(k)
        x = np.asarray(x, dtype=float)
        kl, ku = self.cuts(k, x)
        fl, fu = self.limit_cuts(x)
        return np.abs(kl - fl), np.abs(ku - fu)

    def distances(self, k, x) -> np.ndarray:
        """``d(f_k(x), f(x))`` broadcast over ``k`` and ``x``."""
        dl, du = self.endpoint_gaps(k, x)
        return np.maximum(dl, du).max(axis=-1)

    def probe_points(self, lo: int, hi: int) -> np.ndarray:
        if self.probes is None:
            return np.zeros(0)
        a, b = self.domain
        pts = np.asarray(self.probes(lo, hi), dtype=float).ravel()
        return np.unique(pts[(pts >= a) & (pts <= b)])


def family_sum(f: FuzzyFunctionSequence, g: FuzzyFunctionSequence) -> FuzzyFunctionSequence:
    """Levelwise sum ``f_k + g_k`` with limit ``f + g``."""
    if f.grid != g.grid:
        raise ValueError("families live on different alpha grids")

    def cuts(k, x):
        fl, fu = f.cuts(k, x)
        gl, gu = g.cuts(k, x)
        return fl + gl, fu + gu

    def limit_cuts(x):
        fl, fu = f.limit_cuts(x)
        gl, gu = g.limit_cuts(x)
        return fl + gl, fu + gu

    domain = (max(f.domain[0], g.domain[0]), min(f.domain[1], g.domain[1]))
    return FuzzyFunctionSequence(domain, cuts, limit_cuts, f.grid, name=f"{f.name}+{g.name}")


def family_scale(c: float, f: FuzzyFunctionSequence) -> FuzzyFunctionSequence:
    """``c f_k`` with limit ``c f``; endpoints swap for negative ``c``."""
    c = float(c)

    def scaled(pair):
        lo, hi = pair
        return (c * hi + 0.0, c * lo + 0.0) if c < 0 else (c * lo + 0.0, c * hi + 0.0)

    return FuzzyFunctionSequence(
        f.domain, lambda k, x: scaled(f.cuts(k, x)), lambda x: scaled(f.limit_cuts(x)),
        f.grid, f.probes, f"{c!r}*{f.name}",
    )


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Strictly increasing x-points standing in for ``[a, b]``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("spatial grid needs at least one point")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("spatial grid must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, a: float, b: float, size: int = 513) -> "SpatialGrid":
        if size < 2:
            return cls([float(a)])
        return cls(np.linspace(a, b, size))

    def __len__(self):
        return int(self.points.size)

    def restrict(self, c: float, d: float) -> "SpatialGrid":
        pts = self.points
        return SpatialGrid(pts[(pts >= c) & (pts <= d)])

    def without(self, reject: Callable[[float], bool]) -> "SpatialGrid":
        return SpatialGrid([p for p in self.points if not reject(float(p))])

    @property
    def step(self) -> float:
        return float(np.min(np.diff(self.points))) if len(self) > 1 else 0.0


# -- result types ------------------------------------------------------------


@dataclass
class DensityProfile:
    mode: str
    theta: float
    epsilon: float
    index_mode: str
    n: np.ndarray
    T: np.ndarray
    count: np.ndarray
    density: np.ndarray
    x: Optional[float] = None
    per_x: Optional[dict] = None
    extra: dict = field(default_factory=dict)

    def entries(self) -> list[dict]:
        return [
            {"n": int(n), "T": float(T), "count": int(c), "density": float(v)}
            for n, T, c, v in zip(self.n, self.T, self.count, self.density)
        ]


@dataclass
class ModeVerdict:
    mode: str
    decision: str
    tail_value: float
    tolerance: float
    n_max: int
    tail_slope: float = float("nan")
    epsilon: Optional[float] = None
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        slope = None if math.isnan(self.tail_slope) else self.tail_slope
        return {
            "mode": self.mode,
            "decision": self.decision,
            "tail_value": self.tail_value,
            "tail_slope": slope,
            "tolerance": self.tolerance,
            "n_max": self.n_max,
            "epsilon": self.epsilon,
            "detail": self.detail,
            "note": VERDICT_NOTE,
        }

    def summary(self) -> str:
        slope = "n/a" if math.isnan(self.tail_slope) else f"{self.tail_slope:.3g}"
        return (f"{self.mode}: {self.decision} (tail={self.tail_value:.4g}, slope={slope}, "
                f"n_max={self.n_max}; {VERDICT_NOTE})")


@dataclass
class Analysis:
    profiles: dict
    verdicts: dict
    eps_verdicts: dict
    validation: Optional[ValidationReport] = None


@dataclass
class SField:
    m: int
    x: np.ndarray
    values: np.ndarray
    probe: np.ndarray

    @property
    def defect(self) -> float:
        return float(self.values.max())

    @property
    def argmax(self) -> float:
        return float(self.x[int(self.values.argmax())])

    def as_dict(self) -> dict:
        return dict(zip(self.x.tolist(), self.values.tolist()))


# -- verdicts ----------------------------------------------------------------


def _tail_stats(T: np.ndarray, density: np.ndarray):
    density = np.atleast_2d(density)
    N = density.shape[-1]
    m = max(2, math.ceil(TAIL_FRACTION * N))
    tail = density[:, -m:]
    tail_value = tail.mean(axis=1)
    xs = np.log(np.asarray(T, dtype=float)[-m:])
    w = (tail > 0).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ys = np.where(tail > 0, np.log(np.where(tail > 0, tail, 1.0)), 0.0)
        sw = w.sum(axis=1)
        xbar = (w * xs).sum(axis=1) / sw
        ybar = (w * ys).sum(axis=1) / sw
        dx = xs[None, :] - xbar[:, None]
        sxx = (w * dx * dx).sum(axis=1)
        sxy = (w * dx * (ys - ybar[:, None])).sum(axis=1)
        slope = np.where((sw >= 2) & (sxx > 1e-12), sxy / sxx, np.nan)
    return tail_value, slope


def _decide(tail_value, slope, tolerance):
    falling = slope <= -SLOPE_MARGIN
    conv = (tail_value <= tolerance) | falling
    div = ~conv & (((tail_value >= 1 - tolerance) & ~falling) | ((slope >= SLOPE_MARGIN) & (tail_value > tolerance)))
    return np.where(conv, "converges", np.where(div, "diverges", "inconclusive"))


def judge(T, density, tolerance: float = DEFAULT_TOLERANCE):
    """Tail verdict for one profile: ``(decision, tail_value, tail_slope)``.

    ``tail_value`` is the mean of the last quarter of the entries and
    ``tail_slope`` the least-squares slope of ``log density`` against
    ``log T`` over that quarter (positive entries only).  A profile
    converges when its tail is within ``tolerance`` of zero or falls like a
    power of ``T``; it diverges when the tail sits near or above one
    without falling, or grows.
    """
    tail_value, slope = _tail_stats(T, density)
    decision = _decide(tail_value, slope, tolerance)
    return str(decision[0]), float(tail_value[0]), float(slope[0])


def _worst(decisions) -> str:
    return max(decisions, key=DECISIONS.index)


# -- index sets and exceedances ----------------------------------------------


def _check_theta_eps(theta: float, eps_list: Iterable[float]):
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta!r}")
    for eps in eps_list:
        if not eps > 0:
            raise ValueError(f"epsilon must be positive, got {eps!r}")


def _check_index_mode(index_mode: str):
    if index_mode not in INDEX_MODES:
        raise ValueError(f"index_mode must be one of {INDEX_MODES}, got {index_mode!r}")


def index_bounds(w: WeightSequence, s: AlphaBetaScheme, ns, index_mode: str = "prefix"):
    """Per-n index sets ``[lo, hi]`` and accumulations ``T``."""
    _check_index_mode(index_mode)
    lo, hi, T = accumulate_range(w, s, ns)
    if index_mode == "prefix":
        return np.ones_like(lo), np.floor(T).astype(np.int64), T
    return lo, hi, T


def _acc_bounds(acc: WindowAccumulation, index_mode: str) -> tuple[int, int]:
    _check_index_mode(index_mode)
    if index_mode == "prefix":
        return 1, math.floor(acc.T)
    return acc.lo, acc.hi


def exceedance_set(seq, x, w, acc, eps, index_mode="prefix") -> np.ndarray:
    """Indices ``k`` in the n-th index set with ``t_k d(f_k(x), f(x)) >= eps``."""
    lo, hi = _acc_bounds(acc, index_mode)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    ks = np.arange(lo, hi + 1)
    hit = w.values(lo, hi) * seq.distances(ks, float(x)) >= eps
    return ks[hit]


def exceedance_count(seq, x, w, acc, eps, index_mode="prefix") -> int:
    return int(exceedance_set(seq, x, w, acc, eps, index_mode).size)


def _chunks(size: int, per: int):
    return [(i, min(size, i + per)) for i in range(0, size, per)]


def _map(fn, items, workers):
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _level_width(seq, xs) -> int:
    """Length of the trailing level axis the family actually produces."""
    if xs.size == 0:
        return 1
    lower, _ = seq.cuts(np.array([1]), xs[:1])
    return max(1, int(np.shape(lower)[-1]))


def _scan(seq, xs, t, lo, hi, eps_list, workers, want_forall=False):
    """Counts per (eps, x, n) plus per-k maxima over the x-points.

    Returns ``counts[eps] (X, N)``, ``wmax (K,)``, ``warg (K,)`` and, when
    asked, ``forall[eps] (K,)`` flags for ``k`` exceeding at every x.
    """
    K = t.size
    ks = np.arange(1, K + 1)
    # chunk size depends only on the problem shape, never on the worker count
    per = max(1, _CHUNK_CELLS // (max(K, 1) * _level_width(seq, xs)))

    def work(span):
        a, b = span
        D = seq.distances(ks[None, :], xs[a:b, None])
        W = t[None, :] * D
        out = {}
        for eps in eps_list:
            E = W >= eps
            C = np.zeros((b - a, K + 1), dtype=np.int64)
            np.cumsum(E, axis=1, out=C[:, 1:])
            out[eps] = (C[:, hi] - C[:, lo - 1], E.all(axis=0) if want_forall else None)
        arg = W.argmax(axis=0)
        return out, W[arg, np.arange(K)], arg + a

    results = _map(work, _chunks(xs.size, per), workers)
    counts = {eps: np.concatenate([r[0][eps][0] for r in results]) for eps in eps_list}
    forall = None
    if want_forall:
        forall = {eps: np.logical_and.reduce([r[0][eps][1] for r in results]) for eps in eps_list}
    wmax = results[0][1].copy()
    warg = results[0][2].copy()
    for _, m, g in results[1:]:
        better = m > wmax
        wmax[better] = m[better]
        warg[better] = g[better]
    return counts, wmax, warg, forall


def _uniform_sup(seq, xs, t, wmax, warg, refine: bool):
    """``g_k = sup_x t_k d(f_k(x), f(x))`` from grid maxima, probes and refinement."""
    g = wmax.copy()
    K = t.size
    if seq.probes is not None:
        kk, pp = [], []
        for k in range(1, K + 1):
            pts = seq.probe_points(k, k)
            kk.append(np.full(pts.size, k))
            pp.append(pts)
        kk = np.concatenate(kk).astype(np.int64)
        pp = np.concatenate(pp)
        if kk.size:
            vals = t[kk - 1] * seq.distances(kk, pp)
            np.maximum.at(g, kk - 1, vals)
    if refine and xs.size > 1:
        i = warg
        left = xs[np.maximum(i - 1, 0)]
        right = xs[np.minimum(i + 1, xs.size - 1)]
        frac = np.linspace(0.0, 1.0, 17)
        pts = left[:, None] + (right - left)[:, None] * frac[None, :]
        ks = np.arange(1, K + 1)[:, None]
        g = np.maximum(g, (t[:, None] * seq.distances(ks, pts)).max(axis=1))
    return g


def _scalar_counts(flags: np.ndarray, lo, hi) -> np.ndarray:
    C = np.concatenate(([0], np.cumsum(flags)))
    return C[hi] - C[lo - 1]


def _equi_probes(seq, t, lo, hi, Tth, eps_list):
    """Best S_n(p) over probe points p for each n; ``None`` without probes."""
    if seq.probes is None:
        return None
    best = {eps: np.zeros(lo.size) for eps in eps_list}
    count = {eps: np.zeros(lo.size, dtype=np.int64) for eps in eps_list}
    where = {eps: np.full(lo.size, np.nan) for eps in eps_list}
    for j, (a, b) in enumerate(zip(lo.tolist(), hi.tolist())):
        pts = seq.probe_points(a, b)
        if pts.size == 0 or b < a:
            continue
        ks = np.arange(a, b + 1)
        W = t[a - 1:b][None, :] * seq.distances(ks[None, :], pts[:, None])
        for eps in eps_list:
            c = (W >= eps).sum(axis=1)
            i = int(c.argmax())
            best[eps][j] = c[i] / Tth[j]
            count[eps][j] = c[i]
            where[eps][j] = pts[i]
    return best, count, where


def _validated(w, s, n_max, check):
    if not check:
        return None
    report = validate(w, s, horizon=max(4, 10 * n_max))
    if not report.passed:
        raise SchemeValidationError(report)
    return report


def _prepare(seq, points, w, s, theta, eps_list, n_range, index_mode):
    _check_theta_eps(theta, eps_list)
    ns = np.array(list(n_range), dtype=np.int64)
    if ns.size == 0:
        raise ValueError("empty n range")
    lo, hi, T = index_bounds(w, s, ns, index_mode)
    K = int(max(hi.max(), 1))
    t = w.values(1, K)
    xs = np.asarray(points, dtype=float).ravel()
    a, b = seq.domain
    if np.any(xs < a) or np.any(xs > b):
        raise ValueError("spatial points must lie in the family's domain")
    return ns, lo, hi, T, T**theta, t, xs


def _pointwise_profile(theta, eps, index_mode, ns, T, xs, counts, Tth):
    density = counts / Tth[None, :]
    worst = int(density[:, -1].argmax())
    return DensityProfile(
        "pointwise", theta, eps, index_mode, ns, T, counts[worst], density[worst],
        x=float(xs[worst]),
        per_x={"x": xs, "count": counts, "density": density},
    )


# -- public analysis API -----------------------------------------------------


def density_profile(seq, x, w, s, theta, eps, n_range, index_mode="prefix", check=False):
    """Pointwise density profile at ``x`` (a point or an array of points).

    Each entry is ``count / T(n) ** theta``.  With several points the
    profile carries ``per_x`` arrays and its top-level entries follow the
    point with the largest final density.
    """
    ns = list(n_range)
    _validated(w, s, max(ns) if ns else 1, check)
    ns, lo, hi, T, Tth, t, xs = _prepare(seq, x, w, s, theta, [eps], ns, index_mode)
    counts, *_ = _scan(seq, xs, t, lo, hi, [eps], 1)
    return _pointwise_profile(theta, eps, index_mode, ns, T, xs, counts[eps], Tth)


def s_field(seq, grid: SpatialGrid, w, s, theta, eps, m, index_mode="prefix") -> SField:
    """``S_m(x)`` over the grid and the family's probe points for step ``m``."""
    ns, lo, hi, T, Tth, t, xs = _prepare(seq, grid.points, w, s, theta, [eps], [m], index_mode)
    pts = seq.probe_points(int(lo[0]), int(hi[0]))
    allx = np.concatenate([xs, pts])
    counts, *_ = _scan(seq, allx, t, lo, hi, [eps], 1)
    values = counts[eps][:, 0] / Tth[0]
    order = np.argsort(allx, kind="stable")
    probe = np.concatenate([np.zeros(xs.size, bool), np.ones(pts.size, bool)])
    return SField(int(m), allx[order], values[order], probe[order])


def uniform_defect(seq, grid: SpatialGrid, w, s, theta, eps, n_range, index_mode="prefix", refine=False):
    """Density profile of the scalar sequence ``g_k = sup_x t_k d(f_k(x), f(x))``.

    The per-k suprema are returned in ``extra["sup"]``.
    """
    ns, lo, hi, T, Tth, t, xs = _prepare(seq, grid.points, w, s, theta, [eps], n_range, index_mode)
    _, wmax, warg, _ = _scan(seq, xs, t, lo, hi, [eps], worker_count())
    g = _uniform_sup(seq, xs, t, wmax, warg, refine)
    counts = _scalar_counts(g >= eps, lo, hi)
    return DensityProfile("uniform", theta, eps, index_mode, ns, T, counts, counts / Tth, extra={"sup": g})


def classify(
    seq: FuzzyFunctionSequence,
    grid: SpatialGrid,
    w: WeightSequence,
    s: AlphaBetaScheme,
    theta: float,
    eps_list: Sequence[float],
    n_max: int,
    tolerance: float = DEFAULT_TOLERANCE,
    index_mode: str = "prefix",
    modes: Sequence[str] = MODES,
    refine: bool = False,
    check: bool = True,
    workers: Optional[int] = None,
) -> Analysis:
    """Profiles for ``n = 1..n_max`` and a verdict per mode.

    The pointwise verdict is the worst per-point verdict over the grid, the
    equi verdict is read from the equi defect and the uniform verdict from
    :func:`uniform_defect`.  A mode converges only if it converges at every
    epsilon.  Verdicts are finite-horizon heuristics.
    """
    if not 0 < tolerance < 0.5:
        raise ValueError("tolerance must lie in (0, 0.5)")
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    for mode in modes:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("at least one epsilon is required")
    report = _validated(w, s, n_max, check)
    ns, lo, hi, T, Tth, t, xs = _prepare(seq, grid.points, w, s, theta, eps_list, range(1, n_max + 1), index_mode)
    workers = worker_count() if workers is None else workers
    counts, wmax, warg, _ = _scan(seq, xs, t, lo, hi, eps_list, workers)

    profiles, eps_verdicts = {}, {}
    if "uniform" in modes:
        g = _uniform_sup(seq, xs, t, wmax, warg, refine)
    if "equi" in modes:
        probed = _equi_probes(seq, t, lo, hi, Tth, eps_list)

    for eps in eps_list:
        c = counts[eps]
        density = c / Tth[None, :]
        if "pointwise" in modes:
            tv, sl = _tail_stats(T, density)
            dec = _decide(tv, sl, tolerance)
            worst = max(range(xs.size), key=lambda i: (DECISIONS.index(dec[i]), tv[i]))
            prof = DensityProfile(
                "pointwise", theta, eps, index_mode, ns, T, c[worst], density[worst],
                x=float(xs[worst]), per_x={"x": xs, "count": c, "density": density},
            )
            profiles["pointwise", eps] = prof
            tally = {d: int(np.sum(dec == d)) for d in DECISIONS}
            eps_verdicts["pointwise", eps] = ModeVerdict(
                "pointwise", str(dec[worst]), float(tv[worst]), tolerance, n_max, float(sl[worst]), eps,
                {"worst_x": float(xs[worst]), "points": tally},
            )
        if "uniform" in modes:
            uc = _scalar_counts(g >= eps, lo, hi)
            prof = DensityProfile("uniform", theta, eps, index_mode, ns, T, uc, uc / Tth, extra={"sup": g})
            profiles["uniform", eps] = prof
            eps_verdicts["uniform", eps] = _verdict("uniform", prof, tolerance, n_max)
        if "equi" in modes:
            arg = density.argmax(axis=0)
            cols = np.arange(ns.size)
            defect = density[arg, cols]
            ecount = c[arg, cols]
            at = xs[arg].astype(float)
            if probed is not None:
                better = probed[0][eps] > defect
                defect = np.where(better, probed[0][eps], defect)
                ecount = np.where(better, probed[1][eps], ecount)
                at = np.where(better, probed[2][eps], at)
            prof = DensityProfile("equi", theta, eps, index_mode, ns, T, ecount, defect, extra={"argmax_x": at})
            profiles["equi", eps] = prof
            eps_verdicts["equi", eps] = _verdict("equi", prof, tolerance, n_max)

    # uniform => equi => pointwise, so a stronger mode can never look better
    # than a weaker one computed on the same grid
    for eps in eps_list:
        weaker = None
        for mode in ("pointwise", "equi", "uniform"):
            if mode not in modes:
                continue
            v = eps_verdicts[mode, eps]
            if weaker is not None and DECISIONS.index(weaker.decision) > DECISIONS.index(v.decision):
                v.detail["raised_from"] = v.decision
                v.detail["raised_by"] = weaker.mode
                v.decision = weaker.decision
            weaker = v

    verdicts = {}
    for mode in modes:
        per = [eps_verdicts[mode, eps] for eps in eps_list]
        worst = max(per, key=lambda v: (DECISIONS.index(v.decision), v.tail_value))
        verdicts[mode] = ModeVerdict(
            mode, _worst(v.decision for v in per), worst.tail_value, tolerance, n_max,
            worst.tail_slope, worst.epsilon, {"per_epsilon": {repr(v.epsilon): v.decision for v in per}},
        )
    return Analysis(profiles, verdicts, eps_verdicts, report)


def _verdict(mode, prof: DensityProfile, tolerance, n_max) -> ModeVerdict:
    decision, tv, sl = judge(prof.T, prof.density, tolerance)
    return ModeVerdict(mode, decision, tv, tolerance, n_max, sl, prof.epsilon)


# -- alpha-cut view ----------------------------------------------------------


@dataclass
class AlphaCutProfiles:
    """Per-level endpoint exceedance counts at one x.

    ``lower`` and ``upper`` have shape ``(levels, N)``; ``metric`` counts the
    exceedances of ``t_k d``; ``uniform_alpha`` counts those of the supremum
    over levels and sides, which is the same quantity built from endpoints.
    """

    levels: np.ndarray
    n: np.ndarray
    T: np.ndarray
    Tth: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    metric: np.ndarray
    uniform_alpha: np.ndarray

    @property
    def max_endpoint(self) -> np.ndarray:
        return np.maximum(self.lower.max(axis=0), self.upper.max(axis=0))

    def densities(self) -> dict:
        return {
            "max_endpoint": self.max_endpoint / self.Tth,
            "uniform_alpha": self.uniform_alpha / self.Tth,
            "metric": self.metric / self.Tth,
        }


def alpha_cut_profiles(seq, x, w, s, theta, eps, n_range, index_mode="prefix") -> AlphaCutProfiles:
    ns, lo, hi, T, Tth, t, _ = _prepare(seq, [x], w, s, theta, [eps], n_range, index_mode)
    K = t.size
    ks = np.arange(1, K + 1)
    L = seq.grid.resolution
    dl, du = seq.endpoint_gaps(ks, float(x))
    dl = np.broadcast_to(dl, (K, L))
    du = np.broadcast_to(du, (K, L))
    El = t[:, None] * dl >= eps
    Eu = t[:, None] * du >= eps
    lower = np.stack([_scalar_counts(El[:, j], lo, hi) for j in range(L)])
    upper = np.stack([_scalar_counts(Eu[:, j], lo, hi) for j in range(L)])
    sup_alpha = t * np.maximum(dl, du).max(axis=1)
    metric_flags = t * seq.distances(ks, float(x)) >= eps
    return AlphaCutProfiles(
        seq.grid.levels, ns, T, Tth, lower, upper,
        _scalar_counts(metric_flags, lo, hi), _scalar_counts(sup_alpha >= eps, lo, hi),
    )


# -- continuity --------------------------------------------------------------


@dataclass
class ContinuityProbe:
    h: float
    x: np.ndarray
    jump: np.ndarray
    fine_jump: np.ndarray
    flagged: np.ndarray

    @property
    def max_jump(self) -> float:
        return float(self.jump.max())

    @property
    def passes(self) -> bool:
        return not bool(self.flagged.any())

    def jumps_at_flags(self) -> dict:
        return {float(x): float(j) for x, j in zip(self.x[self.flagged], self.fine_jump[self.flagged])}


def _cut_distance(a, b) -> np.ndarray:
    return np.maximum(np.abs(a[0] - b[0]), np.abs(a[1] - b[1])).max(axis=-1)


def continuity_probe(cuts: Callable, grid: SpatialGrid, domain=None, h: float | None = None,
                     refinement: int = 16, atol: float = 1e-9) -> ContinuityProbe:
    """Jumps ``d(f(x - h), f(x + h))`` over the grid, clipped to the domain.

    The jump is recomputed at ``h / refinement``.  A point is flagged as a
    discontinuity when its jump exceeds ``atol`` and fails to shrink, i.e.
    the fine jump is still at least half the coarse one.  ``max_jump`` is
    the largest coarse jump.
    """
    xs = grid.points
    a, b = domain if domain is not None else (xs[0], xs[-1])
    h = grid.step if h is None else h

    def jump(step):
        left = np.clip(xs - step, a, b)
        right = np.clip(xs + step, a, b)
        return _cut_distance(cuts(left), cuts(right))

    coarse = jump(h)
    fine = jump(h / refinement)
    flagged = (coarse > atol) & (fine >= 0.5 * coarse)
    return ContinuityProbe(h, xs, coarse, fine, flagged)


def equicontinuity_check(seq, grid, w, s, theta, eps_list, n_max, modulus: Callable[[float], float],
                         index_mode="prefix", tolerance=DEFAULT_TOLERANCE):
    """Compare uniform and pointwise verdicts for a family declared equicontinuous.

    ``modulus(delta)`` is the user-supplied shared modulus of continuity; it
    is checked on neighbouring grid points for every member that enters an
    index set, but never inferred.
    """
    analysis = classify(seq, grid, w, s, theta, eps_list, n_max, tolerance, index_mode,
                        modes=("pointwise", "uniform"))
    _, hi, _ = index_bounds(w, s, range(1, n_max + 1), index_mode)
    K = int(max(hi.max(), 1))
    xs = grid.points
    ks = np.arange(1, K + 1)[None, :]
    bound = np.array([modulus(float(d)) for d in np.diff(xs)])
    per = max(1, _CHUNK_CELLS // (K * _level_width(seq, xs)))
    modulus_ok = True
    for a, b in _chunks(xs.size - 1, per):
        l0, u0 = seq.cuts(ks, xs[a:b, None])
        l1, u1 = seq.cuts(ks, xs[a + 1:b + 1, None])
        gaps = np.maximum(np.abs(l0 - l1), np.abs(u0 - u1)).max(axis=-1)
        modulus_ok &= bool(np.all(gaps <= bound[a:b, None] + 1e-12))
    pw = analysis.verdicts["pointwise"].decision
    un = analysis.verdicts["uniform"].decision
    return {"modulus_ok": modulus_ok, "pointwise": pw, "uniform": un, "agree": pw == un, "analysis": analysis}
