"""Finite-n containment checks behind the convergence theorems.

Each theorem about limits rests on a set inclusion or a count inequality
that already holds at every finite ``n``.  :func:`theorem_suite` builds
seeded random instances and checks those finite statements two ways: the
analyzer's vectorized counts, and a brute-force oracle that evaluates
fuzzy numbers one at a time with :func:`~fuzzstat.fuzzy.metric_d` and
compares Python sets.

Random values, weights, thresholds and scale factors all live on a dyadic
lattice so every sum, difference and product is exact and the inclusions
can be compared without slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import analyzer as az
from .corpus import example, instantiate
from .fuzzy import AlphaGrid, add, metric_d, scale
from .schemes import WeightSequence, parse_scheme, preset

__all__ = ["CHECKS", "TheoremReport", "theorem_suite"]

CHECKS = (
    "closure_sum",
    "scalar_equality",
    "order_monotonicity",
    "chain_domination",
    "alpha_cut_bound",
    "subinterval",
)

_EPS_CHOICES = (0.25, 0.5, 0.75, 1.0, 1.5)
_SCALE_CHOICES = (2.0, -2.0, 0.5, -0.25, 4.0)
_THETA_CHOICES = (0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0)


@dataclass
class TheoremReport:
    seed: int
    n_max: int
    instance: dict
    checked: dict = field(default_factory=lambda: {c: 0 for c in CHECKS})
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, check: str, **witness):
        self.violations.append({"check": check, **witness})

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_max": self.n_max,
            "passed": self.passed,
            "instance": self.instance,
            "checked": self.checked,
            "violations": self.violations,
        }


def _weights(rng, k_cap: int) -> WeightSequence:
    table = rng.integers(128, 513, size=k_cap) / 256.0
    return WeightSequence(lambda k: float(table[k - 1]), 0.5, 2.0, "weights:random-dyadic")


def _brute_distances(seq, ks, xs, transform=None):
    """``d(f_k(x), f(x))`` via one FuzzyNumber per cell; rows follow ``xs``."""
    out = np.empty((len(xs), len(ks)))
    for i, x in enumerate(xs):
        lim = seq.limit(x)
        if transform is not None:
            lim = transform(lim, x, None)
        for j, k in enumerate(ks):
            v = seq.value(k, x)
            if transform is not None:
                v = transform(v, x, k)
            out[i, j] = metric_d(v, lim)
    return out


def _sets(t, dist_row, lo, hi, eps):
    return [{k for k in range(a, b + 1) if t[k - 1] * dist_row[k - 1] >= eps} for a, b in zip(lo, hi)]


def theorem_suite(seed: int, n_max: int = 64, points: int = 7, levels: int = 33) -> TheoremReport:
    """Check every finite containment on a seeded random instance.

    The report lists counterexamples; an empty list means the suite
    passed.  ``n_max = 1`` yields vacuous but valid checks.
    """
    rng = np.random.default_rng(seed)
    grid = AlphaGrid.uniform(levels)
    k_cap = 4 * max(n_max, 2) + 8
    f_seed, g_seed = (int(v) for v in rng.integers(0, 2**31, size=2))
    f = instantiate(example("random_triangular", seed=f_seed, cells=points, k_cap=k_cap), grid)
    g = instantiate(example("random_crisp", seed=g_seed, cells=points, k_cap=k_cap), grid)
    w = _weights(rng, k_cap)
    t = w.values(1, k_cap)
    xs = [(i + 0.5) / points for i in range(points)]
    eps_list = sorted({float(v) for v in rng.choice(_EPS_CHOICES, size=2)})
    c = float(rng.choice(_SCALE_CHOICES))
    theta, gamma = sorted(float(v) for v in rng.choice(_THETA_CHOICES, size=2, replace=False))
    schemes = [parse_scheme("window:n,2n-1"), preset("statistical"), parse_scheme("preset:lambda:sqrt")]

    report = TheoremReport(seed, n_max, {
        "f": {"family": "random_triangular", "seed": f_seed, "cells": points},
        "g": {"family": "random_crisp", "seed": g_seed, "cells": points},
        "weights_seed": seed, "epsilons": eps_list, "c": c, "theta": theta, "gamma": gamma,
        "alpha_levels": levels, "points": xs,
    })

    ks = list(range(1, k_cap + 1))
    d_f = _brute_distances(f, ks, xs)
    d_g = _brute_distances(g, ks, xs)
    d_sum = np.empty_like(d_f)
    for i, x in enumerate(xs):
        lim = add(f.limit(x), g.limit(x))
        for j, k in enumerate(ks):
            d_sum[i, j] = metric_d(add(f.value(k, x), g.value(k, x)), lim)
    d_c = _brute_distances(f, ks, xs, lambda v, x, k: scale(c, v))

    fsum = az.family_sum(f, g)
    fscaled = az.family_scale(c, f)
    spatial = az.SpatialGrid(xs)
    ns = range(1, n_max + 1)

    for s in schemes:
        for mode in az.INDEX_MODES:
            lo, hi, T = az.index_bounds(w, s, ns, mode)
            lo, hi = lo.tolist(), hi.tolist()
            ctx = {"scheme": s.label, "index_mode": mode}
            for eps in eps_list:
                _closure(report, ctx, eps, t, d_f, d_g, d_sum, lo, hi, xs, fsum, w, s, ns, mode)
                _scalar(report, ctx, eps, c, t, d_f, d_c, lo, hi, xs, fscaled, w, s, ns, mode)
                _order(report, ctx, eps, f, xs, w, s, ns, mode, theta, gamma)
                _chain(report, ctx, eps, t, d_f, lo, hi, xs, f, spatial, w, s, ns, mode)
                _alpha(report, ctx, eps, t, d_f, lo, hi, xs, f, w, s, ns, mode)
                _subinterval(report, ctx, eps, f, spatial, w, s, n_max, mode, theta)
    return report


def _compare_counts(report, check, ctx, eps, got, want, x):
    bad = np.flatnonzero(np.asarray(got) != np.asarray(want))
    if bad.size:
        j = int(bad[0])
        report.fail(check, **ctx, eps=eps, n=j + 1, x=x,
                    detail=f"analyzer count {int(got[j])} != brute-force count {int(want[j])}")


def _closure(report, ctx, eps, t, d_f, d_g, d_sum, lo, hi, xs, fsum, w, s, ns, mode):
    prof = az.density_profile(fsum, xs, w, s, 1.0, eps, ns, mode)
    for i, x in enumerate(xs):
        sum_sets = _sets(t, d_sum[i], lo, hi, eps)
        f_sets = _sets(t, d_f[i], lo, hi, eps / 2)
        g_sets = _sets(t, d_g[i], lo, hi, eps / 2)
        for n, (a, b, cset) in enumerate(zip(sum_sets, f_sets, g_sets), start=1):
            report.checked["closure_sum"] += 1
            extra = a - (b | cset)
            if extra:
                report.fail("closure_sum", **ctx, eps=eps, n=n, x=x, k=sorted(extra)[0],
                            detail="index exceeds for the sum but for neither summand at eps/2")
        _compare_counts(report, "closure_sum", ctx, eps, prof.per_x["count"][i], [len(a) for a in sum_sets], x)


def _scalar(report, ctx, eps, c, t, d_f, d_c, lo, hi, xs, fscaled, w, s, ns, mode):
    prof = az.density_profile(fscaled, xs, w, s, 1.0, eps, ns, mode)
    for i, x in enumerate(xs):
        scaled_sets = _sets(t, d_c[i], lo, hi, eps)
        base_sets = _sets(t, d_f[i], lo, hi, eps / abs(c))
        for n, (a, b) in enumerate(zip(scaled_sets, base_sets), start=1):
            report.checked["scalar_equality"] += 1
            if a != b:
                report.fail("scalar_equality", **ctx, eps=eps, n=n, x=x, c=c,
                            detail=f"sets differ at {sorted(a ^ b)[:3]}")
        _compare_counts(report, "scalar_equality", ctx, eps, prof.per_x["count"][i], [len(a) for a in scaled_sets], x)


def _order(report, ctx, eps, f, xs, w, s, ns, mode, theta, gamma):
    low = az.density_profile(f, xs, w, s, theta, eps, ns, mode)
    high = az.density_profile(f, xs, w, s, gamma, eps, ns, mode)
    dl, dh = low.per_x["density"], high.per_x["density"]
    counts = low.per_x["count"]
    T = low.T
    for i, x in enumerate(xs):
        for j in range(T.size):
            if T[j] < 1:
                continue
            report.checked["order_monotonicity"] += 1
            strict = counts[i, j] > 0 and T[j] > 1 and theta < gamma
            ok = dh[i, j] < dl[i, j] if strict else dh[i, j] <= dl[i, j]
            if not ok:
                report.fail("order_monotonicity", **ctx, eps=eps, n=j + 1, x=x, theta=theta, gamma=gamma,
                            detail=f"density {dh[i, j]!r} at order {gamma} vs {dl[i, j]!r} at order {theta}")


def _chain(report, ctx, eps, t, d_f, lo, hi, xs, f, spatial, w, s, ns, mode):
    pointwise = [_sets(t, d_f[i], lo, hi, eps) for i in range(len(xs))]
    sup = d_f.max(axis=0)
    sup_sets = _sets(t, sup, lo, hi, eps)
    forall_sets = [set.intersection(*col) for col in zip(*pointwise)]
    uni = az.uniform_defect(f, spatial, w, s, 1.0, eps, ns, mode)
    pw = az.density_profile(f, xs, w, s, 1.0, eps, ns, mode)
    _compare_counts(report, "chain_domination", ctx, eps, uni.count, [len(a) for a in sup_sets], "sup")
    for j in range(len(lo)):
        for i, x in enumerate(xs):
            report.checked["chain_domination"] += 1
            if not forall_sets[j] <= pointwise[i][j] <= sup_sets[j]:
                report.fail("chain_domination", **ctx, eps=eps, n=j + 1, x=x,
                            detail="for-all set, pointwise set and sup set are not nested")
        if uni.count[j] < pw.per_x["count"][:, j].max():
            report.fail("chain_domination", **ctx, eps=eps, n=j + 1,
                        detail="uniform count below a pointwise count")
    field_n = len(lo)
    if field_n:
        sf = az.s_field(f, spatial, w, s, 1.0, eps, field_n, mode)
        report.checked["chain_domination"] += 1
        if np.any(sf.values > sf.defect):
            report.fail("chain_domination", **ctx, eps=eps, n=field_n, detail="S_n(x) above the equi defect")


def _alpha(report, ctx, eps, t, d_f, lo, hi, xs, f, w, s, ns, mode):
    for i, x in enumerate(xs):
        ac = az.alpha_cut_profiles(f, x, w, s, 1.0, eps, ns, mode)
        brute = [len(a) for a in _sets(t, d_f[i], lo, hi, eps)]
        report.checked["alpha_cut_bound"] += 1
        _compare_counts(report, "alpha_cut_bound", ctx, eps, ac.metric, brute, x)
        if not np.array_equal(ac.uniform_alpha, ac.metric):
            report.fail("alpha_cut_bound", **ctx, eps=eps, x=x,
                        detail="sup-over-levels count differs from metric count")
        over = np.argwhere(np.maximum(ac.lower, ac.upper) > ac.metric[None, :])
        if over.size:
            lvl, j = (int(v) for v in over[0])
            report.fail("alpha_cut_bound", **ctx, eps=eps, n=j + 1, x=x, level=float(ac.levels[lvl]),
                        detail="endpoint count exceeds metric count")


def _subinterval(report, ctx, eps, f, spatial, w, s, n_max, mode, theta):
    pts = spatial.points
    if pts.size < 3:
        return
    sub = spatial.restrict(pts[1], pts[-2])
    ns = range(1, n_max + 1)
    full = az.density_profile(f, pts, w, s, theta, eps, ns, mode)
    part = az.density_profile(f, sub.points, w, s, theta, eps, ns, mode)
    rows = np.searchsorted(pts, sub.points)
    report.checked["subinterval"] += 1
    if not np.array_equal(full.per_x["count"][rows], part.per_x["count"]):
        report.fail("subinterval", **ctx, eps=eps, detail="restricted profile differs at shared points")
    if n_max >= 8:
        order = az.DECISIONS.index
        v_full = az.classify(f, spatial, w, s, theta, [eps], n_max, index_mode=mode, modes=("pointwise",),
                             check=False, workers=1).verdicts["pointwise"]
        v_sub = az.classify(f, sub, w, s, theta, [eps], n_max, index_mode=mode, modes=("pointwise",),
                            check=False, workers=1).verdicts["pointwise"]
        report.checked["subinterval"] += 1
        if order(v_sub.decision) > order(v_full.decision):
            report.fail("subinterval", **ctx, eps=eps,
                        detail=f"subinterval verdict {v_sub.decision} worse than {v_full.decision}")
