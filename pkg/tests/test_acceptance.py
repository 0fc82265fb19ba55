"""Acceptance criteria, one test per criterion.

Each criterion is a plain function returning ``(passed, detail)`` so the
module can also be run directly::

    python3 tests/test_acceptance.py

which prints one PASS/FAIL line per criterion.  Under pytest the same lines
are collected and shown in the terminal summary.
"""

from __future__ import annotations

import filecmp
import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from fuzzstat import AlphaGrid, FuzzyNumber, add, metric_d, scale
from fuzzstat.analyzer import SpatialGrid, classify, continuity_probe, s_field
from fuzzstat.corpus import analysis_grid, example, instantiate, manifest, on_arch_boundary, oracle_value
from fuzzstat.schemes import parse_scheme, preset, unit_weights, validate
from fuzzstat.theorems import theorem_suite

RESULTS: list[str] = []
UNIT = unit_weights()
DOUBLING = parse_scheme("window:n,2n-1")


def _expected(name: str, quantity: str) -> list[dict]:
    for entry in manifest()["examples"]:
        if entry["name"] == name:
            return [e for e in entry["expected"] if e["quantity"] == quantity]
    raise KeyError(name)


def _random_fuzzy(rng, grid: AlphaGrid) -> FuzzyNumber:
    # endpoints on the 1/256 lattice: sums, differences and dyadic scalings are exact
    L = grid.resolution
    lo = rng.integers(-1024, 1024)
    hi = lo + rng.integers(0, 512)
    lower = lo - np.cumsum(rng.integers(0, 4, L)[::-1])[::-1]
    upper = hi + np.cumsum(rng.integers(0, 4, L)[::-1])[::-1]
    lower = lower - lower[-1] + lo
    upper = upper - upper[-1] + hi
    return FuzzyNumber(grid, lower / 256, upper / 256)


# -- criteria ----------------------------------------------------------------


def criterion_1():
    """Metric axioms and the three metric properties on 10,000 random triples."""
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    grid = AlphaGrid.uniform(257)
    scalars = np.array([-8, -4, -3, -2, -1.5, -1, -0.75, -0.5, -0.25, -0.125, 0, 0.125, 0.25, 0.5, 1, 2, 3, 8])
    failures = []
    worst_triangle = 0.0
    for i in range(10_000):
        x, y, z = (_random_fuzzy(rng, grid) for _ in range(3))
        c = float(rng.choice(scalars))
        dxy, dyx, dyz, dxz = metric_d(x, y), metric_d(y, x), metric_d(y, z), metric_d(x, z)
        if min(dxy, dyz, dxz) < 0 or dxy != dyx or metric_d(x, x) != 0 or (dxy == 0) != (x == y):
            failures.append((i, "axioms"))
        worst_triangle = max(worst_triangle, dxz - dxy - dyz)
        if dxz > dxy + dyz + 1e-12:
            failures.append((i, "triangle"))
        if metric_d(scale(c, x), scale(c, y)) != abs(c) * dxy:
            failures.append((i, "scalar"))
        if metric_d(add(x, z), add(y, z)) != dxy:
            failures.append((i, "translation"))
        if metric_d(add(x, z), add(y, x)) > dxy + metric_d(z, x) + 1e-12:
            failures.append((i, "subadditivity"))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 10
    return ok, (f"10000 triples, {len(failures)} failures {failures[:3]}, "
                f"max triangle excess {worst_triangle:.3g}, {elapsed:.2f}s (< 10s)")


def criterion_2():
    """Squares example: order-threshold dichotomy at theta 0.75 / 0.25."""
    start = time.perf_counter()
    seq = instantiate(example("squares"), AlphaGrid.uniform(3))
    grid = SpatialGrid.uniform(0, 1, 3)
    n_max = 10_000
    target = _expected("squares_indicator", "density")[0]
    L = target["params"]["n"]
    closed_form = math.isqrt(L) / L**0.75

    # the closed form floor(sqrt(L)) / L^0.75 counts k <= T, i.e. prefix index sets
    hi = classify(seq, grid, UNIT, DOUBLING, 0.75, [0.5], n_max, index_mode="prefix", modes=("pointwise",))
    lo = classify(seq, grid, UNIT, DOUBLING, 0.25, [0.5], n_max, index_mode="prefix", modes=("pointwise",))
    d_hi = hi.profiles["pointwise", 0.5].density
    d_lo = lo.profiles["pointwise", 0.5].density
    first_over_5 = int(np.argmax(d_lo > 5)) + 1 if np.any(d_lo > 5) else None
    prefix_ok = (
        d_hi[L - 1] == closed_form == target["value"]
        and hi.verdicts["pointwise"].decision == "converges"
        and lo.verdicts["pointwise"].decision == "diverges"
        and first_over_5 is not None
    )

    # literal window reading: same dichotomy, different constants
    whi = classify(seq, grid, UNIT, DOUBLING, 0.75, [0.5], n_max, index_mode="window", modes=("pointwise",))
    wlo = classify(seq, grid, UNIT, DOUBLING, 0.25, [0.5], n_max, index_mode="window", modes=("pointwise",))
    window_ok = (whi.verdicts["pointwise"].decision == "converges"
                 and wlo.verdicts["pointwise"].decision == "diverges")
    w_hi = whi.profiles["pointwise", 0.5].density[L - 1]
    w_lo = wlo.profiles["pointwise", 0.5].density[L - 1]
    elapsed = time.perf_counter() - start
    ok = prefix_ok and window_ok and elapsed < 5
    return ok, (f"prefix: density(1e4)={float(d_hi[L - 1])!r} (closed form {closed_form!r}), "
                f"{hi.verdicts['pointwise'].decision}; theta 0.25 first > 5 at n={first_over_5}, "
                f"{lo.verdicts['pointwise'].decision}; window: {w_hi:.4g} {whi.verdicts['pointwise'].decision}, "
                f"{w_lo:.4g} {wlo.verdicts['pointwise'].decision}; {elapsed:.2f}s (< 5s)")


def criterion_3():
    """exp_decay: pointwise converges on (0, 1], S_m = 1 near 0, equi diverges."""
    start = time.perf_counter()
    spec = example("exp_decay")
    seq = instantiate(spec)
    grid = analysis_grid(spec)
    eps = 1 / 3
    a = classify(seq, grid, UNIT, DOUBLING, 1.0, [eps], 2000, index_mode="window", modes=("pointwise", "equi"))
    points = a.eps_verdicts["pointwise", eps].detail["points"]
    every_point = points["converges"] == len(grid) and grid.points[0] > 0 and grid.points[-1] == 1.0
    field_ok = {}
    for e in _expected("exp_decay", "s_field"):
        m = e["params"]["m"]
        near = SpatialGrid(np.linspace(0.0, 1.0 / (2 * m - 1), 65))
        f = s_field(seq, near, UNIT, DOUBLING, e["params"]["theta"], e["params"]["eps"], m, "window")
        field_ok[m] = bool(np.all(f.values == e["value"]))
    equi = a.verdicts["equi"].decision
    elapsed = time.perf_counter() - start
    ok = every_point and all(field_ok.values()) and equi == "diverges" and elapsed < 5
    return ok, (f"pointwise converges at {points['converges']}/{len(grid)} points of (0,1]; "
                f"S_m == 1 on [0, 1/(2m-1)]: {field_ok}; equi {equi}; {elapsed:.2f}s (< 5s)")


def criterion_4():
    """moving_hump: S_m <= 1/m off the arch boundaries, uniform diverges, equi converges."""
    start = time.perf_counter()
    spec = example("moving_hump")
    seq = instantiate(spec)
    grid = analysis_grid(spec)
    stat = preset("statistical")
    assert not any(on_arch_boundary(float(x)) for x in grid.points)
    bound_ok = {}
    for m in (10, 50, 100, 1000):
        f = s_field(seq, grid, UNIT, stat, 1.0, 1e-12, m, "window")
        bound_ok[m] = bool(np.all(f.values[~f.probe] <= 1 / m))
    sups = [(e["params"]["n"], oracle_value(spec, "hump_sup", **e["params"]), e["value"], e["tolerance"])
            for e in _expected("moving_hump", "hump_sup")]
    sup_ok = all(abs(v - want) <= tol for _, v, want, tol in sups)
    a = classify(seq, grid, UNIT, stat, 1.0, [0.4], 2000, modes=("uniform", "equi"))
    uni, equi = a.verdicts["uniform"].decision, a.verdicts["equi"].decision
    arch_sup = a.profiles["uniform", 0.4].extra["sup"][:3]
    elapsed = time.perf_counter() - start
    ok = all(bound_ok.values()) and sup_ok and uni == "diverges" and equi == "converges" and elapsed < 5
    return ok, (f"S_m <= 1/m: {bound_ok}; oracle sup max error "
                f"{max(abs(v - w) for _, v, w, _ in sups):.2g}; analyzer arch sup n=1..3 "
                f"{np.round(arch_sup, 6).tolist()}; uniform {uni}, equi {equi}; {elapsed:.2f}s (< 5s)")


def criterion_5():
    """power_xn: members are continuous, the candidate limit jumps by 1 at x = 1."""
    start = time.perf_counter()
    seq = instantiate(example("power_xn"))
    grid = SpatialGrid.uniform(0, 1, 513)
    failing = [k for k in range(1, 201) if not continuity_probe(lambda x, k=k: seq.cuts(k, x), grid).passes]
    probe = continuity_probe(seq.limit_cuts, grid)
    jumps = probe.jumps_at_flags()
    want = _expected("power_xn", "power_limit_jump")[0]
    oracle = oracle_value(example("power_xn"), "power_limit_jump", **want["params"])
    jump_ok = (list(jumps) == [1.0] and abs(jumps[1.0] - want["value"]) <= want["tolerance"]
               and abs(oracle - want["value"]) <= want["tolerance"])
    elapsed = time.perf_counter() - start
    ok = not failing and jump_ok and elapsed < 1
    return ok, (f"members 1..200 failing the probe: {failing}; limit jumps {jumps}; "
                f"oracle jump {oracle!r}; {elapsed:.2f}s (< 1s)")


def criterion_6():
    """Finite containment suite: 3 seeds x n_max in {32, 64, 128}."""
    start = time.perf_counter()
    total, checks = 0, 0
    for seed in (42, 7, 3):
        for n_max in (32, 64, 128):
            report = theorem_suite(seed, n_max)
            total += len(report.violations)
            checks += sum(report.checked.values())
    elapsed = time.perf_counter() - start
    ok = total == 0 and elapsed < 60
    return ok, f"{checks} checks, {total} violations; {elapsed:.1f}s (< 60s)"


def criterion_7():
    """Presets validate at horizon 10^4 and reproduce the classical windows on n <= 100."""
    start = time.perf_counter()
    schemes = {
        "statistical": (preset("statistical"), lambda n: (1, n)),
        "lambda": (preset("lambda_stat", math.isqrt), lambda n: (n - math.isqrt(n) + 1, n)),
        # k_0 = 0, so the first lacunary window is [1, 2]
        "lacunary": (preset("lacunary", lambda r: 2**r), lambda r: ((2 ** (r - 1) if r > 1 else 0) + 1, 2**r)),
    }
    passed, exact = {}, {}
    for name, (s, window) in schemes.items():
        passed[name] = validate(UNIT, s, 10_000).passed
        exact[name] = all(s.window(n) == window(n) for n in range(1, 101))
    elapsed = time.perf_counter() - start
    ok = all(passed.values()) and all(exact.values()) and elapsed < 2
    return ok, f"validate: {passed}; windows exact: {exact}; {elapsed:.2f}s (< 2s)"


def criterion_8():
    """Byte-identical reports across reruns and across 1 and 8 worker threads."""
    argv = [sys.executable, "-m", "fuzzstat", "analyze", "--example", "random-triangular", "--seed", "5",
            "--scheme", "window:n,2n-1", "--eps", "0.25", "--eps", "0.5", "--nmax", "300", "--per-x", "--refine"]
    files = ("report.json", "profile.csv", "per_x.csv")
    with tempfile.TemporaryDirectory() as tmp:
        runs = []
        for label, threads in (("a", "1"), ("b", "1"), ("c", "8"), ("d", "8")):
            out = Path(tmp) / label
            env = {**os.environ, "FUZZSTAT_THREADS": threads}
            proc = subprocess.run([*argv, "--out", str(out)], env=env, capture_output=True, text=True)
            if proc.returncode != 0:
                return False, f"run {label} exited {proc.returncode}: {proc.stderr.strip()}"
            runs.append(out)
        same = {f: all(filecmp.cmp(runs[0] / f, r / f, shallow=False) for r in runs[1:]) for f in files}
    return all(same.values()), f"identical across 2 runs x FUZZSTAT_THREADS in {{1, 8}}: {same}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS.append(line)
    return line


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    ok, detail = CRITERIA[number - 1]()
    print(_record(number, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, fn in enumerate(CRITERIA, start=1):
        ok, detail = fn()
        failed += not ok
        print(_record(number, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
