"""Weight sequences, alpha-beta windows and their weight accumulations.

A scheme maps ``n`` to the index window ``[ceil(alpha_n), floor(beta_n)]``
and the accumulation ``T(n)`` is the sum of the weights ``t_k`` over that
window.  Rules are plain functions of a single index; they may return
Python integers, which keeps schemes such as lacunary ``k_r = 2^r`` exact
far past the float range.

Asymptotic hypotheses (``liminf t_k > 0``, ``beta_n - alpha_n -> inf``) can
only be checked on a finite horizon.  :func:`validate` reports those checks
as surrogates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exprs import SpecParseError, compile_expr

__all__ = [
    "SchemeError",
    "EmptyWindowError",
    "PresetError",
    "WeightSequence",
    "AlphaBetaScheme",
    "WindowAccumulation",
    "Check",
    "ValidationReport",
    "accumulate",
    "accumulate_range",
    "preset",
    "validate",
    "parse_scheme",
    "parse_weights",
    "unit_weights",
]


class SchemeError(ValueError):
    pass


class EmptyWindowError(SchemeError):
    def __init__(self, n: int, lo: int, hi: int):
        self.n = n
        super().__init__(f"window at n={n} is empty: [{lo}, {hi}]")


class PresetError(SchemeError):
    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(f"{message} (failing index {index})")


def _ceil(v) -> int:
    return v if isinstance(v, int) else math.ceil(v)


def _floor(v) -> int:
    return v if isinstance(v, int) else math.floor(v)


@dataclass(frozen=True)
class WeightSequence:
    """Nonnegative weights ``t_k`` for ``k >= 1``.

    ``declared_liminf`` is the positive lower bound claimed for the tail;
    leave it as ``None`` to have :func:`validate` infer a trend instead.
    ``declared_upper`` is needed by the boundedness hypotheses.
    """

    generator: Callable[[int], float]
    declared_liminf: Optional[float] = None
    declared_upper: Optional[float] = None
    label: str = "weights"

    def __call__(self, k: int) -> float:
        return float(self.generator(k))

    def values(self, lo: int, hi: int) -> np.ndarray:
        """Weights for ``k = lo..hi`` as a float array."""
        if hi < lo:
            return np.zeros(0)
        return np.fromiter((self.generator(k) for k in range(lo, hi + 1)), float, hi - lo + 1)


def unit_weights() -> WeightSequence:
    return WeightSequence(lambda k: 1.0, declared_liminf=1.0, declared_upper=1.0, label="weights:unit")


@dataclass(frozen=True)
class AlphaBetaScheme:
    alpha: Callable[[int], float]
    beta: Callable[[int], float]
    label: str = "scheme"

    def window(self, n: int) -> tuple[int, int]:
        return _ceil(self.alpha(n)), _floor(self.beta(n))


@dataclass(frozen=True)
class WindowAccumulation:
    n: int
    lo: int
    hi: int
    T: float

    @property
    def window(self) -> range:
        return range(self.lo, self.hi + 1)

    def T_theta(self, theta: float) -> float:
        return self.T**theta


def accumulate(w: WeightSequence, s: AlphaBetaScheme, n: int) -> WindowAccumulation:
    """Exact (correctly rounded) weight sum over the n-th window."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = s.window(n)
    if hi < lo:
        raise EmptyWindowError(n, lo, hi)
    return WindowAccumulation(n, lo, hi, math.fsum(w(k) for k in range(lo, hi + 1)))


def accumulate_range(w: WeightSequence, s: AlphaBetaScheme, ns, max_index: int = 50_000_000):
    """Windows and accumulations for many ``n`` at once.

    Returns ``(lo, hi, T)`` arrays.  Sums come from a running prefix sum,
    which is exact for integer or dyadic weights.
    """
    ns = [int(n) for n in ns]
    bounds = [s.window(n) for n in ns]
    for n, (lo, hi) in zip(ns, bounds):
        if hi < lo:
            raise EmptyWindowError(n, lo, hi)
        if lo < 1:
            raise SchemeError(f"window at n={n} starts below index 1: [{lo}, {hi}]")
        if hi > max_index:
            raise SchemeError(f"window at n={n} reaches index {hi}, beyond the limit {max_index}")
    lo = np.array([b[0] for b in bounds], dtype=np.int64)
    hi = np.array([b[1] for b in bounds], dtype=np.int64)
    top = int(hi.max()) if hi.size else 0
    prefix = np.concatenate(([0.0], np.cumsum(w.values(1, top))))
    return lo, hi, prefix[hi] - prefix[lo - 1]


# -- presets -----------------------------------------------------------------

_PRESET_CHECK_HORIZON = 1000


def _pow2(r: int) -> int:
    return 2**r


def _isqrt_rule(n: int) -> int:
    return math.isqrt(n)


def _check_lambda(lam, horizon: int):
    prev = lam(1)
    if prev != 1:
        raise PresetError("lambda_1 must equal 1", 1)
    for n in range(2, horizon + 1):
        cur = lam(n)
        if cur < prev:
            raise PresetError("lambda must be nondecreasing", n)
        if cur > prev + 1:
            raise PresetError("lambda_{n+1} must not exceed lambda_n + 1", n)
        prev = cur


def _check_lacunary(k, horizon: int):
    prev = 0
    for r in range(1, horizon + 1):
        cur = k(r)
        if cur != _floor(cur) or cur <= prev:
            raise PresetError("lacunary k_r must be strictly increasing integers with k_0 = 0", r)
        prev = cur


def preset(name: str, rule: Callable[[int], float] | None = None, check_horizon: int = _PRESET_CHECK_HORIZON) -> AlphaBetaScheme:
    """Classical special cases of the alpha-beta window.

    ``statistical`` is ``[1, n]``; ``lambda_stat`` takes ``rule = lambda_n``
    and gives ``[n - lambda_n + 1, n]``; ``lacunary`` takes ``rule = k_r``
    (defined for ``r >= 1``, with ``k_0 = 0``) and gives
    ``[k_{r-1} + 1, k_r]``.  Parameter rules are checked up to
    ``check_horizon``.
    """
    if name == "statistical":
        return AlphaBetaScheme(lambda n: 1, lambda n: n, label="preset:statistical")
    if name == "lambda_stat":
        lam = rule or _isqrt_rule
        _check_lambda(lam, check_horizon)
        return AlphaBetaScheme(lambda n: n - lam(n) + 1, lambda n: n, label="preset:lambda")
    if name == "lacunary":
        k = rule or _pow2
        _check_lacunary(k, check_horizon)

        def k_at(r):
            return 0 if r == 0 else k(r)

        return AlphaBetaScheme(lambda r: k_at(r - 1) + 1, k_at, label="preset:lacunary")
    raise SchemeError(f"unknown preset {name!r}")


# -- validation --------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    witness: Optional[int] = None
    detail: str = ""
    surrogate: bool = False

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness,
            "detail": self.detail,
            "surrogate": self.surrogate,
        }


@dataclass
class ValidationReport:
    horizon: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "passed": self.passed,
            "note": "asymptotic conditions are finite-horizon surrogate checks",
            "checks": [c.to_dict() for c in self.checks],
        }


def _first(pred, indices) -> Optional[int]:
    for i in indices:
        if pred(i):
            return i
    return None


def validate(
    w: WeightSequence,
    s: AlphaBetaScheme,
    horizon: int,
    liminf_range: tuple[int, int] | None = None,
    gap_floor: float = 1,
    trend_ratio: float = 0.75,
) -> ValidationReport:
    """Check the weight and window hypotheses on ``1..horizon``.

    The report lists every check with a witness index on failure.  Nothing
    is raised for failing checks.
    """
    if horizon < 4:
        raise ValueError("horizon must be >= 4")
    report = ValidationReport(horizon)
    add = report.checks.append
    ns = range(1, horizon + 1)
    alpha = [s.alpha(n) for n in ns]
    beta = [s.beta(n) for n in ns]

    bad = _first(lambda i: alpha[i] <= 0 or beta[i] <= 0, range(horizon))
    add(Check("scheme_positive", bad is None, None if bad is None else bad + 1,
              "alpha_n and beta_n must be positive"))
    bad = _first(lambda i: alpha[i] < alpha[i - 1], range(1, horizon))
    add(Check("alpha_nondecreasing", bad is None, None if bad is None else bad + 1))
    bad = _first(lambda i: beta[i] < beta[i - 1], range(1, horizon))
    add(Check("beta_nondecreasing", bad is None, None if bad is None else bad + 1))
    bad = _first(lambda i: beta[i] < alpha[i], range(horizon))
    add(Check("beta_ge_alpha", bad is None, None if bad is None else bad + 1))
    bad = _first(lambda i: _floor(beta[i]) < _ceil(alpha[i]), range(horizon))
    add(Check("window_nonempty", bad is None, None if bad is None else bad + 1,
              "integer window [ceil(alpha_n), floor(beta_n)] must contain an index"))

    gap_end = beta[-1] - alpha[-1]
    gap_mid = beta[horizon // 2 - 1] - alpha[horizon // 2 - 1]
    grows = gap_end > gap_mid and gap_end > gap_floor
    add(Check("gap_growth", grows, None if grows else horizon,
              f"beta-alpha at N={horizon} must exceed its value at N/2 and the floor {gap_floor}",
              surrogate=True))

    t1 = w(1)
    add(Check("weight_first_positive", t1 > 0, None if t1 > 0 else 1))
    k0, k1 = liminf_range or (max(2, horizon // 2), horizon)
    tail = w.values(k0, k1)
    neg = np.flatnonzero(w.values(1, k1) < 0)
    add(Check("weights_nonnegative", neg.size == 0, None if neg.size == 0 else int(neg[0]) + 1))
    tail_min = float(tail.min())
    witness = k0 + int(tail.argmin())
    if w.declared_liminf is not None:
        ok = tail_min >= w.declared_liminf > 0
        detail = f"min t_k on [{k0}, {k1}] = {tail_min!r} vs declared {w.declared_liminf!r}"
    else:
        head = w.values(max(1, k0 // 2), k0 - 1)
        head_min = float(head.min()) if head.size else tail_min
        ok = tail_min > 0 and tail_min >= trend_ratio * head_min
        detail = (f"min t_k on [{k0}, {k1}] = {tail_min!r}, on the preceding block "
                  f"{head_min!r}; a falling tail suggests liminf 0")
    add(Check("weights_liminf_positive", ok, None if ok else witness, detail, surrogate=True))
    if w.declared_upper is not None:
        every = w.values(1, k1)
        over = np.flatnonzero(every > w.declared_upper)
        add(Check("weights_bounded", over.size == 0, None if over.size == 0 else int(over[0]) + 1,
                  f"t_k <= {w.declared_upper!r}"))
    return report


# -- specification mini-language ---------------------------------------------


def _split_top(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


def parse_scheme(spec: str) -> AlphaBetaScheme:
    """Parse ``window:<alpha>,<beta>`` or ``preset:<name>[:<param>]``.

    >>> parse_scheme("window:n,2n-1").window(7)
    (7, 13)
    """
    head, _, rest = spec.strip().partition(":")
    if head == "window":
        parts = _split_top(rest)
        if len(parts) != 2:
            raise SpecParseError("window needs two comma-separated expressions", rest or spec)
        a = compile_expr(parts[0], ("n",))
        b = compile_expr(parts[1], ("n",))
        return AlphaBetaScheme(a, b, label=f"window:{parts[0].strip()},{parts[1].strip()}")
    if head != "preset":
        raise SpecParseError("scheme must start with 'window:' or 'preset:'", head)
    name, _, param = rest.partition(":")
    try:
        if name == "statistical":
            if param:
                raise SpecParseError("statistical preset takes no parameter", param)
            s = preset("statistical")
        elif name in ("lambda", "lambda_stat"):
            rule = None if param in ("", "sqrt") else compile_expr(param, ("n",))
            s = preset("lambda_stat", rule)
        elif name == "lacunary":
            rule = None if param in ("", "pow2") else compile_expr(param, ("r",))
            s = preset("lacunary", rule)
        else:
            raise SpecParseError("unknown preset", name)
    except PresetError as exc:
        raise SpecParseError(str(exc), param) from None
    return AlphaBetaScheme(s.alpha, s.beta, label=spec.strip())


def parse_weights(spec: str) -> WeightSequence:
    """Parse ``weights:unit``, ``weights:const:<c>``, ``weights:inv_k`` or
    ``weights:expr:<expression in k>``; the ``weights:`` prefix is optional."""
    text = spec.strip()
    body = text[len("weights:"):] if text.startswith("weights:") else text
    label = "weights:" + body
    kind, _, param = body.partition(":")
    if kind == "unit" and not param:
        return WeightSequence(lambda k: 1.0, 1.0, 1.0, label)
    if kind == "const":
        try:
            c = float(param)
        except ValueError:
            raise SpecParseError("const weight needs a number", param or kind) from None
        if not (math.isfinite(c) and c > 0):
            raise SpecParseError("const weight must be positive", param)
        return WeightSequence(lambda k: c, c, c, label)
    if kind == "inv_k" and not param:
        return WeightSequence(lambda k: 1.0 / k, None, 1.0, label)
    if kind == "expr":
        rule = compile_expr(param, ("k",))
        return WeightSequence(lambda k: float(rule(k)), None, None, label)
    raise SpecParseError("unknown weight specification", kind)
