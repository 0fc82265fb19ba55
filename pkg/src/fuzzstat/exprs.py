"""Tiny arithmetic expressions for command-line rules such as ``2n-1``.

Expressions are tokenized here (so implicit products like ``2n`` and the
``^`` power operator work), then parsed with :mod:`ast` and checked against
a whitelist before being compiled.  Scalar rules use :mod:`math` and keep
Python integers exact; array rules use numpy.
"""

from __future__ import annotations

import ast
import math
import re

import numpy as np

__all__ = ["SpecParseError", "compile_expr"]


class SpecParseError(ValueError):
    """A scheme, weight or family specification could not be parsed."""

    def __init__(self, message: str, token: str | None = None):
        self.token = token
        if token is not None:
            message = f"{message} (at token {token!r})"
        super().__init__(message)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|//|[-+*/^%(),]))"
)

_SCALAR_FUNCS = {
    "sqrt": math.sqrt,
    "isqrt": math.isqrt,
    "floor": math.floor,
    "ceil": math.ceil,
    "log": math.log,
    "log2": math.log2,
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
    "min": min,
    "max": max,
}

_ARRAY_FUNCS = {
    "sqrt": np.sqrt,
    "isqrt": lambda v: np.floor(np.sqrt(v)),
    "floor": np.floor,
    "ceil": np.ceil,
    "log": np.log,
    "log2": np.log2,
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.FloorDiv, ast.Pow, ast.Mod, ast.USub, ast.UAdd,
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = text[pos:].split()[0] if text[pos:].strip() else text[pos:]
            raise SpecParseError(f"unexpected character in {text!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


def _to_python(tokens: list[tuple[str, str]]) -> str:
    out = []
    prev = None
    for kind, value in tokens:
        # implicit product: "2n", "2(n+1)", "(n)(n)", "n(n)"
        if prev is not None and (
            (prev[0] == "num" and (kind == "name" or value == "("))
            or (prev[1] == ")" and (kind in ("name", "num") or value == "("))
        ):
            out.append("*")
        out.append("**" if value == "^" else value)
        prev = (kind, value)
    return " ".join(out)


def compile_expr(text: str, variables: tuple[str, ...] = ("n",), array: bool = False):
    """Compile ``text`` into a function of ``variables``.

    >>> compile_expr("2n-1")(5)
    9
    """
    if not text or not text.strip():
        raise SpecParseError("empty expression")
    tokens = _tokenize(text)
    funcs = _ARRAY_FUNCS if array else _SCALAR_FUNCS
    known = set(variables) | set(funcs) | set(_CONSTANTS)
    for kind, value in tokens:
        if kind == "name" and value not in known:
            raise SpecParseError(f"unknown name in {text!r}", value)
    if tokens[-1][0] == "op" and tokens[-1][1] != ")":
        raise SpecParseError(f"expression {text!r} ends with an operator", tokens[-1][1])
    source = _to_python(tokens)
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        offset = (exc.offset or 1) - 1
        rest = source[offset:].split() if 0 <= offset < len(source) else []
        near = rest[0] if rest else tokens[-1][1]
        raise SpecParseError(f"malformed expression {text!r}", near) from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise SpecParseError(f"unsupported construct in {text!r}", type(node).__name__)
        if isinstance(node, ast.Call) and not (
            isinstance(node.func, ast.Name) and node.func.id in funcs
        ):
            raise SpecParseError(f"only builtin functions may be called in {text!r}")
        if isinstance(node, ast.Name) and node.id in funcs and not any(
            isinstance(p, ast.Call) and p.func is node for p in ast.walk(tree)
        ):
            raise SpecParseError(f"function used as a value in {text!r}", node.id)
    code = compile(tree, "<expr>", "eval")
    namespace = {"__builtins__": {}, **funcs, **_CONSTANTS}

    def rule(*args):
        return eval(code, namespace, dict(zip(variables, args)))

    rule.source = text
    return rule
