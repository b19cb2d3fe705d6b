"""
Closed-form expressions in run configs, compiled to numpy callables.

Grammar: numbers, + - * / ^ (or **), parentheses, the coordinates x1..x3,
the time t, the constants pi and E, and sin, cos, exp.
"""

import logging
import re
from typing import Callable, Dict, Sequence

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from core.errors import InvalidInputError

logger = logging.getLogger(__name__)

FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp}
CONSTANTS = {"pi": sympy.pi, "E": sympy.E}
VARIABLES = ("x1", "x2", "x3", "t")
TRANSFORMATIONS = standard_transformations + (convert_xor,)

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^(),]))")


def _tokens_ok(text: str, allowed: Sequence[str], label: str) -> None:
    """Reject anything outside the grammar before sympy sees the string."""
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InvalidInputError(f"{label}: unexpected character {text[pos]!r} at position {pos}")
        name = m.group(2)
        if name is not None and name not in allowed and name not in FUNCTIONS and name not in CONSTANTS:
            raise InvalidInputError(f"{label}: unknown name {name!r}")
        pos = m.end()


def compile_expression(text: str, variables: Sequence[str], label: str = "expression") -> Callable[..., np.ndarray]:
    """Parse `text` and return f(*variables) evaluated elementwise with numpy.

    Constant expressions broadcast against the first argument.

    Raises:
        InvalidInputError: On unknown names or malformed input
    """
    if not isinstance(text, str) or not text.strip():
        raise InvalidInputError(f"{label}: expression must be a non-empty string")
    _tokens_ok(text, variables, label)
    symbols = {name: sympy.Symbol(name, real=True) for name in variables}
    local_dict: Dict[str, object] = {**symbols, **FUNCTIONS, **CONSTANTS}
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=TRANSFORMATIONS, evaluate=True)
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
        raise InvalidInputError(f"{label}: cannot parse {text!r}: {e}") from e
    free = {str(s) for s in expr.free_symbols}
    if not free <= set(variables):
        raise InvalidInputError(f"{label}: unknown names {sorted(free - set(variables))}")
    fn = sympy.lambdify([symbols[v] for v in variables], expr, modules="numpy")

    def evaluate(*args):
        values = np.asarray(fn(*args), dtype=float)
        if args:
            shape = np.broadcast(*[np.asarray(a) for a in args]).shape
            values = np.broadcast_to(values, shape).copy()
        return values

    logger.debug(f"[Expressions] {label}: {expr}")
    return evaluate


def grid_field(text: str, coords: np.ndarray, label: str = "field") -> np.ndarray:
    """Evaluate an expression over x1..xd on grid coordinates of shape (d, ...)."""
    dim = coords.shape[0]
    fn = compile_expression(text, VARIABLES[:dim], label)
    return fn(*coords)


def time_field(text: str, dim: int, label: str = "forcing") -> Callable[[float, np.ndarray], np.ndarray]:
    """Expression over x1..xd and t as g(t, coords)."""
    names = VARIABLES[:dim] + ("t",)
    fn = compile_expression(text, names, label)

    def evaluate(t: float, coords: np.ndarray) -> np.ndarray:
        return fn(*coords, np.full(coords.shape[1:], float(t)))

    return evaluate
