"""Small arithmetic expression language for command-line inputs.

Grammar, loosest binding first:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom (('^' | '**') unary)?        right associative
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Names resolve to the call variables (typically t, or t and x), the constants
pi and T, or one of the functions sin, cos, exp, sqrt, abs, pow.  Everything
evaluates through numpy, so compiled expressions broadcast over arrays.
"""
from __future__ import annotations

import math
import re

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {
    "sin": (np.sin, 1),
    "cos": (np.cos, 1),
    "exp": (np.exp, 1),
    "sqrt": (np.sqrt, 1),
    "abs": (np.abs, 1),
    "pow": (np.power, 2),
}

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),])"
    r"|(?P<ws>\s+)"
    r"|(?P<bad>.)")


def _tokenize(text: str):
    toks = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ExpressionError(
                f"unexpected character {m.group()!r} at position {m.start()}")
        val = "^" if m.group() == "**" else m.group()
        toks.append((kind, val, m.start()))
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables, constants):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)
        self.constants = dict(constants)

    def peek(self):
        return self.toks[self.i]

    def take(self, op=None):
        kind, val, pos = self.toks[self.i]
        if op is not None and val != op:
            raise ExpressionError(
                f"expected {op!r} at position {pos} in {self.text!r}")
        self.i += 1
        return kind, val, pos

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(
                f"unexpected {val!r} at position {pos} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            lhs = node
            node = ((lambda a, b: lambda env: a(env) + b(env)) if op == "+"
                    else (lambda a, b: lambda env: a(env) - b(env)))(lhs, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            lhs = node
            node = ((lambda a, b: lambda env: a(env) * b(env)) if op == "*"
                    else (lambda a, b: lambda env: a(env) / b(env)))(lhs, rhs)
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            inner = self.unary()
            return lambda env: -inner(env)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            expo = self.unary()
            return lambda env: np.power(base(env), expo(env))
        return base

    def atom(self):
        kind, val, pos = self.take()
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        if kind == "num":
            x = float(val)
            return lambda env: x
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in FUNCTIONS:
                    raise ExpressionError(
                        f"unknown function {val!r} at position {pos}; "
                        f"known: {', '.join(sorted(FUNCTIONS))}")
                fn, arity = FUNCTIONS[val]
                self.take("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.take(")")
                if len(args) != arity:
                    raise ExpressionError(
                        f"{val} takes {arity} argument(s), got {len(args)} "
                        f"at position {pos}")
                if arity == 1:
                    a, = args
                    return lambda env: fn(a(env))
                a, b = args
                return lambda env: fn(a(env), b(env))
            if val in self.variables:
                return lambda env: env[val]
            if val in self.constants:
                c = self.constants[val]
                return lambda env: c
            raise ExpressionError(
                f"unknown name {val!r} at position {pos}; variables: "
                f"{', '.join(self.variables) or 'none'}; constants: "
                f"{', '.join(sorted(self.constants))}")
        raise ExpressionError(
            f"unexpected {val or 'end of input'!r} at position {pos} "
            f"in {self.text!r}")


class Expression:
    """Compiled expression; calling it broadcasts over numpy arrays."""

    __slots__ = ("text", "variables", "_node")

    def __init__(self, text: str, variables=("t",), T: float | None = None):
        constants = {"pi": math.pi}
        if T is not None:
            constants["T"] = float(T)
        self.text = text
        self.variables = tuple(variables)
        self._node = _Parser(text, self.variables, constants).parse()

    def __call__(self, *args):
        if len(args) != len(self.variables):
            raise ExpressionError(
                f"{self.text!r} expects {len(self.variables)} argument(s) "
                f"({', '.join(self.variables)}), got {len(args)}")
        scalar = all(np.ndim(a) == 0 for a in args)
        env = {name: np.asarray(a, dtype=float)
               for name, a in zip(self.variables, args)}
        with np.errstate(all="ignore"):
            out = self._node(env)
        out = np.asarray(out, dtype=float)
        if scalar:
            return float(out)
        shape = np.broadcast_shapes(*(np.shape(a) for a in args))
        return np.broadcast_to(out, shape) if out.shape != shape else out

    def __repr__(self):
        return f"Expression({self.text!r}, variables={self.variables})"


def evaluate_scalar(text: str, T: float | None = None) -> float:
    """Evaluate a closed expression like 'sqrt(60)' or '3*pi/2'."""
    return Expression(text, variables=(), T=T)()
