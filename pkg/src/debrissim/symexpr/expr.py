"""Immutable expression nodes.

Every node carries a canonical text form that doubles as its identity: two
nodes are structurally equal iff they have the same type and text. The text is
valid Python given ``sin``, ``cos``, ``exp`` and the free names, which keeps
debug dumps re-evaluable.
"""

from __future__ import annotations

import math
import re
from numbers import Real

__all__ = [
    "Expr",
    "Constant",
    "Symbol",
    "TimeFunction",
    "Sum",
    "Product",
    "Power",
    "Sin",
    "Cos",
    "Exp",
    "Negate",
    "Reciprocal",
    "TIME",
    "ZERO",
    "ONE",
    "as_expr",
    "sin",
    "cos",
    "exp",
]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9]*(_[A-Za-z0-9]+)*$")
_RESERVED_SUFFIX_RE = re.compile(r"_(dot|ddot|d\d+)$")
_RESERVED_NAMES = {"sin", "cos", "exp"}


class Expr:
    """Base class of the node grammar. Subclasses are immutable."""

    __slots__ = ("_text", "_hash")
    rank = 99

    def _finish(self, text: str) -> None:
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash((self.rank, text)))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def text(self) -> str:
        return self._text

    @property
    def sort_key(self) -> tuple[int, str]:
        return (self.rank, self._text)

    @property
    def children(self) -> tuple[Expr, ...]:
        return ()

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return (
            type(self) is type(other)
            and self._hash == other._hash
            and self._text == other._text
        )

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __lt__(self, other: Expr) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self._text

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{self._text}>"

    # arithmetic builds raw (unsimplified) nodes
    def __add__(self, other):
        return Sum(self, as_expr(other))

    def __radd__(self, other):
        return Sum(as_expr(other), self)

    def __sub__(self, other):
        return Sum(self, Negate(as_expr(other)))

    def __rsub__(self, other):
        return Sum(as_expr(other), Negate(self))

    def __mul__(self, other):
        return Product(self, as_expr(other))

    def __rmul__(self, other):
        return Product(as_expr(other), self)

    def __truediv__(self, other):
        return Product(self, Reciprocal(as_expr(other)))

    def __rtruediv__(self, other):
        return Product(as_expr(other), Reciprocal(self))

    def __neg__(self):
        return Negate(self)

    def __pow__(self, n):
        return Power(self, n)


class Constant(Expr):
    __slots__ = ("value",)
    rank = 0

    def __init__(self, value: float):
        value = float(value)
        if value == 0.0:
            value = 0.0  # drop the sign of -0.0
        object.__setattr__(self, "value", value)
        text = repr(value)
        self._finish(f"({text})" if value < 0 else text)


class Symbol(Expr):
    """A time-independent scalar (a parameter, or ``t`` itself)."""

    __slots__ = ("name",)
    rank = 1

    def __init__(self, name: str):
        if not _NAME_RE.match(name) or _RESERVED_SUFFIX_RE.search(name) or name in _RESERVED_NAMES:
            raise ValueError(f"invalid symbol name {name!r}")
        object.__setattr__(self, "name", name)
        self._finish(name)


class TimeFunction(Expr):
    """An unknown function of time, differentiated ``order`` times."""

    __slots__ = ("name", "order")
    rank = 2

    def __init__(self, name: str, order: int = 0):
        if not _NAME_RE.match(name) or _RESERVED_SUFFIX_RE.search(name) or name in _RESERVED_NAMES:
            raise ValueError(f"invalid time-function name {name!r}")
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "order", int(order))
        if order == 0:
            text = name
        elif order == 1:
            text = f"{name}_dot"
        elif order == 2:
            text = f"{name}_ddot"
        else:
            text = f"{name}_d{order}"
        self._finish(text)

    def diff(self, k: int = 1) -> TimeFunction:
        return TimeFunction(self.name, self.order + k)


class _NAry(Expr):
    __slots__ = ("operands",)
    _sep = ""

    def __init__(self, *operands: Expr):
        if len(operands) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two operands")
        ops = tuple(sorted(operands, key=_key))
        object.__setattr__(self, "operands", ops)
        self._finish("(" + self._sep.join(op._text for op in ops) + ")")

    @property
    def children(self):
        return self.operands


class Sum(_NAry):
    __slots__ = ()
    rank = 5
    _sep = " + "


class Product(_NAry):
    __slots__ = ()
    rank = 4
    _sep = "*"


class Power(Expr):
    __slots__ = ("base", "exponent")
    rank = 3

    def __init__(self, base: Expr, exponent: int):
        if isinstance(exponent, bool) or not isinstance(exponent, int):
            if isinstance(exponent, float) and exponent.is_integer():
                exponent = int(exponent)
            else:
                raise TypeError("only integer exponents are supported")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", exponent)
        n = f"({exponent})" if exponent < 0 else str(exponent)
        self._finish(f"({base._text}**{n})")

    @property
    def children(self):
        return (self.base,)


class _Unary(Expr):
    __slots__ = ("arg",)
    _fmt = "{}"

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)
        self._finish(self._fmt.format(arg._text))

    @property
    def children(self):
        return (self.arg,)


class Sin(_Unary):
    __slots__ = ()
    rank = 6
    _fmt = "sin({})"


class Cos(_Unary):
    __slots__ = ()
    rank = 7
    _fmt = "cos({})"


class Exp(_Unary):
    __slots__ = ()
    rank = 8
    _fmt = "exp({})"


class Negate(_Unary):
    __slots__ = ()
    rank = 9
    _fmt = "(-{})"


class Reciprocal(_Unary):
    __slots__ = ()
    rank = 10
    _fmt = "(1.0/{})"


def _key(e: Expr) -> tuple[int, str]:
    return (e.rank, e._text)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Real):
        if not math.isfinite(float(x)):
            raise ValueError(f"non-finite constant {x!r}")
        return Constant(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def sin(x) -> Sin:
    return Sin(as_expr(x))


def cos(x) -> Cos:
    return Cos(as_expr(x))


def exp(x) -> Exp:
    return Exp(as_expr(x))


TIME = Symbol("t")
ZERO = Constant(0.0)
ONE = Constant(1.0)
