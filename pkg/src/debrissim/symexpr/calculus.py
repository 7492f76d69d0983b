"""Differentiation, simplification, substitution and tree-walk evaluation."""

from __future__ import annotations

import math
from collections.abc import Mapping

from .expr import (
    ONE,
    TIME,
    ZERO,
    Constant,
    Cos,
    Exp,
    Expr,
    Negate,
    Power,
    Product,
    Reciprocal,
    Sin,
    Sum,
    Symbol,
    TimeFunction,
    as_expr,
)

__all__ = [
    "differentiate",
    "simplify",
    "expand",
    "substitute",
    "free_variables",
    "node_count",
    "evaluate_tree",
]


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e: Expr, v: Expr) -> Expr:
    """Exact derivative of ``e`` with respect to ``v``.

    ``v`` may be a :class:`Symbol`, a :class:`TimeFunction`, or :data:`TIME`.
    Differentiating by :data:`TIME` is the *total* time derivative: every
    time-function of order k turns into order k+1. Any other variable is
    treated as independent of everything else (a partial derivative).

    The result is exact but not canonical; pass it through :func:`simplify`.
    """
    if not isinstance(v, (Symbol, TimeFunction)):
        raise TypeError(f"cannot differentiate with respect to {v!r}")
    total = v == TIME
    memo: dict[Expr, Expr | None] = {}

    def d(node: Expr) -> Expr | None:
        # None stands for an exact zero so that dead branches are never built
        try:
            return memo[node]
        except KeyError:
            pass
        out = _d(node)
        memo[node] = out
        return out

    def _d(node: Expr) -> Expr | None:
        if isinstance(node, Constant):
            return None
        if isinstance(node, Symbol):
            return ONE if node == v else None
        if isinstance(node, TimeFunction):
            if total:
                return node.diff()
            return ONE if node == v else None
        if isinstance(node, Sum):
            terms = [t for t in map(d, node.operands) if t is not None]
            if not terms:
                return None
            return terms[0] if len(terms) == 1 else Sum(*terms)
        if isinstance(node, Product):
            ops = node.operands
            terms = []
            for i, op in enumerate(ops):
                dop = d(op)
                if dop is None:
                    continue
                others = ops[:i] + ops[i + 1:]
                factors = [*others, dop] if dop != ONE else list(others)
                terms.append(factors[0] if len(factors) == 1 else Product(*factors))
            if not terms:
                return None
            return terms[0] if len(terms) == 1 else Sum(*terms)
        if isinstance(node, Power):
            n = node.exponent
            db = None if n == 0 else d(node.base)
            if db is None:
                return None
            factors = [Constant(n), db]
            if n - 1 != 0:
                factors.append(Power(node.base, n - 1))
            return Product(*factors)
        if isinstance(node, Sin):
            da = d(node.arg)
            return None if da is None else Product(Cos(node.arg), da)
        if isinstance(node, Cos):
            da = d(node.arg)
            return None if da is None else Negate(Product(Sin(node.arg), da))
        if isinstance(node, Exp):
            da = d(node.arg)
            return None if da is None else Product(node, da)
        if isinstance(node, Negate):
            da = d(node.arg)
            return None if da is None else Negate(da)
        if isinstance(node, Reciprocal):
            da = d(node.arg)
            return None if da is None else Negate(Product(da, Power(node.arg, -2)))
        raise TypeError(f"unknown node {type(node).__name__}")

    out = d(as_expr(e))
    return ZERO if out is None else out


# ---------------------------------------------------------------------------
# simplification


def _split_coeff(term: Expr) -> tuple[float, Expr | None]:
    if isinstance(term, Constant):
        return term.value, None
    if isinstance(term, Product) and isinstance(term.operands[0], Constant):
        rest = term.operands[1:]
        return term.operands[0].value, rest[0] if len(rest) == 1 else Product(*rest)
    return 1.0, term


def _scale(rest: Expr, coeff: float) -> Expr:
    if coeff == 1.0:
        return rest
    if isinstance(rest, Product):
        return Product(Constant(coeff), *rest.operands)
    return Product(Constant(coeff), rest)


def _make_sum(terms, expand_products: bool) -> Expr:
    const = 0.0
    coeffs: dict[Expr, float] = {}
    stack = list(terms)
    flat = []
    for t in stack:
        if isinstance(t, Sum):
            flat.extend(t.operands)
        else:
            flat.append(t)
    for t in flat:
        c, rest = _split_coeff(t)
        if rest is None:
            const += c
        else:
            coeffs[rest] = coeffs.get(rest, 0.0) + c
    out = [_scale(rest, c) for rest, c in coeffs.items() if c != 0.0]
    if const != 0.0:
        out.append(Constant(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Sum(*out)


def _make_product(factors, expand_products: bool) -> Expr:
    coeff = 1.0
    powers: dict[Expr, int] = {}
    flat = []
    for f in factors:
        if isinstance(f, Product):
            flat.extend(f.operands)
        else:
            flat.append(f)
    for f in flat:
        if isinstance(f, Constant):
            coeff *= f.value
        elif isinstance(f, Power):
            powers[f.base] = powers.get(f.base, 0) + f.exponent
        else:
            powers[f] = powers.get(f, 0) + 1
    if coeff == 0.0:
        return ZERO
    out = []
    for base, n in powers.items():
        if n == 0:
            continue
        out.append(base if n == 1 else Power(base, n))

    if expand_products:
        sums = [f for f in out if isinstance(f, Sum)]
        sums += [
            f for f in out
            if isinstance(f, Power) and f.exponent > 0 and isinstance(f.base, Sum)
        ]
        if sums:
            rest = [f for f in out if f not in sums]
            partial = [[Constant(coeff), *rest]]
            for s in sums:
                if isinstance(s, Power):
                    groups = [s.base.operands] * s.exponent
                else:
                    groups = [s.operands]
                for ops in groups:
                    partial = [p + [op] for p in partial for op in ops]
            return _make_sum([_make_product(p, False) for p in partial], False)

    if not out:
        return Constant(coeff)
    if coeff == 1.0:
        return out[0] if len(out) == 1 else Product(*out)
    return Product(Constant(coeff), *out)


def _make_power(base: Expr, n: int, expand_products: bool) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Constant):
        if base.value == 0.0 and n < 0:
            return Power(base, n)
        return Constant(base.value ** n)
    if isinstance(base, Power):
        return _make_power(base.base, base.exponent * n, expand_products)
    if isinstance(base, Product):
        return _make_product(
            [_make_power(f, n, expand_products) for f in base.operands], expand_products
        )
    if expand_products and n > 0 and isinstance(base, Sum):
        return _make_product([base] * n, True)
    return Power(base, n)


def simplify(e: Expr, expand: bool = False) -> Expr:
    """Canonical simplification.

    Flattens nested sums and products, folds constants, collects like terms
    (``2*x + 3*x -> 5*x``) and repeated factors (``x*x -> x**2``), drops
    additive/multiplicative identities, and rewrites ``Negate`` and
    ``Reciprocal`` as a ``-1`` coefficient and a ``-1`` power. With
    ``expand=True`` products are distributed over sums as well, which turns
    polynomial expressions in the trig/symbol atoms into a unique normal form.

    ``simplify`` is idempotent.
    """
    memo: dict[Expr, Expr] = {}

    def rec(node: Expr) -> Expr:
        try:
            return memo[node]
        except KeyError:
            pass
        out = _rec(node)
        memo[node] = out
        return out

    def _rec(node: Expr) -> Expr:
        if isinstance(node, (Constant, Symbol, TimeFunction)):
            return node
        if isinstance(node, Sum):
            return _make_sum([rec(op) for op in node.operands], expand)
        if isinstance(node, Product):
            return _make_product([rec(op) for op in node.operands], expand)
        if isinstance(node, Power):
            return _make_power(rec(node.base), node.exponent, expand)
        if isinstance(node, Negate):
            return _make_product([Constant(-1.0), rec(node.arg)], expand)
        if isinstance(node, Reciprocal):
            return _make_power(rec(node.arg), -1, expand)
        arg = rec(node.arg)
        if isinstance(arg, Constant):
            fn = {Sin: math.sin, Cos: math.cos, Exp: math.exp}[type(node)]
            return Constant(fn(arg.value))
        return type(node)(arg)

    return rec(as_expr(e))


def expand(e: Expr) -> Expr:
    return simplify(e, expand=True)


# ---------------------------------------------------------------------------
# substitution and inspection


def substitute(e: Expr, bindings: Mapping[Expr, float | Expr]) -> Expr:
    """Simultaneous substitution of symbols/time-functions.

    Replacements are not themselves rewritten, so ``{x: y, y: x}`` swaps.
    Unbound variables pass through.
    """
    table = {k: as_expr(v) for k, v in bindings.items()}
    memo: dict[Expr, Expr] = {}

    def rec(node: Expr) -> Expr:
        hit = table.get(node)
        if hit is not None:
            return hit
        if not node.children:
            return node
        try:
            return memo[node]
        except KeyError:
            pass
        if isinstance(node, (Sum, Product)):
            ops = [rec(op) for op in node.operands]
            out = node if all(a is b for a, b in zip(ops, node.operands)) else type(node)(*ops)
        elif isinstance(node, Power):
            b = rec(node.base)
            out = node if b is node.base else Power(b, node.exponent)
        else:
            a = rec(node.arg)
            out = node if a is node.arg else type(node)(a)
        memo[node] = out
        return out

    return rec(as_expr(e))


def free_variables(*exprs: Expr) -> list[Expr]:
    """Symbols and time-functions appearing in ``exprs``, in canonical order."""
    seen: set[Expr] = set()
    found: set[Expr] = set()
    stack = list(exprs)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, (Symbol, TimeFunction)):
            found.add(node)
        else:
            stack.extend(node.children)
    return sorted(found, key=lambda n: n.sort_key)


def node_count(e: Expr) -> int:
    """Size of the expression as a tree (shared subtrees counted each time)."""
    memo: dict[Expr, int] = {}

    def rec(node: Expr) -> int:
        n = memo.get(node)
        if n is None:
            n = 1 + sum(rec(c) for c in node.children)
            memo[node] = n
        return n

    return rec(e)


def evaluate_tree(e: Expr, env: Mapping[Expr, float]) -> float:
    """Recursive reference evaluator.

    Sums and products accumulate left to right in operand order; the lowered
    plans use the same order, so both routes agree bit for bit.
    """

    def rec(node: Expr) -> float:
        if isinstance(node, Constant):
            return node.value
        if isinstance(node, (Symbol, TimeFunction)):
            try:
                return env[node]
            except KeyError:
                raise KeyError(f"no value for free variable {node.text}") from None
        if isinstance(node, Sum):
            ops = node.operands
            acc = rec(ops[0])
            for op in ops[1:]:
                acc = acc + rec(op)
            return acc
        if isinstance(node, Product):
            ops = node.operands
            acc = rec(ops[0])
            for op in ops[1:]:
                acc = acc * rec(op)
            return acc
        if isinstance(node, Power):
            return rec(node.base) ** node.exponent
        if isinstance(node, Sin):
            return math.sin(rec(node.arg))
        if isinstance(node, Cos):
            return math.cos(rec(node.arg))
        if isinstance(node, Exp):
            return math.exp(rec(node.arg))
        if isinstance(node, Negate):
            return -rec(node.arg)
        if isinstance(node, Reciprocal):
            return 1.0 / rec(node.arg)
        raise TypeError(f"unknown node {type(node).__name__}")

    return rec(as_expr(e))
