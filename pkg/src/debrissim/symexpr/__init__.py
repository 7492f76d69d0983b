"""Small computer-algebra core: expression trees, calculus, and lowering to
straight-line numeric evaluation plans."""

from .calculus import (
    differentiate,
    evaluate_tree,
    expand,
    free_variables,
    node_count,
    simplify,
    substitute,
)
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
    cos,
    exp,
    sin,
)
from .plan import EvaluationPlan, Instruction, evaluate, lower

__all__ = [
    "Expr", "Constant", "Symbol", "TimeFunction", "Sum", "Product", "Power",
    "Sin", "Cos", "Exp", "Negate", "Reciprocal", "TIME", "ZERO", "ONE",
    "as_expr", "sin", "cos", "exp",
    "differentiate", "simplify", "expand", "substitute", "free_variables",
    "node_count", "evaluate_tree",
    "EvaluationPlan", "Instruction", "lower", "evaluate",
]
