"""Lowering of expression trees to straight-line evaluation plans."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from ..errors import UnboundVariableError
from .calculus import free_variables
from .expr import (
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

__all__ = ["Instruction", "EvaluationPlan", "lower", "evaluate"]

_UNARY = {
    Sin: "sin",
    Cos: "cos",
    Exp: "exp",
    Negate: "neg",
    Reciprocal: "recip",
}


@dataclass(frozen=True)
class Instruction:
    """``dest <- op(args)``; ``imm`` is the integer exponent for ``pow``."""

    op: str
    dest: int
    args: tuple[int, ...]
    imm: int | None = None

    def render(self) -> str:
        a = [f"r{i}" for i in self.args]
        if self.op == "add":
            rhs = f"{a[0]} + {a[1]}"
        elif self.op == "mul":
            rhs = f"{a[0]} * {a[1]}"
        elif self.op == "pow":
            rhs = f"{a[0]} ** {self.imm}"
        elif self.op == "neg":
            rhs = f"-{a[0]}"
        elif self.op == "recip":
            rhs = f"1.0 / {a[0]}"
        else:
            rhs = f"{self.op}({a[0]})"
        return f"r{self.dest} = {rhs}"


@dataclass(frozen=True)
class EvaluationPlan:
    """Three-address program over a register file.

    Registers ``0 .. n_inputs-1`` hold the inputs in ``layout`` order, the
    next ``len(constants)`` hold constants, and the rest are written by
    ``instructions`` in sequence.
    """

    layout: tuple[Expr, ...]
    constants: tuple[float, ...]
    instructions: tuple[Instruction, ...]
    outputs: tuple[int, ...]
    n_registers: int
    _compiled: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n_inputs(self) -> int:
        return len(self.layout)

    def __len__(self) -> int:
        return len(self.instructions)

    def new_scratch(self) -> list[float]:
        regs = [0.0] * self.n_registers
        base = self.n_inputs
        regs[base:base + len(self.constants)] = self.constants
        return regs

    def evaluate(self, inputs: Sequence[float], scratch: list[float] | None = None) -> list[float]:
        return evaluate(self, inputs, scratch)

    def compile(self):
        """Python function ``f(inputs) -> tuple`` equivalent to :meth:`evaluate`.

        The generated code performs the same floating-point operations in the
        same order, so results match the interpreter exactly.
        """
        if self._compiled:
            return self._compiled[0]
        n = self.n_inputs
        lines = ["def plan_fn(inputs):"]
        if n == 1:
            lines.append("    r0, = inputs")
        elif n:
            lines.append("    " + ", ".join(f"r{i}" for i in range(n)) + " = inputs")
        for k, c in enumerate(self.constants):
            lines.append(f"    r{n + k} = {c!r}")
        lines.extend("    " + ins.render() for ins in self.instructions)
        outs = ", ".join(f"r{i}" for i in self.outputs)
        lines.append(f"    return ({outs},)" if self.outputs else "    return ()")
        namespace = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
        exec(compile("\n".join(lines), "<evaluation-plan>", "exec"), namespace)
        fn = namespace["plan_fn"]
        self._compiled.append(fn)
        return fn

    def listing(self) -> str:
        out = []
        for i, slot in enumerate(self.layout):
            out.append(f"in   r{i} <- {slot.text}")
        for k, c in enumerate(self.constants):
            out.append(f"const r{self.n_inputs + k} = {c!r}")
        for j, ins in enumerate(self.instructions):
            out.append(f"{j:4d} {ins.render()}")
        out.append("out  " + ", ".join(f"r{i}" for i in self.outputs))
        return "\n".join(out)


def lower(outputs: Sequence[Expr], layout: Sequence[Expr], cse: bool = True) -> EvaluationPlan:
    """Compile ``outputs`` into an :class:`EvaluationPlan` reading ``layout``.

    With ``cse`` (the default) structurally equal subtrees are emitted once.
    Raises :class:`UnboundVariableError` if an output mentions a variable
    missing from ``layout``.
    """
    outputs = [as_expr(o) for o in outputs]
    layout = tuple(layout)
    slot_of: dict[Expr, int] = {}
    for i, slot in enumerate(layout):
        if not isinstance(slot, (Symbol, TimeFunction)):
            raise TypeError(f"layout entries must be symbols or time-functions, got {slot!r}")
        if slot in slot_of:
            raise ValueError(f"duplicate layout slot {slot.text}")
        slot_of[slot] = i
    missing = [v for v in free_variables(*outputs) if v not in slot_of]
    if missing:
        raise UnboundVariableError(missing[0].text, [m.text for m in missing])

    n_in = len(layout)
    const_of: dict[float, int] = {}
    consts: list[float] = []

    def const_reg(value: float) -> int:
        r = const_of.get(value)
        if r is None:
            r = const_of[value] = n_in + len(consts)
            consts.append(value)
        return r

    # constants first so temporaries get contiguous numbering afterwards
    stack = list(outputs)
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if isinstance(node, Constant):
            const_reg(node.value)
        stack.extend(node.children)
    consts_sorted = sorted(consts)
    const_of = {v: n_in + k for k, v in enumerate(consts_sorted)}
    consts = consts_sorted

    instructions: list[Instruction] = []
    next_reg = n_in + len(consts)
    memo: dict[Expr, int] = {}

    def emit(op: str, args: tuple[int, ...], imm=None) -> int:
        nonlocal next_reg
        dest = next_reg
        next_reg += 1
        instructions.append(Instruction(op, dest, args, imm))
        return dest

    def rec(node: Expr) -> int:
        if cse:
            r = memo.get(node)
            if r is not None:
                return r
        if isinstance(node, Constant):
            r = const_of[node.value]
        elif isinstance(node, (Symbol, TimeFunction)):
            r = slot_of[node]
        elif isinstance(node, (Sum, Product)):
            op = "add" if isinstance(node, Sum) else "mul"
            regs = [rec(o) for o in node.operands]
            r = regs[0]
            for other in regs[1:]:
                r = emit(op, (r, other))
        elif isinstance(node, Power):
            r = emit("pow", (rec(node.base),), node.exponent)
        else:
            r = emit(_UNARY[type(node)], (rec(node.arg),))
        if cse:
            memo[node] = r
        return r

    out_regs = tuple(rec(o) for o in outputs)
    return EvaluationPlan(
        layout=layout,
        constants=tuple(consts),
        instructions=tuple(instructions),
        outputs=out_regs,
        n_registers=next_reg,
    )


_BINARY_FNS = {
    "add": lambda a, b: a + b,
    "mul": lambda a, b: a * b,
}
_UNARY_FNS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "neg": lambda a: -a,
    "recip": lambda a: 1.0 / a,
}


def evaluate(plan: EvaluationPlan, inputs: Sequence[float], scratch: list[float] | None = None) -> list[float]:
    """Run ``plan`` on ``inputs``.

    ``scratch`` is an optional register buffer from :meth:`EvaluationPlan.new_scratch`;
    concurrent callers must each bring their own.
    """
    if len(inputs) != plan.n_inputs:
        raise ValueError(f"plan expects {plan.n_inputs} inputs, got {len(inputs)}")
    regs = scratch if scratch is not None else plan.new_scratch()
    if len(regs) != plan.n_registers:
        raise ValueError("scratch buffer does not match the plan")
    regs[:plan.n_inputs] = [float(x) for x in inputs]
    for ins in plan.instructions:
        if ins.op == "pow":
            regs[ins.dest] = regs[ins.args[0]] ** ins.imm
        elif len(ins.args) == 2:
            regs[ins.dest] = _BINARY_FNS[ins.op](regs[ins.args[0]], regs[ins.args[1]])
        else:
            regs[ins.dest] = _UNARY_FNS[ins.op](regs[ins.args[0]])
    return [regs[i] for i in plan.outputs]
