"""Deterministic evaluator: statement execution, posting, and dispatch.

Execution has two phases:

1. **Startup.** Every method body runs once, in declaration order,
   with the global and every local initialised to 0.  There is no
   distinguished ``main``; a method that should only do work when
   dispatched must guard its body on its local (which is 0 at
   startup).
2. **Drain.** Posted calls are dispatched one at a time until the post
   queue is empty: remove the head, bind the call's post-time argument
   value to the target method's local, and run the body.  Calls posted
   while draining join the queue at their priority and may overtake
   earlier, lower-priority posts.

Other load-bearing choices, all observable in the trace:

* ``synch(m(e), p)`` evaluates ``e`` immediately; the *snapshot* is
  what the dispatched body sees, however the store changed in between.
* Each method has a single local cell, shared by every activation, so
  a recursive or re-entrant ``run`` clobbers the caller's local.
* ``return()`` pops the active frame and discards the rest of the
  body; a body that ends without it returns implicitly.
* ``provided e`` with ``e = 0`` has nowhere to go: it aborts the run
  with a ``provided-failed`` outcome.
* Arithmetic is checked signed 64-bit with truncating division;
  ``and``/``or`` evaluate both operands (no short-circuit).
* A step budget bounds the total number of rule applications so that
  ``while`` loops cannot hang the process.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .postlist import AsynchList, AsynchNode
from .syntax import (
    I64_MAX,
    I64_MIN,
    AssignGlobal,
    AssignLocal,
    Binary,
    Expr,
    If,
    IntLit,
    Method,
    Priority,
    Program,
    Provided,
    Return,
    Run,
    Seq,
    Stmt,
    Synch,
    Unary,
    Var,
    While,
)

DEFAULT_BUDGET = 1_000_000

PROVIDED_FAILED = "provided-failed"
DIVISION_BY_ZERO = "division-by-zero"
ARITH_OVERFLOW = "arith-overflow"
STEP_BUDGET_EXHAUSTED = "step-budget-exhausted"


class ExecFailure(Exception):
    """Internal signal for a runtime fault; surfaced as a Failed outcome."""

    def __init__(self, kind: str, line: int, col: int):
        super().__init__(f"{kind} at {line}:{col}")
        self.kind = kind
        self.line = line
        self.col = col


@dataclass
class Store:
    """Values of the global and of each method's single local cell."""

    global_value: int = 0
    locals: dict[str, int] = field(default_factory=dict)


@dataclass
class TraceEvent:
    seq: int
    kind: str  # post | dispatch | run-call | return | method-start |
    #            method-end | assign-global | provided-fail | error
    method: str | None = None
    value: int | None = None
    priority: Priority | None = None

    def to_json_obj(self) -> dict:
        obj: dict = {"seq": self.seq, "kind": self.kind}
        if self.method is not None:
            obj["method"] = self.method
        if self.value is not None:
            obj["value"] = self.value
        if self.priority is not None:
            obj["priority"] = self.priority.keyword
        return obj


@dataclass
class Finished:
    """Normal termination: post queue drained, stack empty."""

    global_value: int
    trace: list[TraceEvent]


@dataclass
class Failed:
    """Aborted run; ``kind`` is one of the runtime fault kinds above."""

    kind: str
    line: int
    col: int
    trace: list[TraceEvent]


Outcome = Finished | Failed


class Interpreter:
    """One program execution; fields are the live machine state.

    ``store``, ``postlist``, ``stack``, ``step_count`` and ``trace``
    stay inspectable after ``run`` returns, which the test suite uses
    to audit terminal states.
    """

    def __init__(self, program: Program, budget: int = DEFAULT_BUDGET,
                 postlist=None):
        self.program = program
        self.methods = {m.name: m for m in program.methods}
        self.budget = budget
        self.store = Store(0, {m.name: 0 for m in program.methods})
        self.postlist = AsynchList.empty() if postlist is None else postlist
        self.stack: list[str] = []
        self.step_count = 0
        self.trace: list[TraceEvent] = []
        self._post_seq = 0
        self._event_seq = 0

    # -- bookkeeping --

    def _emit(self, kind, method=None, value=None, priority=None):
        self._event_seq += 1
        self.trace.append(TraceEvent(self._event_seq, kind, method, value, priority))

    def _tick(self, line: int, col: int):
        if self.step_count >= self.budget:
            raise ExecFailure(STEP_BUDGET_EXHAUSTED, line, col)
        self.step_count += 1

    def _check64(self, value: int, at: Expr) -> int:
        if value < I64_MIN or value > I64_MAX:
            raise ExecFailure(ARITH_OVERFLOW, at.line, at.col)
        return value

    # -- expressions --

    def eval_expr(self, expr: Expr, active: str) -> int:
        """Evaluate over the global and the active method's local."""
        match expr:
            case IntLit(value):
                return value
            case Var(name):
                if name == self.program.global_name:
                    return self.store.global_value
                if active in self.methods and name == self.methods[active].local:
                    return self.store.locals[active]
                raise ValueError(f"variable {name!r} is not in scope of {active!r}")
            case Unary(op, operand):
                v = self.eval_expr(operand, active)
                if op == "-":
                    return self._check64(-v, expr)
                return 0 if v != 0 else 1
            case Binary(op, left, right):
                a = self.eval_expr(left, active)
                b = self.eval_expr(right, active)
                return self._apply_binary(op, a, b, expr)
        raise TypeError(f"not an expression: {expr!r}")

    def _apply_binary(self, op: str, a: int, b: int, at: Expr) -> int:
        if op == "+":
            return self._check64(a + b, at)
        if op == "-":
            return self._check64(a - b, at)
        if op == "*":
            return self._check64(a * b, at)
        if op in ("/", "%"):
            if b == 0:
                raise ExecFailure(DIVISION_BY_ZERO, at.line, at.col)
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            if op == "/":
                return self._check64(q, at)
            return self._check64(a - q * b, at)
        if op == "==":
            return 1 if a == b else 0
        if op == "!=":
            return 1 if a != b else 0
        if op == "<":
            return 1 if a < b else 0
        if op == "<=":
            return 1 if a <= b else 0
        if op == ">":
            return 1 if a > b else 0
        if op == ">=":
            return 1 if a >= b else 0
        if op == "and":
            return 1 if a != 0 and b != 0 else 0
        if op == "or":
            return 1 if a != 0 or b != 0 else 0
        raise ValueError(f"unknown operator {op!r}")

    # -- statements --

    def exec_stmt(self, stmt: Stmt) -> bool:
        """Execute one statement under the current active frame.

        Returns True when control falls through to the next statement,
        False when a return() unwound the active frame.
        """
        self._tick(stmt.line, stmt.col)
        active = self.stack[-1]
        match stmt:
            case Seq(stmts):
                for sub in stmts:
                    if not self.exec_stmt(sub):
                        return False
                return True
            case AssignGlobal(_, expr):
                v = self.eval_expr(expr, active)
                self.store.global_value = v
                self._emit("assign-global", method=active, value=v)
                return True
            case AssignLocal(_, expr):
                self.store.locals[active] = self.eval_expr(expr, active)
                return True
            case Provided(expr):
                if self.eval_expr(expr, active) == 0:
                    raise ExecFailure(PROVIDED_FAILED, stmt.line, stmt.col)
                return True
            case If(cond, then, orelse):
                taken = then if self.eval_expr(cond, active) != 0 else orelse
                return self.exec_stmt(taken)
            case While(cond, body):
                while self.eval_expr(cond, active) != 0:
                    if not self.exec_stmt(body):
                        return False
                    self._tick(stmt.line, stmt.col)
                return True
            case Run(method, arg):
                v = self.eval_expr(arg, active)
                if method not in self.methods:
                    raise ValueError(f"method {method!r} is not declared")
                self.store.locals[method] = v
                self._emit("run-call", method=method, value=v)
                self.stack.append(method)
                if self.exec_stmt(self.methods[method].body):
                    # Implicit return: body fell off the end.
                    self.stack.pop()
                    self._emit("return", method=method)
                return True
            case Return():
                popped = self.stack.pop()
                self._emit("return", method=popped)
                return False
            case Synch(method, arg, priority):
                if method not in self.methods:
                    raise ValueError(f"method {method!r} is not declared")
                v = self.eval_expr(arg, active)
                self._post_seq += 1
                node = AsynchNode(method, arg, v, priority, self._post_seq)
                self.postlist = self.postlist.add(node)
                self._emit("post", method=method, value=v, priority=priority)
                return True
        raise TypeError(f"not a statement: {stmt!r}")

    # -- methods, dispatch, whole programs --

    def run_top_level_method(self, method: Method):
        """One startup activation: push, run the body, pop."""
        self._tick(method.line, method.col)
        self._emit("method-start", method=method.name)
        self.stack.append(method.name)
        if self.exec_stmt(method.body):
            # Implicit return: every activation closes with one return event.
            self.stack.pop()
            self._emit("return", method=method.name)
        self._emit("method-end", method=method.name)

    def dispatch_loop(self):
        """Drain the post queue: highest priority first, FIFO within."""
        while not self.postlist.is_empty():
            node, self.postlist = self.postlist.remove_first()
            self._tick(node.arg_expr.line, node.arg_expr.col)
            self.store.locals[node.method] = node.arg_value
            self._emit("dispatch", method=node.method, value=node.arg_value,
                       priority=node.priority)
            self.stack.append(node.method)
            if self.exec_stmt(self.methods[node.method].body):
                self.stack.pop()
                self._emit("return", method=node.method)

    def run(self) -> Outcome:
        """Startup phase, then drain; the program must be scope-valid."""
        try:
            for method in self.program.methods:
                self.run_top_level_method(method)
            self.dispatch_loop()
        except ExecFailure as failure:
            active = self.stack[-1] if self.stack else None
            kind = "provided-fail" if failure.kind == PROVIDED_FAILED else "error"
            self._emit(kind, method=active)
            return Failed(failure.kind, failure.line, failure.col, self.trace)
        return Finished(self.store.global_value, self.trace)


def run_program(program: Program, budget: int = DEFAULT_BUDGET,
                postlist=None) -> Outcome:
    """Run a scope-valid program to its terminal state.

    ``postlist`` selects the queue implementation (default
    ``AsynchList``; pass ``OracleQueue.empty()`` to cross-check the
    scheduler).
    """
    return Interpreter(program, budget=budget, postlist=postlist).run()


def trace_to_jsonl(outcome: Outcome) -> str:
    """Serialize a trace as JSON lines; byte-stable for equal outcomes.

    Each event is one object with fields drawn from {seq, kind, method,
    value, priority}, absent fields omitted.  A finished run ends with
    ``{"kind": "finished", "global": <final value>}``.
    """
    lines = [json.dumps(ev.to_json_obj()) for ev in outcome.trace]
    if isinstance(outcome, Finished):
        lines.append(json.dumps({"kind": "finished", "global": outcome.global_value}))
    return "".join(line + "\n" for line in lines)
