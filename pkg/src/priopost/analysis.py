"""Dead-post detection: flag posts whose target can never matter.

A method is *effect-free* when running it, and everything it
transitively runs or posts, can neither change the global value nor
change whether and how the run terminates.  Posting such a method is
dead: deleting the post leaves the final global value and the sequence
of global assignments untouched (only post/dispatch trace events
differ).

The criterion is syntactic and conservative.  A method is disqualified
outright if its body contains:

* a global assignment (visible effect),
* ``provided`` (can abort the run),
* ``while`` (could diverge, turning a finishing run into a
  budget-exhausted one),
* division or modulo (could fault with division-by-zero).

A fixpoint then removes any method that runs or posts a disqualified
method, and finally any method that can reach a run/post cycle among
the survivors (an effect-free posting cycle would repost forever and
exhaust the step budget, so deleting it would change the outcome).

A flagged post must also have a fault-free argument expression, since
deleting the post deletes the argument evaluation too; arguments
containing division or modulo are left alone.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .syntax import (
    AssignGlobal,
    AssignLocal,
    Binary,
    Expr,
    If,
    Method,
    Priority,
    Program,
    Provided,
    Run,
    Seq,
    Stmt,
    Synch,
    Unary,
    While,
)


@dataclass(frozen=True)
class PostEdge:
    """One syntactic run or synch statement, poster to target."""

    src: str
    dst: str
    kind: str  # "run" | "post"
    priority: Priority | None
    line: int
    col: int

    def to_json_obj(self) -> dict:
        obj: dict = {"from": self.src, "to": self.dst, "kind": self.kind}
        if self.priority is not None:
            obj["priority"] = self.priority.keyword
        obj["line"] = self.line
        obj["col"] = self.col
        return obj


@dataclass
class PostGraph:
    vertices: list[str]
    edges: list[PostEdge]


@dataclass(frozen=True)
class DeadPost:
    """Location of a flagged synch statement; ``method`` is the target."""

    method: str
    line: int
    col: int

    def to_json_obj(self) -> dict:
        return {"method": self.method, "line": self.line, "col": self.col}


@dataclass
class AnalysisReport:
    effect_free: set[str]
    dead_posts: list[DeadPost]
    graph: PostGraph

    def to_json_obj(self) -> dict:
        return {
            "effect_free": sorted(self.effect_free),
            "dead_posts": [d.to_json_obj() for d in self.dead_posts],
            "edges": [e.to_json_obj() for e in self.graph.edges],
        }


def _walk_stmts(stmt: Stmt):
    yield stmt
    match stmt:
        case Seq(stmts):
            for sub in stmts:
                yield from _walk_stmts(sub)
        case If(_, then, orelse):
            yield from _walk_stmts(then)
            yield from _walk_stmts(orelse)
        case While(_, body):
            yield from _walk_stmts(body)
        case _:
            pass


def _exprs_of(stmt: Stmt):
    match stmt:
        case AssignGlobal(_, expr) | AssignLocal(_, expr) | Provided(expr):
            yield expr
        case If(cond, _, _) | While(cond, _):
            yield cond
        case Run(_, arg) | Synch(_, arg, _):
            yield arg
        case _:
            pass


def _expr_can_fault(expr: Expr) -> bool:
    """True when evaluating the expression could raise (division/modulo)."""
    match expr:
        case Binary(op, left, right):
            return op in ("/", "%") or _expr_can_fault(left) or _expr_can_fault(right)
        case Unary(_, operand):
            return _expr_can_fault(operand)
        case _:
            return False


def _calls_in(method: Method):
    for s in _walk_stmts(method.body):
        match s:
            case Run(target, _):
                yield "run", target, None, s.line, s.col
            case Synch(target, _, priority):
                yield "post", target, priority, s.line, s.col
            case _:
                pass


def build_post_graph(program: Program) -> PostGraph:
    """Enumerate every syntactic run/synch edge, reachable or not."""
    edges = []
    for m in program.methods:
        for kind, target, priority, line, col in _calls_in(m):
            edges.append(PostEdge(m.name, target, kind, priority, line, col))
    return PostGraph([m.name for m in program.methods], edges)


def _is_quiet(method: Method) -> bool:
    for s in _walk_stmts(method.body):
        if isinstance(s, (AssignGlobal, Provided, While)):
            return False
        for e in _exprs_of(s):
            if _expr_can_fault(e):
                return False
    return True


def find_effect_free(program: Program) -> set[str]:
    """The largest set of methods whose execution is unobservable.

    Computed as a fixpoint over the run/post graph (at most one round
    per method), then shrunk by removing anything that can reach a
    run/post cycle among the survivors.
    """
    targets = {m.name: [t for _, t, _, _, _ in _calls_in(m)] for m in program.methods}
    free = {m.name for m in program.methods if _is_quiet(m)}
    changed = True
    while changed:
        changed = False
        for name in list(free):
            if any(t not in free for t in targets[name]):
                free.discard(name)
                changed = True

    # A cycle of effect-free posts would repost forever; prune every
    # method that can reach one.
    SAFE, UNSAFE, VISITING = "safe", "unsafe", "visiting"
    state: dict[str, str] = {}

    def visit(name: str) -> str:
        got = state.get(name)
        if got == VISITING:
            return UNSAFE
        if got is not None:
            return got
        state[name] = VISITING
        verdict = SAFE
        for t in targets[name]:
            if visit(t) == UNSAFE:
                verdict = UNSAFE
        state[name] = verdict
        return verdict

    return {name for name in free if visit(name) == SAFE}


def dead_posts(program: Program) -> AnalysisReport:
    """Flag every synch of an effect-free method with a fault-free argument."""
    free = find_effect_free(program)
    graph = build_post_graph(program)
    flagged = []
    for m in program.methods:
        for s in _walk_stmts(m.body):
            if isinstance(s, Synch) and s.method in free and not _expr_can_fault(s.arg):
                flagged.append(DeadPost(s.method, s.line, s.col))
    return AnalysisReport(free, flagged, graph)


def strip_dead_posts(program: Program, report: AnalysisReport) -> Program:
    """Rebuild the program without the flagged posts (test-harness helper).

    Statements are matched by the flagging criterion itself (target in
    ``report.effect_free``, fault-free argument), not by source
    position, so the strip also works on synthesized trees that carry
    no positions.
    """
    def dead(stmt: Stmt) -> bool:
        return (isinstance(stmt, Synch) and stmt.method in report.effect_free
                and not _expr_can_fault(stmt.arg))

    def rebuild(stmt: Stmt) -> Stmt:
        match stmt:
            case Seq(stmts):
                kept = [rebuild(s) for s in stmts if not dead(s)]
                return replace(stmt, stmts=kept)
            case If(_, then, orelse):
                return replace(stmt, then=rebuild(then), orelse=rebuild(orelse))
            case While(_, body):
                return replace(stmt, body=rebuild(body))
            case _:
                return stmt

    methods = [replace(m, body=rebuild(m.body)) for m in program.methods]
    return replace(program, methods=methods)
