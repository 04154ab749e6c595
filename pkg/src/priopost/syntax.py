"""Abstract syntax, parser, pretty-printer, and scope checker.

A program declares one global variable and one or more methods; each
method has exactly one local variable.  Source files use the ``.ap``
extension and look like::

    global g;

    meth main(x) {
        g := g + 1;
        synch(worker(g * 2), high);
    }

    meth worker(n) {
        if n { g := n; } else { }
    }

Grammar (LL(1); ``//`` starts a line comment)::

    program  := "global" IDENT ";" method+
    method   := "meth" IDENT "(" IDENT ")" block
    block    := "{" stmt* "}"
    stmt     := IDENT ":=" expr ";"
              | "provided" expr ";"
              | "if" expr block "else" block
              | "while" expr block
              | "run" IDENT "(" expr ")" ";"
              | "return" "(" ")" ";"
              | "synch" "(" IDENT "(" expr ")" "," prio ")" ";"
    prio     := "high" | "medium" | "low"

Expressions use the usual precedence ladder, loosest first: ``or``,
``and``, ``== !=``, ``< <= > >=``, ``+ -``, ``* / %``, unary ``- !``,
then atoms (integer literals, the two in-scope variables, and
parenthesised expressions).  All values are signed 64-bit integers;
comparisons and logical operators yield 1 or 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

I64_MIN = -(2**63)
I64_MAX = 2**63 - 1

KEYWORDS = frozenset({
    "global", "meth", "provided", "if", "else", "while",
    "run", "return", "synch", "high", "medium", "low", "and", "or",
})

_TWO_CHAR_OPS = (":=", "==", "!=", "<=", ">=")
_ONE_CHAR_OPS = frozenset("+-*/%<>!(){};,")


class Priority(enum.Enum):
    """Dispatch priority of a posted call; lower rank runs first."""

    HIGH = 1
    MEDIUM = 2
    LOW = 3

    @property
    def rank(self) -> int:
        return self.value

    @property
    def keyword(self) -> str:
        return self.name.lower()

    @classmethod
    def from_keyword(cls, word: str) -> "Priority":
        return cls[word.upper()]


class ParseError(Exception):
    """Syntax error with source position and the tokens that were expected."""

    def __init__(self, message: str, line: int, col: int, expected=()):
        super().__init__(f"{line}:{col} {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)


# --- AST ---------------------------------------------------------------
#
# Every node carries its source position; positions are excluded from
# equality so that parse(pretty_print(ast)) == ast holds structurally.

@dataclass
class Node:
    line: int = field(default=0, compare=False, repr=False, kw_only=True)
    col: int = field(default=0, compare=False, repr=False, kw_only=True)


@dataclass
class Expr(Node):
    pass


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class Var(Expr):
    name: str


@dataclass
class Unary(Expr):
    op: str  # "-" or "!"
    operand: Expr


@dataclass
class Binary(Expr):
    op: str  # one of + - * / % == != < <= > >= and or
    left: Expr
    right: Expr


@dataclass
class Stmt(Node):
    pass


@dataclass
class Seq(Stmt):
    """A brace-delimited statement list; empty means no-op."""

    stmts: list[Stmt]


@dataclass
class AssignGlobal(Stmt):
    name: str
    expr: Expr


@dataclass
class AssignLocal(Stmt):
    name: str
    expr: Expr


@dataclass
class Provided(Stmt):
    """Continues only when the expression is non-zero; aborts otherwise."""

    expr: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    orelse: Stmt


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass
class Run(Stmt):
    """Immediate (synchronous) call of another method."""

    method: str
    arg: Expr


@dataclass
class Return(Stmt):
    pass


@dataclass
class Synch(Stmt):
    """Posts a call for later dispatch at the given priority."""

    method: str
    arg: Expr
    priority: Priority


@dataclass
class Method(Node):
    name: str
    local: str
    body: Seq


@dataclass
class Program(Node):
    global_name: str
    methods: list[Method]

    def method(self, name: str) -> Method:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)


# --- Lexer -------------------------------------------------------------

@dataclass
class Token:
    kind: str  # "ident", "int", "keyword", "punct", "eof"
    text: str
    line: int
    col: int


def _is_ident_start(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z" or c == "_"


def _is_ident_char(c: str) -> bool:
    return _is_ident_start(c) or "0" <= c <= "9"


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; raises ParseError on a bad character.

    Identifiers and digits are ASCII only, per the grammar.
    """
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if _is_ident_start(c):
            start = i
            while i < n and _is_ident_char(source[i]):
                i += 1
            text = source[start:i]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col))
            col += i - start
            continue
        if "0" <= c <= "9":
            start = i
            while i < n and "0" <= source[i] <= "9":
                i += 1
            text = source[start:i]
            if int(text) > I64_MAX:
                raise ParseError("integer literal out of range", line, col)
            tokens.append(Token("int", text, line, col))
            col += i - start
            continue
        two = source[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token("punct", two, line, col))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR_OPS:
            tokens.append(Token("punct", c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


# --- Parser ------------------------------------------------------------

_REL_OPS = ("<", "<=", ">", ">=")
_EQ_OPS = ("==", "!=")
_ADD_OPS = ("+", "-")
_MUL_OPS = ("*", "/", "%")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.global_name = ""

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def _error(self, message, expected=()):
        tok = self._peek()
        raise ParseError(message, tok.line, tok.col, expected)

    def _expect(self, text: str) -> Token:
        tok = self._peek()
        if tok.text != text or tok.kind == "eof":
            found = tok.text if tok.kind != "eof" else "end of file"
            self._error(f"expected '{text}', found '{found}'", expected=(text,))
        return self._advance()

    def _expect_ident(self, what="identifier") -> Token:
        tok = self._peek()
        if tok.kind != "ident":
            self._error(f"expected {what}", expected=("identifier",))
        return self._advance()

    def parse_program(self) -> Program:
        start = self._expect("global")
        self.global_name = self._expect_ident("global variable name").text
        self._expect(";")
        methods = [self._method()]
        while self._peek().text == "meth":
            methods.append(self._method())
        if self._peek().kind != "eof":
            self._error("expected 'meth'", expected=("meth",))
        return Program(self.global_name, methods, line=start.line, col=start.col)

    def _method(self) -> Method:
        start = self._peek()
        if start.text != "meth":
            self._error("expected 'meth'", expected=("meth",))
        self._advance()
        name = self._expect_ident("method name").text
        self._expect("(")
        local = self._expect_ident("local variable name").text
        self._expect(")")
        body = self._block()
        return Method(name, local, body, line=start.line, col=start.col)

    def _block(self) -> Seq:
        start = self._expect("{")
        stmts = []
        while self._peek().text != "}":
            if self._peek().kind == "eof":
                self._error("expected '}'", expected=("}",))
            stmts.append(self._stmt())
        self._expect("}")
        return Seq(stmts, line=start.line, col=start.col)

    def _stmt(self) -> Stmt:
        tok = self._peek()
        if tok.kind == "ident":
            name = self._advance()
            self._expect(":=")
            e = self._expr()
            self._expect(";")
            cls = AssignGlobal if name.text == self.global_name else AssignLocal
            return cls(name.text, e, line=name.line, col=name.col)
        if tok.text == "provided":
            self._advance()
            e = self._expr()
            self._expect(";")
            return Provided(e, line=tok.line, col=tok.col)
        if tok.text == "if":
            self._advance()
            cond = self._expr()
            then = self._block()
            self._expect("else")
            orelse = self._block()
            return If(cond, then, orelse, line=tok.line, col=tok.col)
        if tok.text == "while":
            self._advance()
            cond = self._expr()
            body = self._block()
            return While(cond, body, line=tok.line, col=tok.col)
        if tok.text == "run":
            self._advance()
            method = self._expect_ident("method name").text
            self._expect("(")
            arg = self._expr()
            self._expect(")")
            self._expect(";")
            return Run(method, arg, line=tok.line, col=tok.col)
        if tok.text == "return":
            self._advance()
            self._expect("(")
            self._expect(")")
            self._expect(";")
            return Return(line=tok.line, col=tok.col)
        if tok.text == "synch":
            self._advance()
            self._expect("(")
            method = self._expect_ident("method name").text
            self._expect("(")
            arg = self._expr()
            self._expect(")")
            self._expect(",")
            prio_tok = self._peek()
            if prio_tok.text not in ("high", "medium", "low"):
                self._error("expected priority", expected=("high", "medium", "low"))
            self._advance()
            self._expect(")")
            self._expect(";")
            return Synch(method, arg, Priority.from_keyword(prio_tok.text),
                         line=tok.line, col=tok.col)
        self._error(
            "expected statement",
            expected=("identifier", "provided", "if", "while", "run", "return", "synch", "}"),
        )

    def _expr(self) -> Expr:
        return self._or()

    def _binary_left(self, ops, sub) -> Expr:
        left = sub()
        while self._peek().text in ops and self._peek().kind != "eof":
            op = self._advance()
            right = sub()
            left = Binary(op.text, left, right, line=op.line, col=op.col)
        return left

    def _or(self) -> Expr:
        return self._binary_left(("or",), self._and)

    def _and(self) -> Expr:
        return self._binary_left(("and",), self._equality)

    def _equality(self) -> Expr:
        return self._binary_left(_EQ_OPS, self._relational)

    def _relational(self) -> Expr:
        return self._binary_left(_REL_OPS, self._additive)

    def _additive(self) -> Expr:
        return self._binary_left(_ADD_OPS, self._multiplicative)

    def _multiplicative(self) -> Expr:
        return self._binary_left(_MUL_OPS, self._unary)

    def _unary(self) -> Expr:
        tok = self._peek()
        if tok.text in ("-", "!"):
            self._advance()
            return Unary(tok.text, self._unary(), line=tok.line, col=tok.col)
        return self._atom()

    def _atom(self) -> Expr:
        tok = self._peek()
        if tok.kind == "int":
            self._advance()
            return IntLit(int(tok.text), line=tok.line, col=tok.col)
        if tok.kind == "ident":
            self._advance()
            return Var(tok.text, line=tok.line, col=tok.col)
        if tok.text == "(":
            self._advance()
            e = self._expr()
            self._expect(")")
            return e
        self._error("expected expression", expected=("integer", "identifier", "("))


def parse_program(source: str) -> Program:
    """Parse program text; raises ParseError (and nothing else) on bad input."""
    return _Parser(tokenize(source)).parse_program()


# --- Scope validation ----------------------------------------------------

@dataclass
class ScopeError:
    kind: str  # unknown-variable | unknown-method | global-local-clash | duplicate-method
    name: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col} {self.kind}: {self.name}"


def validate_scopes(program: Program) -> list[ScopeError]:
    """Check every name in the program; returns all violations, not just the first.

    A variable must be the program global or the enclosing method's
    local; run/synch targets must be declared methods; a local may not
    shadow the global; method names must be unique.
    """
    errors: list[ScopeError] = []
    method_names = set()
    for m in program.methods:
        if m.name in method_names:
            errors.append(ScopeError("duplicate-method", m.name, m.line, m.col))
        method_names.add(m.name)
        if m.local == program.global_name:
            errors.append(ScopeError("global-local-clash", m.local, m.line, m.col))

    def check_expr(e: Expr, local: str):
        match e:
            case Var(name):
                if name not in (program.global_name, local):
                    errors.append(ScopeError("unknown-variable", name, e.line, e.col))
            case Unary(_, operand):
                check_expr(operand, local)
            case Binary(_, left, right):
                check_expr(left, local)
                check_expr(right, local)
            case _:
                pass

    def check_stmt(s: Stmt, local: str):
        match s:
            case Seq(stmts):
                for sub in stmts:
                    check_stmt(sub, local)
            case AssignGlobal(name, expr):
                if name != program.global_name:
                    errors.append(ScopeError("unknown-variable", name, s.line, s.col))
                check_expr(expr, local)
            case AssignLocal(name, expr):
                if name != local:
                    errors.append(ScopeError("unknown-variable", name, s.line, s.col))
                check_expr(expr, local)
            case Provided(expr):
                check_expr(expr, local)
            case If(cond, then, orelse):
                check_expr(cond, local)
                check_stmt(then, local)
                check_stmt(orelse, local)
            case While(cond, body):
                check_expr(cond, local)
                check_stmt(body, local)
            case Run(method, arg) | Synch(method, arg, _):
                if method not in method_names:
                    errors.append(ScopeError("unknown-method", method, s.line, s.col))
                check_expr(arg, local)
            case _:
                pass

    for m in program.methods:
        check_stmt(m.body, m.local)
    return errors


# --- Pretty printer ------------------------------------------------------

_PREC = {
    "or": 1, "and": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def format_expr(e: Expr, parent_prec: int = 0) -> str:
    """Render an expression with the minimum parentheses that reparse equal."""
    match e:
        case IntLit(value):
            return str(value)
        case Var(name):
            return name
        case Unary(op, operand):
            text = op + format_expr(operand, _UNARY_PREC)
            return f"({text})" if _UNARY_PREC < parent_prec else text
        case Binary(op, left, right):
            prec = _PREC[op]
            sep = f" {op} "
            text = format_expr(left, prec) + sep + format_expr(right, prec + 1)
            return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression: {e!r}")


def _format_block(s: Stmt, indent: int, out: list[str]):
    pad = "    " * indent
    out.append("{")
    stmts = s.stmts if isinstance(s, Seq) else [s]
    for sub in stmts:
        out.append("\n" + pad + "    ")
        _format_stmt(sub, indent + 1, out)
    if stmts:
        out.append("\n" + pad)
    out.append("}")


def _format_stmt(s: Stmt, indent: int, out: list[str]):
    match s:
        case Seq(_):
            _format_block(s, indent, out)
        case AssignGlobal(name, expr) | AssignLocal(name, expr):
            out.append(f"{name} := {format_expr(expr)};")
        case Provided(expr):
            out.append(f"provided {format_expr(expr)};")
        case If(cond, then, orelse):
            out.append(f"if {format_expr(cond)} ")
            _format_block(then, indent, out)
            out.append(" else ")
            _format_block(orelse, indent, out)
        case While(cond, body):
            out.append(f"while {format_expr(cond)} ")
            _format_block(body, indent, out)
        case Run(method, arg):
            out.append(f"run {method}({format_expr(arg)});")
        case Return():
            out.append("return();")
        case Synch(method, arg, priority):
            out.append(f"synch({method}({format_expr(arg)}), {priority.keyword});")
        case _:
            raise TypeError(f"not a statement: {s!r}")


def pretty_print(program: Program) -> str:
    """Emit canonical source text; reparsing it yields an equal AST."""
    out = [f"global {program.global_name};\n"]
    for m in program.methods:
        out.append(f"\nmeth {m.name}({m.local}) ")
        _format_block(m.body, 0, out)
        out.append("\n")
    return "".join(out)


# --- JSON form (used by the CLI's --emit-ast) ----------------------------

def ast_to_dict(node) -> dict:
    """Position-free dict rendering of an AST, stable for serialization."""
    match node:
        case Program(global_name, methods):
            return {"kind": "program", "global": global_name,
                    "methods": [ast_to_dict(m) for m in methods]}
        case Method(name, local, body):
            return {"kind": "method", "name": name, "local": local,
                    "body": ast_to_dict(body)}
        case Seq(stmts):
            return {"kind": "seq", "stmts": [ast_to_dict(s) for s in stmts]}
        case AssignGlobal(name, expr):
            return {"kind": "assign-global", "name": name, "expr": ast_to_dict(expr)}
        case AssignLocal(name, expr):
            return {"kind": "assign-local", "name": name, "expr": ast_to_dict(expr)}
        case Provided(expr):
            return {"kind": "provided", "expr": ast_to_dict(expr)}
        case If(cond, then, orelse):
            return {"kind": "if", "cond": ast_to_dict(cond),
                    "then": ast_to_dict(then), "else": ast_to_dict(orelse)}
        case While(cond, body):
            return {"kind": "while", "cond": ast_to_dict(cond), "body": ast_to_dict(body)}
        case Run(method, arg):
            return {"kind": "run", "method": method, "arg": ast_to_dict(arg)}
        case Return():
            return {"kind": "return"}
        case Synch(method, arg, priority):
            return {"kind": "synch", "method": method, "arg": ast_to_dict(arg),
                    "priority": priority.keyword}
        case IntLit(value):
            return {"kind": "int", "value": value}
        case Var(name):
            return {"kind": "var", "name": name}
        case Unary(op, operand):
            return {"kind": "unary", "op": op, "operand": ast_to_dict(operand)}
        case Binary(op, left, right):
            return {"kind": "binary", "op": op,
                    "left": ast_to_dict(left), "right": ast_to_dict(right)}
    raise TypeError(f"not an AST node: {node!r}")
