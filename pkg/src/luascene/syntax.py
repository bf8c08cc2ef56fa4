"""Tokens, source spans, and AST node types for the Lua-subset frontend."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SourceSpan:
    """Region of source text. line/column are 1-based; offsets are in bytes."""

    line: int
    column: int
    byte_offset: int
    length: int

    def end_offset(self) -> int:
        return self.byte_offset + self.length

    def to(self, other: "SourceSpan") -> "SourceSpan":
        """Span from the start of self to the end of other."""
        return SourceSpan(
            line=self.line,
            column=self.column,
            byte_offset=self.byte_offset,
            length=other.end_offset() - self.byte_offset,
        )

    def contains(self, inner: "SourceSpan") -> bool:
        return (
            self.byte_offset <= inner.byte_offset
            and inner.end_offset() <= self.end_offset()
        )


KEYWORDS = frozenset(
    {
        "local", "while", "do", "end", "if", "then", "elseif", "else", "for",
        "repeat", "until", "function", "return", "break", "nil", "true",
        "false", "or", "and", "not",
    }
)

# Multi-character symbols must be matched before their prefixes.
SYMBOLS = (
    "==", "~=", ">=", "<=", ">>", "<<", "..",
    ">", "<", "|", "~", "&", "-", "+", "%", "/", "*", "^", "#",
    "=", "(", ")", "[", "]", "{", "}", ",", ";", ".", ":",
)


@dataclass(frozen=True, slots=True)
class Token:
    """kind is 'name' | 'number' | 'string' | 'eof' | a keyword | a symbol."""

    kind: str
    lexeme: str
    span: SourceSpan


class ParseError(Exception):
    """First lexical or syntactic error found in a source text."""

    def __init__(self, message: str, span: SourceSpan, expected: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected or []

    def __str__(self) -> str:
        return f"line {self.span.line}: {self.message}"


# --- AST -------------------------------------------------------------------
#
# Statements and expressions are separate unions; every node carries the span
# of the source region it was parsed from.


@dataclass(frozen=True, slots=True)
class Literal:
    value: None | bool | float | str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Index:
    base: "Expr"
    key: "Expr"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Field:
    base: "Expr"
    name: str
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Call:
    callee: "Expr"
    args: tuple["Expr", ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class UnOp:
    op: str
    operand: "Expr"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class TableField:
    """One table-constructor entry: positional (key None), named (key str),
    or computed (key Expr)."""

    key: "Expr | str | None"
    value: "Expr"


@dataclass(frozen=True, slots=True)
class TableCtor:
    fields: tuple[TableField, ...]
    span: SourceSpan


Expr = Literal | Var | Index | Field | Call | BinOp | UnOp | TableCtor


@dataclass(frozen=True, slots=True)
class LocalDecl:
    names: tuple[str, ...]
    exprs: tuple[Expr, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Assign:
    targets: tuple[Expr, ...]  # Var | Index | Field only
    exprs: tuple[Expr, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class While:
    cond: Expr
    body: "Chunk"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class If:
    arms: tuple[tuple[Expr, "Chunk"], ...]  # (condition, body), first is 'if'
    else_body: "Chunk | None"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class NumericFor:
    name: str
    start: Expr
    stop: Expr
    step: Expr  # synthesized Literal 1.0 when absent in source
    body: "Chunk"
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Repeat:
    body: "Chunk"
    cond: Expr
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class FunctionDecl:
    name: str
    params: tuple[str, ...]
    body: "Chunk"
    is_local: bool
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Return:
    exprs: tuple[Expr, ...]
    span: SourceSpan


@dataclass(frozen=True, slots=True)
class Break:
    span: SourceSpan


Stat = LocalDecl | Assign | Call | While | If | NumericFor | Repeat | FunctionDecl | Break


@dataclass(frozen=True, slots=True)
class Chunk:
    stats: tuple[Stat, ...]
    last_stat: Return | None
    span: SourceSpan


def iter_child_nodes(node):
    """Yield the direct AST children of a node (used by structural walks)."""
    match node:
        case Chunk(stats, last_stat, _):
            yield from stats
            if last_stat is not None:
                yield last_stat
        case LocalDecl(_, exprs, _):
            yield from exprs
        case Assign(targets, exprs, _):
            yield from targets
            yield from exprs
        case Call(callee, args, _):
            yield callee
            yield from args
        case While(cond, body, _):
            yield cond
            yield body
        case If(arms, else_body, _):
            for cond, body in arms:
                yield cond
                yield body
            if else_body is not None:
                yield else_body
        case NumericFor(_, start, stop, step, body, _):
            yield start
            yield stop
            yield step
            yield body
        case Repeat(body, cond, _):
            yield body
            yield cond
        case FunctionDecl(_, _, body, _, _):
            yield body
        case Return(exprs, _):
            yield from exprs
        case BinOp(_, lhs, rhs, _):
            yield lhs
            yield rhs
        case UnOp(_, operand, _):
            yield operand
        case Index(base, key, _):
            yield base
            yield key
        case Field(base, _, _):
            yield base
        case TableCtor(fields, _):
            for f in fields:
                if isinstance(f.key, (Literal, Var, Index, Field, Call, BinOp, UnOp, TableCtor)):
                    yield f.key
                yield f.value
        case _:
            return


def walk(node):
    """Depth-first pre-order walk over all nodes reachable from node."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(iter_child_nodes(current))
