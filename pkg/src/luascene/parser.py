"""Recursive-descent parser for the Lua subset.

Statement forms: local declaration (incl. 'local function'), assignment,
function call, while, if/elseif/else, numeric for, repeat/until, function
declaration, break, and return as the final statement of a chunk. Operator
precedence and associativity follow the Lua reference: '^' and '..' are
right-associative, everything else left-associative.
"""

from __future__ import annotations

from .lexer import decode_number, decode_string, tokenize
from .syntax import (
    Assign,
    BinOp,
    Break,
    Call,
    Chunk,
    Expr,
    Field,
    FunctionDecl,
    If,
    Index,
    Literal,
    LocalDecl,
    NumericFor,
    ParseError,
    Repeat,
    Return,
    SourceSpan,
    Stat,
    TableCtor,
    TableField,
    Token,
    UnOp,
    Var,
    While,
)

# Binary operator precedence, Lua reference numbering. Higher binds tighter.
_BIN_PREC = {
    "or": 1,
    "and": 2,
    "<": 3, ">": 3, "<=": 3, ">=": 3, "~=": 3, "==": 3,
    "|": 4,
    "~": 5,
    "&": 6,
    "<<": 7, ">>": 7,
    "..": 9,
    "+": 10, "-": 10,
    "*": 11, "/": 11, "%": 11,
    "^": 14,
}
_RIGHT_ASSOC = {"..", "^"}
_UNARY_PREC = 12
_UNARY_OPS = ("not", "-", "#", "~")

# Tokens that may start an expression; used for error messages.
_EXPR_STARTS = ("nil", "true", "false", "number", "string", "name", "(", "{", "not", "-", "#", "~")

_CHUNK_ENDS = ("eof", "end", "else", "elseif", "until")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def check(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, kind: str) -> Token | None:
        if self.check(kind):
            return self.advance()
        return None

    def expect(self, kind: str, context: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.unexpected(f"'{kind}' expected {context}", [kind])
        return self.advance()

    def expect_name(self, context: str) -> Token:
        tok = self.peek()
        if tok.kind != "name":
            if tok.kind in ("eof",):
                raise self.unexpected(f"name expected {context}", ["name"])
            raise self.unexpected(f"name expected {context}", ["name"])
        return self.advance()

    def unexpected(self, message: str, expected: list[str]) -> ParseError:
        tok = self.peek()
        shown = "<eof>" if tok.kind == "eof" else tok.lexeme
        return ParseError(f"{message} near '{shown}'", tok.span, expected)

    # -- chunks and statements -----------------------------------------------

    def parse_chunk(self, *, top_level: bool) -> Chunk:
        start = self.peek().span
        stats: list[Stat] = []
        last_stat: Return | None = None
        while self.peek().kind not in _CHUNK_ENDS:
            if self.check("return"):
                last_stat = self.parse_return()
                self.accept(";")
                break
            stats.append(self.parse_statement())
            self.accept(";")
        end_tok = self.peek()
        if top_level and end_tok.kind != "eof":
            raise self.unexpected("'<eof>' expected", ["eof"])
        if last_stat is not None:
            span = start.to(last_stat.span)
        elif stats:
            span = start.to(stats[-1].span)
        else:
            span = SourceSpan(start.line, start.column, start.byte_offset, 0)
        return Chunk(tuple(stats), last_stat, span)

    def parse_statement(self) -> Stat:
        kind = self.peek().kind
        if kind == "local":
            return self.parse_local()
        if kind == "while":
            return self.parse_while()
        if kind == "if":
            return self.parse_if()
        if kind == "for":
            return self.parse_for()
        if kind == "repeat":
            return self.parse_repeat()
        if kind == "function":
            return self.parse_function(is_local=False, start=self.advance().span)
        if kind == "break":
            return Break(self.advance().span)
        if kind == "name":
            return self.parse_expr_statement()
        raise self.unexpected("statement expected", ["statement"])

    def parse_local(self) -> Stat:
        start = self.advance().span
        if self.check("function"):
            self.advance()
            return self.parse_function(is_local=True, start=start)
        names = [self.expect_name("after 'local'")]
        while self.accept(","):
            names.append(self.expect_name("in name list"))
        exprs: tuple[Expr, ...] = ()
        end_span = names[-1].span
        if self.accept("="):
            exprs = tuple(self.parse_expr_list())
            end_span = exprs[-1].span
        return LocalDecl(tuple(t.lexeme for t in names), exprs, start.to(end_span))

    def parse_function(self, *, is_local: bool, start: SourceSpan) -> FunctionDecl:
        name = self.expect_name("after 'function'")
        self.expect("(", "to open parameter list")
        params: list[Token] = []
        if not self.check(")"):
            params.append(self.expect_name("in parameter list"))
            while self.accept(","):
                params.append(self.expect_name("in parameter list"))
        self.expect(")", "to close parameter list")
        body = self.parse_chunk(top_level=False)
        end = self.expect("end", "to close function body")
        return FunctionDecl(
            name.lexeme, tuple(t.lexeme for t in params), body, is_local, start.to(end.span)
        )

    def parse_while(self) -> While:
        start = self.advance().span
        cond = self.parse_expr()
        self.expect("do", "after while condition")
        body = self.parse_chunk(top_level=False)
        end = self.expect("end", "to close while body")
        return While(cond, body, start.to(end.span))

    def parse_if(self) -> If:
        start = self.advance().span
        arms: list[tuple[Expr, Chunk]] = []
        cond = self.parse_expr()
        self.expect("then", "after if condition")
        arms.append((cond, self.parse_chunk(top_level=False)))
        else_body: Chunk | None = None
        while True:
            if self.accept("elseif"):
                cond = self.parse_expr()
                self.expect("then", "after elseif condition")
                arms.append((cond, self.parse_chunk(top_level=False)))
                continue
            if self.accept("else"):
                else_body = self.parse_chunk(top_level=False)
            end = self.expect("end", "to close if statement")
            return If(tuple(arms), else_body, start.to(end.span))

    def parse_for(self) -> NumericFor:
        start = self.advance().span
        name = self.expect_name("after 'for'")
        self.expect("=", "in numeric for")
        first = self.parse_expr()
        self.expect(",", "in numeric for")
        stop = self.parse_expr()
        if self.accept(","):
            step: Expr = self.parse_expr()
        else:
            at = stop.span
            step = Literal(1.0, SourceSpan(at.line, at.column, at.end_offset(), 0))
        self.expect("do", "after for range")
        body = self.parse_chunk(top_level=False)
        end = self.expect("end", "to close for body")
        return NumericFor(name.lexeme, first, stop, step, body, start.to(end.span))

    def parse_repeat(self) -> Repeat:
        start = self.advance().span
        body = self.parse_chunk(top_level=False)
        self.expect("until", "to close repeat body")
        cond = self.parse_expr()
        return Repeat(body, cond, start.to(cond.span))

    def parse_return(self) -> Return:
        start = self.advance().span
        if self.peek().kind in _CHUNK_ENDS or self.check(";"):
            return Return((), start)
        exprs = tuple(self.parse_expr_list())
        return Return(exprs, start.to(exprs[-1].span))

    def parse_expr_statement(self) -> Stat:
        first = self.parse_suffixed()
        if isinstance(first, Call) and not (self.check("=") or self.check(",")):
            return first
        targets = [first]
        while self.accept(","):
            targets.append(self.parse_suffixed())
        for t in targets:
            if not isinstance(t, (Var, Index, Field)):
                raise ParseError("cannot assign to this expression", t.span, ["variable"])
        self.expect("=", "in assignment")
        exprs = tuple(self.parse_expr_list())
        return Assign(tuple(targets), exprs, first.span.to(exprs[-1].span))

    # -- expressions -----------------------------------------------------------

    def parse_expr_list(self) -> list[Expr]:
        exprs = [self.parse_expr()]
        while self.accept(","):
            exprs.append(self.parse_expr())
        return exprs

    def parse_expr(self, min_prec: int = 0) -> Expr:
        tok = self.peek()
        if tok.kind in _UNARY_OPS:
            self.advance()
            operand = self.parse_expr(_UNARY_PREC)
            left: Expr = UnOp(tok.kind, operand, tok.span.to(operand.span))
        else:
            left = self.parse_suffixed()
        while True:
            op = self.peek().kind
            prec = _BIN_PREC.get(op)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if op in _RIGHT_ASSOC else prec + 1
            rhs = self.parse_expr(next_min)
            left = BinOp(op, left, rhs, left.span.to(rhs.span))

    def parse_suffixed(self) -> Expr:
        expr = self.parse_primary()
        if not isinstance(expr, (Var, Index, Field, Call)):
            return expr
        while True:
            if self.accept("."):
                name = self.expect_name("after '.'")
                expr = Field(expr, name.lexeme, expr.span.to(name.span))
            elif self.accept("["):
                key = self.parse_expr()
                close = self.expect("]", "to close index")
                expr = Index(expr, key, expr.span.to(close.span))
            elif self.check("("):
                expr = self.parse_call(expr)
            else:
                return expr

    def parse_call(self, callee: Expr) -> Call:
        self.expect("(", "to open arguments")
        args: list[Expr] = []
        if not self.check(")"):
            args = self.parse_expr_list()
        close = self.expect(")", "to close arguments")
        return Call(callee, tuple(args), callee.span.to(close.span))

    def parse_primary(self) -> Expr:
        tok = self.peek()
        kind = tok.kind
        if kind == "nil":
            self.advance()
            return Literal(None, tok.span)
        if kind == "true":
            self.advance()
            return Literal(True, tok.span)
        if kind == "false":
            self.advance()
            return Literal(False, tok.span)
        if kind == "number":
            self.advance()
            return Literal(decode_number(tok.lexeme), tok.span)
        if kind == "string":
            self.advance()
            return Literal(decode_string(tok.lexeme), tok.span)
        if kind == "name":
            self.advance()
            return Var(tok.lexeme, tok.span)
        if kind == "(":
            self.advance()
            inner = self.parse_expr()
            close = self.expect(")", "to close parenthesized expression")
            # Re-span so parenthesized groups keep containment; the inner node
            # type is preserved (parens only affect grouping in this subset).
            return _respan(inner, tok.span.to(close.span))
        if kind == "{":
            return self.parse_table()
        raise self.unexpected("expression expected", list(_EXPR_STARTS))

    def parse_table(self) -> TableCtor:
        start = self.advance().span
        fields: list[TableField] = []
        while not self.check("}"):
            if self.check("["):
                self.advance()
                key: Expr | str | None = self.parse_expr()
                self.expect("]", "to close table key")
                self.expect("=", "after table key")
                fields.append(TableField(key, self.parse_expr()))
            elif self.check("name") and self.tokens[self.pos + 1].kind == "=":
                name = self.advance()
                self.advance()
                fields.append(TableField(name.lexeme, self.parse_expr()))
            else:
                fields.append(TableField(None, self.parse_expr()))
            if not (self.accept(",") or self.accept(";")):
                break
        close = self.expect("}", "to close table constructor")
        return TableCtor(tuple(fields), start.to(close.span))


def _respan(expr: Expr, span: SourceSpan) -> Expr:
    cls = type(expr)
    kwargs = {name: getattr(expr, name) for name in expr.__dataclass_fields__}
    kwargs["span"] = span
    return cls(**kwargs)


def parse(tokens: list[Token]) -> Chunk:
    """Parse a token list (from tokenize) into a Chunk. Raises ParseError."""
    return _Parser(tokens).parse_chunk(top_level=True)


def parse_source(source: str) -> Chunk:
    """Tokenize and parse UTF-8 source text."""
    return parse(tokenize(source))
