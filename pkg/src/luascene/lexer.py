"""Hand-written lexer for the Lua subset.

Skips whitespace and both comment forms ('--' line comments and '--[[ ... ]]'
long comments). Every token's lexeme is the exact source slice at its span, so
concatenating lexemes plus the skipped regions reconstructs the input.
"""

from __future__ import annotations

from .syntax import KEYWORDS, SYMBOLS, ParseError, SourceSpan, Token

_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "\\": "\\",
    '"': '"',
    "'": "'",
    "0": "\0",
}

_SYMBOL_STARTS = {s[0] for s in SYMBOLS}


def _is_name_first(c: str) -> bool:
    return c.isascii() and (c.isalpha() or c == "_")


def _is_name_rest(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c == "_")


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0  # code-point index
        self.byte = 0  # byte offset of self.pos
        self.line = 1
        self.col = 1

    def error(self, message: str, start: tuple[int, int, int] | None = None) -> ParseError:
        if start is None:
            span = self.span_here(0)
        else:
            line, col, byte = start
            span = SourceSpan(line, col, byte, self.byte - byte)
        return ParseError(message, span)

    def span_here(self, length_bytes: int) -> SourceSpan:
        return SourceSpan(self.line, self.col, self.byte, length_bytes)

    def peek(self, ahead: int = 0) -> str:
        i = self.pos + ahead
        return self.src[i] if i < len(self.src) else ""

    def advance(self) -> str:
        c = self.src[self.pos]
        self.pos += 1
        self.byte += 1 if ord(c) < 0x80 else len(c.encode("utf-8"))
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def mark(self) -> tuple[int, int, int, int]:
        return (self.pos, self.line, self.col, self.byte)

    def token_from(self, mark: tuple[int, int, int, int], kind: str) -> Token:
        pos, line, col, byte = mark
        return Token(kind, self.src[pos : self.pos], SourceSpan(line, col, byte, self.byte - byte))

    def skip_trivia(self) -> None:
        while self.pos < len(self.src):
            c = self.peek()
            if c in " \t\r\n\f\v":
                self.advance()
            elif c == "-" and self.peek(1) == "-":
                self.comment()
            else:
                return

    def comment(self) -> None:
        start = (self.line, self.col, self.byte)
        self.advance()
        self.advance()
        if self.peek() == "[" and self.peek(1) == "[":
            self.advance()
            self.advance()
            while True:
                if self.pos >= len(self.src):
                    raise self.error("unterminated long comment", start)
                if self.peek() == "]" and self.peek(1) == "]":
                    self.advance()
                    self.advance()
                    return
                self.advance()
        else:
            while self.pos < len(self.src) and self.peek() != "\n":
                self.advance()

    def string(self) -> Token:
        mark = self.mark()
        start = (self.line, self.col, self.byte)
        quote = self.advance()
        while True:
            if self.pos >= len(self.src) or self.peek() == "\n":
                raise self.error("unterminated string", start)
            c = self.advance()
            if c == quote:
                return self.token_from(mark, "string")
            if c == "\\":
                if self.pos >= len(self.src):
                    raise self.error("unterminated string", start)
                esc = self.advance()
                if esc not in _ESCAPES:
                    raise self.error(f"invalid escape sequence '\\{esc}'", start)

    def number(self) -> Token:
        mark = self.mark()
        start = (self.line, self.col, self.byte)
        if self.peek() == "0" and self.peek(1) in ("x", "X"):
            self.advance()
            self.advance()
            ndigits = 0
            while self.peek() and self.peek() in "0123456789abcdefABCDEF":
                self.advance()
                ndigits += 1
            if ndigits == 0 or _is_name_rest(self.peek()) or self.peek() == ".":
                while _is_name_rest(self.peek()) or self.peek() == ".":
                    self.advance()
                raise self.error("malformed number", start)
            return self.token_from(mark, "number")

        while self.peek().isdigit():
            self.advance()
        if self.peek() == ".":
            self.advance()
            while self.peek().isdigit():
                self.advance()
        if self.peek() in ("e", "E"):
            self.advance()
            if self.peek() in ("+", "-"):
                self.advance()
            ndigits = 0
            while self.peek().isdigit():
                self.advance()
                ndigits += 1
            if ndigits == 0:
                raise self.error("malformed number", start)
        if _is_name_rest(self.peek()) or self.peek() == ".":
            while _is_name_rest(self.peek()) or self.peek() == ".":
                self.advance()
            raise self.error("malformed number", start)
        return self.token_from(mark, "number")

    def name_or_keyword(self) -> Token:
        mark = self.mark()
        self.advance()
        while self.pos < len(self.src) and _is_name_rest(self.peek()):
            self.advance()
        pos, _, _, _ = mark
        word = self.src[pos : self.pos]
        return self.token_from(mark, word if word in KEYWORDS else "name")

    def symbol(self) -> Token:
        mark = self.mark()
        two = self.peek() + self.peek(1)
        if len(two) == 2 and two in SYMBOLS:
            self.advance()
            self.advance()
            return self.token_from(mark, two)
        one = self.advance()
        return self.token_from(mark, one)

    def next_token(self) -> Token:
        self.skip_trivia()
        if self.pos >= len(self.src):
            return Token("eof", "", self.span_here(0))
        c = self.peek()
        if _is_name_first(c):
            return self.name_or_keyword()
        if c.isdigit() or (c == "." and self.peek(1).isdigit()):
            return self.number()
        if c in "'\"":
            return self.string()
        if c in _SYMBOL_STARTS:
            return self.symbol()
        raise self.error(f"illegal character {c!r}", (self.line, self.col, self.byte))


def tokenize(source: str) -> list[Token]:
    """Lex source into tokens, ending with an 'eof' token. Raises ParseError."""
    lexer = _Lexer(source)
    tokens: list[Token] = []
    while True:
        tok = lexer.next_token()
        tokens.append(tok)
        if tok.kind == "eof":
            return tokens


def decode_string(lexeme: str) -> str:
    """Decode a validated string token lexeme (including quotes) to its value."""
    out: list[str] = []
    i = 1
    end = len(lexeme) - 1
    while i < end:
        c = lexeme[i]
        if c == "\\":
            out.append(_ESCAPES[lexeme[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def decode_number(lexeme: str) -> float:
    """Convert a validated number token lexeme to a float."""
    if lexeme[:2].lower() == "0x":
        return float(int(lexeme, 16))
    return float(lexeme)
