"""Lenient line-oriented parser for the analyzed Python subset.

The detectors only inspect module-level assignments, expression statements
(method and constructor calls), and ``for`` loops over ``range(...)`` or
list literals.  Everything else is tolerated: a line outside the subset is
recorded as a warning and skipped, never aborting the analysis.  A
:class:`ParseError` is raised only for structurally broken recognized
constructs, e.g. unbalanced brackets on a line that matched a recognized
statement head.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace


class ParseError(Exception):
    """A recognized statement is structurally broken (e.g. unbalanced parens)."""


class _Unsupported(Exception):
    """Internal: line is outside the subset; caller records a warning."""


# ---------------------------------------------------------------------------
# Nodes


class Expr:
    pass


class Stmt:
    pass


@dataclass(frozen=True)
class Name(Expr):
    id: str
    line: int


@dataclass(frozen=True)
class IntConst(Expr):
    value: int
    line: int


@dataclass(frozen=True)
class StrConst(Expr):
    value: str
    line: int


@dataclass(frozen=True)
class ListLit(Expr):
    elements: tuple[Expr, ...]
    line: int


@dataclass(frozen=True)
class Call(Expr):
    func: Expr
    args: tuple[Expr, ...]
    keywords: tuple[tuple[str, Expr], ...]
    line: int


@dataclass(frozen=True)
class Attribute(Expr):
    base: Expr
    attr: str
    line: int


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    line: int


@dataclass(frozen=True)
class Subscript(Expr):
    base: Expr
    index: Expr
    line: int


@dataclass(frozen=True)
class Assign(Stmt):
    targets: tuple[Name, ...]
    value: Expr
    line: int


@dataclass(frozen=True)
class ExprStmt(Stmt):
    value: Expr
    line: int


@dataclass(frozen=True)
class For(Stmt):
    loop_var: Name
    iterable: Expr
    body: tuple[Stmt, ...]
    line: int


@dataclass(frozen=True)
class Pass(Stmt):
    line: int
    ellipsis: bool = False


@dataclass(frozen=True)
class ModuleAst:
    body: tuple[Stmt, ...]
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"(?P<name>[A-Za-z_]\w*)"
    r"|(?P<int>\d+)"
    r"|(?P<str>'(?:\\.|[^'\\])*'|\"(?:\\.|[^\"\\])*\")"
    r"|(?P<op>[()\[\],.+\-*=:])"
    r"|(?P<ws>[ \t]+)"
)

# Statement heads the grammar does not model; such lines are skipped with a
# warning rather than parsed.
_UNMODELED_KEYWORDS = frozenset(
    {
        "def", "class", "if", "elif", "else", "while", "import", "from",
        "return", "with", "try", "except", "finally", "raise", "global",
        "nonlocal", "del", "assert", "lambda", "yield", "async", "await",
        "break", "continue",
    }
)

_BRACKETS = {"(", ")", "[", "]"}


@dataclass(frozen=True)
class _Token:
    kind: str  # name | int | str | op
    text: str


def _unescape(body: str) -> str:
    out: list[str] = []
    i = 0
    escapes = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"'}
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            out.append(escapes.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _strip_comment(line: str) -> str:
    """Drop a trailing ``# ...`` comment, respecting string literals."""
    quote = None
    i = 0
    while i < len(line):
        c = line[i]
        if quote is None:
            if c in "'\"":
                quote = c
            elif c == "#":
                return line[:i]
        else:
            if c == "\\":
                i += 1
            elif c == quote:
                quote = None
        i += 1
    return line


def _tokenize(text: str, line: int) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise _Unsupported(f"line {line}: unsupported character {text[pos]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        value = m.group()
        if kind == "str":
            value = _unescape(value[1:-1])
        tokens.append(_Token(kind, value))
    return tokens


# ---------------------------------------------------------------------------
# Expression parsing

_ADD_PREC = 10
_MUL_PREC = 20


_MAX_NESTING = 64


class _ExprParser:
    def __init__(self, tokens: list[_Token], line: int, warnings: list[str]):
        depth = 0
        for tok in tokens:
            if tok.kind == "op" and tok.text in "([":
                depth += 1
                if depth > _MAX_NESTING:
                    raise _Unsupported(f"line {line}: expression nested too deeply")
            elif tok.kind == "op" and tok.text in ")]":
                depth -= 1
        self.tokens = tokens
        self.pos = 0
        self.line = line
        self.warnings = warnings

    def peek(self, offset: int = 0) -> _Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def advance(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"line {self.line}: unexpected end of line")
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> None:
        tok = self.peek()
        if tok is None:
            # Reaching end of line while a bracket is open is structural
            # breakage; anything else is just outside the subset.
            if text in _BRACKETS:
                raise ParseError(f"line {self.line}: unbalanced {text!r}")
            raise _Unsupported(f"line {self.line}: expected {text!r}")
        if tok.kind != "op" or tok.text != text:
            raise _Unsupported(
                f"line {self.line}: expected {text!r}, found {tok.text!r}"
            )
        self.pos += 1

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text == text

    # grammar: expr := term (('+'|'-') term)* ; term := unary ('*' unary)*
    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.at_op("+") or self.at_op("-"):
            op = self.advance().text
            right = self.parse_term()
            node = BinOp(op, node, right, self.line)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.at_op("*"):
            self.advance()
            right = self.parse_unary()
            node = BinOp("*", node, right, self.line)
        return node

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            operand = self.parse_unary()
            if isinstance(operand, IntConst):
                return IntConst(-operand.value, self.line)
            raise _Unsupported(f"line {self.line}: unary minus on non-integer")
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        node = self.parse_atom()
        while True:
            if self.at_op("."):
                after = self.peek(1)
                if (
                    isinstance(node, ListLit)
                    and after is not None
                    and after.kind == "op"
                    and after.text == "["
                ):
                    # Leave the '.' for parse_args: between two list literals
                    # it stands in for a ',' (tolerated argument separator).
                    return node
                self.advance()
                tok = self.peek()
                if tok is None or tok.kind != "name":
                    raise _Unsupported(f"line {self.line}: expected attribute name after '.'")
                self.advance()
                node = Attribute(node, tok.text, self.line)
            elif self.at_op("("):
                if not isinstance(node, (Name, Attribute)):
                    raise _Unsupported(f"line {self.line}: call on unsupported target")
                self.advance()
                args, keywords = self.parse_args()
                node = Call(node, args, keywords, self.line)
            elif self.at_op("["):
                self.advance()
                index = self.parse_expr()
                self.expect_op("]")
                node = Subscript(node, index, self.line)
            else:
                return node

    def parse_args(self) -> tuple[tuple[Expr, ...], tuple[tuple[str, Expr], ...]]:
        args: list[Expr] = []
        keywords: list[tuple[str, Expr]] = []
        if self.at_op(")"):
            self.advance()
            return tuple(args), tuple(keywords)
        while True:
            tok = self.peek()
            nxt = self.peek(1)
            if (
                tok is not None
                and tok.kind == "name"
                and nxt is not None
                and nxt.kind == "op"
                and nxt.text == "="
            ):
                self.advance()
                self.advance()
                keywords.append((tok.text, self.parse_expr()))
            else:
                args.append(self.parse_expr())
            if self.at_op(","):
                self.advance()
                continue
            # Tolerate a stray '.' standing in for ',' between two list
            # literals, as seen in real diff excerpts.
            if (
                self.at_op(".")
                and args
                and not keywords
                and isinstance(args[-1], ListLit)
            ):
                after = self.peek(1)
                if after is not None and after.kind == "op" and after.text == "[":
                    self.advance()
                    self.warnings.append(
                        f"line {self.line}: period used as argument separator"
                    )
                    continue
            self.expect_op(")")
            return tuple(args), tuple(keywords)

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"line {self.line}: unexpected end of line")
        if tok.kind == "name":
            self.advance()
            return Name(tok.text, self.line)
        if tok.kind == "int":
            self.advance()
            return IntConst(int(tok.text), self.line)
        if tok.kind == "str":
            self.advance()
            return StrConst(tok.text, self.line)
        if self.at_op("["):
            self.advance()
            elements: list[Expr] = []
            if self.at_op("]"):
                self.advance()
                return ListLit(tuple(elements), self.line)
            while True:
                elements.append(self.parse_expr())
                if self.at_op(","):
                    self.advance()
                    continue
                self.expect_op("]")
                return ListLit(tuple(elements), self.line)
        if self.at_op("("):
            self.advance()
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise _Unsupported(f"line {self.line}: unexpected token {tok.text!r}")

    def finish(self) -> None:
        """Require all tokens consumed; unbalanced leftovers mean broken structure."""
        if self.pos < len(self.tokens):
            rest = self.tokens[self.pos :]
            depth = 0
            for tok in rest:
                if tok.kind == "op" and tok.text in "([":
                    depth += 1
                elif tok.kind == "op" and tok.text in ")]":
                    depth -= 1
                    if depth < 0:
                        raise ParseError(f"line {self.line}: unbalanced brackets")
            if depth != 0:
                raise ParseError(f"line {self.line}: unbalanced brackets")
            raise _Unsupported(f"line {self.line}: trailing tokens")


def _parse_expression_tokens(tokens: list[_Token], line: int, warnings: list[str]) -> Expr:
    parser = _ExprParser(tokens, line, warnings)
    node = parser.parse_expr()
    parser.finish()
    return node


def parse_expression(text: str) -> Expr:
    """Parse a single expression; raises ParseError or ValueError outside the subset."""
    try:
        tokens = _tokenize(text, 1)
        return _parse_expression_tokens(tokens, 1, [])
    except _Unsupported as exc:
        raise ValueError(str(exc)) from None


def parse_arguments(text: str) -> tuple[tuple[Expr, ...], tuple[tuple[str, Expr], ...]]:
    """Parse a call-argument list ``a, b, kw=c`` from raw text.

    Raises ValueError when the text falls outside the expression subset.
    """
    try:
        tokens = _tokenize(text + ")", 1)
        parser = _ExprParser(tokens, 1, [])
        args, keywords = parser.parse_args()
        parser.finish()
        return args, keywords
    except (_Unsupported, ParseError) as exc:
        raise ValueError(str(exc)) from None


# ---------------------------------------------------------------------------
# Statement / module parsing


def _indent_width(line: str) -> int:
    expanded = line.expandtabs(8)
    return len(expanded) - len(expanded.lstrip(" "))


def _first_word(code: str) -> str:
    m = re.match(r"\s*([A-Za-z_]\w*)", code)
    return m.group(1) if m else ""


class _ModuleParser:
    def __init__(self, source: str):
        self.lines = source.splitlines()
        self.warnings: list[str] = []
        self.block_depth = 0

    def parse(self) -> ModuleAst:
        body, idx = self._parse_block(0, parent_indent=-1, suite_indent=0)
        # A fixed module indent of 0 means _parse_block consumes everything.
        while idx < len(self.lines):  # pragma: no cover - defensive
            self.warnings.append(f"line {idx + 1}: unexpected indent, skipped")
            idx += 1
        return ModuleAst(tuple(body), tuple(self.warnings))

    def _meaningful(self, idx: int) -> str | None:
        code = _strip_comment(self.lines[idx])
        return code if code.strip() else None

    def _parse_block(
        self, idx: int, parent_indent: int, suite_indent: int | None
    ) -> tuple[list[Stmt], int]:
        stmts: list[Stmt] = []
        while idx < len(self.lines):
            code = self._meaningful(idx)
            if code is None:
                idx += 1
                continue
            indent = _indent_width(code)
            if indent <= parent_indent:
                break
            if suite_indent is None:
                suite_indent = indent
            if indent != suite_indent:
                self.warnings.append(f"line {idx + 1}: unexpected indent, skipped")
                idx += 1
                continue
            stmt, idx = self._parse_stmt(code, idx, suite_indent)
            if stmt is not None:
                stmts.append(stmt)
        return stmts, idx

    def _parse_stmt(self, code: str, idx: int, indent: int) -> tuple[Stmt | None, int]:
        lineno = idx + 1
        stripped = code.strip()
        if stripped == "pass":
            return Pass(lineno), idx + 1
        if stripped == "...":
            return Pass(lineno, ellipsis=True), idx + 1
        word = _first_word(stripped)
        if word in _UNMODELED_KEYWORDS:
            self.warnings.append(
                f"line {lineno}: skipped statement with unmodeled keyword {word!r}"
            )
            return None, idx + 1
        if word == "for":
            return self._parse_for(stripped, idx, indent)
        try:
            tokens = _tokenize(stripped, lineno)
            return self._parse_simple(tokens, lineno), idx + 1
        except _Unsupported as exc:
            self.warnings.append(str(exc))
            return None, idx + 1

    def _parse_simple(self, tokens: list[_Token], lineno: int) -> Stmt:
        # Split on top-level '=' to distinguish assignment from expression.
        depth = 0
        splits: list[int] = []
        for i, tok in enumerate(tokens):
            if tok.kind != "op":
                continue
            if tok.text in "([":
                depth += 1
            elif tok.text in ")]":
                depth -= 1
            elif tok.text == "=" and depth == 0:
                splits.append(i)
        if not splits:
            value = _parse_expression_tokens(tokens, lineno, self.warnings)
            return ExprStmt(value, lineno)
        targets: list[Name] = []
        start = 0
        for split in splits:
            segment = tokens[start:split]
            if len(segment) != 1 or segment[0].kind != "name":
                raise _Unsupported(f"line {lineno}: unsupported assignment target")
            targets.append(Name(segment[0].text, lineno))
            start = split + 1
        value = _parse_expression_tokens(tokens[start:], lineno, self.warnings)
        return Assign(tuple(targets), value, lineno)

    def _parse_for(self, stripped: str, idx: int, indent: int) -> tuple[Stmt | None, int]:
        lineno = idx + 1
        try:
            tokens = _tokenize(stripped, lineno)
        except _Unsupported as exc:
            self.warnings.append(str(exc))
            return None, idx + 1
        colon = self._top_level_colon(tokens)
        if colon is None:
            raise ParseError(f"line {lineno}: for statement missing ':'")
        if (
            colon < 4
            or tokens[1].kind != "name"
            or tokens[2].kind != "name"
            or tokens[2].text != "in"
        ):
            self.warnings.append(f"line {lineno}: unsupported for-loop header")
            return None, idx + 1
        loop_var = Name(tokens[1].text, lineno)
        try:
            iterable = _parse_expression_tokens(tokens[3:colon], lineno, self.warnings)
        except _Unsupported as exc:
            self.warnings.append(str(exc))
            return None, idx + 1
        inline = tokens[colon + 1 :]
        if inline:
            try:
                stmt = self._parse_simple(inline, lineno)
            except _Unsupported as exc:
                self.warnings.append(str(exc))
                return None, idx + 1
            return For(loop_var, iterable, (stmt,), lineno), idx + 1
        if self.block_depth >= _MAX_NESTING:
            self.warnings.append(f"line {lineno}: loops nested too deeply, skipped")
            return None, self._skip_suite(idx + 1, indent)
        self.block_depth += 1
        try:
            body, next_idx = self._parse_block(idx + 1, parent_indent=indent, suite_indent=None)
        finally:
            self.block_depth -= 1
        saw_lines = any(
            self._meaningful(i) is not None for i in range(idx + 1, next_idx)
        )
        if not saw_lines:
            raise ParseError(f"line {lineno}: for loop has an empty body")
        if not body:
            self.warnings.append(
                f"line {lineno}: for-loop body contains no recognized statements"
            )
            body = [Pass(lineno)]
        return For(loop_var, iterable, tuple(body), lineno), next_idx

    def _skip_suite(self, idx: int, parent_indent: int) -> int:
        """Advance past every line deeper than parent_indent without parsing."""
        while idx < len(self.lines):
            code = self._meaningful(idx)
            if code is not None and _indent_width(code) <= parent_indent:
                break
            idx += 1
        return idx

    @staticmethod
    def _top_level_colon(tokens: list[_Token]) -> int | None:
        depth = 0
        for i, tok in enumerate(tokens):
            if tok.kind != "op":
                continue
            if tok.text in "([":
                depth += 1
            elif tok.text in ")]":
                depth -= 1
            elif tok.text == ":" and depth == 0:
                return i
        return None


def parse(source: str) -> ModuleAst:
    """Parse source text into a :class:`ModuleAst`.

    Recognized statements preserve their 1-based line numbers; unrecognized
    lines become warnings on the returned module instead of nodes.
    """
    return _ModuleParser(source).parse()


# ---------------------------------------------------------------------------
# Constant folding


def fold_constants(e: Expr) -> Expr:
    """Reduce every integer BinOp to an IntConst; non-constant trees pass through."""
    if isinstance(e, BinOp):
        left = fold_constants(e.left)
        right = fold_constants(e.right)
        if isinstance(left, IntConst) and isinstance(right, IntConst):
            if e.op == "+":
                value = left.value + right.value
            elif e.op == "-":
                value = left.value - right.value
            else:
                value = left.value * right.value
            return IntConst(value, e.line)
        if left is e.left and right is e.right:
            return e
        return BinOp(e.op, left, right, e.line)
    if isinstance(e, ListLit):
        return ListLit(tuple(fold_constants(el) for el in e.elements), e.line)
    if isinstance(e, Call):
        return Call(
            fold_constants(e.func),
            tuple(fold_constants(a) for a in e.args),
            tuple((k, fold_constants(v)) for k, v in e.keywords),
            e.line,
        )
    if isinstance(e, Attribute):
        return Attribute(fold_constants(e.base), e.attr, e.line)
    if isinstance(e, Subscript):
        return Subscript(fold_constants(e.base), fold_constants(e.index), e.line)
    return e


def _fold_stmt(s: Stmt) -> Stmt:
    if isinstance(s, Assign):
        return replace(s, value=fold_constants(s.value))
    if isinstance(s, ExprStmt):
        return replace(s, value=fold_constants(s.value))
    if isinstance(s, For):
        return For(
            s.loop_var,
            fold_constants(s.iterable),
            tuple(_fold_stmt(b) for b in s.body),
            s.line,
        )
    return s


def fold_module(m: ModuleAst) -> ModuleAst:
    """Fold constants in every statement of a module."""
    return ModuleAst(tuple(_fold_stmt(s) for s in m.body), m.warnings)


# ---------------------------------------------------------------------------
# Rendering

_NEG_PREC = 50
_ATOM_PREC = 99


def _expr_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _MUL_PREC if e.op == "*" else _ADD_PREC
    if isinstance(e, IntConst) and e.value < 0:
        return _NEG_PREC
    return _ATOM_PREC


def expr_source(e: Expr) -> str:
    """Canonical source text for an expression (used for cross-file comparison)."""
    if isinstance(e, Name):
        return e.id
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, StrConst):
        return repr(e.value)
    if isinstance(e, ListLit):
        return "[" + ", ".join(expr_source(el) for el in e.elements) + "]"
    if isinstance(e, Call):
        parts = [expr_source(a) for a in e.args]
        parts.extend(f"{k}={expr_source(v)}" for k, v in e.keywords)
        return f"{_postfix_base(e.func)}({', '.join(parts)})"
    if isinstance(e, Attribute):
        return f"{_postfix_base(e.base)}.{e.attr}"
    if isinstance(e, Subscript):
        return f"{_postfix_base(e.base)}[{expr_source(e.index)}]"
    if isinstance(e, BinOp):
        prec = _expr_prec(e)
        left = expr_source(e.left)
        if _expr_prec(e.left) < prec:
            left = f"({left})"
        right = expr_source(e.right)
        if _expr_prec(e.right) <= prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def _postfix_base(e: Expr) -> str:
    text = expr_source(e)
    if _expr_prec(e) < _ATOM_PREC:
        return f"({text})"
    return text


def _stmt_source(s: Stmt, indent: int) -> list[str]:
    pad = " " * indent
    if isinstance(s, Assign):
        targets = " = ".join(t.id for t in s.targets)
        return [f"{pad}{targets} = {expr_source(s.value)}"]
    if isinstance(s, ExprStmt):
        return [f"{pad}{expr_source(s.value)}"]
    if isinstance(s, Pass):
        return [f"{pad}..." if s.ellipsis else f"{pad}pass"]
    if isinstance(s, For):
        lines = [f"{pad}for {s.loop_var.id} in {expr_source(s.iterable)}:"]
        for child in s.body:
            lines.extend(_stmt_source(child, indent + 4))
        return lines
    raise TypeError(f"not a statement node: {s!r}")


def dump(m: ModuleAst) -> str:
    """Render a module back to canonical source text.

    The rendering reparses to an equivalent tree, so ``dump(parse(.))`` is
    idempotent on the recognized subset.  An empty module renders as the
    placeholder ``Module(body=[])``.
    """
    if not m.body:
        return "Module(body=[])"
    lines: list[str] = []
    for stmt in m.body:
        lines.extend(_stmt_source(stmt, 0))
    return "\n".join(lines)


def canonicalize_line(text: str) -> str:
    """Canonical, constant-folded rendering of one recognized statement line.

    Lines outside the recognized subset come back stripped but otherwise
    untouched.
    """
    stripped = text.strip()
    try:
        module = _ModuleParser(stripped).parse()
    except ParseError:
        return stripped
    if len(module.body) == 1:
        return dump(fold_module(module))
    return stripped
