"""Expression AST for the tree relation algebra, fragments, parser, printer.

Concrete syntax::

    atom := "0" | "self" | "down" | "up" | "~" token | "(" expr ")"
          | "p1(" expr ")" | "p2(" expr ")" | "inv(" expr ")" | "ch" int "(" expr ")"
    comp := atom ("/" atom)*
    expr := comp (("|" | "&" | "-") comp)*

Unary operators bind tightest, then composition "/", then the set
operators, which share one precedence level and associate to the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .document import check_label


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass(frozen=True)
class Expr:
    def children(self) -> tuple["Expr", ...]:
        return ()

    def __str__(self) -> str:
        return print_expr(self)


@dataclass(frozen=True)
class Empty(Expr):
    pass


@dataclass(frozen=True)
class Eps(Expr):
    pass


@dataclass(frozen=True)
class LabelTest(Expr):
    label: str

    def __post_init__(self):
        check_label(self.label)


@dataclass(frozen=True)
class Down(Expr):
    pass


@dataclass(frozen=True)
class Up(Expr):
    pass


@dataclass(frozen=True)
class Proj1(Expr):
    body: Expr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Proj2(Expr):
    body: Expr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Inverse(Expr):
    body: Expr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Count(Expr):
    k: int
    body: Expr

    def __post_init__(self):
        if self.k < 1:
            raise ExprSyntaxError(f"ch requires k >= 1, got {self.k}")

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Compose(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Union(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Intersect(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Diff(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


EMPTY = Empty()
EPS = Eps()
DOWN = Down()
UP = Up()

_SET_OPS = (Union, Intersect, Diff)


def expr_size(e: Expr) -> int:
    """AST constructor count; ch_k counts as one node regardless of k."""
    return 1 + sum(expr_size(c) for c in e.children())


def compose_all(parts: Iterable[Expr]) -> Expr:
    """Right-associated composition chain; EPS for no parts."""
    parts = list(parts)
    if not parts:
        return EPS
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Compose(p, out)
    return out


def union_all(parts: Iterable[Expr]) -> Expr:
    parts = list(parts)
    if not parts:
        return EMPTY
    out = parts[0]
    for p in parts[1:]:
        out = Union(out, p)
    return out


def iter_subexprs(e: Expr) -> Iterator[Expr]:
    yield e
    for c in e.children():
        yield from iter_subexprs(c)


def uses_op(e: Expr, kind: type) -> bool:
    return any(isinstance(s, kind) for s in iter_subexprs(e))


# --- parsing -------------------------------------------------------------

_LABEL_STOP = set("()#/") | {" ", "\t", "\n", "\r"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Tokens are (kind, value, position); kind in {punct, label, word}."""
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()/|&-":
            out.append(("punct", ch, i))
            i += 1
        elif ch == "~":
            j = i + 1
            while j < n and text[j] not in _LABEL_STOP:
                j += 1
            if j == i + 1:
                raise ExprSyntaxError("'~' must be followed by a label", i)
            out.append(("label", text[i + 1 : j], i))
            i = j
        elif ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(("word", text[i:j], i))
            i = j
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    return out


class _Parser:
    def __init__(self, tokens, text_len):
        self.tokens = tokens
        self.pos = 0
        self.text_len = text_len

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of expression", self.text_len)
        self.pos += 1
        return tok

    def expect_punct(self, ch):
        tok = self.next()
        if tok[0] != "punct" or tok[1] != ch:
            raise ExprSyntaxError(f"expected {ch!r}, got {tok[1]!r}", tok[2])

    def parse_expr(self) -> Expr:
        out = self.parse_comp()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "punct" or tok[1] not in "|&-":
                return out
            self.next()
            rhs = self.parse_comp()
            cls = {"|": Union, "&": Intersect, "-": Diff}[tok[1]]
            out = cls(out, rhs)

    def parse_comp(self) -> Expr:
        parts = [self.parse_atom()]
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "punct" or tok[1] != "/":
                break
            self.next()
            parts.append(self.parse_atom())
        return compose_all(parts)

    def parse_atom(self) -> Expr:
        tok = self.next()
        kind, value, at = tok
        if kind == "label":
            return LabelTest(value)
        if kind == "punct" and value == "(":
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        if kind == "word":
            if value == "0":
                return EMPTY
            if value == "self":
                return EPS
            if value == "down":
                return DOWN
            if value == "up":
                return UP
            if value in ("p1", "p2", "inv"):
                self.expect_punct("(")
                body = self.parse_expr()
                self.expect_punct(")")
                return {"p1": Proj1, "p2": Proj2, "inv": Inverse}[value](body)
            if value.startswith("ch") and value[2:].isdigit():
                k = int(value[2:])
                if k < 1:
                    raise ExprSyntaxError(f"ch requires k >= 1, got ch{k}", at)
                self.expect_punct("(")
                body = self.parse_expr()
                self.expect_punct(")")
                return Count(k, body)
        raise ExprSyntaxError(f"unexpected token {value!r}", at)


def parse_expr(text: str) -> Expr:
    parser = _Parser(_tokenize(text), len(text))
    e = parser.parse_expr()
    tok = parser.peek()
    if tok is not None:
        raise ExprSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return e


# --- printing ------------------------------------------------------------


def print_expr(e: Expr) -> str:
    """Minimal-parenthesis rendering; parse_expr(print_expr(e)) == e."""
    return _print(e, 0)


def _print(e: Expr, level: int) -> str:
    # level: 0 = set-op position, 1 = composition position, 2 = atom position
    if isinstance(e, Empty):
        return "0"
    if isinstance(e, Eps):
        return "self"
    if isinstance(e, Down):
        return "down"
    if isinstance(e, Up):
        return "up"
    if isinstance(e, LabelTest):
        return "~" + e.label
    if isinstance(e, Proj1):
        return f"p1({_print(e.body, 0)})"
    if isinstance(e, Proj2):
        return f"p2({_print(e.body, 0)})"
    if isinstance(e, Inverse):
        return f"inv({_print(e.body, 0)})"
    if isinstance(e, Count):
        return f"ch{e.k}({_print(e.body, 0)})"
    if isinstance(e, Compose):
        # chains print flat only when nested to the right
        text = f"{_print(e.left, 2)}/{_print(e.right, 1)}"
        return f"({text})" if level >= 2 else text
    if isinstance(e, _SET_OPS):
        op = {Union: "|", Intersect: "&", Diff: "-"}[type(e)]
        text = f"{_print(e.left, 0)} {op} {_print(e.right, 1)}"
        return f"({text})" if level >= 1 else text
    raise TypeError(f"not an Expr: {e!r}")


# --- fragments -----------------------------------------------------------

OP_DOWN = "down"
OP_UP = "up"
OP_PROJ1 = "proj1"
OP_PROJ2 = "proj2"
OP_INVERSE = "inverse"
OP_COUNT = "count"
OP_INTERSECT = "intersect"
OP_DIFF = "diff"


@dataclass(frozen=True)
class Fragment:
    """A named operation set, optionally core-restricted and count-bounded."""

    name: str
    ops: frozenset[str]
    core: bool = False
    count_bound: int | None = None

    def __str__(self) -> str:
        return self.name


# family -> (nonbasic ops, core flag, default k or None when not parameterized)
_FAMILIES: dict[str, tuple[frozenset[str], bool, int | None]] = {
    "sd": (frozenset({OP_DOWN, OP_PROJ1, OP_COUNT, OP_DIFF}), False, 1),
    "sd-pos": (frozenset({OP_DOWN, OP_PROJ1, OP_INTERSECT}), False, None),
    "wd": (frozenset({OP_DOWN, OP_PROJ1, OP_PROJ2, OP_COUNT, OP_DIFF}), False, 1),
    "wd-pos": (frozenset({OP_DOWN, OP_PROJ1, OP_PROJ2}), False, None),
    "su": (frozenset({OP_UP, OP_PROJ1, OP_DIFF}), False, None),
    "su-pos": (frozenset({OP_UP, OP_PROJ1, OP_INTERSECT}), False, None),
    "xpath": (frozenset({OP_DOWN, OP_UP, OP_COUNT, OP_DIFF}), False, 3),
    "core-xpath": (
        frozenset({OP_DOWN, OP_UP, OP_PROJ1, OP_PROJ2, OP_COUNT, OP_DIFF}),
        True,
        2,
    ),
    "pos-xpath": (frozenset({OP_DOWN, OP_UP, OP_INTERSECT}), False, None),
}


def fragment(name: str, k: int | None = None) -> Fragment:
    """Look up a fragment by registry key, e.g. "sd", "sd(2)", "xpath"."""
    base = name
    if name.endswith(")") and "(" in name:
        base, _, rest = name.partition("(")
        if k is not None:
            raise ValueError(f"k given twice for fragment {name!r}")
        try:
            k = int(rest[:-1])
        except ValueError:
            raise ValueError(f"bad fragment name {name!r}") from None
    if base not in _FAMILIES:
        raise ValueError(f"unknown fragment {name!r}")
    ops, core, default_k = _FAMILIES[base]
    if default_k is None:
        if k is not None:
            raise ValueError(f"fragment {base!r} takes no counting bound")
        return Fragment(base, ops, core, None)
    if k is None:
        k = default_k
    if k < 1:
        raise ValueError(f"counting bound must be >= 1, got {k}")
    return Fragment(f"{base}({k})", ops, core, k)


def registry_fragments(max_k: int = 3) -> list[Fragment]:
    """The concrete fragments exercised by the test suites."""
    out = []
    for kk in range(1, max_k + 1):
        out.append(fragment("sd", kk))
    out.append(fragment("sd-pos"))
    for kk in range(1, max_k + 1):
        out.append(fragment("wd", kk))
    out.append(fragment("wd-pos"))
    out.extend([fragment("su"), fragment("su-pos")])
    out.append(fragment("xpath"))
    out.append(fragment("core-xpath"))
    out.append(fragment("pos-xpath"))
    return out


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple[tuple[tuple[int, ...], str], ...] = ()

    def __bool__(self) -> bool:
        return self.ok


_OP_OF = {
    Down: OP_DOWN,
    Up: OP_UP,
    Proj1: OP_PROJ1,
    Proj2: OP_PROJ2,
    Inverse: OP_INVERSE,
    Intersect: OP_INTERSECT,
    Diff: OP_DIFF,
}


def check_fragment(e: Expr, frag: Fragment) -> Verdict:
    """Check op membership, count bounds, and (if core) boolean placement.

    In a core fragment, every Intersect/Diff must lie inside a tree of set
    operators that is the immediate body of some p1/p2; a composition or
    any other operator terminates such a boolean region.
    """
    violations: list[tuple[tuple[int, ...], str]] = []

    def walk(node: Expr, path: tuple[int, ...], in_combo: bool) -> None:
        cls = type(node)
        needed = _OP_OF.get(cls)
        if needed is not None and needed not in frag.ops:
            violations.append((path, f"operator {needed} not in fragment {frag.name}"))
        if isinstance(node, Count):
            if OP_COUNT not in frag.ops:
                violations.append((path, f"operator count not in fragment {frag.name}"))
            elif frag.count_bound is not None and node.k > frag.count_bound:
                violations.append(
                    (path, f"ch{node.k} exceeds counting bound {frag.count_bound}")
                )
        if frag.core and isinstance(node, (Intersect, Diff)) and not in_combo:
            violations.append((path, f"{_OP_OF[cls]} outside a projection body"))
        if isinstance(node, (Proj1, Proj2)):
            walk(node.body, path + (0,), True)
        elif isinstance(node, _SET_OPS):
            for i, c in enumerate(node.children()):
                walk(c, path + (i,), in_combo)
        else:
            for i, c in enumerate(node.children()):
                walk(c, path + (i,), False)

    walk(e, (), False)
    return Verdict(not violations, tuple(violations))
