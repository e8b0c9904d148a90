"""Formulas of the dynamic preference language: AST, parser and renderer.

Concrete syntax (loosest binding first)::

    form  := iff
    iff   := imp ("<->" imp)*            left associative
    imp   := or ("->" imp)?              right associative
    or    := and ("|" and)*
    and   := unary ("&" unary)*
    unary := ("~" | "A" | "E" | "[leq]" | "[lt]" | "<leq>" | "<lt>") unary
           | "[" IDENT form "]" unary    dynamic modality, form propositional
           | atom
    atom  := IDENT | "T" | "F" | "(" form ")"

``[leq]``/``<leq>`` quantify over worlds at least as plausible as the current
one, ``[lt]``/``<lt>`` over strictly more plausible ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import Iterable, Iterator

from dpl.errors import FormulaSyntaxError

IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")
_FIELDS: dict[type, tuple[str, ...]] = {}


@dataclass(frozen=True)
class Formula:
    """Base class.  Every node caches its hash and two structural flags:
    ``propositional`` (no modalities) and ``closed`` (no holes)."""

    def __post_init__(self):
        kids = self.children()
        cls = type(self)
        names = _FIELDS.get(cls)
        if names is None:
            names = _FIELDS[cls] = tuple(f.name for f in fields(self))
        object.__setattr__(self, "_hash", hash((cls.__name__,) + tuple(getattr(self, n) for n in names)))
        object.__setattr__(self, "closed", all(k.closed for k in kids))
        object.__setattr__(self, "propositional", self._local_prop() and all(k.propositional for k in kids))

    def _local_prop(self) -> bool:
        return True

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not IDENT.match(self.name):
            raise ValueError(f"bad atom name {self.name!r}")
        super().__post_init__()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Hole(Formula):
    """Placeholder bound by an environment at evaluation time.  Holes have
    no concrete syntax; schema templates use them for the quantified slot."""

    name: str

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "closed", False)


@dataclass(frozen=True)
class _Unary(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Not(_Unary):
    pass


@dataclass(frozen=True)
class _Modal(_Unary):
    def _local_prop(self):
        return False


@dataclass(frozen=True)
class BoxAll(_Modal):
    pass


@dataclass(frozen=True)
class DiamAll(_Modal):
    pass


@dataclass(frozen=True)
class BoxLeq(_Modal):
    pass


@dataclass(frozen=True)
class DiamLeq(_Modal):
    pass


@dataclass(frozen=True)
class BoxLt(_Modal):
    pass


@dataclass(frozen=True)
class DiamLt(_Modal):
    pass


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class And(_Binary):
    pass


@dataclass(frozen=True)
class Or(_Binary):
    pass


@dataclass(frozen=True)
class Implies(_Binary):
    pass


@dataclass(frozen=True)
class Iff(_Binary):
    pass


@dataclass(frozen=True)
class Dyn(Formula):
    """``[operator arg] body``: evaluate ``body`` after upgrading by ``arg``."""

    operator: str
    arg: Formula
    body: Formula

    def __post_init__(self):
        if not IDENT.match(self.operator):
            raise ValueError(f"bad operator name {self.operator!r}")
        if not self.arg.propositional:
            raise ValueError("non-propositional operator argument")
        super().__post_init__()

    def _local_prop(self):
        return False

    def children(self):
        return (self.arg, self.body)


def _cached_hash(self):
    return self._hash


for _cls in (Atom, Top, Bot, Hole, Not, BoxAll, DiamAll, BoxLeq, DiamLeq, BoxLt, DiamLt,
             And, Or, Implies, Iff, Dyn):
    _cls.__hash__ = _cached_hash

T = Top()
F = Bot()

# ---------------------------------------------------------------- rendering

_PREFIX = {
    Not: "~",
    BoxAll: "A",
    DiamAll: "E",
    BoxLeq: "[leq]",
    DiamLeq: "<leq>",
    BoxLt: "[lt]",
    DiamLt: "<lt>",
}
_INFIX = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def render(f: Formula) -> str:
    """Canonical text.  Binary nodes are always parenthesised; the operand
    of a prefix operator is parenthesised when it is a modal or dynamic
    formula."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Hole):
        return "?" + f.name
    if isinstance(f, _Binary):
        return f"({render(f.left)} {_INFIX[type(f)]} {render(f.right)})"
    if isinstance(f, _Unary):
        op, body = _PREFIX[type(f)], _operand(f.sub)
        if isinstance(f, Not) or body.startswith("("):
            return op + body
        return f"{op} {body}"
    if isinstance(f, Dyn):
        return f"[{f.operator} {render(f.arg)}]{_operand(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Formula) -> str:
    text = render(f)
    if isinstance(f, (Atom, Top, Bot, Hole, _Binary, Not)):
        return text
    return f"({text})"


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<sym><->|->|<leq>|<lt>|\[leq\]|\[lt\]|[\[\]()~&|])|(?P<ident>[a-z][a-z0-9_]*)|(?P<kw>[AETF])(?![A-Za-z0-9_]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "eof":
            found = "end of input" if kind == "eof" else repr(val)
            raise FormulaSyntaxError(f"expected {value!r}, found {found}", pos)

    def form(self):
        left = self.imp()
        while self.peek()[1] == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val, pos = self.peek()
        ctor = _UNARY_TOKENS.get(val) if kind != "ident" else None
        if ctor is not None:
            self.take()
            return ctor(self.unary())
        if val == "[" and kind == "sym":
            self.take()
            kind, name, npos = self.take()
            if kind != "ident":
                raise FormulaSyntaxError("expected operator name", npos)
            arg_pos = self.peek()[2]
            arg = self.form()
            if not arg.propositional:
                raise FormulaSyntaxError("non-propositional operator argument", arg_pos)
            self.expect("]")
            return Dyn(name, arg, self.unary())
        return self.atom()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "ident":
            return Atom(val)
        if val == "T":
            return T
        if val == "F":
            return F
        if val == "(":
            inner = self.form()
            self.expect(")")
            return inner
        found = "end of input" if kind == "eof" else repr(val)
        raise FormulaSyntaxError(f"unexpected {found}", pos)


_UNARY_TOKENS = {
    "~": Not,
    "A": BoxAll,
    "E": DiamAll,
    "[leq]": BoxLeq,
    "[lt]": BoxLt,
    "<leq>": DiamLeq,
    "<lt>": DiamLt,
}


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.form()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {val!r}", pos)
    return f


# --------------------------------------------------------- derived helpers


def is_propositional(f: Formula) -> bool:
    return f.propositional


def conj(items: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``T`` when empty."""
    out = None
    for f in items:
        out = f if out is None else And(out, f)
    return T if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; ``F`` when empty."""
    out = None
    for f in items:
        out = f if out is None else Or(out, f)
    return F if out is None else out


def mu(f: Formula) -> Formula:
    """Most plausible ``f``-worlds: ``f & ~<lt> f``."""
    return And(f, Not(DiamLt(f)))


def belief(f: Formula, g: Formula) -> Formula:
    """Conditional belief in ``f`` given ``g``: ``A(mu(g) -> f)``."""
    return BoxAll(Implies(mu(g), f))


def degree(f: Formula, i: int) -> Formula:
    """Holds at worlds topping a strict ``f``-chain of length at least ``i``."""
    if i < 1:
        raise ValueError("degree index must be at least 1")
    if not f.propositional:
        raise ValueError("degree formulas take a propositional argument")
    out = f
    for _ in range(i - 1):
        out = And(f, DiamLt(out))
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for k in f.children():
        yield from subformulas(k)


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def operators_of(f: Formula) -> frozenset[str]:
    return frozenset(g.operator for g in subformulas(f) if isinstance(g, Dyn))


def substitute(f: Formula, mapping: dict[str, Formula]) -> Formula:
    """Replace holes by formulas."""
    if f.closed:
        return f
    if isinstance(f, Hole):
        return mapping.get(f.name, f)
    if isinstance(f, _Unary):
        return type(f)(substitute(f.sub, mapping))
    if isinstance(f, _Binary):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Dyn):
        return Dyn(f.operator, substitute(f.arg, mapping), substitute(f.body, mapping))
    return f


@lru_cache(maxsize=4096)
def holes_of(f: Formula) -> tuple[str, ...]:
    """Hole names in order of first occurrence."""
    seen: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Hole):
            seen.setdefault(g.name, None)
    return tuple(seen)
