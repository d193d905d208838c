"""Formula AST, concrete grammar, parser and printer.

Core constructors are ``Top``, ``Atom``, ``Not``, ``And``, ``Possible``,
``DiamondUpdate`` and ``DiamondUnion``.  Everything else (``false``, ``|``,
``->``, ``<->``, ``B[i]`` and ``[U@u]``) is sugar that the parser expands
into the core, so downstream code only ever sees the seven classes.

Concrete syntax::

    phi ::= "true" | "false" | atom | "~" phi | "(" phi ")"
          | phi op phi
          | "P[" agent "]" phi | "B[" agent "]" phi
          | "<" frame "@" event ("+" frame "@" event)* ">" phi
          | "[" frame "@" event "]" phi
    op  ::= "&" | "|" | "->" | "<->"      (tightest first)
    atom ::= ident | ident "(" agent ("," agent)* ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class FormulaSyntaxError(ValueError):
    """Raised on malformed formula text; ``pos`` is a character offset."""

    def __init__(self, msg: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            msg = f"{msg} at position {pos}"
        super().__init__(msg)


class SignatureError(ValueError):
    pass


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    pred: str
    args: tuple[str, ...] = ()

    @property
    def key(self) -> str:
        """Valuation key, e.g. ``p`` or ``p(f,o,g)``."""
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Possible(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True, slots=True)
class DiamondUpdate(Formula):
    frame: str
    event: str
    sub: Formula


@dataclass(frozen=True, slots=True)
class DiamondUnion(Formula):
    pointed: tuple[tuple[str, str], ...]
    sub: Formula

    def __post_init__(self):
        if len(self.pointed) < 1:
            raise ValueError("union update needs at least one pointed frame")


TOP = Top()
BOT = Not(TOP)


# -- sugar -------------------------------------------------------------------

def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Belief(agent: str, sub: Formula) -> Formula:
    return Not(Possible(agent, Not(sub)))


def BoxUpdate(frame: str, event: str, sub: Formula) -> Formula:
    return Not(DiamondUpdate(frame, event, Not(sub)))


def union_update(pointed: Iterable[tuple[str, str]], sub: Formula) -> Formula:
    """Union diamond, normalised to a plain update for a single member."""
    pointed = tuple((str(f), str(e)) for f, e in pointed)
    if len(pointed) == 1:
        return DiamondUpdate(pointed[0][0], pointed[0][1], sub)
    return DiamondUnion(pointed, sub)


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    """Disjunction; the empty disjunction is ``false``."""
    if not fs:
        return BOT
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def atom(text: str) -> Atom:
    f = parse_formula(text)
    if not isinstance(f, Atom):
        raise FormulaSyntaxError(f"not an atom: {text!r}")
    return f


# -- traversal / measures ----------------------------------------------------

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Top, Atom)):
        return ()
    if isinstance(f, And):
        return (f.left, f.right)
    return (f.sub,)


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def atoms(f: Formula) -> set[Atom]:
    return {g for g in subformulas(f) if isinstance(g, Atom)}


def agents_of(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, Possible)}


def frame_refs(f: Formula) -> set[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, DiamondUpdate):
            out.add(g.frame)
        elif isinstance(g, DiamondUnion):
            out.update(name for name, _ in g.pointed)
    return out


def is_el(f: Formula) -> bool:
    return not any(isinstance(g, (DiamondUpdate, DiamondUnion)) for g in subformulas(f))


def is_del_minus(f: Formula) -> bool:
    return not any(isinstance(g, DiamondUnion) for g in subformulas(f))


def is_del(f: Formula) -> bool:
    return isinstance(f, Formula)


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Top, Atom)):
        return 0
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Not):
        return modal_depth(f.sub)
    return 1 + modal_depth(f.sub)


def node_count(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def formula_length(f: Formula, frames: Mapping[str, object] | None = None) -> int:
    """Parse-tree size plus the size of every referenced frame occurrence."""
    frames = frames or {}
    n = 0
    for g in subformulas(f):
        n += 1
        names = ()
        if isinstance(g, DiamondUpdate):
            names = (g.frame,)
        elif isinstance(g, DiamondUnion):
            names = tuple(name for name, _ in g.pointed)
        for name in names:
            if name not in frames:
                raise KeyError(f"unresolved frame reference {name!r}")
            n += frames[name].size()
    return n


def check_signature(f: Formula, signature: Mapping[str, int]) -> None:
    for a in atoms(f):
        if a.pred not in signature:
            raise SignatureError(f"unknown predicate {a.pred!r}")
        if signature[a.pred] != len(a.args):
            raise SignatureError(
                f"{a.pred} has arity {signature[a.pred]}, got {len(a.args)} in {a.key}"
            )


def merge_signature(sig: dict[str, int], fs: Iterable[Formula | Atom]) -> dict[str, int]:
    """Extend ``sig`` in place with the predicates of ``fs``; conflicting arities raise."""
    for f in fs:
        for a in atoms(f):
            n = sig.setdefault(a.pred, len(a.args))
            if n != len(a.args):
                raise SignatureError(
                    f"predicate {a.pred!r} used with arities {n} and {len(a.args)}"
                )
    return sig


# -- parser ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op><->|->|[~&|()\[\]<>+@,])|(?P<ident>[A-Za-z][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = "op" if m.group("op") else "ident"
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    # binding strength of binary operators; higher binds tighter
    PREC = {"&": 4, "|": 3, "->": 2, "<->": 1}

    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value or kind == "eof":
            raise FormulaSyntaxError(f"expected {value!r}, got {v or 'end of input'!r}", pos, self.text)

    def ident(self, what: str) -> str:
        kind, v, pos = self.next()
        if kind != "ident":
            raise FormulaSyntaxError(f"expected {what}, got {v or 'end of input'!r}", pos, self.text)
        return v

    def parse(self) -> Formula:
        f = self.binary(0)
        kind, v, pos = self.peek()
        if kind != "eof":
            raise FormulaSyntaxError(f"unexpected {v!r}", pos, self.text)
        return f

    def binary(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            _, op, _ = self.peek()
            prec = self.PREC.get(op)
            if prec is None or prec < min_prec:
                return left
            self.next()
            # '->' is right associative, the rest left associative
            right = self.binary(prec if op == "->" else prec + 1)
            if op == "&":
                left = And(left, right)
            elif op == "|":
                left = Or(left, right)
            elif op == "->":
                left = Implies(left, right)
            else:
                left = Iff(left, right)

    def pointed(self) -> tuple[str, str]:
        frame = self.ident("frame name")
        self.expect("@")
        return frame, self.ident("event name")

    def unary(self) -> Formula:
        kind, v, pos = self.peek()
        if v == "~" and kind == "op":
            self.next()
            return Not(self.unary())
        if v == "(" and kind == "op":
            self.next()
            f = self.binary(0)
            self.expect(")")
            return f
        if v == "<" and kind == "op":
            self.next()
            members = [self.pointed()]
            while self.peek()[1] == "+":
                self.next()
                members.append(self.pointed())
            self.expect(">")
            return union_update(members, self.unary())
        if v == "[" and kind == "op":
            self.next()
            frame, event = self.pointed()
            self.expect("]")
            return BoxUpdate(frame, event, self.unary())
        if kind == "ident":
            self.next()
            if v in ("P", "B") and self.peek()[1] == "[":
                self.next()
                agent = self.ident("agent name")
                self.expect("]")
                sub = self.unary()
                return Possible(agent, sub) if v == "P" else Belief(agent, sub)
            if v == "true":
                return TOP
            if v == "false":
                return BOT
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                # only an atom when followed by an identifier and ',' or ')'
                if self.peek(1)[0] == "ident" and self.peek(2)[1] in (",", ")"):
                    self.next()
                    args = [self.ident("agent name")]
                    while self.peek()[1] == ",":
                        self.next()
                        args.append(self.ident("agent name"))
                    self.expect(")")
                    return Atom(v, tuple(args))
            return Atom(v)
        raise FormulaSyntaxError(f"unexpected {v or 'end of input'!r}", pos, self.text)


def parse_formula(text: str, signature: Mapping[str, int] | None = None) -> Formula:
    """Parse ``text`` into a normalised formula.

    With a ``signature`` (predicate -> arity), unknown predicates and arity
    mismatches raise :class:`SignatureError`.  Frame names are not resolved
    here.
    """
    f = _Parser(text).parse()
    if signature is not None:
        check_signature(f, signature)
    return f


# -- printer -----------------------------------------------------------------

def print_formula(f: Formula) -> str:
    """Render ``f`` so that :func:`parse_formula` gives back the same tree.

    Binary connectives are always parenthesised; sugar is recovered where the
    core shape matches it exactly.
    """
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Atom):
        return f.key
    if isinstance(f, And):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Possible):
        return f"P[{f.agent}] {print_formula(f.sub)}"
    if isinstance(f, DiamondUpdate):
        return f"<{f.frame}@{f.event}> {print_formula(f.sub)}"
    if isinstance(f, DiamondUnion):
        inner = " + ".join(f"{a}@{b}" for a, b in f.pointed)
        return f"<{inner}> {print_formula(f.sub)}"
    # Not
    g = f.sub
    if isinstance(g, Top):
        return "false"
    if isinstance(g, Possible) and isinstance(g.sub, Not):
        return f"B[{g.agent}] {print_formula(g.sub.sub)}"
    if isinstance(g, DiamondUpdate) and isinstance(g.sub, Not):
        return f"[{g.frame}@{g.event}] {print_formula(g.sub.sub)}"
    if isinstance(g, And) and isinstance(g.right, Not):
        left = print_formula(g.left)
        # ~(~a & ~b) reads as a disjunction unless ~a itself prints as sugar
        if left.startswith("~"):
            return f"({left[1:]} | {print_formula(g.right.sub)})"
        return f"({left} -> {print_formula(g.right.sub)})"
    return f"~{print_formula(g)}"
