"""Formulas of the time-indexed action logic and its multi-agent variant.

The core AST has five node kinds: ``AtomAt``, ``DoAt``, ``Box``, ``And`` and
``Not``.  Everything else (``Or``, ``Implies``, ``Diamond``, ``TOP``,
``BOTTOM``) is built from those at construction time, so two formulas are
equal exactly when their core trees are equal.

Actions are plain strings in the single-agent logic.  With more than one
agent every transition label is an *action profile*, a tuple holding one
action per agent.  The term *label* covers both.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple, Union

from .errors import ParseError

Label = Union[str, Tuple[str, ...]]


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    """Actions, plain propositions, number of agents and the horizon."""

    actions: Tuple[str, ...]
    plain_props: Tuple[str, ...] = ()
    agent_count: int = 1
    horizon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "plain_props", tuple(self.plain_props))
        if not self.actions:
            raise ValueError("vocabulary needs at least one action")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("duplicate action names")
        if len(set(self.plain_props)) != len(self.plain_props):
            raise ValueError("duplicate proposition names")
        clash = set(self.actions) & set(self.plain_props)
        if clash:
            raise ValueError(f"names used both as action and proposition: {sorted(clash)}")
        if self.agent_count < 1:
            raise ValueError("agent_count must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")

    @property
    def is_multiagent(self) -> bool:
        return self.agent_count > 1

    @property
    def labels(self) -> Tuple[Label, ...]:
        """All transition labels in canonical order."""
        if self.agent_count == 1:
            return self.actions
        return tuple(itertools.product(self.actions, repeat=self.agent_count))

    def label_index(self, label: Label) -> int:
        if self.agent_count == 1:
            return self.actions.index(label)
        idx = 0
        for a in label:
            idx = idx * len(self.actions) + self.actions.index(a)
        return idx

    def is_label(self, label) -> bool:
        if self.agent_count == 1:
            return isinstance(label, str) and label in self.actions
        return (isinstance(label, tuple) and len(label) == self.agent_count
                and all(a in self.actions for a in label))

    def profile(self, *actions: str) -> Label:
        """Build a label from one action per agent (a bare action if n == 1)."""
        if len(actions) != self.agent_count:
            raise ValueError(f"expected {self.agent_count} actions, got {len(actions)}")
        for a in actions:
            if a not in self.actions:
                raise ValueError(f"unknown action {a!r}")
        return actions[0] if self.agent_count == 1 else tuple(actions)

    def with_horizon(self, horizon: int) -> "Vocabulary":
        return Vocabulary(self.actions, self.plain_props, self.agent_count, horizon)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Prop:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Pre:
    actions: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions:
            raise ValueError("pre() needs a non-empty action sequence")

    def __str__(self):
        return "pre(" + ",".join(_label_text(a, nested=True) for a in self.actions) + ")"


@dataclass(frozen=True, order=True)
class Post:
    action: Label

    def __str__(self):
        return "post(" + _label_text(self.action) + ")"


Atom = Union[Prop, Pre, Post]

# The proposition used to spell out falsum, p0 & !p0.
FALSUM_PROP = Prop("p0")


def _label_text(label: Label, nested: bool = False) -> str:
    if isinstance(label, str):
        return label
    body = "|".join(label)
    return f"({body})" if nested else body


def atom_sort_key(atom: Atom):
    kind = {Prop: 0, Pre: 1, Post: 2}[type(atom)]
    if isinstance(atom, Prop):
        return (kind, 0, atom.name)
    if isinstance(atom, Pre):
        return (kind, len(atom.actions), str(atom))
    return (kind, 0, str(atom))


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------

class Formula:
    """Base class of the five core node kinds."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self):
        return to_text(self)


def _cached_hash(cls):
    # Formulas are used as dictionary keys for memoised evaluation; hashing a
    # deep tree on every lookup would be quadratic, so the hash is kept.
    names = tuple(cls.__dataclass_fields__)
    tag = cls.__name__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((tag,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


@_cached_hash
@dataclass(frozen=True, eq=True)
class AtomAt(Formula):
    atom: Atom
    t: int


@_cached_hash
@dataclass(frozen=True, eq=True)
class DoAt(Formula):
    action: Label
    t: int


@_cached_hash
@dataclass(frozen=True, eq=True)
class Box(Formula):
    t: int
    sub: Formula


@_cached_hash
@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula


@_cached_hash
@dataclass(frozen=True, eq=True)
class Not(Formula):
    sub: Formula


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def Diamond(t: int, sub: Formula) -> Formula:
    return Not(Box(t, Not(sub)))


BOTTOM: Formula = And(AtomAt(FALSUM_PROP, 0), Not(AtomAt(FALSUM_PROP, 0)))
TOP: Formula = Not(BOTTOM)


def conj(items: Iterable[Formula], balanced: bool = False) -> Formula:
    """Conjunction of ``items``; ``TOP`` when empty.

    Left-nested by default (what the parser produces for ``a & b & c``);
    ``balanced=True`` keeps the depth logarithmic for very long lists.
    """
    items = list(items)
    if not items:
        return TOP
    if balanced:
        return _balanced(items, And)
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items: Iterable[Formula], balanced: bool = False) -> Formula:
    """Disjunction of ``items``; ``BOTTOM`` when empty."""
    items = list(items)
    if not items:
        return BOTTOM
    if balanced:
        return _balanced(items, Or)
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def _balanced(items, op):
    while len(items) > 1:
        nxt = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def prop(name: str, t: int) -> Formula:
    return AtomAt(Prop(name), t)


def pre(*actions: Label, t: int) -> Formula:
    return AtomAt(Pre(tuple(actions)), t)


def post(action: Label, t: int) -> Formula:
    return AtomAt(Post(action), t)


# ---------------------------------------------------------------------------
# Traversal and syntactic classifiers
# ---------------------------------------------------------------------------

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over all subformulas (iterative)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Not, Box)):
            stack.append(g.sub)


def atoms_of(f: Formula) -> set:
    return {g.atom for g in subformulas(f) if isinstance(g, AtomAt)}


def labels_of(f: Formula) -> set:
    out = set()
    for g in subformulas(f):
        if isinstance(g, DoAt):
            out.add(g.action)
        elif isinstance(g, AtomAt):
            if isinstance(g.atom, Pre):
                out.update(g.atom.actions)
            elif isinstance(g.atom, Post):
                out.add(g.atom.action)
    return out


def max_time(f: Formula) -> Tuple[int, int]:
    """Return ``(largest time index, evaluation depth needed)``.

    A do-statement at ``t`` talks about the transition into ``t + 1``, so it
    needs one more level of the tree than an atom or a box at ``t``.
    """
    # memoised on the nodes: large formulas share most of their subtrees
    stack = [f]
    while stack:
        g = stack[-1]
        if "_mt" in g.__dict__:
            stack.pop()
            continue
        kids = _children(g)
        todo = [k for k in kids if "_mt" not in k.__dict__]
        if todo:
            stack.extend(todo)
            continue
        stack.pop()
        if isinstance(g, DoAt):
            own = (g.t, g.t + 1)
        elif isinstance(g, AtomAt):
            own = (g.t, g.t)
        else:
            own = (g.t, g.t) if isinstance(g, Box) else (0, 0)
            for k in kids:
                km = k.__dict__["_mt"]
                own = (max(own[0], km[0]), max(own[1], km[1]))
        object.__setattr__(g, "_mt", own)
    return f.__dict__["_mt"]


def _children(g: Formula) -> tuple:
    if isinstance(g, And):
        return (g.left, g.right)
    if isinstance(g, (Not, Box)):
        return (g.sub,)
    return ()


def needed_depth(f: Formula) -> int:
    return max_time(f)[1]


def in_past(f: Formula, t: int) -> bool:
    """Membership in the set of formulas settled by time ``t``.

    Atoms and boxes indexed ``<= t`` are settled, and so is ``do(a)`` at
    ``t' - 1`` for ``t' <= t``; boolean combinations of settled formulas are
    settled.  What sits under a box is irrelevant.
    """
    if isinstance(f, AtomAt):
        return f.t <= t
    if isinstance(f, DoAt):
        return f.t + 1 <= t
    if isinstance(f, Box):
        return f.t <= t
    if isinstance(f, Not):
        return in_past(f.sub, t)
    if isinstance(f, And):
        return in_past(f.left, t) and in_past(f.right, t)
    raise TypeError(f"not a formula: {f!r}")


def is_strong_belief(f: Formula) -> bool:
    """True for boolean combinations of ``[]@0``-rooted formulas.

    ``TOP`` and ``BOTTOM`` count as the empty combinations.
    """
    if f == TOP or f == BOTTOM:
        return True
    if isinstance(f, Box):
        return f.t == 0
    if isinstance(f, Not):
        return is_strong_belief(f.sub)
    if isinstance(f, And):
        return is_strong_belief(f.left) and is_strong_belief(f.right)
    return False


def contiguous_subsequences(seq: Sequence) -> Iterator[tuple]:
    n = len(seq)
    for j in range(n):
        for k in range(j + 1, n + 1):
            yield tuple(seq[j:k])


def close_atoms(atoms: Iterable[Atom]) -> set:
    """Closure under the relevant-proposition rules.

    ``p`` stays ``p``; ``post(a)`` brings ``pre(a)``; ``pre(a1..an)`` brings
    ``pre`` of every contiguous piece and ``post`` of every member.
    """
    out = set()
    for atom in atoms:
        if atom == FALSUM_PROP:
            continue
        if isinstance(atom, Prop):
            out.add(atom)
        elif isinstance(atom, Post):
            out.update((Pre((atom.action,)), atom))
        elif isinstance(atom, Pre):
            for piece in contiguous_subsequences(atom.actions):
                out.add(Pre(piece))
                out.add(Post(piece[0]))
        else:
            raise TypeError(f"not an atom: {atom!r}")
    return out


def relevant_props(f: Formula) -> set:
    return close_atoms(atoms_of(f))


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

# Binding strength: unary > & > | > ->
_IMP, _OR, _AND, _UNARY = 1, 2, 3, 4


def to_text(f: Formula) -> str:
    return _show(f)[0]


def _show(f: Formula):
    if f == TOP:
        return "true", _UNARY
    if f == BOTTOM:
        return "false", _UNARY
    if isinstance(f, AtomAt):
        return f"{f.atom}@{f.t}", _UNARY
    if isinstance(f, DoAt):
        return f"do({_label_text(f.action)})@{f.t}", _UNARY
    if isinstance(f, Box):
        return f"[]@{f.t} {_wrap(f.sub, _UNARY)}", _UNARY
    if isinstance(f, Not):
        g = f.sub
        if isinstance(g, Box) and isinstance(g.sub, Not):
            return f"<>@{g.t} {_wrap(g.sub.sub, _UNARY)}", _UNARY
        if isinstance(g, And) and isinstance(g.left, Not) and isinstance(g.right, Not):
            return f"{_wrap(g.left.sub, _OR)} | {_wrap(g.right.sub, _AND)}", _OR
        if isinstance(g, And) and isinstance(g.right, Not):
            return f"{_wrap(g.left, _OR)} -> {_wrap(g.right.sub, _IMP)}", _IMP
        return f"!{_wrap(g, _UNARY)}", _UNARY
    if isinstance(f, And):
        return f"{_wrap(f.left, _AND)} & {_wrap(f.right, _UNARY)}", _AND
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, level: int) -> str:
    text, own = _show(f)
    return text if own >= level else f"({text})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class FormulaSyntaxError(ParseError):
    """Malformed formula text; ``pos`` is a character offset."""


_PUNCT = ("->", "[]", "<>", "(", ")", ",", "|", "&", "!", "@")


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append((p, p, i))
                i += len(p)
                break
        else:
            if c.isalpha() or c == "_":
                j = i + 1
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(("id", text[i:j], i))
                i = j
            elif c.isdigit():
                j = i + 1
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(("num", text[i:j], i))
                i = j
            else:
                raise FormulaSyntaxError(f"unexpected character {c!r}", i, text)
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.text = text
        self.vocab = vocab
        self.toks = _tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str = None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "identifier" if kind == "id" else "number" if kind == "num" else repr(kind)
            got = "end of input" if tok[0] == "eof" else repr(tok[1])
            self.error(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def error(self, message: str, pos: int):
        raise FormulaSyntaxError(message, pos, self.text)

    # grammar
    def parse(self) -> Formula:
        f = self.implication()
        tok = self.peek()
        if tok[0] != "eof":
            self.error(f"unexpected {tok[1]!r}", tok[2])
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek()[0] == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek()[0] == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind in ("[]", "<>"):
            self.take()
            t = self.time()
            sub = self.unary()
            return Box(t, sub) if kind == "[]" else Diamond(t, sub)
        if kind == "(":
            self.take()
            f = self.implication()
            self.take(")")
            return f
        if kind == "id":
            return self.atomic()
        if kind == "eof":
            self.error("unexpected end of input", pos)
        self.error(f"unexpected {value!r}", pos)

    def time(self) -> int:
        at = self.take("@")
        tok = self.peek()
        if tok[0] != "num":
            self.error("malformed time index", tok[2] if tok[0] != "eof" else at[2] + 1)
        self.take()
        if self.peek()[0] == "id" and self.peek()[2] == tok[2] + len(tok[1]):
            self.error("malformed time index", tok[2])
        return int(tok[1])

    def atomic(self) -> Formula:
        _, name, pos = self.take("id")
        if name == "true":
            return TOP
        if name == "false":
            return BOTTOM
        if name in ("do", "pre", "post") and self.peek()[0] == "(":
            self.take("(")
            if name == "do":
                label = self.label()
                self.take(")")
                return DoAt(label, self.time())
            if name == "post":
                label = self.label(allow_parens=True)
                self.take(")")
                return AtomAt(Post(label), self.time())
            seq = [self.label(allow_parens=True)]
            while self.peek()[0] == ",":
                self.take()
                seq.append(self.label(allow_parens=True))
            self.take(")")
            if len(seq) > self.vocab.horizon + 1:
                self.error(f"pre() sequence longer than horizon + 1 ({self.vocab.horizon + 1})", pos)
            return AtomAt(Pre(tuple(seq)), self.time())
        if name not in self.vocab.plain_props and Prop(name) != FALSUM_PROP:
            self.error(f"unknown proposition {name!r}", pos)
        return AtomAt(Prop(name), self.time())

    def action(self) -> str:
        _, name, pos = self.take("id")
        if name not in self.vocab.actions:
            self.error(f"unknown action {name!r}", pos)
        return name

    def label(self, allow_parens: bool = False) -> Label:
        n = self.vocab.agent_count
        if n == 1:
            return self.action()
        pos = self.peek()[2]
        wrapped = allow_parens and self.peek()[0] == "("
        if wrapped:
            self.take()
        parts = [self.action()]
        while self.peek()[0] == "|":
            self.take()
            parts.append(self.action())
        if wrapped:
            self.take(")")
        if len(parts) != n:
            self.error(f"action profile needs {n} actions, got {len(parts)}", pos)
        return tuple(parts)


def parse(text: str, vocab: Vocabulary) -> Formula:
    """Parse formula text such as ``"pre(food)@0 & do(nop)@0"``."""
    return _Parser(text, vocab).parse()


def parse_atom(text: str, vocab: Vocabulary) -> Atom:
    """Parse an atom written without a time index, e.g. ``pre(food,cook)``."""
    f = parse(text.strip() + "@0", vocab)
    if not isinstance(f, AtomAt):
        raise FormulaSyntaxError(f"not an atom: {text!r}", 0, text)
    return f.atom


def parse_label(text: str, vocab: Vocabulary) -> Label:
    p = _Parser(text, vocab)
    label = p.label(allow_parens=True)
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return label


def label_text(label: Label) -> str:
    return _label_text(label)


def check_vocabulary(f: Formula, vocab: Vocabulary) -> None:
    """Raise ``ValueError`` if ``f`` mentions names outside ``vocab``."""
    for g in subformulas(f):
        if isinstance(g, DoAt) and not vocab.is_label(g.action):
            raise ValueError(f"unknown action {g.action!r}")
        if isinstance(g, AtomAt):
            atom = g.atom
            if isinstance(atom, Prop):
                if atom.name not in vocab.plain_props and atom != FALSUM_PROP:
                    raise ValueError(f"unknown proposition {atom.name!r}")
            else:
                labels = atom.actions if isinstance(atom, Pre) else (atom.action,)
                for lab in labels:
                    if not vocab.is_label(lab):
                        raise ValueError(f"unknown action {lab!r}")
