"""Belief-intention databases: strong beliefs plus time-stamped intentions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple

import numpy as np

from .errors import HorizonError, UniverseMismatchError
from .formula import (
    BOTTOM, TOP, AtomAt, DoAt, Formula, Label, Pre, Vocabulary, conj, Diamond,
    disj, is_strong_belief, label_text,
)
from .solver import MsbSet, Universe, characteristic_formula, models_of_strong

Intention = Tuple[Label, int]


class IntentionDatabase:
    """A set of ``(action, time)`` pairs with at most one action per time."""

    __slots__ = ("_items",)

    def __init__(self, intentions: Iterable[Intention] = ()):
        items = frozenset((a, int(t)) for a, t in intentions)
        times = [t for _, t in items]
        if len(times) != len(set(times)):
            raise ValueError("at most one intention per time point")
        if any(t < 0 for t in times):
            raise ValueError("intention times are natural numbers")
        self._items = items

    @property
    def items(self) -> FrozenSet[Intention]:
        return self._items

    def __iter__(self) -> Iterator[Intention]:
        return iter(sorted(self._items, key=lambda x: x[1]))

    def __len__(self):
        return len(self._items)

    def __contains__(self, i):
        return i in self._items

    def __eq__(self, other):
        if isinstance(other, IntentionDatabase):
            return self._items == other._items
        if isinstance(other, (set, frozenset)):
            return self._items == other
        return NotImplemented

    def __hash__(self):
        return hash(self._items)

    def __le__(self, other):
        return self._items <= IntentionDatabase.of(other)._items

    def __lt__(self, other):
        return self._items < IntentionDatabase.of(other)._items

    @classmethod
    def of(cls, x) -> "IntentionDatabase":
        return x if isinstance(x, IntentionDatabase) else cls(x)

    def at(self, t: int) -> Optional[Label]:
        for a, s in self._items:
            if s == t:
                return a
        return None

    def can_add(self, i: Intention) -> bool:
        return self.at(i[1]) is None or i in self._items

    def add(self, i: Intention) -> "IntentionDatabase":
        return IntentionDatabase(self._items | {i})

    def union_ok(self, i: Optional[Intention]) -> bool:
        """Is ``I ∪ {i}`` still an intention database?"""
        return i is None or self.can_add(i)

    def max_time(self) -> int:
        return max((t for _, t in self._items), default=-1)

    def __repr__(self):
        body = ", ".join(f"({label_text(a)},{t})" for a, t in self)
        return "{" + body + "}"

    def to_text(self) -> str:
        return "{" + ", ".join(f"{label_text(a)}@{t}" for a, t in self) + "}"


EMPTY = IntentionDatabase()


def check_intentions(I: IntentionDatabase, horizon: int) -> None:
    if I.max_time() >= horizon:
        raise HorizonError(f"intention at time {I.max_time()} is not below horizon {horizon}")


def cohere_formula(I, vocab: Vocabulary, atoms=None) -> Formula:
    """``<>@0`` of the disjunction of ``pre(seq)@t_min`` over every way of
    filling the unintended slots between the first and last intention.

    With ``atoms`` given, disjuncts whose ``pre`` atom lies outside that set
    are dropped: such an atom is false in every state of the universe.
    """
    I = IntentionDatabase.of(I)
    if not len(I):
        return TOP
    items = list(I)
    t_min, t_max = items[0][1], items[-1][1]
    slots = []
    for t in range(t_min, t_max + 1):
        a = I.at(t)
        slots.append((a,) if a is not None else vocab.labels)
    disjuncts = []
    for seq in itertools.product(*slots):
        atom = Pre(tuple(seq))
        if atoms is not None and atom not in atoms:
            continue
        disjuncts.append(AtomAt(atom, t_min))
    return Diamond(0, disj(disjuncts))


@dataclass(eq=False)
class BeliefIntentionDatabase:
    """Strong beliefs (as an msb set of a universe, with a formula on demand)
    and an intention database."""

    universe: Universe
    models: MsbSet
    intentions: IntentionDatabase = field(default_factory=IntentionDatabase)
    _beliefs: Optional[Formula] = None

    def __post_init__(self):
        if self.models.universe is not self.universe:
            raise UniverseMismatchError("belief models come from another universe")
        self.intentions = IntentionDatabase.of(self.intentions)
        check_intentions(self.intentions, self.universe.horizon)

    @classmethod
    def from_formula(cls, beliefs: Formula, intentions=(), universe: Universe = None) -> "BeliefIntentionDatabase":
        if not is_strong_belief(beliefs):
            raise ValueError(f"beliefs must be a strong belief formula: {beliefs}")
        return cls(universe, models_of_strong(beliefs, universe), IntentionDatabase.of(intentions), beliefs)

    @property
    def beliefs(self) -> Formula:
        """A strong formula with exactly ``models`` as its trees."""
        if self._beliefs is None:
            self._beliefs = characteristic_formula(self.models)
        return self._beliefs

    @property
    def has_formula(self) -> bool:
        return self._beliefs is not None

    @property
    def vocab(self) -> Vocabulary:
        return self.universe.vocab

    def with_intentions(self, intentions) -> "BeliefIntentionDatabase":
        return BeliefIntentionDatabase(self.universe, self.models, IntentionDatabase.of(intentions), self._beliefs)

    def __repr__(self):
        return f"BeliefIntentionDatabase(models={self.models!r}, intentions={self.intentions!r})"


# ---------------------------------------------------------------------------
# Coherence and weak beliefs
# ---------------------------------------------------------------------------

def cohere_trees(I, u: Universe) -> np.ndarray:
    """Trees of ``u`` on which ``Cohere(I)`` holds."""
    I = IntentionDatabase.of(I)
    check_intentions(I, u.horizon)
    if not len(I):
        return np.ones(len(u.trees), dtype=bool)
    f = cohere_formula(I, u.vocab, set(u.atoms))
    return u.tree_mask(f)


def coherent_with(models: MsbSet, I) -> bool:
    return bool(np.any(models.mask & cohere_trees(I, models.universe)))


def is_coherent(db: BeliefIntentionDatabase) -> bool:
    return coherent_with(db.models, db.intentions)


def _weak_mask(db: BeliefIntentionDatabase) -> np.ndarray:
    u = db.universe
    do = [DoAt(a, t) for a, t in db.intentions]
    return db.models.model_mask() & u.eval_all(do)


def weak_beliefs(db: BeliefIntentionDatabase) -> Formula:
    return conj([db.beliefs] + [DoAt(a, t) for a, t in db.intentions])


def weak_beliefs_entails(db: BeliefIntentionDatabase, f: Formula) -> bool:
    """Beliefs together with ``do(a)@t`` for each intention entail ``f``."""
    return not np.any(_weak_mask(db) & ~db.universe.eval(f))


def weak_beliefs_consistent(db: BeliefIntentionDatabase) -> bool:
    return bool(np.any(_weak_mask(db)))
