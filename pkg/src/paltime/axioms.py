"""Soundness of the axiom schemas over enumerated bounded models.

Each schema is instantiated with the atoms and actions of a universe and
with a pool of small formulas; an instance passes when it is true in every
model of the universe.  Instances whose time indices would reach past the
horizon are not generated.
"""
from __future__ import annotations

import random
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .formula import (
    AtomAt, Box, DoAt, Formula, Implies, Not, Or, Post, Pre, Prop, Vocabulary, And, Diamond, disj,
    in_past, needed_depth, to_text,
)
from .revision import PostulateReport
from .solver import DEFAULT_CAP, Universe, enumerate_universe

AXIOM_IDS = ("PROP", "K", "T", "5") + tuple(f"A{k}" for k in range(1, 13))


def formula_pool(u: Universe, size: int = 40, seed: int = 0) -> List[Formula]:
    """Atoms and do-statements at every time, plus random combinations."""
    H = u.horizon
    base: List[Formula] = []
    for t in range(H + 1):
        base += [AtomAt(a, t) for a in u.atoms]
    for t in range(H):
        base += [DoAt(a, t) for a in u.vocab.labels]
    rng = random.Random(seed)
    pool = list(base)
    while len(pool) < len(base) + size:
        pool.append(_random_formula(rng, base, H, 3))
    return pool


def _random_formula(rng, base, H, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(base)
    kind = rng.randrange(4)
    if kind == 0:
        return Not(_random_formula(rng, base, H, depth - 1))
    if kind == 1:
        return And(_random_formula(rng, base, H, depth - 1), _random_formula(rng, base, H, depth - 1))
    if kind == 2:
        return Or(_random_formula(rng, base, H, depth - 1), _random_formula(rng, base, H, depth - 1))
    return Box(rng.randrange(H + 1), _random_formula(rng, base, H, depth - 1))


def axiom_instances(u: Universe, pool: Sequence[Formula]):
    """Yield ``(schema id, instance)`` pairs."""
    H = u.horizon
    atoms = set(u.atoms)
    labels = u.vocab.labels
    pairs = list(zip(pool, pool[1:] + pool[:1]))
    for f in pool:
        yield "PROP", Or(f, Not(f))
        yield "PROP", Implies(f, Or(f, pool[0]))
    for t in range(H + 1):
        for f, g in pairs:
            yield "K", Implies(Box(t, Implies(f, g)), Implies(Box(t, f), Box(t, g)))
        for f in pool:
            yield "T", Implies(Box(t, f), f)
            yield "5", Implies(Diamond(t, f), Box(t, Diamond(t, f)))
        for x in u.atoms:
            yield "A1", Implies(AtomAt(x, t), Box(t, AtomAt(x, t)))
            yield "A2", Implies(Diamond(t, AtomAt(x, t)), AtomAt(x, t))
        for x in atoms:
            # pre(s, b) -> pre(s)
            if isinstance(x, Pre) and len(x.actions) > 1 and Pre(x.actions[:-1]) in atoms:
                yield "A11", Implies(AtomAt(x, t), AtomAt(Pre(x.actions[:-1]), t))
    for t in range(H):
        for f in pool:
            yield "A5", Implies(Box(t, f), Box(t + 1, f))
        yield "A6", disj([DoAt(a, t) for a in labels])
        for a in labels:
            do = DoAt(a, t)
            yield "A3", Implies(do, Box(t + 1, do))
            yield "A4", Implies(Diamond(t + 1, do), do)
            for b in labels:
                if b != a:
                    yield "A7", Implies(do, Not(DoAt(b, t)))
            if Post(a) in atoms:
                yield "A8", Implies(do, AtomAt(Post(a), t + 1))
            if Pre((a,)) in atoms:
                yield "A9", Implies(AtomAt(Pre((a,)), t), Diamond(t, do))
            for f in pool:
                if in_past(f, t + 1):
                    yield "A12", Implies(And(do, f), Box(t, Implies(do, f)))
        for x in atoms:
            if isinstance(x, Pre) and len(x.actions) > 1 and Pre(x.actions[1:]) in atoms:
                a = x.actions[0]
                yield "A10", Implies(And(AtomAt(x, t), DoAt(a, t)), AtomAt(Pre(x.actions[1:]), t + 1))


def check_axioms(u: Universe, report: Optional[PostulateReport] = None, pool: Sequence[Formula] = None,
                 seed: int = 0) -> PostulateReport:
    report = report or PostulateReport(AXIOM_IDS)
    if pool is None:
        pool = formula_pool(u, seed=seed)
    pool = [f for f in pool if needed_depth(f) <= u.horizon]
    for pid, f in axiom_instances(u, pool):
        if needed_depth(f) > u.horizon:
            continue
        values = u.eval(f)
        ok = bool(values.all())
        report.record(pid, ok, lambda f=f, v=values: _cex(u, f, v))
    return report


def _cex(u: Universe, f: Formula, values: np.ndarray) -> str:
    k = int(np.flatnonzero(~values)[0])
    m = u.model(k)
    return f"{to_text(f)} fails on tree {u.index(m.tree)} path {'.'.join(map(str, m.path.actions))}"


def axiom_universes(actions=("a", "b"), horizon: int = 2, cap: int = DEFAULT_CAP,
                    strict_pre: bool = False) -> List[Universe]:
    """Small universes covering every atom kind the schemas mention."""
    vocab = Vocabulary(tuple(actions), ("p",), horizon=horizon)
    a, b = vocab.actions[0], vocab.actions[-1]
    if horizon <= 1:
        sets = [
            [Prop("p"), Pre((a,)), Pre((b,)), Post(a), Post(b)],
            [Pre((a,)), Pre((b,)), Pre((a, b)), Post(a)],
        ]
    else:
        sets = [
            [Prop("p"), Pre((a,))],
            [Pre((a,)), Post(a)],
            [Pre((a,)), Pre((b,)), Pre((a, b))],
        ]
    return [enumerate_universe(vocab, horizon, s, cap=cap, strict_pre=strict_pre) for s in sets]


def verify_axioms(universes: Iterable[Universe] = None, horizon: int = 2, seed: int = 0,
                  **kw) -> PostulateReport:
    report = PostulateReport(AXIOM_IDS)
    if universes is None:
        universes = [u for h in range(1, horizon + 1) for u in axiom_universes(horizon=h, **kw)]
    for u in universes:
        check_axioms(u, report, seed=seed)
    return report


def unrestricted_a12_fails(u: Universe) -> bool:
    """A12 without the Past(t+1) restriction has a false instance
    whenever some node offers two continuations after the same action."""
    if u.horizon < 2:
        return False
    for a in u.vocab.labels:
        for b in u.vocab.labels:
            do, later = DoAt(a, 0), DoAt(b, 1)
            f = Implies(And(do, later), Box(0, Implies(do, later)))
            if not u.eval(f).all():
                return True
    return False
