import itertools

import numpy as np
import pytest

from paltime import (
    TOP, BeliefIntentionDatabase, HorizonError, IntentionDatabase, Post, Pre, Vocabulary,
    cohere_formula, enumerate_universe, entails, is_coherent, parse, to_text,
    weak_beliefs_consistent, weak_beliefs_entails,
)
from paltime.database import coherent_with
from paltime import scenarios as sc

AB = Vocabulary(("a", "b"), horizon=4)


# --- intention databases -----------------------------------------------------

def test_one_intention_per_time():
    with pytest.raises(ValueError):
        IntentionDatabase([("a", 0), ("b", 0)])
    I = IntentionDatabase([("a", 0), ("b", 2)])
    assert I.at(2) == "b" and I.at(1) is None
    assert not I.can_add(("a", 2))
    assert I.add(("a", 1)) == IntentionDatabase([("a", 0), ("a", 1), ("b", 2)])


def test_intentions_compare_as_sets():
    assert IntentionDatabase([("a", 0)]) <= IntentionDatabase([("a", 0), ("b", 1)])
    assert IntentionDatabase() < IntentionDatabase([("a", 0)])
    assert IntentionDatabase([("a", 1), ("b", 0)]) == IntentionDatabase([("b", 0), ("a", 1)])


# --- Cohere ------------------------------------------------------------------

def test_cohere_fills_gaps():
    f = cohere_formula(IntentionDatabase([("a", 1), ("b", 3)]), AB)
    assert f == parse("<>@0 (pre(a,a,b)@1 | pre(a,b,b)@1)", AB)


def test_cohere_singleton_and_empty():
    assert cohere_formula(IntentionDatabase([("a", 2)]), AB) == parse("<>@0 pre(a)@2", AB)
    assert cohere_formula(IntentionDatabase(), AB) == TOP
    assert to_text(cohere_formula(IntentionDatabase(), AB)) == "true"


def test_cohere_without_gaps_is_one_sequence():
    f = cohere_formula(IntentionDatabase([("b", 0), ("a", 1)]), AB)
    assert f == parse("<>@0 pre(b,a)@0", AB)


# --- coherence on the shopping tree ------------------------------------------

def test_shopping_coherence():
    assert is_coherent(sc.shopping_database((("food", 0), ("cook", 1))))
    assert not is_coherent(sc.shopping_database((("food", 0), ("equip", 1))))


def test_unsatisfiable_beliefs_incoherent():
    u = sc.shopping_universe()
    db = BeliefIntentionDatabase.from_formula(parse("[]@0 false", sc.SHOPPING), (), u)
    assert not is_coherent(db)
    assert not weak_beliefs_consistent(db)


def test_intention_at_horizon_refused():
    with pytest.raises(HorizonError):
        sc.shopping_database((("food", 2),))


def test_beliefs_must_be_strong():
    with pytest.raises(ValueError):
        BeliefIntentionDatabase.from_formula(parse("do(food)@0", sc.SHOPPING), (), sc.shopping_universe())


# --- weak beliefs ------------------------------------------------------------

@pytest.mark.parametrize("text", ["do(food)@0 & do(cook)@1", "!do(equip)@1"])
def test_weak_beliefs_of_shopping(text):
    db = sc.shopping_database((("food", 0), ("cook", 1)))
    assert weak_beliefs_entails(db, parse(text, sc.SHOPPING))


def test_weak_beliefs_do_not_leak_into_strong():
    db = sc.shopping_database((("food", 0), ("cook", 1)))
    assert not weak_beliefs_entails(db, parse("[]@0 do(food)@0", sc.SHOPPING))


def test_post_follows_intention():
    vocab = Vocabulary(("a", "b"), horizon=2)
    u = enumerate_universe(vocab, 2, [Pre(("a",)), Post("a")])
    for t in (0, 1):
        db = BeliefIntentionDatabase.from_formula(TOP, [("a", t)], u)
        assert weak_beliefs_entails(db, parse(f"post(a)@{t + 1}", vocab))


def test_wb_consistent_but_incoherent():
    db = sc.shopping_database((("food", 0), ("equip", 1)))
    assert weak_beliefs_consistent(db)
    assert not is_coherent(db)


def test_wb_direct_contradiction():
    vocab = Vocabulary(("a", "b"), horizon=1)
    u = enumerate_universe(vocab, 1, [Pre(("a",))])
    db = BeliefIntentionDatabase.from_formula(parse("!<>@0 do(a)@0", vocab), [("a", 0)], u)
    assert not weak_beliefs_consistent(db)


def test_empty_intentions_reduce_to_entails():
    vocab = Vocabulary(("a", "b"), horizon=1)
    u = enumerate_universe(vocab, 1, [Pre(("a",)), Post("b")])
    psi = parse("[]@0 pre(a)@0", vocab)
    db = BeliefIntentionDatabase.from_formula(psi, (), u)
    for text in ["<>@0 do(a)@0", "do(a)@0", "post(b)@1 | do(a)@0", "pre(a)@0"]:
        f = parse(text, vocab)
        assert weak_beliefs_entails(db, f) == entails([psi], f, u)


# --- lemma-level properties on a small universe ------------------------------

@pytest.fixture(scope="module")
def small():
    vocab = Vocabulary(("a", "b"), horizon=2)
    u = enumerate_universe(vocab, 2, [Pre(("a",)), Pre(("b",))])
    return u.restrict(range(0, len(u.trees), max(1, len(u.trees) // 10))[:10])


def _dbs(vocab, horizon):
    for choice in itertools.product([None] + list(vocab.actions), repeat=horizon):
        yield IntentionDatabase((a, t) for t, a in enumerate(choice) if a is not None)


def test_coherence_monotone_and_implies_wb(small):
    rng = np.random.default_rng(1)
    dbs = list(_dbs(small.vocab, 2))
    for _ in range(60):
        models = small.msb(rng.random(len(small.trees)) < 0.4)
        for I in dbs:
            db = BeliefIntentionDatabase(small, models, I)
            if is_coherent(db):
                assert weak_beliefs_consistent(db)
                assert all(coherent_with(models, J) for J in dbs if J <= I)
