import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paltime import (
    TOP, EpistemicState, IntentionDatabase, ParseError, Pre, SpohnRanking, Vocabulary, bel,
    enumerate_universe, iterated_revise, models_of_strong, parse, spohn_revise,
)
from paltime.iterated import (
    INFINITY, check_theorem_bridge, flatten_bits, format_ranking, parse_ranking, rank_of_formula,
    spohn_bits, spohn_revise_mask, verify_dp,
)
from paltime import scenarios as sc

V = Vocabulary(("a", "b"), horizon=1)


@pytest.fixture(scope="module")
def u():
    return enumerate_universe(V, 1, [Pre(("a",)), Pre(("b",))])


@pytest.fixture(scope="module")
def purchase():
    return sc.purchase_universe(), sc.purchase_ranking()


def P(text):
    return parse(text, V)


# --- rankings ----------------------------------------------------------------

def test_ranking_invariants(u):
    n = len(u.trees)
    with pytest.raises(ValueError):
        SpohnRanking(u, np.ones(n, dtype=int))
    with pytest.raises(ValueError):
        SpohnRanking(u, np.full(n, -1))
    with pytest.raises(ValueError):
        SpohnRanking(u, [0])


def test_uniform_ranking_believes_everything(u):
    k = SpohnRanking(u, np.zeros(len(u.trees), dtype=int))
    assert bel(k) == u.all_trees()


def test_unique_minimum_gives_singleton(u):
    ranks = np.ones(len(u.trees), dtype=int)
    ranks[3] = 0
    assert bel(SpohnRanking(u, ranks)).indices.tolist() == [3]


def test_rank_of_formula(u):
    k = SpohnRanking.from_formula(P("[]@0 pre(a)@0"), u)
    assert rank_of_formula(k, P("[]@0 pre(a)@0")) == 0
    assert rank_of_formula(k, P("[]@0 !pre(a)@0")) == 1
    assert rank_of_formula(k, P("[]@0 false")) == INFINITY
    assert math.isinf(INFINITY)


def test_revision_by_unsatisfiable_refused(u):
    k = SpohnRanking.from_formula(TOP, u)
    with pytest.raises(ValueError):
        spohn_revise(k, P("[]@0 false"))


def test_ranking_text_round_trip(u):
    ranks = np.arange(len(u.trees)) % 3
    k = SpohnRanking(u, ranks)
    assert parse_ranking(format_ranking(k), u) == k


def test_ranking_text_errors(u):
    with pytest.raises(ParseError):
        parse_ranking("RANK 0: 0\nRANK 1: 0", u)
    with pytest.raises(ParseError):
        parse_ranking("RANK 0: 0", u)
    with pytest.raises(ParseError):
        parse_ranking(f"RANK 0: {len(u.trees)}", u)
    with pytest.raises(ParseError):
        parse_ranking("RANK one: 0", u)
    assert parse_ranking("# only one listed\nRANK 0: 1", u, default=4).ranks[0] == 4


# --- the purchase example ----------------------------------------------------

def test_purchase_initial_beliefs(purchase):
    u, k = purchase
    assert bel(k) == models_of_strong(parse(sc.BOTH, sc.PURCHASE), u)
    assert rank_of_formula(k, parse(sc.EITHER, sc.PURCHASE)) == 1
    assert rank_of_formula(k, parse(sc.NEITHER, sc.PURCHASE)) == 3


def test_purchase_revision(purchase):
    u, k = purchase
    state = EpistemicState(k, IntentionDatabase(sc.PURCHASE_INTENTIONS))
    out = iterated_revise(state, parse(sc.NOT_BOTH, sc.PURCHASE))
    assert out.beliefs() == models_of_strong(parse(sc.EITHER, sc.PURCHASE), u)
    assert set(out.intentions) == {("food", 0)}
    # the later intention is the one given up
    latest = iterated_revise(state, parse(sc.NOT_BOTH, sc.PURCHASE), selector="latest_first")
    assert set(latest.intentions) == {("equip", 1)}


# --- single revisions ---------------------------------------------------------

def test_revision_by_true_changes_nothing(u):
    k = SpohnRanking(u, np.arange(len(u.trees)) % 2)
    I = IntentionDatabase([("a", 0)])
    state = EpistemicState(k, I)
    if not state.beliefs().is_empty():
        out = iterated_revise(state, TOP)
        assert out.ranking == k
        from paltime.database import coherent_with
        if coherent_with(bel(k), I):
            assert out.intentions == I


def test_accepted_input_keeps_beliefs(u):
    k = SpohnRanking.from_formula(P("[]@0 pre(a)@0 & []@0 pre(b)@0"), u)
    k2 = spohn_revise(k, P("[]@0 pre(a)@0"))
    assert bel(k2) == bel(k)


def test_iterated_c1_instance(u):
    # phi entails phi2: revising by phi2 first does not matter
    k = SpohnRanking(u, np.arange(len(u.trees)) % 4)
    phi, phi2 = P("[]@0 pre(a)@0 & []@0 pre(b)@0"), P("[]@0 pre(a)@0")
    s = EpistemicState(k, IntentionDatabase())
    twice = iterated_revise(iterated_revise(s, phi2), phi)
    once = iterated_revise(s, phi)
    assert twice.beliefs() == once.beliefs()


def test_input_must_be_strong(u):
    s = EpistemicState(SpohnRanking.from_formula(TOP, u))
    with pytest.raises(ValueError):
        iterated_revise(s, P("do(a)@0"))


# --- properties --------------------------------------------------------------

@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.data())
@settings(max_examples=200)
def test_revised_beliefs_are_minimal_models(ranks, data):
    if 0 not in ranks:
        ranks[0] = 0
    n = len(ranks)
    phi = data.draw(st.integers(1, (1 << n) - 1))
    out = spohn_bits(tuple(ranks), phi)
    assert min(out) == 0
    models = [r for k, r in enumerate(ranks) if phi >> k & 1]
    best = min(models)
    got = {k for k, r in enumerate(out) if r == 0}
    assert got == {k for k, r in enumerate(ranks) if phi >> k & 1 and r == best}


def test_mask_revision_matches_bits(u):
    rng = np.random.default_rng(3)
    for _ in range(40):
        ranks = rng.integers(0, 4, len(u.trees))
        ranks[rng.integers(len(u.trees))] = 0
        mask = rng.random(len(u.trees)) < 0.3
        if not mask.any():
            continue
        k = SpohnRanking(u, ranks)
        bits = sum(1 << int(i) for i in np.flatnonzero(mask))
        assert tuple(spohn_revise_mask(k, mask).ranks) == spohn_bits(tuple(int(x) for x in ranks), bits)


def test_theorem_bridge(u):
    assert check_theorem_bridge(u, samples=100)


# --- Darwiche-Pearl verifier ---------------------------------------------------

def test_dp_suite_passes(u):
    report = verify_dp(u, samples=300, sub_count=1, sub_size=3)
    assert report.ok, "\n".join(report.lines())


def test_flattening_operator_breaks_c2(u):
    report = verify_dp(u, operator=flatten_bits, samples=300, sub_count=1, sub_size=3)
    assert report.violation_count("C2") > 0
    assert not report.ok
