import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paltime import (
    TOP, And, BeliefIntentionDatabase, FaithfulOrder, IntentionDatabase, Pre, Vocabulary,
    enumerate_universe, is_coherent, models_of_strong, parse, revise, select_intentions,
    verify_postulates,
)
from paltime.database import coherent_with
from paltime.revision import (
    PostulateReport, RevisionInput, drop_old_selector, latest_first_selector,
    probe_joint_vs_separate, temporal_selector,
)
from paltime import scenarios as sc


def selection_conditions(models, I, i, out) -> list:
    """Names of the selection conditions that ``out`` breaks."""
    pool = set(I) | ({i} if i is not None else set())
    bad = []
    if not coherent_with(models, out):
        bad.append("coherent")
    if i is not None and coherent_with(models, [i]) and i not in out:
        bad.append("new kept")
    try:
        union = IntentionDatabase(pool)
    except ValueError:
        union = None
    if union is not None and coherent_with(models, union) and not set(union) <= set(out):
        bad.append("union kept")
    if not set(out) <= pool:
        bad.append("subset")
    rest = pool - set(out)
    for k in range(1, len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            try:
                bigger = IntentionDatabase(set(out) | set(extra))
            except ValueError:
                continue
            if coherent_with(models, bigger):
                bad.append("maximal")
    return bad


# --- worked examples ---------------------------------------------------------

def test_switch_to_equipment():
    db = sc.shopping_database()
    assert set(select_intentions(db.models, db.intentions, ("equip", 1))) == {("equip", 1)}
    out = revise(db, TOP, ("equip", 1))
    assert set(out.intentions) == {("equip", 1)}
    assert out.models == db.models
    assert not out.inconsistent


def test_coherent_union_is_kept():
    db = sc.shopping_database((("food", 0),))
    assert set(select_intentions(db.models, db.intentions, ("cook", 1))) == {("food", 0), ("cook", 1)}


def test_no_new_intention_keeps_coherent_database():
    db = sc.shopping_database()
    assert select_intentions(db.models, db.intentions, None) == db.intentions


def test_joint_revision_dentist():
    db = sc.dentist_database()
    phi = parse(sc.DENTIST_NEWS, sc.DENTIST)
    out = revise(db, phi, sc.DENTIST_NEW_INTENTION)
    assert set(out.intentions) == {("dentist", 0), ("movie", 1)}
    assert out.models == models_of_strong(phi, db.universe)


def test_separate_revision_can_differ():
    db = sc.dentist_database()
    phi = parse(sc.DENTIST_NEWS, sc.DENTIST)
    joint, separate = probe_joint_vs_separate(db, phi, sc.DENTIST_NEW_INTENTION, selector="latest_first")
    assert set(joint) != set(separate)
    # with temporal priority the two routes agree on this input
    joint, separate = probe_joint_vs_separate(db, phi, sc.DENTIST_NEW_INTENTION)
    assert set(joint) == set(separate)


def test_consistent_input_conjoins():
    db = sc.shopping_database((("food", 0),))
    phi = parse("<>@0 do(food)@0", sc.SHOPPING)
    out = revise(db, phi, ("cook", 1))
    assert out.models == db.models & models_of_strong(phi, db.universe)
    assert set(out.intentions) == {("food", 0), ("cook", 1)}


def test_unsatisfiable_input_flags_result():
    db = sc.shopping_database()
    out = revise(db, parse("[]@0 false", sc.SHOPPING), ("cook", 1))
    assert out.inconsistent
    assert out.models.is_empty()
    assert len(out.intentions) == 0


def test_unfaithful_order_rejected():
    db = sc.shopping_database()
    u = db.universe
    with pytest.raises(ValueError):
        revise(db, TOP, None, order=FaithfulOrder(u, [1, 0]))


def test_revision_input_must_be_strong():
    with pytest.raises(ValueError):
        RevisionInput(parse("do(food)@0", sc.SHOPPING), None)
    db = sc.shopping_database()
    out = revise(db, RevisionInput(TOP, ("equip", 1)))
    assert set(out.intentions) == {("equip", 1)}


def test_faithful_order_minimal():
    u = sc.shopping_universe()
    order = FaithfulOrder(u, [2, 1])
    assert order.minimal(u.all_trees()).trees == [sc.shopping_variant()]
    assert order.is_faithful_for(u.msb(np.array([False, True])))
    assert not order.is_faithful_for(u.msb(np.array([True, False])))


# --- selection conditions on random inputs -----------------------------------

V = Vocabulary(("a", "b"), horizon=2)


@pytest.fixture(scope="module")
def u():
    full = enumerate_universe(V, 2, [Pre(("a",)), Pre(("b",)), Pre(("a", "b"))])
    return full.restrict(range(0, len(full.trees), len(full.trees) // 12)[:12])


intentions = st.tuples(st.sampled_from(["a", "b"]), st.integers(0, 1))


@given(data=st.data())
@settings(max_examples=150, deadline=None)
def test_selectors_meet_conditions(u, data):
    mask = np.array(data.draw(st.lists(st.booleans(), min_size=len(u.trees), max_size=len(u.trees))))
    if not mask.any():
        mask[0] = True
    models = u.msb(mask)
    chosen = data.draw(st.dictionaries(st.integers(0, 1), st.sampled_from(["a", "b"])))
    I = IntentionDatabase((a, t) for t, a in chosen.items())
    i = data.draw(st.none() | intentions)
    for sel in (temporal_selector, latest_first_selector):
        out = sel(models, I, i)
        assert selection_conditions(models, I, i, out) == []


@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_revision_is_path_indifferent(u, data):
    # equivalent inputs give the same result
    mask = np.array(data.draw(st.lists(st.booleans(), min_size=len(u.trees), max_size=len(u.trees))))
    if not mask.any():
        mask[-1] = True
    from paltime import characteristic_formula
    phi = characteristic_formula(u.msb(mask))
    db = BeliefIntentionDatabase(u, u.msb(np.roll(mask, 1)), IntentionDatabase([("a", 0)]))
    r1 = revise(db, phi, ("b", 1))
    r2 = revise(db, And(phi, TOP), ("b", 1))
    assert r1.models == r2.models and r1.intentions == r2.intentions
    assert set(r1.intentions) <= {("a", 0), ("b", 1)}
    assert is_coherent(r1.db)


# --- postulate verifier ------------------------------------------------------

def test_postulates_hold_on_small_universe(u):
    report = verify_postulates(u, samples=300, sub_count=2)
    assert report.ok, "\n".join(report.lines())
    assert all(report.checked[p] > 0 for p in report.ids)


def test_broken_selector_is_caught(u):
    report = verify_postulates(u, selector=drop_old_selector, samples=100, sub_count=1)
    assert report.violation_count("P12") > 0
    assert any(line.startswith("POSTULATE P12 FAIL") for line in report.lines())


def test_report_lines_format():
    r = PostulateReport(("P1", "P2"))
    r.record("P1", True, lambda: "")
    r.record("P2", False, lambda: "psi={0}")
    assert r.lines()[0] == "POSTULATE P1 PASS"
    assert r.lines()[1].startswith("POSTULATE P2 FAIL")
    assert not r.ok and r.violation_count() == 1
