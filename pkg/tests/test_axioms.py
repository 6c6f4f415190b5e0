import pytest

from paltime import BoundedTree, Post, Pre, Prop, Vocabulary, enumerate_universe
from paltime.axioms import (
    AXIOM_IDS, axiom_instances, axiom_universes, check_axioms, formula_pool,
    unrestricted_a12_fails, verify_axioms,
)
from paltime.formula import needed_depth
from paltime.solver import Universe

V = Vocabulary(("a", "b"), ("p",), horizon=2)


@pytest.fixture(scope="module")
def h1():
    return axiom_universes(horizon=1)


def test_every_schema_instantiated(h1):
    seen = set()
    for u in h1:
        seen |= {pid for pid, _ in axiom_instances(u, formula_pool(u, size=10))}
    assert seen == set(AXIOM_IDS)


def test_instances_stay_within_horizon(h1):
    for u in h1:
        for _, f in axiom_instances(u, formula_pool(u, size=10)):
            assert needed_depth(f) <= u.horizon


def test_pool_is_seeded(h1):
    u = h1[0]
    assert formula_pool(u, seed=3) == formula_pool(u, seed=3)
    assert formula_pool(u, seed=3) != formula_pool(u, seed=4)


def test_horizon_one_passes(h1):
    report = verify_axioms(h1)
    assert report.ok, "\n".join(report.lines())


def test_strict_preconditions_also_pass():
    report = verify_axioms(axiom_universes(horizon=1, strict_pre=True))
    assert report.ok


def test_invalid_tree_breaks_a8():
    # an a-edge whose target lacks post(a)
    bad = BoundedTree.from_nodes(V, {(): set(), ("a",): set()}, atoms=[Post("a")], horizon=1)
    u = Universe.from_trees([bad], validate=False)
    report = check_axioms(u)
    assert report.violation_count("A8") > 0
    assert "A8 FAIL" in "\n".join(report.lines())


def test_invalid_tree_breaks_a9():
    bad = BoundedTree.from_nodes(V, {(): {Pre(("a",))}, ("b",): set()}, atoms=[Pre(("a",))], horizon=1)
    report = check_axioms(Universe.from_trees([bad], validate=False))
    assert report.violation_count("A9") > 0


def test_a12_needs_the_past_restriction():
    u = enumerate_universe(V, 2, [Prop("p")])
    assert unrestricted_a12_fails(u)
    pool = formula_pool(u, size=20)
    a12 = [f for pid, f in axiom_instances(u, pool) if pid == "A12"]
    assert a12 and all(u.eval(f).all() for f in a12)
