import pytest

from paltime import (
    TOP, BeliefIntentionDatabase, CollectiveIntention, HorizonError, MultiAgentSystem, Vocabulary,
    intention_view, mas_cohere_formula, mas_revise_collective, mas_revise_individual,
    mas_weak_beliefs_entails, parse, theta, to_text,
)
from paltime.multiagent import agent_coherent, mas_weak_beliefs_consistent
from paltime import scenarios as sc


@pytest.fixture(scope="module")
def system():
    return sc.robot_system()


def P(text):
    return parse(text, sc.ROBOTS)


# --- construction ------------------------------------------------------------

def test_collective_needs_triples():
    with pytest.raises(ValueError):
        CollectiveIntention(frozenset())


def test_collective_one_action_per_agent_and_time():
    with pytest.raises(ValueError, match="two actions"):
        CollectiveIntention(frozenset({("ag1", "cook", 0), ("ag1", "nop", 0)}))


def test_collective_names_do_not_matter():
    a = CollectiveIntention(frozenset({("ag1", "cook", 2)}), "x")
    b = CollectiveIntention(frozenset({("ag1", "cook", 2)}), "y")
    assert a == b


def test_overlapping_collectives_refused(system):
    clash = CollectiveIntention(frozenset({("ag2", "nop", 0)}))
    with pytest.raises(ValueError, match="overlap"):
        MultiAgentSystem(sc.AGENTS, system.dbs, (sc.C1, clash))


def test_collective_against_individual_refused(system):
    clash = CollectiveIntention(frozenset({("ag1", "nop", 0)}))
    with pytest.raises(ValueError, match="overlaps a collective"):
        MultiAgentSystem(sc.AGENTS, system.dbs, (clash,))


def test_agent_count_checked():
    single = Vocabulary(("a",), horizon=1)
    from paltime import enumerate_universe
    u = enumerate_universe(single, 1, [])
    db = BeliefIntentionDatabase.from_formula(TOP, (), u)
    with pytest.raises(ValueError):
        MultiAgentSystem(("x", "y"), {"x": db, "y": db})


# --- views and coherence -----------------------------------------------------

def test_views(system):
    assert intention_view(system, "ag1") == frozenset(
        {("ag1", "fetch", 0)} | sc.C1.triples | sc.C2.triples)
    assert intention_view(system, "ag2") == frozenset(
        {("ag2", "clean", 1)} | sc.C1.triples | sc.C2.triples)


def test_cohere_empty_view_is_true():
    assert mas_cohere_formula([], sc.ROBOTS, sc.AGENTS) == TOP


def test_cohere_fixes_every_coordinate():
    f = mas_cohere_formula([("ag1", "fetch", 0), ("ag2", "prep", 0)], sc.ROBOTS, sc.AGENTS)
    assert to_text(f) == "<>@0 pre((fetch|prep))@0"


def test_cohere_open_coordinate_is_a_disjunction():
    f = mas_cohere_formula([("ag1", "fetch", 0)], sc.ROBOTS, sc.AGENTS)
    assert to_text(f).count("pre(") == len(sc.ROBOT_ACTIONS)


def test_theta_one_disjunction_per_time(system):
    th = theta(intention_view(system, "ag1"), sc.ROBOTS, sc.AGENTS)
    assert th[0] == P("do(fetch|prep)@0")
    assert th[2] == P("do(move|move)@2")
    assert to_text(th[1]).count("do(bring|") == len(sc.ROBOT_ACTIONS)


def test_initial_system_coherent(system):
    for ag in sc.AGENTS:
        assert agent_coherent(system, ag)
        assert mas_weak_beliefs_consistent(system, ag)


def test_weak_beliefs_include_joint_actions(system):
    assert mas_weak_beliefs_entails(system, "ag1", P("do(fetch|prep)@0"))
    assert mas_weak_beliefs_entails(system, "ag2", P("do(move|move)@2"))
    assert not mas_weak_beliefs_entails(system, "ag1", P("do(cook|cook)@2"))


# --- revision ----------------------------------------------------------------

def test_individual_revision(system):
    out = mas_revise_individual(system, "ag2", sc.robot_no_cleaning())
    s = out.system
    assert s.dbs["ag2"].models.trees == [sc.robot_trees()["B"]]
    assert list(s.dbs["ag2"].intentions) == []
    assert s.collective == (sc.C1,)
    assert set(s.dbs["ag1"].intentions) == {("fetch", 0)}
    assert out.dropped_collective == [sc.C2]
    assert out.dropped_individual == {"ag2": [("clean", 1)]}
    for ag in sc.AGENTS:
        assert agent_coherent(s, ag)


def test_individual_revision_keeps_beliefs_of_others(system):
    s = mas_revise_individual(system, "ag2", sc.robot_no_cleaning()).system
    assert s.dbs["ag1"].models == system.dbs["ag1"].models


def test_individual_revision_with_new_intention(system):
    out = mas_revise_individual(system, "ag1", TOP, ("nop", 2))
    s = out.system
    # the new intention wins over the collective move at the same time
    assert ("nop", 2) in set(s.dbs["ag1"].intentions)
    assert sc.C2 not in s.collective


def test_collective_revision(system):
    first = mas_revise_individual(system, "ag2", sc.robot_no_cleaning()).system
    out = mas_revise_collective(first, sc.C3)
    assert out.system.collective == (sc.C3,)
    assert list(out.system.dbs["ag2"].intentions) == []
    assert set(out.system.dbs["ag1"].intentions) == {("fetch", 0)}
    assert not out.rejected
    assert out.dropped_collective == [sc.C1]


def test_collective_revision_leaves_beliefs(system):
    out = mas_revise_collective(system, sc.C3)
    for ag in sc.AGENTS:
        assert out.system.dbs[ag].models == system.dbs[ag].models


def test_incoherent_collective_rejected(system):
    bad = CollectiveIntention(frozenset({("ag1", "cook", 0), ("ag2", "cook", 0)}), "bad")
    out = mas_revise_collective(system, bad)
    assert out.rejected
    assert out.system is system


def test_collective_beyond_horizon(system):
    late = CollectiveIntention(frozenset({("ag1", "nop", 3)}))
    with pytest.raises(HorizonError):
        mas_revise_collective(system, late)


def test_unknown_agent(system):
    with pytest.raises(ValueError):
        mas_revise_individual(system, "ag3", TOP)
