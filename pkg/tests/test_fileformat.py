import numpy as np
import pytest

from paltime import ParseError, Pre, Prop, is_coherent, parse
from paltime.fileformat import load_database, load_mas, loads_database, loads_mas
from paltime import scenarios as sc

from conftest import DATA

MINIMAL = """\
[actions]
a, b
[props]
p
[horizon]
1
[beliefs]
[]@0 p@0
[intentions]
a @ 0
"""


# --- shipped files agree with the scenario module ------------------------------

def test_shopping_file_matches_scenario():
    f = load_database(DATA / "shopping.db")
    assert f.vocab == sc.SHOPPING
    assert f.universe.atoms == sc.SHOPPING_ATOMS
    assert f.universe.trees == sc.shopping_universe().trees
    assert f.tree_names == {"shop": 0, "shop_plus": 1}
    assert f.beliefs == parse(sc.SHOPPING_BELIEFS, sc.SHOPPING)
    assert set(f.intentions) == {("food", 0), ("cook", 1)}
    assert is_coherent(f.database())


def test_shopping_tree_file():
    from paltime import parse_tree
    text = (DATA / "shopping_tree.txt").read_text()
    assert parse_tree(text, sc.SHOPPING, atoms=sc.SHOPPING_ATOMS, horizon=2) == sc.shopping_tree()


def test_dentist_file_matches_scenario():
    f = load_database(DATA / "dentist.db")
    assert f.universe.trees == sc.dentist_universe().trees
    assert f.database().models.indices.tolist() == sc.dentist_database().models.indices.tolist()
    assert set(f.intentions) == set(sc.DENTIST_INTENTIONS)


@pytest.mark.slow
def test_purchase_file_matches_scenario():
    f = load_database(DATA / "purchase.db")
    assert len(f.universe.trees) == len(sc.purchase_universe().trees)
    assert np.array_equal(f.ranking().ranks, sc.purchase_ranking().ranks)


def test_robots_file_matches_scenario():
    body = [l for l in (DATA / "robots.mas").read_text().splitlines() if not l.startswith("#")]
    assert body == sc.robot_file_text().splitlines()
    f = load_mas(DATA / "robots.mas")
    system, expected = f.system(), sc.robot_system()
    assert f.agents == sc.AGENTS
    assert system.collective == expected.collective
    assert [c.name for c in system.collective] == ["c1", "c2"]
    for ag in sc.AGENTS:
        assert system.dbs[ag].models.trees == expected.dbs[ag].models.trees
        assert system.dbs[ag].intentions == expected.dbs[ag].intentions


# --- defaults ------------------------------------------------------------------

def test_minimal_file_enumerates():
    f = loads_database(MINIMAL)
    assert Prop("p") in f.universe.atoms
    assert Pre(("a",)) in f.universe.atoms
    assert f.universe.horizon == 1
    assert set(f.intentions) == {("a", 0)}
    # beliefs rank 0, everything else rank 1
    k = f.ranking()
    assert set(np.unique(k.ranks)) == {0, 1}


def test_explicit_atoms_are_exact():
    f = loads_database(MINIMAL + "[atoms]\np\n")
    assert f.universe.atoms == (Prop("p"),)


def test_horizon_override():
    assert loads_database(MINIMAL + "[atoms]\np\n", horizon=2).universe.horizon == 2


def test_ranking_section():
    rest = ",".join(str(k) for k in range(1, 16))
    f = loads_database(MINIMAL + f"[atoms]\np\n[ranking]\nRANK 0: 0\nRANK 2: {rest}\n")
    assert len(f.universe.trees) == 16
    assert f.ranking().ranks.tolist() == [0] + [2] * 15


def test_comments_and_blank_lines():
    text = "# header\n\n" + MINIMAL.replace("a, b", "a, b   # two actions")
    assert loads_database(text).vocab.actions == ("a", "b")


# --- errors ------------------------------------------------------------------

@pytest.mark.parametrize("text,match", [
    (MINIMAL.replace("[actions]\na, b\n", ""), "actions"),
    (MINIMAL.replace("[horizon]\n1\n", "[horizon]\none\n"), "horizon"),
    (MINIMAL + "[beliefs]\ntrue\n", "twice"),
    (MINIMAL + "[nonsense]\n", "section"),
    (MINIMAL + "[collective]\nc: (x,a,0)\n", "multi-agent"),
    (MINIMAL.replace("a @ 0", "a at 0"), "line"),
    (MINIMAL.replace("[]@0 p@0", "[]@0 p@"), "line"),
    (MINIMAL + "[universe]\ntree t\n- | q\n", "q"),
])
def test_bad_files(text, match):
    with pytest.raises(ParseError, match=match):
        loads_database(text)


def test_error_mentions_line():
    bad = MINIMAL.replace("a @ 0", "a at 0")
    with pytest.raises(ParseError) as e:
        loads_database(bad)
    assert "line 10" in str(e.value)


MAS = "[actions]\na\n[horizon]\n1\n[atoms]\npre((a|a))\n[agents]\nx, y\n[agent x]\n[intentions]\na @ 0\n"


def test_mas_agent_without_block_defaults():
    f = loads_mas(MAS)
    assert f.agents == ("x", "y")
    assert f.beliefs["y"] == parse("true", f.vocab)
    assert len(f.intentions["y"]) == 0
    assert set(f.intentions["x"]) == {("a", 0)}


def test_mas_undeclared_agent():
    with pytest.raises(ParseError, match="undeclared"):
        loads_mas(MAS + "[agent z]\n")


def test_mas_sections_need_an_agent():
    with pytest.raises(ParseError):
        loads_mas("[actions]\na\n[horizon]\n1\n[beliefs]\ntrue\n")


def test_collective_line_parsing():
    from paltime.fileformat import parse_collective_line
    c = parse_collective_line("c9: (ag1,cook,2); (ag2,cook,2)", sc.AGENTS, sc.ROBOTS)
    assert c == sc.C3 and c.name == "c9"
    with pytest.raises(ParseError):
        parse_collective_line("c9 (ag1,cook,2)", sc.AGENTS, sc.ROBOTS)
    with pytest.raises(ParseError):
        parse_collective_line("c9: (ag7,cook,2)", sc.AGENTS, sc.ROBOTS)
