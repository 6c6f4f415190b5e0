"""Ready-made worlds for the household-robot scenarios used in the demos,
the shipped data files and the tests."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .database import BeliefIntentionDatabase
from .formula import (
    AtomAt, Box, Formula, Iff, Not, Post, Pre, Vocabulary, atoms_of, close_atoms,
    contiguous_subsequences, Diamond, disj, parse, to_text,
)
from .iterated import SpohnRanking
from .models import BoundedTree, parse_tree, saturated_tree, sort_atoms
from .multiagent import CollectiveIntention, MultiAgentSystem
from .solver import Universe, enumerate_universe

# ---------------------------------------------------------------------------
# Shopping robot: one tree, three branches
# ---------------------------------------------------------------------------

SHOPPING = Vocabulary(("food", "equip", "cook", "nop"), horizon=2)

# nop is the idle action; its pre/post atoms would be constant true and are
# left out of the atom set.
SHOPPING_ATOMS = sort_atoms(
    parse(a + "@0", SHOPPING).atom
    for a in ("pre(food)", "pre(cook)", "pre(equip)", "pre(food,cook)", "pre(food,equip)",
              "post(food)", "post(cook)", "post(equip)")
)

SHOPPING_TREE = """\
- | pre(food), pre(food,cook)
nop | pre(equip)
nop.equip | post(equip)
food | pre(cook), post(food)
food.cook | post(cook)
food.nop |
"""

# the three branches of the shopping tree
PI = ("nop", "equip")
PI1 = ("food", "cook")
PI2 = ("food", "nop")

# formula text, branch, expected truth value
SHOPPING_TRUTHS: List[Tuple[str, Tuple[str, str], bool]] = [
    ("pre(food)@0 & do(nop)@0 & do(equip)@1", PI, True),
    ("<>@0 (do(food)@0 & !do(cook)@1)", PI, True),
    ("<>@0 do(food)@0 & <>@0 do(equip)@1 & !<>@0 (do(food)@0 & do(equip)@1)", PI, True),
    ("pre(food,cook)@0", PI1, True),
    ("do(equip)@1", PI1, False),
    ("<>@0 !<>@1 do(cook)@1", PI2, True),
]


def shopping_tree() -> BoundedTree:
    return parse_tree(SHOPPING_TREE, SHOPPING, atoms=SHOPPING_ATOMS, horizon=2)


def shopping_variant() -> BoundedTree:
    """The shopping tree plus a branch buying food then equipment, without
    the precondition for doing both."""
    nodes = dict(shopping_tree().nodes)
    nodes[("food", "equip")] = {Post("equip")}
    return BoundedTree.from_nodes(SHOPPING, nodes, atoms=SHOPPING_ATOMS, horizon=2)


SHOPPING_BELIEFS = "[]@0 (pre(food)@0 & pre(food,cook)@0)"


@lru_cache(maxsize=None)
def shopping_universe() -> Universe:
    return Universe.from_trees([shopping_tree(), shopping_variant()])


def shopping_database(intentions=(("food", 0), ("cook", 1))) -> BeliefIntentionDatabase:
    return BeliefIntentionDatabase.from_formula(parse(SHOPPING_BELIEFS, SHOPPING), intentions,
                                                shopping_universe())


# ---------------------------------------------------------------------------
# Dentist: joint versus separate revision
# ---------------------------------------------------------------------------

DENTIST = Vocabulary(("dentist", "work", "eat", "movie"), horizon=2)
DENTIST_BRANCHES = [("dentist", "eat"), ("dentist", "movie"), ("work", "eat"), ("work", "movie")]
DENTIST_ATOMS = sort_atoms(close_atoms(Pre(b) for b in DENTIST_BRANCHES))
DENTIST_BELIEFS = "<>@0 (do(dentist)@0 & do(eat)@1)"
DENTIST_NEWS = "!<>@0 (do(dentist)@0 & do(eat)@1)"
DENTIST_INTENTIONS = (("dentist", 0), ("eat", 1))
DENTIST_NEW_INTENTION = ("movie", 1)


@lru_cache(maxsize=None)
def dentist_universe() -> Universe:
    full = saturated_tree(DENTIST, DENTIST_BRANCHES, DENTIST_ATOMS)
    no_eat = saturated_tree(DENTIST, [b for b in DENTIST_BRANCHES if b != ("dentist", "eat")], DENTIST_ATOMS)
    return Universe.from_trees([full, no_eat])


def dentist_database() -> BeliefIntentionDatabase:
    return BeliefIntentionDatabase.from_formula(parse(DENTIST_BELIEFS, DENTIST), DENTIST_INTENTIONS,
                                                dentist_universe())


# ---------------------------------------------------------------------------
# Ranked beliefs over every tree for two purchases
# ---------------------------------------------------------------------------

PURCHASE = Vocabulary(("food", "equip"), horizon=2)
PURCHASE_ATOMS = sort_atoms([Pre(("food",)), Pre(("equip",)), Pre(("food", "equip"))])
BOTH = "[]@0 pre(food,equip)@0"
EITHER = "[]@0 !pre(food,equip)@0 & []@0 pre(food)@0 & []@0 pre(equip)@1"
NEITHER = "[]@0 !pre(food)@0 & []@0 !pre(equip)@1"
NOT_BOTH = "[]@0 !pre(food,equip)@0"
PURCHASE_INTENTIONS = (("food", 0), ("equip", 1))
# (formula, rank); everything else gets rank 2
PURCHASE_STRATA = [(BOTH, 0), (EITHER, 1), (NEITHER, 3)]
PURCHASE_DEFAULT_RANK = 2


@lru_cache(maxsize=None)
def purchase_universe() -> Universe:
    return enumerate_universe(PURCHASE, 2, PURCHASE_ATOMS)


def purchase_ranking() -> SpohnRanking:
    u = purchase_universe()
    return SpohnRanking.from_strata(u, [(parse(f, PURCHASE), r) for f, r in PURCHASE_STRATA],
                                    PURCHASE_DEFAULT_RANK)


def purchase_cheaper_only() -> Formula:
    """Models outside the three named strata."""
    return parse(f"!({BOTH}) & !({EITHER}) & !({NEITHER})", PURCHASE)


# ---------------------------------------------------------------------------
# Two robots with collective intentions
# ---------------------------------------------------------------------------

ROBOT_ACTIONS = ("fetch", "prep", "bring", "clean", "move", "cook", "nop")
ROBOTS = Vocabulary(ROBOT_ACTIONS, agent_count=2, horizon=3)
AGENTS = ("ag1", "ag2")

_P = {
    "breakfast_clean_move": (("fetch", "prep"), ("bring", "clean"), ("move", "move")),
    "breakfast_idle": (("fetch", "prep"), ("bring", "nop"), ("nop", "nop")),
    "lunch": (("nop", "nop"), ("nop", "nop"), ("cook", "cook")),
    "breakfast_move": (("fetch", "prep"), ("bring", "nop"), ("move", "move")),
    "fetch_lunch": (("fetch", "nop"), ("nop", "nop"), ("cook", "cook")),
}

ROBOT_TREES = {
    # the second robot's candidate worlds
    "A": ["breakfast_clean_move", "breakfast_idle", "lunch"],
    "B": ["breakfast_idle", "lunch"],
    "C": ["breakfast_idle", "lunch", "breakfast_move"],
    # the first robot's world
    "T1": ["breakfast_clean_move", "breakfast_idle", "fetch_lunch"],
}


def _any_first(post_or_pre, second: str, t: int) -> Formula:
    return disj([AtomAt(post_or_pre((a, second)), t) for a in ROBOT_ACTIONS])


def robot_move_rule() -> Formula:
    """Moving together at time 2 is possible exactly after cleaning."""
    cleaned = disj([AtomAt(Post((a, "clean")), 2) for a in ROBOT_ACTIONS])
    return Box(0, Iff(cleaned, AtomAt(Pre((("move", "move"),)), 2)))


def robot_no_cleaning() -> Formula:
    return Not(Diamond(0, disj([AtomAt(Pre(((a, "clean"),)), 1) for a in ROBOT_ACTIONS])))


ROBOT1_BELIEFS = "<>@0 do(fetch|nop)@0"


@lru_cache(maxsize=None)
def robot_atoms():
    seed = set(atoms_of(robot_move_rule())) | set(atoms_of(robot_no_cleaning()))
    for path in _P.values():
        seed |= {Pre(s) for s in contiguous_subsequences(path)}
    return sort_atoms(close_atoms(seed))


@lru_cache(maxsize=None)
def robot_trees() -> Dict[str, BoundedTree]:
    atoms = robot_atoms()
    return {name: saturated_tree(ROBOTS, [_P[p] for p in paths], atoms, horizon=3)
            for name, paths in ROBOT_TREES.items()}


@lru_cache(maxsize=None)
def robot_universe() -> Universe:
    return Universe.from_trees(list(robot_trees().values()))


C1 = CollectiveIntention(frozenset({("ag1", "bring", 1), ("ag2", "prep", 0)}), "c1")
C2 = CollectiveIntention(frozenset({("ag1", "move", 2), ("ag2", "move", 2)}), "c2")
C3 = CollectiveIntention(frozenset({("ag1", "cook", 2), ("ag2", "cook", 2)}), "c3")
ROBOT_INTENTIONS = {"ag1": [("fetch", 0)], "ag2": [("clean", 1)]}


def robot_system() -> MultiAgentSystem:
    u = robot_universe()
    beliefs = {"ag1": parse(ROBOT1_BELIEFS, ROBOTS), "ag2": robot_move_rule()}
    dbs = {ag: BeliefIntentionDatabase.from_formula(beliefs[ag], ROBOT_INTENTIONS[ag], u) for ag in AGENTS}
    return MultiAgentSystem(AGENTS, dbs, (C1, C2))


def robot_file_text() -> str:
    from .fileformat import dumps_mas
    trees = list(robot_trees().items())
    beliefs = {"ag1": ROBOT1_BELIEFS, "ag2": to_text(robot_move_rule())}
    return dumps_mas(ROBOTS, robot_atoms(), trees, AGENTS, beliefs, ROBOT_INTENTIONS, (C1, C2))
