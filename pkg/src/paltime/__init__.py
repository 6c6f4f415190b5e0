"""Beliefs and intentions over bounded branching time."""
from .errors import (
    CapExceededError, HorizonError, PalError, ParseError, UniverseMismatchError, UnknownAtomError,
)
from .formula import (
    BOTTOM, TOP, And, AtomAt, Box, Diamond, DoAt, Formula, Iff, Implies, Not, Or, Post, Pre, Prop,
    Vocabulary, conj, disj, in_past, is_strong_belief, max_time, parse, relevant_props, to_text,
)
from .models import (
    BoundedModel, BoundedPath, BoundedTree, evaluate, parse_tree, path_equiv, saturated_tree,
    validate_model,
)
from .solver import (
    MsbSet, Universe, characteristic_formula, entails, enumerate_universe, models_of_strong,
    satisfiable,
)
from .database import (
    BeliefIntentionDatabase, IntentionDatabase, cohere_formula, coherent_with, is_coherent,
    weak_beliefs_consistent, weak_beliefs_entails,
)
from .revision import FaithfulOrder, revise, select_intentions, verify_postulates
from .iterated import EpistemicState, SpohnRanking, bel, iterated_revise, spohn_revise, verify_dp
from .multiagent import (
    CollectiveIntention, MultiAgentSystem, intention_view, mas_cohere_formula, mas_revise_collective,
    mas_revise_individual, mas_weak_beliefs_entails, theta,
)

__version__ = "0.1.0"
