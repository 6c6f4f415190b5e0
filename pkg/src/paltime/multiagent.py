"""Several agents coordinated through collective intentions.

Transition labels are action profiles, one action per agent.  Agents are
identified by name; the position of a name in ``MultiAgentSystem.agents``
is its coordinate in every profile.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .database import BeliefIntentionDatabase, IntentionDatabase, check_intentions
from .errors import UniverseMismatchError
from .formula import (
    TOP, AtomAt, DoAt, Formula, Pre, Vocabulary, conj, Diamond, disj, is_strong_belief,
    label_text,
)
from .revision import FaithfulOrder
from .solver import MsbSet, Universe, models_of_strong

Triple = Tuple[str, str, int]


@dataclass(frozen=True)
class CollectiveIntention:
    """A set of ``(agent, action, time)`` triples; ``name`` is a label only."""

    triples: FrozenSet[Triple]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        triples = frozenset((str(ag), str(a), int(t)) for ag, a, t in self.triples)
        object.__setattr__(self, "triples", triples)
        if not triples:
            raise ValueError("a collective intention needs at least one triple")
        if not _non_overlapping(triples):
            label = f"collective intention {self.name}".rstrip()
            raise ValueError(f"{label} gives an agent two actions at one time")

    @property
    def agents(self) -> FrozenSet[str]:
        return frozenset(ag for ag, _, _ in self.triples)

    @property
    def min_time(self) -> int:
        return min(t for _, _, t in self.triples)

    def involves(self, agent: str) -> bool:
        return agent in self.agents

    def __repr__(self):
        body = "; ".join(f"({ag},{a},{t})" for ag, a, t in sorted(self.triples, key=lambda x: (x[2], x[0])))
        return f"{self.name}: {body}" if self.name else "{" + body + "}"


def _non_overlapping(triples: Iterable[Triple]) -> bool:
    seen: Dict[Tuple[str, int], str] = {}
    for ag, a, t in triples:
        if seen.setdefault((ag, t), a) != a:
            return False
    return True


@dataclass
class MultiAgentSystem:
    agents: Tuple[str, ...]
    dbs: Dict[str, BeliefIntentionDatabase]
    collective: Tuple[CollectiveIntention, ...] = ()

    def __post_init__(self):
        self.agents = tuple(self.agents)
        self.collective = tuple(self.collective)
        if set(self.dbs) != set(self.agents):
            raise ValueError("one database per agent is required")
        for name, db in self.dbs.items():
            if db.vocab.agent_count != len(self.agents):
                raise ValueError(f"agent {name}: vocabulary has {db.vocab.agent_count} agents, system has {len(self.agents)}")
            for a, t in db.intentions:
                if a not in db.vocab.actions:
                    raise ValueError(f"agent {name}: individual intention uses unknown action {a!r}")
        for c in self.collective:
            for ag, a, t in c.triples:
                if ag not in self.dbs:
                    raise ValueError(f"collective intention mentions unknown agent {ag!r}")
        union = [x for c in self.collective for x in c.triples]
        if not _non_overlapping(union):
            raise ValueError("collective intentions overlap")
        for ag, a, t in union:
            b = self.dbs[ag].intentions.at(t)
            if b is not None and b != a:
                raise ValueError(f"agent {ag}: individual intention ({b},{t}) overlaps a collective one")

    @property
    def vocab(self) -> Vocabulary:
        return self.dbs[self.agents[0]].vocab

    def coordinate(self, agent: str) -> int:
        try:
            return self.agents.index(agent)
        except ValueError:
            raise ValueError(f"unknown agent {agent!r}") from None

    def collective_named(self) -> List[str]:
        return [c.name for c in self.collective]

    def replace(self, dbs=None, collective=None) -> "MultiAgentSystem":
        return MultiAgentSystem(self.agents, dict(dbs if dbs is not None else self.dbs),
                                tuple(collective if collective is not None else self.collective))


def intention_view(sys: MultiAgentSystem, k: str) -> FrozenSet[Triple]:
    """Collectives agent ``k`` takes part in, plus its own intentions."""
    sys.coordinate(k)
    out = set()
    for c in sys.collective:
        if c.involves(k):
            out |= c.triples
    out |= {(k, a, t) for a, t in sys.dbs[k].intentions}
    return frozenset(out)


def _fixes(view: Iterable[Triple], agents: Sequence[str]) -> Dict[int, Dict[int, str]]:
    """time -> coordinate -> action."""
    out: Dict[int, Dict[int, str]] = {}
    for ag, a, t in view:
        m = agents.index(ag)
        slot = out.setdefault(t, {})
        if slot.setdefault(m, a) != a:
            raise ValueError(f"conflicting intentions for {ag} at time {t}")
    return out


def _profiles(vocab: Vocabulary, fixed: Dict[int, str]) -> List:
    choices = [[fixed[m]] if m in fixed else list(vocab.actions) for m in range(vocab.agent_count)]
    return [vocab.profile(*p) for p in itertools.product(*choices)]


def mas_cohere_formula(view: Iterable[Triple], vocab: Vocabulary, agents: Sequence[str], atoms=None) -> Formula:
    """``<>@0`` of the disjunction of ``pre(profiles)@t_min`` over profile
    sequences agreeing with every triple of the view."""
    view = list(view)
    if not view:
        return TOP
    fixes = _fixes(view, agents)
    t_min, t_max = min(fixes), max(fixes)
    slots = [_profiles(vocab, fixes.get(t, {})) for t in range(t_min, t_max + 1)]
    disjuncts = []
    for seq in itertools.product(*slots):
        atom = Pre(tuple(seq))
        if atoms is not None and atom not in atoms:
            continue
        disjuncts.append(AtomAt(atom, t_min))
    return Diamond(0, disj(disjuncts))


def theta(view: Iterable[Triple], vocab: Vocabulary, agents: Sequence[str]) -> List[Formula]:
    """One do-disjunction per time point, fixing every coordinate the view
    fixes at that time."""
    fixes = _fixes(view, agents)
    return [disj([DoAt(p, t) for p in _profiles(vocab, fixes[t])]) for t in sorted(fixes)]


def view_support(view, u: Universe, agents: Sequence[str]) -> np.ndarray:
    view = list(view)
    if not view:
        return np.ones(len(u.trees), dtype=bool)
    if max(t for _, _, t in view) >= u.horizon:
        from .errors import HorizonError
        raise HorizonError("intention view reaches the horizon")
    return u.tree_mask(mas_cohere_formula(view, u.vocab, agents, set(u.atoms)))


def mas_coherent(models: MsbSet, view, agents: Sequence[str]) -> bool:
    return bool(np.any(models.mask & view_support(view, models.universe, agents)))


def agent_coherent(sys: MultiAgentSystem, k: str) -> bool:
    return mas_coherent(sys.dbs[k].models, intention_view(sys, k), sys.agents)


def mas_weak_beliefs_entails(sys: MultiAgentSystem, k: str, f: Formula) -> bool:
    db = sys.dbs[k]
    u = db.universe
    prem = db.models.model_mask() & u.eval_all(theta(intention_view(sys, k), u.vocab, sys.agents))
    return not np.any(prem & ~u.eval(f))


def mas_weak_beliefs_consistent(sys: MultiAgentSystem, k: str) -> bool:
    db = sys.dbs[k]
    u = db.universe
    return bool(np.any(db.models.model_mask() & u.eval_all(theta(intention_view(sys, k), u.vocab, sys.agents))))


# ---------------------------------------------------------------------------
# Revision
# ---------------------------------------------------------------------------

@dataclass
class MasRevisionResult:
    system: MultiAgentSystem
    dropped_collective: List[CollectiveIntention] = field(default_factory=list)
    dropped_individual: Dict[str, List[Tuple[str, int]]] = field(default_factory=dict)
    rejected: bool = False
    inconsistent: bool = False


@dataclass(frozen=True)
class _Unit:
    """Something kept or dropped as a whole: one individual intention of
    one agent, or one collective intention."""

    triples: FrozenSet[Triple]
    collective: Optional[CollectiveIntention] = None

    @property
    def min_time(self):
        return min(t for _, _, t in self.triples)

    @property
    def agents(self):
        return {ag for ag, _, _ in self.triples}


def _greedy_units(units: Sequence[_Unit], models: Dict[str, MsbSet], agents: Sequence[str],
                  base: Dict[str, set] = None, check: Iterable[str] = None) -> List[_Unit]:
    """Accept units in order while every affected agent stays coherent.

    A collective affects all its participants; an individual intention only
    its owner.  ``base`` holds triples already fixed per agent.
    """
    views = {ag: set(base.get(ag, ())) if base else set() for ag in agents}
    accepted = []
    check = set(check) if check is not None else set(agents)
    for unit in units:
        affected = unit.agents & check
        new_views = {ag: views[ag] | unit.triples for ag in affected}
        if any(not _non_overlapping(v) for v in new_views.values()):
            continue
        if all(mas_coherent(models[ag], v, agents) for ag, v in new_views.items()):
            views.update(new_views)
            accepted.append(unit)
    return accepted


def _individual_units(sys: MultiAgentSystem, ag: str) -> List[_Unit]:
    return [_Unit(frozenset({(ag, a, t)})) for a, t in sys.dbs[ag].intentions]


def _collective_units(cs: Iterable[CollectiveIntention]) -> List[_Unit]:
    return [_Unit(c.triples, c) for c in cs]


def _by_time(units: List[_Unit]) -> List[_Unit]:
    # collectives first on ties: they bind other agents as well
    return sorted(units, key=lambda u: (u.min_time, u.collective is None))


def mas_revise_individual(sys: MultiAgentSystem, k: str, phi: Formula, i: Optional[Tuple[str, int]] = None,
                          order: FaithfulOrder = None) -> MasRevisionResult:
    """Revise agent ``k`` by a strong belief and an optional intention.

    Other agents keep beliefs and individual intentions; a collective
    intention that ``k`` can no longer honour is removed for everyone.
    """
    sys.coordinate(k)
    db = sys.dbs[k]
    u = db.universe
    if not is_strong_belief(phi):
        raise ValueError(f"revision input must be a strong belief formula: {phi}")
    if order is None:
        order = FaithfulOrder.from_beliefs(db.models)
    new_models = order.minimal(models_of_strong(phi, u))
    if i is not None:
        if i[0] not in u.vocab.actions:
            raise ValueError(f"unknown action {i[0]!r}")
        check_intentions(IntentionDatabase([i]), u.horizon)
    models = {ag: sys.dbs[ag].models for ag in sys.agents}
    models[k] = new_models
    if new_models.is_empty():
        dbs = dict(sys.dbs)
        dbs[k] = BeliefIntentionDatabase(u, new_models, IntentionDatabase())
        mine = [c for c in sys.collective if c.involves(k)]
        keep = [c for c in sys.collective if not c.involves(k)]
        return MasRevisionResult(sys.replace(dbs=dbs, collective=keep), mine,
                                 {k: list(db.intentions)}, inconsistent=True)

    mine = [c for c in sys.collective if c.involves(k)]
    others = [c for c in sys.collective if not c.involves(k)]
    units = []
    if i is not None:
        units.append(_Unit(frozenset({(k, i[0], i[1])})))
    old = [x for x in _individual_units(sys, k) if i is None or x.triples != units[0].triples]
    units += _by_time(_collective_units(mine) + old)
    accepted = _greedy_units(units, models, sys.agents, check={k})
    kept_c = [x.collective for x in accepted if x.collective is not None]
    kept_i = [(a, t) for x in accepted if x.collective is None for (_, a, t) in x.triples]

    # other agents only lose collectives; drop what they can no longer honour
    collective = [c for c in sys.collective if c in kept_c or c in others]
    collective = _repair(sys, models, collective, skip={k})
    dbs = dict(sys.dbs)
    dbs[k] = BeliefIntentionDatabase(u, new_models, IntentionDatabase(kept_i))
    dropped_c = [c for c in sys.collective if c not in collective]
    dropped_i = {k: [x for x in db.intentions if x not in kept_i]}
    return MasRevisionResult(sys.replace(dbs=dbs, collective=collective), dropped_c, dropped_i)


def _repair(sys, models, collective, skip=()):
    """Drop collectives (latest first) until every agent outside ``skip``
    is coherent with its view."""
    collective = list(collective)
    for ag in sys.agents:
        if ag in skip:
            continue
        while True:
            view = set((ag, a, t) for a, t in sys.dbs[ag].intentions)
            mine = [c for c in collective if c.involves(ag)]
            for c in mine:
                view |= c.triples
            if mas_coherent(models[ag], view, sys.agents) or not mine:
                break
            collective.remove(max(mine, key=lambda c: c.min_time))
    return collective


def new_first(c: CollectiveIntention, sys: MultiAgentSystem) -> List[_Unit]:
    """Default priority: the new collective, then existing collectives by
    time, then individual intentions by time and agent."""
    units = [_Unit(c.triples, c)]
    units += sorted(_collective_units(sys.collective), key=lambda u: u.min_time)
    indiv = [x for ag in sys.agents for x in _individual_units(sys, ag)]
    units += sorted(indiv, key=lambda u: (u.min_time, sys.agents.index(next(iter(u.agents)))))
    return units


def mas_revise_collective(sys: MultiAgentSystem, c: CollectiveIntention,
                          priority: Callable = new_first) -> MasRevisionResult:
    """Add a collective intention, dropping lower-priority intentions so
    that every agent stays coherent.  Beliefs never change.  If ``c`` is
    incoherent on its own for some participant, nothing changes."""
    for ag, a, t in c.triples:
        sys.coordinate(ag)
        if a not in sys.vocab.actions:
            raise ValueError(f"unknown action {a!r}")
        if t >= sys.dbs[ag].universe.horizon:
            from .errors import HorizonError
            raise HorizonError(f"collective intention at time {t} is not below the horizon")
    models = {ag: sys.dbs[ag].models for ag in sys.agents}
    for ag in c.agents:
        if not mas_coherent(models[ag], c.triples, sys.agents):
            return MasRevisionResult(sys, rejected=True)
    units = priority(c, sys)
    accepted = _greedy_units(units, models, sys.agents)
    collective = [x.collective for x in accepted if x.collective is not None]
    dbs = {}
    dropped_i = {}
    for ag in sys.agents:
        kept = [(a, t) for x in accepted if x.collective is None for (g, a, t) in x.triples if g == ag]
        db = sys.dbs[ag]
        dbs[ag] = db.with_intentions(kept)
        dropped_i[ag] = [x for x in db.intentions if x not in kept]
    dropped_c = [x for x in sys.collective if x not in collective]
    return MasRevisionResult(sys.replace(dbs=dbs, collective=collective), dropped_c, dropped_i)
