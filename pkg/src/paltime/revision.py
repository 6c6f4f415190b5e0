"""Single-step revision of beliefs and intentions.

Beliefs are revised by minimisation over a faithful order (ranks over
trees); intentions are then chosen by a selection function that only sees
the revised belief models, the old intentions and the new intention.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .database import (
    BeliefIntentionDatabase, Intention, IntentionDatabase, check_intentions,
    cohere_trees, coherent_with,
)
from .errors import UniverseMismatchError
from .formula import BOTTOM, And, Formula, Not, is_strong_belief, label_text, max_time
from .solver import MsbSet, Universe, characteristic_formula, models_of_strong

log = logging.getLogger(__name__)

Selector = Callable[[MsbSet, IntentionDatabase, Optional[Intention]], IntentionDatabase]


@dataclass(frozen=True)
class RevisionInput:
    new_belief: Formula
    new_intention: Optional[Intention] = None

    def __post_init__(self):
        if not is_strong_belief(self.new_belief):
            raise ValueError(f"revision input must be a strong belief formula: {self.new_belief}")


class FaithfulOrder:
    """A total pre-order over trees given by natural-number ranks."""

    def __init__(self, universe: Universe, ranks):
        ranks = np.asarray(ranks, dtype=np.int64)
        if ranks.shape != (len(universe.trees),):
            raise ValueError("one rank per tree is required")
        if np.any(ranks < 0):
            raise ValueError("ranks are natural numbers")
        self.universe = universe
        self.ranks = ranks

    @classmethod
    def from_beliefs(cls, models: MsbSet, other: int = 1) -> "FaithfulOrder":
        """Rank 0 for belief models and ``other`` for every other tree."""
        return cls(models.universe, np.where(models.mask, 0, other))

    def rank_of(self, tree) -> int:
        return int(self.ranks[self.universe.index(tree)])

    def is_faithful_for(self, models: MsbSet) -> bool:
        """Belief models are exactly the strictly minimal trees.

        Ranks live on trees, so models sharing a tree are always tied.
        """
        if models.universe is not self.universe:
            return False
        if models.is_empty():
            return True
        low = self.ranks[models.mask]
        return bool(np.all(low == low[0]) and np.all(self.ranks[~models.mask] > low[0]))

    def minimal(self, candidates: MsbSet) -> MsbSet:
        """``min(candidates, <=)``."""
        if candidates.is_empty():
            return candidates
        best = self.ranks[candidates.mask].min()
        return MsbSet(self.universe, candidates.mask & (self.ranks == best))


# ---------------------------------------------------------------------------
# Selection functions
# ---------------------------------------------------------------------------

def _greedy(models: MsbSet, I: IntentionDatabase, i: Optional[Intention], order) -> IntentionDatabase:
    u = models.universe
    current = IntentionDatabase()
    if i is not None and coherent_with(models, [i]):
        current = IntentionDatabase([i])
    support = models.mask & cohere_trees(current, u)
    if not support.any():
        return current
    for j in order(list(I)):
        if not current.can_add(j) or j in current:
            continue
        cand = current.add(j)
        mask = support & cohere_trees(cand, u)
        if mask.any():
            current, support = cand, mask
    return current


def temporal_selector(models: MsbSet, I, i: Optional[Intention] = None) -> IntentionDatabase:
    """Keep ``i`` if possible, then old intentions earliest first."""
    return _greedy(models, IntentionDatabase.of(I), i, lambda xs: sorted(xs, key=lambda x: x[1]))


def latest_first_selector(models: MsbSet, I, i: Optional[Intention] = None) -> IntentionDatabase:
    """Keep ``i`` if possible, then old intentions latest first."""
    return _greedy(models, IntentionDatabase.of(I), i, lambda xs: sorted(xs, key=lambda x: -x[1]))


SELECTORS: Dict[str, Selector] = {
    "temporal": temporal_selector,
    "latest_first": latest_first_selector,
}


def get_selector(selector) -> Selector:
    if selector is None:
        return temporal_selector
    if callable(selector):
        return selector
    try:
        return SELECTORS[selector]
    except KeyError:
        raise ValueError(f"unknown selection strategy {selector!r}") from None


def select_intentions(beliefs_models: MsbSet, I, i: Optional[Intention] = None,
                      strategy="temporal") -> IntentionDatabase:
    I = IntentionDatabase.of(I)
    check_intentions(I, beliefs_models.universe.horizon)
    if i is not None:
        check_intentions(IntentionDatabase([i]), beliefs_models.universe.horizon)
    return get_selector(strategy)(beliefs_models, I, i)


# ---------------------------------------------------------------------------
# Revision
# ---------------------------------------------------------------------------

@dataclass
class RevisionResult:
    db: BeliefIntentionDatabase
    inconsistent: bool = False

    @property
    def intentions(self) -> IntentionDatabase:
        return self.db.intentions

    @property
    def models(self) -> MsbSet:
        return self.db.models


def revised_formula(db: BeliefIntentionDatabase, phi: Formula, phi_models: MsbSet, new: MsbSet) -> Optional[Formula]:
    """A readable formula for the revised models when one is at hand."""
    if new.is_empty():
        return BOTTOM
    if new == phi_models:
        return phi
    if db.has_formula and new == (db.models & phi_models):
        return And(db.beliefs, phi)
    return None


def revise(db: BeliefIntentionDatabase, new_belief, new_intention: Optional[Intention] = None,
           order: FaithfulOrder = None, selector="temporal") -> RevisionResult:
    """Revise ``db`` by a strong belief and an optional intention.

    The new belief models are the minimal models of ``new_belief`` under
    ``order`` (default: belief models first, everything else second); the
    intentions are chosen by ``selector`` from those models alone.
    """
    if isinstance(new_belief, RevisionInput):
        new_belief, new_intention = new_belief.new_belief, new_belief.new_intention
    u = db.universe
    if order is None:
        order = FaithfulOrder.from_beliefs(db.models)
    elif order.universe is not u:
        raise UniverseMismatchError("order belongs to another universe")
    elif not order.is_faithful_for(db.models):
        raise ValueError("order is not faithful to the database's beliefs")
    phi_models = models_of_strong(new_belief, u)
    if new_intention is not None:
        check_intentions(IntentionDatabase([new_intention]), u.horizon)
    new = order.minimal(phi_models)
    if new.is_empty():
        log.warning("revision by an unsatisfiable belief; beliefs become inconsistent")
        out = BeliefIntentionDatabase(u, new, IntentionDatabase(), BOTTOM)
        return RevisionResult(out, inconsistent=True)
    intentions = get_selector(selector)(new, db.intentions, new_intention)
    out = BeliefIntentionDatabase(u, new, intentions, revised_formula(db, new_belief, phi_models, new))
    return RevisionResult(out)


# ---------------------------------------------------------------------------
# Postulate verification
# ---------------------------------------------------------------------------

POSTULATE_IDS = tuple(f"P{k}" for k in range(1, 13))


@dataclass
class PostulateReport:
    ids: Sequence[str]
    checked: Dict[str, int] = field(default_factory=dict)
    violations: Dict[str, List[str]] = field(default_factory=dict)
    probes: List[str] = field(default_factory=list)
    partial: bool = False

    def __post_init__(self):
        for k in self.ids:
            self.checked.setdefault(k, 0)
            self.violations.setdefault(k, [])

    def record(self, pid: str, ok: bool, cex: Callable[[], str]):
        self.checked[pid] += 1
        if not ok and len(self.violations[pid]) < 5:
            self.violations[pid].append(cex())
        elif not ok:
            self.violations[pid].append("")

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def violation_count(self, pid: str = None) -> int:
        if pid is None:
            return sum(len(v) for v in self.violations.values())
        return len(self.violations[pid])

    def lines(self) -> List[str]:
        """``POSTULATE <id> PASS|FAIL [counterexample]`` per id, then probes."""
        out = []
        for k in self.ids:
            v = self.violations[k]
            out.append(f"POSTULATE {k} FAIL [{v[0]}]" if v else f"POSTULATE {k} PASS")
        out.extend(self.probes)
        if self.partial:
            out.append("PARTIAL budget exhausted before the instance space was covered")
        return out

    def stats(self) -> List[str]:
        return [f"{k}: {len(self.violations[k])} violations in {self.checked[k]} checks" for k in self.ids]

    def merge(self, other: "PostulateReport") -> "PostulateReport":
        for k in other.ids:
            self.checked[k] = self.checked.get(k, 0) + other.checked[k]
            self.violations.setdefault(k, []).extend(other.violations[k])
        self.probes.extend(other.probes)
        self.partial = self.partial or other.partial
        return self


class BitUniverse:
    """A small universe with trees as bits of a Python int, for fast
    exhaustive checking.  Support sets of ``Cohere(I)`` are precomputed."""

    def __init__(self, universe: Universe, max_time: int = None):
        self.universe = universe
        self.n = len(universe.trees)
        self.full = (1 << self.n) - 1
        horizon = universe.horizon
        if max_time is None:
            max_time = horizon - 1
        self.times = list(range(max_time + 1))
        labels = universe.vocab.labels
        self.intentions = [(a, t) for t in self.times for a in labels]
        self.databases = []
        for choice in itertools.product(*[[None] + list(labels) for _ in self.times]):
            self.databases.append(IntentionDatabase((a, t) for t, a in zip(self.times, choice) if a is not None))
        self.support = {I: self.to_bits(cohere_trees(I, universe)) for I in self.databases}

    def to_bits(self, mask) -> int:
        out = 0
        for k in np.flatnonzero(mask):
            out |= 1 << int(k)
        return out

    def to_mask(self, bits: int) -> np.ndarray:
        return np.array([(bits >> k) & 1 for k in range(self.n)], dtype=bool)

    def coherent(self, bits: int, I: IntentionDatabase) -> bool:
        return bool(bits & self.support[I])


def bit_minimal(ranks: Sequence[int], phi: int) -> int:
    best, out = None, 0
    k = 0
    while phi >> k:
        if phi >> k & 1:
            r = ranks[k]
            if best is None or r < best:
                best, out = r, 1 << k
            elif r == best:
                out |= 1 << k
        k += 1
    return out


def bit_select(bu: BitUniverse, bits: int, I: IntentionDatabase, i, order="temporal") -> IntentionDatabase:
    """Greedy selection on bit sets; mirrors :func:`temporal_selector`."""
    current = IntentionDatabase()
    if i is not None and bu.coherent(bits, IntentionDatabase([i])):
        current = IntentionDatabase([i])
    if not bu.coherent(bits, current):
        return current
    items = sorted(I, key=lambda x: x[1], reverse=(order == "latest_first"))
    for j in items:
        if j in current or not current.can_add(j):
            continue
        cand = current.add(j)
        if bu.coherent(bits, cand):
            current = cand
    return current


def _show_bits(bits: int) -> str:
    return "{" + ",".join(str(k) for k in range(bits.bit_length()) if bits >> k & 1) + "}"


def _show_i(i) -> str:
    return "eps" if i is None else f"({label_text(i[0])},{i[1]})"


class BitOperator:
    """Revision ``(psi, I) * (phi, i)`` on bit sets.

    ``family(psi) -> ranks`` is the faithful assignment; ``select`` the
    selection function on bit sets.  Mutants for testing replace either.
    """

    def __init__(self, bu: BitUniverse, family=None, select=None):
        self.bu = bu
        self.family = family or (lambda psi: [0 if psi >> k & 1 else 1 for k in range(bu.n)])
        self.select = select or (lambda bits, I, i: bit_select(bu, bits, I, i))
        self._memo = {}

    def beliefs(self, psi: int, phi: int) -> int:
        key = (psi, phi)
        if key not in self._memo:
            self._memo[key] = bit_minimal(self.family(psi), phi)
        return self._memo[key]

    def __call__(self, psi, I, phi, i):
        new = self.beliefs(psi, phi)
        if not new:
            return new, IntentionDatabase()
        return new, self.select(new, I, i)


def base_rank_family(n: int, seed: int, max_rank: int = 3):
    """Faithful assignment: rank 0 on the beliefs, a fixed random rank in
    ``1..max_rank`` per tree elsewhere."""
    rng = random.Random(seed)
    base = [rng.randint(1, max_rank) for _ in range(n)]
    return lambda psi: [0 if psi >> k & 1 else base[k] for k in range(n)]


def check_postulates_exhaustive(bu: BitUniverse, op: BitOperator, report: PostulateReport,
                                psis: Iterable[int] = None, phis: Iterable[int] = None,
                                budget: int = None, check_p5: bool = True) -> PostulateReport:
    """Every postulate over the given belief sets, all intention databases
    and all new intentions (plus none)."""
    psis = list(range(1 << bu.n)) if psis is None else list(psis)
    phis = list(range(1 << bu.n)) if phis is None else list(phis)
    phis = [p for p in phis if p]
    news = [None] + bu.intentions
    p11: Dict[tuple, Tuple[IntentionDatabase, str]] = {}
    steps = 0
    for psi in psis:
        for phi in phis:
            new = op.beliefs(psi, phi)
            ctx = lambda: f"psi={_show_bits(psi)} phi={_show_bits(phi)} psi'={_show_bits(new)}"
            report.record("P1", new & ~phi == 0, ctx)
            if psi & phi:
                report.record("P2", new == psi & phi, ctx)
            report.record("P3", new != 0, ctx)
            for I in bu.databases:
                for i in news:
                    steps += 1
                    if budget is not None and steps > budget:
                        report.partial = True
                        return report
                    _, I2 = op(psi, I, phi, i)
                    _check_intention_postulates(bu, report, new, I, i, I2, p11,
                                                lambda: f"{ctx()} I={I!r} i={_show_i(i)} I'={I2!r}")
    if check_p5:
        _check_p5_p6(bu, op, report, psis, phis)
    return report


def _check_intention_postulates(bu, report, new, I, i, I2, p11, cex):
    report.record("P7", bu.coherent(new, I2), cex)
    if i is not None:
        report.record("P8", (not bu.coherent(new, IntentionDatabase([i]))) or i in I2, cex)
    full = I.items | ({i} if i is not None else set())
    valid_union = I.union_ok(i)
    if valid_union:
        U = IntentionDatabase(full)
        report.record("P9", (not bu.coherent(new, U)) or U.items <= I2.items, cex)
    report.record("P10", I2.items <= full, cex)
    key = (I, i, new)
    prev = p11.get(key)
    if prev is None:
        p11[key] = (I2, cex())
    else:
        report.record("P11", prev[0] == I2, lambda: f"{cex()} vs {prev[1]}")
    maximal = True
    for j in full - I2.items:
        if I2.can_add(j) and bu.coherent(new, I2.add(j)):
            maximal = False
            break
    report.record("P12", maximal, cex)


def _check_p5_p6(bu, op, report, psis, phis):
    phis = list(phis)
    for psi in psis:
        for phi in phis:
            new = op.beliefs(psi, phi)
            for phi2 in phis:
                both = phi & phi2
                if not both:
                    continue
                lhs = new & phi2
                rhs = op.beliefs(psi, both)
                cex = lambda: f"psi={_show_bits(psi)} phi={_show_bits(phi)} phi'={_show_bits(phi2)}"
                report.record("P5", lhs & ~rhs == 0, cex)
                if lhs:
                    report.record("P6", rhs & ~lhs == 0, cex)


def check_p4(universe: Universe, report: PostulateReport, samples: int = 50, seed: int = 0,
             selector="temporal") -> PostulateReport:
    """Syntax independence through the formula-level API: the same belief
    sets written as different formulas revise identically."""
    rng = random.Random(seed)
    n = len(universe.trees)
    bu = BitUniverse(universe)
    for _ in range(samples):
        psi = np.array([rng.random() < 0.5 for _ in range(n)])
        phi = np.array([rng.random() < 0.5 for _ in range(n)])
        if not phi.any():
            phi[rng.randrange(n)] = True
        I = rng.choice(bu.databases)
        i = rng.choice([None] + bu.intentions)
        f_psi = characteristic_formula(universe.msb(psi))
        f_phi = characteristic_formula(universe.msb(phi))
        db1 = BeliefIntentionDatabase.from_formula(f_psi, I, universe)
        db2 = BeliefIntentionDatabase.from_formula(Not(Not(f_psi)), I, universe)
        r1 = revise(db1, f_phi, i, selector=selector)
        r2 = revise(db2, And(f_phi, Not(Not(f_phi))), i, selector=selector)
        ok = r1.models == r2.models and r1.intentions == r2.intentions
        report.record("P4", ok, lambda: f"psi={np.flatnonzero(psi).tolist()} phi={np.flatnonzero(phi).tolist()}")
    return report


def verify_postulates(universe: Universe, order_family=None, samples: int = 2000, seed: int = 0,
                      sub_size: int = 5, sub_count: int = 6, selector=None, budget: int = None) -> PostulateReport:
    """Check P1-P12 for the shipped operator on ``universe``.

    Small random sub-universes of ``sub_size`` trees are checked
    exhaustively over every belief set, intention database and new
    intention; on the full universe ``samples`` random instances are
    checked.  ``order_family`` maps a belief tree mask to ranks;
    ``selector`` is a bit-level selection (for mutation testing).
    """
    report = PostulateReport(POSTULATE_IDS)
    rng = random.Random(seed)
    n = len(universe.trees)
    for s in range(sub_count):
        k = min(sub_size, n)
        sub = universe.restrict(sorted(rng.sample(range(n), k)))
        bu = BitUniverse(sub)
        fams = [None, base_rank_family(bu.n, seed * 1000 + s)] if order_family is None else [order_family]
        for fam in fams:
            op = BitOperator(bu, family=fam, select=_bind_select(bu, selector))
            check_postulates_exhaustive(bu, op, report, budget=budget)
    check_p4(universe.restrict(sorted(rng.sample(range(n), min(8, n)))), report, samples=20, seed=seed)
    if samples:
        _sampled_postulates(universe, report, samples, rng, order_family, selector)
    return report


def _bind_select(bu, selector):
    if selector is None:
        return None
    return lambda bits, I, i: selector(bu, bits, I, i)


def _sampled_postulates(universe, report, samples, rng, order_family, selector):
    """Random instances on a large universe.  Beliefs are random unions of
    small tree sets so that consistent and inconsistent pairs both occur."""
    n = len(universe.trees)
    pool = sorted(rng.sample(range(n), min(n, 24)))
    sub = universe.restrict(pool)
    bu = BitUniverse(sub)
    op = BitOperator(bu, family=order_family, select=_bind_select(bu, selector))
    p11 = {}
    news = [None] + bu.intentions
    for _ in range(samples):
        psi = rng.getrandbits(bu.n) & rng.getrandbits(bu.n)
        phi = rng.getrandbits(bu.n) | (1 << rng.randrange(bu.n))
        I = rng.choice(bu.databases)
        i = rng.choice(news)
        new, I2 = op(psi, I, phi, i)
        ctx = lambda: f"psi={_show_bits(psi)} phi={_show_bits(phi)}"
        report.record("P1", new & ~phi == 0, ctx)
        if psi & phi:
            report.record("P2", new == psi & phi, ctx)
        report.record("P3", new != 0, ctx)
        _check_intention_postulates(bu, report, new, I, i, I2, p11,
                                    lambda: f"{ctx()} I={I!r} i={_show_i(i)} I'={I2!r}")
        phi2 = rng.getrandbits(bu.n)
        both = phi & phi2
        if both:
            lhs, rhs = new & phi2, op.beliefs(psi, both)
            report.record("P5", lhs & ~rhs == 0, ctx)
            if lhs:
                report.record("P6", rhs & ~lhs == 0, ctx)


def drop_old_selector(bu: BitUniverse, bits: int, I, i) -> IntentionDatabase:
    """Broken on purpose: keeps only the new intention."""
    if i is not None and bu.coherent(bits, IntentionDatabase([i])):
        return IntentionDatabase([i])
    return IntentionDatabase()


def probe_joint_vs_separate(db: BeliefIntentionDatabase, phi: Formula, i: Intention,
                            selector="temporal", order: FaithfulOrder = None):
    """Compare ``db * (phi, i)`` with ``(db * (phi, eps)) * (true, i)``.

    Returns ``(joint, separate)`` intention databases; they differ when
    the selector makes the separate route lose an intention.
    """
    from .formula import TOP
    joint = revise(db, phi, i, order=order, selector=selector)
    first = revise(db, phi, None, order=order, selector=selector)
    second = revise(first.db, TOP, i, selector=selector)
    return joint.intentions, second.intentions
