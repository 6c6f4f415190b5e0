"""Bounded model enumeration, satisfiability, entailment and msb sets.

A :class:`Universe` is a finite list of valid trees over one vocabulary,
horizon and atom tuple.  All (tree, path) models of the universe are laid out
tree-major, paths in lexicographic order, so that the models sharing a tree
and an action prefix always form a contiguous block.  Formulas are evaluated
once over all models as boolean numpy arrays; a box is a minimum over those
blocks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CapExceededError, HorizonError, UnknownAtomError, UniverseMismatchError
from .formula import (
    BOTTOM, FALSUM_PROP, TOP, And, Atom, AtomAt, Box, DoAt, Formula, Not, Post,
    Pre, Vocabulary, conj, disj, Diamond, is_strong_belief, max_time,
)
from .models import BoundedModel, BoundedTree, sort_atoms, validate_model

DEFAULT_CAP = 5_000_000

_enum = __import__("builtins").enumerate


class Universe:
    """All trees considered possible, with vectorised formula evaluation."""

    def __init__(self, vocab: Vocabulary, horizon: int, atoms: Sequence[Atom],
                 trees: Sequence[BoundedTree], strict_pre: bool = False):
        self.vocab = vocab
        self.horizon = horizon
        self.atoms = sort_atoms(atoms)
        self.trees = list(trees)
        self.strict_pre = strict_pre
        self._cache: Dict[Formula, np.ndarray] = {}
        self._index = {t: i for i, t in _enum(self.trees)}
        if len(self._index) != len(self.trees):
            raise ValueError("duplicate trees in universe")

    @classmethod
    def from_trees(cls, trees: Sequence[BoundedTree], strict_pre: bool = False,
                   validate: bool = True) -> "Universe":
        """A declared universe; every tree must share vocabulary, horizon and
        atom set and satisfy the model conditions."""
        trees = list(trees)
        if not trees:
            raise ValueError("a declared universe needs at least one tree")
        first = trees[0]
        for t in trees:
            if (t.vocab, t.horizon, t.atoms) != (first.vocab, first.horizon, first.atoms):
                raise UniverseMismatchError("trees disagree on vocabulary, horizon or atom set")
            if validate:
                report = validate_model(t, strict_pre=strict_pre)
                if not report.ok:
                    raise ValueError("invalid tree in universe: " + "; ".join(map(str, report.violations)))
        seen, unique = set(), []
        for t in trees:
            if t not in seen:
                seen.add(t)
                unique.append(t)
        return cls(first.vocab, first.horizon, first.atoms, unique, strict_pre)

    def __len__(self):
        return len(self.trees)

    def __repr__(self):
        return f"Universe(trees={len(self.trees)}, horizon={self.horizon}, atoms={len(self.atoms)})"

    def index(self, tree: BoundedTree) -> int:
        try:
            return self._index[tree]
        except KeyError:
            raise UniverseMismatchError("tree is not part of this universe") from None

    def restrict(self, tree_indices: Iterable[int]) -> "Universe":
        """Sub-universe over the given trees (in the given order)."""
        return Universe(self.vocab, self.horizon, self.atoms,
                        [self.trees[i] for i in tree_indices], self.strict_pre)

    # model layout ---------------------------------------------------------
    @cached_property
    def _layout(self):
        tree_of, acts, vals, starts = [], [], [], []
        for ti, tree in _enum(self.trees):
            starts.append(len(tree_of))
            for p, masks in zip(tree.index_paths, tree.path_masks):
                tree_of.append(ti)
                acts.append(p)
                vals.append(masks)
        h = self.horizon
        tree_of = np.asarray(tree_of, dtype=np.int64)
        acts = np.asarray(acts, dtype=np.int64).reshape(len(tree_of), h)
        vals = np.asarray(vals, dtype=np.int64).reshape(len(tree_of), h + 1)
        return tree_of, acts, vals, np.asarray(starts, dtype=np.int64)

    @property
    def model_count(self) -> int:
        return len(self._layout[0])

    @property
    def tree_of_model(self) -> np.ndarray:
        return self._layout[0]

    @property
    def tree_starts(self) -> np.ndarray:
        return self._layout[3]

    @cached_property
    def _groups(self):
        """For each t, (block start indices, block id per model) of models
        sharing their tree and first t actions."""
        tree_of, acts, _, _ = self._layout
        m = len(tree_of)
        out = []
        for t in range(self.horizon + 1):
            if m == 0:
                out.append((np.zeros(0, np.int64), np.zeros(0, np.int64)))
                continue
            change = np.zeros(m, dtype=bool)
            change[0] = True
            change[1:] = tree_of[1:] != tree_of[:-1]
            if t:
                change[1:] |= np.any(acts[1:, :t] != acts[:-1, :t], axis=1)
            starts = np.flatnonzero(change)
            gid = np.cumsum(change) - 1
            out.append((starts, gid))
        return out

    def model(self, k: int) -> BoundedModel:
        tree = self.trees[int(self.tree_of_model[k])]
        acts = self._layout[1][k]
        return tree.model(tuple(tree.label(int(i)) for i in acts))

    # evaluation -----------------------------------------------------------
    def check(self, f: Formula) -> None:
        _, depth = max_time(f)
        if depth > self.horizon:
            raise HorizonError(f"formula needs depth {depth} but horizon is {self.horizon}")

    def eval(self, f: Formula) -> np.ndarray:
        """Truth value of ``f`` in every model, as a boolean array."""
        self.check(f)
        return self._eval(f)

    def _eval(self, f: Formula) -> np.ndarray:
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        tree_of, acts, vals, _ = self._layout
        if isinstance(f, AtomAt):
            try:
                i = self.atoms.index(f.atom)
            except ValueError:
                if f.atom != FALSUM_PROP:
                    raise UnknownAtomError(f"atom {f.atom} is not in the universe's atom set") from None
                out = np.zeros(len(tree_of), dtype=bool)
            else:
                out = (vals[:, f.t] >> i & 1).astype(bool)
        elif isinstance(f, DoAt):
            if not self.vocab.is_label(f.action):
                raise ValueError(f"unknown action {f.action!r}")
            out = acts[:, f.t] == self.vocab.label_index(f.action)
        elif isinstance(f, Not):
            out = ~self._eval(f.sub)
        elif isinstance(f, And):
            out = self._eval(f.left) & self._eval(f.right)
        elif isinstance(f, Box):
            sub = self._eval(f.sub)
            starts, gid = self._groups[f.t]
            if len(sub):
                out = np.minimum.reduceat(sub, starts)[gid]
            else:
                out = sub
        else:
            raise TypeError(f"not a formula: {f!r}")
        out.setflags(write=False)
        self._cache[f] = out
        return out

    def eval_all(self, fs: Iterable[Formula]) -> np.ndarray:
        out = np.ones(self.model_count, dtype=bool)
        for f in fs:
            out = out & self.eval(f)
        return out

    def per_tree(self, model_mask: np.ndarray, how: str = "all") -> np.ndarray:
        """Collapse a model mask to trees (``all`` or ``any`` of its paths)."""
        if len(model_mask) == 0:
            return np.zeros(len(self.trees), dtype=bool)
        op = np.minimum if how == "all" else np.maximum
        return op.reduceat(model_mask, self.tree_starts)

    def tree_mask(self, f: Formula) -> np.ndarray:
        """Trees on which the strong formula ``f`` holds (path independent)."""
        m = self.eval(f)
        lo, hi = self.per_tree(m, "all"), self.per_tree(m, "any")
        if np.any(lo != hi):
            raise ValueError(f"formula is not path independent: {f}")
        return lo

    def msb(self, tree_mask) -> "MsbSet":
        return MsbSet(self, np.asarray(tree_mask, dtype=bool))

    def all_trees(self) -> "MsbSet":
        return self.msb(np.ones(len(self.trees), dtype=bool))

    def no_trees(self) -> "MsbSet":
        return self.msb(np.zeros(len(self.trees), dtype=bool))

    def msb_of(self, trees: Iterable[BoundedTree]) -> "MsbSet":
        mask = np.zeros(len(self.trees), dtype=bool)
        for t in trees:
            mask[self.index(t)] = True
        return self.msb(mask)


class MsbSet:
    """A set of trees of one universe, standing for all their (tree, path)
    models; membership never depends on the path."""

    __slots__ = ("universe", "mask", "_key")

    def __init__(self, universe: Universe, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (len(universe.trees),):
            raise ValueError("mask does not match universe size")
        mask.setflags(write=False)
        self.universe = universe
        self.mask = mask
        self._key = mask.tobytes()

    def _same(self, other: "MsbSet"):
        if other.universe is not self.universe:
            raise UniverseMismatchError("msb sets from different universes")

    def __eq__(self, other):
        return isinstance(other, MsbSet) and other.universe is self.universe and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return int(self.mask.sum())

    def __iter__(self):
        return (self.universe.trees[i] for i in np.flatnonzero(self.mask))

    def __contains__(self, tree):
        i = self.universe._index.get(tree)
        return i is not None and bool(self.mask[i])

    def __and__(self, other):
        self._same(other)
        return MsbSet(self.universe, self.mask & other.mask)

    def __or__(self, other):
        self._same(other)
        return MsbSet(self.universe, self.mask | other.mask)

    def __sub__(self, other):
        self._same(other)
        return MsbSet(self.universe, self.mask & ~other.mask)

    def __le__(self, other):
        self._same(other)
        return not np.any(self.mask & ~other.mask)

    def complement(self) -> "MsbSet":
        return MsbSet(self.universe, ~self.mask)

    def is_empty(self) -> bool:
        return not self.mask.any()

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def trees(self) -> List[BoundedTree]:
        return list(self)

    def model_mask(self) -> np.ndarray:
        return self.mask[self.universe.tree_of_model]

    def __repr__(self):
        return f"MsbSet({len(self)}/{len(self.universe.trees)} trees)"


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def enumerate_universe(vocab: Vocabulary, horizon: int = None, atoms: Iterable[Atom] = None,
                       cap: int = DEFAULT_CAP, strict_pre: bool = False) -> Universe:
    """Every tree up to ``horizon`` whose valuations range over ``atoms`` and
    that satisfies the model conditions.

    Trees are counted before they are built, so a too-large request fails
    fast with :class:`CapExceededError`.
    """
    from .models import default_atoms
    if horizon is None:
        horizon = vocab.horizon
    if horizon < 0:
        raise HorizonError("horizon must be a natural number")
    atoms = sort_atoms(default_atoms(vocab) if atoms is None else atoms)
    if len(atoms) > 20:
        raise CapExceededError(f"{len(atoms)} atoms give {2 ** len(atoms)} valuations per state")
    enum = _Enumerator(vocab, horizon, atoms, strict_pre)
    counts = enum.count(0, -1)
    total = 0
    for v, c in _enum(counts):
        total += c
        if total > cap:
            raise CapExceededError(
                f"more than {cap} trees (at least {total}); first uncounted configuration: "
                f"root valuation {{{', '.join(str(a) for a in _mask_atoms(atoms, v))}}}")
    trees = [BoundedTree(vocab, horizon, atoms, node) for node in enum.build(0, -1)]
    return Universe(vocab, horizon, atoms, trees, strict_pre)


# ``enumerate`` shadows the builtin inside this module; internal code uses
# ``_enum``.
def enumerate(vocab: Vocabulary, horizon: int = None, atom_set: Iterable[Atom] = None,
              cap: int = DEFAULT_CAP, strict_pre: bool = False) -> Universe:  # noqa: A001
    return enumerate_universe(vocab, horizon, atom_set, cap, strict_pre)


def count_trees(vocab: Vocabulary, horizon: int, atoms: Iterable[Atom], strict_pre: bool = False) -> int:
    atoms = sort_atoms(atoms)
    return sum(_Enumerator(vocab, horizon, atoms, strict_pre).count(0, -1))


def _mask_atoms(atoms, mask):
    return [a for i, a in _enum(atoms) if mask >> i & 1]


class _Enumerator:
    def __init__(self, vocab, horizon, atoms, strict_pre):
        self.vocab = vocab
        self.h = horizon
        self.atoms = atoms
        self.labels = vocab.labels
        idx = {a: i for i, a in _enum(atoms)}
        n = len(atoms)
        L = len(self.labels)
        self.nval = 1 << n
        lab_index = {lab: i for i, lab in _enum(self.labels)}
        # per valuation: validity (condition 4), required child labels,
        # per-label atoms required in the child, labels allowed by A9*
        post_bit = [1 << idx[Post(l)] if Post(l) in idx else 0 for l in self.labels]
        self.post_bit = post_bit
        self.ok4 = []
        self.req = []
        self.child_req = []
        self.allowed = []
        for v in range(self.nval):
            ok = True
            req = 0
            creq = [0] * L
            for i, a in _enum(atoms):
                if not (v >> i & 1) or not isinstance(a, Pre):
                    continue
                seq = a.actions
                if len(seq) > 1:
                    head = Pre(seq[:-1])
                    if head in idx and not (v >> idx[head] & 1):
                        ok = False
                first = lab_index[seq[0]]
                req |= 1 << first
                if len(seq) > 1 and Pre(seq[1:]) in idx:
                    creq[first] |= 1 << idx[Pre(seq[1:])]
            allowed = (1 << L) - 1
            if strict_pre:
                for li, lab in _enum(self.labels):
                    p = Pre((lab,))
                    if p in idx and not (v >> idx[p] & 1):
                        allowed &= ~(1 << li)
            self.ok4.append(ok)
            self.req.append(req)
            self.child_req.append(creq)
            self.allowed.append(allowed)
        self._counts = {}
        self._sup = {}
        self._built = {}
        self._built_sup = {}

    def _vals(self, inc):
        need = self.post_bit[inc] if inc >= 0 else 0
        return [v for v in range(self.nval) if self.ok4[v] and v & need == need]

    def _subsets(self, v):
        req, allowed = self.req[v], self.allowed[v]
        if req & ~allowed:
            return []
        free = allowed & ~req
        bits = [1 << i for i in range(len(self.labels)) if free >> i & 1]
        out = []
        for r in range(len(bits) + 1):
            for combo in itertools.combinations(bits, r):
                s = req | sum(combo)
                if s:
                    out.append(s)
        out.sort()
        return out

    def count(self, d, inc):
        key = (d, inc)
        if key in self._counts:
            return self._counts[key]
        out = [0] * self.nval
        for v in self._vals(inc):
            if d == self.h:
                out[v] = 1
                continue
            total = 0
            for s in self._subsets(v):
                prod = 1
                for li in range(len(self.labels)):
                    if s >> li & 1:
                        prod *= self._sup_count(d + 1, li, self.child_req[v][li])
                        if not prod:
                            break
                total += prod
            out[v] = total
        self._counts[key] = out
        return out

    def _sup_count(self, d, li, need):
        key = (d, li, need)
        if key not in self._sup:
            counts = self.count(d, li)
            self._sup[key] = sum(c for u, c in _enum(counts) if u & need == need)
        return self._sup[key]

    def build(self, d, inc):
        key = (d, inc)
        if key in self._built:
            return self._built[key]
        out = []
        per_val = {}
        for v in self._vals(inc):
            nodes = []
            if d == self.h:
                nodes.append((v, ()))
            else:
                for s in self._subsets(v):
                    lis = [li for li in range(len(self.labels)) if s >> li & 1]
                    choices = [self._sup_build(d + 1, li, self.child_req[v][li]) for li in lis]
                    for combo in itertools.product(*choices):
                        nodes.append((v, tuple(zip(lis, combo))))
            per_val[v] = nodes
            out.extend(nodes)
        self._built[key] = out
        self._built[(d, inc, "by_val")] = per_val
        return out

    def _sup_build(self, d, li, need):
        key = (d, li, need)
        if key not in self._built_sup:
            self.build(d, li)
            per_val = self._built[(d, li, "by_val")]
            self._built_sup[key] = [n for u in sorted(per_val) if u & need == need for n in per_val[u]]
        return self._built_sup[key]


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------

def satisfiable(fs: Iterable[Formula], u: Universe) -> Optional[BoundedModel]:
    """First model (in universe order) of all ``fs``, or ``None``."""
    mask = u.eval_all(fs)
    hits = np.flatnonzero(mask)
    return u.model(int(hits[0])) if len(hits) else None


def entails(premises: Iterable[Formula], f: Formula, u: Universe) -> bool:
    """Every model of ``premises`` satisfies ``f``."""
    prem = u.eval_all(premises)
    return not np.any(prem & ~u.eval(f))


def models_of_strong(f: Formula, u: Universe) -> MsbSet:
    if not is_strong_belief(f):
        raise ValueError(f"not a strong belief formula: {f}")
    return MsbSet(u, u.tree_mask(f))


def path_formula(tree: BoundedTree, k: int) -> Formula:
    """Conjunction describing branch ``k`` completely: at every time the
    true atoms, the negated false atoms and the action taken."""
    path = tree.index_paths[k]
    masks = tree.path_masks[k]
    parts = []
    for n in range(tree.horizon + 1):
        for i, a in _enum(tree.atoms):
            g = AtomAt(a, n)
            parts.append(g if masks[n] >> i & 1 else Not(g))
        if n < tree.horizon:
            parts.append(DoAt(tree.label(path[n]), n))
    return conj(parts)


@lru_cache(maxsize=4096)
def tree_formula(tree: BoundedTree) -> Formula:
    """Strong formula true exactly on ``tree`` among valid trees with the
    same vocabulary, horizon and atom set.

    Every branch is possible and every possible branch is one of them.  The
    second half is the positive form of negating all the branch descriptions
    the tree lacks.
    """
    alphas = [path_formula(tree, k) for k in range(len(tree.index_paths))]
    return And(conj([Diamond(0, a) for a in alphas], balanced=True),
               Box(0, disj(alphas, balanced=True)))


def characteristic_formula(s: MsbSet) -> Formula:
    """Strong belief formula whose models are exactly the trees of ``s``."""
    trees = s.trees
    if not trees:
        return BOTTOM
    if len(trees) == len(s.universe.trees):
        return TOP
    return disj([tree_formula(t) for t in trees], balanced=True)
