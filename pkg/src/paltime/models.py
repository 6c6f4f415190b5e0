"""Bounded tree models, the four model conditions and the truth relation.

A tree is stored canonically as nested tuples ``(valmask, children)`` where
``valmask`` is a bit set over the tree's atom tuple and ``children`` is a
tuple of ``(label_index, node)`` pairs sorted by label index.  States are
identified with their address, the sequence of labels leading to them, so
two trees are equal exactly when their canonical forms are.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import HorizonError, ParseError, UnknownAtomError
from .formula import (
    FALSUM_PROP, And, Atom, AtomAt, Box, DoAt, Formula, Label, Not, Post, Pre,
    Prop, Vocabulary, atom_sort_key, close_atoms, label_text, max_time,
    parse_atom, parse_label,
)

Node = Tuple[int, tuple]


def default_atoms(vocab: Vocabulary, formulas: Iterable[Formula] = (), extra: Iterable[Atom] = ()) -> Tuple[Atom, ...]:
    """Plain props, ``pre``/``post`` of single labels and the closure of
    whatever the given formulas and extra atoms mention."""
    from .formula import atoms_of
    found = set(Prop(p) for p in vocab.plain_props)
    for lab in vocab.labels:
        found.add(Pre((lab,)))
        found.add(Post(lab))
    seed = set(extra)
    for f in formulas:
        seed |= atoms_of(f)
    found |= close_atoms(seed)
    return sort_atoms(found)


def sort_atoms(atoms: Iterable[Atom]) -> Tuple[Atom, ...]:
    return tuple(sorted(set(atoms), key=atom_sort_key))


@dataclass(frozen=True)
class Violation:
    condition: str
    node: tuple
    atom: Optional[Atom] = None
    detail: str = ""

    def __str__(self):
        where = ".".join(label_text(a) for a in self.node) or "-"
        extra = f" {self.atom}" if self.atom is not None else ""
        return f"condition {self.condition} at {where}{extra}: {self.detail}".rstrip(": ")


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class BoundedTree:
    """A finite tree of states up to ``horizon`` over a fixed atom tuple."""

    vocab: Vocabulary
    horizon: int
    atoms: Tuple[Atom, ...]
    root: Node

    def __post_init__(self):
        if len(self.atoms) > 62:
            raise ValueError("at most 62 atoms per tree are supported")

    # identity -------------------------------------------------------------
    def _key(self):
        return (self.vocab, self.horizon, self.atoms, self.root)

    def __eq__(self, other):
        return isinstance(other, BoundedTree) and self._key() == other._key()

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self._key())

    # construction ---------------------------------------------------------
    @classmethod
    def from_nodes(cls, vocab: Vocabulary, nodes: Dict[Sequence[Label], Iterable[Atom]],
                   atoms: Iterable[Atom] = None, horizon: int = None) -> "BoundedTree":
        """Build from a map of label sequences to valuations.

        The map must be prefix closed and every branch must reach the
        horizon (default: the longest address).
        """
        nodes = {tuple(k): frozenset(v) for k, v in nodes.items()}
        if () not in nodes:
            raise ValueError("tree has no root")
        if horizon is None:
            horizon = max(len(k) for k in nodes)
        if atoms is None:
            atoms = default_atoms(vocab, extra=[a for v in nodes.values() for a in v])
        atoms = sort_atoms(atoms)
        index = {a: i for i, a in enumerate(atoms)}
        kids: Dict[tuple, list] = {k: [] for k in nodes}
        for k in nodes:
            if len(k) > horizon:
                raise ValueError(f"node {k} is deeper than horizon {horizon}")
            for lab in k:
                if not vocab.is_label(lab):
                    raise ValueError(f"unknown action {lab!r} in node address {k}")
            if k:
                if k[:-1] not in nodes:
                    raise ValueError(f"node {k} has no parent")
                kids[k[:-1]].append(k[-1])

        def build(addr):
            mask = 0
            for a in nodes[addr]:
                if a not in index:
                    raise UnknownAtomError(f"atom {a} is not in the tree's atom set")
                mask |= 1 << index[a]
            labs = sorted(kids[addr], key=vocab.label_index)
            if len(addr) < horizon and not labs:
                raise ValueError(f"node {addr} has no children before the horizon")
            return (mask, tuple((vocab.label_index(l), build(addr + (l,))) for l in labs))

        return cls(vocab, horizon, atoms, build(()))

    # views ----------------------------------------------------------------
    def label(self, idx: int) -> Label:
        return self.vocab.labels[idx]

    def atoms_of_mask(self, mask: int) -> FrozenSet[Atom]:
        return frozenset(a for i, a in enumerate(self.atoms) if mask >> i & 1)

    @cached_property
    def atom_index(self) -> Dict[Atom, int]:
        return {a: i for i, a in enumerate(self.atoms)}

    def _walk(self):
        stack = [((), self.root)]
        while stack:
            addr, node = stack.pop()
            yield addr, node
            for li, child in reversed(node[1]):
                stack.append((addr + (li,), child))

    @cached_property
    def nodes(self) -> Dict[tuple, FrozenSet[Atom]]:
        """Address (tuple of labels) to valuation."""
        return {tuple(self.label(i) for i in addr): self.atoms_of_mask(node[0])
                for addr, node in self._walk()}

    @cached_property
    def _node_masks(self) -> Dict[tuple, Node]:
        return {addr: node for addr, node in self._walk()}

    @cached_property
    def index_paths(self) -> Tuple[Tuple[int, ...], ...]:
        """Full branches as label-index tuples in lexicographic order."""
        return tuple(addr for addr, node in self._walk() if len(addr) == self.horizon)

    @cached_property
    def path_masks(self) -> Tuple[Tuple[int, ...], ...]:
        """For every branch, the valuation masks of its states 0..horizon."""
        out = []
        for p in self.index_paths:
            node = self.root
            masks = [node[0]]
            for li in p:
                node = dict(node[1])[li]
                masks.append(node[0])
            out.append(tuple(masks))
        return tuple(out)

    @property
    def paths(self) -> List["BoundedPath"]:
        return [BoundedPath(tuple(self.label(i) for i in p)) for p in self.index_paths]

    def valuation(self, address: Sequence[Label]) -> FrozenSet[Atom]:
        return self.nodes[tuple(address)]

    def has_path(self, path: "BoundedPath") -> bool:
        return len(path.actions) == self.horizon and tuple(path.actions) in self.nodes

    def model(self, path) -> "BoundedModel":
        if not isinstance(path, BoundedPath):
            path = BoundedPath(tuple(path))
        return BoundedModel(self, path)

    def __repr__(self):
        return f"BoundedTree(horizon={self.horizon}, nodes={len(self._node_masks)})"

    def to_literal(self) -> str:
        return format_tree(self)


@dataclass(frozen=True)
class BoundedPath:
    actions: Tuple[Label, ...]

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    def __str__(self):
        return ".".join(_seq_label(a) for a in self.actions) or "-"


@dataclass(frozen=True)
class BoundedModel:
    tree: BoundedTree
    path: BoundedPath

    def __post_init__(self):
        if not self.tree.has_path(self.path):
            raise ValueError(f"path {self.path} is not a branch of the tree")


# ---------------------------------------------------------------------------
# Model conditions
# ---------------------------------------------------------------------------

def validate_model(tree: BoundedTree, strict_pre: bool = False) -> ValidationReport:
    """Check the four model conditions node by node.

    Conditions 2 and 3 demand a successor, so they are only checked below the
    horizon.  Only atoms of the tree's atom set are considered.  With
    ``strict_pre`` an edge labelled ``a`` also requires ``pre(a)`` at its
    source whenever ``pre(a)`` is in the atom set.
    """
    report = ValidationReport()
    atoms = set(tree.atoms)
    for addr, val in tree.nodes.items():
        depth = len(addr)
        children = {a: tree.nodes[addr + (a,)] for a in tree.vocab.labels if addr + (a,) in tree.nodes}
        for a, cval in children.items():
            pa = Post(a)
            if pa in atoms and pa not in cval:
                report.violations.append(Violation("1", addr + (a,), pa, "edge without post"))
            if strict_pre and Pre((a,)) in atoms and Pre((a,)) not in val:
                report.violations.append(Violation("A9*", addr, Pre((a,)), "edge without pre"))
        if depth < tree.horizon and not children:
            report.violations.append(Violation("serial", addr, None, "no successor"))
        for atom in val:
            if not isinstance(atom, Pre):
                continue
            seq = atom.actions
            if depth < tree.horizon:
                first = seq[0]
                if first not in children:
                    report.violations.append(Violation("2" if len(seq) == 1 else "3", addr, atom,
                                                       f"no {label_text(first)}-successor"))
                elif len(seq) > 1:
                    rest = Pre(seq[1:])
                    if rest in atoms and rest not in children[first]:
                        report.violations.append(Violation("3", addr, atom, f"successor lacks {rest}"))
            if len(seq) > 1:
                head = Pre(seq[:-1])
                if head in atoms and head not in val:
                    report.violations.append(Violation("4", addr, atom, f"missing {head}"))
    return report


def path_equiv(tree: BoundedTree, p1: BoundedPath, p2: BoundedPath, t: int) -> bool:
    """Paths agree on their first ``t`` actions, hence on states 0..t."""
    if t > tree.horizon or t < 0:
        raise HorizonError(f"time {t} outside horizon {tree.horizon}")
    for p in (p1, p2):
        if not tree.has_path(p):
            raise ValueError(f"path {p} is not a branch of the tree")
    return p1.actions[:t] == p2.actions[:t]


# ---------------------------------------------------------------------------
# Truth
# ---------------------------------------------------------------------------

def check_depth(f: Formula, horizon: int) -> None:
    _, depth = max_time(f)
    if depth > horizon:
        raise HorizonError(f"formula needs depth {depth} but horizon is {horizon}")


def evaluate(model: BoundedModel, f: Formula) -> bool:
    """Truth of ``f`` at the start of the model's path.

    A reference implementation that walks the formula over one path; the
    solver has a vectorised equivalent for whole universes.
    """
    tree = model.tree
    check_depth(f, tree.horizon)
    index = tree.atom_index
    paths = tree.index_paths
    masks = tree.path_masks
    labels = tree.vocab
    pos = paths.index(tuple(labels.label_index(a) for a in model.path.actions))

    def holds(g: Formula, k: int) -> bool:
        if isinstance(g, AtomAt):
            i = index.get(g.atom)
            if i is None:
                if g.atom == FALSUM_PROP:
                    return False
                raise UnknownAtomError(f"atom {g.atom} is not in the tree's atom set")
            return bool(masks[k][g.t] >> i & 1)
        if isinstance(g, DoAt):
            if not labels.is_label(g.action):
                raise ValueError(f"unknown action {g.action!r}")
            return paths[k][g.t] == labels.label_index(g.action)
        if isinstance(g, Not):
            return not holds(g.sub, k)
        if isinstance(g, And):
            return holds(g.left, k) and holds(g.right, k)
        if isinstance(g, Box):
            prefix = paths[k][:g.t]
            return all(holds(g.sub, j) for j, p in enumerate(paths) if p[:g.t] == prefix)
        raise TypeError(f"not a formula: {g!r}")

    return holds(f, pos)


# ---------------------------------------------------------------------------
# Saturated trees
# ---------------------------------------------------------------------------

def saturated_tree(vocab: Vocabulary, shape: Iterable[Sequence[Label]], atoms: Iterable[Atom],
                   horizon: int = None, extra: Dict[Sequence[Label], Iterable[Atom]] = None) -> BoundedTree:
    """The tree with branches ``shape`` whose valuations hold exactly the
    ``pre``/``post`` atoms the shape makes true.

    ``pre(s)`` is put at a node when ``s`` can be executed from it within the
    horizon and ``post(a)`` when the node was reached by ``a``.  ``extra`` adds further
    atoms (typically plain propositions) at given addresses.  The result
    satisfies the model conditions and the strict-precondition variant.
    """
    atoms = sort_atoms(atoms)
    extra = {tuple(k): set(v) for k, v in (extra or {}).items()}
    shape = [tuple(p) for p in shape]
    if horizon is None:
        horizon = max(len(p) for p in shape)
    addrs = {()}
    for p in shape:
        if len(p) != horizon:
            raise ValueError(f"branch {p} does not reach horizon {horizon}")
        for k in range(1, len(p) + 1):
            addrs.add(p[:k])
    nodes = {}
    for addr in addrs:
        val = set()
        for atom in atoms:
            if isinstance(atom, Post) and addr and addr[-1] == atom.action:
                val.add(atom)
            elif isinstance(atom, Pre):
                seq = atom.actions
                if len(addr) + len(seq) <= horizon and addr + seq in addrs:
                    val.add(atom)
        val |= extra.get(addr, set())
        nodes[addr] = val
    return BoundedTree.from_nodes(vocab, nodes, atoms=atoms, horizon=horizon)


# ---------------------------------------------------------------------------
# Tree literal format
# ---------------------------------------------------------------------------

def _seq_label(label: Label) -> str:
    return label if isinstance(label, str) else "(" + "|".join(label) + ")"


def _split_top(text: str, sep: str) -> List[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def format_tree(tree: BoundedTree) -> str:
    lines = []
    for addr, val in tree.nodes.items():
        seq = ".".join(_seq_label(a) for a in addr) or "-"
        body = ",".join(str(a) for a in sort_atoms(val))
        lines.append(f"{seq} | {body}".rstrip())
    return "\n".join(lines)


def parse_tree(text: str, vocab: Vocabulary, atoms: Iterable[Atom] = None, horizon: int = None) -> BoundedTree:
    """Read the ``SEQ | atom,atom,...`` literal; the root is written ``-``."""
    nodes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = _split_top(line, "|")
        if len(parts) != 2:
            raise ParseError("expected 'SEQ | atoms'", line=lineno)
        seq_text, body = parts[0].strip(), parts[1].strip()
        try:
            if seq_text == "-":
                addr = ()
            else:
                addr = tuple(parse_label(s.strip(), vocab) for s in seq_text.split("."))
            val = [parse_atom(s.strip(), vocab) for s in _split_top(body, ",") if s.strip()]
        except ParseError as e:
            raise ParseError(str(e), line=lineno) from e
        if addr in nodes:
            raise ParseError(f"duplicate node {seq_text}", line=lineno)
        nodes[addr] = val
    if not nodes:
        raise ParseError("empty tree literal")
    try:
        return BoundedTree.from_nodes(vocab, nodes, atoms=atoms, horizon=horizon)
    except (ValueError, UnknownAtomError) as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(str(e)) from e
