"""Line-oriented database and multi-agent system files.

A file is a list of ``[section]`` blocks; ``#`` starts a comment::

    [actions]     food, cook, equip, nop
    [props]       names of plain propositions (optional)
    [horizon]     2
    [atoms]       pre(food), pre(food,cook), ...   (optional)
    [universe]    tree/saturated blocks (optional; default: enumerate)
    [beliefs]     one formula per line, conjoined
    [intentions]  food @ 0
    [ranking]     RANK <n>: <tree-id>,...          (optional)
    [strata]      <n>: <formula>  and  default: <n>  (optional)

Multi-agent files add ``[agents]`` (optional name list), one
``[agent <name>]`` header per agent followed by that agent's
``[beliefs]``/``[intentions]`` blocks, and ``[collective]`` with lines
``c1: (ag1,fetch,0); (ag2,prep,0)``.

Universe blocks: ``tree <name>`` followed by ``SEQ | atoms`` node lines,
or ``saturated <name>`` followed by branch lines ``SEQ`` (optionally
``SEQ | atoms`` to add atoms at the node ``SEQ``).

With ``[atoms]`` the atom set is exactly the listed atoms.  Without it
the atom set is the plain propositions, ``pre``/``post`` of every single
action (single-agent files only) and the closure of the atoms the
beliefs mention.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .database import BeliefIntentionDatabase, IntentionDatabase
from .errors import ParseError, UnknownAtomError
from .formula import (
    TOP, Formula, Prop, Vocabulary, atoms_of, close_atoms, conj, parse, parse_atom, parse_label,
)
from .iterated import SpohnRanking, parse_ranking
from .models import (
    BoundedTree, _split_top, default_atoms, format_tree, parse_tree, saturated_tree, sort_atoms,
)
from .multiagent import CollectiveIntention, MultiAgentSystem
from .solver import DEFAULT_CAP, Universe, enumerate_universe

_HEADER = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([^\]\s]+))?\s*\]$")
_INTENTION = re.compile(r"^(.+?)\s*@\s*(\d+)$")
_TRIPLE = re.compile(r"^\(\s*([^,()]+?)\s*,\s*(.+?)\s*,\s*(\d+)\s*\)$")

SECTIONS = ("actions", "props", "horizon", "agents", "atoms", "universe", "beliefs", "intentions",
            "ranking", "strata", "agent", "collective")


@dataclass
class _Block:
    name: str
    arg: Optional[str]
    line: int
    lines: List[Tuple[int, str]] = field(default_factory=list)

    def text(self) -> str:
        return "\n".join(s for _, s in self.lines)


def _blocks(text: str) -> List[_Block]:
    out: List[_Block] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m and m.group(1).lower() not in SECTIONS:
            raise ParseError(f"unknown section {line!r}", line=lineno)
        if m:
            name = m.group(1).lower()
            if (name == "agent") != (m.group(2) is not None):
                raise ParseError(f"bad section header {line!r}", line=lineno)
            out.append(_Block(name, m.group(2), lineno))
            continue
        if not out:
            raise ParseError("text before the first section", line=lineno)
        out[-1].lines.append((lineno, line))
    return out


def _names(block: Optional[_Block]) -> List[str]:
    if block is None:
        return []
    return [s for _, line in block.lines for s in re.split(r"[,\s]+", line) if s]


def _formula(text: str, vocab: Vocabulary, lineno: int) -> Formula:
    try:
        return parse(text, vocab)
    except ParseError as e:
        raise ParseError(str(e), line=lineno) from e


def _beliefs(block: Optional[_Block], vocab) -> Formula:
    if block is None or not block.lines:
        return TOP
    return conj([_formula(line, vocab, n) for n, line in block.lines])


def _intentions(block: Optional[_Block], vocab) -> IntentionDatabase:
    items = []
    if block is None:
        return IntentionDatabase()
    for n, line in block.lines:
        m = _INTENTION.match(line)
        if not m:
            raise ParseError("expected 'action @ time'", line=n)
        a = m.group(1).strip()
        if a not in vocab.actions:
            raise ParseError(f"unknown action {a!r}", line=n)
        items.append((a, int(m.group(2))))
    try:
        return IntentionDatabase(items)
    except ValueError as e:
        raise ParseError(str(e), line=block.line) from e


@dataclass
class _Common:
    vocab: Vocabulary
    universe: Universe
    tree_names: Dict[str, int]


def _common(blocks: List[_Block], formulas_of, agents: Sequence[str] = (), horizon: int = None,
            strict_pre: bool = False, cap: int = DEFAULT_CAP) -> _Common:
    top = {}
    for b in blocks:
        if b.name in ("actions", "props", "horizon", "agents", "atoms", "universe"):
            if b.name in top:
                raise ParseError(f"section [{b.name}] given twice", line=b.line)
            top[b.name] = b
    actions = _names(top.get("actions"))
    if not actions:
        raise ParseError("missing [actions]")
    if horizon is None:
        hb = top.get("horizon")
        if hb is None or len(hb.lines) != 1 or not hb.lines[0][1].isdigit():
            raise ParseError("[horizon] must hold one natural number", line=hb.line if hb else None)
        horizon = int(hb.lines[0][1])
    try:
        vocab = Vocabulary(tuple(actions), tuple(_names(top.get("props"))),
                           agent_count=max(1, len(agents)), horizon=horizon)
    except ValueError as e:
        raise ParseError(str(e)) from e

    if "atoms" in top:
        atoms = []
        for n, line in top["atoms"].lines:
            for piece in _split_top(line, ","):
                if piece.strip():
                    try:
                        atoms.append(parse_atom(piece.strip(), vocab))
                    except ParseError as e:
                        raise ParseError(str(e), line=n) from e
        atoms = sort_atoms(atoms)
    else:
        fs = formulas_of(vocab)
        if vocab.agent_count == 1:
            atoms = default_atoms(vocab, fs)
        else:
            found = {Prop(p) for p in vocab.plain_props}
            for f in fs:
                found |= close_atoms(atoms_of(f))
            atoms = sort_atoms(found)

    names: Dict[str, int] = {}
    if "universe" in top:
        trees = _universe(top["universe"], vocab, atoms, horizon)
        try:
            u = Universe.from_trees([t for _, t in trees], strict_pre=strict_pre)
        except ValueError as e:
            raise ParseError(str(e), line=top["universe"].line) from e
        names = {name: u.index(t) for name, t in trees}
    else:
        u = enumerate_universe(vocab, horizon, atoms, cap=cap, strict_pre=strict_pre)
    return _Common(vocab, u, names)


def _universe(block: _Block, vocab, atoms, horizon) -> List[Tuple[str, BoundedTree]]:
    groups: List[Tuple[str, str, int, List[Tuple[int, str]]]] = []
    for n, line in block.lines:
        head = line.split()
        if head[0] in ("tree", "saturated") and len(head) == 2 and "|" not in line:
            groups.append((head[0], head[1], n, []))
        elif not groups:
            raise ParseError("expected 'tree <name>' or 'saturated <name>'", line=n)
        else:
            groups[-1][3].append((n, line))
    out = []
    for kind, name, n, lines in groups:
        try:
            if kind == "tree":
                tree = parse_tree("\n".join(s for _, s in lines), vocab, atoms=atoms, horizon=horizon)
            else:
                shape, extra = [], {}
                for _, s in lines:
                    parts = _split_top(s, "|")
                    seq = tuple(parse_label(x.strip(), vocab) for x in parts[0].strip().split(".")) \
                        if parts[0].strip() != "-" else ()
                    if len(parts) > 1:
                        extra[seq] = [parse_atom(x.strip(), vocab) for x in _split_top(parts[1], ",") if x.strip()]
                    if len(parts) == 1 or len(seq) == horizon:
                        shape.append(seq)
                tree = saturated_tree(vocab, shape, atoms, horizon=horizon, extra=extra)
        except (ValueError, UnknownAtomError) as e:
            raise ParseError(f"tree {name}: {e}", line=n) from e
        out.append((name, tree))
    if len({name for name, _ in out}) != len(out):
        raise ParseError("duplicate tree names", line=block.line)
    return out


# ---------------------------------------------------------------------------
# Single-agent databases
# ---------------------------------------------------------------------------

@dataclass
class DatabaseFile:
    vocab: Vocabulary
    universe: Universe
    beliefs: Formula
    intentions: IntentionDatabase
    tree_names: Dict[str, int] = field(default_factory=dict)
    ranking_text: Optional[str] = None
    strata: Optional[Tuple[List[Tuple[Formula, int]], int]] = None

    def database(self) -> BeliefIntentionDatabase:
        return BeliefIntentionDatabase.from_formula(self.beliefs, self.intentions, self.universe)

    def ranking(self) -> SpohnRanking:
        if self.ranking_text is not None:
            return parse_ranking(self.ranking_text, self.universe)
        if self.strata is not None:
            return SpohnRanking.from_strata(self.universe, *self.strata)
        return SpohnRanking.from_beliefs(self.database().models)


def loads_database(text: str, horizon: int = None, strict_pre: bool = False,
                   cap: int = DEFAULT_CAP) -> DatabaseFile:
    blocks = _blocks(text)
    by = {}
    for b in blocks:
        if b.name in ("agent", "collective", "agents"):
            raise ParseError(f"[{b.name}] belongs in a multi-agent file", line=b.line)
        if b.name in by and b.name in ("beliefs", "intentions", "ranking", "strata"):
            raise ParseError(f"section [{b.name}] given twice", line=b.line)
        by[b.name] = b
    common = _common(blocks, lambda v: [_beliefs(by.get("beliefs"), v)] + [f for f, _ in _strata(by.get("strata"), v)[0]],
                     horizon=horizon, strict_pre=strict_pre, cap=cap)
    vocab = common.vocab
    beliefs = _beliefs(by.get("beliefs"), vocab)
    intentions = _intentions(by.get("intentions"), vocab)
    ranking = by["ranking"].text() if "ranking" in by else None
    strata = _strata(by["strata"], vocab) if "strata" in by else None
    return DatabaseFile(vocab, common.universe, beliefs, intentions, common.tree_names, ranking, strata)


def _strata(block: Optional[_Block], vocab):
    if block is None:
        return [], 0
    out, default = [], None
    for n, line in block.lines:
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "default" and rest.strip().isdigit():
            default = int(rest.strip())
        elif key.isdigit():
            out.append((_formula(rest.strip(), vocab, n), int(key)))
        else:
            raise ParseError("expected '<rank>: <formula>' or 'default: <rank>'", line=n)
    if default is None:
        raise ParseError("[strata] needs a 'default: <rank>' line", line=block.line)
    return out, default


def load_database(path, **kw) -> DatabaseFile:
    return loads_database(Path(path).read_text(encoding="utf-8"), **kw)


# ---------------------------------------------------------------------------
# Multi-agent systems
# ---------------------------------------------------------------------------

@dataclass
class MasFile:
    vocab: Vocabulary
    universe: Universe
    agents: Tuple[str, ...]
    beliefs: Dict[str, Formula]
    intentions: Dict[str, IntentionDatabase]
    collective: Tuple[CollectiveIntention, ...]
    tree_names: Dict[str, int] = field(default_factory=dict)

    def system(self) -> MultiAgentSystem:
        dbs = {ag: BeliefIntentionDatabase.from_formula(self.beliefs[ag], self.intentions[ag], self.universe)
               for ag in self.agents}
        return MultiAgentSystem(self.agents, dbs, self.collective)


def parse_collective_line(line: str, agents: Sequence[str], vocab: Vocabulary, lineno: int = None) -> CollectiveIntention:
    name, sep, body = line.partition(":")
    if not sep:
        name, body = "", line
    triples = []
    for piece in body.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        m = _TRIPLE.match(piece)
        if not m:
            raise ParseError(f"expected '(agent,action,time)', found {piece!r}", line=lineno)
        ag, a, t = m.group(1), m.group(2), int(m.group(3))
        if ag not in agents:
            raise ParseError(f"unknown agent {ag!r}", line=lineno)
        if a not in vocab.actions:
            raise ParseError(f"unknown action {a!r}", line=lineno)
        triples.append((ag, a, t))
    try:
        return CollectiveIntention(frozenset(triples), name.strip())
    except ValueError as e:
        raise ParseError(str(e), line=lineno) from e


def loads_mas(text: str, horizon: int = None, strict_pre: bool = False, cap: int = DEFAULT_CAP) -> MasFile:
    blocks = _blocks(text)
    declared = _names(next((b for b in blocks if b.name == "agents"), None))
    current = None
    per_agent: Dict[str, Dict[str, _Block]] = {}
    collective_block = None
    order = []
    for b in blocks:
        if b.name == "agent":
            if b.arg in per_agent:
                raise ParseError(f"agent {b.arg} given twice", line=b.line)
            current = b.arg
            per_agent[current] = {}
            order.append(current)
        elif b.name in ("beliefs", "intentions"):
            if current is None:
                raise ParseError(f"[{b.name}] before any [agent <name>]", line=b.line)
            if b.name in per_agent[current]:
                raise ParseError(f"section [{b.name}] given twice for {current}", line=b.line)
            per_agent[current][b.name] = b
        elif b.name == "collective":
            collective_block = b
        elif b.name in ("ranking", "strata"):
            raise ParseError(f"[{b.name}] is not supported in multi-agent files", line=b.line)
    agents = tuple(declared or order)
    if not agents:
        raise ParseError("no agents declared")
    if set(order) - set(agents):
        raise ParseError(f"undeclared agents: {sorted(set(order) - set(agents))}")

    def formulas(v):
        return [_beliefs(per_agent.get(ag, {}).get("beliefs"), v) for ag in agents]

    common = _common(blocks, formulas, agents, horizon, strict_pre, cap)
    vocab = common.vocab
    beliefs = {ag: _beliefs(per_agent.get(ag, {}).get("beliefs"), vocab) for ag in agents}
    intentions = {ag: _intentions(per_agent.get(ag, {}).get("intentions"), vocab) for ag in agents}
    collective = []
    if collective_block is not None:
        collective = [parse_collective_line(line, agents, vocab, n) for n, line in collective_block.lines]
    return MasFile(vocab, common.universe, agents, beliefs, intentions, tuple(collective), common.tree_names)


def load_mas(path, **kw) -> MasFile:
    return loads_mas(Path(path).read_text(encoding="utf-8"), **kw)


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def _header(vocab: Vocabulary, atoms, trees: Sequence[Tuple[str, BoundedTree]]) -> List[str]:
    out = ["[actions]", ", ".join(vocab.actions)]
    if vocab.plain_props:
        out += ["[props]", ", ".join(vocab.plain_props)]
    out += ["[horizon]", str(trees[0][1].horizon if trees else vocab.horizon)]
    out += ["[atoms]"] + [", ".join(str(a) for a in atoms[i:i + 6]) for i in range(0, len(atoms), 6)]
    if trees:
        out.append("[universe]")
        for name, t in trees:
            out.append(f"tree {name}")
            out.append(format_tree(t))
    return out


def dumps_mas(vocab: Vocabulary, atoms, trees: Sequence[Tuple[str, BoundedTree]], agents: Sequence[str],
              beliefs: Dict[str, str], intentions: Dict[str, Sequence[Tuple[str, int]]],
              collective: Sequence[CollectiveIntention]) -> str:
    out = _header(vocab, atoms, trees)
    out += ["[agents]", ", ".join(agents)]
    for ag in agents:
        out.append(f"[agent {ag}]")
        out += ["[beliefs]", beliefs[ag]]
        if intentions.get(ag):
            out.append("[intentions]")
            out += [f"{a} @ {t}" for a, t in intentions[ag]]
    if collective:
        out.append("[collective]")
        for c in collective:
            body = "; ".join(f"({ag},{a},{t})" for ag, a, t in sorted(c.triples, key=lambda x: (x[2], x[0])))
            out.append(f"{c.name}: {body}")
    return "\n".join(out) + "\n"
