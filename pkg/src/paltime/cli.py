"""Command-line front end.

``paltime run --db FILE --script FILE`` executes a revision script and
prints one ``OK|FAIL <index> <summary>`` line per command;
``paltime verify --suite P|R|DP|axioms|all`` runs the property suites.

Exit codes: 0 success, 1 failed assertion or violated property, 2 bad
input, 3 horizon or enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from .database import (
    BeliefIntentionDatabase, IntentionDatabase, coherent_with, weak_beliefs_consistent,
    weak_beliefs_entails,
)
from .errors import CapExceededError, HorizonError, ParseError, UnknownAtomError
from .fileformat import load_database, load_mas, parse_collective_line
from .formula import (
    Formula, Pre, Prop, Vocabulary, is_strong_belief, parse, to_text,
)
from .iterated import EpistemicState, bel, iterated_revise, rank_of_formula
from .multiagent import (
    MultiAgentSystem, agent_coherent, mas_revise_collective, mas_revise_individual,
    mas_weak_beliefs_consistent, mas_weak_beliefs_entails,
)
from .revision import PostulateReport, SELECTORS
from .solver import DEFAULT_CAP, models_of_strong

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3

_INTENTION = re.compile(r"^\s*([A-Za-z_][\w]*)\s*@\s*(\d+)\s*$")


class ScriptError(ParseError):
    pass


def parse_intention(text: str, vocab: Vocabulary) -> Tuple[str, int]:
    m = _INTENTION.match(text)
    if not m:
        raise ScriptError(f"expected 'action@time', found {text.strip()!r}")
    if m.group(1) not in vocab.actions:
        raise ScriptError(f"unknown action {m.group(1)!r}")
    return m.group(1), int(m.group(2))


def parse_intention_set(text: str, vocab: Vocabulary) -> IntentionDatabase:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ScriptError(f"expected an intention set like {{food@0, cook@1}}, found {text!r}")
    body = text[1:-1].strip()
    items = [parse_intention(x, vocab) for x in body.split(",")] if body else []
    try:
        return IntentionDatabase(items)
    except ValueError as e:
        raise ScriptError(str(e)) from e


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t not in ("true", "false"):
        raise ScriptError(f"expected true or false, found {text.strip()!r}")
    return t == "true"


def _show_set(I: IntentionDatabase) -> str:
    return I.to_text()


# ---------------------------------------------------------------------------
# Script execution
# ---------------------------------------------------------------------------

@dataclass
class Line:
    ok: bool
    index: int
    summary: str

    def __str__(self):
        return f"{'OK' if self.ok else 'FAIL'} {self.index} {self.summary}"


class Session:
    """Evolving state of one script run."""

    def __init__(self, db_file=None, mas_file=None, selector: str = "temporal"):
        self.db_file = db_file
        self.mas_file = mas_file
        self.selector = selector
        self.reset()

    @property
    def vocab(self) -> Vocabulary:
        return (self.db_file or self.mas_file).vocab

    @property
    def universe(self):
        return (self.db_file or self.mas_file).universe

    def reset(self):
        if self.db_file is not None:
            db = self.db_file.database()
            self.state = EpistemicState(self.db_file.ranking(), db.intentions)
            self.system = None
        else:
            self.state = None
            self.system = self.mas_file.system()
            self.focus = self.system.agents[0]

    # helpers --------------------------------------------------------------
    def formula(self, text: str) -> Formula:
        if not text.strip():
            raise ScriptError("missing formula")
        return parse(text, self.vocab)

    def models(self):
        if self.system is not None:
            return self.system.dbs[self.focus].models
        return bel(self.state.ranking)

    def intentions(self) -> IntentionDatabase:
        if self.system is not None:
            return self.system.dbs[self.focus].intentions
        return self.state.intentions

    # commands -------------------------------------------------------------
    def run(self, index: int, line: str) -> Line:
        word, _, rest = line.partition(" ")
        handler = getattr(self, "cmd_" + word.replace("-", "_"), None)
        if handler is None:
            raise ScriptError(f"unknown command {word!r}")
        ok, summary = handler(rest.strip())
        return Line(ok, index, summary)

    def cmd_reset(self, rest):
        self.reset()
        return True, "reset"

    def cmd_selector(self, rest):
        if rest not in SELECTORS:
            raise ScriptError(f"unknown selector {rest!r}; choose from {', '.join(SELECTORS)}")
        self.selector = rest
        return True, f"selector {rest}"

    def cmd_agent(self, rest):
        if self.system is None:
            raise ScriptError("'agent' needs a multi-agent file")
        if rest not in self.system.agents:
            raise ScriptError(f"unknown agent {rest!r}")
        self.focus = rest
        return True, f"agent {rest}"

    def _revision_input(self, rest):
        text, sep, intention = rest.partition(";")
        phi = self.formula(text)
        if not is_strong_belief(phi):
            raise ScriptError(f"revision input must be a strong belief formula: {to_text(phi)}")
        i = parse_intention(intention, self.vocab) if sep and intention.strip() else None
        return phi, i

    def cmd_revise(self, rest):
        phi, i = self._revision_input(rest)
        tail = f" ; {i[0]}@{i[1]}" if i else ""
        if self.system is not None:
            r = mas_revise_individual(self.system, self.focus, phi, i)
            self.system = r.system
            coll = ",".join(c.name or repr(c) for c in self.system.collective)
            return True, (f"revise[{self.focus}] {to_text(phi)}{tail} -> intentions {_show_set(self.intentions())}"
                          f" collective {{{coll}}}")
        if models_of_strong(phi, self.universe).is_empty():
            raise ScriptError(f"cannot revise by an unsatisfiable belief: {to_text(phi)}")
        self.state = iterated_revise(self.state, phi, i, selector=self.selector)
        return True, (f"revise {to_text(phi)}{tail} -> {len(self.models())} belief trees, "
                      f"intentions {_show_set(self.intentions())}")

    def cmd_revise_collective(self, rest):
        if self.system is None:
            raise ScriptError("'revise-collective' needs a multi-agent file")
        c = parse_collective_line(rest, self.system.agents, self.vocab)
        r = mas_revise_collective(self.system, c)
        self.system = r.system
        coll = ",".join(x.name or repr(x) for x in self.system.collective)
        return True, f"revise-collective {c!r} -> {'rejected' if r.rejected else 'collective {' + coll + '}'}"

    def _query(self, kind: str, arg: str):
        """Value of a query and its printable description."""
        if kind == "sat":
            f = self.formula(arg)
            m = self.models().model_mask() & self.universe.eval(f)
            return bool(m.any()), f"sat {to_text(f)}"
        if kind == "entails":
            f = self.formula(arg)
            m = self.models().model_mask() & ~self.universe.eval(f)
            return not m.any(), f"entails {to_text(f)}"
        if kind == "weak":
            f = self.formula(arg)
            if self.system is not None:
                return mas_weak_beliefs_entails(self.system, self.focus, f), f"weak {to_text(f)}"
            db = BeliefIntentionDatabase(self.universe, self.models(), self.intentions())
            return weak_beliefs_entails(db, f), f"weak {to_text(f)}"
        if kind in ("coherent", "wb-consistent"):
            if arg:
                if self.system is not None:
                    raise ScriptError(f"'{kind}' takes no argument for multi-agent files")
                I = parse_intention_set(arg, self.vocab)
            else:
                I = self.intentions()
            if self.system is not None:
                value = agent_coherent(self.system, self.focus) if kind == "coherent" \
                    else mas_weak_beliefs_consistent(self.system, self.focus)
                return value, f"{kind}[{self.focus}]"
            if kind == "coherent":
                return coherent_with(self.models(), I), f"coherent {_show_set(I)}"
            db = BeliefIntentionDatabase(self.universe, self.models(), I)
            return weak_beliefs_consistent(db), f"wb-consistent {_show_set(I)}"
        if kind == "rank":
            if self.state is None:
                raise ScriptError("'rank' needs a single-agent file")
            f = self.formula(arg)
            return rank_of_formula(self.state.ranking, f), f"rank {to_text(f)}"
        if kind == "intentions":
            if arg:
                raise ScriptError("'intentions' takes no argument")
            return self.intentions(), "intentions"
        if kind == "collective":
            if self.system is None:
                raise ScriptError("'collective' needs a multi-agent file")
            return {c.name for c in self.system.collective}, "collective"
        raise ScriptError(f"unknown query {kind!r}")

    def cmd_query(self, rest):
        kind, _, arg = rest.partition(" ")
        value, desc = self._query(kind, arg.strip())
        return True, f"query {desc} = {self._show(value)}"

    def cmd_assert(self, rest):
        lhs, sep, expected_text = rest.rpartition("==")
        if not sep:
            raise ScriptError("expected 'assert <query> == <value>'")
        kind, _, arg = lhs.strip().partition(" ")
        value, desc = self._query(kind, arg.strip())
        if isinstance(value, IntentionDatabase):
            expected = parse_intention_set(expected_text, self.vocab)
        elif isinstance(value, set):
            t = expected_text.strip()
            if not (t.startswith("{") and t.endswith("}")):
                raise ScriptError("expected a set of collective names like {c1, c3}")
            expected = {x.strip() for x in t[1:-1].split(",") if x.strip()}
        elif isinstance(value, bool):
            expected = _bool(expected_text)
        else:
            t = expected_text.strip()
            if t == "inf":
                expected = float("inf")
            elif t.isdigit():
                expected = int(t)
            else:
                raise ScriptError(f"expected a rank, found {t!r}")
        ok = value == expected
        return ok, f"assert {desc} == {self._show(expected)}" + ("" if ok else f" (got {self._show(value)})")

    @staticmethod
    def _show(value) -> str:
        if isinstance(value, IntentionDatabase):
            return value.to_text()
        if isinstance(value, set):
            return "{" + ", ".join(sorted(value)) + "}"
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)


def script_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def run_script(session: Session, text: str, out) -> int:
    status = EXIT_OK
    for index, (lineno, line) in enumerate(script_lines(text), 1):
        try:
            result = session.run(index, line)
        except ScriptError as e:
            raise ScriptError(f"script line {lineno}: {e}") from e
        except UnknownAtomError as e:
            raise ScriptError(f"script line {lineno}: {e}") from e
        print(result, file=out)
        if not result.ok:
            status = EXIT_FAIL
    return status


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def suite_universes(actions, horizon: int, cap: int, strict_pre: bool):
    """Universes over two kinds of atom sets: two action preconditions, or
    one precondition and one plain proposition."""
    from .solver import enumerate_universe
    a = actions[0]
    b = actions[1] if len(actions) > 1 else actions[0]
    vocab = Vocabulary(tuple(actions), ("p",), horizon=horizon)
    sets = [[Pre((a,)), Pre((b,))], [Prop("p"), Pre((a,))]]
    return [enumerate_universe(vocab, horizon, s, cap=cap, strict_pre=strict_pre) for s in sets]


def _subset(report: PostulateReport, ids) -> PostulateReport:
    out = PostulateReport(tuple(ids))
    for k in ids:
        out.checked[k] = report.checked[k]
        out.violations[k] = list(report.violations[k])
    out.partial = report.partial
    return out


def verify(suite: str, actions, horizon: int, cap: int = DEFAULT_CAP, strict_pre: bool = False,
           mutate: bool = False, samples: int = None, seed: int = 0, out=sys.stdout) -> int:
    from .axioms import verify_axioms, axiom_universes
    from .iterated import DP_IDS, flatten_bits, verify_dp
    from .revision import drop_old_selector, verify_postulates

    suites = ("P", "R", "DP", "axioms") if suite == "all" else (suite,)
    ok = True
    universes = None
    for s in suites:
        if s in ("P", "R", "DP") and universes is None:
            universes = suite_universes(actions, horizon, cap, strict_pre)
        if s == "P":
            rep = None
            for u in universes:
                r = verify_postulates(u, samples=2000 if samples is None else samples, seed=seed,
                                      selector=drop_old_selector if mutate else None)
                rep = r if rep is None else rep.merge(r)
        elif s in ("R", "DP"):
            rep = None
            for u in universes:
                r = verify_dp(u, operator=flatten_bits if mutate else None,
                              samples=3000 if samples is None else samples, seed=seed)
                rep = r if rep is None else rep.merge(r)
            if s == "R":
                rep = _subset(rep, [k for k in DP_IDS if k.startswith("R")])
        elif s == "axioms":
            us = [u for h in range(1, horizon + 1)
                  for u in axiom_universes(actions, h, cap=cap, strict_pre=strict_pre)]
            rep = verify_axioms(us, seed=seed)
        else:
            raise ValueError(f"unknown suite {s!r}")
        print(f"SUITE {s}", file=out)
        for line in rep.lines():
            print(line, file=out)
        ok = ok and rep.ok
    print(f"RESULT {'PASS' if ok else 'FAIL'}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paltime", description="Beliefs and intentions over bounded time.")
    sub = p.add_subparsers(dest="command", required=True)

    def limits(q):
        q.add_argument("--horizon", type=int, help="override the horizon")
        q.add_argument("--strict-pre", action="store_true",
                       help="require pre(a) wherever an a-transition exists")
        q.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum number of enumerated trees")

    r = sub.add_parser("run", help="execute a revision script")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--db", type=Path, help="single-agent database file")
    src.add_argument("--mas", type=Path, help="multi-agent system file")
    r.add_argument("--script", type=Path, help="script file ('-' for stdin); default: no commands")
    r.add_argument("--selector", choices=sorted(SELECTORS), default="temporal")
    limits(r)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", choices=("P", "R", "DP", "axioms", "all"), default="all")
    v.add_argument("--actions", default="a,b", help="comma-separated actions (default a,b)")
    v.add_argument("--mutate", action="store_true",
                   help="check a deliberately broken operator; the suite should then fail")
    v.add_argument("--samples", type=int, help="random instances per universe")
    v.add_argument("--seed", type=int, default=0)
    limits(v)
    return p


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            kw = dict(horizon=args.horizon, strict_pre=args.strict_pre, cap=args.cap)
            if args.db is not None:
                session = Session(db_file=load_database(args.db, **kw), selector=args.selector)
            else:
                session = Session(mas_file=load_mas(args.mas, **kw), selector=args.selector)
            if args.script is None:
                text = ""
            elif str(args.script) == "-":
                text = sys.stdin.read()
            else:
                text = args.script.read_text(encoding="utf-8")
            return run_script(session, text, out)
        actions = [a.strip() for a in args.actions.split(",") if a.strip()]
        if not actions:
            raise ParseError("--actions needs at least one action")
        return verify(args.suite, actions, 2 if args.horizon is None else args.horizon, args.cap,
                      args.strict_pre, args.mutate, args.samples, args.seed, out)
    except (HorizonError, CapExceededError) as e:
        print(f"error: {e}", file=err)
        return EXIT_LIMIT
    except (ParseError, UnknownAtomError, OSError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
