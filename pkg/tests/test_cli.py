import io
import subprocess
import sys

import pytest

from paltime import Vocabulary
from paltime.cli import (
    EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT, EXIT_OK, ScriptError, main, parse_intention,
    parse_intention_set,
)

from conftest import DATA


def run(*argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old, sys.stdin = sys.stdin, io.StringIO(stdin)
    try:
        code = main(list(map(str, argv)), out=out, err=err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def db(name):
    return DATA / name


# --- shipped scripts ---------------------------------------------------------

@pytest.mark.parametrize("dbfile,script,code", [
    ("shopping.db", "switch_to_equipment.script", EXIT_OK),
    ("shopping.db", "coherence.script", EXIT_OK),
    ("shopping.db", "food_then_equipment.script", EXIT_FAIL),
    ("dentist.db", "dentist.script", EXIT_OK),
])
def test_fixture_scripts(dbfile, script, code):
    got, out, _ = run("run", "--db", db(dbfile), "--script", db(script))
    assert got == code, out


@pytest.mark.slow
def test_purchase_script():
    code, out, _ = run("run", "--db", db("purchase.db"), "--script", db("purchase.script"))
    assert code == EXIT_OK, out
    assert out.count("OK ") == 6


def test_robots_script():
    code, out, _ = run("run", "--mas", db("robots.mas"), "--script", db("robots.script"))
    assert code == EXIT_OK, out


def test_empty_script():
    code, out, _ = run("run", "--db", db("shopping.db"), "--script", db("empty.script"))
    assert code == EXIT_OK and out == ""
    assert run("run", "--db", db("shopping.db"))[:2] == (EXIT_OK, "")


def test_report_lines():
    code, out, _ = run("run", "--db", db("shopping.db"), "--script", db("food_then_equipment.script"))
    lines = out.splitlines()
    assert lines[0].startswith("FAIL 1 assert coherent")
    assert lines[1].startswith("OK 2 ")


def test_output_is_deterministic():
    args = ("run", "--db", db("dentist.db"), "--script", db("dentist.script"))
    assert run(*args) == run(*args)


def test_script_from_stdin():
    code, out, _ = run("run", "--db", db("shopping.db"), "--script", "-",
                       stdin="query intentions\nquery sat <>@0 do(equip)@1\n")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "OK 1 query intentions = {food@0, cook@1}"


QUERIES = """\
query sat <>@0 do(equip)@1
query entails <>@0 do(food)@0
query weak do(cook)@1
query coherent
query coherent {food@0, equip@1}
query wb-consistent {food@0, equip@1}
query rank <>@0 do(food)@0
"""


def test_queries():
    code, out, _ = run("run", "--db", db("shopping.db"), "--script", "-", stdin=QUERIES)
    assert code == EXIT_OK
    values = [line.rsplit(" = ", 1)[1] for line in out.splitlines()]
    assert values == ["true", "true", "true", "true", "false", "true", "0"]


def test_collective_query_needs_mas_file():
    code, _, err = run("run", "--db", db("shopping.db"), "--script", "-", stdin="query collective\n")
    assert code == EXIT_INPUT and "multi-agent" in err


# --- errors ------------------------------------------------------------------

@pytest.mark.parametrize("script", [
    "revise [[[",
    "explode now",
    "assert intentions == {zap@0}",
    "assert coherent == maybe",
])
def test_script_errors_exit_2(script):
    code, _, err = run("run", "--db", db("shopping.db"), "--script", "-", stdin=script)
    assert code == EXIT_INPUT
    assert err


def test_missing_file_exit_2(tmp_path):
    assert run("run", "--db", tmp_path / "nope.db")[0] == EXIT_INPUT


def test_horizon_error_exit_3():
    code, _, err = run("run", "--db", db("shopping.db"), "--script", "-", stdin="query sat do(food)@2\n")
    assert code == EXIT_LIMIT and "horizon" in err


def test_cap_exit_3():
    code, _, err = run("run", "--db", db("purchase.db"), "--cap", "1000")
    assert code == EXIT_LIMIT and "1000" in err


# --- intention literals ------------------------------------------------------

def test_intention_literals():
    v = Vocabulary(("a", "b"), horizon=3)
    assert parse_intention("a@2", v) == ("a", 2)
    assert set(parse_intention_set("{a@0, b@1}", v)) == {("a", 0), ("b", 1)}
    assert len(parse_intention_set("{}", v)) == 0
    for bad in ("a", "c@0", "a@x"):
        with pytest.raises(ScriptError):
            parse_intention(bad, v)
    with pytest.raises(ScriptError):
        parse_intention_set("a@0", v)


# --- verify ------------------------------------------------------------------

def test_verify_axioms_horizon_1():
    code, out, _ = run("verify", "--suite", "axioms", "--horizon", "1")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "SUITE axioms"
    assert out.splitlines()[-1] == "RESULT PASS"
    assert "POSTULATE A12 PASS" in out


def test_verify_postulates_small():
    code, out, _ = run("verify", "--suite", "P", "--horizon", "1", "--samples", "100")
    assert code == EXIT_OK, out
    assert all(f"POSTULATE P{k} PASS" in out for k in range(1, 13))


def test_verify_dp_mutated_fails():
    code, out, _ = run("verify", "--suite", "DP", "--horizon", "1", "--samples", "200", "--mutate")
    assert code == EXIT_FAIL
    assert "POSTULATE C2 FAIL" in out
    assert out.splitlines()[-1] == "RESULT FAIL"


def test_verify_r_suite_lists_only_r():
    code, out, _ = run("verify", "--suite", "R", "--horizon", "1", "--samples", "50")
    assert code == EXIT_OK
    ids = [l.split()[1] for l in out.splitlines() if l.startswith("POSTULATE")]
    assert ids and all(i.startswith("R") for i in ids)


def test_verify_cap_exit_3():
    assert run("verify", "--suite", "P", "--cap", "10")[0] == EXIT_LIMIT


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paltime", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify" in proc.stdout
