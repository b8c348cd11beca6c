import json
import subprocess
import sys

import pytest

from conftest import CORPUS
from lkgrammar import analysis as A
from lkgrammar import kernel as K
from lkgrammar.cli import INPUT, LIMIT, OK, SEMANTIC, main

E1 = str(CORPUS["e01_exists_axiom"])
E3 = str(CORPUS["e03_pi2_cut"])
E15 = str(CORPUS["e15_both_pi2_permutation"])

BAD = """(problem bad
  (signature (pred P 1))
  (end-sequent (all v (atom P v)) (neg (atom P a)))
  (proof
    (all-intro a (all v (atom P v)) (ax (atom P a)))))
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def bad_file(tmp_path):
    path = tmp_path / "bad.lk"
    path.write_text(BAD)
    return str(path)


def test_check_valid(capsys):
    code, out, _ = run(capsys, "check", E1)
    assert code == OK and "e1: valid" in out


def test_check_reports_eigenvariable_violation(capsys, bad_file):
    code, out, _ = run(capsys, "check", bad_file)
    assert code == SEMANTIC
    assert "node 0: eigenvariable condition violated" in out


def test_check_json(capsys, bad_file):
    code, out, _ = run(capsys, "check", bad_file, "--format", "json")
    rec = json.loads(out)
    assert code == SEMANTIC and rec["valid"] is False and rec["errors"][0]["node"] == 0


def test_malformed_input_exits_2(capsys, tmp_path):
    junk = tmp_path / "junk.lk"
    junk.write_text("(problem (")
    assert run(capsys, "check", str(junk))[0] == INPUT
    assert run(capsys, "check", str(tmp_path / "missing.lk"))[0] == INPUT


def test_step_limit_exits_3(capsys):
    code, _, err = run(capsys, "eliminate", E3, "--limit", "1")
    assert code == LIMIT and "step limit" in err


def test_grammar_dump_of_e1(capsys):
    code, out, _ = run(capsys, "grammar", E1)
    assert code == OK
    assert "σ[1:0] x0 x1 -> x1" in out and "σ[0:0] x0 x1 -> c ⋆ σ[1:0] x0 x1" in out


def test_language_text_and_json(capsys):
    assert run(capsys, "language", E3)[1].strip() == "0: ⟨c⟩"
    code, out, _ = run(capsys, "language", E3, "--format", "json")
    assert code == OK and json.loads(out)


def test_reference_engine_agrees(capsys):
    a = run(capsys, "language", E3)[1]
    b = run(capsys, "language", E3, "--engine", "reference", "--seed", "7")[1]
    assert a == b


def test_output_is_byte_identical_across_runs(capsys):
    for cmd in (["grammar", E15], ["eliminate", E3], ["language", E15, "--mode", "cf"]):
        assert run(capsys, *cmd)[1] == run(capsys, *cmd)[1]


def test_eliminate_writes_a_valid_cut_free_proof(capsys, tmp_path):
    out = tmp_path / "free.lk"
    code, trace, _ = run(capsys, "eliminate", E3, "--out", str(out))
    assert code == OK and trace.strip()
    p = K.load_problem(out).proof
    assert K.is_valid(p) and p.is_cut_free
    assert run(capsys, "check", str(out))[0] == OK


def test_reduce_by_path(capsys, tmp_path):
    out = tmp_path / "step.lk"
    code, line, _ = run(capsys, "reduce", E15, "--redex", "ε:left", "--out", str(out))
    assert code == OK and "binary-perm" in line
    assert K.is_valid(K.load_problem(out).proof)
    assert run(capsys, "reduce", E15, "--redex", "0.0.0:left")[0] == SEMANTIC
    assert run(capsys, "reduce", E15, "--redex", "ε:up")[0] == INPUT


def test_restricted_strategy_notes_skipped_redex(capsys):
    code, out, _ = run(capsys, "reduce", E15, "--strategy", "restricted")
    assert code == OK and "skipped: ε binary-perm left" in out


def test_verify_single_file(capsys):
    code, out, _ = run(capsys, "verify", E15)
    assert code == OK
    assert "incomparable" in out and out.rstrip().endswith("0 inconsistent")


def test_verify_empty_directory(capsys, tmp_path):
    code, out, err = run(capsys, "verify", str(tmp_path))
    assert code == OK and "warning" in err and "0 checks" in out


def test_verify_flags_a_wrong_expectation(capsys, monkeypatch):
    wrong = A.LemmaExpectation("cut-perm", A.Expected.EQUAL, "injected")
    monkeypatch.setattr(A, "classify_redex", lambda p, r: wrong)
    code, out, _ = run(capsys, "verify", E15, "--strategy", "weak-first")
    assert code == SEMANTIC and "VIOLATION" in out


def test_verify_corpus_directory():
    res = subprocess.run([sys.executable, "-m", "lkgrammar", "verify", str(CORPUS["e01_exists_axiom"].parent)],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    assert res.stdout.rstrip().endswith("0 inconsistent")
