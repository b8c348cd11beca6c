"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import time
from pathlib import Path

from conftest import CORPUS, GOLDEN, proof
from lkgrammar import analysis as A
from lkgrammar import kernel as K
from lkgrammar.grammar import (CF, CS, extract_grammar, format_language, language,
                               language_with_stats, typecheck)
from lkgrammar.reduction import (Kind, RedexDescriptor, apply_reduction, eliminate_cuts,
                                 herbrand_set)
from lkgrammar.syntax import formula_from_text
from lkgrammar.terms import Atom, Fn, Var, dual

STEMS = sorted(CORPUS)
FINDING = Path(__file__).parent / "data" / "sigma2_contraction_subset.lk"


def report(n, title, failures, detail=""):
    line = f"criterion {n} {title}: {'PASS' if not failures else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print("\n" + line)
    assert not failures, failures


def _mutations():
    sig = K.load_problem(CORPUS["e15_both_pi2_permutation"]).signature
    P, a, c = (lambda t: Atom("P", (t, t))), Var("a"), Fn("c", ())
    eigen = K.all_intro(K.axiom(P(a)), "a", formula_from_text("(all x (atom P x x))", sig))
    witness = K.Proof(K.Rule.EX, (K.axiom(P(c)),),
                      (formula_from_text("(ex x (atom P x x))", sig), dual(P(c))), Fn("d", ()))
    s3 = formula_from_text("(ex x (all y (ex z (atom R x z))))", sig)
    sigma3 = K.cut(K.weak(K.axiom(P(c)), s3), K.weak(K.axiom(P(c)), dual(s3)))
    return {"broken eigenvariable": eigen, "wrong witness": witness, "Σ3 cut": sigma3}


def test_1_kernel_soundness():
    failures, slowest = [], 0.0
    for stem in STEMS:
        start = time.perf_counter()
        p = K.load_problem(CORPUS[stem]).proof
        if K.check_proof(p):
            failures.append(f"{stem} rejected")
        slowest = max(slowest, time.perf_counter() - start)
    for name, bad in _mutations().items():
        if not K.check_proof(K.number_preorder(bad)):
            failures.append(f"mutation {name} accepted")
    if slowest >= 1.0:
        failures.append(f"slowest check {slowest:.2f}s")
    report(1, "kernel soundness", failures,
           f"{len(STEMS)} proofs valid, 3 mutations rejected, slowest {slowest * 1000:.0f} ms")


def test_2_grammars_are_well_typed_and_acyclic():
    failures, slowest = [], 0.0
    for stem in STEMS:
        start = time.perf_counter()
        for mode in (CS, CF):
            g = extract_grammar(proof(stem), mode)
            if typecheck(g):
                failures.append(f"{stem}/{mode}: {typecheck(g)[0]}")
            try:
                g.topological_order()
            except Exception as e:
                failures.append(f"{stem}/{mode}: {e}")
        slowest = max(slowest, time.perf_counter() - start)
    if slowest >= 1.0:
        failures.append(f"slowest {slowest:.2f}s")
    report(2, "well-typed acyclic grammars", failures, f"slowest {slowest * 1000:.0f} ms")


def test_3_languages_are_finite():
    failures, most = [], 0
    for stem in STEMS:
        p = proof(stem)
        res = language_with_stats(p, budget=10 ** 6)
        most = max(most, res.steps)
        if language(p, parallel=True, workers=2) != res.language:
            failures.append(f"{stem}: parallel differs")
    report(3, "finite languages", failures, f"at most {most} steps, serial = parallel")


def test_4_expansions_are_tautologies():
    failures = [stem for stem in STEMS if not A.is_tautology(A.expansion(proof(stem))).valid]
    report(4, "tautological expansions", failures)


def test_5_herbrand_set_is_contained():
    failures = []
    for stem in STEMS:
        p = proof(stem)
        lang = language(p)
        for strategy in ("weak-first", "restricted"):
            missing = herbrand_set(eliminate_cuts(p, strategy).proof) - lang
            if missing:
                failures.append(f"{stem}/{strategy}: {sorted(map(str, missing))}")
    report(5, "Herbrand containment", failures, f"{len(STEMS)} proofs × 2 strategies")


def test_6_lemma_consistency():
    reports = [r for stem in STEMS for r in A.verify_all_redexes(proof(stem), stem)]
    failures = [str(r.record()) for r in reports if not r.verdict]
    weak = [r for r in reports if r.expectation.case == "weakening"]
    literal = sum(not r.literal_ok for r in weak)
    # a Σ2 contraction reached along the traces of e15 breaks equality; it is frozen
    # outside the corpus and reported here so the line tells the whole story
    extra = A.verify_preservation(K.load_problem(FINDING).proof,
                                  RedexDescriptor((), Kind.CONTRACTION, "right"))
    report(6, "lemma consistency", failures,
           f"{len(reports)} redexes, 0 violations; weakening judged with wc as a wildcard, "
           f"{literal} of {len(weak)} weakening steps literally incomparable; NOTE beyond the corpus "
           f"proofs, a Σ2 contraction on the e15 trace gives {extra.observed.value} instead of equal, "
           f"frozen in {FINDING.name}")


def _golden_sections():
    sections, cur = [], None
    for line in (GOLDEN / "both_pi2_permutation.txt").read_text().splitlines():
        if line.startswith("# L(") or line.startswith("# only"):
            cur = []
            sections.append(cur)
        elif line and not line.startswith("#") and cur is not None:
            cur.append(line)
    return sections


def test_7_incomparability_witness():
    p = proof("e15_both_pi2_permutation")
    q = apply_reduction(p, RedexDescriptor((), Kind.BINARY_PERM, "left"))
    before, after = language(p), language(q)
    cmp = A.compare_languages(after, before)
    lines = lambda s: format_language(s).splitlines()
    failures = []
    if cmp.relation is not A.Relation.INCOMPARABLE:
        failures.append(f"relation {cmp.relation.value}")
    if [lines(before), lines(after), lines(cmp.only_second), lines(cmp.only_first)] != _golden_sections():
        failures.append("differs from golden file")
    report(7, "incomparability witness", failures,
           f"{len(cmp.only_second)} entries only before, {len(cmp.only_first)} only after")


def test_8_start_symbol_is_canonical():
    failures = []
    for stem in STEMS:
        bad = A.start_symbol_check(proof(stem), samples=20, seed=0)
        failures += [f"{stem}: index {i}, u0 = {u}" for i, u in bad]
    report(8, "canonical start symbol", failures, f"{len(STEMS)} proofs × 20 samples")


def test_9_context_free_mode():
    failures, growth = [], 0
    for stem in STEMS:
        rep = A.mode_check(proof(stem))
        if not rep.included:
            failures.append(stem)
        growth += len(rep.cf) - len(rep.cs)
    report(9, "context-free mode", failures, f"CS ⊆ CF everywhere, CF finite, {growth} extra entries in total")
