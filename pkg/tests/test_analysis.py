import pytest
from hypothesis import given, strategies as st

from conftest import CORPUS, proof
from lkgrammar import analysis as A
from lkgrammar.grammar import language
from lkgrammar.reduction import Kind, RedexDescriptor, get_strategy, reduce_once
from lkgrammar.terms import And, Atom, Bot, Fn, Or, Var, WC_TERM

c = Fn("c", ())
f = lambda t: Fn("f", (t,))
P = lambda t, neg=False: Atom("P", (t,), neg)


# -- expansions and tautologies ---------------------------------------------

def test_expansion_of_e1():
    assert A.expansion(proof("e01_exists_axiom")) == (P(c), P(c, True))


def test_expansion_of_e2():
    first = A.expansion(proof("e02_cutfree_contraction"))[0]
    assert first == Or(Or(P(c, True), P(f(c))), Or(P(f(c), True), P(f(f(c)))))


def test_empty_index_expands_to_falsum():
    assert A.expansion(proof("e01_exists_axiom"), frozenset({(1, ())})) == (Bot(), P(c, True))


def test_tautology_examples():
    assert A.is_tautology((Or(P(c), P(c, True)),)).valid
    res = A.is_tautology((P(c),))
    assert not res.valid and res.countermodel == {P(c): False}
    assert A.is_tautology((Or(Or(P(c, True), P(f(c))), Or(P(f(c), True), P(f(f(c))))),)).valid


def test_non_ground_atoms_are_rejected():
    with pytest.raises(A.NonGroundAtom):
        A.is_tautology((P(Var("a")),))


def test_large_formulas_use_clause_splitting():
    atoms = [Atom("Q", (Fn(f"k{i}", ()),)) for i in range(25)]
    big = list(atoms) + [Atom("Q", (Fn("k0", ()),), True)]
    assert A.is_tautology(tuple(big)).valid
    assert not A.is_tautology(tuple(atoms)).valid


ground_atoms = st.sampled_from([P(c), P(f(c)), P(f(f(c))), Atom("Q", (c,))])
literals = st.builds(lambda a, neg: Atom(a.pred, a.args, neg), ground_atoms, st.booleans())
qf = st.recursive(literals, lambda s: st.builds(Or, s, s) | st.builds(And, s, s), max_leaves=10)


def _value(g, model):
    match g:
        case Atom(pred, args, neg):
            return model[Atom(pred, args)] != neg
        case Or(a, b):
            return _value(a, model) or _value(b, model)
        case And(a, b):
            return _value(a, model) and _value(b, model)


@given(st.lists(qf, min_size=1, max_size=3))
def test_truth_table_and_splitting_agree(seq):
    table = A.is_tautology(tuple(seq))
    old = A.TRUTH_TABLE_LIMIT
    A.TRUTH_TABLE_LIMIT = -1
    try:
        split = A.is_tautology(tuple(seq))
    finally:
        A.TRUTH_TABLE_LIMIT = old
    assert table.valid == split.valid
    for res in (table, split):
        if not res.valid:
            assert not any(_value(g, res.countermodel) for g in seq)


# -- comparisons -------------------------------------------------------------

def test_comparison_examples():
    a, b = {(0, (c,))}, {(0, (c,)), (0, (f(c),))}
    assert A.compare_languages(a, a).relation is A.Relation.EQUAL
    r = A.compare_languages(a, b)
    assert r.relation is A.Relation.SUBSET and r.only_second == {(0, (f(c),))}
    assert A.compare_languages({(0, (c,))}, {(0, (f(c),))}).relation is A.Relation.INCOMPARABLE


CORPUS_LANGS = [language(proof(s)) for s in sorted(CORPUS)]
langs = st.sampled_from(CORPUS_LANGS) | st.sets(
    st.tuples(st.integers(0, 1), st.tuples(st.sampled_from([c, f(c), Fn("d", ())]))), max_size=3)


@given(langs, langs)
def test_comparison_is_antisymmetric(a, b):
    ab, ba = A.compare_languages(a, b).relation, A.compare_languages(b, a).relation
    flip = {A.Relation.SUBSET: A.Relation.SUPERSET, A.Relation.SUPERSET: A.Relation.SUBSET}
    assert ba == flip.get(ab, ab)
    if ab in (A.Relation.EQUAL,) or (ab, ba) == (A.Relation.EQUAL, A.Relation.EQUAL):
        assert frozenset(a) == frozenset(b)


@given(langs, langs, langs)
def test_inclusion_is_transitive(a, b, d):
    le = lambda x, y: A.compare_languages(x, y).relation in (A.Relation.EQUAL, A.Relation.SUBSET)
    if le(a, b) and le(b, d):
        assert le(a, d)


def test_weakening_constant_acts_as_wildcard():
    wc = WC_TERM
    assert A.subsumed_modulo_wc({(1, (wc,))}, {(1, (c,))}) == frozenset()
    assert A.subsumed_modulo_wc({(1, (f(wc),))}, {(1, (c,))}) == {(1, (f(wc),))}
    assert A.subsumed_modulo_wc({(1, (wc,))}, {(0, (c,))}) == {(1, (wc,))}


# -- classification and verification ----------------------------------------

def _redex(stem, path, kind, side):
    return RedexDescriptor(path, kind, side)


def test_classify_both_pi2_permutation():
    e = A.classify_redex(proof("e15_both_pi2_permutation"), _redex("", (), Kind.BINARY_PERM, "left"))
    assert e.case == "cut-perm" and e.expected is A.Expected.NONE


def test_classify_quantifier_permutation():
    e = A.classify_redex(proof("e15_both_pi2_permutation"), _redex("", (0,), Kind.UNARY_PERM, "left"))
    assert e.case == "quant-perm" and e.expected is A.Expected.SUBSET


def test_classify_contractions():
    pi2 = A.classify_redex(proof("e05_pi2_contraction"), _redex("", (), Kind.CONTRACTION, "left"))
    assert pi2.expected is A.Expected.SUBSET and pi2.dual_contracted is False
    both = A.classify_redex(proof("e06_contraction_both_sides"), _redex("", (), Kind.CONTRACTION, "left"))
    assert both.expected is A.Expected.NONE and both.dual_contracted is True
    sigma2 = A.classify_redex(proof("e07_sigma2_contraction"), _redex("", (), Kind.CONTRACTION, "right"))
    assert sigma2.expected is A.Expected.EQUAL


def test_classify_sigma2_cut_permutation():
    # walk the unrestricted trace of e06 until a cut-over-cut permutation with a Σ2 formula appears
    p = proof("e06_contraction_both_sides")
    s = get_strategy("unrestricted")
    for k in range(200):
        hits = [r for r in A.applicable_reductions(p) if r.kind is Kind.BINARY_PERM
                and A.classify_redex(p, r).case == "cut-perm"]
        for r in hits:
            e = A.classify_redex(p, r)
            if e.sigma2:
                assert e.expected is A.Expected.EQUAL
                assert A.verify_preservation(p, r).observed is A.Relation.EQUAL
                return
        p = reduce_once(p, s, k)[0]
    pytest.fail("no Σ2 cut permutation found")


def test_classification_is_total_on_the_corpus():
    for stem in CORPUS:
        p = proof(stem)
        for r in A.applicable_reductions(p):
            assert isinstance(A.classify_redex(p, r), A.LemmaExpectation)


def test_verify_incomparable_permutation_is_accepted():
    rep = A.verify_preservation(proof("e15_both_pi2_permutation"), _redex("", (), Kind.BINARY_PERM, "left"))
    assert rep.observed is A.Relation.INCOMPARABLE and rep.verdict
    assert rep.only_after and rep.only_before


def test_weakening_with_dependent_witness_is_equal():
    rep = A.verify_preservation(proof("e08_weakened_cut"), _redex("", (), Kind.WEAKENING, "left"))
    assert rep.observed is A.Relation.EQUAL and rep.literal_ok


def test_weakening_with_constant_witness_holds_only_modulo_wc():
    rep = A.verify_preservation(proof("e09_weakened_qf_cut"), _redex("", (), Kind.WEAKENING, "left"))
    assert rep.observed is A.Relation.INCOMPARABLE
    assert not rep.literal_ok
    assert rep.only_after == {(1, (WC_TERM,))}
    assert rep.unmatched_modulo_wc == frozenset() and rep.verdict


def test_a_wrong_expectation_is_reported(monkeypatch):
    wrong = A.LemmaExpectation("cut-perm", A.Expected.EQUAL, "injected")
    monkeypatch.setattr(A, "classify_redex", lambda p, r: wrong)
    rep = A.verify_preservation(proof("e15_both_pi2_permutation"), _redex("", (), Kind.BINARY_PERM, "left"))
    assert not rep.verdict


def test_end_to_end_on_e3():
    rep = A.end_to_end_check(proof("e03_pi2_cut"), "weak-first")
    assert rep.ok and rep.herbrand == {(0, (c,))}


def test_cut_free_herbrand_set_equals_language():
    rep = A.end_to_end_check(proof("e01_exists_axiom"))
    assert rep.herbrand == rep.language


def test_weakened_cut_language_exceeds_herbrand_set():
    rep = A.end_to_end_check(proof("e08_weakened_cut"))
    assert rep.ok and rep.language - rep.herbrand == {(1, (WC_TERM,))}


def test_corpus_verification_runs_in_parallel():
    items = [(s, proof(s)) for s in ("e03_pi2_cut", "e05_pi2_contraction", "e09_weakened_qf_cut")]
    reps = A.verify_corpus(items, parallel=True, workers=2)
    assert [r.proof_id for r in reps] == [s for s, _ in items]
    assert all(r.ok for r in reps)


def test_sigma2_contraction_against_contracted_dual_loses_entries():
    # documented finding: equality is expected for a Σ2 contraction, but when the
    # dual Π2 premise contracts dependent instances the language shrinks
    from pathlib import Path
    from lkgrammar import kernel as K
    p = K.load_problem(Path(__file__).parent / "data" / "sigma2_contraction_subset.lk").proof
    r = _redex("", (), Kind.CONTRACTION, "right")
    rep = A.verify_preservation(p, r)
    assert rep.expectation.expected is A.Expected.EQUAL and rep.expectation.sigma2
    assert rep.observed is A.Relation.SUBSET and not rep.verdict
    assert len(rep.only_before) == 4 and not rep.only_after


TRACE_STEMS = sorted(set(CORPUS) - {"e06_contraction_both_sides", "e15_both_pi2_permutation"})


@pytest.mark.parametrize("stem", TRACE_STEMS)
def test_redexes_along_strategy_traces_are_consistent(stem):
    # e06 and e15 are left out for time; e15's trace holds the Σ2 contraction finding above
    seen = {}
    for name in ("weak-first", "restricted"):
        q, k = proof(stem), 0
        while q is not None:
            seen.setdefault(q, q)
            res = reduce_once(q, get_strategy(name), k)
            q, k = (res[0], k + 1) if res else (None, k)
    bad = [r.record() for q in seen for r in A.verify_all_redexes(q, stem) if not r.verdict]
    assert bad == []
