import pytest
from hypothesis import given, settings, strategies as st

from conftest import CORPUS, proof
from lkgrammar import kernel as K
from lkgrammar.grammar import language
from lkgrammar.reduction import (STRATEGIES, Kind, RedexDescriptor, StaleRedex,
                                 StepLimitExceeded, apply_reduction, applicable_reductions,
                                 eliminate_cuts, format_path, herbrand_set, parse_path)
from lkgrammar.terms import seq_alpha_eq

REDEXES = [(stem, r) for stem in sorted(CORPUS) for r in applicable_reductions(proof(stem))]


@pytest.mark.parametrize("stem,r", REDEXES, ids=[f"{s}-{r}" for s, r in REDEXES])
def test_every_step_keeps_the_proof_valid(stem, r):
    p = proof(stem)
    q = apply_reduction(p, r)
    assert K.check_proof(q) == []
    assert q.conclusion == p.conclusion


def test_all_reduction_kinds_occur_in_the_corpus_traces():
    seen = set()
    for stem in CORPUS:
        for name in STRATEGIES:
            seen |= {st.redex.kind for st in eliminate_cuts(proof(stem), name).trace}
    assert seen == set(Kind)


@pytest.mark.parametrize("name", sorted(STRATEGIES))
@pytest.mark.parametrize("stem", sorted(CORPUS))
def test_elimination_reaches_a_valid_cut_free_proof(stem, name):
    p = proof(stem)
    res = eliminate_cuts(p, name)
    assert res.proof.is_cut_free
    assert K.check_proof(res.proof) == []
    assert seq_alpha_eq(res.proof.conclusion, p.conclusion)


def test_elimination_is_deterministic():
    a = eliminate_cuts(proof("e06_contraction_both_sides"), "weak-first")
    b = eliminate_cuts(proof("e06_contraction_both_sides"), "weak-first")
    assert [s.line() for s in a.trace] == [s.line() for s in b.trace]
    assert a.proof == b.proof


def test_cut_free_proofs_are_left_alone():
    p = proof("e02_cutfree_contraction")
    res = eliminate_cuts(p)
    assert res.trace == () or list(res.trace) == []
    assert res.proof == p


def test_step_limit():
    with pytest.raises(StepLimitExceeded) as info:
        eliminate_cuts(proof("e06_contraction_both_sides"), limit=3)
    assert len(info.value.trace) == 3


def test_restricted_strategy_skips_the_both_pi2_permutation():
    res = eliminate_cuts(proof("e15_both_pi2_permutation"), "restricted")
    first = res.trace[0]
    assert any(r.kind is Kind.BINARY_PERM and r.path == () for r in first.skipped)
    assert "skipped: ε binary-perm left" in first.line()
    unrestricted = eliminate_cuts(proof("e15_both_pi2_permutation"), "unrestricted")
    assert all(not s.skipped for s in unrestricted.trace)


def test_stale_redex_is_rejected():
    with pytest.raises(StaleRedex):
        apply_reduction(proof("e03_pi2_cut"), RedexDescriptor((0,), Kind.AXIOM, "left"))


def test_herbrand_set_of_cut_free_proofs():
    e1 = proof("e01_exists_axiom")
    assert herbrand_set(e1) == language(e1)
    # weakened side formulas contribute no instance
    e2 = proof("e02_cutfree_contraction")
    assert herbrand_set(e2) == {(i, t) for i, t in language(e2) if i == 0}


@given(st.lists(st.sampled_from(["0", "1"]), max_size=6))
def test_paths_print_and_parse_back(bits):
    path = tuple(int(b) for b in bits)
    assert parse_path(format_path(path)) == path


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(CORPUS)), st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=12))
def test_random_reduction_sequences_preserve_the_end_sequent(stem, choices):
    p = proof(stem)
    for k in choices:
        rs = applicable_reductions(p)
        if not rs:
            break
        q = apply_reduction(p, rs[k % len(rs)])
        assert q.conclusion == p.conclusion
        assert K.check_proof(q) == []
        p = q
