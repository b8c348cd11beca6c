import pytest
from hypothesis import given, strategies as st

from lkgrammar.syntax import (InputError, Signature, SignatureError, format_formula,
                              formula_from_text, read_all, read_one,
                              term_from_text)
from lkgrammar.terms import (All, And, Atom, BVar, Ex, Fn, Or, PrenexClass, Var, alpha_eq,
                             classify, dual, free_vars, instantiate, instantiate_block,
                             is_genuine_pi2, prenex_shape)

SIG = Signature({"c": 0, "f": 1, "g": 2}, {"P": 1, "R": 2})


def F(text):
    return formula_from_text(text, SIG)


def test_reader_handles_comments_and_nesting():
    assert read_all("; note\n(a (b c)) d") == [["a", ["b", "c"]], "d"]


@pytest.mark.parametrize("text", ["(a (b)", "(a))", ""])
def test_reader_rejects_unbalanced_input(text):
    with pytest.raises(InputError):
        read_one(text)


def test_term_scoping():
    assert term_from_text("c", SIG) == Fn("c", ())
    assert term_from_text("x", SIG) == Var("x")
    assert term_from_text("(fn g c x)", SIG) == Fn("g", (Fn("c", ()), Var("x")))
    assert F("(all x (atom P x))") == All("x", Atom("P", (BVar("x"),)))


@pytest.mark.parametrize("text", ["(fn f c c)", "(fn k c)", "f"])
def test_term_signature_errors(text):
    with pytest.raises(SignatureError):
        term_from_text(text, SIG)


def test_negation_only_on_atoms():
    with pytest.raises(InputError):
        F("(neg (or (atom P c) (atom P c)))")


def test_weakening_constant_is_reserved():
    with pytest.raises(SignatureError):
        Signature.parse(read_one("(signature (fn wc 0))"))


def test_classification():
    assert classify(F("(atom P c)")) is PrenexClass.QF
    assert classify(F("(ex x (atom P x))")) is PrenexClass.SIGMA1
    assert classify(F("(all x (ex y (atom R x y)))")) is PrenexClass.PI2
    assert classify(F("(ex x (all y (atom R x y)))")) is PrenexClass.SIGMA2
    assert classify(F("(ex x (all y (ex z (atom R x z))))")) is PrenexClass.OTHER
    assert is_genuine_pi2(F("(all x (ex y (atom R x y)))"))
    assert not is_genuine_pi2(F("(all x (atom P x))"))


def test_prenex_shape():
    assert prenex_shape(F("(all x (all y (ex z (atom R x z))))")) == ("all", 2, 1)
    assert prenex_shape(F("(ex x (all y (atom R x y)))")) == ("ex", 1, 1)
    assert prenex_shape(F("(ex x (atom P x))")) == ("all", 0, 1)
    assert prenex_shape(F("(atom P c)")) == ("all", 0, 0)


def test_instantiate_block():
    f = F("(ex x (ex y (atom R x y)))")
    c = Fn("c", ())
    assert instantiate_block(f, [c, Var("a")]) == Atom("R", (c, Var("a")))


def test_alpha_equivalence():
    assert alpha_eq(F("(all x (atom P x))"), F("(all y (atom P y))"))
    assert not alpha_eq(F("(all x (atom R x c))"), F("(all y (atom R c y))"))


# -- properties --------------------------------------------------------------

terms = st.recursive(
    st.sampled_from([Fn("c", ()), Var("a"), Var("b")]),
    lambda sub: st.builds(lambda t: Fn("f", (t,)), sub) | st.builds(lambda s, t: Fn("g", (s, t)), sub, sub),
    max_leaves=6)
literals = st.builds(lambda t, s, neg: Atom("R", (t, s), neg), terms, terms, st.booleans())
qf = st.recursive(literals, lambda sub: st.builds(Or, sub, sub) | st.builds(And, sub, sub), max_leaves=6)


@given(qf)
def test_dual_is_an_involution(f):
    assert dual(dual(f)) == f


@given(qf)
def test_formulas_print_and_parse_back(f):
    assert formula_from_text(format_formula(f), SIG) == f


@given(qf, terms)
def test_instantiating_an_abstraction_restores_the_formula(f, t):
    from lkgrammar.terms import abstract
    g = Ex("v", abstract(f, Var("a"), "v"))
    assert instantiate(g, Var("a")) == f
    assert "a" not in free_vars(g)
