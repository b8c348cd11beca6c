import pytest
from hypothesis import given, strategies as st

from lkgrammar.lam import (EPS, O, App, Arrow, FO, Lam, LambdaTypeError, NonGroundError,
                           Pair, Proj, Prod, Subst, TVar, UNIT, WC, beta_reduce,
                           evaluate_substitutions, free_tvars, seq, seq_type, subst_tvars,
                           tau, tau_star, type_of, weakening_constant)
from lkgrammar.syntax import Signature, formula_from_text
from lkgrammar.terms import Fn, Var

c = Fn("c", ())
f = lambda t: Fn("f", (t,))
SIG = Signature({"c": 0}, {"R": 2})


def test_formula_types():
    pi2 = formula_from_text("(all x (all y (ex z (atom R x z))))", SIG)
    sigma2 = formula_from_text("(ex x (all y (all z (atom R y z))))", SIG)
    assert tau(pi2) == seq_type(1) and tau_star(pi2) == seq_type(2)
    assert tau(sigma2) == seq_type(1)
    assert tau_star(sigma2) == Arrow(O, seq_type(2))


def test_sequence_types():
    assert seq_type(0) == EPS
    assert type_of(seq([FO(c), FO(c)])) == Prod(O, Prod(O, EPS))


@pytest.mark.parametrize("term", [
    App(FO(c), FO(c)),
    Subst(FO(c), "a", UNIT),
    Proj(0, FO(c)),
    TVar("z"),
])
def test_ill_typed_terms_are_rejected(term):
    with pytest.raises(LambdaTypeError):
        type_of(term)


def test_explicit_substitution_distributes_over_sequences():
    t = Subst(seq([FO(Var("a")), FO(f(Var("a")))]), "a", FO(c))
    assert evaluate_substitutions(t) == (c, f(c))
    assert evaluate_substitutions(Subst(UNIT, "a", FO(c))) == ()


def test_non_ground_results_are_reported():
    with pytest.raises(NonGroundError):
        evaluate_substitutions(seq([FO(Var("a"))]))
    assert evaluate_substitutions(seq([FO(Var("a"))]), require_ground=False) == (Var("a"),)


def test_weakening_constant():
    sigma = formula_from_text("(ex x (ex y (atom R x y)))", SIG)
    assert weakening_constant(sigma) == seq([WC, WC])


def test_substitution_avoids_capture():
    t = Lam("y", O, Pair(TVar("x"), TVar("y")))
    out = subst_tvars(t, {"x": TVar("y")})
    assert "y" in free_tvars(out)
    assert beta_reduce(App(out, FO(c))) == Pair(TVar("y"), FO(c))


# -- random well-typed terms -------------------------------------------------

GROUND = [O, EPS, seq_type(1), seq_type(2)]


@st.composite
def typed_term(draw, ty, env=(), depth=3):
    """A closed-over-env term of type ty, with β-, projection- and substitution-redexes."""
    options = []
    vars_here = [v for v, vt in env if vt == ty]
    if vars_here:
        options.append("var")
    if ty == O:
        options += ["fo", "fn"]
    elif ty == EPS:
        options.append("unit")
    elif isinstance(ty, Prod):
        options.append("pair")
    elif isinstance(ty, Arrow):
        options.append("lam")
    if depth > 0:
        options += ["beta", "proj"]
        if ty == O or ty in GROUND:
            options.append("subst")
    kind = draw(st.sampled_from(options))
    sub = lambda t, e=env: typed_term(t, e, depth - 1)
    match kind:
        case "var":
            return TVar(draw(st.sampled_from(vars_here)))
        case "fo":
            return FO(draw(st.sampled_from([c, Var("a"), f(Var("a"))])))
        case "fn":
            return Subst(FO(f(Var("h"))), "h", draw(sub(O)))
        case "unit":
            return UNIT
        case "pair":
            return Pair(draw(sub(ty.left)), draw(sub(ty.right)))
        case "lam":
            v = f"v{len(env)}"
            return Lam(v, ty.arg, draw(typed_term(ty.res, env + ((v, ty.arg),), depth - 1)))
        case "beta":
            at = draw(st.sampled_from([O, seq_type(1)]))
            v = f"v{len(env)}"
            body = draw(typed_term(ty, env + ((v, at),), depth - 1))
            return App(Lam(v, at, body), draw(sub(at)))
        case "proj":
            other = draw(st.sampled_from([O, EPS]))
            return Proj(0, Pair(draw(sub(ty)), draw(sub(other))))
        case "subst":
            return Subst(draw(sub(ty)), "a", draw(sub(O)))


closed_ground = st.sampled_from(GROUND).flatmap(lambda ty: typed_term(ty).map(lambda t: (ty, t)))


@given(closed_ground)
def test_reduction_preserves_types(pair):
    ty, t = pair
    assert type_of(t) == ty
    assert type_of(beta_reduce(t)) == ty


@given(closed_ground)
def test_reduction_strategies_agree(pair):
    _, t = pair
    assert beta_reduce(t, "normal") == beta_reduce(t, "innermost")


@given(closed_ground)
def test_normal_forms_are_stable(pair):
    _, t = pair
    nf = beta_reduce(t)
    assert beta_reduce(nf) == nf


@given(closed_ground.filter(lambda p: p[0] != O))
def test_sequence_terms_evaluate_to_tuples_of_the_right_length(pair):
    ty, t = pair
    out = evaluate_substitutions(Subst(t, "a", FO(c)) if ty != EPS else t)
    assert len(out) == {EPS: 0, seq_type(1): 1, seq_type(2): 2}[ty]
