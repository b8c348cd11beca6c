"""First-order terms and negation-normal-form formulas.

Free variables (eigenvariables) and bound variables are separate classes, so
instantiating a quantifier with a witness term can never capture anything.
Constants are nullary function applications.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Union

WC = "wc"  # reserved weakening constant


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class BVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


Term = Union[Var, BVar, Fn]


def const(name: str) -> Fn:
    return Fn(name, ())


WC_TERM = const(WC)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()
    negated: bool = False

    def __str__(self):
        body = self.pred if not self.args else f"{self.pred}({', '.join(map(str, self.args))})"
        return "¬" + body if self.negated else body


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} ∨ {self.right})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} ∧ {self.right})"


@dataclass(frozen=True)
class All:
    var: str
    body: "Formula"

    def __str__(self):
        return f"∀{self.var} {self.body}"


@dataclass(frozen=True)
class Ex:
    var: str
    body: "Formula"

    def __str__(self):
        return f"∃{self.var} {self.body}"


@dataclass(frozen=True)
class Bot:
    """Empty disjunction; only produced when rendering expansions."""

    def __str__(self):
        return "⊥"


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "⊤"


Formula = Union[Atom, Or, And, All, Ex, Bot, Top]


class PrenexClass(enum.Enum):
    QF = "quantifier-free"
    SIGMA1 = "Σ1"
    PI1 = "Π1"
    SIGMA2 = "Σ2"
    PI2 = "Π2"
    OTHER = "other"


# -- terms -------------------------------------------------------------------

def term_vars(t: Term) -> Iterator[str]:
    """Names of free variables in ``t``."""
    match t:
        case Var(name):
            yield name
        case Fn(_, args):
            for a in args:
                yield from term_vars(a)


def term_symbols(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, Fn):
        yield t.name, len(t.args)
        for a in t.args:
            yield from term_symbols(a)


def subst_term(t: Term, var: str, s: Term) -> Term:
    match t:
        case Var(name):
            return s if name == var else t
        case Fn(name, args) if args:
            new = tuple(subst_term(a, var, s) for a in args)
            return t if new == args else Fn(name, new)
    return t


def replace_subterm(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, Fn) and t.args:
        return Fn(t.name, tuple(replace_subterm(a, old, new) for a in t.args))
    return t


def contains_term(t: Term, sub: Term) -> bool:
    if t == sub:
        return True
    return isinstance(t, Fn) and any(contains_term(a, sub) for a in t.args)


def _instantiate_term(t: Term, bvar: str, s: Term) -> Term:
    match t:
        case BVar(name) if name == bvar:
            return s
        case Fn(name, args) if args:
            return Fn(name, tuple(_instantiate_term(a, bvar, s) for a in args))
    return t


# -- formulas ----------------------------------------------------------------

def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom)


def dual(f: Formula) -> Formula:
    """De Morgan dual of an NNF formula."""
    match f:
        case Atom(p, args, neg):
            return Atom(p, args, not neg)
        case Or(a, b):
            return And(dual(a), dual(b))
        case And(a, b):
            return Or(dual(a), dual(b))
        case All(v, body):
            return Ex(v, dual(body))
        case Ex(v, body):
            return All(v, dual(body))
        case Bot():
            return Top()
        case Top():
            return Bot()
    raise TypeError(f"not a formula: {f!r}")


def _map_terms(f: Formula, fn, shadow: frozenset = frozenset()) -> Formula:
    match f:
        case Atom(p, args, neg):
            return Atom(p, tuple(fn(a, shadow) for a in args), neg)
        case Or(a, b):
            return Or(_map_terms(a, fn, shadow), _map_terms(b, fn, shadow))
        case And(a, b):
            return And(_map_terms(a, fn, shadow), _map_terms(b, fn, shadow))
        case All(v, body):
            return All(v, _map_terms(body, fn, shadow | {v}))
        case Ex(v, body):
            return Ex(v, _map_terms(body, fn, shadow | {v}))
    return f


def instantiate(f: Formula, t: Term) -> Formula:
    """Strip the outer quantifier of ``f`` and put ``t`` for its variable: A(v/t)."""
    if not isinstance(f, (All, Ex)):
        raise ValueError(f"not a quantified formula: {f}")
    v = f.var

    def inst(a, shadow):
        return a if v in shadow else _instantiate_term(a, v, t)

    return _map_terms(f.body, inst)


def substitute(obj, var: str, s: Term):
    """Replace the free variable ``var`` by ``s`` in a term, formula or sequent.

    Bound variables live in their own namespace, so no renaming is needed.
    """
    if isinstance(obj, (Var, BVar, Fn)):
        return subst_term(obj, var, s)
    if isinstance(obj, tuple):
        return tuple(substitute(x, var, s) for x in obj)
    return _map_terms(obj, lambda a, _: subst_term(a, var, s))


def abstract(f: Formula, t: Term, bvar: str) -> Formula:
    """Replace every occurrence of ``t`` in ``f`` by the bound variable ``bvar``."""
    return _map_terms(f, lambda a, _: replace_subterm(a, t, BVar(bvar)))


def free_vars(obj) -> set[str]:
    if isinstance(obj, (Var, BVar, Fn)):
        return set(term_vars(obj))
    if isinstance(obj, tuple):
        return set().union(*(free_vars(x) for x in obj)) if obj else set()
    out: set[str] = set()
    for a in atom_terms(obj):
        out.update(term_vars(a))
    return out


def atom_terms(f: Formula) -> Iterator[Term]:
    match f:
        case Atom(_, args, _):
            yield from args
        case Or(a, b) | And(a, b):
            yield from atom_terms(a)
            yield from atom_terms(b)
        case All(_, body) | Ex(_, body):
            yield from atom_terms(body)


def atoms(f: Formula) -> Iterator[Atom]:
    match f:
        case Atom():
            yield f
        case Or(a, b) | And(a, b):
            yield from atoms(a)
            yield from atoms(b)
        case All(_, body) | Ex(_, body):
            yield from atoms(body)


def bound_names(f: Formula) -> set[str]:
    match f:
        case Or(a, b) | And(a, b):
            return bound_names(a) | bound_names(b)
        case All(v, body) | Ex(v, body):
            return {v} | bound_names(body)
    return set()


def fresh_bound_name(f: Formula, base: str = "v") -> str:
    taken = bound_names(f)
    for n in itertools.chain([""], itertools.count(1)):
        cand = f"{base}{n}"
        if cand not in taken:
            return cand
    raise AssertionError


def contains_term_in(f: Formula, t: Term) -> bool:
    return any(contains_term(a, t) for a in atom_terms(f))


def is_qf(f: Formula) -> bool:
    match f:
        case Or(a, b) | And(a, b):
            return is_qf(a) and is_qf(b)
        case All() | Ex():
            return False
    return True


def prefix(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Split ``f`` into its quantifier prefix [(kind, var)] and matrix."""
    quants = []
    while isinstance(f, (All, Ex)):
        quants.append(("all" if isinstance(f, All) else "ex", f.var))
        f = f.body
    return quants, f


def blocks(f: Formula) -> list[tuple[str, int]] | None:
    """Quantifier blocks of a prenex formula, or None if not prenex."""
    quants, matrix = prefix(f)
    if not is_qf(matrix):
        return None
    out: list[tuple[str, int]] = []
    for kind, _ in quants:
        if out and out[-1][0] == kind:
            out[-1] = (kind, out[-1][1] + 1)
        else:
            out.append((kind, 1))
    return out


def classify(f: Formula) -> PrenexClass:
    bl = blocks(f)
    if bl is None:
        return PrenexClass.OTHER
    kinds = tuple(k for k, _ in bl)
    return {
        (): PrenexClass.QF,
        ("ex",): PrenexClass.SIGMA1,
        ("all",): PrenexClass.PI1,
        ("ex", "all"): PrenexClass.SIGMA2,
        ("all", "ex"): PrenexClass.PI2,
    }.get(kinds, PrenexClass.OTHER)


_SIGMA2 = {PrenexClass.QF, PrenexClass.SIGMA1, PrenexClass.PI1, PrenexClass.SIGMA2}
_PI2 = {PrenexClass.QF, PrenexClass.SIGMA1, PrenexClass.PI1, PrenexClass.PI2}


def is_sigma1(f: Formula) -> bool:
    return classify(f) in (PrenexClass.QF, PrenexClass.SIGMA1)


def is_sigma2(f: Formula) -> bool:
    """Prenex Σ2, degenerate classes included."""
    return classify(f) in _SIGMA2


def is_pi2(f: Formula) -> bool:
    return classify(f) in _PI2


def is_prenex2(f: Formula) -> bool:
    return classify(f) is not PrenexClass.OTHER


def is_genuine_pi2(f: Formula) -> bool:
    """At least one leading universal followed by at least one existential."""
    return classify(f) is PrenexClass.PI2


def count_exists(f: Formula) -> int:
    quants, _ = prefix(f)
    return sum(1 for k, _ in quants if k == "ex")


def prenex_shape(f: Formula) -> tuple[str, int, int]:
    """Return (lead, m, n) for a prenex Π2/Σ2 formula.

    lead is "all" for ∀^m ∃^n G (covers Π1, Σ1 with m=0, and qf) and "ex" for
    ∃^m ∀^n G with n > 0.
    """
    bl = blocks(f)
    if bl is None or classify(f) is PrenexClass.OTHER:
        raise ValueError(f"not prenex Π2/Σ2: {f}")
    counts = dict(bl)
    if bl and bl[0][0] == "ex" and len(bl) == 2:
        return "ex", counts["ex"], counts["all"]
    return "all", counts.get("all", 0), counts.get("ex", 0)


# -- alpha equivalence -------------------------------------------------------

def canonical(f: Formula) -> Formula:
    """Rename bound variables by binding depth so alpha-equivalent formulas coincide."""

    def go(g, env, depth):
        match g:
            case Atom(p, args, neg):
                return Atom(p, tuple(_rename_bound(a, env) for a in args), neg)
            case Or(a, b):
                return Or(go(a, env, depth), go(b, env, depth))
            case And(a, b):
                return And(go(a, env, depth), go(b, env, depth))
            case All(v, body):
                return All(f"#{depth}", go(body, {**env, v: f"#{depth}"}, depth + 1))
            case Ex(v, body):
                return Ex(f"#{depth}", go(body, {**env, v: f"#{depth}"}, depth + 1))
        return g

    return go(f, {}, 0)


def _rename_bound(t: Term, env: dict) -> Term:
    match t:
        case BVar(name) if name in env:
            return BVar(env[name])
        case Fn(name, args) if args:
            return Fn(name, tuple(_rename_bound(a, env) for a in args))
    return t


def alpha_eq(f: Formula, g: Formula) -> bool:
    return f == g or canonical(f) == canonical(g)


def seq_alpha_eq(s: tuple, t: tuple) -> bool:
    return len(s) == len(t) and all(alpha_eq(a, b) for a, b in zip(s, t))


def disjunction(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return Bot()
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = Or(g, out)
    return out


def instantiate_block(f: Formula, ts) -> Formula:
    for t in ts:
        f = instantiate(f, t)
    return f
