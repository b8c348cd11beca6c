"""Simple types and structured λ-terms.

Ground types are ``o`` (structured first-order terms) and ``ε`` (unit).
Sequence types are right-nested products ``o^k = o × o^(k-1)``, ``o^0 = ε``.

An explicit substitution ``s[α↦t]`` is a ground-type constructor.  Writing it
around a sequence-typed term is read componentwise, and normalization pushes
it through pairs; it is never pushed under λ.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Union

from .terms import (Fn, Formula, Term, WC_TERM, prenex_shape,
                    subst_term, term_vars)


class LambdaTypeError(TypeError):
    pass


class NonGroundError(ValueError):
    pass


def _cached_hash(self):
    h = self.__dict__.get("_h")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_h", h)
    return h


def _getstate(self):
    return {k: v for k, v in self.__dict__.items() if k != "_h"}


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    cls.__getstate__ = _getstate
    return cls


# -- types -------------------------------------------------------------------

@_node
class Base:
    name: str

    def __str__(self):
        return self.name


@_node
class Prod:
    left: "SimpleType"
    right: "SimpleType"

    def __str__(self):
        k = seq_length(self)
        if k is not None:
            return f"o^{k}"
        return f"({self.left} × {self.right})"


@_node
class Arrow:
    arg: "SimpleType"
    res: "SimpleType"

    def __str__(self):
        a = str(self.arg)
        if isinstance(self.arg, Arrow):
            a = f"({a})"
        return f"{a} → {self.res}"


SimpleType = Union[Base, Prod, Arrow]

O = Base("o")
EPS = Base("ε")


def seq_type(k: int) -> SimpleType:
    t = EPS
    for _ in range(k):
        t = Prod(O, t)
    return t


def seq_length(t: SimpleType) -> int | None:
    """k if ``t`` is o^k, else None."""
    k = 0
    while isinstance(t, Prod):
        if t.left != O:
            return None
        k += 1
        t = t.right
    return k if t == EPS else None


def arrows(args, res: SimpleType) -> SimpleType:
    for a in reversed(list(args)):
        res = Arrow(a, res)
    return res


def order(t: SimpleType) -> int:
    match t:
        case Base():
            return 0
        case Prod(a, b):
            return max(order(a), order(b))
        case Arrow(a, b):
            return max(order(a) + 1, order(b))
    raise LambdaTypeError(f"not a type: {t!r}")


def tau(f: Formula) -> SimpleType:
    """Type of the witness sequence for the weak quantifiers of ``f``."""
    lead, m, n = prenex_shape(f)
    return seq_type(n if lead == "all" else m)


def tau_star(f: Formula) -> SimpleType:
    """Type of the input that feeds the strong quantifiers of ``f``."""
    lead, m, n = prenex_shape(f)
    if lead == "all":
        return seq_type(m)
    return arrows([O] * m, seq_type(n))


# -- terms -------------------------------------------------------------------

@_node
class FO:
    """A first-order term as a λ-term of type o."""
    term: Term

    def __str__(self):
        return str(self.term)


@_node
class Unit:
    def __str__(self):
        return "⟨⟩"


@_node
class Subst:
    body: "LTerm"
    var: str
    value: "LTerm"

    def __str__(self):
        return f"{_atomic(self.body)}[{self.var}↦{self.value}]"


@_node
class Pair:
    fst: "LTerm"
    snd: "LTerm"

    def __str__(self):
        items, tail = seq_items(self)
        if isinstance(tail, Unit):
            return "⟨" + ", ".join(map(str, items)) + "⟩"
        return f"{_atomic(self.fst)} ⋆ {self.snd}"


@_node
class Lam:
    var: str
    vtype: SimpleType
    body: "LTerm"

    def __str__(self):
        return f"λ{self.var}. {self.body}"


@_node
class App:
    fn: "LTerm"
    arg: "LTerm"

    def __str__(self):
        head, args = spine(self)
        return " ".join([_atomic(head)] + [_atomic(a) for a in args])


@_node
class TVar:
    name: str

    def __str__(self):
        return self.name


@_node
class NT:
    node: int
    index: int

    def __str__(self):
        return f"σ[{self.node}:{self.index}]"


@_node
class Proj:
    index: int
    arg: "LTerm"

    def __str__(self):
        return f"p{self.index} {_atomic(self.arg)}"


LTerm = Union[FO, Unit, Subst, Pair, Lam, App, TVar, NT, Proj]

UNIT = Unit()
WC = FO(WC_TERM)


def _atomic(t) -> str:
    s = str(t)
    if isinstance(t, (App, Lam, Proj)) or (isinstance(t, Pair) and not s.startswith("⟨")):
        return f"({s})"
    return s


def seq(items) -> LTerm:
    """⟨u0, …, u_{k-1}⟩ = u0 ⋆ … ⋆ u_{k-1} ⋆ ⟨⟩."""
    out: LTerm = UNIT
    for u in reversed(list(items)):
        out = Pair(u, out)
    return out


def seq_items(t: LTerm) -> tuple[list, LTerm]:
    items = []
    while isinstance(t, Pair):
        items.append(t.fst)
        t = t.snd
    return items, t


def apply(fn: LTerm, *args: LTerm) -> LTerm:
    for a in args:
        fn = App(fn, a)
    return fn


def spine(t: LTerm) -> tuple[LTerm, list]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def lams(names_types, body: LTerm) -> LTerm:
    for name, ty in reversed(list(names_types)):
        body = Lam(name, ty, body)
    return body


def weakening_constant(f: Formula) -> LTerm:
    """⟨wc, …, wc⟩ with one entry per existential quantifier of ``f``."""
    from .terms import count_exists
    return seq([WC] * count_exists(f))


# -- typing ------------------------------------------------------------------

def type_of(t: LTerm, env: dict | None = None, nt_types: dict | None = None) -> SimpleType:
    env = env or {}
    nt_types = nt_types or {}

    def go(t, env):
        match t:
            case FO(term):
                if not isinstance(term, (Fn,)) and type(term).__name__ == "BVar":
                    raise LambdaTypeError(f"bound variable outside a formula: {term}")
                return O
            case Unit():
                return EPS
            case Subst(body, _, value):
                if go(value, env) != O:
                    raise LambdaTypeError(f"substituted value must have type o: {t}")
                bt = go(body, env)
                if bt != O and seq_length(bt) is None:
                    raise LambdaTypeError(f"explicit substitution at non-ground type {bt}: {t}")
                return bt
            case Pair(a, b):
                return Prod(go(a, env), go(b, env))
            case Lam(v, vt, body):
                return Arrow(vt, go(body, {**env, v: vt}))
            case App(fn, arg):
                ft = go(fn, env)
                if not isinstance(ft, Arrow):
                    raise LambdaTypeError(f"applying a term of type {ft}: {t}")
                at = go(arg, env)
                if at != ft.arg:
                    raise LambdaTypeError(f"argument of type {at} where {ft.arg} expected: {t}")
                return ft.res
            case TVar(name):
                if name not in env:
                    raise LambdaTypeError(f"unbound variable {name}")
                return env[name]
            case NT(node, index):
                if (node, index) not in nt_types:
                    raise LambdaTypeError(f"unknown non-terminal {t}")
                return nt_types[(node, index)]
            case Proj(i, arg):
                at = go(arg, env)
                if not isinstance(at, Prod):
                    raise LambdaTypeError(f"projection from type {at}: {t}")
                return at.left if i == 0 else at.right
        raise LambdaTypeError(f"not a term: {t!r}")

    return go(t, env)


# -- substitution and normalization ------------------------------------------

_fresh = itertools.count()


def free_tvars(t: LTerm) -> set[str]:
    match t:
        case TVar(name):
            return {name}
        case Lam(v, _, body):
            return free_tvars(body) - {v}
        case App(a, b) | Pair(a, b):
            return free_tvars(a) | free_tvars(b)
        case Subst(body, _, value):
            return free_tvars(body) | free_tvars(value)
        case Proj(_, arg):
            return free_tvars(arg)
    return set()


def subst_tvars(t: LTerm, mapping: dict) -> LTerm:
    """Capture-avoiding simultaneous substitution of typed variables."""
    if not mapping:
        return t
    match t:
        case TVar(name):
            return mapping.get(name, t)
        case Lam(v, vt, body):
            inner = {k: val for k, val in mapping.items() if k != v}
            if not inner:
                return t
            if any(v in free_tvars(val) for val in inner.values()):
                nv = f"{v}'{next(_fresh)}"
                body = subst_tvars(body, {v: TVar(nv)})
                v = nv
            return Lam(v, vt, subst_tvars(body, inner))
        case App(a, b):
            return App(subst_tvars(a, mapping), subst_tvars(b, mapping))
        case Pair(a, b):
            return Pair(subst_tvars(a, mapping), subst_tvars(b, mapping))
        case Subst(body, var, value):
            return Subst(subst_tvars(body, mapping), var, subst_tvars(value, mapping))
        case Proj(i, arg):
            return Proj(i, subst_tvars(arg, mapping))
    return t


def _push_subst(body: LTerm, var: str, value: LTerm) -> LTerm:
    """Build body[var↦value], distributing over pairs and dropping it on ⟨⟩."""
    match body:
        case Pair(a, b):
            return Pair(_push_subst(a, var, value), _push_subst(b, var, value))
        case Unit():
            return body
    return Subst(body, var, value)


def beta_reduce(t: LTerm, strategy: str = "normal") -> LTerm:
    """β-normal form, with projection and substitution-distribution rules.

    ``strategy`` is "normal" (leftmost-outermost) or "innermost"; both reach
    the same normal form on well-typed terms.
    """
    if strategy == "normal":
        return _nf(t)
    if strategy == "innermost":
        return _nf_inner(t)
    raise ValueError(f"unknown strategy {strategy!r}")


def _whnf(t: LTerm) -> LTerm:
    while True:
        match t:
            case App(fn, arg):
                f = _whnf(fn)
                if isinstance(f, Lam):
                    t = subst_tvars(f.body, {f.var: arg})
                    continue
                return App(f, arg) if f is not fn else t
            case Proj(i, arg):
                a = _whnf(arg)
                if isinstance(a, Pair):
                    t = a.fst if i == 0 else a.snd
                    continue
                return Proj(i, a) if a is not arg else t
            case Subst(body, var, value):
                b = _whnf(body)
                if isinstance(b, (Pair, Unit)):
                    return _push_subst(b, var, value)
                return Subst(b, var, value) if b is not body else t
        return t


def _nf(t: LTerm) -> LTerm:
    t = _whnf(t)
    match t:
        case App(fn, arg):
            return App(_nf(fn), _nf(arg))
        case Lam(v, vt, body):
            return Lam(v, vt, _nf(body))
        case Pair(a, b):
            return Pair(_nf(a), _nf(b))
        case Subst(body, var, value):
            return _push_subst(_nf(body), var, _nf(value))
        case Proj(i, arg):
            return Proj(i, _nf(arg))
    return t


def _nf_inner(t: LTerm) -> LTerm:
    match t:
        case App(fn, arg):
            f, a = _nf_inner(fn), _nf_inner(arg)
            if isinstance(f, Lam):
                return _nf_inner(subst_tvars(f.body, {f.var: a}))
            return App(f, a)
        case Lam(v, vt, body):
            return Lam(v, vt, _nf_inner(body))
        case Pair(a, b):
            return Pair(_nf_inner(a), _nf_inner(b))
        case Proj(i, arg):
            a = _nf_inner(arg)
            if isinstance(a, Pair):
                return a.fst if i == 0 else a.snd
            return Proj(i, a)
        case Subst(body, var, value):
            b, v = _nf_inner(body), _nf_inner(value)
            if isinstance(b, (Pair, Unit)):
                return _nf_inner(_push_subst(b, var, v))
            return Subst(b, var, v)
    return t


def has_nonterminal(t: LTerm) -> bool:
    match t:
        case NT():
            return True
        case App(a, b) | Pair(a, b):
            return has_nonterminal(a) or has_nonterminal(b)
        case Lam(_, _, body):
            return has_nonterminal(body)
        case Subst(body, _, value):
            return has_nonterminal(body) or has_nonterminal(value)
        case Proj(_, arg):
            return has_nonterminal(arg)
    return False


# -- evaluating explicit substitutions (the T ↦ T* map) ----------------------

def evaluate_substitutions(t: LTerm, require_ground: bool = True) -> tuple:
    """Evaluate all explicit substitutions in a sequence-term.

    Evaluation is innermost-first: for s[α↦u] both s and u are evaluated and
    then u is substituted into s.
    """
    items, tail = seq_items(beta_reduce(t))
    if not isinstance(tail, Unit):
        raise NonGroundError(f"not a sequence-term: {t}")
    out = tuple(_eval_o(u) for u in items)
    if require_ground:
        for term in out:
            left = sorted(set(term_vars(term)))
            if left:
                raise NonGroundError(f"non-ground: free variable(s) {', '.join(left)} in {term}")
    return out


def _eval_o(t: LTerm) -> Term:
    match t:
        case FO(term):
            return term
        case Subst(body, var, value):
            return subst_term(_eval_o(body), var, _eval_o(value))
    raise NonGroundError(f"non-ground: cannot evaluate {t}")
