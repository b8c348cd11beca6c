"""Typed non-deterministic tree grammars extracted from proofs, and their languages.

Each proof node π ⊢ A0,…,An contributes non-terminals σ[π:i] of type
τ*_{A0} → … → τ*_{An} → τ_{Ai}, with productions determined by the last
inference of π.  Non-terminals are keyed by (node id, index).

The language is computed by a structural evaluator that follows the
rewriting semantics: every copy of a duplicated argument is rewritten on its
own, and explicit substitutions are distributed componentwise over
sequences.  A slow reference engine that closes a term under single
rewriting steps at every position is kept for differential testing.
"""
from __future__ import annotations

import graphlib
import itertools
import json
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import lam
from .kernel import Proof, Rule, check_proof, subproofs
from .lam import (EPS, NT, O, UNIT, App, FO, Lam, LTerm, Pair, Proj, Subst,
                  TVar, Unit, apply, arrows, lams, seq,
                  subst_tvars, tau, tau_star, type_of, weakening_constant)
from .terms import (Fn, PrenexClass, Term, Var, classify, is_sigma1, prenex_shape,
                    subst_term, term_vars)

CS = "cs"
CF = "cf"
DEFAULT_BUDGET = 10 ** 6


class GrammarError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class NonTerminal:
    node: int
    index: int
    type: object

    def __str__(self):
        return f"σ[{self.node}:{self.index}]"


@dataclass(frozen=True)
class Production:
    node: int
    index: int
    params: tuple            # ((name, type), ...), one per formula of the node's sequent
    rhs: LTerm
    pair_pattern: tuple | None = None   # (z0, z1) destructuring the first parameter

    @property
    def lhs_text(self) -> str:
        names = [p for p, _ in self.params]
        if self.pair_pattern:
            names[0] = f"({self.pair_pattern[0]} ⋆ {self.pair_pattern[1]})"
        return " ".join([f"σ[{self.node}:{self.index}]"] + names)

    def __str__(self):
        return f"{self.lhs_text} -> {self.rhs}"


@dataclass
class Grammar:
    mode: str
    root: int
    nonterminals: dict = field(default_factory=dict)      # (node, i) -> NonTerminal
    productions: dict = field(default_factory=dict)       # (node, i) -> [Production]
    arity: dict = field(default_factory=dict)             # node -> sequent length
    end_sequent: tuple = ()

    def nt_types(self) -> dict:
        return {k: nt.type for k, nt in self.nonterminals.items()}

    def all_productions(self) -> list[Production]:
        return [p for k in sorted(self.productions) for p in self.productions[k]]

    def start_term(self, i: int) -> LTerm:
        return apply(NT(self.root, i), *([UNIT] * self.arity[self.root]))

    def dump(self) -> str:
        return "\n".join(str(p) for p in self.all_productions())

    def dependencies(self) -> dict:
        deps = {}
        for key, prods in self.productions.items():
            out = set()
            for p in prods:
                out |= _nonterminals_in(p.rhs)
            deps[key] = out
        return deps

    def topological_order(self) -> list:
        """Non-terminals ordered leaves-first; raises GrammarError on a cycle."""
        try:
            return list(graphlib.TopologicalSorter(self.dependencies()).static_order())
        except graphlib.CycleError as e:
            raise GrammarError(f"grammar is cyclic: {e.args[1]}") from e


def _nonterminals_in(t: LTerm) -> set:
    match t:
        case NT(node, i):
            return {(node, i)}
        case App(a, b) | Pair(a, b):
            return _nonterminals_in(a) | _nonterminals_in(b)
        case Subst(a, _, b):
            return _nonterminals_in(a) | _nonterminals_in(b)
        case Lam(_, _, body):
            return _nonterminals_in(body)
        case Proj(_, a):
            return _nonterminals_in(a)
    return set()


# -- building blocks ---------------------------------------------------------

def dot_apply(z: LTerm, r: Term, ztype) -> LTerm:
    """z·r: z itself if z has type ε, else the application z r."""
    if ztype == EPS:
        return z
    if isinstance(ztype, lam.Arrow) and ztype.arg == O:
        return App(z, FO(r))
    raise lam.LambdaTypeError(f"cannot apply a term of type {ztype} to a first-order term")


def compose_circ(f, a: LTerm, b: LTerm, xs, ys, fresh: str = "u") -> LTerm:
    """(a ∘_F b) xs ys, the input passed across a cut on F."""
    lead, m, n = prenex_shape(f)
    if lead == "all":
        if n == 0:                      # quantifier-free or Π1
            return UNIT
        if m == 0:                      # Σ1: no strong quantifiers to feed
            return apply(a, UNIT, *xs)
        zs = [f"{fresh}{k}" for k in range(m)]
        return lams([(z, O) for z in zs], apply(a, seq(TVar(z) for z in zs), *xs))
    zs = [f"{fresh}{k}" for k in range(m)]
    inner = lams([(z, O) for z in zs], apply(b, seq(TVar(z) for z in zs), *ys))
    return apply(a, inner, *xs)


def nonterminal_type(sequent, i: int):
    return arrows([tau_star(a) for a in sequent], tau(sequent[i]))


# -- extraction --------------------------------------------------------------

def extract_grammar(p: Proof, mode: str = CS, validate: bool = True) -> Grammar:
    if mode not in (CS, CF):
        raise GrammarError(f"unknown grammar mode {mode!r}")
    if validate:
        report = check_proof(p)
        if report:
            nid, msg = report[0]
            raise GrammarError(f"invalid proof at node {nid}: {msg}")
    g = Grammar(mode, p.nid, end_sequent=p.conclusion)
    for n in subproofs(p):
        for a in n.conclusion:
            if classify(a) is PrenexClass.OTHER:
                raise GrammarError(f"formula not prenex Π2/Σ2 at node {n.nid}: {a}")
        g.arity[n.nid] = len(n.conclusion)
        for i in range(len(n.conclusion)):
            g.nonterminals[(n.nid, i)] = NonTerminal(n.nid, i, nonterminal_type(n.conclusion, i))
        for prod in _productions(n, mode):
            g.productions.setdefault((prod.node, prod.index), []).append(prod)
    return g


def _productions(n: Proof, mode: str) -> list[Production]:
    c = n.conclusion
    k = len(c)
    names = [f"x{j}" for j in range(k)]
    X = [TVar(x) for x in names]
    params = tuple((names[j], tau_star(c[j])) for j in range(k))
    prem = n.premises
    S = lambda q, i: NT(prem[q].nid, i)  # noqa: E731
    out: list[Production] = []

    def add(i, rhs, pattern=None, ps=params):
        out.append(Production(n.nid, i, ps, rhs, pattern))

    match n.rule:
        case Rule.AXIOM:
            for i in range(2):
                add(i, X[1 - i])
        case Rule.OR:
            add(0, UNIT)
            for i in range(1, k):
                add(i, apply(S(0, i + 1), X[0], X[0], *X[1:]))
        case Rule.AND:
            g = len(prem[0].conclusion) - 1
            add(0, UNIT)
            for i in range(1, k):
                if i <= g:
                    add(i, apply(S(0, i), X[0], *X[1:g + 1]))
                else:
                    add(i, apply(S(1, i - g), X[0], *X[g + 1:]))
        case Rule.ALL:
            alpha = n.payload
            if mode == CS:
                z0, z1 = TVar("z0"), TVar("z1")
                for i in range(k):
                    add(i, Subst(apply(S(0, i), z1, *X[1:]), alpha, z0), ("z0", "z1"))
            else:
                for i in range(k):
                    add(i, Subst(apply(S(0, i), Proj(1, X[0]), *X[1:]), alpha, Proj(0, X[0])))
        case Rule.EX:
            r = n.payload
            zr = dot_apply(X[0], r, tau_star(c[0]))
            add(0, Pair(FO(r), apply(S(0, 0), zr, *X[1:])))
            for i in range(1, k):
                add(i, apply(S(0, i), zr, *X[1:]))
        case Rule.CUT:
            a = prem[0].conclusion[0]
            abar = prem[1].conclusion[0]
            g = len(prem[0].conclusion) - 1
            xs, ys = X[:g], X[g:]
            for i in range(k):
                if i < g:
                    arg = compose_circ(abar, S(1, 0), S(0, 0), ys, xs)
                    add(i, apply(S(0, i + 1), arg, *xs))
                else:
                    arg = compose_circ(a, S(0, 0), S(1, 0), xs, ys)
                    add(i, apply(S(1, i - g + 1), arg, *ys))
        case Rule.CONTR:
            add(0, apply(S(0, 0), X[0], X[0], *X[1:]))
            add(0, apply(S(0, 1), X[0], X[0], *X[1:]))
            for i in range(1, k):
                add(i, apply(S(0, i + 1), X[0], X[0], *X[1:]))
        case Rule.WEAK:
            add(0, weakening_constant(c[0]))
            for i in range(1, k):
                add(i, apply(S(0, i - 1), *X[1:]))
        case Rule.PERM:
            j = n.payload
            sw = list(X)
            sw[j], sw[j + 1] = sw[j + 1], sw[j]
            for i in range(k):
                src = j + 1 if i == j else j if i == j + 1 else i
                add(i, apply(S(0, src), *sw))
    return out


def production_env(p: Production, nt_type) -> dict:
    env = {name: ty for name, ty in p.params}
    if p.pair_pattern:
        first = p.params[0][1]
        if not isinstance(first, lam.Prod):
            raise GrammarError(f"pair pattern on non-pair parameter of {p.lhs_text}")
        env[p.pair_pattern[0]] = first.left
        env[p.pair_pattern[1]] = first.right
    return env


def typecheck(g: Grammar) -> list[str]:
    """Check every production: lhs and rhs must have the same ground type."""
    errors = []
    types = g.nt_types()
    for p in g.all_productions():
        nt = g.nonterminals[(p.node, p.index)]
        ty = nt.type
        for _ in p.params:
            ty = ty.res
        if lam.order(nt.type) > 2:
            errors.append(f"{nt}: order {lam.order(nt.type)} exceeds 2")
        try:
            rt = type_of(p.rhs, production_env(p, nt.type), types)
        except (lam.LambdaTypeError, GrammarError) as e:
            errors.append(f"{p.lhs_text}: {e}")
            continue
        if rt != ty:
            errors.append(f"{p.lhs_text}: rhs has type {rt}, lhs has {ty}")
        elif not (ty == O or lam.seq_length(ty) is not None):
            errors.append(f"{p.lhs_text}: production at non-ground type {ty}")
    return errors


# -- structural evaluation ---------------------------------------------------

class Evaluator:
    """Computes L(u) for closed ground terms u of a grammar.

    Values: a first-order Term for type o, a tuple of Terms for o^k.
    ``steps`` counts production applications (memoized terms count once).
    """

    def __init__(self, g: Grammar, budget: int = DEFAULT_BUDGET):
        self.g = g
        self.budget = budget
        self.steps = 0
        self._eval: dict = {}
        self._hnf: dict = {}

    def _tick(self, n=1):
        self.steps += n
        if self.steps > self.budget:
            raise BudgetExceeded(f"more than {self.budget} rewrite steps")

    def instances(self, head: NT, args) -> list[LTerm]:
        key = (head.node, head.index)
        if key not in self.g.productions:
            raise GrammarError(f"no productions for {head}")
        out = []
        for p in self.g.productions[key]:
            if len(args) != len(p.params):
                raise GrammarError(f"{head} applied to {len(args)} argument(s), expects {len(p.params)}")
            if p.pair_pattern:
                rest = {name: a for (name, _), a in zip(p.params[1:], args[1:])}
                for pair in self.hnf(args[0]):
                    m = dict(rest)
                    m[p.pair_pattern[0]] = pair.fst
                    m[p.pair_pattern[1]] = pair.snd
                    self._tick()
                    out.append(subst_tvars(p.rhs, m))
            else:
                self._tick()
                out.append(subst_tvars(p.rhs, {name: a for (name, _), a in zip(p.params, args)}))
        return out

    def hnf(self, t: LTerm) -> frozenset:
        """All pair forms a ⋆ b that t can be rewritten to at its head."""
        if t in self._hnf:
            return self._hnf[t]
        w = lam._whnf(t)
        match w:
            case Pair():
                res = frozenset([w])
            case Subst(body, v, val):
                res = frozenset(Pair(Subst(p.fst, v, val), Subst(p.snd, v, val)) for p in self.hnf(body))
            case Proj(i, a):
                res = frozenset().union(*(self.hnf(p.fst if i == 0 else p.snd) for p in self.hnf(a)))
            case App() | NT():
                head, args = lam.spine(w)
                if not isinstance(head, NT):
                    raise lam.NonGroundError(f"non-ground: stuck term {w}")
                res = frozenset().union(*(self.hnf(r) for r in self.instances(head, args)))
            case _:
                raise lam.NonGroundError(f"non-ground: no pair form for {w}")
        self._hnf[t] = res
        return res

    def eval(self, t: LTerm) -> frozenset:
        if t in self._eval:
            return self._eval[t]
        w = lam._whnf(t)
        match w:
            case FO(term):
                res = frozenset([term])
            case Unit():
                res = frozenset([()])
            case Pair(a, b):
                res = frozenset((x,) + y for x in self.eval(a) for y in self.eval(b))
            case Subst(body, v, val):
                vals = self.eval(val)
                res = set()
                for x in self.eval(body):
                    if isinstance(x, tuple):
                        comps = [{subst_term(xi, v, y) for y in vals} for xi in x]
                        res.update(itertools.product(*comps))
                    else:
                        res.update(subst_term(x, v, y) for y in vals)
                res = frozenset(res)
            case Proj(i, a):
                res = frozenset().union(*(self.eval(p.fst if i == 0 else p.snd) for p in self.hnf(a)))
            case App() | NT():
                head, args = lam.spine(w)
                if not isinstance(head, NT):
                    raise lam.NonGroundError(f"non-ground: stuck term {w}")
                res = frozenset().union(*(self.eval(r) for r in self.instances(head, args)))
            case _:
                raise lam.NonGroundError(f"non-ground: cannot evaluate {w}")
        self._eval[t] = res
        return res


def term_language(g: Grammar, t: LTerm, budget: int = DEFAULT_BUDGET) -> frozenset:
    """L(t) after evaluating explicit substitutions."""
    return Evaluator(g, budget).eval(t)


def _index_language(args):
    g, i, budget = args
    ev = Evaluator(g, budget)
    vals = ev.eval(g.start_term(i))
    return i, vals, ev.steps


def _check_ground(i, tuples):
    for tup in tuples:
        for term in tup:
            left = sorted(set(term_vars(term)))
            if left:
                raise lam.NonGroundError(
                    f"non-ground: free variable(s) {', '.join(left)} in witness {term} for formula {i}")


@dataclass(frozen=True)
class LanguageResult:
    language: frozenset
    steps: int


def language(p: Proof, mode: str = CS, budget: int = DEFAULT_BUDGET, parallel: bool = False,
             workers: int | None = None, grammar: Grammar | None = None,
             require_sigma1: bool = True) -> frozenset:
    return language_with_stats(p, mode, budget, parallel, workers, grammar, require_sigma1).language


def language_with_stats(p: Proof, mode: str = CS, budget: int = DEFAULT_BUDGET,
                        parallel: bool = False, workers: int | None = None,
                        grammar: Grammar | None = None, require_sigma1: bool = True) -> LanguageResult:
    """The set of pairs (i, T*) derivable from σ[root:i] ⟨⟩ … ⟨⟩."""
    if require_sigma1:
        for i, a in enumerate(p.conclusion):
            if not is_sigma1(a):
                raise GrammarError(f"end-sequent formula {i} is not prenex Σ1: {a}")
    g = grammar or extract_grammar(p, mode)
    jobs = [(g, i, budget) for i in range(len(p.conclusion))]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_index_language, jobs))
    else:
        results = [_index_language(j) for j in jobs]
    out = set()
    steps = 0
    for i, vals, st in results:
        _check_ground(i, vals)
        out.update((i, v) for v in vals)
        steps += st
    if steps > budget:
        raise BudgetExceeded(f"more than {budget} rewrite steps")
    return LanguageResult(frozenset(out), steps)


# -- reference engine: single rewriting steps at every position --------------

def _redexes(t: LTerm, path=()):
    """Positions of full non-terminal applications, outermost first."""
    head, args = lam.spine(t)
    if isinstance(head, NT):
        yield path, head, args
    match t:
        case App(a, b):
            yield from _redexes(a, path + (0,))
            yield from _redexes(b, path + (1,))
        case Pair(a, b):
            yield from _redexes(a, path + (0,))
            yield from _redexes(b, path + (1,))
        case Subst(a, _, b):
            yield from _redexes(a, path + (0,))
            yield from _redexes(b, path + (1,))
        case Lam(_, _, body):
            yield from _redexes(body, path + (0,))
        case Proj(_, a):
            yield from _redexes(a, path + (0,))


def _replace(t: LTerm, path, new: LTerm) -> LTerm:
    if not path:
        return new
    k, rest = path[0], path[1:]
    match t:
        case App(a, b):
            return App(_replace(a, rest, new), b) if k == 0 else App(a, _replace(b, rest, new))
        case Pair(a, b):
            return Pair(_replace(a, rest, new), b) if k == 0 else Pair(a, _replace(b, rest, new))
        case Subst(a, v, b):
            return Subst(_replace(a, rest, new), v, b) if k == 0 else Subst(a, v, _replace(b, rest, new))
        case Lam(v, ty, body):
            return Lam(v, ty, _replace(body, rest, new))
        case Proj(i, a):
            return Proj(i, _replace(a, rest, new))
    raise ValueError("bad path")


def rewrite_step(t: LTerm, g: Grammar, outermost: bool = False) -> set:
    """Every one-step successor of t (production application then β-normalization).

    With ``outermost`` only the first position (in preorder) that admits a
    production is rewritten; under outside-in semantics this reaches the same
    normal forms with far fewer intermediate terms.
    """
    out = set()
    for path, head, args in _redexes(t):
        if outermost and out:
            break
        key = (head.node, head.index)
        for p in g.productions.get(key, []):
            if len(args) != len(p.params):
                continue
            if p.pair_pattern:
                first = args[0]
                if not isinstance(first, Pair):
                    continue
                m = {name: a for (name, _), a in zip(p.params[1:], args[1:])}
                m[p.pair_pattern[0]] = first.fst
                m[p.pair_pattern[1]] = first.snd
            else:
                m = {name: a for (name, _), a in zip(p.params, args)}
            rhs = subst_tvars(p.rhs, m)
            out.add(lam.beta_reduce(_replace(t, path, rhs)))
    return out


def normal_forms(t: LTerm, g: Grammar, seed: int | None = None, max_terms: int = 200000,
                 outermost: bool = False) -> set:
    """Exhaustive closure under rewrite_step; returns the non-terminal-free terms.

    With a seed, the exploration order is shuffled (the result must not change).
    """
    start = lam.beta_reduce(t)
    seen = {start}
    queue = deque([start])
    rng = random.Random(seed) if seed is not None else None
    out = set()
    while queue:
        if rng is not None:
            k = rng.randrange(len(queue))
            queue.rotate(-k)
        u = queue.popleft()
        succ = rewrite_step(u, g, outermost)
        if not succ and not lam.has_nonterminal(u):
            out.add(u)
        for s in sorted(succ, key=str) if rng is None else succ:
            if s not in seen:
                seen.add(s)
                if len(seen) > max_terms:
                    raise BudgetExceeded(f"reference enumeration exceeded {max_terms} terms")
                queue.append(s)
    return out


def reference_language(p: Proof, mode: str = CS, seed: int | None = None,
                       max_terms: int = 200000, outermost: bool = False) -> frozenset:
    g = extract_grammar(p, mode)
    out = set()
    for i in range(len(p.conclusion)):
        for nf in normal_forms(g.start_term(i), g, seed, max_terms, outermost):
            out.add((i, lam.evaluate_substitutions(nf)))
    return frozenset(out)


# -- output ------------------------------------------------------------------

def sorted_entries(lang, indices=None) -> list[tuple[int, tuple]]:
    return sorted(lang, key=lambda e: (e[0], tuple(str(t) for t in e[1])))


def format_language(lang, n_formulas: int | None = None, fmt: str = "text") -> str:
    entries = sorted_entries(lang)
    if fmt == "json":
        return "\n".join(json.dumps({"index": i, "terms": [str(t) for t in tup]}, ensure_ascii=False)
                         for i, tup in entries)
    lines = []
    n = n_formulas if n_formulas is not None else (max((i for i, _ in entries), default=-1) + 1)
    by_index: dict = {i: [] for i in range(n)}
    for i, tup in entries:
        by_index.setdefault(i, []).append(tup)
    for i in sorted(by_index):
        if not by_index[i]:
            lines.append(f"{i}: ∅")
        for tup in by_index[i]:
            lines.append(f"{i}: ⟨{', '.join(map(str, tup))}⟩")
    return "\n".join(lines)


def random_ground_term(rng: random.Random, functions: dict, depth: int = 2) -> Term:
    consts = [f for f, n in functions.items() if n == 0] or ["c"]
    funs = [(f, n) for f, n in functions.items() if n > 0]
    if depth <= 0 or not funs or rng.random() < 0.4:
        return Fn(rng.choice(consts), ())
    f, n = rng.choice(funs)
    return Fn(f, tuple(random_ground_term(rng, functions, depth - 1) for _ in range(n)))


def random_closed_term(rng: random.Random, ty, functions: dict, depth: int = 2) -> LTerm:
    """A random closed non-terminal-free term of the given argument type."""
    if ty == O:
        t = FO(random_ground_term(rng, functions, depth))
        if rng.random() < 0.3:
            t = Subst(t, "_unused", FO(random_ground_term(rng, functions, depth)))
        return t
    if ty == EPS:
        t = UNIT
        if rng.random() < 0.5:
            t = Subst(t, "_unused", FO(random_ground_term(rng, functions, depth)))
        return t
    if isinstance(ty, lam.Prod):
        return Pair(random_closed_term(rng, ty.left, functions, depth),
                    random_closed_term(rng, ty.right, functions, depth))
    if isinstance(ty, lam.Arrow):
        v = f"w{rng.randrange(10 ** 6)}"
        body = random_closed_term(rng, ty.res, functions, depth)
        if ty.arg == O and lam.seq_length(ty.res):
            # Let the function actually use its argument somewhere.
            items, _ = lam.seq_items(body)
            unary = [f for f, n in functions.items() if n == 1]
            items[rng.randrange(len(items))] = (FO_app(rng.choice(unary), TVar(v))
                                                if unary and rng.random() < 0.5 else TVar(v))
            body = seq(items)
        return Lam(v, ty.arg, body)
    raise lam.LambdaTypeError(f"no random term of type {ty}")


def FO_app(f: str, arg: LTerm) -> LTerm:
    """f(arg) for an o-typed λ-term arg, written with an explicit substitution."""
    hole = "_hole"
    return Subst(FO(Fn(f, (Var(hole),))), hole, arg)
