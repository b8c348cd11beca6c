"""Synthetic proofs and a bounded random search for incomparable cut permutations.

Synthetic proofs are built from an occurrence plan: each occurrence names a
closed prenex formula and the terms for its quantifiers (a term for each ∃, an
eigenvariable name for each ∀).  One occurrence whose instance has the shape
¬A ∨ A is proved from an axiom; every other instance is weakened in.  The
quantifier inferences are then scheduled so that eigenvariable conditions hold,
and equal formulas are contracted.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import kernel as K
from .grammar import BudgetExceeded, language
from .kernel import KernelError, Proof
from .terms import (All, Atom, Ex, Fn, Formula, Or, Term, Var, abstract, alpha_eq,
                    dual, free_vars, instantiate_block, is_genuine_pi2)


@dataclass(frozen=True)
class Occurrence:
    formula: Formula
    terms: tuple  # Term for each ∃, eigenvariable name (str) for each ∀


def _as_term(x) -> Term:
    return Var(x) if isinstance(x, str) else x


def _is_excluded_middle(f: Formula) -> bool:
    return (isinstance(f, Or) and isinstance(f.right, Atom) and not f.right.negated
            and f.left == dual(f.right))


def build_side(occs: list[Occurrence], target: list[Formula]) -> Proof | None:
    """A cut-free proof of ``target`` from the plan, or None if the plan cannot be scheduled."""
    insts = [instantiate_block(o.formula, [_as_term(x) for x in o.terms]) for o in occs]
    start = next((j for j, f in enumerate(insts) if _is_excluded_middle(f)), None)
    if start is None:
        return None
    try:
        p = K.or_intro(K.perm(K.axiom(insts[start].right), 0))
        who = [start]
        for j in range(len(occs)):
            if j != start:
                p = K.weak(p, insts[j])
                who.insert(0, j)
        level = [len(o.terms) for o in occs]

        def front(j):
            nonlocal p
            i = who.index(j)
            p = K.move(p, i, 0)
            who.insert(0, who.pop(i))

        while any(level):
            step = None
            for want_ex in (True, False):
                for j, o in enumerate(occs):
                    if not level[j]:
                        continue
                    k = level[j] - 1
                    x = o.terms[k]
                    if want_ex != (not isinstance(x, str)):
                        continue
                    if isinstance(x, str):
                        others = [f for i, f in enumerate(p.conclusion) if who[i] != j]
                        principal = instantiate_block(o.formula, [_as_term(y) for y in o.terms[:k]])
                        if any(x in free_vars(f) for f in others) or x in free_vars(principal):
                            continue
                    step = j
                    break
                if step is not None:
                    break
            if step is None:
                return None
            j = step
            k = level[j] - 1
            principal = instantiate_block(occs[j].formula, [_as_term(y) for y in occs[j].terms[:k]])
            front(j)
            x = occs[j].terms[k]
            p = K.all_intro(p, x, principal) if isinstance(x, str) else K.ex_intro(p, x, principal)
            level[j] = k
        # contract equal formulas, then arrange
        changed = True
        while changed:
            changed = False
            c = p.conclusion
            for i in range(len(c)):
                for k in range(i + 1, len(c)):
                    if alpha_eq(c[i], c[k]):
                        p = K.move(p, k, 0)
                        p = K.move(p, i + 1, 1)
                        p = K.contr(p)
                        changed = True
                        break
                if changed:
                    break
        if len(p.conclusion) != len(target):
            return None
        for dst, f in enumerate(target):
            src = next(i for i in range(dst, len(p.conclusion)) if alpha_eq(p.conclusion[i], f))
            p = K.move(p, src, dst)
        return p
    except (KernelError, StopIteration):
        return None


# -- the both-Π2 cut permutation --------------------------------------------

def _formulas():
    def pi2(pred):
        a = Atom(pred, (Var("_x"), Var("_y")))
        m = Or(dual(a), a)
        return All("x", Ex("y", _abs(_abs(m, "_x", "x"), "_y", "y")))

    def delta(pred):
        a = Atom(pred, (Var("_x"), Var("_y")))
        return Ex("s", Ex("r", _abs(_abs(Or(dual(a), a), "_x", "s"), "_y", "r")))

    return pi2("P"), pi2("R"), delta("P"), delta("R")


def _abs(f: Formula, var: str, bvar: str) -> Formula:
    return abstract(f, Var(var), bvar)


SEARCH_SIGNATURE = {"c": 0, "d": 0, "h": 2}


def _pick(rng: random.Random, pool: list[str], const: str = "c") -> Term:
    base = [Fn(const, ())] + [Var(v) for v in pool]
    t = rng.choice(base)
    if pool and rng.random() < 0.5:
        t = Fn("h", (t, rng.choice(base)))
    return t


def random_instance(rng: random.Random) -> Proof | None:
    """A random proof cut(cut(π0 ⊢ F,G,Γ ; π1 ⊢ F̄,Δ) ; π2 ⊢ Ḡ,Λ) with F, G genuine Π2."""
    F, G, DP, DR = _formulas()
    Fb, Gb = dual(F), dual(G)

    def side(tag, main, nmain, extra, nextra, const):
        # ∃x∀y instances: the witness for x may use earlier copies' eigenvariables
        names = [f"{tag}{i}" for i in range(nmain)]
        occs = [Occurrence(main, (_pick(rng, names[:i], const), names[i])) for i in range(nmain)]
        for _ in range(nextra):
            occs.append(Occurrence(extra, (_pick(rng, names, const), _pick(rng, names, const))))
        return occs

    n0f, n0g = rng.randint(1, 2), rng.randint(1, 2)
    a_names = [f"a{i}" for i in range(n0f)]
    e_names = [f"e{i}" for i in range(n0g)]
    pool0 = a_names + e_names
    occ0 = [Occurrence(F, (a, _pick(rng, pool0))) for a in a_names]
    occ0 += [Occurrence(G, (e, _pick(rng, pool0))) for e in e_names]
    with_gamma = rng.random() < 0.5
    if with_gamma:
        occ0.append(Occurrence(DP, (_pick(rng, pool0), _pick(rng, pool0))))
    occ1 = side("b", Fb, rng.randint(1, 2), DP, rng.randint(1, 2), "c")
    occ2 = side("g", Gb, rng.randint(1, 2), DR, rng.randint(1, 2), "d")
    # Δ, Λ carry the axioms of π1, π2: put an excluded-middle instance first
    occ1 = occ1[-1:] + occ1[:-1]
    occ2 = occ2[-1:] + occ2[:-1]
    p0 = build_side(occ0, [F, G] + ([DP] if with_gamma else []))
    p1 = build_side(occ1, [Fb, DP])
    p2 = build_side(occ2, [Gb, DR])
    if p0 is None or p1 is None or p2 is None:
        return None
    try:
        p = K.cut(K.cut(p0, p1), p2)
    except KernelError:
        return None
    p = K.number_preorder(p)
    return p if K.is_valid(p) else None


@dataclass(frozen=True)
class Found:
    proof: Proof
    permuted: Proof
    only_before: frozenset
    only_after: frozenset


def try_instance(p: Proof, budget: int = 200000) -> Found | None:
    """Permute the root cut into its left premise and report incomparable languages."""
    from .reduction import Kind, RedexDescriptor, apply_reduction
    r = RedexDescriptor((), Kind.BINARY_PERM, "left")
    try:
        q = apply_reduction(p, r)
        a, b = language(p, budget=budget), language(q, budget=budget)
    except (BudgetExceeded, ValueError):
        return None
    if a - b and b - a:
        return Found(p, q, frozenset(a - b), frozenset(b - a))
    return None


def search_incomparable(trials: int = 500, seed: int = 0) -> Found | None:
    """Best-effort search; returns the first incomparable instance found, if any."""
    rng = random.Random(seed)
    for _ in range(trials):
        p = random_instance(rng)
        if p is None:
            continue
        f, g = p.premises[0].premises[0].conclusion[:2]
        if not (is_genuine_pi2(f) and is_genuine_pi2(g)):
            continue
        found = try_instance(p)
        if found:
            return found
    return None
