"""Herbrand expansions, tautology checking, language comparison and the
lemma-verification harness for single reduction steps."""
from __future__ import annotations

import enum
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernel as K
from . import lam
from .grammar import (CF, CS, DEFAULT_BUDGET, extract_grammar, language,
                      random_closed_term, term_language)
from .kernel import Problem, Proof, Rule
from .reduction import (CUT_L, CUT_R, LP, Kind, RedexDescriptor, Strategy,
                        _cut_sides, apply_reduction, applicable_reductions,
                        cut_perm_formulas, eliminate_cuts,
                        get_strategy, herbrand_set, premise_lps, strip_perms)
from .terms import (And, Atom, Bot, Fn, Formula, Or, Term, Top, WC, disjunction,
                    instantiate_block, is_genuine_pi2, term_vars)

TRUTH_TABLE_LIMIT = 20


# -- expansions --------------------------------------------------------------

def expansion(p: Proof, lang=None) -> tuple[Formula, ...]:
    """Replace each ∃-block of the end-sequent by the disjunction of its instances."""
    if lang is None:
        lang = language(p)
    out = []
    for i, a in enumerate(p.conclusion):
        tuples = sorted((tup for j, tup in lang if j == i), key=lambda t: tuple(map(str, t)))
        out.append(disjunction(instantiate_block(a, tup) for tup in tuples))
    return tuple(out)


# -- tautology checking ------------------------------------------------------

class NonGroundAtom(ValueError):
    pass


@dataclass(frozen=True)
class TautologyResult:
    valid: bool
    countermodel: dict | None = None   # positive atom -> bool

    def __bool__(self):
        return self.valid

    def describe(self) -> str:
        if self.valid:
            return "tautology"
        cm = ", ".join(f"{a}↦{'⊤' if v else '⊥'}" for a, v in sorted(self.countermodel.items(), key=lambda kv: str(kv[0])))
        return f"not a tautology; countermodel {{{cm}}}"


def _atom_key(a: Atom) -> Atom:
    return Atom(a.pred, a.args, False)


def _collect_atoms(f: Formula, acc: dict):
    match f:
        case Atom(_, args, _):
            for t in args:
                if any(True for _ in term_vars(t)):
                    raise NonGroundAtom(f"non-ground atom {f}")
            acc.setdefault(_atom_key(f), len(acc))
        case Or(a, b) | And(a, b):
            _collect_atoms(a, acc)
            _collect_atoms(b, acc)
        case Bot() | Top():
            pass
        case _:
            raise ValueError(f"not quantifier-free: {f}")


def _table(f: Formula, cols: np.ndarray, index: dict) -> np.ndarray:
    match f:
        case Atom(_, _, neg):
            col = cols[:, index[_atom_key(f)]]
            return ~col if neg else col
        case Or(a, b):
            return _table(a, cols, index) | _table(b, cols, index)
        case And(a, b):
            return _table(a, cols, index) & _table(b, cols, index)
        case Bot():
            return np.zeros(len(cols), dtype=bool)
        case Top():
            return np.ones(len(cols), dtype=bool)


def _simplify(f: Formula, atom: Atom, value: bool) -> Formula:
    match f:
        case Atom(_, _, neg) if _atom_key(f) == atom:
            return Top() if value != neg else Bot()
        case Or(a, b):
            a, b = _simplify(a, atom, value), _simplify(b, atom, value)
            if isinstance(a, Top) or isinstance(b, Top):
                return Top()
            return b if isinstance(a, Bot) else a if isinstance(b, Bot) else Or(a, b)
        case And(a, b):
            a, b = _simplify(a, atom, value), _simplify(b, atom, value)
            if isinstance(a, Bot) or isinstance(b, Bot):
                return Bot()
            return b if isinstance(a, Top) else a if isinstance(b, Top) else And(a, b)
    return f


def _first_atom(f: Formula) -> Atom | None:
    match f:
        case Atom():
            return _atom_key(f)
        case Or(a, b) | And(a, b):
            return _first_atom(a) or _first_atom(b)
    return None


def _split(f: Formula, assignment: dict) -> dict | None:
    """Search for an assignment falsifying f by splitting on atoms."""
    if isinstance(f, Top):
        return None
    if isinstance(f, Bot):
        return assignment
    atom = _first_atom(f)
    for value in (False, True):
        found = _split(_simplify(f, atom, value), {**assignment, atom: value})
        if found is not None:
            return found
    return None


def is_tautology(sequent) -> TautologyResult:
    """Is the disjunction of the quantifier-free ground sequent propositionally valid?"""
    f = disjunction(sequent) if isinstance(sequent, (tuple, list)) else sequent
    index: dict = {}
    _collect_atoms(f, index)
    atoms = list(index)
    if len(atoms) <= TRUTH_TABLE_LIMIT:
        n = len(atoms)
        rows = np.arange(2 ** n, dtype=np.int64)[:, None]
        cols = ((rows >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
        values = _table(f, cols, index)
        if values.all():
            return TautologyResult(True)
        row = cols[int(np.argmin(values))]
        return TautologyResult(False, {a: bool(row[k]) for k, a in enumerate(atoms)})
    found = _split(f, {})
    if found is None:
        return TautologyResult(True)
    return TautologyResult(False, {a: found.get(a, False) for a in atoms})


# -- language comparison -----------------------------------------------------

class Relation(str, enum.Enum):
    EQUAL = "equal"
    SUBSET = "proper-subset"        # first ⊊ second
    SUPERSET = "proper-superset"    # first ⊋ second
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class ComparisonResult:
    relation: Relation
    only_first: frozenset = frozenset()
    only_second: frozenset = frozenset()


def compare_languages(l1, l2) -> ComparisonResult:
    l1, l2 = frozenset(l1), frozenset(l2)
    a, b = l1 - l2, l2 - l1
    assert all(w in l1 and w not in l2 for w in a) and all(w in l2 and w not in l1 for w in b)
    if not a and not b:
        rel = Relation.EQUAL
    elif not a:
        rel = Relation.SUBSET
    elif not b:
        rel = Relation.SUPERSET
    else:
        rel = Relation.INCOMPARABLE
    return ComparisonResult(rel, a, b)


def term_matches(pattern: Term, t: Term) -> bool:
    """Does t arise from pattern by replacing occurrences of the weakening constant?"""
    match pattern:
        case Fn(name, ()) if name == WC:
            return True
        case Fn(name, args):
            return (isinstance(t, Fn) and t.name == name and len(t.args) == len(args)
                    and all(term_matches(a, b) for a, b in zip(args, t.args)))
    return pattern == t


def subsumed_modulo_wc(l1, l2) -> frozenset:
    """Entries of l1 not matched by any entry of l2 with the weakening constant as a wildcard."""
    by_index: dict = {}
    for i, tup in l2:
        by_index.setdefault(i, []).append(tup)
    missing = set()
    for i, tup in l1:
        if not any(len(s) == len(tup) and all(term_matches(a, b) for a, b in zip(tup, s))
                   for s in by_index.get(i, [])):
            missing.add((i, tup))
    return frozenset(missing)


# -- classifying redexes -----------------------------------------------------

class Expected(str, enum.Enum):
    EQUAL = "equal"
    SUBSET = "subset-or-equal"      # L(π′) ⊆ L(π)
    NONE = "no-guarantee"


@dataclass(frozen=True)
class LemmaExpectation:
    case: str                   # cut-perm, contraction, quantifier, quant-perm, weakening, other
    expected: Expected
    reason: str
    sigma2: bool | None = None
    dual_contracted: bool | None = None


def _contracts_label(lp: LP, tracked: frozenset) -> bool:
    """Is some occurrence descending from a tracked label contracted in lp's proof?"""
    q = strip_perms(lp)
    head = q.labels[0] if q.labels else None
    if q.proof.rule is Rule.CONTR and head in tracked:
        return True
    if q.proof.rule is Rule.AXIOM:
        return False
    for prem in premise_lps(q):
        nxt = frozenset(l for l in prem.labels
                        if l in tracked or (isinstance(l, tuple) and len(l) == 2
                                            and l[0] in ("c1", "c2") and l[1] in tracked))
        if nxt and _contracts_label(prem, nxt):
            return True
    return False


def dual_is_contracted(node: Proof, side: str) -> bool:
    """Does the other premise of this cut contain a contraction on the dual cut formula?"""
    left, right = _cut_sides(node)
    other, lab = (right, CUT_R) if side == "left" else (left, CUT_L)
    return _contracts_label(other, frozenset([lab]))


def classify_redex(p: Proof, r: RedexDescriptor) -> LemmaExpectation:
    node = K.at_path(p, r.path)
    this = _cut_sides(node)[0 if r.side == "left" else 1]
    upper = strip_perms(this).proof
    match r.kind:
        case Kind.BINARY_PERM:
            fg = cut_perm_formulas(p, r)
            if fg is None:
                return LemmaExpectation("other", Expected.EQUAL, "binary inference above the cut is ∧")
            f, g = fg
            if is_genuine_pi2(f) and is_genuine_pi2(g):
                return LemmaExpectation("cut-perm", Expected.NONE, "both cut formulas are genuine Π2", sigma2=False)
            return LemmaExpectation("cut-perm", Expected.EQUAL, "one of the cut formulas is Σ2", sigma2=True)
        case Kind.CONTRACTION:
            f = node.premises[0 if r.side == "left" else 1].conclusion[0]
            if not is_genuine_pi2(f):
                return LemmaExpectation("contraction", Expected.EQUAL, "contracted cut formula is Σ2", sigma2=True)
            if dual_is_contracted(node, r.side):
                return LemmaExpectation("contraction", Expected.NONE,
                                        "Π2 contraction with contractions on the dual formula",
                                        sigma2=False, dual_contracted=True)
            return LemmaExpectation("contraction", Expected.SUBSET,
                                    "Π2 contraction, dual formula never contracted",
                                    sigma2=False, dual_contracted=False)
        case Kind.QUANTIFIER:
            return LemmaExpectation("quantifier", Expected.EQUAL, "quantifier reduction")
        case Kind.UNARY_PERM if upper.rule is Rule.ALL:
            return LemmaExpectation("quant-perm", Expected.SUBSET, "∀ inference permuted over the cut")
        case Kind.WEAKENING:
            return LemmaExpectation("weakening", Expected.SUBSET, "weakening reduction")
        case _:
            return LemmaExpectation("other", Expected.EQUAL, f"{r.kind.value} reduction")


# -- verifying single steps --------------------------------------------------

@dataclass(frozen=True)
class PreservationReport:
    proof_id: str
    redex: RedexDescriptor
    expectation: LemmaExpectation
    observed: Relation             # L(π′) compared with L(π)
    only_after: frozenset          # in L(π′) only
    only_before: frozenset         # in L(π) only
    unmatched_modulo_wc: frozenset  # entries of L(π′) not covered by L(π) even with wc as wildcard
    verdict: bool

    @property
    def literal_ok(self) -> bool:
        return _consistent(self.expectation.expected, self.observed)

    def record(self) -> dict:
        fmt = lambda s: sorted(f"{i}:⟨{', '.join(map(str, t))}⟩" for i, t in s)
        return {"proof": self.proof_id, "redex": str(self.redex), "case": self.expectation.case,
                "expected": self.expectation.expected.value, "observed": self.observed.value,
                "only_after": fmt(self.only_after), "only_before": fmt(self.only_before),
                "literal_ok": self.literal_ok, "verdict": "consistent" if self.verdict else "VIOLATION"}


def _consistent(expected: Expected, observed: Relation) -> bool:
    match expected:
        case Expected.EQUAL:
            return observed is Relation.EQUAL
        case Expected.SUBSET:
            return observed in (Relation.EQUAL, Relation.SUBSET)
    return True


def verify_preservation(p: Proof, r: RedexDescriptor, proof_id: str = "",
                        budget: int = DEFAULT_BUDGET, before=None) -> PreservationReport:
    """Compare L(π) with L(π′) for one reduction step and judge it against the expectation.

    A weakening step replaces the witnesses flowing from the discarded proof by
    the weakening constant, so for that case alone an entry of L(π′) counts as
    included when it matches an entry of L(π) with wc read as a wildcard.
    """
    exp = classify_redex(p, r)
    l0 = before if before is not None else language(p, budget=budget)
    l1 = language(apply_reduction(p, r), budget=budget)
    cmp = compare_languages(l1, l0)
    unmatched = subsumed_modulo_wc(l1, l0)
    verdict = _consistent(exp.expected, cmp.relation)
    if not verdict and exp.case == "weakening":
        verdict = not unmatched
    return PreservationReport(proof_id, r, exp, cmp.relation, cmp.only_first, cmp.only_second,
                              unmatched, verdict)


def verify_all_redexes(p: Proof, proof_id: str = "", budget: int = DEFAULT_BUDGET) -> list[PreservationReport]:
    before = language(p, budget=budget)
    return [verify_preservation(p, r, proof_id, budget, before) for r in applicable_reductions(p)]


# -- end-to-end --------------------------------------------------------------

@dataclass(frozen=True)
class EndToEndReport:
    proof_id: str
    strategy: str
    steps: int
    herbrand: frozenset
    language: frozenset
    missing: frozenset          # Herbrand entries outside the language
    tautology: TautologyResult

    @property
    def ok(self) -> bool:
        return not self.missing and self.tautology.valid

    def record(self) -> dict:
        fmt = lambda s: sorted(f"{i}:⟨{', '.join(map(str, t))}⟩" for i, t in s)
        return {"proof": self.proof_id, "strategy": self.strategy, "steps": self.steps,
                "herbrand": fmt(self.herbrand), "language": fmt(self.language),
                "missing": fmt(self.missing), "tautology": self.tautology.valid,
                "verdict": "ok" if self.ok else "FAILED"}


def end_to_end_check(p: Proof, strategy: Strategy | str = "weak-first", proof_id: str = "",
                     limit: int = 100000, budget: int = DEFAULT_BUDGET) -> EndToEndReport:
    s = get_strategy(strategy) if isinstance(strategy, str) else strategy
    lang = language(p, budget=budget)
    res = eliminate_cuts(p, s, limit)
    h = herbrand_set(res.proof)
    return EndToEndReport(proof_id, s.name, len(res.trace), h, lang, h - lang,
                          is_tautology(expansion(p, lang)))


# -- starting symbols and context-free mode ---------------------------------

def start_symbol_check(p: Proof, samples: int = 20, seed: int = 0,
                       functions: dict | None = None, budget: int = DEFAULT_BUDGET) -> list[tuple]:
    """Indices/arguments u0 where L(σ^i u0 ⟨⟩…) differs from L(σ^i ⟨⟩ ⟨⟩…)."""
    g = extract_grammar(p)
    rng = random.Random(seed)
    funcs = functions or _functions_of(p)
    bad = []
    for i in range(len(p.conclusion)):
        start = g.start_term(i)
        head, args = lam.spine(start)
        ref = term_language(g, start, budget)
        first = g.nonterminals[(g.root, i)].type.arg
        for _ in range(samples):
            u0 = random_closed_term(rng, first, funcs)
            alt = lam.apply(head, u0, *args[1:])
            if term_language(g, alt, budget) != ref:
                bad.append((i, u0))
    return bad


def _functions_of(p: Proof) -> dict:
    from .terms import atom_terms, term_symbols
    funcs = {"c": 0}
    for f in p.conclusion:
        for t in atom_terms(f):
            for name, n in term_symbols(t):
                if name != WC:
                    funcs[name] = n
    if not any(n == 1 for n in funcs.values()):
        funcs["s_"] = 1
    return funcs


@dataclass(frozen=True)
class ModeReport:
    cs: frozenset
    cf: frozenset

    @property
    def included(self) -> bool:
        return self.cs <= self.cf


def mode_check(p: Proof, budget: int = DEFAULT_BUDGET) -> ModeReport:
    return ModeReport(language(p, CS, budget), language(p, CF, budget))


# -- the bundled corpus ------------------------------------------------------

def corpus_paths() -> list[Path]:
    root = resources.files("lkgrammar") / "corpus"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".lk"))


def load_corpus() -> list[tuple[str, Problem]]:
    return [(path.stem, K.load_problem(path)) for path in corpus_paths()]


@dataclass
class CorpusReport:
    proof_id: str
    valid: bool
    preservation: list = field(default_factory=list)
    end_to_end: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.valid and all(r.verdict for r in self.preservation)
                and all(r.ok for r in self.end_to_end))


def _verify_one(args) -> CorpusReport:
    proof_id, p, strategies, limit, budget = args
    rep = CorpusReport(proof_id, K.is_valid(p))
    if not rep.valid:
        return rep
    rep.preservation = verify_all_redexes(p, proof_id, budget)
    rep.end_to_end = [end_to_end_check(p, s, proof_id, limit, budget) for s in strategies]
    return rep


def verify_corpus(items, strategies=("weak-first", "restricted"), limit: int = 100000,
                  budget: int = DEFAULT_BUDGET, parallel: bool = True,
                  workers: int | None = None) -> list[CorpusReport]:
    """Verify (proof_id, proof) pairs; proofs are handled in parallel."""
    jobs = [(pid, p, tuple(strategies), limit, budget) for pid, p in items]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_verify_one, jobs))
    return [_verify_one(j) for j in jobs]
