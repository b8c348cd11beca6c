"""One-sided LK proofs with explicit structural rules.

Every rule puts its principal formula at position 0:

    ax      ⊢ A, Ā                      (A atomic)
    or      A, B, Γ       ⊢ A∨B, Γ
    and     A, Γ ; B, Δ   ⊢ A∧B, Γ, Δ
    all     A(v/α), Γ     ⊢ ∀vA, Γ      (payload α)
    ex      A(v/t), Γ     ⊢ ∃vA, Γ      (payload t)
    cut     A, Γ ; Ā, Δ   ⊢ Γ, Δ
    weak    Γ             ⊢ A, Γ        (payload A)
    contr   A, A, Γ       ⊢ A, Γ
    perm    Γ, B, A, Δ    ⊢ Γ, A, B, Δ  (payload |Γ|)
"""
from __future__ import annotations

import enum
import itertools
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .syntax import (InputError, Signature, formula_sexpr, parse_formula,
                     parse_term, read_all, term_sexpr, to_text)
from .terms import (All, And, Atom, Ex, Formula, Or, Term, Var, abstract,
                    alpha_eq, classify, dual, free_vars, fresh_bound_name,
                    instantiate, PrenexClass, subst_term, substitute)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 50000))


class KernelError(ValueError):
    """A rule was applied to premises it does not fit."""


class Rule(enum.Enum):
    AXIOM = "axiom"
    OR = "or"
    AND = "and"
    ALL = "all"
    EX = "ex"
    CUT = "cut"
    WEAK = "weak"
    CONTR = "contr"
    PERM = "perm"


ARITY = {Rule.AXIOM: 0, Rule.AND: 2, Rule.CUT: 2}


@dataclass(frozen=True)
class Proof:
    rule: Rule
    premises: tuple
    conclusion: tuple
    payload: object = None
    nid: int | None = None

    def __post_init__(self):
        if ARITY.get(self.rule, 1) != len(self.premises):
            raise KernelError(f"{self.rule.value} takes {ARITY.get(self.rule, 1)} premise(s)")

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((self.rule, self.premises, self.conclusion, self.payload, self.nid))
            object.__setattr__(self, "_h", h)
        return h

    def __getstate__(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)

    def __len__(self):
        return len(self.conclusion)

    @property
    def is_cut_free(self) -> bool:
        return not any(n.rule is Rule.CUT for n in subproofs(self))


# -- rule constructors -------------------------------------------------------
# These check local correctness and leave nid unset.

def _need(cond, msg):
    if not cond:
        raise KernelError(msg)


def axiom(lit: Formula) -> Proof:
    _need(isinstance(lit, Atom), f"axiom on non-atomic formula {lit}")
    return Proof(Rule.AXIOM, (), (lit, dual(lit)))


def or_intro(p: Proof) -> Proof:
    _need(len(p) >= 2, "∨ needs two formulas in its premise")
    return Proof(Rule.OR, (p,), (Or(p.conclusion[0], p.conclusion[1]),) + p.conclusion[2:])


def and_intro(p0: Proof, p1: Proof) -> Proof:
    _need(len(p0) >= 1 and len(p1) >= 1, "∧ needs nonempty premises")
    c0, c1 = p0.conclusion, p1.conclusion
    return Proof(Rule.AND, (p0, p1), (And(c0[0], c1[0]),) + c0[1:] + c1[1:])


def all_intro(p: Proof, eigen: str, principal: Formula) -> Proof:
    _need(isinstance(principal, All), f"∀ with non-universal principal {principal}")
    _need(len(p) >= 1 and alpha_eq(instantiate(principal, Var(eigen)), p.conclusion[0]),
          f"∀: premise {p.conclusion[0] if len(p) else '∅'} is not {principal} at {eigen}")
    return Proof(Rule.ALL, (p,), (principal,) + p.conclusion[1:], eigen)


def ex_intro(p: Proof, witness: Term, principal: Formula) -> Proof:
    _need(isinstance(principal, Ex), f"∃ with non-existential principal {principal}")
    _need(len(p) >= 1 and alpha_eq(instantiate(principal, witness), p.conclusion[0]),
          f"∃: premise {p.conclusion[0] if len(p) else '∅'} is not {principal} at {witness}")
    return Proof(Rule.EX, (p,), (principal,) + p.conclusion[1:], witness)


def cut(p0: Proof, p1: Proof) -> Proof:
    _need(len(p0) >= 1 and len(p1) >= 1, "cut needs nonempty premises")
    _need(alpha_eq(dual(p0.conclusion[0]), p1.conclusion[0]),
          f"cut formulas {p0.conclusion[0]} and {p1.conclusion[0]} are not dual")
    return Proof(Rule.CUT, (p0, p1), p0.conclusion[1:] + p1.conclusion[1:])


def weak(p: Proof, f: Formula) -> Proof:
    return Proof(Rule.WEAK, (p,), (f,) + p.conclusion, f)


def contr(p: Proof) -> Proof:
    _need(len(p) >= 2 and alpha_eq(p.conclusion[0], p.conclusion[1]),
          "contraction needs two equal leading formulas")
    return Proof(Rule.CONTR, (p,), p.conclusion[1:])


def perm(p: Proof, i: int) -> Proof:
    _need(0 <= i < len(p) - 1, f"perm position {i} out of range for a sequent of length {len(p)}")
    c = list(p.conclusion)
    c[i], c[i + 1] = c[i + 1], c[i]
    return Proof(Rule.PERM, (p,), tuple(c), i)


def move(p: Proof, src: int, dst: int) -> Proof:
    """Move the formula at ``src`` to ``dst`` by adjacent swaps."""
    while src > dst:
        p = perm(p, src - 1)
        src -= 1
    while src < dst:
        p = perm(p, src)
        src += 1
    return p


# -- traversal and ids -------------------------------------------------------

def subproofs(p: Proof) -> list[Proof]:
    """All sub-proofs in preorder: node, then left subtree, then right subtree."""
    out = []
    stack = [p]
    while stack:
        n = stack.pop()
        out.append(n)
        stack.extend(reversed(n.premises))
    return out


def subproofs_with_paths(p: Proof) -> list[tuple[tuple, Proof]]:
    out = []
    stack = [((), p)]
    while stack:
        path, n = stack.pop()
        out.append((path, n))
        for k in reversed(range(len(n.premises))):
            stack.append((path + (k,), n.premises[k]))
    return out


def at_path(p: Proof, path) -> Proof:
    for k in path:
        p = p.premises[k]
    return p


def replace_at(p: Proof, path, new: Proof) -> Proof:
    if not path:
        return new
    k = path[0]
    prem = list(p.premises)
    prem[k] = replace_at(prem[k], path[1:], new)
    return Proof(p.rule, tuple(prem), p.conclusion, p.payload, p.nid)


def size(p: Proof) -> int:
    return len(subproofs(p))


def _rebuild(p: Proof, fn):
    """Bottom-up map over nodes; ``fn(node, new_premises)`` returns the new node."""
    memo = {}

    def go(n):
        key = id(n)
        if key in memo:
            return memo[key]
        new = fn(n, tuple(go(c) for c in n.premises))
        memo[key] = new
        return new

    return go(p)


def number_preorder(p: Proof) -> Proof:
    counter = itertools.count()

    def go(n):
        nid = next(counter)
        prem = tuple(go(c) for c in n.premises)
        return Proof(n.rule, prem, n.conclusion, n.payload, nid)

    return go(p)


def assign_missing_ids(p: Proof) -> Proof:
    """Give every node without an id a fresh one above the current maximum (preorder)."""
    taken = [n.nid for n in subproofs(p) if n.nid is not None]
    counter = itertools.count(max(taken, default=-1) + 1)

    def go(n):
        prem = tuple(go(c) for c in n.premises)
        nid = n.nid if n.nid is not None else next(counter)
        if nid == n.nid and all(a is b for a, b in zip(prem, n.premises)):
            return n
        return Proof(n.rule, prem, n.conclusion, n.payload, nid)

    return go(p)


def clear_ids(p: Proof) -> Proof:
    return _rebuild(p, lambda n, prem: Proof(n.rule, prem, n.conclusion, n.payload, None))


# -- substitution and renaming -----------------------------------------------

def subst_proof(p: Proof, var: str, t: Term) -> Proof:
    """π[α↦t]: replace a free variable throughout.  Changed nodes lose their id."""

    def fn(n, prem):
        concl = substitute(n.conclusion, var, t)
        payload = n.payload
        if n.rule is Rule.EX:
            payload = subst_term(payload, var, t)
        elif n.rule is Rule.WEAK:
            payload = substitute(payload, var, t)
        elif n.rule is Rule.ALL and payload == var:
            raise KernelError(f"cannot substitute for eigenvariable {var} inside its own ∀")
        same = concl == n.conclusion and payload == n.payload and all(a is b for a, b in zip(prem, n.premises))
        if same:
            return n
        return Proof(n.rule, prem, concl, payload, None)

    return _rebuild(p, fn)


def eigenvariables(p: Proof) -> list[str]:
    return [n.payload for n in subproofs(p) if n.rule is Rule.ALL]


def _base(name: str) -> str:
    return re.sub(r"(_\d+)+$", "", name)


def _all_names(p: Proof) -> set[str]:
    names: set[str] = set()
    for n in subproofs(p):
        names.update(free_vars(n.conclusion))
        if n.rule is Rule.ALL:
            names.add(n.payload)
    return names


def _fresh_names(base: str, taken: set[str]):
    for k in itertools.count(1):
        cand = f"{base}_{k}"
        if cand not in taken:
            taken.add(cand)
            yield cand


def _rename_eigen(p: Proof, targets, taken: set[str]) -> Proof:
    """Rename the eigenvariables of the ∀ nodes selected by ``targets(node)``."""
    gens: dict[str, object] = {}

    def go(n):
        prem = tuple(go(c) for c in n.premises)
        if n.rule is Rule.ALL and targets(n):
            old = n.payload
            b = _base(old)
            if b not in gens:
                gens[b] = _fresh_names(b, taken)
            new = next(gens[b])
            body = prem[0]
            body = subst_proof(body, old, Var(new))
            return Proof(n.rule, (body,), n.conclusion, new, None)
        if all(a is b for a, b in zip(prem, n.premises)):
            return n
        return Proof(n.rule, prem, n.conclusion, n.payload, n.nid)

    return go(p)


def regularize(p: Proof) -> Proof:
    """Rename eigenvariables that are introduced more than once.

    Every ∀ node whose eigenvariable is shared gets ``base_k`` with k counting
    up in preorder; regular proofs are returned unchanged.
    """
    counts: dict[str, int] = {}
    for v in eigenvariables(p):
        counts[v] = counts.get(v, 0) + 1
    dup = {v for v, c in counts.items() if c > 1}
    if not dup:
        return p
    taken = _all_names(p)
    # Preorder renaming: handle outer nodes first by walking top-down.
    order = [n for n in subproofs(p) if n.rule is Rule.ALL and n.payload in dup]
    gens: dict[str, object] = {}
    plan = {}
    for n in order:
        b = _base(n.payload)
        if b not in gens:
            gens[b] = _fresh_names(b, taken)
        plan[id(n)] = next(gens[b])

    def go(n):
        prem = tuple(go(c) for c in n.premises)
        if id(n) in plan:
            new = plan[id(n)]
            body = subst_proof(prem[0], n.payload, Var(new))
            return Proof(n.rule, (body,), n.conclusion, new, None)
        if all(a is b for a, b in zip(prem, n.premises)):
            return n
        return Proof(n.rule, prem, n.conclusion, n.payload, n.nid)

    return assign_missing_ids(go(p))


def freshen(p: Proof, avoid: set[str]) -> Proof:
    """A copy of ``p`` (the π* of a contraction reduction): all eigenvariables
    renamed to names outside ``avoid`` and every node given a fresh id."""
    taken = set(avoid) | _all_names(p)
    renamed = _rename_eigen(p, lambda n: True, taken)
    avoid.update(taken)
    return clear_ids(renamed)


# -- checking ----------------------------------------------------------------

def _seq_eq(a, b) -> bool:
    return len(a) == len(b) and all(alpha_eq(x, y) for x, y in zip(a, b))


def _local_errors(n: Proof) -> list[str]:
    c = n.conclusion
    prem = [q.conclusion for q in n.premises]
    match n.rule:
        case Rule.AXIOM:
            if len(c) != 2 or not isinstance(c[0], Atom) or c[1] != dual(c[0]):
                return ["axiom must be A, Ā for an atom A"]
        case Rule.OR:
            p = prem[0]
            if len(p) < 2 or not c or not _seq_eq(c, (Or(p[0], p[1]),) + p[2:]):
                return ["∨ conclusion does not match premise"]
        case Rule.AND:
            p0, p1 = prem
            if not p0 or not p1 or not _seq_eq(c, (And(p0[0], p1[0]),) + p0[1:] + p1[1:]):
                return ["∧ conclusion does not match premises"]
        case Rule.ALL:
            p = prem[0]
            a = n.payload
            if not isinstance(a, str) or not c or not isinstance(c[0], All) or not p:
                return ["malformed ∀ inference"]
            errs = []
            if not alpha_eq(instantiate(c[0], Var(a)), p[0]) or not _seq_eq(c[1:], p[1:]):
                errs.append("∀ conclusion does not match premise")
            if a in free_vars(c):
                errs.append(f"eigenvariable condition violated: {a} occurs in the conclusion")
            return errs
        case Rule.EX:
            p = prem[0]
            if not c or not isinstance(c[0], Ex) or not p:
                return ["malformed ∃ inference"]
            if not alpha_eq(instantiate(c[0], n.payload), p[0]):
                return [f"wrong witness: {p[0]} is not an instance of {c[0]} at {n.payload}"]
            if not _seq_eq(c[1:], p[1:]):
                return ["∃ side formulas do not match premise"]
        case Rule.CUT:
            p0, p1 = prem
            if not p0 or not p1:
                return ["cut on an empty premise"]
            errs = []
            if not alpha_eq(dual(p0[0]), p1[0]):
                errs.append("cut formulas are not dual")
            if classify(p0[0]) is PrenexClass.OTHER:
                errs.append(f"cut formula not prenex Π2/Σ2: {p0[0]}")
            if not _seq_eq(c, p0[1:] + p1[1:]):
                errs.append("cut conclusion does not match premises")
            return errs
        case Rule.WEAK:
            if not c or not _seq_eq(c, (n.payload,) + prem[0]):
                return ["weakening conclusion does not match premise"]
        case Rule.CONTR:
            p = prem[0]
            if len(p) < 2 or not alpha_eq(p[0], p[1]) or not _seq_eq(c, p[1:]):
                return ["contraction needs A, A, Γ above A, Γ"]
        case Rule.PERM:
            i = n.payload
            p = list(prem[0])
            if not isinstance(i, int) or not 0 <= i < len(p) - 1:
                return [f"perm position {i} out of range"]
            p[i], p[i + 1] = p[i + 1], p[i]
            if not _seq_eq(c, tuple(p)):
                return ["perm conclusion does not match premise"]
    return []


def check_proof(p: Proof) -> list[tuple[int | None, str]]:
    """Validation report: an empty list iff the proof is valid and regular."""
    report: list[tuple[int | None, str]] = []
    nodes = subproofs_with_paths(p)
    seen: dict = {}
    for _, n in nodes:
        if n.nid is None:
            report.append((None, "node without id"))
        elif n.nid in seen:
            report.append((n.nid, "duplicate node id"))
        seen[n.nid] = n
        for msg in _local_errors(n):
            report.append((n.nid, msg))
    report.extend(_regularity_errors(nodes))
    return report


def _regularity_errors(nodes) -> list[tuple[int | None, str]]:
    out = []
    intro: dict[str, list] = {}
    for path, n in nodes:
        if n.rule is Rule.ALL and isinstance(n.payload, str):
            intro.setdefault(n.payload, []).append((path, n))
    for v, sites in intro.items():
        if len(sites) > 1:
            for _, n in sites[1:]:
                out.append((n.nid, f"regularity: eigenvariable {v} introduced more than once"))
            continue
        path, node = sites[0]
        k = len(path)
        for qpath, q in nodes:
            inside = qpath[:k] == path and len(qpath) > k
            if inside or q is node:
                continue
            if v in free_vars(q.conclusion):
                out.append((q.nid, f"regularity: eigenvariable {v} occurs outside its ∀ inference"))
                break
    return out


def is_valid(p: Proof) -> bool:
    return not check_proof(p)


# -- elaboration of the textual proof format ---------------------------------

def _find(seq, pred, prefer: int = 0, exclude=()) -> int | None:
    order = [prefer] + [i for i in range(len(seq)) if i != prefer]
    for i in order:
        if 0 <= i < len(seq) and i not in exclude and pred(seq[i]):
            return i
    return None


def _is_formula_form(sx) -> bool:
    return isinstance(sx, list) and sx and sx[0] in ("atom", "neg", "or", "and", "all", "ex")


def _split_annotation(args):
    if args and _is_formula_form(args[0]) and len(args) > 1:
        return args[0], args[1:]
    return None, args


def elaborate(sx, sig: Signature) -> Proof:
    """Turn a parsed proof expression into a checked proof with preorder ids.

    Permutations are inserted wherever a rule's principal formulas are not
    already in front.  Optional formula annotations pick the principal formula
    explicitly: ``(all-intro α F π)``, ``(ex-intro t F π)``, ``(or-intro F π)``,
    ``(and-intro F π π)``, ``(cut F π π)``, ``(contr F π)``.
    """
    try:
        return number_preorder(_elab(sx, sig))
    except KernelError as e:
        raise InputError(str(e)) from e


def _elab(sx, sig: Signature) -> Proof:
    if not isinstance(sx, list) or not sx or not isinstance(sx[0], str):
        raise InputError(f"not a proof expression: {to_text(sx)}")
    head, args = sx[0], sx[1:]
    f = lambda x: parse_formula(x, sig)  # noqa: E731
    match head:
        case "ax":
            if len(args) != 1:
                raise InputError("(ax L) takes one literal")
            return axiom(f(args[0]))
        case "or-intro":
            ann, rest = _split_annotation(args)
            (child,) = _arity(head, rest, 1)
            p = _elab(child, sig)
            if ann is not None:
                g = f(ann)
                if not isinstance(g, Or):
                    raise InputError(f"or-intro annotation is not a disjunction: {g}")
                p = _bring(p, g.left, 0, "or-intro")
                p = _bring(p, g.right, 1, "or-intro", exclude=(0,))
            return or_intro(p)
        case "and-intro":
            ann, rest = _split_annotation(args)
            c0, c1 = _arity(head, rest, 2)
            p0, p1 = _elab(c0, sig), _elab(c1, sig)
            if ann is not None:
                g = f(ann)
                if not isinstance(g, And):
                    raise InputError(f"and-intro annotation is not a conjunction: {g}")
                p0 = _bring(p0, g.left, 0, "and-intro")
                p1 = _bring(p1, g.right, 0, "and-intro")
            return and_intro(p0, p1)
        case "all-intro":
            if not args or not isinstance(args[0], str):
                raise InputError("(all-intro α [F] π) needs an eigenvariable symbol")
            eigen = args[0]
            if eigen in sig.functions:
                raise InputError(f"eigenvariable {eigen} is a declared function symbol")
            ann, rest = _split_annotation(args[1:])
            (child,) = _arity(head, rest, 1)
            p = _elab(child, sig)
            if ann is not None:
                g = f(ann)
                if not isinstance(g, All):
                    raise InputError(f"all-intro annotation is not universal: {g}")
                p = _bring(p, instantiate(g, Var(eigen)), 0, "all-intro")
            else:
                hits = [i for i, a in enumerate(p.conclusion) if eigen in free_vars(a)]
                pos = hits[0] if len(hits) == 1 else 0
                p = move(p, pos, 0)
                a = p.conclusion[0]
                v = fresh_bound_name(a)
                g = All(v, abstract(a, Var(eigen), v))
            return all_intro(p, eigen, g)
        case "ex-intro":
            if not args:
                raise InputError("(ex-intro t [F] π) needs a witness")
            t = parse_term(args[0], sig)
            ann, rest = _split_annotation(args[1:])
            (child,) = _arity(head, rest, 1)
            p = _elab(child, sig)
            if ann is not None:
                g = f(ann)
                if not isinstance(g, Ex):
                    raise InputError(f"ex-intro annotation is not existential: {g}")
                p = _bring(p, instantiate(g, t), 0, "ex-intro")
            else:
                if not p.conclusion:
                    raise InputError("ex-intro over an empty sequent")
                a = p.conclusion[0]
                v = fresh_bound_name(a)
                g = Ex(v, abstract(a, t, v))
            return ex_intro(p, t, g)
        case "cut":
            ann, rest = _split_annotation(args)
            c0, c1 = _arity(head, rest, 2)
            p0, p1 = _elab(c0, sig), _elab(c1, sig)
            if ann is not None:
                p0 = _bring(p0, f(ann), 0, "cut")
            if not p0.conclusion:
                raise InputError("cut on an empty premise")
            p1 = _bring(p1, dual(p0.conclusion[0]), 0, "cut")
            return cut(p0, p1)
        case "weak":
            if len(args) != 2:
                raise InputError("(weak F π) takes a formula and a proof")
            return weak(_elab(args[1], sig), f(args[0]))
        case "contr":
            ann, rest = _split_annotation(args)
            (child,) = _arity(head, rest, 1)
            p = _elab(child, sig)
            if ann is not None:
                p = _bring(p, f(ann), 0, "contr")
            if not p.conclusion:
                raise InputError("contraction over an empty sequent")
            p = _bring(p, p.conclusion[0], 1, "contr", exclude=(0,))
            return contr(p)
        case "perm":
            if len(args) != 2 or not isinstance(args[0], str) or not args[0].isdigit():
                raise InputError("(perm i π) takes a position and a proof")
            return perm(_elab(args[1], sig), int(args[0]))
    raise InputError(f"unknown proof rule {head!r}")


def _arity(head, rest, n):
    if len(rest) != n:
        raise InputError(f"{head} expects {n} sub-proof(s), got {len(rest)}")
    return rest


def _bring(p: Proof, g: Formula, dst: int, where: str, exclude=()) -> Proof:
    pos = _find(p.conclusion, lambda a: alpha_eq(a, g), prefer=dst, exclude=exclude)
    if pos is None:
        shown = ", ".join(map(str, p.conclusion))
        raise InputError(f"{where}: {g} does not occur in premise {shown}")
    return move(p, pos, dst)


# -- printing ----------------------------------------------------------------

def proof_sexpr(p: Proof):
    prem = [proof_sexpr(q) for q in p.premises]
    match p.rule:
        case Rule.AXIOM:
            return ["ax", formula_sexpr(p.conclusion[0])]
        case Rule.OR:
            return ["or-intro"] + prem
        case Rule.AND:
            return ["and-intro"] + prem
        case Rule.ALL:
            return ["all-intro", p.payload, formula_sexpr(p.conclusion[0])] + prem
        case Rule.EX:
            return ["ex-intro", term_sexpr(p.payload), formula_sexpr(p.conclusion[0])] + prem
        case Rule.CUT:
            return ["cut"] + prem
        case Rule.WEAK:
            return ["weak", formula_sexpr(p.payload)] + prem
        case Rule.CONTR:
            return ["contr"] + prem
        case Rule.PERM:
            return ["perm", str(p.payload)] + prem
    raise TypeError(p.rule)


def print_proof(p: Proof, indent: int = 0) -> str:
    """Canonical text form: one inference per line, sub-proofs indented."""
    lines: list[str] = []

    def go(sx, depth):
        # Leaf arguments (symbols, formulas, terms) stay on the rule's line.
        head = [sx[0]]
        subs = []
        for a in sx[1:]:
            if isinstance(a, list) and a and a[0] in _PROOF_HEADS:
                subs.append(a)
            else:
                head.append(to_text(a))
        pad = "  " * depth
        if not subs:
            lines.append(f"{pad}({' '.join(head)})")
            return
        lines.append(f"{pad}({' '.join(head)}")
        for s in subs:
            go(s, depth + 1)
        lines[-1] += ")"

    go(proof_sexpr(p), indent)
    return "\n".join(lines)


_PROOF_HEADS = {"ax", "or-intro", "and-intro", "all-intro", "ex-intro", "cut", "weak", "contr", "perm"}


def format_sequent(seq) -> str:
    return ", ".join(map(str, seq))


# -- problem files -----------------------------------------------------------

@dataclass(frozen=True)
class Problem:
    name: str
    signature: Signature
    proof: Proof
    end_sequent: tuple | None = None

    def __hash__(self):
        return hash((self.name, self.proof))


def parse_problem(text: str, source: str = "<input>") -> Problem:
    items = read_all(text)
    if len(items) != 1 or not isinstance(items[0], list) or not items[0] or items[0][0] != "problem":
        raise InputError(f"{source}: expected a single (problem NAME ...) form")
    form = items[0]
    if len(form) < 2 or not isinstance(form[1], str):
        raise InputError(f"{source}: problem needs a name")
    name = form[1]
    sig = None
    proof_sx = None
    end_sx = None
    for part in form[2:]:
        if not isinstance(part, list) or not part:
            raise InputError(f"{source}: unexpected {to_text(part)}")
        match part[0]:
            case "signature":
                sig = Signature.parse(part)
            case "end-sequent":
                end_sx = part[1:]
            case "proof":
                if len(part) != 2:
                    raise InputError(f"{source}: (proof π) takes one proof")
                proof_sx = part[1]
            case other:
                raise InputError(f"{source}: unknown section {other!r}")
    if sig is None or proof_sx is None:
        raise InputError(f"{source}: problem needs (signature ...) and (proof ...)")
    proof = elaborate(proof_sx, sig)
    end = None
    if end_sx is not None:
        end = tuple(parse_formula(x, sig) for x in end_sx)
        if not _seq_eq(end, proof.conclusion):
            raise InputError(f"{source}: declared end-sequent {format_sequent(end)} "
                             f"differs from the proof's {format_sequent(proof.conclusion)}")
    return Problem(name, sig, proof, end)


def load_problem(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_problem(text, str(path))


def print_problem(prob: Problem, proof: Proof | None = None) -> str:
    proof = proof if proof is not None else prob.proof
    end = " ".join(to_text(formula_sexpr(f)) for f in proof.conclusion)
    body = print_proof(proof, indent=2)
    return (f"(problem {prob.name}\n"
            f"  {to_text(prob.signature.to_sexpr())}\n"
            f"  (end-sequent {end})\n"
            f"  (proof\n{body}))\n")
