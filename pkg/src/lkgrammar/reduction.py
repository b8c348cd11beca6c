"""Cut reduction and permutation steps, strategies, and Herbrand-set extraction.

A cut premise is inspected through any chain of permutations above it, so a
redex is decided by the last non-permutation inference and the position the
cut formula has there.  Results are rebuilt with explicit permutations that
restore the cut's exact conclusion.

Internally a sub-proof travels with a tuple of labels, one per formula of its
conclusion, identifying formula occurrences across the rewrite.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import kernel as K
from .kernel import Proof, Rule
from .terms import (All, Ex, Formula, PrenexClass, classify, count_exists,
                    is_sigma1)


class ReductionError(ValueError):
    pass


class StaleRedex(ReductionError):
    pass


class Kind(str, enum.Enum):
    AXIOM = "axiom"
    BOOLEAN = "boolean"
    QUANTIFIER = "quantifier"
    WEAKENING = "weakening"
    CONTRACTION = "contraction"
    UNARY_PERM = "unary-perm"
    BINARY_PERM = "binary-perm"


KIND_PRIORITY = [Kind.AXIOM, Kind.WEAKENING, Kind.QUANTIFIER, Kind.BOOLEAN,
                 Kind.UNARY_PERM, Kind.BINARY_PERM, Kind.CONTRACTION]
TWO_SIDED = (Kind.QUANTIFIER, Kind.BOOLEAN)
LEFT, RIGHT = "left", "right"


@dataclass(frozen=True)
class RedexDescriptor:
    path: tuple
    kind: Kind
    side: str

    def __str__(self):
        return f"{format_path(self.path)} {self.kind.value} {self.side}"


def format_path(path) -> str:
    return ".".join(map(str, path)) if path else "ε"


def parse_path(text: str) -> tuple:
    return () if text in ("ε", "") else tuple(int(x) for x in text.split("."))


# -- labelled proofs ---------------------------------------------------------

@dataclass(frozen=True)
class LP:
    proof: Proof
    labels: tuple

    def pos(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ReductionError(f"internal: label {label!r} not in {self.labels!r}") from None

    def formula(self, label) -> Formula:
        return self.proof.conclusion[self.pos(label)]


def _move(lp: LP, label, dst: int) -> LP:
    src = lp.pos(label)
    labels = list(lp.labels)
    labels.insert(dst, labels.pop(src))
    return LP(K.move(lp.proof, src, dst), tuple(labels))


def arrange(lp: LP, order) -> LP:
    order = tuple(order)
    if sorted(map(repr, order)) != sorted(map(repr, lp.labels)):
        raise ReductionError(f"internal: cannot arrange {lp.labels!r} as {order!r}")
    for k, lab in enumerate(order):
        lp = _move(lp, lab, k)
    return lp


def lp_cut(left: LP, llab, right: LP, rlab) -> LP:
    left = _move(left, llab, 0)
    right = _move(right, rlab, 0)
    return LP(K.cut(left.proof, right.proof), left.labels[1:] + right.labels[1:])


def lp_weak(lp: LP, f: Formula, label) -> LP:
    return LP(K.weak(lp.proof, f), (label,) + lp.labels)


def lp_contr(lp: LP, a, b, label) -> LP:
    lp = _move(lp, a, 0)
    lp = _move(lp, b, 1)
    return LP(K.contr(lp.proof), (label,) + lp.labels[2:])


def strip_perms(lp: LP) -> LP:
    """Walk up through permutations; labels follow their formulas."""
    p, labels = lp.proof, list(lp.labels)
    while p.rule is Rule.PERM:
        i = p.payload
        labels[i], labels[i + 1] = labels[i + 1], labels[i]
        p = p.premises[0]
    return LP(p, tuple(labels))


def premise_lps(q: LP) -> list[LP]:
    """Labels for the premises of q's last inference (principal formulas get derived labels)."""
    p, ql = q.proof, q.labels
    lam_ = ql[0] if ql else None
    match p.rule:
        case Rule.OR:
            return [LP(p.premises[0], (("l", lam_), ("r", lam_)) + ql[1:])]
        case Rule.ALL | Rule.EX:
            return [LP(p.premises[0], (("p", lam_),) + ql[1:])]
        case Rule.WEAK:
            return [LP(p.premises[0], ql[1:])]
        case Rule.CONTR:
            return [LP(p.premises[0], (("c1", lam_), ("c2", lam_)) + ql[1:])]
        case Rule.AND:
            g = len(p.premises[0].conclusion) - 1
            return [LP(p.premises[0], (("l", lam_),) + ql[1:1 + g]),
                    LP(p.premises[1], (("r", lam_),) + ql[1 + g:])]
        case Rule.CUT:
            g = len(p.premises[0].conclusion) - 1
            tag = ("cutf", id(p))
            return [LP(p.premises[0], (tag,) + ql[:g]),
                    LP(p.premises[1], (("bar", tag),) + ql[g:])]
    raise ReductionError(f"internal: no premises for {p.rule.value}")


def reapply(q: LP, prem: list[LP]) -> LP:
    """Re-apply q's last inference to rewritten premises carrying the same principal labels."""
    p, ql = q.proof, q.labels
    lam_ = ql[0] if ql else None
    match p.rule:
        case Rule.OR:
            a = _move(_move(prem[0], ("l", lam_), 0), ("r", lam_), 1)
            return LP(K.or_intro(a.proof), (lam_,) + a.labels[2:])
        case Rule.ALL:
            a = _move(prem[0], ("p", lam_), 0)
            return LP(K.all_intro(a.proof, p.payload, p.conclusion[0]), (lam_,) + a.labels[1:])
        case Rule.EX:
            a = _move(prem[0], ("p", lam_), 0)
            return LP(K.ex_intro(a.proof, p.payload, p.conclusion[0]), (lam_,) + a.labels[1:])
        case Rule.WEAK:
            return lp_weak(prem[0], p.payload, lam_)
        case Rule.CONTR:
            return lp_contr(prem[0], ("c1", lam_), ("c2", lam_), lam_)
        case Rule.AND:
            a = _move(prem[0], ("l", lam_), 0)
            b = _move(prem[1], ("r", lam_), 0)
            return LP(K.and_intro(a.proof, b.proof), (lam_,) + a.labels[1:] + b.labels[1:])
        case Rule.CUT:
            tag = ("cutf", id(p))
            return lp_cut(prem[0], tag, prem[1], ("bar", tag))
    raise ReductionError(f"internal: cannot reapply {p.rule.value}")


# -- redex detection ---------------------------------------------------------

CUT_L, CUT_R = ("cut", "A"), ("cut", "Ā")


def _cut_sides(node: Proof):
    left = LP(node.premises[0], (CUT_L,) + tuple(("g", k) for k in range(len(node.premises[0].conclusion) - 1)))
    right = LP(node.premises[1], (CUT_R,) + tuple(("d", k) for k in range(len(node.premises[1].conclusion) - 1)))
    return left, right


_UNARY = (Rule.OR, Rule.ALL, Rule.EX, Rule.WEAK, Rule.CONTR)


def _side_kind(q: LP, cut_label) -> str:
    j = q.pos(cut_label)
    r = q.proof.rule
    if r is Rule.AXIOM:
        return Kind.AXIOM
    if j == 0 and r is Rule.WEAK:
        return Kind.WEAKENING
    if j == 0 and r is Rule.CONTR:
        return Kind.CONTRACTION
    if j == 0 and r in (Rule.ALL, Rule.EX, Rule.OR, Rule.AND):
        return "principal"
    if r in _UNARY:
        return Kind.UNARY_PERM
    return Kind.BINARY_PERM


def cut_redexes(node: Proof, path=()) -> list[RedexDescriptor]:
    left, right = _cut_sides(node)
    ql, qr = strip_perms(left), strip_perms(right)
    kl, kr = _side_kind(ql, CUT_L), _side_kind(qr, CUT_R)
    out = []
    for side, k, q in ((LEFT, kl, ql), (RIGHT, kr, qr)):
        if k != "principal":
            out.append(RedexDescriptor(path, Kind(k), side))
        elif kl == kr == "principal":
            if q.proof.rule is Rule.ALL:
                out.append(RedexDescriptor(path, Kind.QUANTIFIER, side))
            elif q.proof.rule is Rule.AND:
                out.append(RedexDescriptor(path, Kind.BOOLEAN, side))
    return out


def cut_paths(p: Proof) -> list[tuple]:
    return [path for path, n in K.subproofs_with_paths(p) if n.rule is Rule.CUT]


def applicable_reductions(p: Proof) -> list[RedexDescriptor]:
    """Every redex, cut nodes in preorder, left premise before right."""
    out = []
    for path, n in K.subproofs_with_paths(p):
        if n.rule is Rule.CUT:
            out.extend(cut_redexes(n, path))
    return out


# -- the reductions ----------------------------------------------------------

def _names(p: Proof) -> set:
    return K._all_names(p)


def apply_reduction(p: Proof, r: RedexDescriptor) -> Proof:
    """Rewrite the redex and return the regularized proof (end-sequent unchanged)."""
    try:
        node = K.at_path(p, r.path)
    except IndexError:
        raise StaleRedex(f"no node at path {format_path(r.path)}") from None
    if node.rule is not Rule.CUT or r not in cut_redexes(node, r.path):
        raise StaleRedex(f"redex {r} does not apply to this proof")
    left, right = _cut_sides(node)
    this, other = (left, right) if r.side == LEFT else (right, left)
    c_this, c_other = (CUT_L, CUT_R) if r.side == LEFT else (CUT_R, CUT_L)

    def mk_cut(a: LP, alab, b: LP, blab) -> LP:
        # Keep the orientation of the original cut: the left premise side stays left.
        return lp_cut(a, alab, b, blab) if r.side == LEFT else lp_cut(b, blab, a, alab)

    q = strip_perms(this)
    match r.kind:
        case Kind.AXIOM:
            o = next(lab for lab in q.labels if lab != c_this)
            res = LP(other.proof, tuple(o if lab == c_other else lab for lab in other.labels))
        case Kind.WEAKENING:
            (res,) = premise_lps(q)
            for lab in reversed(other.labels):
                if lab != c_other:
                    res = lp_weak(res, other.formula(lab), lab)
        case Kind.CONTRACTION:
            (prem,) = premise_lps(q)
            first, second = ("c1", c_this), ("c2", c_this)
            inner = mk_cut(prem, first, other, c_other)
            copy = K.freshen(other.proof, _names(p))
            copy_lp = LP(copy, tuple(("*", lab) for lab in other.labels))
            res = mk_cut(inner, second, copy_lp, ("*", c_other))
            for lab in other.labels:
                if lab != c_other:
                    res = lp_contr(res, lab, ("*", lab), lab)
        case Kind.QUANTIFIER:
            (p0,) = premise_lps(q)
            qo = strip_perms(other)
            (p1,) = premise_lps(qo)
            alpha, t = q.proof.payload, qo.proof.payload
            p0 = LP(K.subst_proof(p0.proof, alpha, t), p0.labels)
            res = mk_cut(p0, ("p", c_this), p1, ("p", c_other))
        case Kind.BOOLEAN:
            p0, p1 = premise_lps(q)
            qo = strip_perms(other)
            (p2,) = premise_lps(qo)
            inner = mk_cut(p1, ("r", c_this), p2, ("r", c_other))
            res = mk_cut(p0, ("l", c_this), inner, ("l", c_other))
        case Kind.UNARY_PERM:
            (prem,) = premise_lps(q)
            res = reapply(q, [mk_cut(prem, c_this, other, c_other)])
        case Kind.BINARY_PERM:
            prems = premise_lps(q)
            k = 0 if c_this in prems[0].labels else 1
            if q.proof.rule is Rule.CUT:
                # Cut over cut: the upper cut keeps its orientation.
                prems[k] = mk_cut(prems[k], c_this, other, c_other)
            else:
                prems[k] = mk_cut(prems[k], c_this, other, c_other)
            res = reapply(q, prems)
        case _:
            raise ReductionError(f"unknown redex kind {r.kind}")
    target = left.labels[1:] + right.labels[1:]
    res = arrange(res, target)
    if not K._seq_eq(res.proof.conclusion, node.conclusion):
        raise ReductionError("internal: reduction changed the conclusion")
    new = K.replace_at(p, r.path, res.proof)
    return K.regularize(K.assign_missing_ids(new))


# -- strategy support: facts about a redex -----------------------------------

def cut_formula(node: Proof, side: str) -> Formula:
    return node.premises[0 if side == LEFT else 1].conclusion[0]


def weak_side(node: Proof) -> str | None:
    """The side whose cut formula is existential (the weak quantifier side)."""
    a, b = node.premises[0].conclusion[0], node.premises[1].conclusion[0]
    if isinstance(a, Ex):
        return LEFT
    if isinstance(b, Ex):
        return RIGHT
    return None


def cut_perm_formulas(p: Proof, r: RedexDescriptor) -> tuple[Formula, Formula] | None:
    """For a cut-over-cut permutation, the two cut formulas as they occur in the
    shared premise (the upper cut's formula F and the lower cut's G)."""
    if r.kind is not Kind.BINARY_PERM:
        return None
    node = K.at_path(p, r.path)
    left, right = _cut_sides(node)
    this = left if r.side == LEFT else right
    c_this = CUT_L if r.side == LEFT else CUT_R
    q = strip_perms(this)
    if q.proof.rule is not Rule.CUT:
        return None
    prems = premise_lps(q)
    k = 0 if c_this in prems[0].labels else 1
    shared = prems[k]
    f = shared.proof.conclusion[0]
    g = shared.formula(c_this)
    return f, g


def contracted_formula(p: Proof, r: RedexDescriptor) -> Formula:
    return cut_formula(K.at_path(p, r.path), r.side)


def is_universal_pi2(f: Formula) -> bool:
    return isinstance(f, All) and classify(f) in (PrenexClass.PI1, PrenexClass.PI2)


# -- strategies --------------------------------------------------------------

@dataclass(frozen=True)
class Strategy:
    name: str

    def allowed(self, p: Proof, r: RedexDescriptor, at_cut: list[RedexDescriptor]) -> bool:
        if self.name == "unrestricted":
            return True
        node = K.at_path(p, r.path)
        if self.name == "weak-first":
            ws = weak_side(node)
            if ws is None or r.kind in TWO_SIDED or r.side == ws:
                return True
            return not any(x.side == ws and x.kind not in TWO_SIDED for x in at_cut)
        if self.name == "restricted":
            if r.kind is Kind.CONTRACTION and is_universal_pi2(cut_formula(node, r.side)):
                return not any(x != r for x in at_cut)
            pair = cut_perm_formulas(p, r)
            if pair is not None and all(classify(f) is PrenexClass.PI2 for f in pair):
                return False
            return True
        raise ValueError(f"unknown strategy {self.name!r}")

    def side_rank(self, p: Proof, r: RedexDescriptor) -> int:
        if self.name == "weak-first":
            ws = weak_side(K.at_path(p, r.path))
            return 0 if ws is None or r.side == ws else 1
        return 0 if r.side == LEFT else 1


STRATEGIES = {name: Strategy(name) for name in ("weak-first", "restricted", "unrestricted")}


def get_strategy(name: str) -> Strategy:
    try:
        return STRATEGIES[name]
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}") from None


def _cuts_inside(p: Proof) -> dict:
    """path -> number of cut nodes strictly above the cut at that path."""
    counts = {}

    def go(n, path):
        below = sum(go(c, path + (k,)) for k, c in enumerate(n.premises))
        if n.rule is Rule.CUT:
            counts[path] = below
            return below + 1
        return below

    go(p, ())
    return counts


def select(p: Proof, strategy: Strategy):
    """(chosen redex or None, forbidden redexes)."""
    redexes = applicable_reductions(p)
    if not redexes:
        return None, []
    by_cut: dict = {}
    for r in redexes:
        by_cut.setdefault(r.path, []).append(r)
    allowed, skipped = [], []
    for r in redexes:
        (allowed if strategy.allowed(p, r, by_cut[r.path]) else skipped).append(r)
    if not allowed:
        raise AssertionError(f"strategy {strategy.name} has no applicable move but cuts remain")
    inside = _cuts_inside(p)
    chosen = min(allowed, key=lambda r: (inside[r.path], r.path, strategy.side_rank(p, r),
                                         KIND_PRIORITY.index(r.kind)))
    return chosen, skipped


@dataclass(frozen=True)
class Step:
    step: int
    redex: RedexDescriptor
    size: int
    skipped: tuple = ()

    def line(self) -> str:
        s = f"{self.step}\t{format_path(self.redex.path)}\t{self.redex.kind.value}\t{self.redex.side}\tsize={self.size}"
        if self.skipped:
            s += "\tskipped: " + "; ".join(str(x) for x in self.skipped)
        return s

    def record(self) -> dict:
        return {"step": self.step, "path": list(self.redex.path), "kind": self.redex.kind.value,
                "side": self.redex.side, "size": self.size,
                "skipped": [str(x) for x in self.skipped]}


class StepLimitExceeded(RuntimeError):
    def __init__(self, limit, proof, trace):
        super().__init__(f"step limit {limit} exceeded")
        self.proof = proof
        self.trace = trace


@dataclass
class EliminationResult:
    proof: Proof
    trace: list = field(default_factory=list)


def reduce_once(p: Proof, strategy: Strategy, step: int = 1) -> tuple[Proof, Step] | None:
    chosen, skipped = select(p, strategy)
    if chosen is None:
        return None
    new = apply_reduction(p, chosen)
    return new, Step(step, chosen, K.size(new), tuple(skipped))


def eliminate_cuts(p: Proof, strategy: Strategy | str = "weak-first", limit: int = 100000) -> EliminationResult:
    if isinstance(strategy, str):
        strategy = get_strategy(strategy)
    trace: list[Step] = []
    while True:
        out = reduce_once(p, strategy, len(trace) + 1)
        if out is None:
            return EliminationResult(p, trace)
        if len(trace) >= limit:
            raise StepLimitExceeded(limit, p, trace)
        p, step = out
        trace.append(step)


# -- Herbrand sets -----------------------------------------------------------

def herbrand_set(p: Proof) -> frozenset:
    """Witness tuples of a cut-free proof of a prenex Σ1 sequent.

    Each end-sequent occurrence is followed upwards through permutations,
    contractions and ∃ inferences; a completed instance is recorded where it is
    used by an axiom or a propositional inference.  Weakened occurrences
    contribute nothing.
    """
    for i, a in enumerate(p.conclusion):
        if not is_sigma1(a):
            raise ReductionError(f"end-sequent formula {i} is not prenex Σ1: {a}")
    arity = [count_exists(a) for a in p.conclusion]
    out = set()
    stack = [(p, tuple((i, ()) for i in range(len(p.conclusion))))]
    while stack:
        n, track = stack.pop()
        match n.rule:
            case Rule.CUT:
                raise ReductionError("herbrand_set needs a cut-free proof")
            case Rule.AXIOM:
                out.update(t for t in track if t is not None)
            case Rule.OR:
                if track[0] is not None:
                    out.add(track[0])
                stack.append((n.premises[0], (None, None) + track[1:]))
            case Rule.AND:
                if track[0] is not None:
                    out.add(track[0])
                g = len(n.premises[0].conclusion) - 1
                stack.append((n.premises[0], (None,) + track[1:1 + g]))
                stack.append((n.premises[1], (None,) + track[1 + g:]))
            case Rule.EX:
                t0 = track[0]
                if t0 is not None:
                    t0 = (t0[0], t0[1] + (n.payload,))
                stack.append((n.premises[0], (t0,) + track[1:]))
            case Rule.ALL:
                stack.append((n.premises[0], (None,) + track[1:]))
            case Rule.WEAK:
                stack.append((n.premises[0], track[1:]))
            case Rule.CONTR:
                stack.append((n.premises[0], (track[0],) + track))
            case Rule.PERM:
                i = n.payload
                t = list(track)
                t[i], t[i + 1] = t[i + 1], t[i]
                stack.append((n.premises[0], tuple(t)))
    for idx, ws in out:
        if len(ws) != arity[idx]:
            raise ReductionError(f"internal: incomplete instance for formula {idx}")
    return frozenset(out)
