"""Parenthesized text syntax for terms, formulas and signatures.

Terms: a symbol is a bound variable if an enclosing quantifier binds it, a
constant if the signature declares it with arity 0, and a free variable
otherwise.  Applications are written ``(fn f t...)``.

Formulas: ``(atom P t...)``, ``(neg (atom P t...))``, ``(or F G)``,
``(and F G)``, ``(all v F)``, ``(ex v F)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (All, And, Atom, BVar, Ex, Fn, Formula, Or, Term, Var, WC,
                    WC_TERM)


class InputError(ValueError):
    """Malformed or ill-scoped input text."""


class SignatureError(InputError):
    pass


# -- s-expressions -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s();]+))")


def read_all(text: str) -> list:
    """Parse every s-expression in ``text``; symbols stay strings, lists become lists."""
    stack: list[list] = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise InputError(f"unexpected character at offset {pos}: {text[pos]!r}")
        pos = m.end()
        comment, lp, rp, sym = m.groups()
        if comment:
            continue
        if lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise InputError(f"unbalanced ')' at offset {m.start(3)}")
            done = stack.pop()
            stack[-1].append(done)
        elif sym:
            stack[-1].append(sym)
    if len(stack) != 1:
        raise InputError("unbalanced '(': input ended inside a list")
    return stack[0]


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise InputError(f"expected one expression, found {len(items)}")
    return items[0]


def to_text(sx, indent: int | None = None) -> str:
    if isinstance(sx, str):
        return sx
    return "(" + " ".join(to_text(x) for x in sx) + ")"


# -- signatures --------------------------------------------------------------

@dataclass
class Signature:
    functions: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, int] = field(default_factory=dict)

    def declare_fn(self, name: str, arity: int):
        if name == WC:
            raise SignatureError(f"'{WC}' is reserved for the weakening constant")
        if self.functions.get(name, arity) != arity:
            raise SignatureError(f"function {name} redeclared with arity {arity}")
        self.functions[name] = arity

    def declare_pred(self, name: str, arity: int):
        if self.predicates.get(name, arity) != arity:
            raise SignatureError(f"predicate {name} redeclared with arity {arity}")
        self.predicates[name] = arity

    def is_constant(self, name: str) -> bool:
        return self.functions.get(name) == 0 or name == WC

    @classmethod
    def parse(cls, sx) -> "Signature":
        if not isinstance(sx, list) or not sx or sx[0] != "signature":
            raise InputError("expected (signature ...)")
        sig = cls()
        for decl in sx[1:]:
            match decl:
                case ["fn", str(name), str(n)] if n.isdigit():
                    sig.declare_fn(name, int(n))
                case ["pred", str(name), str(n)] if n.isdigit():
                    sig.declare_pred(name, int(n))
                case _:
                    raise InputError(f"bad declaration {to_text(decl)}")
        return sig

    def to_sexpr(self) -> list:
        out: list = ["signature"]
        out += [["fn", f, str(n)] for f, n in sorted(self.functions.items())]
        out += [["pred", p, str(n)] for p, n in sorted(self.predicates.items())]
        return out


# -- terms and formulas ------------------------------------------------------

def parse_term(sx, sig: Signature, bound: frozenset = frozenset()) -> Term:
    match sx:
        case str(name):
            if name in bound:
                return BVar(name)
            if sig.is_constant(name):
                return Fn(name, ())
            if name in sig.functions:
                raise SignatureError(f"function {name} used without arguments")
            return Var(name)
        case ["fn", str(name), *args]:
            if name not in sig.functions:
                raise SignatureError(f"undeclared function symbol {name}")
            if sig.functions[name] != len(args):
                raise SignatureError(f"{name} expects {sig.functions[name]} argument(s), got {len(args)}")
            return Fn(name, tuple(parse_term(a, sig, bound) for a in args))
    raise InputError(f"not a term: {to_text(sx)}")


def parse_formula(sx, sig: Signature, bound: frozenset = frozenset()) -> Formula:
    match sx:
        case ["atom", str(p), *args]:
            if p not in sig.predicates:
                raise SignatureError(f"undeclared predicate {p}")
            if sig.predicates[p] != len(args):
                raise SignatureError(f"{p} expects {sig.predicates[p]} argument(s), got {len(args)}")
            return Atom(p, tuple(parse_term(a, sig, bound) for a in args))
        case ["neg", inner]:
            f = parse_formula(inner, sig, bound)
            if not isinstance(f, Atom) or f.negated:
                raise InputError(f"negation is only allowed on atoms: {to_text(sx)}")
            return Atom(f.pred, f.args, True)
        case ["or", a, b]:
            return Or(parse_formula(a, sig, bound), parse_formula(b, sig, bound))
        case ["and", a, b]:
            return And(parse_formula(a, sig, bound), parse_formula(b, sig, bound))
        case ["all", str(v), body]:
            return All(v, parse_formula(body, sig, bound | {v}))
        case ["ex", str(v), body]:
            return Ex(v, parse_formula(body, sig, bound | {v}))
    raise InputError(f"not a formula: {to_text(sx)}")


def term_sexpr(t: Term):
    match t:
        case Var(name) | BVar(name):
            return name
        case Fn(name, ()):
            return name
        case Fn(name, args):
            return ["fn", name] + [term_sexpr(a) for a in args]
    raise TypeError(f"not a term: {t!r}")


def formula_sexpr(f: Formula):
    match f:
        case Atom(p, args, neg):
            atom = ["atom", p] + [term_sexpr(a) for a in args]
            return ["neg", atom] if neg else atom
        case Or(a, b):
            return ["or", formula_sexpr(a), formula_sexpr(b)]
        case And(a, b):
            return ["and", formula_sexpr(a), formula_sexpr(b)]
        case All(v, body):
            return ["all", v, formula_sexpr(body)]
        case Ex(v, body):
            return ["ex", v, formula_sexpr(body)]
    raise TypeError(f"not a formula: {f!r}")


def format_term(t: Term) -> str:
    return to_text(term_sexpr(t))


def format_formula(f: Formula) -> str:
    return to_text(formula_sexpr(f))


def term_from_text(text: str, sig: Signature) -> Term:
    return parse_term(read_one(text), sig)


def formula_from_text(text: str, sig: Signature) -> Formula:
    return parse_formula(read_one(text), sig)


__all__ = [
    "InputError", "SignatureError", "Signature", "read_all", "read_one", "to_text",
    "parse_term", "parse_formula", "term_sexpr", "formula_sexpr", "format_term",
    "format_formula", "term_from_text", "formula_from_text", "WC_TERM",
]
