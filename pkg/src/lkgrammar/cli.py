"""Command-line front end: lkgrammar {check,grammar,language,reduce,eliminate,verify}."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis as A
from . import kernel as K
from .grammar import (CF, CS, BudgetExceeded, GrammarError, extract_grammar,
                      format_language, language, reference_language)
from .kernel import KernelError
from .reduction import (STRATEGIES, ReductionError, StepLimitExceeded,
                        apply_reduction, applicable_reductions, eliminate_cuts,
                        get_strategy, parse_path, reduce_once)
from .syntax import InputError

OK, SEMANTIC, INPUT, LIMIT = 0, 1, 2, 3
EXT = ".lk"


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple
    mode: str = CS
    strategy: str = "weak-first"
    limit: int = 100000
    fmt: str = "text"
    seed: int = 0
    out: str | None = None


class _Exit(Exception):
    def __init__(self, code: int, msg: str = ""):
        super().__init__(msg)
        self.code = code


def _load(path: str) -> K.Problem:
    return K.load_problem(path)


def _valid(prob: K.Problem) -> K.Proof:
    errs = K.check_proof(prob.proof)
    if errs:
        raise _Exit(SEMANTIC, "\n".join(f"node {nid}: {msg}" for nid, msg in errs))
    return prob.proof


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _records(recs) -> str:
    return "\n".join(json.dumps(r, ensure_ascii=False, sort_keys=True) for r in recs)


# -- commands ----------------------------------------------------------------

def cmd_check(cfg: RunConfig) -> int:
    prob = _load(cfg.inputs[0])
    errs = K.check_proof(prob.proof)
    if cfg.fmt == "json":
        print(_records([{"proof": prob.name, "valid": not errs,
                         "errors": [{"node": n, "message": m} for n, m in errs]}]))
    elif errs:
        for nid, msg in errs:
            print(f"node {nid}: {msg}")
        print(f"{prob.name}: INVALID ({len(errs)} error(s))")
    else:
        print(f"{prob.name}: valid ({K.size(prob.proof)} inferences) ⊢ {K.format_sequent(prob.proof.conclusion)}")
    return SEMANTIC if errs else OK


def cmd_grammar(cfg: RunConfig) -> int:
    p = _valid(_load(cfg.inputs[0]))
    g = extract_grammar(p, cfg.mode)
    if cfg.fmt == "json":
        text = _records([{"node": pr.node, "index": pr.index, "production": str(pr)}
                         for pr in g.all_productions()])
    else:
        text = g.dump()
    _emit(text, cfg.out)
    return OK


def cmd_language(cfg: RunConfig, engine: str = "evaluator") -> int:
    p = _valid(_load(cfg.inputs[0]))
    if engine == "reference":
        lang = reference_language(p, cfg.mode, seed=cfg.seed, outermost=True)
    else:
        lang = language(p, cfg.mode)
    _emit(format_language(lang, len(p.conclusion), "json" if cfg.fmt == "json" else "text"), cfg.out)
    return OK


def _redex_arg(text: str) -> tuple:
    """PATH:SIDE, e.g. ε:left or 0.1:right."""
    path, _, side = text.rpartition(":")
    if side not in ("left", "right"):
        raise InputError(f"bad redex {text!r}: expected PATH:left or PATH:right")
    return parse_path(path), side


def cmd_reduce(cfg: RunConfig, redex: str | None = None) -> int:
    prob = _load(cfg.inputs[0])
    p = _valid(prob)
    if redex:
        path, side = _redex_arg(redex)
        found = [r for r in applicable_reductions(p) if r.path == path and r.side == side]
        if not found:
            raise _Exit(SEMANTIC, f"no redex at {redex}")
        new = apply_reduction(p, found[0])
        line = f"1\t{found[0]}\tsize={K.size(new)}"
    else:
        res = reduce_once(p, get_strategy(cfg.strategy))
        if res is None:
            print("no redex: the proof is cut-free")
            if cfg.out:
                _emit(K.print_problem(prob, p), cfg.out)
            return OK
        new, step = res
        line = step.line()
    print(line)
    _emit(K.print_problem(prob, new), cfg.out)
    return OK


def cmd_eliminate(cfg: RunConfig) -> int:
    prob = _load(cfg.inputs[0])
    p = _valid(prob)
    try:
        res = eliminate_cuts(p, cfg.strategy, cfg.limit)
    except StepLimitExceeded as e:
        for st in e.trace:
            print(st.line() if cfg.fmt == "text" else json.dumps(st.record(), ensure_ascii=False))
        raise _Exit(LIMIT, f"step limit {cfg.limit} exceeded")
    for st in res.trace:
        print(st.line() if cfg.fmt == "text" else json.dumps(st.record(), ensure_ascii=False))
    _emit(K.print_problem(prob, res.proof), cfg.out)
    return OK


def _collect(inputs) -> list[Path]:
    files = []
    for name in inputs:
        path = Path(name)
        if path.is_dir():
            files += sorted(f for f in path.iterdir() if f.suffix == EXT)
        elif path.exists():
            files.append(path)
        else:
            raise InputError(f"no such file or directory: {name}")
    return files


def cmd_verify(cfg: RunConfig, strategies) -> int:
    files = _collect(cfg.inputs)
    if not files:
        print("warning: no proof files found; 0 checks run", file=sys.stderr)
        print("summary: 0 proofs, 0 checks, 0 inconsistent")
        return OK
    items = [(f.stem, _load(str(f)).proof) for f in files]
    reports = A.verify_corpus(items, strategies, cfg.limit, parallel=len(items) > 1)
    bad = 0
    checks = 0
    for rep in reports:
        if not rep.valid:
            bad += 1
            print(f"{rep.proof_id}\tINVALID proof")
            continue
        for r in rep.preservation:
            checks += 1
            bad += not r.verdict
            rec = r.record()
            if cfg.fmt == "json":
                print(json.dumps(rec, ensure_ascii=False, sort_keys=True))
            else:
                print(f"{rec['proof']}\t{rec['redex']}\t{rec['case']}\texpected={rec['expected']}"
                      f"\tobserved={rec['observed']}\t{rec['verdict']}")
        for e in rep.end_to_end:
            checks += 1
            bad += not e.ok
            rec = e.record()
            if cfg.fmt == "json":
                print(json.dumps(rec, ensure_ascii=False, sort_keys=True))
            else:
                print(f"{rec['proof']}\tend-to-end\t{rec['strategy']}\tsteps={rec['steps']}"
                      f"\therbrand⊆language={not rec['missing']}\ttautology={rec['tautology']}\t{rec['verdict']}")
    print(f"summary: {len(items)} proofs, {checks} checks, {bad} inconsistent")
    return SEMANTIC if bad else OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lkgrammar",
                                 description="Proof grammars for LK proofs with Π2/Σ2 cuts.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[CS, CF], default=CS,
                        help="context-sensitive (cs) or context-free (cf) ∀ rule")
    common.add_argument("--strategy", choices=sorted(STRATEGIES), default=None)
    common.add_argument("--limit", type=int, default=100000, help="reduction step limit")
    common.add_argument("--format", dest="fmt", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the main output here")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="check a proof").add_argument("file")
    sub.add_parser("grammar", parents=[common], help="print the extracted grammar").add_argument("file")
    lp = sub.add_parser("language", parents=[common], help="print the language of a proof")
    lp.add_argument("file")
    lp.add_argument("--engine", choices=["evaluator", "reference"], default="evaluator")
    rp = sub.add_parser("reduce", parents=[common], help="perform one reduction step")
    rp.add_argument("file")
    rp.add_argument("--redex", help="PATH:SIDE of the redex to reduce (default: the strategy's choice)")
    sub.add_parser("eliminate", parents=[common], help="eliminate all cuts").add_argument("file")
    sub.add_parser("verify", parents=[common],
                   help="check language preservation over a file or directory").add_argument("paths", nargs="+")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = tuple(args.paths) if args.command == "verify" else (args.file,)
    cfg = RunConfig(args.command, inputs, args.mode, args.strategy or "weak-first",
                    args.limit, args.fmt, args.seed, args.out)
    try:
        match args.command:
            case "check":
                return cmd_check(cfg)
            case "grammar":
                return cmd_grammar(cfg)
            case "language":
                return cmd_language(cfg, args.engine)
            case "reduce":
                return cmd_reduce(cfg, args.redex)
            case "eliminate":
                return cmd_eliminate(cfg)
            case "verify":
                strategies = (args.strategy,) if args.strategy else ("weak-first", "restricted")
                return cmd_verify(cfg, strategies)
    except _Exit as e:
        if str(e):
            print(str(e), file=sys.stderr)
        return e.code
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return INPUT
    except (BudgetExceeded, StepLimitExceeded) as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return LIMIT
    except (KernelError, GrammarError, ReductionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return SEMANTIC
    return OK


if __name__ == "__main__":
    sys.exit(main())
