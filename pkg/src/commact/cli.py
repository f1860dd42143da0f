"""Command-line interface.

Every command ends with a line ``RESULT: <token>``.  Exit codes: 0 positive
result, 1 negative result, 2 inconclusive, 3 usage or parse error, 4 time
budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .approximation import AllDerivableUpTo, approximate_sequent, refute
from .calculus import Calculus, check
from .cutelim import InvalidDerivation, eliminate_cuts
from .encoding import (EncodingError, encode, k_step_sequent, synth_circular,
                       synth_circular_circ, synth_k_step, target_sequent)
from .formula import ParseError, parse_formula, parse_sequent
from .lattice import (LatticeError, evaluate, is_star_continuous,
                      parse_lattice, soundness_check, validate_lattice)
from .minsky import (Circular, Configuration, Halted, MachineError, classify,
                     can_perform_k_steps, parse_machine, run)
from .proof import dumps, has_cut, loads
from .search import BudgetExceeded, Derivable, Prover, Refused, decide

OK, NEGATIVE, INCONCLUSIVE, USAGE, BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _finish(code: int, token: str) -> int:
    print(f"RESULT: {token}")
    return code


def _text_arg(arg: str) -> str:
    """Inline text, or the contents of a file when prefixed with '@'."""
    if arg.startswith("@"):
        return Path(arg[1:]).read_text(encoding="utf-8")
    return arg


def _read(path: str) -> str:
    return Path(path.lstrip("@")).read_text(encoding="utf-8")


def _config(text: str) -> Configuration:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--config expects p,a,b,c")
    try:
        return Configuration(parts[0].strip(), *(int(x) for x in parts[1:]))
    except ValueError as e:
        raise UsageError(f"bad configuration {text!r}: {e}") from None


def _emit(path, proof, calculus):
    Path(path).write_text(dumps(proof, calculus), encoding="utf-8")
    print(f"wrote {path}")


# -- commands ---------------------------------------------------------------

def cmd_prove(args) -> int:
    seq = parse_sequent(_text_arg(args.sequent))
    deadline = time.monotonic() + args.budget if args.budget else None
    prover = Prover(emit_proof=bool(args.emit), deadline=deadline)
    try:
        out = decide(seq, emit_proof=bool(args.emit), prover=prover)
    except BudgetExceeded:
        return _finish(BUDGET, "budget-exceeded")
    if isinstance(out, Refused):
        print(f"refused: {out.reason}")
        return _finish(INCONCLUSIVE, "refused")
    print(f"nodes={out.stats.nodes_expanded} memo_hits={out.stats.memo_hits} "
          f"elapsed={out.stats.elapsed:.3f}s")
    if isinstance(out, Derivable):
        if args.emit:
            _emit(args.emit, out.proof, Calculus.OMEGA_FIN)
        return _finish(OK, "derivable")
    return _finish(NEGATIVE, "not-derivable")


def cmd_check(args) -> int:
    calc, proof = loads(_read(args.proof))
    target = Calculus.parse(args.calculus) if args.calculus else calc
    report = check(proof, target)
    print(report)
    return _finish(OK, "valid") if report.valid else _finish(NEGATIVE, "invalid")


def cmd_approx(args) -> int:
    seq = approximate_sequent(parse_sequent(_text_arg(args.sequent)), args.n)
    print(seq)
    if args.emit:
        Path(args.emit).write_text(str(seq) + "\n", encoding="utf-8")
        print(f"wrote {args.emit}")
    return _finish(OK, f"approximated n={args.n}")


def cmd_refute(args) -> int:
    res = refute(parse_sequent(_text_arg(args.sequent)), args.max_n)
    if isinstance(res, AllDerivableUpTo):
        return _finish(INCONCLUSIVE, f"inconclusive max-n={res.max_n}")
    print(res.refuting_sequent)
    return _finish(NEGATIVE, f"refuted n={res.witness_n}")


def cmd_cutelim(args) -> int:
    calc, proof = loads(_read(args.proof))
    try:
        out = eliminate_cuts(proof)
    except InvalidDerivation as e:
        print(e, file=sys.stderr)
        return _finish(NEGATIVE, "invalid")
    assert not has_cut(out)
    if args.emit:
        _emit(args.emit, out, Calculus.OMEGA_FIN)
    return _finish(OK, "cut-free")


def cmd_minsky(args) -> int:
    m = parse_machine(_read(args.machine))
    if args.action == "run":
        trace, status = run(m, args.input, args.max_steps)
        for c in trace:
            print(c)
        if isinstance(status, Halted):
            return _finish(OK, f"halted steps={status.steps}")
        return _finish(INCONCLUSIVE, f"exceeded bound={status.bound}")
    res = classify(m, args.input, args.max_steps)
    if isinstance(res, Halted):
        return _finish(OK, f"halted steps={res.steps}")
    if isinstance(res, Circular):
        print(f"revisits {res.configuration}")
        return _finish(OK, f"circular prefix={res.prefix} period={res.period}")
    return _finish(INCONCLUSIVE, f"exceeded bound={res.bound}")


def cmd_encode(args) -> int:
    em = encode(parse_machine(_read(args.machine)))
    print(f"E = {em.E}")
    print(f"D = {em.D}")
    if args.config is not None:
        seq = k_step_sequent(em, _config(args.config), args.k)
    else:
        seq = target_sequent(em, args.input)
    print(seq)
    if args.emit:
        Path(args.emit).write_text(str(seq) + "\n", encoding="utf-8")
        print(f"wrote {args.emit}")
    return _finish(OK, "encoded")


def cmd_synth(args) -> int:
    em = encode(parse_machine(_read(args.machine)))
    try:
        if args.kind == "kstep":
            if args.config is None:
                raise UsageError("synth kstep needs --config p,a,b,c")
            proof = synth_k_step(em, _config(args.config), args.k)
            calc = Calculus.OMEGA_FIN
        elif args.circ:
            proof = synth_circular_circ(em, args.input, args.max_steps)
            calc = Calculus.CIRC
        else:
            proof = synth_circular(em, args.input, args.max_steps)
            calc = Calculus.COMMACT
    except EncodingError as e:
        print(e, file=sys.stderr)
        return _finish(NEGATIVE, "precondition-failed")
    report = check(proof, calc)
    print(f"{proof.conclusion}")
    print(f"{calc.value}: {report}")
    if args.emit:
        _emit(args.emit, proof, calc)
    return _finish(OK, "valid") if report.valid else _finish(NEGATIVE, "invalid")


def _valuation(text: str) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in (text or "").split(","))):
        name, _, val = item.partition("=")
        if not val:
            raise UsageError(f"bad valuation entry {item!r}")
        out[name.strip()] = int(val)
    return out


def cmd_model(args) -> int:
    L = parse_lattice(_read(args.lattice))
    if args.action == "check":
        problems = validate_lattice(L)
        for p in problems:
            print(p)
        if problems:
            return _finish(NEGATIVE, "invalid")
        cont = is_star_continuous(L)
        print("star-continuous" if cont else "not star-continuous")
        return _finish(OK, "ok")
    if args.action == "eval":
        if not args.target:
            raise UsageError("model eval needs a formula or sequent")
        text = _text_arg(args.target)
        v = _valuation(args.val)
        if "|-" in text:
            from .lattice import sequent_holds
            holds = sequent_holds(parse_sequent(text), L, v)
            return _finish(OK, "holds") if holds else _finish(NEGATIVE, "fails")
        return _finish(OK, f"value={evaluate(parse_formula(text), L, v)}")
    if not args.target:
        raise UsageError("model soundness needs a proof file")
    _, proof = loads(_read(args.target))
    cex = soundness_check(proof, L, trials=args.trials, seed=args.seed)
    if cex is None:
        return _finish(OK, "ok")
    print("counterexample: " + ", ".join(f"{k}={v}" for k, v in sorted(cex.items())))
    return _finish(NEGATIVE, "counterexample")


def cmd_verify(args) -> int:
    m = parse_machine(_read(args.machine))
    em = encode(m)
    prover = Prover(emit_proof=False)
    rng = range(args.max_counter + 1)
    cases = disagreements = 0
    for state in m.states:
        for a in rng:
            for b in rng:
                for c in rng:
                    cfg = Configuration(state, a, b, c)
                    for k in range(args.max_k + 1):
                        cases += 1
                        expect = can_perform_k_steps(m, cfg, k)
                        got = decide(k_step_sequent(em, cfg, k), emit_proof=False, prover=prover)
                        if isinstance(got, Derivable) != expect:
                            disagreements += 1
                            print(f"disagree: {cfg} k={k} machine={expect}")
    print(f"{cases} cases, {disagreements} disagreements")
    if disagreements:
        return _finish(NEGATIVE, f"disagree count={disagreements}")
    return _finish(OK, "agree")


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="commact", description="Proof checking and search for commutative action logic.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("prove", help="decide a sequent without negative stars")
    s.add_argument("sequent", help="sequent text, or @file")
    s.add_argument("--emit", metavar="FILE")
    s.add_argument("--budget", type=float, metavar="SECS")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("check", help="check a proof file")
    s.add_argument("proof")
    s.add_argument("--calculus", choices=[c.value for c in Calculus])
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("approx", help="n-th approximation of a sequent")
    s.add_argument("sequent")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--emit", metavar="FILE")
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("refute", help="look for an underivable approximation")
    s.add_argument("sequent")
    s.add_argument("--max-n", type=int, required=True)
    s.set_defaults(func=cmd_refute)

    s = sub.add_parser("cutelim", help="eliminate cuts from a finite proof")
    s.add_argument("proof")
    s.add_argument("--emit", metavar="FILE")
    s.set_defaults(func=cmd_cutelim)

    s = sub.add_parser("minsky", help="run or classify a counter machine")
    s.add_argument("action", choices=["run", "classify"])
    s.add_argument("machine")
    s.add_argument("--input", type=int, default=0)
    s.add_argument("--max-steps", type=int, default=1000)
    s.set_defaults(func=cmd_minsky)

    s = sub.add_parser("encode", help="print the encoding of a machine")
    s.add_argument("machine")
    s.add_argument("--input", type=int, default=0)
    s.add_argument("--config")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--emit", metavar="FILE")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("synth", help="synthesize a derivation from a run")
    s.add_argument("kind", choices=["kstep", "circular"])
    s.add_argument("machine")
    s.add_argument("--config")
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--input", type=int, default=0)
    s.add_argument("--max-steps", type=int, default=10_000)
    s.add_argument("--circ", action="store_true", help="emit the circular proof instead")
    s.add_argument("--emit", metavar="FILE")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("model", help="finite action lattices")
    s.add_argument("action", choices=["check", "eval", "soundness"])
    s.add_argument("lattice")
    s.add_argument("target", nargs="?", help="formula/sequent (eval) or proof file (soundness)")
    s.add_argument("--val", default="", help="valuation like p=1,q=0")
    s.add_argument("--trials", type=int)
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("verify", help="compare search against machine runs")
    s.add_argument("what", choices=["lemma"])
    s.add_argument("machine")
    s.add_argument("--max-k", type=int, default=3)
    s.add_argument("--max-counter", type=int, default=2)
    s.set_defaults(func=cmd_verify)
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return _finish(USAGE, "usage-error")
    except (ParseError, MachineError, LatticeError, EncodingError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return _finish(USAGE, "parse-error")


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
