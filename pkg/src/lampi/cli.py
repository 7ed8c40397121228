"""Command-line interface and the corpus file format.

Exit status: 0 on success, 1 on a type error or a failed check, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from lampi import lla
from lampi.lam_mu import (
    LamTypeError, TermSyntaxError, hlr_run, parse_term, parse_type, show_term, show_type, typecheck,
)
from lampi.machines import MachineError, show_exec
from lampi.pi.congruence import congruence_normalize
from lampi.pi.lts import Budget, bisimilar
from lampi.pi.text import ParseError, parse_process, pretty, show
from lampi.translate import (
    CERTIFICATE_ARITY, PRESETS, STRATEGIES, TranslationError, build_theorem_sequent, emit_derivation, preset,
    simple_arity, translate, translate_simply_typed, validate_pair,
)
from lampi import verify


# -- corpus files -----------------------------------------------------------------------

@dataclass
class CorpusEntry:
    """One term per file; ``# key: value`` comment lines are directives."""
    name: str
    term: object
    context: dict = field(default_factory=dict)
    delta: dict = field(default_factory=dict)
    strategies: tuple = tuple(PRESETS)
    text: str = ""


def _bindings(s: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in s.split(","))):
        x, sep, a = part.partition(":")
        if not sep:
            raise TermSyntaxError(f"expected 'name : type', got {part!r}")
        out[x.strip()] = parse_type(a)
    return out


def parse_corpus(text: str, name: str = "term") -> CorpusEntry:
    directives, body = {}, []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            key, sep, value = s[1:].partition(":")
            if sep and key.strip() in ("context", "delta", "strategies", "name"):
                directives[key.strip()] = value.strip()
        elif s:
            body.append(s)
    src = " ".join(body)
    entry = CorpusEntry(directives.get("name", name), parse_term(src), text=src)
    entry.context = _bindings(directives.get("context", ""))
    entry.delta = _bindings(directives.get("delta", ""))
    strategies = directives.get("strategies", "all")
    if strategies != "all":
        entry.strategies = tuple(s.strip() for s in strategies.split(","))
        for s in entry.strategies:
            if s not in STRATEGIES:
                raise TranslationError(f"unknown strategy {s!r} in {name}")
    return entry


def load_corpus_file(path) -> CorpusEntry:
    path = Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), path.stem)


def load_corpus(directory) -> list[CorpusEntry]:
    return [load_corpus_file(p) for p in sorted(Path(directory).glob("*.lmu"))]


def theorem_sequent(entry: CorpusEntry, pair, u: str = "u") -> tuple:
    delta = dict(entry.delta)
    a = typecheck(entry.context, entry.term, delta)
    return build_theorem_sequent(entry.context, a, delta, pair, u)


# -- argument handling --------------------------------------------------------------------

class UsageError(Exception):
    pass


def _entry(args) -> CorpusEntry:
    if args.file and args.term:
        raise UsageError("give either a term or --file, not both")
    if args.file:
        entry = load_corpus_file(args.file)
    elif args.term:
        entry = parse_corpus(args.term)
    else:
        raise UsageError("a term or --file is required")
    if getattr(args, "context", None):
        entry.context.update(_bindings(args.context))
    if getattr(args, "delta_ctx", None):
        entry.delta.update(_bindings(args.delta_ctx))
    return entry


def _pair(args, default: Optional[str] = None):
    explicit = args.gamma is not None or args.delta is not None
    if explicit and args.strategy:
        raise UsageError("--strategy and --gamma/--delta are mutually exclusive")
    if explicit:
        if args.gamma is None or args.delta is None:
            raise UsageError("--gamma and --delta go together")
        return str((args.gamma, args.delta)), validate_pair(args.gamma, args.delta, args.logic)
    name = args.strategy or default
    if name is None:
        raise UsageError("a strategy is required (--strategy or --gamma/--delta)")
    if name == "simply-typed":
        return name, None
    return name, preset(name)


def _budget(args) -> Budget:
    return Budget(depth=args.bisim_depth, unfold=args.unfold)


def _print_process(p, out):
    print(show(pretty(congruence_normalize(p))), file=out)


# -- subcommands ------------------------------------------------------------------------------

def cmd_parse(args, out):
    match args.kind:
        case "term":
            print(show_term(parse_term(args.text)), file=out)
        case "type":
            print(show_type(parse_type(args.text)), file=out)
        case "process":
            print(show(parse_process(args.text)), file=out)
        case "formula":
            print(lla.show_formula(lla.parse_formula(args.text)), file=out)
        case "sequent":
            print(lla.show_sequent(lla.parse_sequent(args.text)), file=out)
    return 0


def cmd_typecheck(args, out):
    e = _entry(args)
    delta = dict(e.delta)
    a = typecheck(e.context, e.term, delta)
    line = show_type(a)
    if delta:
        line += " | " + ", ".join(f"{b}:{show_type(t)}" for b, t in delta.items())
    print(line, file=out)
    return 0


def cmd_translate(args, out):
    e = _entry(args)
    name, pair = _pair(args)
    if pair is None:
        a = typecheck(e.context, e.term)
        ys = tuple(f"{args.channel}{i}" for i in range(simple_arity(a)))
        _print_process(translate_simply_typed(e.term, a, ys, e.context), out)
        return 0
    if args.certificate:
        d, seq, p = emit_derivation(e.term, pair, args.channel, e.context, e.delta)
        lla.check_derivation(d, CERTIFICATE_ARITY)
        print("# " + lla.show_sequent(seq), file=out)
        print(lla.dump_derivation(d), file=out)
        return 0
    typecheck(e.context, e.term, dict(e.delta))
    _print_process(translate(e.term, pair, args.channel), out)
    return 0


def cmd_run(args, out):
    e = _entry(args)
    name, pair = _pair(args)
    typecheck(e.context, e.term, dict(e.delta))
    if pair is None:
        seq = hlr_run(e.term, args.max_steps)
        for i, h in enumerate(seq):
            print(("   " if i == 0 else "-> ") + show_term(h.to_term()), file=out)
        return 0
    mach = verify._Machine(pair)
    state = mach.start(e.term, verify.fresh_covariable(e))
    print(show_exec(state), file=out)
    for _ in range(args.max_steps):
        r = mach.step(state)
        if r is None:
            print(f"terminal: {mach.shape(state)}", file=out)
            return 0
        rule, state = r
        print(f"-> [{rule}] {show_exec(state)}", file=out)
    print("step budget exhausted", file=sys.stderr)
    return 1


def _report(args, e):
    name, pair = _pair(args)
    if pair is None:
        raise UsageError("the simply typed translation is checked with 'verify' only")
    typecheck(e.context, e.term, dict(e.delta))
    return verify.check_step_correspondence(e.term, pair if args.gamma else name, args.max_steps,
                                            alpha=verify.fresh_covariable(e), budget=_budget(args))


def cmd_trace(args, out):
    e = _entry(args)
    report = _report(args, e)
    if args.format == "structured":
        for line in report.lines():
            print(line, file=out)
    else:
        for r in report.records:
            labels = " ".join(r.labels) or "-"
            print(f"{r.step:3} {r.verdict:10} {labels:12} {r.exec}", file=out)
            print(f"    {r.process}", file=out)
    return 0 if report.ok else 1


def cmd_verify(args, out):
    e = _entry(args)
    name, pair = _pair(args)
    if pair is None:
        rep = verify.check_hlr_lockstep(e.term, e.context, args.max_steps, _budget(args))
        status = "PASS" if rep.ok else "FAIL"
        print(f"{status} {e.name} [simply-typed] steps={rep.steps}", file=out)
        return 0 if rep.ok else 1
    report = _report(args, e)
    status = "PASS" if report.ok else "FAIL"
    summary = {"term": e.name, "strategy": name, "status": status, "steps": report.steps,
               "transitions": report.transitions, "terminal": report.terminal_shape,
               "bisimulation_fallbacks": report.fallbacks,
               "mismatches": [f"step {i}: {d}" for i, d in report.mismatches]}
    if pair is not None and args.certificate:
        d, seq, _ = emit_derivation(e.term, pair, "u", e.context, e.delta)
        lla.check_derivation(d, CERTIFICATE_ARITY)
        summary["certificate"] = lla.show_sequent(seq)
    if args.format == "structured":
        print(json.dumps(summary, ensure_ascii=False), file=out)
    else:
        print(f"{status} {e.name} [{name}] steps={report.steps} transitions={report.transitions} "
              f"terminal={report.terminal_shape} fallbacks={report.fallbacks}", file=out)
        for m in summary["mismatches"]:
            print("  " + m, file=out)
    return 0 if report.ok else 1


def cmd_bisim(args, out):
    p, q = parse_process(args.left), parse_process(args.right)
    verdict = bisimilar(p, q, _budget(args))
    print(verdict, file=out)
    return 0 if verdict == "yes" else 1


def cmd_probe(args, out):
    if args.process is not None:
        if args.term or args.file:
            raise UsageError("give either --process or a term")
        p = parse_process(args.process)
        seq = lla.parse_sequent(args.sequent or "")
    else:
        e = _entry(args)
        name, pair = _pair(args)
        if pair is None:
            raise UsageError("probes need a modal strategy")
        seq = theorem_sequent(e, pair)
        p = translate(e.term, pair, "u")
    verdict = verify.deadlock_probe(p, seq, args.states)
    print(verdict, file=out)
    return 0 if verdict == "pass" else 1


# -- entry point ---------------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lampi",
        description="Translate lambda-mu terms into processes and check the translation.",
        epilog="exit status: 0 on success, 1 on a type error or a failed check, 2 on usage errors")
    sub = ap.add_subparsers(dest="command", required=True)

    def strategy_opts(p):
        p.add_argument("--strategy", choices=STRATEGIES)
        p.add_argument("--gamma")
        p.add_argument("--delta")
        p.add_argument("--logic", default="classical", choices=("classical", "intuitionistic"))

    def term_opts(p):
        p.add_argument("term", nargs="?")
        p.add_argument("--file")
        p.add_argument("--context", help="typing context, e.g. 'y:X, f:X->X'")
        p.add_argument("--mu-context", dest="delta_ctx", help="free mu-variables, e.g. 'b:X'")

    def budget_opts(p):
        p.add_argument("--max-steps", type=int, default=10_000)
        p.add_argument("--bisim-depth", type=int, default=12)
        p.add_argument("--unfold", type=int, default=32)
        p.add_argument("--format", choices=("text", "structured"), default="text")

    p = sub.add_parser("parse", help="parse and print an object")
    p.add_argument("kind", choices=("term", "type", "process", "formula", "sequent"))
    p.add_argument("text")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("typecheck", help="infer the type of a term")
    term_opts(p)
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("translate", help="translate a term into a process")
    term_opts(p)
    strategy_opts(p)
    p.add_argument("--channel", default="u")
    p.add_argument("--certificate", action="store_true", help="print the typing derivation")
    p.set_defaults(func=cmd_translate)

    for name, func, text in (("run", cmd_run, "run the abstract machine"),
                             ("trace", cmd_trace, "run machine and process in lockstep"),
                             ("verify", cmd_verify, "check the step correspondence")):
        p = sub.add_parser(name, help=text)
        term_opts(p)
        strategy_opts(p)
        budget_opts(p)
        if name == "verify":
            p.add_argument("--certificate", action="store_true", help="also check the typing certificate")
        p.set_defaults(func=func)

    p = sub.add_parser("bisim", help="bounded strong bisimilarity of two processes")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--bisim-depth", type=int, default=12)
    p.add_argument("--unfold", type=int, default=32)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("probe", help="must-testing deadlock probe")
    term_opts(p)
    strategy_opts(p)
    p.add_argument("--process")
    p.add_argument("--sequent", help="entries 'u : A' separated by ';'")
    p.add_argument("--states", type=int, default=10_000)
    p.set_defaults(func=cmd_probe)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ParseError, TermSyntaxError, lla.FormulaSyntaxError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (LamTypeError, TranslationError, MachineError, lla.LLaError,
            verify.VerificationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
