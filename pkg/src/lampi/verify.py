"""Operational checks: administrative normalization, lockstep correspondence and probes."""

from __future__ import annotations

import json
import re
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from lampi import lla
from lampi.lam_mu import Term, free_mu, free_vars, hlr_step, show_term, sigma_normalize, typecheck
from lampi.machines import (
    cbn_start, cbn_step, cbn_terminal_shape, cbv_start,
    cbv_step, cbv_terminal_shape, check_mu_linear, show_exec, translate_exec_cbn,
    translate_exec_cbv,
)
from lampi.names import OMEGA, fresh, fresh_avoiding
from lampi.pi.congruence import _norm, alpha_equal, canonical_key, congruence_normalize, top_level
from lampi.pi.lts import NO, UNKNOWN, YES, Budget, bisimilar, moves, reduce
from lampi.pi.syntax import (
    Act, Choice, Fusion, New, Par, Prefix, Process, free_names, new, occurrences, out,
    par, uniquify,
)
from lampi.pi.text import pretty, show
from lampi.translate import TransPair, preset, simple_arity, translate_simply_typed

log = logging.getLogger(__name__)


class VerificationError(RuntimeError):
    pass


class NondeterminismError(VerificationError):
    pass


class BudgetExhausted(VerificationError):
    pass


# -- administrative normalization ---------------------------------------------------------

@dataclass
class AdminLog:
    """Moves performed by admin_normalize, with bisimulation verdicts in debug mode."""
    moves: list = field(default_factory=list)


def admin_normalize(p: Process, debug: bool = False, budget: Budget = Budget(depth=8),
                    record: Optional[AdminLog] = None, limit: int = 10_000) -> Process:
    """Normal form plus garbage collection of inert residuals and unsharing of servers.

    The moves, applied inside every nu-block to a fixpoint:
      * drop prefixes on a hidden name that nothing else can synchronise with;
      * ``nu x.(x~y)`` disappears through normalization;
      * a hidden replicated input server used only through outputs and
        fusions is copied next to each use (one copy per use).
    """
    p = congruence_normalize(p)
    for _ in range(limit):
        ctx = _Admin(debug, budget, record)
        q = ctx.block(p)
        if not ctx.changed:
            return p
        p = congruence_normalize(q)
    raise BudgetExhausted("administrative normalization did not reach a fixpoint")


class _Admin:
    def __init__(self, debug, budget, record):
        self.debug, self.budget, self.record = debug, budget, record
        self.changed = False

    def block(self, p: Process) -> Process:
        binders, atoms = top_level(p)
        atoms = [self.atom(a) for a in atoms]
        while True:
            before = new(binders, par(*atoms))
            move = _dead_move(binders, atoms) or _unshare_move(binders, atoms)
            if move is None:
                return before
            kind, z, atoms2 = move
            binders2 = [b for b in binders if b != z] if kind == "unshare" else binders
            after = new(binders2, par(*atoms2))
            self.note(kind, z, before, after)
            binders, atoms = top_level(_norm(uniquify(after)))

    def atom(self, a):
        match a:
            case Act(pre, body, r):
                return Act(pre, self.block(body), r)
            case Choice(branches):
                return Choice(tuple((pre, self.block(body)) for pre, body in branches))
        return a

    def note(self, kind, z, before, after):
        self.changed = True
        verdict = None
        if self.debug:
            verdict = bisimilar(before, after, self.budget)
            if verdict == NO:
                raise VerificationError(f"administrative move {kind} on {z} is unsound:\n"
                                        f"  {show(before)}\n  {show(after)}")
        if self.record is not None:
            self.record.moves.append((kind, z, show(before), show(after), verdict))


def _subjects(a):
    match a:
        case Act(pre, _, r):
            return [(pre, r)]
        case Choice(branches):
            return [(pre, False) for pre, _ in branches]
    return []


def _dead_move(binders, atoms):
    """Prefixes on a hidden name whose every use has the same polarity."""
    for z in binders:
        users = [i for i, a in enumerate(atoms) if any(pre.subject == z for pre, _ in _subjects(a))]
        if not users:
            continue
        if any(z in free_names(a) for i, a in enumerate(atoms) if i not in users):
            continue
        pols = set()
        ok = True
        for i in users:
            for pre, _ in _subjects(atoms[i]):
                if pre.subject == z:
                    pols.add(pre.output)
            # z must not occur except as a subject of these atoms
            if _occurs_besides_subject(atoms[i], z):
                ok = False
        if not ok or len(pols) != 1:
            continue
        out_atoms = []
        for i, a in enumerate(atoms):
            if i not in users:
                out_atoms.append(a)
            elif isinstance(a, Choice):
                live = tuple((pre, b) for pre, b in a.branches if pre.subject != z)
                if len(live) == 1:
                    out_atoms.append(Act(live[0][0], live[0][1]))
                elif live:
                    out_atoms.append(Choice(live))
        return "dead", z, out_atoms
    return None


def _occurs_besides_subject(a, z) -> bool:
    match a:
        case Act(pre, body, _):
            return z not in pre.binders and z in free_names(body)
        case Choice(branches):
            return any(z not in pre.binders and z in free_names(body) for pre, body in branches)
    return z in free_names(a)


def _input_use(p: Process, z: str) -> bool:
    """Whether ``z`` is the subject of an input prefix somewhere in ``p``."""
    match p:
        case Act(pre, body, _):
            if pre.subject == z and not pre.output:
                return True
            return z not in pre.binders and _input_use(body, z)
        case Choice(branches):
            return any(pre.subject == z or (z not in pre.binders and _input_use(b, z))
                       for pre, b in branches)
        case Par(items):
            return any(_input_use(q, z) for q in items)
        case New(x, body):
            return x != z and _input_use(body, z)
    return False


def _unshare_move(binders, atoms):
    for z in binders:
        servers = [i for i, a in enumerate(atoms)
                   if isinstance(a, Act) and a.prefix.subject == z and not a.prefix.output]
        if len(servers) != 1:
            continue
        s = atoms[servers[0]]
        if not s.replicated or z in free_names(s.body):
            continue
        others = [a for i, a in enumerate(atoms) if i != servers[0]]
        if any(_input_use(a, z) for a in others):
            continue
        uses = sum(occurrences(a, z) for a in others)
        if uses == 0:
            continue
        if uses == 1 and any(isinstance(a, Act) and a.prefix.subject == z and a.prefix.output
                             for a in others):
            continue
        return "unshare", z, [_copy_server(a, z, s) for a in others]
    return None


def _copy_server(p: Process, z: str, server: Act) -> Process:
    def copy(z2):
        return uniquify(Act(Prefix(False, z2, server.prefix.binders), server.body, True))

    def go(q):
        match q:
            case Fusion(a, b) if z in (a, b):
                other = b if a == z else a
                z2 = fresh(z)
                return New(z2, Par((Fusion(other, z2), copy(z2))))
            case Act(pre, body, r):
                body = body if z in pre.binders else go(body)
                if pre.subject == z:
                    z2 = fresh(z)
                    return New(z2, Par((Act(Prefix(pre.output, z2, pre.binders), body, r), copy(z2))))
                return Act(pre, body, r)
            case Choice(branches):
                return Choice(tuple((pre, b if z in pre.binders else go(b)) for pre, b in branches))
            case Par(items):
                return Par(tuple(go(r) for r in items))
            case New(x, body):
                return q if x == z else New(x, go(body))
        return q

    return go(p)


# -- determinism ----------------------------------------------------------------------------

def determinism_check(p: Process) -> bool:
    return len(reduce(p)) <= 1


# -- lockstep correspondence ------------------------------------------------------------------

LOCKSTEP = ("cbn-classical", "cbn-int", "cbv-classical", "cbv-lin")


@dataclass(frozen=True)
class Record:
    step: int
    exec: str
    process: str
    labels: tuple
    verdict: str
    rule: str = ""

    def as_dict(self):
        return {"step": self.step, "exec": self.exec, "process": self.process,
                "labels": list(self.labels), "verdict": self.verdict}


@dataclass
class CorrespondenceReport:
    term: str
    strategy: str
    records: list = field(default_factory=list)
    steps: int = 0
    transitions: int = 0
    terminal_shape: Optional[str] = None
    fallbacks: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.terminal_shape is not None

    def lines(self):
        return [json.dumps(r.as_dict(), ensure_ascii=False) for r in self.records]


_TAUS = {
    "pop": lambda p: len(p.delta), "let": lambda p: len(p.delta),
    "case": lambda p: len(p.delta) + 1, "sharp": lambda p: len(p.delta_p),
    "fun": lambda p: len(p.gamma_p), "arg": lambda p: len(p.gamma_p),
    "beta": lambda p: len(p.gamma),
}


class _Machine:
    def __init__(self, pair: TransPair):
        self.pair = pair
        self.cbn = pair.orientation == "left"

    def start(self, m, alpha):
        return cbn_start(m, alpha) if self.cbn else cbv_start(m, alpha)

    def step(self, e):
        return cbn_step(e) if self.cbn else cbv_step(e)

    def translate(self, e):
        return (translate_exec_cbn if self.cbn else translate_exec_cbv)(e, self.pair)

    def shape(self, e):
        return cbn_terminal_shape(e) if self.cbn else cbv_terminal_shape(e)


def fresh_covariable(entry, base: str = "a") -> str:
    """A mu-variable for the initial executable, distinct from the names of ``entry``."""
    taken = set(entry.context) | set(entry.delta) | free_vars(entry.term) | free_mu(entry.term)
    return base if base not in taken else fresh_avoiding(base, taken)


def _strategy(strategy) -> tuple[str, TransPair]:
    if isinstance(strategy, TransPair):
        return str(strategy), strategy
    return strategy, preset(strategy)


def _render(p: Process) -> str:
    return show(pretty(p))


def check_step_correspondence(m: Term, strategy, maxsteps: int = 10_000, alpha: str = "a",
                              budget: Budget = Budget(), strict: bool = False) -> CorrespondenceReport:
    """Run the machine and the translated process side by side."""
    name, pair = _strategy(strategy)
    if pair.logic == "intuitionistic" and pair.orientation == "left":
        check_mu_linear(m)
    mach = _Machine(pair)
    report = CorrespondenceReport(show_term(m), name)
    e = mach.start(m, alpha)
    p = admin_normalize(mach.translate(e))
    report.records.append(Record(0, show_exec(e), _render(p), (), "start"))
    for i in range(1, maxsteps + 1):
        r = mach.step(e)
        if r is None:
            report.terminal_shape = mach.shape(e)
            if reduce(p):
                report.mismatches.append((i, "the process can still reduce at a terminal executable"))
            if report.terminal_shape is None:
                report.mismatches.append((i, f"unexpected terminal executable {show_exec(e)}"))
            return report
        rule, e2 = r
        q = p
        labels = []
        for _ in range(_TAUS[rule](pair)):
            rs = reduce(q)
            if len(rs) != 1:
                detail = f"{len(rs)} reductions enabled during the {rule} rule"
                if strict or len(rs) > 1:
                    raise NondeterminismError(detail) if len(rs) > 1 else VerificationError(detail)
                report.mismatches.append((i, detail))
                return report
            q = rs[0]
            labels.append("tau")
        q = admin_normalize(q)
        target = admin_normalize(mach.translate(e2))
        if alpha_equal(q, target):
            verdict = "match"
        else:
            b = bisimilar(q, target, budget)
            verdict = "bisimilar" if b == YES else f"mismatch({b})"
            if b == YES:
                report.fallbacks += 1
                log.info("step %d of %s under %s matched by bisimilarity", i, report.term, name)
            else:
                report.mismatches.append((i, f"{_render(q)} vs {_render(target)}: {b}"))
        report.steps += 1
        report.transitions += len(labels)
        report.records.append(Record(i, show_exec(e2), _render(q), tuple(labels), verdict, rule))
        if verdict.startswith("mismatch"):
            return report
        p, e = q, e2
    raise BudgetExhausted(f"no terminal executable within {maxsteps} steps")


_GENERATED = re.compile(r"\b([A-Za-z]+)_(\d+)\b")


def canonical_text(s: str) -> str:
    """Renumber generated names by order of first appearance."""
    seen: dict = {}

    def sub(m):
        return seen.setdefault(m.group(0), f"{m.group(1)}_{len(seen) + 1}")

    return _GENERATED.sub(sub, s)


def same_record(a: dict, b: dict) -> bool:
    """Golden comparison: fields equal, names up to renaming, processes up to alpha."""
    from lampi.pi.text import parse_process
    return (a["step"] == b["step"] and a["labels"] == b["labels"] and a["verdict"] == b["verdict"]
            and canonical_text(a["exec"]) == canonical_text(b["exec"])
            and alpha_equal(parse_process(a["process"], allow_reserved=True),
                            parse_process(b["process"], allow_reserved=True)))


def run_trace(m: Term, strategy, maxsteps: int = 10_000, **kw) -> list[Record]:
    return check_step_correspondence(m, strategy, maxsteps, **kw).records


# -- head linear reduction against the arity-based translation --------------------------------

@dataclass
class HlrReport:
    steps: int = 0
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v in ("match", "bisimilar") for v in self.verdicts)


def check_hlr_lockstep(m: Term, gamma: Optional[dict] = None, maxsteps: int = 10_000,
                       budget: Budget = Budget()) -> HlrReport:
    gamma = dict(gamma or {})
    a = typecheck(gamma, m)
    ys = tuple(f"y{i}" for i in range(simple_arity(a)))
    h = sigma_normalize(m)
    p = admin_normalize(translate_simply_typed(h.to_term(), a, ys, gamma))
    report = HlrReport()
    for _ in range(maxsteps):
        h2 = hlr_step(h)
        if h2 is None:
            if reduce(p):
                report.verdicts.append("the process can still reduce")
            return report
        rs = reduce(p)
        if len(rs) != 1:
            report.verdicts.append(f"{len(rs)} reductions enabled")
            return report
        q = admin_normalize(rs[0])
        target = admin_normalize(translate_simply_typed(h2.to_term(), a, ys, gamma))
        if alpha_equal(q, target):
            report.verdicts.append("match")
        else:
            b = bisimilar(q, target, budget)
            report.verdicts.append("bisimilar" if b == YES else f"mismatch({b})")
            if b != YES:
                return report
        report.steps += 1
        p, h = q, h2
    raise BudgetExhausted(f"head linear reduction did not stop within {maxsteps} steps")


# -- must-testing probes ------------------------------------------------------------------------

PASS, FAIL = "pass", "fail"
_OUTPUT_PROBE = (lla.OfCourse, lla.Down)
_INPUT_PROBE = (lla.WhyNot, lla.Up)


def _modal_leaves(names, f, ctx):
    """Split an entry into one (name, modality, inner arity) triple per name."""
    match f:
        case lla.Forall(_, b) | lla.Exists(_, b):
            return _modal_leaves(names, b, ctx)
        case lla.Tensor(a, b) | lla.Parr(a, b) | lla.Plus(a, b) | lla.With(a, b):
            k = lla.arity(a, ctx)
            return _modal_leaves(names[:k], a, ctx) + _modal_leaves(names[k:], b, ctx)
        case lla.OfCourse(b) | lla.Down(b) | lla.WhyNot(b) | lla.Up(b):
            return [(names[0], type(f), lla.arity(b, ctx))]
    raise ValueError(f"type variable {lla.show_formula(f)} is not under a modality")


def build_probe(sequent, ctx=lla.UniformArity(1)) -> Process:
    parts = []
    for e in sequent:
        for u, kind, k in _modal_leaves(e.names, e.formula, ctx):
            xs = tuple(fresh("x") for _ in range(k))
            signal = out(OMEGA, ())
            parts.append(Act(Prefix(kind in _OUTPUT_PROBE, u, xs), signal))
    return par(*parts)


def _observable(n: Process) -> bool:
    return any(m.kind == "vis" for m in moves(n))


def deadlock_probe(p: Process, sequent=(), budget: int = 10_000, ctx=lla.UniformArity(1)) -> str:
    """Explore ``p | t`` and check that every reachable state can still reach a visible action."""
    names = set()
    for e in sequent:
        names |= set(e.names)
    if OMEGA in free_names(p):
        raise ValueError(f"{OMEGA} is reserved for probes")
    if not free_names(p) <= names:
        raise ValueError(f"the sequent does not cover {sorted(free_names(p) - names)}")
    start = congruence_normalize(par(p, build_probe(sequent, ctx)))
    succ: dict = {}
    states: dict = {}
    queue = deque([start])
    states[canonical_key(start)] = start
    truncated = False
    while queue:
        q = queue.popleft()
        k = canonical_key(q)
        if len(succ) >= budget:
            truncated = True
            break
        nxt = reduce(q)
        succ[k] = [canonical_key(r) for r in nxt]
        for r, kr in zip(nxt, succ[k]):
            if kr not in states:
                states[kr] = r
                queue.append(r)
    good = {k for k, q in states.items() if _observable(q)}
    changed = True
    while changed:
        changed = False
        for k, ks in succ.items():
            if k not in good and any(x in good for x in ks):
                good.add(k)
                changed = True
    if all(k in good for k in states):
        return PASS
    # a state that cannot reach an observation is conclusive only if its future is fully explored
    frontier = set(states) - set(succ)
    for k in states:
        if k in good:
            continue
        if not _reaches(k, succ, frontier):
            return FAIL
    return UNKNOWN if truncated else FAIL


def _reaches(k, succ, frontier) -> bool:
    seen, stack = {k}, [k]
    while stack:
        x = stack.pop()
        if x in frontier:
            return True
        for y in succ.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False
