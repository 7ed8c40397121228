"""Labelled transitions, reduction and bounded strong bisimilarity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from lampi.names import fresh
from lampi.pi.congruence import (
    UnionFind, canonical_key, congruence_normalize, fusion_partition, top_level,
)
from lampi.pi.syntax import Act, Choice, Fusion, Prefix, Process, free_names, new, par, substitute


@dataclass(frozen=True)
class Visible:
    prefix: Prefix


@dataclass(frozen=True)
class CondTau:
    u: str
    v: str


@dataclass(frozen=True)
class Tau:
    pass


TransitionLabel = Union[Visible, CondTau, Tau]


@dataclass(frozen=True)
class Move:
    """One transition of a normalized process, parameterised by binder names."""
    kind: str                      # "vis", "ctau" or "tau"
    output: bool
    subject: str                   # class representative (for "ctau": output side)
    other: str                     # input side subject for "ctau"
    arity: int
    replicated: bool
    build: Callable[[tuple], Process]

    def label_key(self):
        if self.kind == "vis":
            return ("vis", self.output, self.subject, self.arity)
        if self.kind == "ctau":
            return ("ctau", self.subject, self.other)
        return ("tau",)


def _options(atom):
    if isinstance(atom, Act):
        return [(atom.prefix, atom.body, atom.replicated)]
    if isinstance(atom, Choice):
        return [(pre, body, False) for pre, body in atom.branches]
    return []


def moves(n: Process) -> list[Move]:
    """Transitions of an already normalized process, labels on class representatives."""
    binders, atoms = top_level(n)
    bound = set(binders)
    out: list[Move] = []
    for i, a in enumerate(atoms):
        for pre, body, r in _options(a):
            if pre.subject in bound:
                continue
            rest = atoms[:i] + atoms[i + 1:] + ([a] if r else [])

            def build(xs, pre=pre, body=body, rest=rest):
                return new(binders, par(*rest, substitute(body, dict(zip(pre.binders, xs)))))

            out.append(Move("vis", pre.output, pre.subject, "", len(pre.binders), r, build))
    for i, a in enumerate(atoms):
        for pre_o, body_o, r_o in _options(a):
            if not pre_o.output:
                continue
            for j, b in enumerate(atoms):
                if i == j:
                    continue
                for pre_i, body_i, r_i in _options(b):
                    if pre_i.output or len(pre_i.binders) != len(pre_o.binders):
                        continue
                    u, v = pre_o.subject, pre_i.subject
                    if u != v and (u in bound or v in bound):
                        continue
                    rest = [c for k, c in enumerate(atoms) if k not in (i, j)]
                    rest += [c for k, c, rr in ((i, a, r_o), (j, b, r_i)) if rr]

                    def build(_xs, pre_o=pre_o, body_o=body_o, pre_i=pre_i, body_i=body_i, rest=rest):
                        xs = tuple(fresh(x) for x in pre_o.binders)
                        p1 = substitute(body_o, dict(zip(pre_o.binders, xs)))
                        q1 = substitute(body_i, dict(zip(pre_i.binders, xs)))
                        return new(binders, par(*rest, new(xs, par(p1, q1))))

                    repl = r_o or r_i
                    if u == v:
                        out.append(Move("tau", False, u, v, len(pre_o.binders), repl, build))
                        if u not in bound:
                            out.append(Move("ctau", False, u, v, len(pre_o.binders), repl, build))
                    else:
                        out.append(Move("ctau", False, u, v, len(pre_o.binders), repl, build))
    return out


def _classes(n: Process) -> dict:
    _, atoms = top_level(n)
    uf = UnionFind()
    for a in atoms:
        if isinstance(a, Fusion):
            uf.union(a.a, a.b)
    return {x: uf.find(x) for x in list(uf.parent)}


def transitions(p: Process) -> list[tuple[TransitionLabel, Process]]:
    """All one-step transitions, with labels renamed through the unification judgement."""
    n = congruence_normalize(p)
    cls = _classes(n)
    members: dict = {}
    for x, r in cls.items():
        members.setdefault(r, set()).add(x)

    def names_of(x):
        return sorted(members.get(cls.get(x, x), {x}))

    result = []
    for m in moves(n):
        if m.kind == "vis":
            xs = tuple(fresh("x") for _ in range(m.arity))
            target = m.build(xs)
            for s in names_of(m.subject):
                result.append((Visible(Prefix(m.output, s, xs)), target))
        elif m.kind == "ctau":
            target = m.build(())
            for s in names_of(m.subject):
                for t in names_of(m.other):
                    result.append((CondTau(s, t), target))
        else:
            result.append((Tau(), m.build(())))
    return result


def reduce(p: Process) -> list[Process]:
    """The tau-reducts of ``p``, normalized and deduplicated up to alpha-equality."""
    n = congruence_normalize(p)
    seen = {}
    for m in moves(n):
        if m.kind == "tau":
            q = congruence_normalize(m.build(()))
            seen.setdefault(canonical_key(q), q)
    return list(seen.values())


# -- bounded bisimulation --------------------------------------------------------

@dataclass(frozen=True)
class Budget:
    depth: int = 12
    unfold: int = 32


YES, NO, UNKNOWN = "yes", "no", "unknown"


def bisimilar(p: Process, q: Process, budget: Budget = Budget()) -> str:
    if budget.depth <= 0 or budget.unfold < 0:
        raise ValueError("budget must be positive")
    return _Game(budget).play(congruence_normalize(p), congruence_normalize(q))


class _Game:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.refuted: set = set()
        self.stack: set = set()

    def play(self, p, q):
        return self.game(p, q, self.budget.depth, self.budget.unfold)

    def game(self, p, q, depth, unfold):
        kp, kq = canonical_key(p), canonical_key(q)
        if kp == kq:
            return YES
        pair = (kp, kq)
        if pair in self.refuted:
            return NO
        names = free_names(p) | free_names(q)
        if fusion_partition(p, names) != fusion_partition(q, names):
            self.refuted.add(pair)
            return NO
        if pair in self.stack:
            return YES
        mp, mq = moves(p), moves(q)
        if {m.label_key() for m in mp} != {m.label_key() for m in mq}:
            self.refuted.add(pair)
            return NO
        if depth == 0:
            return UNKNOWN
        self.stack.add(pair)
        try:
            verdict = YES
            for a, b, swap in ((mp, mq, False), (mq, mp, True)):
                for m in a:
                    r = self._answer(m, b, swap, depth, unfold)
                    if r == NO:
                        self.refuted.add(pair)
                        return NO
                    if r == UNKNOWN:
                        verdict = UNKNOWN
            return verdict
        finally:
            self.stack.discard(pair)

    def _answer(self, m, others, swap, depth, unfold):
        xs = tuple(fresh("b") for _ in range(m.arity)) if m.kind == "vis" else ()
        left = congruence_normalize(m.build(xs))
        best = NO
        for o in others:
            if o.label_key() != m.label_key():
                continue
            cost = int(m.replicated) + int(o.replicated)
            if unfold - cost < 0:
                best = UNKNOWN
                continue
            right = congruence_normalize(o.build(xs))
            pair = (right, left) if swap else (left, right)
            r = self.game(*pair, depth - 1, unfold - cost)
            if r == YES:
                return YES
            if r == UNKNOWN:
                best = UNKNOWN
        return best
