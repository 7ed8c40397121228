"""Process terms of the pi-calculus with explicit fusions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from lampi.names import fresh


@dataclass(frozen=True)
class Prefix:
    output: bool
    subject: str
    binders: tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.binders)) != len(self.binders):
            raise ValueError(f"binders of {self.subject} are not distinct: {self.binders}")
        if self.subject in self.binders:
            raise ValueError(f"subject {self.subject} among its own binders")


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Par:
    items: tuple


@dataclass(frozen=True)
class New:
    name: str
    body: "Process"


@dataclass(frozen=True)
class Fusion:
    a: str
    b: str


@dataclass(frozen=True)
class Act:
    prefix: Prefix
    body: "Process"
    replicated: bool = False


@dataclass(frozen=True)
class Choice:
    branches: tuple  # of (Prefix, Process), input prefixes only

    def __post_init__(self):
        if not self.branches:
            raise ValueError("empty choice")
        for pre, _ in self.branches:
            if pre.output:
                raise ValueError("choice branches must be input-guarded")


Process = Union[Nil, Par, New, Fusion, Act, Choice]
NIL = Nil()


# -- smart constructors ------------------------------------------------------

def par(*ps: Process) -> Process:
    items = []
    for p in ps:
        if isinstance(p, Par):
            items.extend(p.items)
        elif not isinstance(p, Nil):
            items.append(p)
    if not items:
        return NIL
    if len(items) == 1:
        return items[0]
    return Par(tuple(items))


def new(names: Iterable[str], body: Process) -> Process:
    for x in reversed(tuple(names)):
        body = New(x, body)
    return body


def inp(subject: str, binders: Iterable[str], body: Process = NIL) -> Act:
    return Act(Prefix(False, subject, tuple(binders)), body)


def out(subject: str, binders: Iterable[str], body: Process = NIL) -> Act:
    return Act(Prefix(True, subject, tuple(binders)), body)


def rep(subject: str, binders: Iterable[str], body: Process = NIL) -> Act:
    return Act(Prefix(False, subject, tuple(binders)), body, replicated=True)


def fusions(xs: Iterable[str], ys: Iterable[str]) -> Process:
    return par(*(Fusion(x, y) for x, y in zip(xs, ys)))


def expand_output_macro(subject: str, payload: Iterable[str]) -> Act:
    """Non-binding output ``'u<x1..xn>`` as a binding output over fusions."""
    payload = tuple(payload)
    ys = tuple(fresh("y") for _ in payload)
    return out(subject, ys, fusions(payload, ys))


def send(subject: str, payload: Iterable[str]) -> Act:
    return expand_output_macro(subject, payload)


# -- names ---------------------------------------------------------------------

def free_names(p: Process) -> frozenset:
    match p:
        case Nil():
            return frozenset()
        case Fusion(a, b):
            return frozenset((a, b))
        case Par(items):
            return frozenset().union(*(free_names(q) for q in items))
        case New(x, body):
            return free_names(body) - {x}
        case Act(pre, body, _):
            return (free_names(body) - set(pre.binders)) | {pre.subject}
        case Choice(branches):
            acc = set()
            for pre, body in branches:
                acc |= (free_names(body) - set(pre.binders)) | {pre.subject}
            return frozenset(acc)
    raise TypeError(p)


def all_names(p: Process) -> set:
    acc: set = set()

    def go(q):
        match q:
            case Fusion(a, b):
                acc.update((a, b))
            case Par(items):
                for r in items:
                    go(r)
            case New(x, body):
                acc.add(x)
                go(body)
            case Act(pre, body, _):
                acc.add(pre.subject)
                acc.update(pre.binders)
                go(body)
            case Choice(branches):
                for pre, body in branches:
                    acc.add(pre.subject)
                    acc.update(pre.binders)
                    go(body)

    go(p)
    return acc


def occurrences(p: Process, name: str) -> int:
    """Number of free occurrences of ``name`` in ``p``."""
    match p:
        case Nil():
            return 0
        case Fusion(a, b):
            return (a == name) + (b == name)
        case Par(items):
            return sum(occurrences(q, name) for q in items)
        case New(x, body):
            return 0 if x == name else occurrences(body, name)
        case Act(pre, body, _):
            n = pre.subject == name
            return n + (0 if name in pre.binders else occurrences(body, name))
        case Choice(branches):
            n = 0
            for pre, body in branches:
                n += pre.subject == name
                if name not in pre.binders:
                    n += occurrences(body, name)
            return n
    raise TypeError(p)


# -- substitution --------------------------------------------------------------

def substitute(p: Process, mapping: Mapping[str, str]) -> Process:
    """Capture-avoiding simultaneous renaming of free names."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return p
    return _subst(p, mapping)


def _rename_binders(binders, body, mapping):
    inner = {k: v for k, v in mapping.items() if k not in binders}
    if not inner:
        return binders, inner
    live = set(inner.values())
    fv = free_names(body)
    new_binders = []
    for b in binders:
        if b in live and any(k in fv for k in inner):
            b2 = fresh(b)
            inner[b] = b2
            new_binders.append(b2)
        else:
            new_binders.append(b)
    return tuple(new_binders), inner


def _subst(p: Process, m: Mapping[str, str]) -> Process:
    match p:
        case Nil():
            return p
        case Fusion(a, b):
            return Fusion(m.get(a, a), m.get(b, b))
        case Par(items):
            return Par(tuple(_subst(q, m) for q in items))
        case New(x, body):
            (x2,), inner = _rename_binders((x,), body, m)
            return New(x2, _subst(body, inner) if inner else body)
        case Act(pre, body, r):
            bs, inner = _rename_binders(pre.binders, body, m)
            pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
            return Act(pre2, _subst(body, inner) if inner else body, r)
        case Choice(branches):
            out_ = []
            for pre, body in branches:
                bs, inner = _rename_binders(pre.binders, body, m)
                pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
                out_.append((pre2, _subst(body, inner) if inner else body))
            return Choice(tuple(out_))
    raise TypeError(p)


def uniquify(p: Process, avoid: Iterable[str] = ()) -> Process:
    """Rename bound names so that every binder is distinct from every other
    binder and from all free names (and from ``avoid``)."""
    used = set(free_names(p)) | set(avoid)

    def pick(b):
        if b in used:
            b2 = fresh(b)
        else:
            b2 = b
        used.add(b2)
        return b2

    def go(q, m):
        match q:
            case Nil():
                return q
            case Fusion(a, b):
                return Fusion(m.get(a, a), m.get(b, b))
            case Par(items):
                return Par(tuple(go(r, m) for r in items))
            case New(x, body):
                x2 = pick(x)
                return New(x2, go(body, {**m, x: x2}))
            case Act(pre, body, r):
                bs = tuple(pick(b) for b in pre.binders)
                pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
                return Act(pre2, go(body, {**m, **dict(zip(pre.binders, bs))}), r)
            case Choice(branches):
                res = []
                for pre, body in branches:
                    bs = tuple(pick(b) for b in pre.binders)
                    pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
                    res.append((pre2, go(body, {**m, **dict(zip(pre.binders, bs))})))
                return Choice(tuple(res))
        raise TypeError(q)

    return go(p, {})


def size(p: Process) -> int:
    match p:
        case Nil() | Fusion():
            return 1
        case Par(items):
            return 1 + sum(size(q) for q in items)
        case New(_, body):
            return 1 + size(body)
        case Act(_, body, _):
            return 1 + size(body)
        case Choice(branches):
            return 1 + sum(size(b) for _, b in branches)
    raise TypeError(p)
