"""Concrete syntax for processes.

Grammar (``|`` binds loosest, then ``+``)::

    P ::= C ('|' C)*
    C ::= U ('+' U)*
    U ::= '1' | 'nu' x,y. U | '(' P ')' | x '~' y
        | ['!'] ["'"] u '(' xs ')' ['.' U] | "'" u '<' xs '>'
"""

from __future__ import annotations

import re

from lampi import names as _names
from lampi.pi.syntax import (
    NIL, Act, Choice, Fusion, New, Nil, Par, Prefix, Process, expand_output_macro, new, par,
)


class ParseError(ValueError):
    pass


# -- printing ------------------------------------------------------------------

def macro_payload(a: Act):
    """Payload of a binding output that is really a non-binding output macro."""
    if not a.prefix.output or a.replicated or not a.prefix.binders:
        return None
    bs = a.prefix.binders
    body = a.body
    fs = body.items if isinstance(body, Par) else (body,)
    if len(fs) != len(bs) or not all(isinstance(f, Fusion) for f in fs):
        return None
    partner = {}
    for f in fs:
        if f.a in bs and f.b not in bs:
            y, x = f.a, f.b
        elif f.b in bs and f.a not in bs:
            y, x = f.b, f.a
        else:
            return None
        if y in partner:
            return None
        partner[y] = x
    if set(partner) != set(bs):
        return None
    return tuple(partner[b] for b in bs)


def _prefix_str(pre: Prefix, replicated: bool) -> str:
    s = ("!" if replicated else "") + ("'" if pre.output else "") + pre.subject
    return s + "(" + ",".join(pre.binders) + ")"


def show(p: Process) -> str:
    match p:
        case Par(items):
            return " | ".join(_show_choice(q) for q in items)
    return _show_choice(p)


def _show_choice(p: Process) -> str:
    if isinstance(p, Choice):
        return " + ".join(_prefix_str(pre, False) + "." + _show_unary(body) for pre, body in p.branches)
    return _show_unary(p)


def _show_unary(p: Process) -> str:
    match p:
        case Nil():
            return "1"
        case Fusion(a, b):
            return f"{a} ~ {b}"
        case New():
            names = []
            while isinstance(p, New):
                names.append(p.name)
                p = p.body
            return "nu " + ",".join(names) + ". " + _show_unary(p)
        case Act(pre, body, r):
            payload = macro_payload(p)
            if payload is not None:
                return "'" + pre.subject + "<" + ",".join(payload) + ">"
            return _prefix_str(pre, r) + "." + _show_unary(body)
        case Par() | Choice():
            return "(" + show(p) + ")"
    raise TypeError(p)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)|(?P<sym>[()|,.~'!<>+]))")


def tokenize(src: str) -> list[str]:
    pos = 0
    toks = []
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {src[pos:pos + 10]!r}")
        toks.append(m.group(m.lastgroup))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, src: str, allow_reserved: bool):
        self.toks = tokenize(src)
        self.i = 0
        self.allow_reserved = allow_reserved

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def eat(self, tok=None):
        t = self.peek()
        if t is None or (tok is not None and t != tok):
            raise ParseError(f"expected {tok!r}, got {t!r}")
        self.i += 1
        return t

    def name(self):
        t = self.eat()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t) or t == "nu":
            raise ParseError(f"expected a name, got {t!r}")
        if t == _names.OMEGA and not self.allow_reserved:
            raise ParseError(f"{t!r} is reserved for probes")
        _names.reserve(t)
        return t

    def names_until(self, close):
        xs = []
        if self.peek() != close:
            xs.append(self.name())
            while self.peek() == ",":
                self.eat(",")
                xs.append(self.name())
        self.eat(close)
        return xs

    def proc(self):
        items = [self.choice()]
        while self.peek() == "|":
            self.eat("|")
            items.append(self.choice())
        return par(*items) if len(items) > 1 else items[0]

    def choice(self):
        first = self.unary()
        if self.peek() != "+":
            return first
        branches = [first]
        while self.peek() == "+":
            self.eat("+")
            branches.append(self.unary())
        out = []
        for b in branches:
            if not isinstance(b, Act) or b.prefix.output or b.replicated:
                raise ParseError("choice branches must be linear input prefixes")
            out.append((b.prefix, b.body))
        return Choice(tuple(out))

    def unary(self):
        t = self.peek()
        if t == "1":
            self.eat()
            return NIL
        if t == "(":
            self.eat("(")
            p = self.proc()
            self.eat(")")
            return p
        if t == "nu":
            self.eat("nu")
            xs = [self.name()]
            while self.peek() == ",":
                self.eat(",")
                xs.append(self.name())
            self.eat(".")
            return new(xs, self.unary())
        replicated = False
        if t == "!":
            self.eat("!")
            replicated = True
        output = False
        if self.peek() == "'":
            self.eat("'")
            output = True
        subj = self.name()
        nxt = self.peek()
        if nxt == "~" and not output and not replicated:
            self.eat("~")
            return Fusion(subj, self.name())
        if nxt == "<":
            if not output or replicated:
                raise ParseError("non-binding output must be written 'u<..>")
            self.eat("<")
            return expand_output_macro(subj, self.names_until(">"))
        self.eat("(")
        bs = self.names_until(")")
        body = NIL
        if self.peek() == ".":
            self.eat(".")
            body = self.unary()
        try:
            return Act(Prefix(output, subj, tuple(bs)), body, replicated)
        except ValueError as e:
            raise ParseError(str(e)) from None


def parse_process(src: str, allow_reserved: bool = False) -> Process:
    p = _Parser(src, allow_reserved)
    out = p.proc()
    if p.peek() is not None:
        raise ParseError(f"trailing input at token {p.peek()!r}")
    return out


def pretty(p: Process) -> Process:
    """Rename generated bound names back to their base strings where no clash arises."""
    from lampi.pi.syntax import free_names

    used = set(free_names(p))

    def pick(b):
        base = _names.base_of(b)
        cand = base
        k = 1
        while cand in used:
            cand = f"{base}{k}"
            k += 1
        used.add(cand)
        return cand

    def go(q, m, scope):
        match q:
            case Nil():
                return q
            case Fusion(a, b):
                return Fusion(m.get(a, a), m.get(b, b))
            case Par(items):
                return Par(tuple(go(r, m, scope) for r in items))
            case New(x, body):
                x2 = pick(x)
                return New(x2, go(body, {**m, x: x2}, scope))
            case Act(pre, body, r):
                bs = tuple(pick(b) for b in pre.binders)
                pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
                return Act(pre2, go(body, {**m, **dict(zip(pre.binders, bs))}, scope), r)
            case Choice(branches):
                res = []
                for pre, body in branches:
                    bs = tuple(pick(b) for b in pre.binders)
                    pre2 = Prefix(pre.output, m.get(pre.subject, pre.subject), bs)
                    res.append((pre2, go(body, {**m, **dict(zip(pre.binders, bs))}, scope)))
                return Choice(tuple(res))
        raise TypeError(q)

    return go(p, {}, None)
