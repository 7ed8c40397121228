"""Linear logic with arities: formulas, sequents and a derivation checker.

Derivations are explicit certificates; the checker validates each rule
instance bottom-up and rebuilds the process the derivation types.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Union

from lampi.pi.syntax import (
    Choice, Prefix, free_names, fusions, inp, new, out, par, rep, substitute,
)


# -- formulas ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    positive: bool = True


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Parr:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Plus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class With:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Down:
    body: "Formula"


@dataclass(frozen=True)
class Up:
    body: "Formula"


@dataclass(frozen=True)
class OfCourse:
    body: "Formula"


@dataclass(frozen=True)
class WhyNot:
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Var, Tensor, Parr, Plus, With, Down, Up, OfCourse, WhyNot, Forall, Exists]

BINARY = (Tensor, Parr, Plus, With)
MODAL = (Down, Up, OfCourse, WhyNot)
QUANT = (Forall, Exists)

_DUAL_CLASS = {Tensor: Parr, Parr: Tensor, Plus: With, With: Plus,
               Down: Up, Up: Down, OfCourse: WhyNot, WhyNot: OfCourse,
               Forall: Exists, Exists: Forall}

LETTERS = {"!": OfCourse, "?": WhyNot, "↓": Down, "↑": Up}
LETTER_OF = {v: k for k, v in LETTERS.items()}


def dual(f: Formula) -> Formula:
    match f:
        case Var(x, pos):
            return Var(x, not pos)
        case Tensor(a, b) | Parr(a, b) | Plus(a, b) | With(a, b):
            return _DUAL_CLASS[type(f)](dual(a), dual(b))
        case Down(a) | Up(a) | OfCourse(a) | WhyNot(a):
            return _DUAL_CLASS[type(f)](dual(a))
        case Forall(x, a) | Exists(x, a):
            return _DUAL_CLASS[type(f)](x, dual(a))
    raise TypeError(f)


class LLaError(ValueError):
    pass


class ArityError(LLaError):
    pass


class DistinctnessError(LLaError):
    pass


class ContextError(LLaError):
    pass


class ExistsArityError(LLaError):
    pass


class RuleError(LLaError):
    pass


def arity(f: Formula, ctx) -> int:
    match f:
        case Var(x, _):
            if x not in ctx:
                raise ArityError(f"unbound type variable {x}")
            return ctx[x]
        case Down() | Up() | OfCourse() | WhyNot():
            return 1
        case Forall(x, a) | Exists(x, a):
            return arity(a, ctx)
        case Tensor(a, b) | Parr(a, b) | Plus(a, b) | With(a, b):
            return arity(a, ctx) + arity(b, ctx)
    raise TypeError(f)


def free_vars(f: Formula) -> frozenset:
    match f:
        case Var(x, _):
            return frozenset((x,))
        case Forall(x, a) | Exists(x, a):
            return free_vars(a) - {x}
        case Down(a) | Up(a) | OfCourse(a) | WhyNot(a):
            return free_vars(a)
        case Tensor(a, b) | Parr(a, b) | Plus(a, b) | With(a, b):
            return free_vars(a) | free_vars(b)
    raise TypeError(f)


def subst_formula(f: Formula, x: str, b: Formula) -> Formula:
    """``f[b/x]`` with ``x^⊥`` receiving the dual of ``b``."""
    match f:
        case Var(y, pos):
            if y != x:
                return f
            return b if pos else dual(b)
        case Forall(y, a) | Exists(y, a):
            if y == x:
                return f
            if y in free_vars(b):
                y2 = _fresh_var(y, free_vars(b) | free_vars(a))
                a = subst_formula(a, y, Var(y2))
                y = y2
            return type(f)(y, subst_formula(a, x, b))
        case Down(a) | Up(a) | OfCourse(a) | WhyNot(a):
            return type(f)(subst_formula(a, x, b))
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return type(f)(subst_formula(l, x, b), subst_formula(r, x, b))
    raise TypeError(f)


def _fresh_var(base, avoid):
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def formula_key(f: Formula, env=None, depth=0):
    env = env or {}
    match f:
        case Var(x, pos):
            return ("v", env.get(x, x), pos)
        case Forall(x, a) | Exists(x, a):
            return (type(f).__name__, formula_key(a, {**env, x: depth}, depth + 1))
        case Down(a) | Up(a) | OfCourse(a) | WhyNot(a):
            return (type(f).__name__, formula_key(a, env, depth))
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return (type(f).__name__, formula_key(l, env, depth), formula_key(r, env, depth))
    raise TypeError(f)


def formula_equal(a: Formula, b: Formula) -> bool:
    return formula_key(a) == formula_key(b)


# -- generalised modalities -------------------------------------------------------

_ALIASES = {"v": "↓", "^": "↑", "!": "!", "?": "?", "↓": "↓", "↑": "↑"}


def parse_word(s: str) -> str:
    s = s.strip()
    if s in ("", "ε", "eps"):
        return ""
    try:
        return "".join(_ALIASES[c] for c in s if not c.isspace())
    except KeyError as e:
        raise ValueError(f"not a modality letter: {e.args[0]!r}") from None


def apply_word(word: str, f: Formula) -> Formula:
    for letter in reversed(word):
        f = LETTERS[letter](f)
    return f


def dual_word(word: str) -> str:
    return "".join(LETTER_OF[_DUAL_CLASS[LETTERS[c]]] for c in word)


# -- printing and parsing ----------------------------------------------------------

_BIN_SYM = {Tensor: "*", Parr: "$", Plus: "(+)", With: "(&)"}
_SYM_BIN = {v: k for k, v in _BIN_SYM.items()}
_UN_SYM = {OfCourse: "!", WhyNot: "?", Down: "dn ", Up: "up "}


def show_formula(f: Formula) -> str:
    match f:
        case Var(x, pos):
            return x if pos else "~" + x
        case Forall(x, a):
            return f"forall {x}. {show_formula(a)}"
        case Exists(x, a):
            return f"exists {x}. {show_formula(a)}"
        case Down(a) | Up(a) | OfCourse(a) | WhyNot(a):
            return _UN_SYM[type(f)] + _atomic(a)
        case Tensor(l, r) | Parr(l, r) | Plus(l, r) | With(l, r):
            return f"{_atomic(l)} {_BIN_SYM[type(f)]} {_atomic(r)}"
    raise TypeError(f)


def _atomic(f):
    s = show_formula(f)
    return f"({s})" if isinstance(f, BINARY + QUANT) else s


_FTOK = re.compile(r"\s*(\(\+\)|\(&\)|[A-Za-z_][A-Za-z0-9_]*|[()~*$!?.])")


class FormulaSyntaxError(ValueError):
    pass


_FUNICODE = {"↓": " dn ", "↑": " up ", "⊗": "*", "⅋": "$", "⊕": "(+)", "∀": "forall ",
             "∃": "exists "}


def parse_formula(src: str) -> Formula:
    toks = []
    pos = 0
    for k, v in _FUNICODE.items():
        src = src.replace(k, v)
    src = src.strip()
    while pos < len(src):
        m = _FTOK.match(src, pos)
        if not m:
            raise FormulaSyntaxError(f"bad formula syntax at {src[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def eat(t=None):
        nonlocal i
        tok = peek()
        if tok is None or (t is not None and tok != t):
            raise FormulaSyntaxError(f"expected {t!r}, got {tok!r}")
        i += 1
        return tok

    def formula():
        if peek() in ("forall", "exists"):
            q = eat()
            x = eat()
            eat(".")
            body = formula()
            return (Forall if q == "forall" else Exists)(x, body)
        left = unary()
        if peek() in _SYM_BIN:
            op = _SYM_BIN[eat()]
            return op(left, formula())
        return left

    def unary():
        t = peek()
        if t == "(":
            eat("(")
            f = formula()
            eat(")")
            return f
        if t == "~":
            eat("~")
            return Var(eat(), False)
        if t == "!":
            eat()
            return OfCourse(unary())
        if t == "?":
            eat()
            return WhyNot(unary())
        if t == "dn":
            eat()
            return Down(unary())
        if t == "up":
            eat()
            return Up(unary())
        if t in ("forall", "exists"):
            return formula()
        if t is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t):
            raise FormulaSyntaxError(f"unexpected token {t!r}")
        return Var(eat())

    f = formula()
    if peek() is not None:
        raise FormulaSyntaxError(f"trailing tokens in formula: {toks[i:]}")
    return f


# -- sequents ----------------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    names: tuple
    formula: Formula

    def __str__(self):
        return f"{''.join(self.names) if all(len(n) == 1 for n in self.names) else ' '.join(self.names)}: {show_formula(self.formula)}"


Sequent = tuple  # of Entry


def show_sequent(seq) -> str:
    return "; ".join(f"{','.join(e.names)} : {show_formula(e.formula)}" for e in seq)


def parse_sequent(src: str) -> tuple:
    """Entries ``u,v : A`` separated by semicolons."""
    seq = []
    for part in filter(None, (x.strip() for x in src.split(";"))):
        names, sep, f = part.partition(":")
        if not sep:
            raise FormulaSyntaxError(f"expected 'names : formula', got {part!r}")
        seq.append(Entry(tuple(n.strip() for n in names.split(",")), parse_formula(f)))
    return tuple(seq)


def check_sequent(seq, ctx) -> None:
    seen = set()
    for e in seq:
        if len(e.names) != arity(e.formula, ctx):
            raise ArityError(f"entry {e.names} has {len(e.names)} names but its formula "
                             f"{show_formula(e.formula)} has arity {arity(e.formula, ctx)}")
        for n in e.names:
            if n in seen:
                raise DistinctnessError(f"name {n} occurs twice in the sequent")
            seen.add(n)


def sequent_equal(a, b) -> bool:
    return len(a) == len(b) and all(
        x.names == y.names and formula_equal(x.formula, y.formula) for x, y in zip(a, b))


# -- derivations ---------------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    rule: str
    params: dict = field(default_factory=dict, hash=False)
    premises: tuple = ()


def D(rule: str, *premises: Derivation, **params) -> Derivation:
    return Derivation(rule, params, tuple(premises))


def _take(seq, names):
    names = tuple(names)
    for i, e in enumerate(seq):
        if e.names == names:
            return e, seq[:i] + seq[i + 1:]
    raise RuleError(f"no entry named {names} in sequent {show_sequent(seq)}")


def _nm(x):
    return (x,) if isinstance(x, str) else tuple(x)


def check_derivation(d: Derivation, ctx) -> tuple:
    """Validate ``d`` and return ``(sequent, process)``."""
    return _check(d, ctx)


class UniformArity:
    """Arity context giving every type variable the same arity."""
    def __init__(self, n: int):
        self.n = n

    def __contains__(self, x):
        return True

    def __getitem__(self, x):
        return self.n


def _check(d: Derivation, ctx):
    return apply_rule(d.rule, d.params, [_check(p, ctx) for p in d.premises], ctx)


def apply_rule(rule: str, k: dict, prem: list, ctx) -> tuple:
    """Conclusion ``(sequent, process)`` of one rule instance over checked premises."""

    def need(n):
        if len(prem) != n:
            raise RuleError(f"{rule} expects {n} premise(s), got {len(prem)}")

    match rule:
        case "axiom":
            need(0)
            us, vs, a = _nm(k["us"]), _nm(k["vs"]), k["formula"]
            seq = (Entry(us, dual(a)), Entry(vs, a))
            proc = fusions(us, vs)
        case "cut":
            need(2)
            xs = _nm(k["names"])
            (s1, p), (s2, q) = prem
            e1, r1 = _take(s1, xs)
            e2, r2 = _take(s2, xs)
            if not formula_equal(e1.formula, dual(e2.formula)):
                raise RuleError(f"cut formulas are not dual: {show_formula(e1.formula)} / {show_formula(e2.formula)}")
            seq = r1 + r2
            proc = new(xs, par(p, q))
        case "tensor":
            need(2)
            (s1, p), (s2, q) = prem
            e1, r1 = _take(s1, _nm(k["left"]))
            e2, r2 = _take(s2, _nm(k["right"]))
            seq = r1 + r2 + (Entry(e1.names + e2.names, Tensor(e1.formula, e2.formula)),)
            proc = par(p, q)
        case "par":
            need(1)
            (s, p), = prem
            e1, r = _take(s, _nm(k["left"]))
            e2, r = _take(r, _nm(k["right"]))
            seq = r + (Entry(e1.names + e2.names, Parr(e1.formula, e2.formula)),)
            proc = p
        case "up" | "whynot" | "down" | "ofcourse":
            need(1)
            (s, p), = prem
            u = k["subject"]
            e, r = _take(s, _nm(k["names"]))
            if rule == "down" and not all(isinstance(x.formula, (Up, WhyNot)) for x in r):
                raise ContextError(f"down-action needs an up/why-not context, got {show_sequent(r)}")
            if rule == "ofcourse" and not all(isinstance(x.formula, WhyNot) for x in r):
                raise ContextError(f"of-course action needs a why-not context, got {show_sequent(r)}")
            wrap = {"up": Up, "whynot": WhyNot, "down": Down, "ofcourse": OfCourse}[rule]
            seq = r + (Entry((u,), wrap(e.formula)),)
            if rule in ("up", "whynot"):
                proc = out(u, e.names, p)
            elif rule == "down":
                proc = inp(u, e.names, p)
            else:
                proc = rep(u, e.names, p)
        case "exchange":
            need(1)
            (s, p), = prem
            order = [_nm(x) for x in k["order"]]
            if sorted(order) != sorted(e.names for e in s):
                raise RuleError("exchange order is not a permutation of the premise")
            by = {e.names: e for e in s}
            seq = tuple(by[o] for o in order)
            proc = p
        case "contraction":
            need(1)
            (s, p), = prem
            u, v, w = k["u"], k["v"], k["w"]
            eu, _ = _take(s, (u,))
            ev, _ = _take(s, (v,))
            if not isinstance(eu.formula, WhyNot) or not formula_equal(eu.formula, ev.formula):
                raise RuleError("contraction needs two identical why-not entries")
            seq = tuple(Entry((w,), eu.formula) if e.names == (u,) else e
                        for e in s if e.names != (v,))
            proc = substitute(p, {u: w, v: w})
        case "weakening":
            need(1)
            (s, p), = prem
            u, f = k["subject"], k["formula"]
            if not isinstance(f, WhyNot):
                raise RuleError("only why-not formulas can be weakened")
            if u in free_names(p):
                raise RuleError(f"weakened name {u} occurs in the process")
            seq = s + (Entry((u,), f),)
            proc = p
        case "forall":
            need(1)
            (s, p), = prem
            x = k["var"]
            e, r = _take(s, _nm(k["names"]))
            for o in r:
                if x in free_vars(o.formula):
                    raise RuleError(f"forall: {x} is free in the context entry {o.names}")
            seq = tuple(Entry(o.names, Forall(x, e.formula)) if o is e else o for o in s)
            proc = p
        case "exists":
            need(1)
            (s, p), = prem
            x, body, witness = k["var"], k["body"], k["witness"]
            if x not in ctx:
                raise ArityError(f"no arity declared for bound variable {x}")
            if arity(witness, ctx) != ctx[x]:
                raise ExistsArityError(
                    f"exists: witness {show_formula(witness)} has arity {arity(witness, ctx)}, "
                    f"variable {x} has arity {ctx[x]}")
            e, r = _take(s, _nm(k["names"]))
            if not formula_equal(e.formula, subst_formula(body, x, witness)):
                raise RuleError("exists: premise is not the instance of the body at the witness")
            seq = tuple(Entry(o.names, Exists(x, body)) if o is e else o for o in s)
            proc = p
        case "plus":
            need(1)
            (s, p), = prem
            u, v, side, other = k["u"], k["v"], k["side"], k["other"]
            e, r = _take(s, ((u,) if side == 1 else (v,)))
            if not isinstance(e.formula, Up) or not isinstance(other, Up):
                raise RuleError("plus: both summands must be up-formulas")
            f = Plus(e.formula, other) if side == 1 else Plus(other, e.formula)
            fresh_name = v if side == 1 else u
            if fresh_name in free_names(p):
                raise RuleError(f"plus: {fresh_name} occurs in the process")
            seq = r + (Entry((u, v), f),)
            proc = p
        case "with":
            need(2)
            (s1, p), (s2, q) = prem
            u, v = k["u"], k["v"]
            xs, ys = _nm(k["left"]), _nm(k["right"])
            e1, r1 = _take(s1, xs)
            e2, r2 = _take(s2, ys)
            if not sequent_equal(r1, r2):
                raise RuleError("with: the two premises must share their context")
            seq = r1 + (Entry((u, v), With(Down(e1.formula), Down(e2.formula))),)
            proc = Choice(((Prefix(False, u, xs), p), (Prefix(False, v, ys), q)))
        case _:
            raise RuleError(f"unknown rule {rule!r}")
    check_sequent(seq, ctx)
    return seq, proc


# -- serialization -------------------------------------------------------------------

_FORMULA_PARAMS = {"formula", "body", "witness", "other"}


def dump_derivation(d: Derivation, indent: int = 0) -> str:
    params = {}
    for key, val in d.params.items():
        if key in _FORMULA_PARAMS:
            params[key] = show_formula(val)
        elif isinstance(val, (tuple, list)):
            params[key] = [list(v) if isinstance(v, tuple) else v for v in val]
        else:
            params[key] = val
    lines = ["  " * indent + d.rule + " " + json.dumps(params, ensure_ascii=False, sort_keys=True)]
    for p in d.premises:
        lines.append(dump_derivation(p, indent + 1))
    return "\n".join(lines)


def load_derivation(text: str) -> Derivation:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        depth = (len(line) - len(line.lstrip(" "))) // 2
        rule, _, rest = line.strip().partition(" ")
        params = json.loads(rest) if rest else {}
        for key in list(params):
            if key in _FORMULA_PARAMS:
                params[key] = parse_formula(params[key])
            elif isinstance(params[key], list):
                params[key] = tuple(tuple(v) if isinstance(v, list) else v for v in params[key])
        rows.append((depth, rule, params))
    pos = 0

    def build(depth):
        nonlocal pos
        d0, rule, params = rows[pos]
        if d0 != depth:
            raise ValueError(f"bad indentation at line {pos + 1}")
        pos += 1
        kids = []
        while pos < len(rows) and rows[pos][0] == depth + 1:
            kids.append(build(depth + 1))
        return Derivation(rule, params, tuple(kids))

    d = build(0)
    if pos != len(rows):
        raise ValueError("trailing lines after derivation")
    return d
