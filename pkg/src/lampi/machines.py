"""Call-by-name and call-by-value executables and their translations into processes.

A CBN executable is ``M * K`` with ``K = N1 ... Nk a``; the machine-only term ``#M``
marks a delayed argument.  A CBV executable is ``K * M`` with ``K`` a stack of
function frames ``[M]f`` and argument frames ``[V]a`` over a base mu-variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from lampi import lam_mu
from lampi.lam_mu import (
    Abs, App, Case, Inj, LetPair, Mu, Pair, Term, TyAbs, TyApp, Var, free_mu, free_vars,
    show_term, subst,
)
from lampi.lla import dual_word
from lampi.names import fresh
from lampi.pi.syntax import Choice, Prefix, Process, fusions, new, par, substitute
from lampi.translate import (
    TransPair, TranslationError, coprotocol, prepare, protocol, translate_general,
)


class MachineError(ValueError):
    pass


# -- machine-only terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Sharp:
    term: Term


@dataclass(frozen=True)
class Dot:
    fun: Term
    arg: Term


@dataclass(frozen=True)
class MuK:
    alpha: str
    cont: "CbvCont"
    body: Term


@dataclass(frozen=True)
class LetFrame:
    x: str
    y: str
    body: Term


@dataclass(frozen=True)
class CaseFrame:
    x1: str
    n1: Term
    x2: str
    n2: Term


@dataclass(frozen=True)
class FunFrame:
    term: Term


@dataclass(frozen=True)
class ArgFrame:
    value: Term


@dataclass(frozen=True)
class CbvCont:
    base: str
    frames: tuple = ()          # bottom first, the top frame is last

    def push(self, f) -> "CbvCont":
        return CbvCont(self.base, self.frames + (f,))

    def pop(self):
        return self.frames[-1], CbvCont(self.base, self.frames[:-1])


@dataclass(frozen=True)
class CbnExec:
    term: Term
    stack: tuple                # arguments and LET/CASE frames, next one first
    alpha: str


@dataclass(frozen=True)
class CbvExec:
    cont: CbvCont
    term: Term


Executable = Union[CbnExec, CbvExec]


def is_value(m: Term) -> bool:
    return isinstance(m, (Var, Abs))


# -- generic traversals for the machine-only terms ----------------------------------------

def _frame_terms(f):
    match f:
        case LetFrame(_, _, b) | FunFrame(b) | ArgFrame(b):
            return (b,)
        case CaseFrame(_, n1, _, n2):
            return (n1, n2)
    return (f,)


def _frame_bound(f):
    match f:
        case LetFrame(x, y, _):
            return {x, y}
        case CaseFrame(x1, _, x2, _):
            return {x1, x2}
    return set()


def _map_frame(f, go):
    match f:
        case LetFrame(x, y, b):
            return LetFrame(x, y, go(b))
        case CaseFrame(x1, n1, x2, n2):
            return CaseFrame(x1, go(n1), x2, go(n2))
        case FunFrame(b):
            return FunFrame(go(b))
        case ArgFrame(b):
            return ArgFrame(go(b))
    return go(f)


def _cont_free(k: CbvCont, kind):
    acc = set()
    for f in k.frames:
        for t in _frame_terms(f):
            acc |= lam_mu.free_mu(t) if kind == "mu" else lam_mu.free_vars(t)
    if kind == "mu":
        acc.add(k.base)
    return frozenset(acc)


class _SharpExt:
    @staticmethod
    def free(m, kind):
        return free_mu(m.term) if kind == "mu" else free_vars(m.term)

    @staticmethod
    def map(m, go):
        return Sharp(go(m.term))

    uniquify = staticmethod(lambda m, go, env, menv: Sharp(go(m.term)))

    @staticmethod
    def key(m, env, depth):
        return ("sharp", lam_mu.term_key(m.term, env, depth))

    @staticmethod
    def show(m, prec):
        return "#" + show_term(m.term, 3)


class _DotExt:
    @staticmethod
    def free(m, kind):
        f = free_mu if kind == "mu" else free_vars
        return f(m.fun) | f(m.arg)

    @staticmethod
    def map(m, go):
        return Dot(go(m.fun), go(m.arg))

    uniquify = staticmethod(lambda m, go, env, menv: Dot(go(m.fun), go(m.arg)))

    @staticmethod
    def key(m, env, depth):
        return ("dot", lam_mu.term_key(m.fun, env, depth), lam_mu.term_key(m.arg, env, depth))

    @staticmethod
    def show(m, prec):
        s = show_term(m.fun, 3) + " @ " + show_term(m.arg, 3)
        return f"({s})" if prec > 0 else s


class _MuKExt:
    @staticmethod
    def free(m, kind):
        inner = free_mu(m.body) - {m.alpha} if kind == "mu" else free_vars(m.body)
        return inner | _cont_free(m.cont, kind)

    @staticmethod
    def map(m, go):
        return MuK(m.alpha, CbvCont(m.cont.base, tuple(_map_frame(f, go) for f in m.cont.frames)),
                   go(m.body))

    uniquify = staticmethod(lambda m, go, env, menv: _MuKExt.map(m, go))

    @staticmethod
    def key(m, env, depth):
        e = {**env, m.alpha: ("b", depth)}
        k = m.cont
        fr = tuple((type(f).__name__, lam_mu.term_key(_frame_terms(f)[0], env, depth)) for f in k.frames)
        return ("muk", env.get(k.base, ("f", k.base)), fr, lam_mu.term_key(m.body, e, depth + 1))

    @staticmethod
    def show(m, prec):
        s = f"mu {m.alpha}.[{show_cbv_cont(m.cont)}] {show_term(m.body, 0)}"
        return f"({s})" if prec > 0 else s


lam_mu.EXTENSIONS.update({Sharp: _SharpExt, Dot: _DotExt, MuK: _MuKExt})


# -- call-by-name -------------------------------------------------------------------------

def plug(n: Term, stack) -> Term:
    """The term ``(N)K`` for a stack of arguments and LET/CASE frames."""
    for f in stack:
        match f:
            case LetFrame(x, y, b):
                n = LetPair(x, y, n, b)
            case CaseFrame(x1, n1, x2, n2):
                n = Case(n, x1, n1, x2, n2)
            case _:
                n = App(n, f)
    return n


def _stack_names(stack, alpha) -> set:
    acc = {alpha}
    for f in stack:
        acc |= _frame_bound(f)
        for t in _frame_terms(f):
            acc |= free_vars(t) | free_mu(t)
    return acc


def subst_continuation(m: Term, beta: str, stack, alpha: str) -> Term:
    """``M[K/beta]``: every ``[beta]N`` becomes ``[alpha](N)K`` for ``K = stack alpha``."""
    if beta not in free_mu(m):
        return m
    m = _avoid_mu(m, _stack_names(stack, alpha))

    def fn(b, body):
        return (alpha, plug(body, stack)) if b == beta else (b, body)

    return lam_mu.map_mu(m, fn)


def _avoid_mu(m: Term, avoid: set) -> Term:
    """Rename mu-binders of ``m`` that clash with ``avoid``."""
    match m:
        case Mu(a, b, body, ann):
            body = _avoid_mu(body, avoid)
            if a in avoid:
                a2 = fresh(a)
                body, b = lam_mu.rename_mu(body, a, a2), (a2 if b == a else b)
                a = a2
            return Mu(a, b, body, ann)
        case Var():
            return m
        case MuK(a, k, body):
            body = _avoid_mu(body, avoid)
            if a in avoid:
                a2 = fresh(a)
                body, a = _cbv_subst_mu(body, a, CbvCont(a2)), a2
            return MuK(a, k, body)
    return _generic_map(m, lambda t: _avoid_mu(t, avoid))


def _generic_map(m: Term, go) -> Term:
    match m:
        case Abs(x, a, b):
            return Abs(x, a, go(b))
        case App(f, a):
            return App(go(f), go(a))
        case Mu(a, b, body, ann):
            return Mu(a, b, go(body), ann)
        case TyAbs(v, b):
            return TyAbs(v, go(b))
        case TyApp(b, a):
            return TyApp(go(b), a)
        case Pair(l, r):
            return Pair(go(l), go(r))
        case LetPair(x, y, b, body):
            return LetPair(x, y, go(b), go(body))
        case Inj(i, b, ann):
            return Inj(i, go(b), ann)
        case Case(s, x1, n1, x2, n2):
            return Case(go(s), x1, go(n1), x2, go(n2))
        case Var():
            return m
    return lam_mu.EXTENSIONS[type(m)].map(m, go)


def cbn_start(m: Term, alpha: str = "a") -> CbnExec:
    return CbnExec(prepare(m, alpha), (), alpha)


def cbn_normalize(e: CbnExec) -> CbnExec:
    """Apply the structural rules until the head is a variable or a constructor."""
    t, stack, alpha = e.term, e.stack, e.alpha
    while True:
        match t:
            case App(f, n):
                t, stack = f, (n,) + stack
            case LetPair(x, y, b, body):
                t, stack = b, (LetFrame(x, y, body),) + stack
            case Case(s, x1, n1, x2, n2):
                t, stack = s, (CaseFrame(x1, n1, x2, n2),) + stack
            case TyAbs(_, b) | TyApp(b, _):
                t = b
            case Mu(a, b, body):
                new_t = subst_continuation(body, a, stack, alpha)
                if b == a:
                    t = new_t
                else:
                    t, stack, alpha = new_t, (), b
            case _:
                return CbnExec(t, stack, alpha)


def cbn_step(e: CbnExec) -> Optional[tuple[str, CbnExec]]:
    """One execution step after normalization, with the rule name; None on terminals."""
    e = cbn_normalize(e)
    t, stack = e.term, e.stack
    match t:
        case Sharp(m):
            return "sharp", CbnExec(m, stack, e.alpha)
        case Abs(x, _, body) if stack and not isinstance(stack[0], (LetFrame, CaseFrame)):
            return "pop", CbnExec(subst(body, x, Sharp(stack[0])), stack[1:], e.alpha)
        case Pair(l, r) if stack and isinstance(stack[0], LetFrame):
            f = stack[0]
            body = subst(subst(f.body, f.x, Sharp(l)), f.y, Sharp(r))
            return "let", CbnExec(body, stack[1:], e.alpha)
        case Inj(i, m) if stack and isinstance(stack[0], CaseFrame):
            f = stack[0]
            x, n = (f.x1, f.n1) if i == 1 else (f.x2, f.n2)
            return "case", CbnExec(subst(n, x, Sharp(m)), stack[1:], e.alpha)
    return None


def cbn_terminal_shape(e: CbnExec) -> Optional[str]:
    e = cbn_normalize(e)
    match e.term:
        case Var():
            return "variable-head"
        case Abs() if not e.stack:
            return "abstraction-at-covariable"
        case Pair() | Inj() if not e.stack:
            return "constructor-at-covariable"
    return None


def check_mu_linear(m: Term) -> None:
    """Each mu-variable must be used exactly once (case branches count once)."""

    def count(t, a):
        match t:
            case Mu(b, c, body):
                inner = 0 if b == a else count(body, a)
                return inner + (c == a)
            case Var():
                return 0
            case Case(s, _, n1, _, n2):
                c1, c2 = count(n1, a), count(n2, a)
                if c1 != c2:
                    raise MachineError(f"mu-variable {a} is used unevenly across case branches")
                return count(s, a) + c1
        acc = [0]
        _generic_map(t, lambda u: (acc.__setitem__(0, acc[0] + count(u, a)), u)[1])
        return acc[0]

    def walk(t):
        if isinstance(t, Mu) and count(t.body, t.alpha) + (t.beta == t.alpha) != 1:
            raise MachineError(f"mu-variable {t.alpha} is not used linearly")
        _generic_map(t, lambda u: (walk(u), u)[1])

    walk(m)


# -- call-by-value ------------------------------------------------------------------------

def _cbv_subst_mu(m: Term, a: str, k: CbvCont) -> Term:
    """``M[K/a]`` for call-by-value: ``[a]N`` becomes ``[K]N``."""

    def cont(l: CbvCont) -> CbvCont:
        frames = tuple(_map_frame(f, go) for f in l.frames)
        if l.base == a:
            return CbvCont(k.base, k.frames + frames)
        return CbvCont(l.base, frames)

    def go(t):
        match t:
            case Mu(b, c, body, ann):
                if b == a:
                    return t
                body = go(body)
                return MuK(b, k, body) if c == a else Mu(b, c, body, ann)
            case MuK(b, l, body):
                return MuK(b, cont(l), t.body if b == a else go(body))
        return _generic_map(t, go)

    return go(m)


def cbv_subst_continuation(m: Term, a: str, k: CbvCont) -> Term:
    avoid = set(_cont_free(k, "lam")) | set(_cont_free(k, "mu"))
    return _cbv_subst_mu(_avoid_mu(m, avoid), a, k)


def cbv_start(m: Term, alpha: str = "a") -> CbvExec:
    return CbvExec(CbvCont(alpha), prepare(m, alpha))


def cbv_normalize(e: CbvExec) -> CbvExec:
    k, t = e.cont, e.term
    while True:
        match t:
            case App(f, n):
                k, t = k.push(FunFrame(f)), n
            case TyAbs(_, b) | TyApp(b, _):
                t = b
            case Mu(a, b, body):
                l = k if b == a else CbvCont(b)
                k, t = l, cbv_subst_continuation(body, a, k)
            case MuK(a, l, body):
                if l.base == a:
                    l = CbvCont(k.base, k.frames + l.frames)
                k, t = l, cbv_subst_continuation(body, a, k)
            case _:
                return CbvExec(k, t)


def cbv_step(e: CbvExec) -> Optional[tuple[str, CbvExec]]:
    e = cbv_normalize(e)
    k, t = e.cont, e.term
    if is_value(t) and k.frames:
        f, rest = k.pop()
        match f:
            case FunFrame(m):
                return "fun", CbvExec(rest.push(ArgFrame(t)), m)
            case ArgFrame(w):
                return "arg", CbvExec(rest, Dot(t, w))
    if isinstance(t, Dot) and isinstance(t.fun, Abs):
        lam = t.fun
        return "beta", CbvExec(k, subst(lam.body, lam.var, t.arg))
    if is_value(t) or isinstance(t, Dot) and isinstance(t.fun, Var):
        return None
    raise MachineError(f"stuck executable {show_exec(e)}")


def cbv_terminal_shape(e: CbvExec) -> Optional[str]:
    e = cbv_normalize(e)
    if is_value(e.term) and not e.cont.frames:
        return "value-at-covariable"
    if isinstance(e.term, Dot) and isinstance(e.term.fun, Var):
        return "variable-head"
    return None


# -- textual forms -------------------------------------------------------------------------

def _show_cbn_frame(f) -> str:
    match f:
        case LetFrame(x, y, b):
            return f"[let ({x},{y}) -> {show_term(b)}]"
        case CaseFrame(x1, n1, x2, n2):
            return f"[case {x1} -> {show_term(n1)} | {x2} -> {show_term(n2)}]"
    return show_term(f, 3)


def show_cbv_cont(k: CbvCont) -> str:
    parts = [k.base]
    for f in k.frames:
        tag = "f" if isinstance(f, FunFrame) else "a"
        parts.append(f"[{show_term(_frame_terms(f)[0])}]{tag}")
    return " ".join(parts)


def show_exec(e: Executable) -> str:
    if isinstance(e, CbnExec):
        k = " . ".join([_show_cbn_frame(f) for f in e.stack] + [e.alpha])
        return f"{show_term(e.term)} * {k}"
    return f"{show_cbv_cont(e.cont)} * {show_term(e.term)}"


# -- translations --------------------------------------------------------------------------

def _require(pair: TransPair, sides, what):
    if pair.orientation not in sides:
        raise TranslationError(f"{what} needs a {' or '.join(sides)}-handed pair, got {pair}")


def translate_cbn_term(m: Term, pair: TransPair, u: str) -> Process:
    def ext(t, u, tr):
        if isinstance(t, Sharp):
            x = fresh("x")
            return new((x,), par(tr(Var(x), u), _cbn_bind(x, t.term, pair, tr)))
        raise TranslationError(f"no call-by-name translation for {t!r}")

    return translate_general(m, pair, u, ext=ext)


def _cbn_bind(x, m, pair, tr) -> Process:
    v = fresh("u")
    return protocol(pair.delta_p, x, (v,), tr(m, v))


def _cbn_cont(stack, alpha, pair: TransPair, u: str) -> Process:
    if not stack:
        return fusions((alpha,), (u,))
    f, rest = stack[0], stack[1:]
    dd = dual_word(pair.delta)
    match f:
        case LetFrame(x, y, body):
            w = fresh("u")
            return new((w,), par(protocol(dd, u, (x, y), translate_cbn_term(body, pair, w)),
                                 _cbn_cont(rest, alpha, pair, w)))
        case CaseFrame(x1, n1, x2, n2):
            w, a, b = fresh("u"), fresh("a"), fresh("b")
            choice = Choice(((Prefix(False, a, (x1,)), translate_cbn_term(n1, pair, w)),
                             (Prefix(False, b, (x2,)), translate_cbn_term(n2, pair, w))))
            return new((w,), par(protocol(dd, u, (a, b), choice), _cbn_cont(rest, alpha, pair, w)))
    v, z = fresh("v"), fresh("z")
    bind = _cbn_bind(z, f, pair, lambda t, w: translate_cbn_term(t, pair, w))
    return new((v, z), par(coprotocol(dd, u, (z, v)), bind, _cbn_cont(rest, alpha, pair, v)))


def translate_exec_cbn(e: CbnExec, pair: TransPair) -> Process:
    _require(pair, ("left", "both"), "the call-by-name translation")
    u = fresh("u")
    return new((u,), par(translate_cbn_term(e.term, pair, u), _cbn_cont(e.stack, e.alpha, pair, u)))


class _CbvTranslator:
    def __init__(self, pair: TransPair):
        self.pair = pair

    def term(self, t, u) -> Process:
        g, gp = self.pair.gamma, self.pair.gamma_p
        match t:
            case Var() | Abs():
                x = fresh("x")
                return protocol(gp, u, (x,), self.bind(x, t))
            case App(f, n):
                v = fresh("v")
                return new((v,), par(self.cont(v, CbvCont(u, (FunFrame(f),))), self.term(n, v)))
            case Dot(vv, w):
                x, y = fresh("x"), fresh("y")
                return new((x, y), par(self.bind(x, vv), self.bind(y, w),
                                       coprotocol(dual_word(g), x, (y, u))))
            case Mu(a, b, body):
                return substitute(self.term(body, b), {a: u})
            case MuK(a, k, body):
                b = fresh("b")
                return substitute(new((b,), par(self.cont(b, k), self.term(body, b))), {a: u})
            case TyAbs(_, b) | TyApp(b, _):
                return self.term(b, u)
        raise TranslationError(f"no call-by-value translation for {t!r}")

    def bind(self, x, v) -> Process:
        """``[[x = V]]``."""
        match v:
            case Var(y):
                return fusions((x,), (y,))
            case Abs(y, _, body):
                w = fresh("u")
                return protocol(self.pair.gamma, x, (y, w), self.term(body, w))
            case TyAbs(_, b) | TyApp(b, _):
                return self.bind(x, b)
        raise TranslationError(f"not a value: {v!r}")

    def cont(self, a, k: CbvCont) -> Process:
        """``[[a = K]]``."""
        if not k.frames:
            return fusions((a,), (k.base,))
        f, rest = k.pop()
        v = fresh("v")
        dd = dual_word(self.pair.delta)
        match f:
            case FunFrame(m):
                x, w = fresh("x"), fresh("u")
                body = new((w,), par(self.term(m, w), coprotocol(dd, w, (x, v))))
                return new((v,), par(protocol(dual_word(self.pair.gamma_p), a, (x,), body),
                                     self.cont(v, rest)))
            case ArgFrame(val):
                x = fresh("x")
                return new((v, x), par(self.bind(x, val), coprotocol(dd, a, (x, v)), self.cont(v, rest)))
        raise TypeError(f)


def translate_cbv_term(m: Term, pair: TransPair, u: str) -> Process:
    return _CbvTranslator(pair).term(m, u)


def translate_cbv_cont(a: str, k: CbvCont, pair: TransPair) -> Process:
    return _CbvTranslator(pair).cont(a, k)


def translate_exec_cbv(e: CbvExec, pair: TransPair) -> Process:
    _require(pair, ("right", "both"), "the call-by-value translation")
    u = fresh("u")
    t = _CbvTranslator(pair)
    return new((u,), par(t.cont(u, e.cont), t.term(e.term, u)))
