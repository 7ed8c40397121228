"""Second-order lambda-mu terms with products and sums.

Terms are Church-style: lambda binders carry their type, and the quantifier
rules appear as explicit ``TyAbs``/``TyApp`` nodes.  Lambda variables and
mu variables live in separate namespaces but are drawn from the same pool of
strings; ``uniquify`` keeps every binder distinct so that the translation into
processes never confuses them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from lampi.names import fresh, reserve


# -- types -----------------------------------------------------------------------

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "Type2"
    cod: "Type2"


@dataclass(frozen=True)
class ForallT:
    var: str
    body: "Type2"


@dataclass(frozen=True)
class Product:
    left: "Type2"
    right: "Type2"


@dataclass(frozen=True)
class Sum:
    left: "Type2"
    right: "Type2"


Type2 = Union[TVar, Arrow, ForallT, Product, Sum]


def type_free_vars(a: Type2) -> frozenset:
    match a:
        case TVar(x):
            return frozenset((x,))
        case ForallT(x, b):
            return type_free_vars(b) - {x}
        case Arrow(l, r) | Product(l, r) | Sum(l, r):
            return type_free_vars(l) | type_free_vars(r)
    raise TypeError(a)


def subst_type(a: Type2, x: str, b: Type2) -> Type2:
    match a:
        case TVar(y):
            return b if y == x else a
        case ForallT(y, body):
            if y == x:
                return a
            if y in type_free_vars(b):
                y2 = fresh(y)
                body = subst_type(body, y, TVar(y2))
                y = y2
            return ForallT(y, subst_type(body, x, b))
        case Arrow(l, r) | Product(l, r) | Sum(l, r):
            return type(a)(subst_type(l, x, b), subst_type(r, x, b))
    raise TypeError(a)


def type_key(a: Type2, env=None, depth=0):
    env = env or {}
    match a:
        case TVar(x):
            return ("v", env.get(x, x))
        case ForallT(x, b):
            return ("A", type_key(b, {**env, x: depth}, depth + 1))
        case Arrow(l, r) | Product(l, r) | Sum(l, r):
            return (type(a).__name__, type_key(l, env, depth), type_key(r, env, depth))
    raise TypeError(a)


def type_equal(a: Type2, b: Type2) -> bool:
    return type_key(a) == type_key(b)


def is_simple(a: Type2) -> bool:
    match a:
        case TVar():
            return True
        case Arrow(l, r):
            return is_simple(l) and is_simple(r)
    return False


# -- terms -----------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    var: str
    ann: Type2
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Mu:
    alpha: str
    beta: str
    body: "Term"
    ann: Optional[Type2] = field(default=None, compare=False)


@dataclass(frozen=True)
class TyAbs:
    var: str
    body: "Term"


@dataclass(frozen=True)
class TyApp:
    term: "Term"
    ty: Type2


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LetPair:
    x: str
    y: str
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class Inj:
    index: int
    term: "Term"
    ann: Optional[Type2] = field(default=None, compare=False)


@dataclass(frozen=True)
class Case:
    scrutinee: "Term"
    x1: str
    n1: "Term"
    x2: str
    n2: "Term"


Term = Union[Var, Abs, App, Mu, TyAbs, TyApp, Pair, LetPair, Inj, Case]


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def spine(m: Term):
    """Split ``(h)M1...Mn`` into ``h`` and ``[M1..Mn]``."""
    args = []
    while isinstance(m, App):
        args.append(m.arg)
        m = m.fun
    return m, args[::-1]


# -- free variables and substitution ----------------------------------------------

def free_vars(m: Term) -> frozenset:
    """Free lambda variables."""
    match m:
        case Var(x):
            return frozenset((x,))
        case Abs(x, _, b):
            return free_vars(b) - {x}
        case App(f, a) | Pair(f, a):
            return free_vars(f) | free_vars(a)
        case Mu(_, _, b) | TyAbs(_, b) | TyApp(b, _) | Inj(_, b):
            return free_vars(b)
        case LetPair(x, y, b, n):
            return free_vars(b) | (free_vars(n) - {x, y})
        case Case(s, x1, n1, x2, n2):
            return free_vars(s) | (free_vars(n1) - {x1}) | (free_vars(n2) - {x2})
    return _ext_free(m, "lam")


def free_mu(m: Term) -> frozenset:
    """Free mu variables."""
    match m:
        case Var():
            return frozenset()
        case Mu(a, b, body):
            return (free_mu(body) | {b}) - {a}
        case Abs(_, _, b) | TyAbs(_, b) | TyApp(b, _) | Inj(_, b):
            return free_mu(b)
        case App(f, a) | Pair(f, a) | LetPair(_, _, f, a):
            return free_mu(f) | free_mu(a)
        case Case(s, _, n1, _, n2):
            return free_mu(s) | free_mu(n1) | free_mu(n2)
    return _ext_free(m, "mu")


# Machine-only constructors register themselves here so that generic
# traversals keep working on executables.
EXTENSIONS: dict = {}


def _ext_free(m, kind):
    h = EXTENSIONS.get(type(m))
    if h is None:
        raise TypeError(m)
    return h.free(m, kind)


def term_free_tyvars(m: Term) -> frozenset:
    match m:
        case Var():
            return frozenset()
        case Abs(_, a, b):
            return type_free_vars(a) | term_free_tyvars(b)
        case TyAbs(x, b):
            return term_free_tyvars(b) - {x}
        case TyApp(b, a):
            return term_free_tyvars(b) | type_free_vars(a)
        case Mu(_, _, b, ann) | Inj(_, b, ann):
            return term_free_tyvars(b) | (type_free_vars(ann) if ann else frozenset())
        case App(f, a) | Pair(f, a) | LetPair(_, _, f, a):
            return term_free_tyvars(f) | term_free_tyvars(a)
        case Case(s, _, n1, _, n2):
            return term_free_tyvars(s) | term_free_tyvars(n1) | term_free_tyvars(n2)
    raise TypeError(m)


def subst(m: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``m[n/x]`` for a lambda variable ``x``."""
    fv = free_vars(n)
    fm = free_mu(n)

    def rebind(v, body, avoid):
        if v in avoid:
            v2 = fresh(v)
            return v2, rename_var(body, v, v2)
        return v, body

    def go(t):
        match t:
            case Var(y):
                return n if y == x else t
            case Abs(y, a, b):
                if y == x:
                    return t
                y, b = rebind(y, b, fv)
                return Abs(y, a, go(b))
            case App(f, a):
                return App(go(f), go(a))
            case Mu(a, b, body, ann):
                if a in fm:
                    a2 = fresh(a)
                    body = rename_mu(body, a, a2)
                    b = a2 if b == a else b
                    a = a2
                return Mu(a, b, go(body), ann)
            case TyAbs(v, b):
                return TyAbs(v, go(b))
            case TyApp(b, a):
                return TyApp(go(b), a)
            case Pair(l, r):
                return Pair(go(l), go(r))
            case Inj(i, b, ann):
                return Inj(i, go(b), ann)
            case LetPair(y1, y2, b, body):
                b = go(b)
                if x in (y1, y2):
                    return LetPair(y1, y2, b, body)
                y1, body = rebind(y1, body, fv)
                y2, body = rebind(y2, body, fv)
                return LetPair(y1, y2, b, go(body))
            case Case(s, x1, n1, x2, n2):
                s = go(s)
                if x1 != x:
                    x1, n1 = rebind(x1, n1, fv)
                    n1 = go(n1)
                if x2 != x:
                    x2, n2 = rebind(x2, n2, fv)
                    n2 = go(n2)
                return Case(s, x1, n1, x2, n2)
        h = EXTENSIONS.get(type(t))
        if h is None:
            raise TypeError(t)
        return h.map(t, go)

    if x not in free_vars(m):
        return m
    return go(m)


def rename_var(m: Term, x: str, y: str) -> Term:
    return subst(m, x, Var(y))


def map_mu(m: Term, fn) -> Term:
    """Rewrite every ``mu a.[b] N`` site where ``b`` is free, via ``fn(b, N')``.

    ``fn`` returns ``(b2, N2)`` or ``None`` to keep the site.  Binders that
    shadow are respected; capture of mu binders must be handled by the caller.
    """
    def go(t, bound):
        match t:
            case Var():
                return t
            case Mu(a, b, body, ann):
                body = go(body, bound | {a})
                if b not in bound | {a}:
                    r = fn(b, body)
                    if r is not None:
                        b, body = r
                return Mu(a, b, body, ann)
            case Abs(y, a, b):
                return Abs(y, a, go(b, bound))
            case App(f, a):
                return App(go(f, bound), go(a, bound))
            case TyAbs(v, b):
                return TyAbs(v, go(b, bound))
            case TyApp(b, a):
                return TyApp(go(b, bound), a)
            case Pair(l, r):
                return Pair(go(l, bound), go(r, bound))
            case Inj(i, b, ann):
                return Inj(i, go(b, bound), ann)
            case LetPair(y1, y2, b, body):
                return LetPair(y1, y2, go(b, bound), go(body, bound))
            case Case(s, x1, n1, x2, n2):
                return Case(go(s, bound), x1, go(n1, bound), x2, go(n2, bound))
        h = EXTENSIONS.get(type(t))
        if h is None:
            raise TypeError(t)
        return h.map(t, lambda u: go(u, bound))

    return go(m, frozenset())


def rename_mu(m: Term, a: str, b: str) -> Term:
    """Rename free occurrences of the mu variable ``a`` to ``b``."""
    return map_mu(m, lambda beta, body: (b, body) if beta == a else None)


def subst_type_in_term(m: Term, x: str, b: Type2) -> Term:
    def ty(a):
        return subst_type(a, x, b) if a is not None else None

    def go(t):
        match t:
            case Var():
                return t
            case Abs(y, a, body):
                return Abs(y, ty(a), go(body))
            case App(f, a):
                return App(go(f), go(a))
            case Mu(a, beta, body, ann):
                return Mu(a, beta, go(body), ty(ann))
            case TyAbs(v, body):
                if v == x:
                    return t
                if v in type_free_vars(b):
                    v2 = fresh(v)
                    body = subst_type_in_term(body, v, TVar(v2))
                    v = v2
                return TyAbs(v, go(body))
            case TyApp(body, a):
                return TyApp(go(body), ty(a))
            case Pair(l, r):
                return Pair(go(l), go(r))
            case Inj(i, body, ann):
                return Inj(i, go(body), ty(ann))
            case LetPair(y1, y2, bd, body):
                return LetPair(y1, y2, go(bd), go(body))
            case Case(s, x1, n1, x2, n2):
                return Case(go(s), x1, go(n1), x2, go(n2))
        h = EXTENSIONS.get(type(t))
        if h is None:
            raise TypeError(t)
        return h.map(t, go)

    return go(m)


def uniquify(m: Term, avoid=()) -> Term:
    """Rename binders (lambda and mu alike) apart from each other and from free names."""
    used = set(free_vars(m)) | set(free_mu(m)) | set(avoid)

    def pick(v):
        v2 = fresh(v) if v in used else v
        used.add(v2)
        return v2

    def go(t, env, menv):
        match t:
            case Var(x):
                return Var(env.get(x, x))
            case Abs(x, a, b):
                x2 = pick(x)
                return Abs(x2, a, go(b, {**env, x: x2}, menv))
            case App(f, a):
                return App(go(f, env, menv), go(a, env, menv))
            case Mu(a, b, body, ann):
                a2 = pick(a)
                menv2 = {**menv, a: a2}
                return Mu(a2, menv2.get(b, b), go(body, env, menv2), ann)
            case TyAbs(v, b):
                return TyAbs(v, go(b, env, menv))
            case TyApp(b, a):
                return TyApp(go(b, env, menv), a)
            case Pair(l, r):
                return Pair(go(l, env, menv), go(r, env, menv))
            case Inj(i, b, ann):
                return Inj(i, go(b, env, menv), ann)
            case LetPair(y1, y2, b, body):
                b = go(b, env, menv)
                z1, z2 = pick(y1), pick(y2)
                return LetPair(z1, z2, b, go(body, {**env, y1: z1, y2: z2}, menv))
            case Case(s, x1, n1, x2, n2):
                s = go(s, env, menv)
                z1 = pick(x1)
                n1 = go(n1, {**env, x1: z1}, menv)
                z2 = pick(x2)
                return Case(s, z1, n1, z2, go(n2, {**env, x2: z2}, menv))
        h = EXTENSIONS.get(type(t))
        if h is None:
            raise TypeError(t)
        return h.uniquify(t, lambda u: go(u, env, menv), env, menv)

    return go(m, {}, {})


def term_key(m: Term, env=None, depth=0):
    """Key for alpha-equality of terms (binder names and annotations on mu/inj ignored)."""
    env = env or {}

    def nk(x):
        return env.get(x, ("f", x))

    def bind(*xs):
        e = dict(env)
        for i, x in enumerate(xs):
            e[x] = ("b", depth + i)
        return e

    match m:
        case Var(x):
            return ("v", nk(x))
        case Abs(x, a, b):
            return ("lam", type_key(a), term_key(b, bind(x), depth + 1))
        case App(f, a):
            return ("app", term_key(f, env, depth), term_key(a, env, depth))
        case Mu(a, b, body):
            e = bind(a)
            return ("mu", e.get(b, ("f", b)), term_key(body, e, depth + 1))
        case TyAbs(v, b):
            return ("Lam", term_key(subst_type_in_term(b, v, TVar(f"#{depth}")), env, depth + 1))
        case TyApp(b, a):
            return ("tapp", term_key(b, env, depth), type_key(a))
        case Pair(l, r):
            return ("pair", term_key(l, env, depth), term_key(r, env, depth))
        case Inj(i, b):
            return ("inj", i, term_key(b, env, depth))
        case LetPair(y1, y2, b, body):
            return ("let", term_key(b, env, depth), term_key(body, bind(y1, y2), depth + 2))
        case Case(s, x1, n1, x2, n2):
            return ("case", term_key(s, env, depth), term_key(n1, bind(x1), depth + 1),
                    term_key(n2, bind(x2), depth + 1))
    h = EXTENSIONS.get(type(m))
    if h is None:
        raise TypeError(m)
    return h.key(m, env, depth)


def alpha_equal_terms(m: Term, n: Term) -> bool:
    return term_key(m) == term_key(n)


def term_size(m: Term) -> int:
    match m:
        case Var():
            return 1
        case Abs(_, _, b) | Mu(_, _, b) | TyAbs(_, b) | TyApp(b, _) | Inj(_, b):
            return 1 + term_size(b)
        case App(f, a) | Pair(f, a) | LetPair(_, _, f, a):
            return 1 + term_size(f) + term_size(a)
        case Case(s, _, n1, _, n2):
            return 1 + term_size(s) + term_size(n1) + term_size(n2)
    raise TypeError(m)


# -- typing --------------------------------------------------------------------------

class LamTypeError(TypeError):
    pass


class _Slot:
    """Type of a mu variable not yet determined by any of its uses."""
    def __init__(self, name):
        self.name = name
        self.ty = None


def typecheck(gamma: dict, m: Term, delta: Optional[dict] = None, tyvars=frozenset()) -> Type2:
    """Return ``A`` such that ``gamma |- m : A | delta``.

    Free mu variables missing from ``delta`` get their type from their first
    use and are added to ``delta`` in place.
    """
    if delta is None:
        delta = {}
    slots = {}
    for b in free_mu(m):
        if b not in delta:
            slots[b] = _Slot(b)
    env_mu = {**{k: v for k, v in delta.items()}, **slots}
    for x in free_vars(m):
        if x not in gamma:
            raise LamTypeError(f"unbound variable {x}")
    clash = set(gamma) & set(env_mu)
    if clash:
        raise LamTypeError(f"names used both as lambda and mu variables: {sorted(clash)}")
    a = _Checker(frozenset(tyvars)).infer(dict(gamma), m, env_mu)
    for b, s in slots.items():
        if s.ty is None:
            raise LamTypeError(f"cannot determine the type of mu variable {b}")
        delta[b] = s.ty
    return a


class _Checker:
    def __init__(self, tyvars):
        self.tyvars = tyvars

    def mu_type(self, delta, b, t):
        cur = delta.get(b)
        if b not in delta:
            raise LamTypeError(f"unbound mu variable {b}")
        if isinstance(cur, _Slot):
            if cur.ty is None:
                cur.ty = t
                return
            cur = cur.ty
        if not type_equal(cur, t):
            raise LamTypeError(f"mu variable {b} has type {show_type(cur)}, used at {show_type(t)}")

    def check(self, g, m, d, expected):
        match m:
            case Mu(a, b, body, ann):
                if ann is not None and not type_equal(ann, expected):
                    raise LamTypeError(f"annotation {show_type(ann)} differs from expected {show_type(expected)}")
                slot = _Slot(a)
                slot.ty = expected
                t = self.infer(g, body, {**d, a: slot})
                self.mu_type({**d, a: slot}, b, t)
                return expected
            case Inj(i, body, ann) if ann is None:
                if not isinstance(expected, Sum):
                    raise LamTypeError(f"injection checked against non-sum {show_type(expected)}")
                part = expected.left if i == 1 else expected.right
                self.check(g, body, d, part)
                return expected
            case Pair(l, r) if isinstance(expected, Product):
                self.check(g, l, d, expected.left)
                self.check(g, r, d, expected.right)
                return expected
        t = self.infer(g, m, d)
        if not type_equal(t, expected):
            raise LamTypeError(f"expected {show_type(expected)}, got {show_type(t)} for {show_term(m)}")
        return t

    def infer(self, g, m, d):
        match m:
            case Var(x):
                if x not in g:
                    raise LamTypeError(f"unbound variable {x}")
                return g[x]
            case Abs(x, a, body):
                return Arrow(a, self.infer({**g, x: a}, body, d))
            case App(f, a):
                tf = self.infer(g, f, d)
                if not isinstance(tf, Arrow):
                    raise LamTypeError(f"applying a non-function of type {show_type(tf)}")
                self.check(g, a, d, tf.dom)
                return tf.cod
            case Mu(a, b, body, ann):
                slot = _Slot(a)
                slot.ty = ann
                d2 = {**d, a: slot}
                t = self.infer(g, body, d2)
                self.mu_type(d2, b, t)
                if slot.ty is None:
                    raise LamTypeError(f"cannot determine the type of mu variable {a}; annotate it")
                return slot.ty
            case TyAbs(x, body):
                for t in list(g.values()) + [s.ty if isinstance(s, _Slot) else s for s in d.values()]:
                    if t is not None and x in type_free_vars(t):
                        raise LamTypeError(f"type variable {x} is free in the context")
                return ForallT(x, self.infer(g, body, d))
            case TyApp(body, b):
                t = self.infer(g, body, d)
                if not isinstance(t, ForallT):
                    raise LamTypeError(f"type application to non-polymorphic {show_type(t)}")
                return subst_type(t.body, t.var, b)
            case Pair(l, r):
                return Product(self.infer(g, l, d), self.infer(g, r, d))
            case LetPair(x, y, b, body):
                t = self.infer(g, b, d)
                if not isinstance(t, Product):
                    raise LamTypeError(f"let-pair on non-product {show_type(t)}")
                return self.infer({**g, x: t.left, y: t.right}, body, d)
            case Inj(i, body, ann):
                if ann is None:
                    raise LamTypeError("cannot infer the type of an unannotated injection")
                return self.check(g, m.__class__(i, body), d, ann)
            case Case(s, x1, n1, x2, n2):
                t = self.infer(g, s, d)
                if not isinstance(t, Sum):
                    raise LamTypeError(f"case on non-sum {show_type(t)}")
                c = self.infer({**g, x1: t.left}, n1, d)
                self.check({**g, x2: t.right}, n2, d, c)
                return c
        raise LamTypeError(f"not a source term: {m!r}")


# -- sigma-equivalence and head linear reduction ---------------------------------------

def is_pure(m: Term) -> bool:
    match m:
        case Var():
            return True
        case Abs(_, _, b):
            return is_pure(b)
        case App(f, a):
            return is_pure(f) and is_pure(a)
    return False


@dataclass(frozen=True)
class HeadForm:
    """``\\x1..xk.(\\y1..yn.(h)M1..Mp)N1..Nn``.

    ``inner`` and ``pending`` form a telescope: ``pending[j]`` lies in the
    scope of ``inner[:j]``.  Binders are ``(name, annotation)`` pairs.
    """
    outer: tuple
    inner: tuple
    head: str
    args: tuple
    pending: tuple

    def to_term(self) -> Term:
        body = app(Var(self.head), *self.args)
        return self._wrap(body)

    def _wrap(self, body):
        for (y, a), n in reversed(list(zip(self.inner, self.pending))):
            body = App(Abs(y, a, body), n)
        for x, a in reversed(self.outer):
            body = Abs(x, a, body)
        return body


def sigma_normalize(m: Term) -> HeadForm:
    if not is_pure(m):
        raise ValueError("sigma-normal forms are defined on pure lambda terms")
    h = _nf(uniquify(m))
    # sigma-equivalence is a congruence, so arguments are normalized as well
    return HeadForm(h.outer, h.inner, h.head,
                    tuple(sigma_normalize(a).to_term() for a in h.args),
                    tuple(sigma_normalize(n).to_term() for n in h.pending))


def _nf(m):
    match m:
        case Var(x):
            return HeadForm((), (), x, (), ())
        case Abs(x, a, b):
            h = _nf(b)
            return HeadForm(((x, a),) + h.outer, h.inner, h.head, h.args, h.pending)
        case App(f, a):
            h = _nf(f)
            if not h.outer:
                return HeadForm((), h.inner, h.head, h.args + (a,), h.pending)
            return HeadForm(h.outer[1:], (h.outer[0],) + h.inner, h.head, h.args, (a,) + h.pending)
    raise TypeError(m)


def headform_key(h: HeadForm):
    return term_key(h.to_term())


def sigma_rewrites(m: Term) -> list:
    """Every term reached from ``m`` by one left-to-right use of a sigma generator.

    The generators are ``(\\x.M)N P = (\\x.(M)P)N`` and ``(\\x y.M)N = \\y.(\\x.M)N``.
    """
    m = uniquify(m)
    out = []
    match m:
        case App(App(Abs(x, a, body), n), p):
            out.append(App(Abs(x, a, App(body, p)), n))
        case App(Abs(x, a, Abs(y, b, body)), n):
            out.append(Abs(y, b, App(Abs(x, a, body), n)))
    match m:
        case Abs(x, a, body):
            out += [Abs(x, a, b) for b in sigma_rewrites(body)]
        case App(f, n):
            out += [App(g, n) for g in sigma_rewrites(f)]
            out += [App(f, k) for k in sigma_rewrites(n)]
    return out


def hlr_step(h: HeadForm) -> Optional[HeadForm]:
    names = [y for y, _ in h.inner]
    if h.head not in names:
        return None
    i = names.index(h.head)
    body = app(h.pending[i], *h.args)
    return sigma_normalize(h._wrap(body))


def hlr_run(m: Term, limit: int = 10_000):
    """The head linear reduction sequence from ``m`` (list of head forms)."""
    h = sigma_normalize(m)
    seq = [h]
    for _ in range(limit):
        h = hlr_step(h)
        if h is None:
            return seq
        seq.append(h)
    raise RuntimeError(f"head linear reduction did not stop within {limit} steps")


# -- concrete syntax -------------------------------------------------------------------

_PREC_T = {ForallT: 0, Arrow: 1, Sum: 2, Product: 3, TVar: 4}


def show_type(a: Type2, prec: int = 0) -> str:
    match a:
        case TVar(x):
            s = x
        case ForallT(x, b):
            s = f"forall {x}. {show_type(b, 0)}"
        case Arrow(l, r):
            s = f"{show_type(l, 2)} -> {show_type(r, 1)}"
        case Sum(l, r):
            s = f"{show_type(l, 2)} + {show_type(r, 3)}"
        case Product(l, r):
            s = f"{show_type(l, 3)} * {show_type(r, 4)}"
        case _:
            raise TypeError(a)
    return f"({s})" if _PREC_T[type(a)] < prec else s


def show_term(m: Term, prec: int = 0) -> str:
    match m:
        case Var(x):
            return x
        case Abs(x, a, b):
            s = f"\\{x}:{show_type(a, 1)}. {show_term(b, 0)}"
        case Mu(a, b, body, ann):
            head = f"mu {a}:{show_type(ann, 1)}" if ann is not None else f"mu {a}"
            s = f"{head}.[{b}] {show_term(body, 0)}"
        case TyAbs(x, b):
            s = f"/\\{x}. {show_term(b, 0)}"
        case LetPair(x, y, b, body):
            s = f"let ({x},{y}) = {show_term(b, 0)} in {show_term(body, 0)}"
        case Case(sc, x1, n1, x2, n2):
            s = f"case {show_term(sc, 0)} of inj1 {x1} -> {show_term(n1, 0)} | inj2 {x2} -> {show_term(n2, 0)}"
        case App(f, a):
            s = f"{show_term(f, 1)} {show_term(a, 2)}"
            return f"({s})" if prec > 1 else s
        case TyApp(b, a):
            s = f"{show_term(b, 1)} [{show_type(a)}]"
            return f"({s})" if prec > 1 else s
        case Pair(l, r):
            return f"({show_term(l)}, {show_term(r)})"
        case Inj(i, b, ann):
            ann_s = f" [{show_type(ann)}]" if ann is not None else ""
            return f"inj{i}{ann_s} {show_term(b, 2)}"
        case _:
            h = EXTENSIONS.get(type(m))
            if h is None:
                raise TypeError(m)
            return h.show(m, prec)
    return f"({s})" if prec > 0 else s


class TermSyntaxError(ValueError):
    pass


_LTOK = re.compile(r"\s*(->|/\\|\\|[A-Za-z_][A-Za-z0-9_]*|[().,:\[\]*+|=])")
_UNICODE = {"λ": "\\", "Λ": "/\\", "μ": "mu ", "→": "->", "∀": "forall ", "×": "*"}
_KEYWORDS = {"mu", "let", "in", "case", "of", "inj1", "inj2", "forall"}


def _lex(src: str) -> list:
    for k, v in _UNICODE.items():
        src = src.replace(k, v)
    toks = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _LTOK.match(src, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character at {pos}: {src[pos:pos + 10]!r}")
        toks.append(m.group(1))
        pos = m.end()
    return toks


class _TermParser:
    def __init__(self, src):
        self.toks = _lex(src)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def eat(self, t=None):
        tok = self.peek()
        if tok is None or (t is not None and tok != t):
            raise TermSyntaxError(f"expected {t!r}, got {tok!r}")
        self.i += 1
        return tok

    def ident(self):
        t = self.eat()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t) or t in _KEYWORDS:
            raise TermSyntaxError(f"expected an identifier, got {t!r}")
        if t == "omega":
            raise TermSyntaxError("'omega' is reserved for probes")
        reserve(t)
        return t

    # types
    def type_(self):
        if self.peek() == "forall":
            self.eat()
            x = self.ident()
            self.eat(".")
            return ForallT(x, self.type_())
        return self.arrow()

    def arrow(self):
        left = self.sum_()
        if self.peek() == "->":
            self.eat()
            if self.peek() == "forall":
                return Arrow(left, self.type_())
            return Arrow(left, self.arrow())
        return left

    def sum_(self):
        t = self.prod()
        while self.peek() == "+":
            self.eat()
            t = Sum(t, self.prod())
        return t

    def prod(self):
        t = self.tatom()
        while self.peek() == "*":
            self.eat()
            t = Product(t, self.tatom())
        return t

    def tatom(self):
        if self.peek() == "(":
            self.eat("(")
            t = self.type_()
            self.eat(")")
            return t
        return TVar(self.ident())

    # terms
    def term(self):
        t = self.peek()
        if t == "\\":
            self.eat()
            x = self.ident()
            self.eat(":")
            a = self.arrow()
            self.eat(".")
            return Abs(x, a, self.term())
        if t == "/\\":
            self.eat()
            x = self.ident()
            self.eat(".")
            return TyAbs(x, self.term())
        if t == "mu":
            self.eat()
            a = self.ident()
            ann = None
            if self.peek() == ":":
                self.eat(":")
                ann = self.arrow()
            self.eat(".")
            self.eat("[")
            b = self.ident()
            self.eat("]")
            return Mu(a, b, self.term(), ann)
        if t == "let":
            self.eat()
            self.eat("(")
            x = self.ident()
            self.eat(",")
            y = self.ident()
            self.eat(")")
            self.eat("=")
            b = self.term()
            self.eat("in")
            return LetPair(x, y, b, self.term())
        if t == "case":
            self.eat()
            s = self.term()
            self.eat("of")
            self.eat("inj1")
            x1 = self.ident()
            self.eat("->")
            n1 = self.term()
            self.eat("|")
            self.eat("inj2")
            x2 = self.ident()
            self.eat("->")
            return Case(s, x1, n1, x2, self.term())
        return self.application()

    def starts_atom(self):
        t = self.peek()
        if t is None:
            return False
        return t in ("(", "inj1", "inj2", "\\", "/\\", "mu", "let", "case") or (
            re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", t) is not None and t not in _KEYWORDS)

    def application(self):
        f = self.atom()
        while True:
            if self.peek() == "[":
                self.eat("[")
                a = self.type_()
                self.eat("]")
                f = TyApp(f, a)
            elif self.peek() in ("\\", "/\\", "mu", "let", "case"):
                return App(f, self.term())
            elif self.starts_atom():
                f = App(f, self.atom())
            else:
                return f

    def atom(self):
        t = self.peek()
        if t == "(":
            self.eat("(")
            m = self.term()
            if self.peek() == ",":
                self.eat(",")
                n = self.term()
                self.eat(")")
                return Pair(m, n)
            self.eat(")")
            return m
        if t in ("inj1", "inj2"):
            self.eat()
            ann = None
            if self.peek() == "[":
                self.eat("[")
                ann = self.type_()
                self.eat("]")
            return Inj(int(t[-1]), self.atom(), ann)
        return Var(self.ident())


def parse_term(src: str) -> Term:
    p = _TermParser(src)
    m = p.term()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input at {p.peek()!r}")
    return m


def parse_type(src: str) -> Type2:
    p = _TermParser(src)
    a = p.type_()
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input at {p.peek()!r}")
    return a
