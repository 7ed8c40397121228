"""Modal translations of lambda-mu terms into processes, with typing certificates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from lampi import lla
from lampi.lam_mu import (
    Abs, App, Arrow, Case, ForallT, Inj, LamTypeError, LetPair, Mu, Pair, Product, Sum, TVar,
    TyAbs, TyApp, Type2, Var, free_mu, free_vars, rename_mu, rename_var,
    subst_type_in_term, typecheck, uniquify,
)
from lampi.lla import Entry, UniformArity, apply_word, dual, dual_word, parse_word
from lampi.names import fresh
from lampi.pi.syntax import (
    Choice, Prefix, Process, fusions, inp, new, out, par, rep, send,
    substitute,
)


class TranslationError(ValueError):
    pass


# -- translation pairs ---------------------------------------------------------------

@dataclass(frozen=True)
class TransPair:
    gamma: str
    delta: str
    logic: str                 # "classical" or "intuitionistic"
    orientation: str           # "left", "right" or "both"
    gamma_p: str               # gamma' with gamma' gamma = delta' delta
    delta_p: str

    @property
    def zeta(self) -> str:
        return self.gamma_p + self.gamma

    def __str__(self):
        return f"({self.gamma or 'ε'},{self.delta or 'ε'})"


def validate_pair(gamma: str, delta: str, logic: str = "classical") -> TransPair:
    gamma, delta = parse_word(gamma), parse_word(delta)
    if logic not in ("classical", "intuitionistic"):
        raise TranslationError(f"unknown logic {logic!r}")
    if not gamma or not delta:
        raise TranslationError("both modalities must be non-empty for polymorphism")
    if gamma == delta:
        orientation, gp, dp = "both", "", ""
    elif gamma.endswith(delta):
        orientation, gp, dp = "left", "", gamma[:-len(delta)]
    elif delta.endswith(gamma):
        orientation, gp, dp = "right", delta[:-len(gamma)], ""
    else:
        raise TranslationError(f"neither of {gamma}, {delta} is a suffix of the other")
    if gamma[0] != "!":
        raise TranslationError(f"gamma must start with '!', got {gamma}")
    if logic == "classical" and delta[0] != "?":
        raise TranslationError(f"classical translations need delta to start with '?', got {delta}")
    return TransPair(gamma, delta, logic, orientation, gp, dp)


PRESETS = {
    "cbn-classical": ("!?", "?", "classical"),
    "cbn-int": ("!↓", "↓", "intuitionistic"),
    "cbv-classical": ("!", "?!", "classical"),
    "cbv-int": ("!", "!", "intuitionistic"),
    "cbv-lin": ("!", "↑!", "intuitionistic"),
}
STRATEGIES = tuple(PRESETS) + ("simply-typed",)


def preset(name: str) -> TransPair:
    try:
        return validate_pair(*PRESETS[name])
    except KeyError:
        raise TranslationError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}") from None


# -- protocols ---------------------------------------------------------------------------

def protocol(word: str, u: str, binders, body: Process) -> Process:
    binders = tuple(binders)
    if not word:
        if len(binders) != 1:
            raise TranslationError("the empty protocol takes exactly one binder")
        return substitute(body, {binders[0]: u})
    if len(word) > 1:
        v = fresh("c")
        return protocol(word[0], u, (v,), protocol(word[1:], v, binders, body))
    match word:
        case "↓":
            return inp(u, binders, body)
        case "↑" | "?":
            return out(u, binders, body)
        case "!":
            return rep(u, binders, body)
    raise TranslationError(f"not a modality letter: {word!r}")


def coprotocol(word: str, u: str, payload) -> Process:
    """``word u<payload>``: the protocol ending in a fusion bundle."""
    payload = tuple(payload)
    ys = tuple(fresh("y") for _ in payload)
    return protocol(word, u, ys, fusions(payload, ys))


# -- type translations -------------------------------------------------------------------

def translate_type_simple(a: Type2) -> lla.Formula:
    match a:
        case TVar(x):
            return lla.Var(x)
        case Arrow(l, r):
            return lla.Parr(lla.WhyNot(dual(translate_type_simple(l))), translate_type_simple(r))
    raise TranslationError(f"not a simple type: {a}")


def simple_arity(a: Type2) -> int:
    return 1 + simple_arity(a.cod) if isinstance(a, Arrow) else 1


def translate_type_modal(a: Type2, pair: TransPair) -> lla.Formula:
    g, d = pair.gamma, pair.delta
    match a:
        case TVar(x):
            return lla.Var(x)
        case Arrow(l, r):
            return lla.Parr(apply_word(dual_word(g), dual(translate_type_modal(l, pair))),
                            apply_word(d, translate_type_modal(r, pair)))
        case ForallT(x, b):
            return lla.Forall(x, translate_type_modal(b, pair))
        case Product(l, r):
            return lla.Tensor(apply_word(g, translate_type_modal(l, pair)),
                              apply_word(g, translate_type_modal(r, pair)))
        case Sum(l, r):
            return lla.Plus(lla.Up(apply_word(g, translate_type_modal(l, pair))),
                            lla.Up(apply_word(g, translate_type_modal(r, pair))))
    raise TypeError(a)


def _hyp_formula(a: Type2, pair: TransPair):
    return apply_word(dual_word(pair.gamma), dual(translate_type_modal(a, pair)))


def _conc_formula(a: Type2, pair: TransPair):
    return apply_word(pair.delta, translate_type_modal(a, pair))


def build_theorem_sequent(gamma: dict, a: Type2, delta: dict, pair: TransPair, u: str) -> tuple:
    seq = [Entry((x,), _hyp_formula(b, pair)) for x, b in gamma.items()]
    seq.append(Entry((u,), _conc_formula(a, pair)))
    seq += [Entry((b,), _conc_formula(c, pair)) for b, c in delta.items()]
    return tuple(seq)


# -- simply typed translation ---------------------------------------------------------------

def translate_simply_typed(m, a: Type2, ys, gamma: Optional[dict] = None) -> Process:
    """The arity-based translation at type ``a`` on the channels ``ys``."""
    gamma = dict(gamma or {})
    ys = tuple(ys)
    if len(ys) != simple_arity(a):
        raise TranslationError(f"type {a} needs {simple_arity(a)} channels, got {len(ys)}")
    match m:
        case Var(x):
            return send(x, ys)
        case Abs(x, b, body):
            if not isinstance(a, Arrow):
                raise TranslationError("abstraction at a non-arrow type")
            p = translate_simply_typed(body, a.cod, ys[1:], {**gamma, x: b})
            return substitute(p, {x: ys[0]})
        case App(f, n):
            arg = typecheck(gamma, n)
            x = fresh("x")
            zs = tuple(fresh("z") for _ in range(simple_arity(arg)))
            left = translate_simply_typed(f, Arrow(arg, a), (x,) + ys, gamma)
            return new((x,), par(left, rep(x, zs, translate_simply_typed(n, arg, zs, gamma))))
    raise TranslationError(f"the simply typed translation covers pure terms only, got {m!r}")


# -- general translation ---------------------------------------------------------------------

def translate_general(m, pair: TransPair, u: str, forwarder: bool = False, ext=None) -> Process:
    """The translation at channel ``u`` (term binders are used as channel names).

    ``ext(t, u, tr)`` translates constructors unknown to the source calculus.
    """
    d, gp, dp = pair.delta, pair.gamma_p, pair.delta_p

    def tr(t, u):
        match t:
            case Var(x):
                if pair.orientation == "both":
                    return fusions((u,), (x,))
                if pair.orientation == "left":
                    return coprotocol(dual_word(dp), x, (u,))
                return coprotocol(gp, u, (x,))
            case Abs(x, _, body):
                v = fresh("v")
                return protocol(d, u, (x, v), tr(body, v))
            case App(f, n):
                z, x, v, w = fresh("z"), fresh("x"), fresh("v"), fresh("w")
                if forwarder and pair.orientation == "left" and pair.logic == "classical":
                    y, a, b = fresh("y"), fresh("a"), fresh("b")
                    xx = fresh("x")
                    call = protocol(dual_word(d), v, (xx, y),
                                    par(fusions((x,), (xx,)), rep(y, (a, b), send(u, (a, b)))))
                else:
                    call = coprotocol(dual_word(d), v, (x, u))
                left = protocol(dual_word(gp), z, (x,), new((v,), par(tr(f, v), call)))
                return new((z,), par(left, protocol(dp, z, (w,), tr(n, w))))
            case Mu(a, b, body):
                return substitute(tr(body, b), {a: u})
            case TyAbs(_, body) | TyApp(body, _):
                return tr(body, u)
            case Pair(l, r):
                x, y, v, w = fresh("x"), fresh("y"), fresh("v"), fresh("w")
                return protocol(d, u, (x, y), par(protocol(dp, x, (v,), tr(l, v)),
                                                  protocol(dp, y, (w,), tr(r, w))))
            case LetPair(x, y, bound, body):
                v = fresh("v")
                return new((v,), par(tr(bound, v), protocol(dual_word(d), v, (x, y), tr(body, u))))
            case Inj(i, body):
                a1, a2, v = fresh("a"), fresh("a"), fresh("v")
                return protocol(d, u, (a1, a2), protocol("↑" + dp, (a1, a2)[i - 1], (v,), tr(body, v)))
            case Case(s, x1, n1, x2, n2):
                v, a, b = fresh("v"), fresh("a"), fresh("b")
                choice = Choice(((Prefix(False, a, (x1,)), tr(n1, u)), (Prefix(False, b, (x2,)), tr(n2, u))))
                return new((v,), par(tr(s, v), protocol(dual_word(d), v, (a, b), choice)))
        if ext is not None:
            return ext(t, u, tr)
        raise TranslationError(f"no translation for {t!r}")

    return tr(m, u)


def prepare(m, u: str):
    """Uniquify binders so they are distinct from each other, free names and ``u``."""
    return uniquify(m, avoid=(u,))


def translate(m, pair: TransPair, u: str = "u", **kw) -> Process:
    return translate_general(prepare(m, u), pair, u, **kw)


# -- typing certificates -------------------------------------------------------------------------

class DerivationError(TranslationError):
    pass


@dataclass(frozen=True)
class Proof:
    d: lla.Derivation
    seq: tuple
    proc: Process

    def entry(self, name):
        for e in self.seq:
            if e.names == (name,):
                return e
        return None


CERTIFICATE_ARITY = UniformArity(2)   # every type variable is read at arity 2
_CTX = CERTIFICATE_ARITY
_LETTER_RULE = {"↓": "down", "↑": "up", "?": "whynot", "!": "ofcourse"}


def _rule(rule, *premises, **params) -> Proof:
    try:
        seq, proc = lla.apply_rule(rule, params, [(p.seq, p.proc) for p in premises], _CTX)
    except lla.LLaError as e:
        raise DerivationError(f"{rule}: {e}") from None
    return Proof(lla.Derivation(rule, params, tuple(p.d for p in premises)), seq, proc)


def _axiom(us, vs, formula) -> Proof:
    return _rule("axiom", us=tuple(us), vs=tuple(vs), formula=formula)


def _rename(p: Proof, old: str, new_: str) -> Proof:
    f = p.entry(old).formula
    return _rule("cut", p, _axiom((old,), (new_,), f), names=(old,))


def _protocol(word: str, u: str, names, p: Proof) -> Proof:
    names = tuple(names)
    if not word:
        return _rename(p, names[0], u)
    if len(word) > 1:
        v = fresh("c")
        return _protocol(word[0], u, (v,), _protocol(word[1:], v, names, p))
    return _rule(_LETTER_RULE[word], p, subject=u, names=names)


def _weaken(p: Proof, name: str, formula) -> Proof:
    if not isinstance(formula, lla.WhyNot):
        raise DerivationError(f"cannot discard {name}: {lla.show_formula(formula)} is not a why-not formula")
    return _rule("weakening", p, subject=name, formula=formula)


def _contract(p: Proof, keep: str, other: str) -> Proof:
    f = p.entry(keep).formula
    if not isinstance(f, lla.WhyNot):
        raise DerivationError(f"cannot share {keep}: {lla.show_formula(f)} is not a why-not formula")
    return _rule("contraction", p, u=keep, v=other, w=keep)


def _exchange(p: Proof, order) -> Proof:
    order = tuple(tuple(o) for o in order)
    if order == tuple(e.names for e in p.seq):
        return p
    return _rule("exchange", p, order=order)


class _Emitter:
    def __init__(self, pair: TransPair):
        self.pair = pair

    def hyp(self, a):
        return _hyp_formula(a, self.pair)

    def conc(self, a):
        return _conc_formula(a, self.pair)

    def infer(self, g, t, dl):
        return typecheck(g, t, dict(dl))

    def split(self, g, dl, first, second):
        """Rename names shared by two subterms apart; returns (second', pairs)."""
        shared_l = free_vars(first) & free_vars(second)
        shared_m = free_mu(first) & free_mu(second)
        pairs = []
        g2, dl2 = dict(g), dict(dl)
        for x in sorted(shared_l):
            x2 = fresh(x)
            second = rename_var(second, x, x2)
            g2[x2] = g[x]
            pairs.append(x)
            pairs.append(x2)
        for b in sorted(shared_m):
            b2 = fresh(b)
            second = rename_mu(second, b, b2)
            dl2[b2] = dl[b]
            pairs.append(b)
            pairs.append(b2)
        return second, g2, dl2, list(zip(pairs[::2], pairs[1::2]))

    def merge(self, p: Proof, pairs) -> Proof:
        for keep, other in pairs:
            p = _contract(p, keep, other)
        return p

    def derive(self, t, u, g, dl, a, foralls=()):
        pair = self.pair
        g_, d_ = pair.gamma, pair.delta
        gp, dp = pair.gamma_p, pair.delta_p
        if foralls and not isinstance(t, (Abs, Pair, Inj, TyAbs)):
            raise DerivationError("type abstraction is certified only over an abstraction, pair or injection")
        match t:
            case Var(x):
                if pair.orientation == "both":
                    return _axiom((x,), (u,), apply_word(g_, translate_type_modal(a, pair)))
                if pair.orientation == "left":
                    u2 = fresh("u")
                    ax = _axiom((u2,), (u,), self.conc(a))
                    return _protocol(dual_word(dp), x, (u2,), ax)
                x2 = fresh("x")
                ax = _axiom((x,), (x2,), apply_word(g_, translate_type_modal(a, pair)))
                return _protocol(gp, u, (x2,), ax)
            case Abs(x, b, body):
                v = fresh("v")
                p = self.derive(body, v, {**g, x: b}, dl, a.cod)
                if p.entry(x) is None:
                    p = _weaken(p, x, self.hyp(b))
                p = _rule("par", p, left=(x,), right=(v,))
                return self.close(p, u, (x, v), foralls)
            case TyAbs(x, body):
                return self.derive(body, u, g, dl, a.body, foralls + ((x, a),))
            case TyApp(TyAbs(x, body), b):
                return self.derive(subst_type_in_term(body, x, b), u, g, dl, a)
            case TyApp():
                raise DerivationError("type application is certified only on a type abstraction literal")
            case App(f, n):
                tf = self.infer(g, f, dl)
                arg = tf.dom
                n, g2, dl2, pairs = self.split(g, dl, f, n)
                v, x, x2, u2, z, w = (fresh(s) for s in ("v", "x", "x", "u", "z", "w"))
                pm = self.derive(f, v, g, dl, tf)
                ga = apply_word(g_, translate_type_modal(arg, pair))
                call = _rule("tensor", _axiom((x,), (x2,), ga), _axiom((u2,), (u,), self.conc(a)),
                             left=(x2,), right=(u2,))
                call = _protocol(dual_word(d_), v, (x2, u2), call)
                left = _rule("cut", pm, call, names=(v,))
                left = _protocol(dual_word(gp), z, (x,), left)
                right = _protocol(dp, z, (w,), self.derive(n, w, g2, dl2, arg))
                return self.merge(_rule("cut", left, right, names=(z,)), pairs)
            case Mu(al, be, body):
                c = fresh("c")
                inner = {**dl, al: a}
                p = self.derive(body, c, g, inner, inner[be])
                if p.entry(be) is not None:
                    p = _contract(p, be, c)
                else:
                    p = _rename(p, c, be)
                if p.entry(al) is not None:
                    return _rename(p, al, u)
                return _weaken(p, u, self.conc(a))
            case Pair(l, r):
                self.need_left()
                r, g2, dl2, pairs = self.split(g, dl, l, r)
                x, y, v, w = fresh("x"), fresh("y"), fresh("v"), fresh("w")
                pl = _protocol(dp, x, (v,), self.derive(l, v, g, dl, a.left))
                pr = _protocol(dp, y, (w,), self.derive(r, w, g2, dl2, a.right))
                p = self.merge(_rule("tensor", pl, pr, left=(x,), right=(y,)), pairs)
                return self.close(p, u, (x, y), foralls)
            case LetPair(x, y, bound, body):
                self.need_left()
                tb = self.infer(g, bound, dl)
                body, g2, dl2, pairs = self.split(g, dl, bound, body)
                v = fresh("v")
                pm = self.derive(bound, v, g, dl, tb)
                pn = self.derive(body, u, {**g2, x: tb.left, y: tb.right}, dl2, a)
                for name, ty in ((x, tb.left), (y, tb.right)):
                    if pn.entry(name) is None:
                        pn = _weaken(pn, name, self.hyp(ty))
                pn = _rule("par", pn, left=(x,), right=(y,))
                pn = _protocol(dual_word(d_), v, (x, y), pn)
                return self.merge(_rule("cut", pm, pn, names=(v,)), pairs)
            case Inj(i, body):
                self.need_left()
                a1, a2, v = fresh("a"), fresh("a"), fresh("v")
                part, other = (a.left, a.right) if i == 1 else (a.right, a.left)
                p = _protocol("↑" + dp, (a1, a2)[i - 1], (v,), self.derive(body, v, g, dl, part))
                other_f = lla.Up(apply_word(g_, translate_type_modal(other, pair)))
                p = _rule("plus", p, u=a1, v=a2, side=i, other=other_f)
                return self.close(p, u, (a1, a2), foralls)
            case Case(s, x1, n1, x2, n2):
                self.need_left()
                ts = self.infer(g, s, dl)
                branches = Pair(Abs(x1, ts.left, n1), Abs(x2, ts.right, n2))
                branches, g2, dl2, pairs = self.split(g, dl, s, branches)
                n1, n2 = branches.left.body, branches.right.body
                v, ca, cb = fresh("v"), fresh("a"), fresh("b")
                pm = self.derive(s, v, g, dl, ts)
                p1 = self.derive(n1, u, {**g2, x1: ts.left}, dl2, a)
                p2 = self.derive(n2, u, {**g2, x2: ts.right}, dl2, a)
                p1, p2 = self.align(p1, p2, g2, dl2, x1, ts.left, x2, ts.right, u)
                pc = _rule("with", p1, p2, u=ca, v=cb, left=(x1,), right=(x2,))
                pc = _protocol(dual_word(d_), v, (ca, cb), pc)
                return self.merge(_rule("cut", pm, pc, names=(v,)), pairs)
        raise DerivationError(f"no certificate for {t!r}")

    def close(self, p: Proof, u, names, foralls):
        """Apply pending universal generalisations, then the delta protocol on ``u``."""
        for x, _ in reversed(foralls):
            p = _rule("forall", p, names=tuple(names), var=x)
        return _protocol(self.pair.delta, u, names, p)

    def need_left(self):
        if self.pair.orientation == "right":
            raise DerivationError("product and sum translations are typed only for left-handed pairs or gamma = delta")

    def align(self, p1, p2, g, dl, x1, t1, x2, t2, u):
        """Give both case branches the same context in the same order."""
        if p1.entry(x1) is None:
            p1 = _weaken(p1, x1, self.hyp(t1))
        if p2.entry(x2) is None:
            p2 = _weaken(p2, x2, self.hyp(t2))
        n1 = {e.names[0] for e in p1.seq} - {x1}
        n2 = {e.names[0] for e in p2.seq} - {x2}
        for name in sorted(n1 - n2):
            p2 = _weaken(p2, name, p1.entry(name).formula)
        for name in sorted(n2 - n1):
            p1 = _weaken(p1, name, p2.entry(name).formula)
        common = sorted(n1 | n2)
        p1 = _exchange(p1, [(n,) for n in common] + [(x1,)])
        p2 = _exchange(p2, [(n,) for n in common] + [(x2,)])
        return p1, p2


def emit_derivation(m, pair: TransPair, u: str = "u", gamma: Optional[dict] = None,
                    delta: Optional[dict] = None):
    """An LLa certificate for the translation of ``m`` at ``u``.

    Returns ``(derivation, sequent, process)``; the sequent is the theorem
    sequent for the typing of ``m``.
    """
    gamma = dict(gamma or {})
    delta = dict(delta or {})
    try:
        a = typecheck(gamma, m, delta)
    except LamTypeError as e:
        raise DerivationError(f"term does not typecheck: {e}") from None
    t = uniquify(m, avoid=(u,) + tuple(gamma) + tuple(delta))
    em = _Emitter(pair)
    p = em.derive(t, u, gamma, delta, a)
    target = build_theorem_sequent(gamma, a, delta, pair, u)
    for e in target:
        if p.entry(e.names[0]) is None:
            p = _weaken(p, e.names[0], e.formula)
    p = _exchange(p, [e.names for e in target])
    return p.d, target, p.proc


# -- clause schemas --------------------------------------------------------------------------------

@dataclass(frozen=True)
class Hole:
    """A placeholder subterm ``M`` whose translation at ``v`` is written ``'M<v>``."""
    name: str


def _hole(t, u, tr):
    if isinstance(t, Hole):
        return send(t.name, (u,))
    raise TranslationError(f"no translation for {t!r}")


SCHEMAS = {
    "var": Var("x"),
    "abs": Abs("x", TVar("X"), Hole("M")),
    "app": App(Hole("M"), Hole("N")),
}


def translate_schema(former: str, pair: TransPair, u: str = "u") -> Process:
    """The translation of one term former, with subterms left as placeholders."""
    return translate_general(SCHEMAS[former], pair, u, ext=_hole)
