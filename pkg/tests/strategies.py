"""Hypothesis generators shared by the test modules."""

from hypothesis import strategies as st

from lampi.lam_mu import Abs, App, Arrow, TVar, Var
from lampi.pi import NIL, Fusion, inp, new, out, par, rep

NAMES = ("u", "v", "w", "x", "y")


def processes(max_leaves: int = 6):
    names = st.sampled_from(NAMES)
    binders = st.lists(st.sampled_from(("a", "b")), max_size=2, unique=True)
    leaves = st.one_of(
        st.just(NIL),
        st.builds(Fusion, names, names),
        st.builds(lambda s, bs: out(s, bs), names, binders),
        st.builds(lambda s, bs: inp(s, bs), names, binders),
    )

    def extend(children):
        return st.one_of(
            st.builds(lambda p, q: par(p, q), children, children),
            st.builds(lambda x, p: new([x], p), names, children),
            st.builds(lambda s, bs, p: inp(s, bs, p), names, binders, children),
            st.builds(lambda s, bs, p: out(s, bs, p), names, binders, children),
            st.builds(lambda s, bs, p: rep(s, bs, p), names, binders, children),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


# -- simply typed lambda terms ---------------------------------------------------

X = TVar("X")
ARROWS = (X, Arrow(X, X), Arrow(Arrow(X, X), X), Arrow(X, Arrow(X, X)))
FREE = {"c": X, "f": Arrow(X, X), "g": Arrow(Arrow(X, X), X), "h": Arrow(X, Arrow(X, X))}


def _result(a, target):
    """Argument types needed to bring a variable of type ``a`` to ``target``."""
    args = []
    while a != target:
        if not isinstance(a, Arrow):
            return None
        args.append(a.dom)
        a = a.cod
    return args


def random_typed_term(rng, ty=X, ctx=None, depth=3, counter=None):
    """A random pure term of simple type ``ty`` in ``ctx``, rich in redexes."""
    ctx = dict(FREE if ctx is None else ctx)
    counter = counter if counter is not None else [0]

    def name():
        counter[0] += 1
        return f"x{counter[0]}"

    heads = [(v, args) for v, a in ctx.items() if (args := _result(a, ty)) is not None
             and len(args) <= depth]
    choice = rng.random()
    if isinstance(ty, Arrow) and (choice < 0.4 or not heads):
        x = name()
        return Abs(x, ty.dom, random_typed_term(rng, ty.cod, {**ctx, x: ty.dom}, depth, counter))
    if depth > 0 and choice < 0.7:
        b = rng.choice(ARROWS)
        x = name()
        body = random_typed_term(rng, ty, {**ctx, x: b}, depth - 1, counter)
        return App(Abs(x, b, body), random_typed_term(rng, b, ctx, depth - 1, counter))
    v, args = rng.choice(heads)
    m = Var(v)
    for a in args:
        m = App(m, random_typed_term(rng, a, ctx, max(depth - 1, 0), counter))
    return m
