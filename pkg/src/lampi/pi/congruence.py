"""Structural congruence: canonical keys, normal forms and name unification."""

from __future__ import annotations

from lampi.pi.syntax import (
    Act, Choice, Fusion, New, Nil, Par, Process, free_names, new, par,
    substitute, uniquify,
)


class UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> list[set]:
        groups: dict = {}
        for x in list(self.parent):
            groups.setdefault(self.find(x), set()).add(x)
        return list(groups.values())


# -- canonical keys ------------------------------------------------------------

def _components(p: Process) -> list:
    return list(p.items) if isinstance(p, Par) else ([] if isinstance(p, Nil) else [p])


def _block(p: Process):
    names = []
    while isinstance(p, New):
        names.append(p.name)
        p = p.body
    return names, p


def _nk(x, env):
    return env.get(x, ("f", x))


def _key(p: Process, env: dict, depth: int, cheap: bool):
    match p:
        case Nil():
            return ("1",)
        case Fusion(a, b):
            ka, kb = _nk(a, env), _nk(b, env)
            return ("~",) + ((ka, kb) if ka <= kb else (kb, ka))
        case Act(pre, body, r):
            return ("a", pre.output, r, _nk(pre.subject, env), len(pre.binders),
                    _key(body, _bind(env, pre.binders, depth, cheap), depth + len(pre.binders), cheap))
        case Choice(branches):
            ks = []
            for pre, body in branches:
                ks.append((_nk(pre.subject, env), len(pre.binders),
                           _key(body, _bind(env, pre.binders, depth, cheap), depth + len(pre.binders), cheap)))
            return ("+", tuple(sorted(ks)))
        case Par(items):
            return ("|", tuple(sorted(_key(q, env, depth, cheap) for q in items)))
        case New():
            names, body = _block(p)
            comps = _components(body)
            if cheap:
                env2 = {**env, **{b: ("#",) for b in names}}
                return ("n", len(names), ("|", tuple(sorted(_key(c, env2, depth, True) for c in comps))))
            order = _order_block(names, comps, env, depth)
            env2 = {**env, **{b: ("b", depth + i) for i, b in enumerate(order)}}
            d2 = depth + len(order)
            return ("n", len(names), ("|", tuple(sorted(_key(c, env2, d2, False) for c in comps))))
    raise TypeError(p)


def _bind(env, binders, depth, cheap):
    if not binders:
        return env
    if cheap:
        return {**env, **{b: ("p", depth + i) for i, b in enumerate(binders)}}
    return {**env, **{b: ("b", depth + i) for i, b in enumerate(binders)}}


def _order_block(names, comps, env, depth):
    fvs = [free_names(c) for c in comps]
    base = {**env, **{b: ("#",) for b in names}}

    def colour(b, tokens):
        env2 = {**base, **tokens, b: ("@",) + tokens.get(b, ("#",))[1:]}
        return tuple(sorted(_key(c, env2, depth, True) for c, fv in zip(comps, fvs) if b in fv))

    c1 = {b: colour(b, {}) for b in names}
    tokens = {b: ("c", c1[b]) for b in names}
    c2 = {b: colour(b, tokens) for b in names}
    idx = {b: i for i, b in enumerate(names)}
    return sorted(names, key=lambda b: (c2[b], idx[b]))


def canonical_key(p: Process):
    return _key(p, {}, 0, False)


def shape_key(p: Process):
    return _key(p, {}, 0, True)


def alpha_equal(p: Process, q: Process) -> bool:
    return canonical_key(p) == canonical_key(q)


# -- flattening and unification ------------------------------------------------

def _flatten(p: Process, binders: list, atoms: list) -> None:
    match p:
        case Nil():
            return
        case Par(items):
            for q in items:
                _flatten(q, binders, atoms)
        case New(x, body):
            binders.append(x)
            _flatten(body, binders, atoms)
        case Fusion(a, b):
            if a != b:
                atoms.append(p)
        case Act() | Choice():
            atoms.append(p)
        case _:
            raise TypeError(p)


def _top_fusions(p: Process) -> UnionFind:
    binders: list = []
    atoms: list = []
    _flatten(p, binders, atoms)
    uf = UnionFind()
    for a in atoms:
        if isinstance(a, Fusion):
            uf.union(a.a, a.b)
    return uf


def unifies(p: Process, x: str, y: str) -> bool:
    """Whether ``p |= x = y``: top-level fusions closed under the equivalence rules."""
    if x == y:
        return True
    uf = _top_fusions(uniquify(p, avoid=(x, y)))
    return uf.find(x) == uf.find(y)


def fusion_partition(p: Process, names=None) -> frozenset:
    """Non-trivial unification classes restricted to the given (default: free) names."""
    names = set(free_names(p) if names is None else names)
    uf = _top_fusions(uniquify(p, avoid=names))
    out = []
    for cls in uf.classes():
        c = frozenset(cls & names)
        if len(c) > 1:
            out.append(c)
    return frozenset(out)


# -- normal form -----------------------------------------------------------------

def congruence_normalize(p: Process) -> Process:
    return _norm(uniquify(p))


def _norm(p: Process) -> Process:
    binders: list = []
    atoms: list = []
    _flatten(p, binders, atoms)
    bound = set(binders)
    uf = UnionFind()
    for a in atoms:
        if isinstance(a, Fusion):
            uf.union(a.a, a.b)
    mapping: dict = {}
    fusions = []
    for cls in uf.classes():
        free = sorted(c for c in cls if c not in bound)
        rep = free[0] if free else min(cls)
        for c in cls:
            if c != rep:
                mapping[c] = rep
        for f in free[1:]:
            fusions.append(Fusion(rep, f))
    rest = []
    for a in atoms:
        if isinstance(a, Fusion):
            continue
        if mapping:
            a = substitute(a, mapping)
        rest.append(_norm_atom(a))
    atoms = fusions + [a for a in rest if a is not None]
    atoms = _dedupe_fusions(atoms)
    live = set()
    for a in atoms:
        live |= free_names(a)
    binders = [b for b in binders if b not in mapping and b in live]
    atoms.sort(key=lambda a: _sort_key(a, binders))
    binders = _binder_order(binders, atoms)
    return new(binders, par(*atoms))


def _dedupe_fusions(atoms):
    seen = set()
    out = []
    for a in atoms:
        if isinstance(a, Fusion):
            k = tuple(sorted((a.a, a.b)))
            if k in seen:
                continue
            seen.add(k)
            a = Fusion(*k)
        out.append(a)
    return out


def _norm_atom(a):
    match a:
        case Act(pre, body, r):
            return Act(pre, _norm(body), r)
        case Choice(branches):
            bs = [(pre, _norm(body)) for pre, body in branches]
            if len(bs) == 1:
                return Act(bs[0][0], bs[0][1])
            bs.sort(key=lambda pb: (pb[0].subject, shape_key(Act(pb[0], pb[1]))))
            return Choice(tuple(bs))
    return a


def _sort_key(a, binders):
    env = {b: ("#",) for b in binders}
    from lampi.pi.text import show
    return (_key(a, env, 0, True), show(a))


def _binder_order(binders, atoms):
    wanted = set(binders)
    order = []

    def visit(q):
        match q:
            case Fusion(a, b):
                for n in (a, b):
                    if n in wanted and n not in order:
                        order.append(n)
            case Act(pre, body, _):
                if pre.subject in wanted and pre.subject not in order:
                    order.append(pre.subject)
                visit(body)
            case Choice(branches):
                for pre, body in branches:
                    if pre.subject in wanted and pre.subject not in order:
                        order.append(pre.subject)
                    visit(body)
            case Par(items):
                for r in items:
                    visit(r)
            case New(_, body):
                visit(body)

    for a in atoms:
        visit(a)
    for b in binders:
        if b not in order:
            order.append(b)
    return order


def top_level(p: Process):
    """Split a process into (hidden names, parallel atoms) without normalizing."""
    binders: list = []
    atoms: list = []
    _flatten(p, binders, atoms)
    return binders, atoms
