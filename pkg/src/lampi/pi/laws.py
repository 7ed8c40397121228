"""A catalogue of algebraic laws of the calculus, each checked mechanically.

Every law is a named pair of processes plus the judgement that relates them:
"congruent" compares congruence normal forms, "bisimilar" asks the bounded
bisimulation game, "unifies"/"apart" ask the unification judgement and
"reduces" asks whether the right side is among the reducts of the left.
"""

from dataclasses import dataclass

from lampi.pi.congruence import alpha_equal, congruence_normalize, unifies
from lampi.pi.lts import YES, Budget, Tau, bisimilar, reduce, transitions
from lampi.pi.text import parse_process


@dataclass(frozen=True)
class Law:
    name: str
    kind: str     # congruent | bisimilar | unifies | apart | reduces | tau
    left: str
    right: str = ""
    names: tuple = ()


LAWS = (
    Law("par-commutative", "congruent", "u(x).'x<> | 'v<w>", "'v<w> | u(x).'x<>"),
    Law("par-associative", "congruent", "(u() | v()) | w()", "u() | (v() | w())"),
    Law("par-unit", "congruent", "'u<x> | 1", "'u<x>"),
    Law("nu-swap", "congruent", "nu x. nu y. 'x<y>", "nu y. nu x. 'x<y>"),
    Law("scope-extrusion", "congruent", "nu x.('x<y> | v(z).1)", "(nu x. 'x<y>) | v(z).1"),
    Law("nu-unit", "congruent", "nu x. 1", "1"),
    Law("reflexive-equator", "congruent", "x~x", "1"),
    Law("equator-symmetry", "congruent", "x~y", "y~x"),
    Law("equator-substitution", "congruent", "x~y | 'x<u>", "x~y | 'y<u>"),
    Law("equator-absorption", "congruent", "x~y | x~y", "x~y"),
    Law("replication-unfolding", "bisimilar", "!u(x).'x<>", "u(x).('x<> | !u(x).'x<>)"),
    Law("hidden-equator", "bisimilar", "nu x.(x~y)", "1"),
    Law("communication", "reduces", "u(x).'x<> | 'u(x).x()", "nu x.('x<> | x())"),
    Law("replicated-communication", "reduces", "!u(x).'x<> | 'u(y).1",
        "nu y.('y<> | !u(x).'x<>)"),
    Law("unification-axiom", "unifies", "x~y", names=("x", "y")),
    Law("unification-in-context", "unifies", "x~y | 'u<v>", names=("x", "y")),
    Law("unification-under-hiding", "unifies", "nu z.(x~z | z~y)", names=("x", "y")),
    Law("unification-transitive", "unifies", "x~y | y~z", names=("x", "z")),
    Law("label-renaming", "tau", "u~v | v(x).1 | 'u(x).1"),
    Law("inert-fusion-under-prefix", "apart", "u(x).(y~z)", names=("y", "z")),
)


def check_law(law: Law, budget: Budget = Budget()) -> bool:
    p = parse_process(law.left)
    match law.kind:
        case "congruent":
            q = parse_process(law.right)
            return alpha_equal(congruence_normalize(p), congruence_normalize(q))
        case "bisimilar":
            return bisimilar(p, parse_process(law.right), budget) == YES
        case "reduces":
            q = congruence_normalize(parse_process(law.right))
            return any(alpha_equal(r, q) for r in reduce(p))
        case "unifies":
            return unifies(p, *law.names)
        case "apart":
            return not unifies(p, *law.names)
        case "tau":
            return any(isinstance(label, Tau) for label, _ in transitions(p))
    raise ValueError(f"unknown law kind {law.kind!r}")
