"""
Explicit fusions, reduction and bisimilarity
=============================================

A tour of the process calculus: parsing, structural normal forms,
labelled transitions, reduction and the bisimulation checker.
"""

from lampi.pi import (
    bisimilar, congruence_normalize, parse_process, reduce, show, pretty, transitions, unifies,
)
from lampi.pi.laws import LAWS, check_law

# a fusion x~y makes two names interchangeable inside its scope
p = parse_process("x~y | 'x<z>")
print("process:        ", show(p))
print("x and y unified:", unifies(p, "x", "y"))

# hiding one side of a fusion substitutes it away
q = parse_process("nu x.(x~y | 'x<z>)")
print("normal form:    ", show(pretty(congruence_normalize(q))))

# a communication consumes an input and an output on the same channel
r = parse_process("u(x).'x<w> | 'u<v>")
print("reducts:        ", [show(pretty(s)) for s in reduce(r)])

# the labels a process offers to its environment
for label, _ in transitions(parse_process("u(x).1 | 'v<w>")):
    print("transition:     ", label)

# bisimilarity answers yes, no or unknown when the budget runs out
print("nu x.(x~y) ~ 1: ", bisimilar(parse_process("nu x.(x~y)"), parse_process("1")))
print("u(x).1 ~ 'u(x).1:", bisimilar(parse_process("u(x).1"), parse_process("'u(x).1")))

# the algebraic laws of the calculus, each checked by the engine
for law in LAWS:
    print(f"{law.name:28s} {law.kind:10s} {check_law(law)}")
