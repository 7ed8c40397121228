"""
Deadlock freedom by must-testing
================================

A well-typed translation never gets stuck: placed next to a tester
built from its typing sequent, every reachable state can still reach a
signal on the reserved channel omega. An untypable process that waits
on itself fails the same test.
"""

from lampi.lam_mu import parse_term, parse_type
from lampi.lla import show_sequent
from lampi.pi import parse_process, pretty, show
from lampi.translate import build_theorem_sequent, preset, translate
from lampi.verify import build_probe, deadlock_probe

m = parse_term(r"\x:X. x")
for name in ("cbn-int", "cbv-classical"):
    pair = preset(name)
    p = translate(m, pair)
    seq = build_theorem_sequent({}, parse_type("X -> X"), {}, pair, "u")
    print(f"{name:14s} {show(pretty(p))}")
    print(f"{'':14s} sequent {show_sequent(seq)}")
    print(f"{'':14s} tester  {show(pretty(build_probe(seq)))}")
    print(f"{'':14s} verdict {deadlock_probe(p, seq)}")

stuck = parse_process("nu a,b.(a().'b().1 | b().'a().1)")
print()
print("negative control:", show(stuck), "->", deadlock_probe(stuck))
