"""
Modal translations of the lambda-mu calculus
=============================================

One term, four evaluation strategies. A pair of modality words fixes
how functions and their results are exposed on channels, and the pair
decides whether the translation behaves by name or by value.
"""

from lampi.lam_mu import parse_term, show_term
from lampi.lla import check_derivation, show_sequent
from lampi.pi import pretty, show
from lampi.translate import CERTIFICATE_ARITY, PRESETS, emit_derivation, preset, translate, translate_schema

# the translation of each term former, with subterms left as placeholders M and N
for name in ("cbn-classical", "cbn-int", "cbv-classical", "cbv-int"):
    print(f"{name}  {preset(name)}")
    for former in ("var", "abs", "app"):
        print(f"    {former:4s} {show(pretty(translate_schema(former, preset(name))))}")

# a concrete term: the identity applied to a free variable
m = parse_term(r"(\x:X. x) y")
print()
print("term:", show_term(m))
for name in PRESETS:
    print(f"    {name:14s} {show(pretty(translate(m, preset(name))))}")

# every translation comes with a typing derivation in linear logic,
# checked independently of the translator
d, sequent, _ = emit_derivation(parse_term(r"\x:X. x"), preset("cbn-int"))
concl, process = check_derivation(d, CERTIFICATE_ARITY)
print()
print("certified:", show_sequent(concl), "   ", show(pretty(process)))
