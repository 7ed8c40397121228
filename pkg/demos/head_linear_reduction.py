"""
Sigma-equivalence and head linear reduction
============================================

The arity-based translation of simply typed terms cannot tell apart
terms that only differ by permuting redexes. Head linear reduction on
those classes is mirrored by single silent steps of the translation.
"""

from lampi.lam_mu import TVar, hlr_run, parse_term, parse_type, show_term, sigma_normalize
from lampi.pi import alpha_equal, congruence_normalize, pretty, show
from lampi.translate import simple_arity, translate_simply_typed
from lampi.verify import check_hlr_lockstep

# two sigma-equivalent terms and their translations
X = TVar("X")
gamma = {"n": parse_type("X -> X"), "p": X}
m1 = parse_term(r"(\x:X -> X. x) n p")
m2 = parse_term(r"(\x:X -> X. x p) n")
ys = ["y0"]
p1 = congruence_normalize(translate_simply_typed(m1, X, ys, gamma))
p2 = congruence_normalize(translate_simply_typed(m2, X, ys, gamma))
print(show_term(m1), " and ", show_term(m2))
print("    translations alpha-equal:", alpha_equal(p1, p2))
print("    shared head form:", show_term(sigma_normalize(m1).to_term()))

# head linear reduction of Church two passed through a wrapper and applied to f and c
ctx = {"f": parse_type("X -> X"), "c": X}
m = parse_term(r"(\n:(X -> X) -> X -> X. \g:X -> X. \z:X. n g z) "
               r"(\h:X -> X. \z:X. h (h z)) f c")
print()
for i, h in enumerate(hlr_run(m)):
    print(f"{i:2d}  {show_term(h.to_term())}")
report = check_hlr_lockstep(m, ctx)
print("lockstep with the translation:", report.ok, report.verdicts)
