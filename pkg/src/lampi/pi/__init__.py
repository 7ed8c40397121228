"""The pi-calculus with explicit fusions."""

from lampi.pi.congruence import (
    alpha_equal, canonical_key, congruence_normalize, fusion_partition, top_level, unifies,
)
from lampi.pi.lts import (
    NO, UNKNOWN, YES, Budget, CondTau, Tau, Visible, bisimilar, moves, reduce, transitions,
)
from lampi.pi.syntax import (
    NIL, Act, Choice, Fusion, New, Nil, Par, Prefix, Process, all_names, expand_output_macro,
    free_names, fusions, inp, new, occurrences, out, par, rep, send, substitute, uniquify,
)
from lampi.pi.text import ParseError, parse_process, pretty, show
