import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lampi.lla import (
    ArityError, ContextError, D, DistinctnessError, Down, Entry, Exists, ExistsArityError,
    Forall, OfCourse, Parr, Plus, RuleError, Tensor, UniformArity, Up, Var, WhyNot, With, arity,
    check_derivation, dual, dump_derivation, formula_equal, load_derivation, parse_formula,
    parse_sequent, sequent_equal, show_formula, show_sequent,
)
from lampi.pi import alpha_equal, parse_process

F = parse_formula
CTX = {"X": 1, "Y": 1, "Z": 5, "W": 1}


def formulas():
    leaves = st.builds(Var, st.sampled_from(("X", "Y", "Z")), st.booleans())
    unary = (Down, Up, OfCourse, WhyNot)
    binary = (Tensor, Parr, Plus, With)

    def extend(children):
        return st.one_of(
            st.builds(lambda c, a: c(a), st.sampled_from(unary), children),
            st.builds(lambda c, a, b: c(a, b), st.sampled_from(binary), children, children),
            st.builds(lambda q, a: q("X", a), st.sampled_from((Forall, Exists)), children),
        )

    return st.recursive(leaves, extend, max_leaves=8)


# -- arity and duality ---------------------------------------------------------

def test_arity_is_additive_on_tensor():
    assert arity(F("X * Y"), CTX) == 2


def test_modalities_have_arity_one():
    assert arity(F("!(Z $ Z)"), CTX) == 1


def test_arity_of_unbound_variable():
    with pytest.raises(ArityError):
        arity(F("V"), CTX)


def test_dual_tensor():
    assert formula_equal(dual(F("X * Y")), F("~X $ ~Y"))


def test_dual_nested():
    assert formula_equal(dual(F("dn (X $ ?Y)")), F("up (~X * !~Y)"))


def test_dual_quantifier_involution():
    f = F("forall X. !X")
    assert formula_equal(dual(dual(f)), f)
    assert isinstance(dual(f), Exists)


@settings(max_examples=1000, deadline=None)
@given(formulas())
def test_dual_is_an_involution(f):
    assert dual(dual(f)) == f


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_dual_preserves_arity(f):
    assert arity(dual(f), CTX) == arity(f, CTX)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_formula_print_parse_round_trip(f):
    assert formula_equal(F(show_formula(f)), f)


def test_unicode_aliases():
    assert formula_equal(F("↓(X ⊗ Y)"), F("dn (X * Y)"))
    assert formula_equal(F("↑X ⅋ !Y"), F("up X $ !Y"))


def test_sequent_round_trip():
    seq = parse_sequent("u : ~X; v,w : X * Y")
    assert show_sequent(seq) == "u : ~X; v,w : X * Y"


# -- derivations ---------------------------------------------------------------

def axiom(u="u", v="v", f="X"):
    return D("axiom", us=u, vs=v, formula=F(f))


def test_axiom():
    seq, p = check_derivation(axiom(), CTX)
    assert sequent_equal(seq, (Entry(("u",), F("~X")), Entry(("v",), F("X"))))
    assert alpha_equal(p, parse_process("u~v"))


def test_axiom_at_higher_arity():
    d = D("axiom", us=("u1", "u2"), vs=("v1", "v2"), formula=F("X * Y"))
    _, p = check_derivation(d, CTX)
    assert alpha_equal(p, parse_process("u1~v1 | u2~v2"))


def test_up_action_over_axiom():
    seq, p = check_derivation(D("up", axiom(), subject="w", names="v"), CTX)
    assert show_sequent(seq) == "u : ~X; w : up X"
    assert alpha_equal(p, parse_process("'w(v).(u~v)"))


def test_cut():
    d = D("cut", axiom("u", "v"), axiom("v", "w"), names="v")
    seq, p = check_derivation(d, CTX)
    assert show_sequent(seq) == "u : ~X; w : X"
    assert alpha_equal(p, parse_process("nu v.(u~v | v~w)"))


def test_cut_needs_dual_formulas():
    with pytest.raises(RuleError):
        check_derivation(D("cut", axiom("u", "v"), axiom("w", "v", "Y"), names="v"), CTX)


def test_contraction_merges_names():
    base = D("tensor", D("whynot", axiom("a", "u"), subject="x", names="a"),
             D("whynot", axiom("b", "v"), subject="y", names="b"), left="u", right="v")
    seq, p = check_derivation(D("contraction", base, u="x", v="y", w="z"), CTX)
    assert show_sequent(seq) == "z : ?~X; u,v : X * X"
    assert alpha_equal(p, parse_process("'z(a).(a~u) | 'z(b).(b~v)"))


def test_contraction_needs_why_not_entries():
    base = D("tensor", axiom("a", "u"), axiom("b", "v"), left="u", right="v")
    with pytest.raises(RuleError):
        check_derivation(D("contraction", base, u="a", v="b", w="z"), CTX)


def test_weakening_needs_why_not():
    with pytest.raises(RuleError):
        check_derivation(D("weakening", axiom(), subject="w", formula=F("X")), CTX)
    seq, _ = check_derivation(D("weakening", axiom(), subject="w", formula=F("?X")), CTX)
    assert show_sequent(seq) == "u : ~X; v : X; w : ?X"


def test_exchange_preserves_the_process():
    d = D("tensor", axiom("a", "b"), axiom("c", "d", "Y"), left="b", right="d")
    seq, p = check_derivation(d, CTX)
    order = [e.names for e in reversed(seq)]
    seq2, p2 = check_derivation(D("exchange", d, order=order), CTX)
    assert [e.names for e in seq2] == order
    assert p2 == p


def test_exists_with_matching_arity():
    d = D("exists", axiom("u", "v", "Y"), var="X", body=F("X"), witness=F("Y"), names="v")
    seq, _ = check_derivation(d, CTX)
    assert show_sequent(seq) == "u : ~Y; v : exists X. X"


def test_derivation_serialization_round_trip():
    d = D("up", D("cut", axiom("u", "v"), axiom("v", "w"), names="v"), subject="s", names="w")
    assert check_derivation(load_derivation(dump_derivation(d)), CTX)[0] == check_derivation(d, CTX)[0]


# -- rejected derivations ------------------------------------------------------

def test_exists_arity_mismatch_rejected():
    base = D("axiom", us=("u1", "u2"), vs=("v1", "v2"), formula=F("X * Y"))
    d = D("exists", base, var="W", body=F("W"), witness=F("X * Y"), names=("v1", "v2"))
    with pytest.raises(ExistsArityError):
        check_derivation(d, CTX)


def test_name_distinctness_rejected():
    d = D("tensor", axiom("u", "v"), axiom("u", "w"), left="v", right="w")
    with pytest.raises(DistinctnessError):
        check_derivation(d, CTX)


def test_of_course_context_rejected():
    with pytest.raises(ContextError):
        check_derivation(D("ofcourse", axiom(), subject="w", names="v"), CTX)


def test_down_context_rejected():
    with pytest.raises(ContextError):
        check_derivation(D("down", axiom(), subject="w", names="v"), CTX)


def test_of_course_with_why_not_context_accepted():
    inner = D("whynot", axiom(), subject="x", names="u")
    seq, p = check_derivation(D("ofcourse", inner, subject="w", names="v"), CTX)
    assert show_sequent(seq) == "x : ?~X; w : !X"
    assert alpha_equal(p, parse_process("!w(v).'x(u).(u~v)"))


def test_uniform_arity_context():
    assert arity(F("X * Y * Z"), UniformArity(2)) == 6
