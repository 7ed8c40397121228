import pytest
from hypothesis import given, settings

from lampi.pi import (
    NO, UNKNOWN, YES, Budget, CondTau, Fusion, Tau, Visible, alpha_equal, bisimilar,
    congruence_normalize, expand_output_macro, free_names, new, par, parse_process, reduce, show,
    substitute, transitions, unifies,
)
from lampi.pi.laws import LAWS, Law, check_law
from strategies import processes

P = parse_process


def norm_equal(p, q):
    return alpha_equal(congruence_normalize(p), congruence_normalize(q))


# -- substitution and the output macro ----------------------------------------

def test_substitute_renames_free_names():
    assert substitute(P("x~y"), {"x": "z"}) == Fusion("z", "y")


def test_substitute_leaves_bound_names():
    p = P("nu x. 'u<x>")
    assert alpha_equal(substitute(p, {"x": "w"}), p)


def test_substitute_avoids_capture():
    q = substitute(P("u(x).'v<x>"), {"v": "x"})
    assert "x" in free_names(q)
    assert q.prefix.binders[0] != "x"
    assert alpha_equal(q, P("u(z).'x<z>"))


def test_output_macro_single():
    assert alpha_equal(expand_output_macro("u", ["x"]), P("'u(y).(x~y)"))


def test_output_macro_empty():
    assert alpha_equal(expand_output_macro("u", []), P("'u().1"))


def test_output_macro_repeated_payload():
    assert alpha_equal(expand_output_macro("u", ["x", "x"]), P("'u(y1,y2).(x~y1 | x~y2)"))


# -- congruence ----------------------------------------------------------------

def test_unit_is_dropped():
    assert norm_equal(P("'u<x> | 1"), P("'u<x>"))


def test_unused_restrictions_vanish():
    assert alpha_equal(congruence_normalize(P("nu x. nu y. 'u<z>")), P("'u<z>"))


def test_fusion_classes_share_a_representative():
    a = congruence_normalize(P("x~y | 'x<u>"))
    b = congruence_normalize(P("y~x | 'y<u>"))
    assert show(a) == show(b)


def test_distinct_processes_stay_distinct():
    assert not norm_equal(P("u(x).1"), P("'u(x).1"))
    assert not norm_equal(P("u() | v()"), P("u()"))


@settings(max_examples=150, deadline=None)
@given(processes())
def test_normalize_idempotent(p):
    n = congruence_normalize(p)
    assert alpha_equal(congruence_normalize(n), n)


@settings(max_examples=150, deadline=None)
@given(processes())
def test_print_parse_round_trip(p):
    assert alpha_equal(P(show(p)), p)


# -- unification ---------------------------------------------------------------

def test_unifies_axiom():
    assert unifies(P("x~y"), "x", "y")


def test_fusion_under_prefix_is_inert():
    assert not unifies(P("u(x).(y~z)"), "y", "z")


def test_unifies_transitively():
    assert unifies(P("x~y | y~z"), "x", "z")


@settings(max_examples=100, deadline=None)
@given(processes())
def test_unifies_is_an_equivalence(p):
    ns = sorted(free_names(p) | {"u"})
    for x in ns:
        assert unifies(p, x, x)
        for y in ns:
            assert unifies(p, x, y) == unifies(p, y, x)
            for z in ns:
                if unifies(p, x, y) and unifies(p, y, z):
                    assert unifies(p, x, z)


# -- transitions and reduction -------------------------------------------------

def test_communication_is_a_tau():
    labels = [label for label, _ in transitions(P("u(x).1 | 'u(x).1"))]
    assert Tau() in labels


def test_cross_channel_sync_is_conditional():
    labels = [label for label, _ in transitions(P("u(x).1 | 'v(x).1"))]
    assert any(isinstance(label, CondTau) for label in labels)
    assert Tau() not in labels


def test_inaction_has_no_transitions():
    assert transitions(P("1")) == []


def test_sync_through_equator():
    assert any(isinstance(l, Tau) for l, _ in transitions(P("u~v | v(x).1 | 'u(x).1")))


def test_reduce_basic():
    (r,) = reduce(P("u(x).'x<> | 'u(x).x()"))
    assert norm_equal(r, P("nu x.('x<> | x())"))


def test_fusions_alone_do_not_reduce():
    assert reduce(P("x~y")) == []


def test_replicated_server_survives():
    (r,) = reduce(P("!u(x).'x<> | 'u(x).1"))
    assert norm_equal(r, P("nu x.'x<> | !u(x).'x<>"))


@settings(max_examples=100, deadline=None)
@given(processes())
def test_visible_binders_are_fresh(p):
    fn = free_names(p)
    for label, _ in transitions(p):
        if isinstance(label, Visible):
            assert not set(label.prefix.binders) & fn


@settings(max_examples=60, deadline=None)
@given(processes(max_leaves=4))
def test_reduce_respects_congruence(p):
    q = congruence_normalize(p)
    rp = sorted(show(congruence_normalize(r)) for r in reduce(p))
    rq = reduce(q)
    assert len(rp) == len(rq)
    for r in reduce(p):
        assert any(alpha_equal(congruence_normalize(r), congruence_normalize(s)) for s in rq)


# -- bisimilarity --------------------------------------------------------------

def test_hidden_equator_is_inaction():
    assert bisimilar(P("nu x.(x~y)"), P("1")) == YES


def test_bisimilar_reflexive():
    p = P("!u(x).'x<> | v(y).y~w")
    assert bisimilar(p, p) == YES


def test_input_is_not_output():
    assert bisimilar(P("u(x).1"), P("'u(x).1")) == NO


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        bisimilar(P("1"), P("1"), Budget(depth=0))


@settings(max_examples=40, deadline=None)
@given(processes(max_leaves=4), processes(max_leaves=4))
def test_bisim_verdicts_stable_under_budget(p, q):
    small = bisimilar(p, q, Budget(depth=3, unfold=3))
    large = bisimilar(p, q, Budget(depth=6, unfold=6))
    if small != UNKNOWN and large != UNKNOWN:
        assert small == large


@settings(max_examples=50, deadline=None)
@given(processes(max_leaves=4))
def test_bisimilarity_preserved_by_reduction(p):
    # pad p with a hidden equator, which is bisimilar to inaction
    q = par(new(["z"], Fusion("z", "u")), p)
    budget = Budget(depth=4, unfold=4)
    assert bisimilar(p, q, budget) == YES
    for p1 in reduce(p):
        assert any(bisimilar(p1, q1, budget) == YES for q1 in reduce(q))


# -- the law catalogue ---------------------------------------------------------

def test_catalogue_has_twenty_laws():
    assert len(LAWS) == 20
    assert len({law.name for law in LAWS}) == 20


@pytest.mark.parametrize("law", LAWS, ids=lambda law: law.name)
def test_law(law):
    assert check_law(law)


@pytest.mark.parametrize("law", [
    Law("bogus-unit", "congruent", "u() | v()", "u()"),
    Law("bogus-bisim", "bisimilar", "u(x).1", "'u(x).1"),
    Law("bogus-unify", "unifies", "u(x).(y~z)", names=("y", "z")),
    Law("bogus-tau", "tau", "u(x).1 | 'v(x).1"),
], ids=lambda law: law.name)
def test_law_checker_rejects_false_laws(law):
    assert not check_law(law)
