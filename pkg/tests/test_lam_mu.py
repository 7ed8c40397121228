import random
from pathlib import Path

import pytest

from lampi.cli import load_corpus
from lampi.lam_mu import (
    Arrow, LamTypeError, TVar, Var, alpha_equal_terms, headform_key, hlr_run,
    hlr_step, is_pure, parse_term, parse_type, show_term, sigma_normalize, sigma_rewrites,
    type_equal, typecheck,
)
from strategies import ARROWS, FREE, random_typed_term

T = parse_term
CORPUS = load_corpus(Path(__file__).parent.parent / "corpus")


# -- typing --------------------------------------------------------------------

def test_identity_types():
    assert type_equal(typecheck({}, T(r"\x:A. x")), parse_type("A -> A"))


def test_application_types():
    gamma = {"x": parse_type("A -> B"), "y": TVar("A")}
    assert type_equal(typecheck(gamma, T("x y")), TVar("B"))


def test_mu_target_is_typed_through_delta():
    m = T(r"\x:A. mu a:A. [b] x")
    delta = {}
    assert type_equal(typecheck({}, m, delta), parse_type("A -> A"))
    assert type_equal(delta["b"], TVar("A"))
    with pytest.raises(LamTypeError):
        typecheck({}, m, {"b": TVar("B")})


def test_type_abstraction():
    assert type_equal(typecheck({}, T(r"/\X. \x:X. x")), parse_type("forall X. X -> X"))


def test_type_abstraction_freshness():
    with pytest.raises(LamTypeError):
        typecheck({"x": TVar("X")}, T(r"/\X. x"))


def test_arrow_mismatch():
    with pytest.raises(LamTypeError):
        typecheck({"x": TVar("A"), "y": TVar("A")}, T("x y"))


def test_unbound_variable():
    with pytest.raises(LamTypeError):
        typecheck({}, T("x"))


@pytest.mark.parametrize("entry", CORPUS, ids=lambda e: e.name)
def test_corpus_typechecks_and_round_trips(entry):
    typecheck(entry.context, entry.term, entry.delta)
    assert alpha_equal_terms(T(show_term(entry.term)), entry.term)


# -- sigma-equivalence ---------------------------------------------------------

def test_redex_is_already_a_head_form():
    h = sigma_normalize(T(r"(\x:X. x) y"))
    assert (h.outer, h.head, h.args, h.pending) == ((), "x", (), (Var("y"),))
    assert [x for x, _ in h.inner] == ["x"]


def test_first_generator():
    a = sigma_normalize(T(r"(\x:X -> X. x) n p"))
    b = sigma_normalize(T(r"(\x:X -> X. x p) n"))
    assert headform_key(a) == headform_key(b)


def test_second_generator():
    a = sigma_normalize(T(r"(\x:X. \y:X. x) n"))
    b = sigma_normalize(T(r"\y:X. (\x:X. x) n"))
    assert headform_key(a) == headform_key(b)


def test_sigma_normalize_rejects_mu():
    with pytest.raises(ValueError):
        sigma_normalize(T("mu a:X. [a] x"))


def sigma_pairs(n, seed=2024):
    rng = random.Random(seed)
    pairs = []
    while len(pairs) < n:
        ty = rng.choice(ARROWS)
        m = random_typed_term(rng, ty)
        rewrites = sigma_rewrites(m)
        if rewrites:
            pairs.append((m, rng.choice(rewrites), ty))
    return pairs


@pytest.mark.parametrize("m,m2,ty", sigma_pairs(50))
def test_sigma_pairs_share_a_head_form(m, m2, ty):
    assert type_equal(typecheck(FREE, m2), ty)
    assert headform_key(sigma_normalize(m)) == headform_key(sigma_normalize(m2))


@pytest.mark.parametrize("m,m2,ty", sigma_pairs(20, seed=5))
def test_sigma_normalize_idempotent(m, m2, ty):
    h = sigma_normalize(m)
    assert headform_key(sigma_normalize(h.to_term())) == headform_key(h)


# -- head linear reduction -----------------------------------------------------

def test_hlr_substitutes_the_head_occurrence_only():
    h = sigma_normalize(T(r"(\x:X -> X. x x) (\y:X. y)"))
    target = sigma_normalize(T(r"(\x:X -> X. (\y:X. y) x) (\y:X. y)"))
    assert headform_key(hlr_step(h)) == headform_key(target)


def test_hlr_stops_at_outer_binder():
    assert hlr_step(sigma_normalize(T(r"\x:X -> X. x ((\y:X. y) z)"))) is None


def test_hlr_stops_at_free_head():
    assert hlr_step(sigma_normalize(T("f c"))) is None


SIMPLE = [e for e in CORPUS if is_pure(e.term)
          and all(isinstance(a, (TVar, Arrow)) for a in e.context.values())]


@pytest.mark.parametrize("entry", SIMPLE, ids=lambda e: e.name)
def test_hlr_terminates_and_preserves_types(entry):
    a = typecheck(entry.context, entry.term)
    seq = hlr_run(entry.term)
    for h in seq:
        assert type_equal(typecheck(entry.context, h.to_term()), a)


@pytest.mark.parametrize("seed", range(10))
def test_hlr_subject_reduction_on_random_terms(seed):
    rng = random.Random(seed)
    ty = rng.choice(ARROWS)
    m = random_typed_term(rng, ty)
    for h in hlr_run(m):
        assert type_equal(typecheck(FREE, h.to_term()), ty)
