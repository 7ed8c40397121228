from pathlib import Path

import pytest

from lampi.cli import load_corpus
from lampi.lam_mu import Var, alpha_equal_terms, parse_term
from lampi.machines import (
    CbnExec, CbvCont, CbvExec, Dot, MachineError, Sharp, cbn_normalize, cbn_start, cbn_step,
    cbn_terminal_shape, cbv_start, cbv_step, cbv_terminal_shape, check_mu_linear, is_value,
    show_exec, subst_continuation, translate_cbn_term, translate_exec_cbn,
    translate_exec_cbv,
)
from lampi.pi import (
    YES, Budget, Fusion, alpha_equal, bisimilar, congruence_normalize, new, par, parse_process,
)
from lampi.translate import TranslationError, preset, protocol, translate
from lampi.verify import admin_normalize

T = parse_term
CORPUS = load_corpus(Path(__file__).parent.parent / "corpus")


def run(start, step, e):
    trace = [(None, e)]
    while (r := step(e)) is not None:
        e = r[1]
        trace.append(r)
    return trace


# -- call by name --------------------------------------------------------------

def test_cbn_pop_then_sharp():
    trace = run(cbn_start, cbn_step, cbn_start(T(r"(\x:X. x) n"), "a"))
    assert [rule for rule, _ in trace[1:]] == ["pop", "sharp"]
    assert show_exec(trace[1][1]) == "#n * a"
    assert show_exec(trace[-1][1]) == "n * a"


def test_cbn_variable_is_terminal():
    e = cbn_start(T("x m"), "a")
    assert cbn_step(e) is None
    assert cbn_terminal_shape(e) == "variable-head"


def test_cbn_mu_normalizes_before_stepping():
    e = cbn_normalize(cbn_start(T("mu c:X. [b] m"), "a"))
    assert show_exec(e) == "m * b"


def test_subst_continuation_appends_arguments():
    m = subst_continuation(T("mu t:X. [b] x"), "b", (T("m1"),), "a")
    assert alpha_equal_terms(m, T("mu t:X. [a] x m1"))


def test_subst_continuation_without_target():
    m = T(r"\y:X. y")
    assert alpha_equal_terms(subst_continuation(m, "b", (T("m1"),), "a"), m)


def test_subst_continuation_respects_shadowing():
    m = T("mu b:X. [b] x")
    assert alpha_equal_terms(subst_continuation(m, "b", (T("m1"),), "a"), m)


def test_subst_continuation_avoids_capture():
    # the inner binder a must not capture the target covariable a
    m = subst_continuation(T("mu a:X. [b] x"), "b", (T("m1"),), "a")
    assert m.alpha != "a" and m.beta == "a"


def test_intuitionistic_cbn_requires_linear_mu():
    check_mu_linear(T("mu a:X. [a] x"))
    with pytest.raises(MachineError):
        check_mu_linear(T(r"mu a:X. [a] f (mu c:X. [a] x)"))


# -- call by value -------------------------------------------------------------

def test_cbv_four_rule_chain():
    trace = run(cbv_start, cbv_step, cbv_start(T(r"(\x:X. x) y"), "a"))
    assert [rule for rule, _ in trace[1:]] == ["fun", "arg", "beta"]
    assert [show_exec(e) for _, e in trace] == [
        r"a * (\x:X. x) y", r"a [y]a * \x:X. x", r"a * (\x:X. x) @ y", "a * y"]
    assert cbv_terminal_shape(trace[-1][1]) == "value-at-covariable"


def test_cbv_value_is_terminal():
    assert cbv_step(cbv_start(T(r"\x:X. x"), "a")) is None


def test_cbv_head_variable_is_terminal():
    e = CbvExec(CbvCont("a", ()), Dot(Var("x"), Var("y")))
    assert cbv_step(e) is None
    assert cbv_terminal_shape(e) == "variable-head"


def test_values():
    assert is_value(T("x")) and is_value(T(r"\x:X. f x"))
    assert not is_value(T("f x"))


# -- translations of executables -------------------------------------------------

def norm_equal(p, q):
    return alpha_equal(congruence_normalize(p), congruence_normalize(q))


@pytest.mark.parametrize("name", ["cbn-classical", "cbn-int"])
@pytest.mark.parametrize("src", [r"\x:X. x", "f y", r"(\x:X. x) n"])
def test_cbn_initial_executable_is_the_term(name, src):
    m = T(src)
    e = cbn_start(m, "a")
    assert norm_equal(translate_exec_cbn(e, preset(name)), translate(m, preset(name), "a"))


@pytest.mark.parametrize("name", ["cbv-classical", "cbv-int", "cbv-lin"])
@pytest.mark.parametrize("src", [r"\x:X. x", "f y", r"(\x:X. x) n"])
def test_cbv_initial_executable_is_the_term(name, src):
    m = T(src)
    e = cbv_start(m, "a")
    assert norm_equal(translate_exec_cbv(e, preset(name)), translate(m, preset(name), "a"))


def test_cbn_covariable_clause():
    p = translate_exec_cbn(cbn_start(T("n"), "a"), preset("cbn-int"))
    assert norm_equal(p, new(["u"], par(translate(T("n"), preset("cbn-int"), "u"), Fusion("a", "u"))))


def test_sharp_clause():
    p = translate_cbn_term(Sharp(T("m")), preset("cbn-int"), "u")
    assert norm_equal(p, parse_process("nu x.('x<u> | !x(v).'m<v>)"))


def test_wrong_handedness_rejected():
    with pytest.raises(TranslationError):
        translate_exec_cbn(cbn_start(T("x"), "a"), preset("cbv-classical"))
    with pytest.raises(TranslationError):
        translate_exec_cbv(cbv_start(T("x"), "a"), preset("cbn-classical"))


def test_push_rule_is_a_congruence():
    e = cbn_start(T("m n"), "a")
    pair = preset("cbn-int")
    assert norm_equal(translate_exec_cbn(e, pair), translate_exec_cbn(cbn_normalize(e), pair))


@pytest.mark.parametrize("name", ["cbn-classical", "cbn-int"])
def test_binding_implements_substitution(name):
    # a binding x = m next to x * K behaves as the substituted executable #m * K
    pair = preset(name)
    direct = translate_exec_cbn(CbnExec(Sharp(T("m")), (T("n"),), "a"), pair)
    via = translate_exec_cbn(CbnExec(T("x"), (T("n"),), "a"), pair)
    binding = protocol(pair.delta_p, "x", ["v"], translate(T("m"), pair, "v"))
    bound = new(["x"], par(via, binding))
    assert bisimilar(admin_normalize(direct), admin_normalize(bound), Budget(depth=6)) == YES


# -- the corpus ----------------------------------------------------------------

CASES = [(e, s) for e in CORPUS for s in e.strategies if s != "simply-typed"]


@pytest.mark.parametrize("entry,strategy", CASES, ids=lambda x: getattr(x, "name", x))
def test_corpus_runs_terminate_in_a_known_shape(entry, strategy):
    pair = preset(strategy)
    cbn = pair.orientation == "left"
    start, step, shape = ((cbn_start, cbn_step, cbn_terminal_shape) if cbn
                          else (cbv_start, cbv_step, cbv_terminal_shape))
    e = start(entry.term, "a")
    for _ in range(10_000):
        r = step(e)
        if r is None:
            break
        e = r[1]
    else:
        pytest.fail("no terminal executable within 10000 steps")
    assert shape(e) is not None
    assert isinstance(e, CbnExec if cbn else CbvExec)
