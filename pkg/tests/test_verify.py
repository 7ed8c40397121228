import json
from pathlib import Path

import pytest

from lampi.cli import load_corpus, theorem_sequent
from lampi.lam_mu import TVar, parse_term
from lampi.lla import parse_sequent
from lampi.pi import YES, alpha_equal, bisimilar, parse_process, reduce
from lampi.translate import preset, translate
from lampi.verify import (
    FAIL, LOCKSTEP, PASS, AdminLog, NondeterminismError, admin_normalize, build_probe,
    canonical_text, check_hlr_lockstep, check_step_correspondence, deadlock_probe,
    determinism_check, fresh_covariable, run_trace, same_record,
)

P = parse_process
T = parse_term
ROOT = Path(__file__).parent.parent
CORPUS = load_corpus(ROOT / "corpus")


# -- administrative normalization ----------------------------------------------

def test_hidden_equator_disappears():
    assert alpha_equal(admin_normalize(P("nu x.(x~y)")), P("1"))


def test_unused_hidden_output_disappears():
    assert alpha_equal(admin_normalize(P("nu u.('u<x,w> | v(z).1)")), P("v(z).1"))


def test_dead_server_disappears():
    assert alpha_equal(admin_normalize(P("nu x.(!x(z).'s<z> | 'v<w>)")), P("'v<w>"))


def test_live_processes_are_kept():
    p = P("nu x.(!x(z).'s<z> | x(y).1) | 'v<w>")
    assert alpha_equal(admin_normalize(p), admin_normalize(admin_normalize(p)))
    q = P("nu x.(x(y).1 | 'x(y).1)")
    assert alpha_equal(admin_normalize(q), q)


def test_server_is_copied_per_use():
    p = P("nu x.(!x(z).'s<z> | 'x(a).'x<a>)")
    q = P("nu x1.(!x1(z).'s<z> | 'x1(a).nu x2.(!x2(z).'s<z> | 'x2<a>))")
    assert alpha_equal(admin_normalize(p), admin_normalize(q))


def test_fixpoint_on_normal_processes():
    p = P("u(x).'x<v> | 'w<v>")
    assert alpha_equal(admin_normalize(p), p)


@pytest.mark.parametrize("src", [
    "nu u.('u<x,w> | v(z).1)",
    "nu x.(!x(z).'s<z> | 'x(a).'x<a>)",
    "nu x.(!x(z).'s<z> | 'v<w>)",
])
def test_admin_moves_are_bisimilar_in_debug_mode(src):
    log = AdminLog()
    p = P(src)
    q = admin_normalize(p, debug=True, record=log)
    assert log.moves
    assert all(verdict != "no" for *_, verdict in log.moves)
    assert bisimilar(p, q) == YES


# -- determinism ---------------------------------------------------------------

def test_two_independent_redexes():
    assert not determinism_check(P("u(x).1 | 'u(x).1 | v(y).1 | 'v(y).1"))


def test_inaction_is_deterministic():
    assert determinism_check(P("1"))


def test_parallel_strategy_is_caught():
    # both arguments of a binary application run at once in the parallel translation
    entry = next(e for e in CORPUS if e.name == "church_add")
    with pytest.raises(NondeterminismError):
        check_step_correspondence(entry.term, "cbv-int", alpha=fresh_covariable(entry))


# -- lockstep ------------------------------------------------------------------

def test_identity_cbn_int():
    report = check_step_correspondence(T(r"(\x:X. x) y"), "cbn-int")
    assert report.ok
    assert [r.rule for r in report.records[1:]] == ["pop", "sharp"]
    assert [len(r.labels) for r in report.records[1:]] == [1, 1]
    assert report.terminal_shape == "variable-head"


def test_identity_cbv_classical():
    report = check_step_correspondence(T(r"(\x:X. x) y"), "cbv-classical")
    assert report.ok
    assert [(r.rule, len(r.labels)) for r in report.records[1:]] == [
        ("fun", 1), ("arg", 1), ("beta", 1)]


def test_terminal_start_has_no_transitions():
    report = check_step_correspondence(T("x"), "cbn-int")
    assert report.ok and report.steps == 0 and report.transitions == 0


def test_value_trace_is_empty():
    assert len(run_trace(T(r"\x:X. x"), "cbv-int")) == 1


def test_church_two_cbn_int():
    entry = next(e for e in CORPUS if e.name == "church2")
    records = run_trace(entry.term, "cbn-int", alpha=fresh_covariable(entry))
    assert records[-1].verdict == "match"


def test_control_duplicates_the_continuation():
    entry = next(e for e in CORPUS if e.name == "mu_dup")
    report = check_step_correspondence(entry.term, "cbn-classical", alpha=fresh_covariable(entry))
    assert report.ok and report.steps > 0


CASES = [(e, s) for e in CORPUS for s in e.strategies if s in LOCKSTEP]


@pytest.mark.parametrize("entry,strategy", CASES, ids=lambda x: getattr(x, "name", x))
def test_corpus_lockstep(entry, strategy):
    report = check_step_correspondence(entry.term, strategy, alpha=fresh_covariable(entry))
    assert report.ok, report.mismatches


@pytest.mark.parametrize("entry,strategy", CASES, ids=lambda x: getattr(x, "name", x))
def test_corpus_traces_match_goldens(entry, strategy):
    path = ROOT / "golden" / strategy / f"{entry.name}.trace"
    golden = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    report = check_step_correspondence(entry.term, strategy, alpha=fresh_covariable(entry))
    fresh = [json.loads(line) for line in report.lines()]
    assert len(fresh) == len(golden)
    assert all(same_record(a, b) for a, b in zip(fresh, golden))


def test_canonical_text_renumbers_generated_names():
    assert canonical_text("nu x_41. 'x_41<y_7>") == canonical_text("nu x_3. 'x_3<y_9>")
    assert canonical_text("nu x_1. 'x_1<y_2>") != canonical_text("nu x_1. 'y_2<x_1>")


def test_records_have_a_stable_field_order():
    report = check_step_correspondence(T(r"(\x:X. x) y"), "cbn-int")
    assert list(json.loads(report.lines()[0])) == ["step", "exec", "process", "labels", "verdict"]


# -- head linear reduction -----------------------------------------------------

def test_hlr_lockstep_identity():
    report = check_hlr_lockstep(T(r"(\x:X. x) y"), {"y": TVar("X")})
    assert report.ok and report.steps == 1


def test_hlr_lockstep_church_addition():
    entry = next(e for e in CORPUS if e.name == "church_add")
    report = check_hlr_lockstep(entry.term, entry.context)
    assert report.ok and report.steps == 3


# -- probes --------------------------------------------------------------------

def test_probe_construction():
    t = build_probe(parse_sequent("u : up X; v : !Y"))
    assert alpha_equal(t, parse_process("u(x).'omega<> | 'v(y).'omega<>", allow_reserved=True))


def test_probe_smallest_instance():
    assert deadlock_probe(P("'u(x).1"), parse_sequent("u : up X")) == PASS


def test_probe_weakened_entries():
    assert deadlock_probe(P("1"), parse_sequent("u : ?X; v : ?Y")) == PASS


def test_probe_negative_control():
    assert deadlock_probe(P("nu a,b.(a().'b().1 | b().'a().1)")) == FAIL


def test_probe_rejects_reserved_channel():
    with pytest.raises(ValueError):
        P("'omega<>")
    with pytest.raises(ValueError):
        deadlock_probe(parse_process("'omega<>", allow_reserved=True))


def test_probe_requires_covered_names():
    with pytest.raises(ValueError):
        deadlock_probe(P("'u<x>"), parse_sequent("u : ?X"))


PROBE_CASES = [(e, s) for e in CORPUS for s in e.strategies]


@pytest.mark.parametrize("entry,strategy", PROBE_CASES, ids=lambda x: getattr(x, "name", x))
def test_corpus_probes(entry, strategy):
    pair = preset(strategy)
    p = translate(entry.term, pair, "u")
    assert deadlock_probe(p, theorem_sequent(entry, pair, "u")) == PASS


def test_translations_reduce_deterministically_from_the_start():
    for entry in CORPUS:
        for s in entry.strategies:
            if s in LOCKSTEP:
                assert len(reduce(admin_normalize(translate(entry.term, preset(s), "a")))) <= 1
