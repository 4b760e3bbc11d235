import random
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formulas import random_formula, random_state, random_trace
from petrismc.bltl import (
    FALSE,
    TRUE,
    And,
    BoolVar,
    Bound,
    Compare,
    Eventually,
    Globally,
    Implies,
    MixedBoundsWarning,
    Monitor,
    Not,
    Or,
    Until,
    Verdict,
    check_trace,
    depth,
    desugar,
    evaluate,
    format_formula,
    horizon,
    parse,
    variables,
)
from petrismc.bltl.formula import bounds
from petrismc.errors import KindMismatchError, OrderingError, ParseError, UnknownVariableError
from petrismc.trace import ExecutionTrace, TickTimes, TimedSample


def trace_of(*pairs, names=("p",)):
    return ExecutionTrace(names, tuple(TimedSample(s, t) for s, t in pairs))


def p_trace(*values_times):
    return trace_of(*(({"p": v}, t) for v, t in values_times))


# -- parsing ------------------------------------------------------------------

def test_parse_case_study_property():
    f = parse("F<=720 (number_sensors < 37 & proci_status = 2)")
    assert f == Eventually(And(Compare("number_sensors", "<", 37),
                               Compare("proci_status", "=", 2)), Bound(720.0))


def test_parse_until_with_constant():
    f = parse("!shutdown U<=T failure_1", constants={"T": 86400})
    assert f == Until(Not(BoolVar("shutdown")), BoolVar("failure_1"), Bound(86400.0))


def test_parse_nesting():
    assert parse("G<=10 (F<=5 p)") == Globally(Eventually(BoolVar("p"), Bound(5.0)), Bound(10.0))
    assert parse("G<=10 F<=5 p") == parse("G<=10 (F<=5 p)")


def test_precedence():
    p, q, r = BoolVar("p"), BoolVar("q"), BoolVar("r")
    b = Bound(1.0)
    assert parse("!p U<=1 q & r") == And(Until(Not(p), q, b), r)
    assert parse("p | q & r") == Or(p, And(q, r))
    assert parse("p -> q | r") == Implies(p, Or(q, r))
    assert parse("p U<=1 q U<=1 r") == Until(p, Until(q, r, b), b)
    assert parse("p -> q -> r") == Implies(p, Implies(q, r))
    assert parse("p & q & r") == And(And(p, q), r)


def test_parse_atoms_and_constants():
    assert parse("true") == TRUE
    assert parse("false") == FALSE
    assert parse("x >= -2") == Compare("x", ">=", -2)
    assert parse("x == 1.5") == Compare("x", "=", 1.5)
    assert parse("x != 0") == Compare("x", "!=", 0)


def test_parse_step_bounds_and_units():
    assert parse("F#3 p") == Eventually(BoolVar("p"), Bound(3, steps=True))
    assert parse("F<=1d p").bound == Bound(2880.0)
    assert parse("F<=30m p").bound == Bound(60.0)
    assert parse("F<=12h p").bound == Bound(1440.0)


def test_parse_propositions():
    props = {"failure_1": parse("x > 3")}
    assert parse("failure_1 | p", props) == Or(Compare("x", ">", 3), BoolVar("p"))


@pytest.mark.parametrize("text,line,col", [
    ("p ^ q", 1, 3),
    ("p &\n  & q", 2, 3),
    ("(p", 1, 3),
    ("x < ", 1, 5),
    ("F<=0 p", 1, 2),
    ("G#0 p", 1, 3),
    ("p q", 1, 3),
])
def test_parse_errors_have_location(text, line, col):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(e.value)


def test_mixed_bounds_warn():
    with pytest.warns(MixedBoundsWarning):
        parse("F<=1 (G#2 p)")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse("F<=1 (G<=2 p)")
        parse("F#1 (G#2 p)")


def test_bound_validation():
    for bad in (0, -1, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            Bound(bad)
    with pytest.raises(ValueError):
        Bound(1.5, steps=True)


names = st.sampled_from(["p", "q", "x", "failure_1", "Fx", "Ux"])
atoms = st.one_of(
    st.just(TRUE), st.just(FALSE), names.map(BoolVar),
    st.builds(Compare, names, st.sampled_from(["<", "<=", "=", "!=", ">=", ">"]),
              st.one_of(st.integers(-50, 50), st.floats(-1e6, 1e6, allow_nan=False))),
)
bounds_st = st.one_of(
    st.floats(1e-3, 1e5, allow_nan=False, allow_infinity=False).map(Bound),
    st.integers(1, 50).map(lambda n: Bound(n, steps=True)),
)
formula_st = st.recursive(atoms, lambda sub: st.one_of(
    sub.map(Not),
    st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Implies, sub, sub),
    st.builds(Until, sub, sub, bounds_st),
    st.builds(Eventually, sub, bounds_st), st.builds(Globally, sub, bounds_st),
), max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(formula_st)
def test_print_parse_round_trip(f):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MixedBoundsWarning)
        assert parse(format_formula(f)) == f


def test_formula_helpers():
    f = parse("F<=5 (p U<=2 G<=1 q) & x > 1")
    assert variables(f) == {"p", "q", "x"}
    assert depth(f) == 4
    assert horizon(f) == 8.0
    assert horizon(parse("F#3 p"), tick=2.0) == 6.0
    with pytest.raises(ValueError):
        horizon(parse("F#3 p"))
    assert desugar(parse("G<=1 p")) == Not(Until(TRUE, Not(BoolVar("p")), Bound(1.0)))


# -- offline semantics --------------------------------------------------------

def test_evaluate_cumulative_time():
    tr = p_trace((False, 0), (False, 1), (True, 2))
    assert evaluate(parse("F<=2 p"), tr)
    assert not evaluate(parse("F<=1 p"), tr)
    assert evaluate(parse("F<=1 p"), tr, 1)
    assert evaluate(parse("F#2 p"), tr) and not evaluate(parse("F#1 p"), tr)


def test_evaluate_constants():
    tr = p_trace((False, 0))
    assert evaluate(TRUE, tr) and not evaluate(FALSE, tr)


def test_until_witness_at_start():
    tr = trace_of(({"p": False, "q": True}, 0), names=("p", "q"))
    assert evaluate(parse("p U<=3 q"), tr)


def test_until_needs_left_until_witness():
    tr = trace_of(({"p": True, "q": False}, 0), ({"p": False, "q": False}, 1),
                  ({"p": False, "q": True}, 2), names=("p", "q"))
    assert not evaluate(parse("p U<=5 q"), tr)
    assert evaluate(parse("F<=5 q"), tr)


def test_finite_trace_closure():
    tr = p_trace((False, 0), (False, 1))
    assert not evaluate(parse("F<=10 p"), tr)
    assert evaluate(parse("G<=10 !p"), tr)


def test_evaluate_errors():
    tr = trace_of(({"p": True, "n": 3}, 0), names=("p", "n"))
    with pytest.raises(UnknownVariableError):
        evaluate(parse("zz"), tr)
    with pytest.raises(KindMismatchError):
        evaluate(parse("p > 1"), tr)
    with pytest.raises(KindMismatchError):
        evaluate(parse("n"), tr)
    with pytest.raises(IndexError):
        evaluate(parse("p"), tr, 1)


def test_derived_identities_on_random_corpus():
    rng = random.Random(2)
    for _ in range(2000):
        phi = random_formula(rng, 3)
        tr = random_trace(rng, rng.randint(1, 10), unit_steps=rng.random() < 0.5)
        b = Bound(rng.choice([1.0, 2.5, 4.0]))
        assert evaluate(Eventually(phi, b), tr) == evaluate(Until(TRUE, phi, b), tr)
        assert evaluate(Globally(phi, b), tr) == evaluate(Not(Eventually(Not(phi), b)), tr)


# -- monitor ------------------------------------------------------------------

def test_monitor_immediate_verdicts():
    m = Monitor(parse("G<=10 p"))
    assert m.feed(TimedSample({"p": False}, 0.0)) is Verdict.FALSE
    m = Monitor(parse("F<=10 p"))
    assert m.feed(TimedSample({"p": True}, 0.0)) is Verdict.TRUE
    assert m.feed(TimedSample({"p": False}, 1.0)) is Verdict.TRUE


def test_monitor_undecided_then_expires():
    m = Monitor(parse("F<=2 p"))
    assert m.feed_state({"p": False}, 0.0) is Verdict.UNDECIDED
    assert m.feed_state({"p": False}, 2.0) is Verdict.UNDECIDED
    assert m.feed_state({"p": True}, 2.5) is Verdict.FALSE
    assert m.finish() is False


def test_monitor_finish_closes_pending():
    m = Monitor(parse("G<=5 p"))
    m.feed_state({"p": True}, 0.0)
    assert m.verdict is Verdict.UNDECIDED
    assert m.finish() is True


def test_monitor_rejects_time_going_backwards():
    m = Monitor(parse("F<=5 p"))
    m.feed_state({"p": False}, 1.0)
    with pytest.raises(OrderingError):
        m.feed_state({"p": False}, 0.5)


def test_monitor_finish_needs_a_sample():
    with pytest.raises(ValueError):
        Monitor(TRUE).finish()


def test_monitor_matches_evaluator_random():
    rng = random.Random(11)
    for i in range(3000):
        f = random_formula(rng, 4)
        tr = random_trace(rng, rng.randint(1, 10), unit_steps=i % 2 == 0)
        assert check_trace(f, tr) == evaluate(f, tr), format_formula(f)


def test_runs_match_sample_by_sample():
    rng = random.Random(12)
    for _ in range(1500):
        f = random_formula(rng, 3)
        s1, s2 = random_state(rng), random_state(rng)
        k1 = rng.randint(1, 30)
        k2 = rng.randint(k1 + 1, 45)
        samples = [TimedSample(s1, k * 0.5) for k in range(k1)]
        samples += [TimedSample(s2, k * 0.5) for k in range(k1, k2)]
        tr = ExecutionTrace(("p", "q", "x"), tuple(samples))
        m = Monitor(f)
        m.feed_run(s1, TickTimes(0, k1, 0.5))
        m.feed_run(s2, TickTimes(k1, k2, 0.5))
        assert m.finish() == evaluate(f, tr), format_formula(f)


def test_conclusive_verdicts_hold_on_every_extension():
    rng = random.Random(13)
    for _ in range(1500):
        f = random_formula(rng, 4)
        prefix = random_trace(rng, rng.randint(1, 8))
        m = Monitor(f)
        for s in prefix.samples:
            m.feed(s)
        if not m.verdict.conclusive:
            continue
        for _ in range(3):
            ext = random_trace(rng, rng.randint(0, 8), start=prefix.samples[-1].time + 1.0)
            full = ExecutionTrace(prefix.variables, prefix.samples + ext.samples)
            assert evaluate(f, full) == (m.verdict is Verdict.TRUE)


def test_monitor_termination_with_ticks():
    # conclusive within (1 + d) * ceil(M / tick) samples, where M is the
    # largest bound and d the nesting depth counting atoms as one level
    rng = random.Random(14)
    for _ in range(1500):
        f = random_formula(rng, 4, steps=False)
        tick = rng.choice([0.5, 1.0, 2.0])
        bs = [b.value for b in bounds(f)]
        M = max(bs, default=tick)
        limit = (1 + depth(f) + 1) * -(-M // tick)
        m = Monitor(f)
        k = 0
        while not m.feed_state(random_state(rng), k * tick).conclusive:
            k += 1
            assert k < limit + 1
        assert m.samples_seen <= limit

