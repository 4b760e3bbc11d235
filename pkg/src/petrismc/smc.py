"""Statistical model checking over simulated traces.

Trace ``i`` of a query seeded with ``seed`` is always generated from
``derive_stream(RandomStream(seed), i)``, and outcomes are reduced in trace
index order, so results do not depend on the number of worker processes.
"""

from __future__ import annotations

import math
import multiprocessing
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

from .bltl import Formula, Monitor, format_formula
from .bltl import horizon as formula_horizon
from .bltl import variables as formula_variables
from .errors import QueryError, UnknownVariableError
from .models import Model
from .sampling import RandomStream, derive_stream
from .trace import iter_runs, values_at

Z95 = 1.959963984540054


@dataclass(frozen=True)
class FixedRuns:
    n: int

    def __post_init__(self):
        if type(self.n) is not int or self.n < 1:
            raise QueryError(f"number of runs must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class ChernoffBound:
    epsilon: float
    delta: float

    def __post_init__(self):
        _check_open_unit("epsilon", self.epsilon)
        _check_open_unit("delta", self.delta)


@dataclass(frozen=True)
class Sprt:
    theta: float
    alpha: float = 0.01
    beta: float = 0.01
    half_width: float = 0.05

    def __post_init__(self):
        for name in ("theta", "alpha", "beta", "half_width"):
            _check_open_unit(name, getattr(self, name))
        if not (self.theta - self.half_width > 0 and self.theta + self.half_width < 1):
            raise QueryError("indifference region must lie inside (0, 1): "
                             f"theta={self.theta}, half_width={self.half_width}")


@dataclass(frozen=True)
class Expectation:
    variable: str
    at_time: float
    n: int

    def __post_init__(self):
        if not (self.at_time > 0 and math.isfinite(self.at_time)):
            raise QueryError(f"time must be positive, got {self.at_time!r}")
        FixedRuns(self.n)


def _check_open_unit(name, value):
    if not (isinstance(value, (int, float)) and 0 < value < 1):
        raise QueryError(f"{name} must lie in (0, 1), got {value!r}")


@dataclass
class VerificationResult:
    kind: str
    property: str
    parameters: dict
    estimate: float
    ci_low: Optional[float]
    ci_high: Optional[float]
    verdict: Optional[str]
    traces_used: int
    seed: int
    elapsed_seconds: float = 0.0
    stderr: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2


def chernoff_sample_size(epsilon: float, delta: float) -> int:
    """Runs needed so that ``P(|p_hat - p| >= epsilon) <= delta``.

    Okamoto's two-sided bound ``ceil(ln(2/delta) / (2 epsilon^2))``.
    """
    _check_open_unit("epsilon", epsilon)
    _check_open_unit("delta", delta)
    return math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon))


def normal_ci(p_hat: float, n: int) -> tuple:
    w = Z95 * math.sqrt(p_hat * (1.0 - p_hat) / n)
    return max(0.0, p_hat - w), min(1.0, p_hat + w)


# -- trace farming ---------------------------------------------------------

_TASK: Optional[Callable] = None


def _run_chunk(bounds):
    lo, hi = bounds
    return [_TASK(i) for i in range(lo, hi)]


def map_traces(task: Callable[[int], object], start: int, stop: int, jobs: int = 1) -> list:
    """``[task(i) for i in range(start, stop)]``, optionally over forked workers."""
    global _TASK
    if jobs <= 1 or stop - start < 2:
        return [task(i) for i in range(start, stop)]
    n = stop - start
    size = max(1, math.ceil(n / (jobs * 4)))
    chunks = [(lo, min(lo + size, stop)) for lo in range(start, stop, size)]
    _TASK = task
    try:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_run_chunk, chunks)
    finally:
        _TASK = None
    return [x for part in parts for x in part]


def check_variables(model: Model, formulas) -> tuple:
    wanted = set()
    for f in formulas:
        wanted |= formula_variables(f)
    unknown = sorted(wanted - set(model.observer.names))
    if unknown:
        raise UnknownVariableError(
            f"formula reads {unknown}, not produced by the observer of {model.name!r}")
    return tuple(v for v in model.observer.names if v in wanted)


def query_horizon(model: Model, formulas: Sequence[Formula]) -> float:
    h = max(formula_horizon(f, model.resolution.tick) for f in formulas)
    # a formula without temporal operators only needs the t = 0 sample
    return h if h > 0 else (model.resolution.tick or 1.0)


def trace_verdicts(model: Model, formulas: Sequence[Formula], stream: RandomStream,
                   horizon: Optional[float] = None, names=None) -> tuple:
    """Monitor every formula on one trace, stopping once all are decided."""
    if names is None:
        names = check_variables(model, formulas)
    if horizon is None:
        horizon = query_horizon(model, formulas)
    monitors = [Monitor(f) for f in formulas]
    live = monitors
    for state, times in iter_runs(model.net, model.observer, model.resolution,
                                  horizon, stream, names):
        for m in live:
            m.feed_run(state, times)
        live = [m for m in live if not m.verdict.conclusive]
        if not live:
            break
    return tuple(m.finish() for m in monitors)


def _verdict_task(model, formulas, seed):
    names = check_variables(model, formulas)
    horizon = query_horizon(model, formulas)
    master = RandomStream(seed)

    def task(i):
        return trace_verdicts(model, formulas, derive_stream(master, i), horizon, names)
    return task


def count_satisfying(model: Model, formulas: Sequence, n: int, seed: int, jobs: int = 1) -> list:
    """Number of the first ``n`` traces satisfying each formula.

    Every formula sees exactly the traces it would see in a query of its
    own: traces are prefix-consistent in the horizon and each verdict only
    depends on samples within the formula's own bound.
    """
    formulas = [model.formula(f) for f in formulas]
    outcomes = map_traces(_verdict_task(model, formulas, seed), 0, n, jobs)
    return [sum(o[j] for o in outcomes) for j in range(len(formulas))]


def _property_text(f) -> str:
    return f if isinstance(f, str) else format_formula(f)


def estimate_fixed(model: Model, formula, n: int, seed: int, jobs: int = 1) -> VerificationResult:
    t0 = time.perf_counter()
    FixedRuns(n)
    text = _property_text(formula)
    k = count_satisfying(model, [formula], n, seed, jobs)[0]
    p = k / n
    lo, hi = normal_ci(p, n)
    return VerificationResult("fixed", text, {"n": n}, p, lo, hi,
                              None, n, seed, time.perf_counter() - t0)


def estimate_chernoff(model: Model, formula, epsilon: float, delta: float, seed: int,
                      jobs: int = 1) -> VerificationResult:
    t0 = time.perf_counter()
    n = chernoff_sample_size(epsilon, delta)
    res = estimate_fixed(model, formula, n, seed, jobs)
    res.kind = "chernoff"
    res.parameters = {"epsilon": epsilon, "delta": delta, "n": n}
    res.elapsed_seconds = time.perf_counter() - t0
    return res


class SprtState:
    """Wald's test of ``p >= theta + w`` (H0) against ``p <= theta - w`` (H1)."""

    def __init__(self, theta, alpha, beta, half_width):
        Sprt(theta, alpha, beta, half_width)
        self.p1 = theta + half_width
        self.p0 = theta - half_width
        self.log_accept = math.log((1 - beta) / alpha)
        self.log_reject = math.log(beta / (1 - alpha))
        self._inc_true = math.log(self.p1 / self.p0)
        self._inc_false = math.log((1 - self.p1) / (1 - self.p0))
        self.llr = 0.0
        self.n = 0
        self.successes = 0
        self.decision: Optional[str] = None

    def update(self, outcome: bool) -> Optional[str]:
        if self.decision is not None:
            return self.decision
        self.n += 1
        if outcome:
            self.successes += 1
            self.llr += self._inc_true
        else:
            self.llr += self._inc_false
        if self.llr >= self.log_accept:
            self.decision = "Accept"
        elif self.llr <= self.log_reject:
            self.decision = "Reject"
        return self.decision


def sprt(model: Model, formula, theta: float, alpha: float, beta: float, half_width: float,
         seed: int, jobs: int = 1, max_traces: Optional[int] = None) -> VerificationResult:
    """Sequential test of ``P(formula) >= theta``.

    ``verdict`` is ``"Accept"`` (probability at least theta) or
    ``"Reject"``; ``None`` only if ``max_traces`` ran out first.
    """
    t0 = time.perf_counter()
    text = _property_text(formula)
    formula = model.formula(formula)
    state = SprtState(theta, alpha, beta, half_width)
    task = _verdict_task(model, [formula], seed)
    batch = 1 if jobs <= 1 else jobs * 8
    i = 0
    while state.decision is None and (max_traces is None or i < max_traces):
        stop = i + batch if max_traces is None else min(i + batch, max_traces)
        for (ok,) in map_traces(task, i, stop, jobs):
            if state.update(ok) is not None:
                break
        i = stop
    p = state.successes / state.n
    return VerificationResult(
        "sprt", text,
        {"theta": theta, "alpha": alpha, "beta": beta, "half_width": half_width},
        p, None, None, state.decision, state.n, seed, time.perf_counter() - t0)


def _mean_stderr(values: list) -> tuple:
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def expectation_values(model: Model, variables: Sequence[str], times: Sequence[float],
                       n: int, seed: int, jobs: int = 1) -> list:
    """Per trace, the value of each variable at each time: ``out[i][j][v]``."""
    unknown = [v for v in variables if v not in model.observer.names]
    if unknown:
        raise UnknownVariableError(f"unknown observed variables {unknown}")
    master = RandomStream(seed)
    variables, times = tuple(variables), tuple(times)

    def task(i):
        samples = values_at(model.net, model.observer, model.resolution, times,
                            derive_stream(master, i), variables)
        return tuple(tuple(s.state[v] for v in variables) for s in samples)
    return map_traces(task, 0, n, jobs)


def expectation_sweep(model: Model, variables: Sequence[str], times: Sequence[float],
                      n: int, seed: int, jobs: int = 1) -> dict:
    """``{(variable, T): (mean, stderr)}``; one simulation per trace serves all T."""
    per_trace = expectation_values(model, variables, times, n, seed, jobs)
    out = {}
    for j, T in enumerate(times):
        for k, v in enumerate(variables):
            out[(v, T)] = _mean_stderr([float(tr[j][k]) for tr in per_trace])
    return out


def estimate_expectation(model: Model, variable: str, at_time: float, n: int, seed: int,
                         jobs: int = 1) -> VerificationResult:
    """Mean of ``variable`` at the last sample no later than ``at_time``."""
    t0 = time.perf_counter()
    Expectation(variable, at_time, n)
    mean, se = expectation_sweep(model, [variable], [at_time], n, seed, jobs)[(variable, at_time)]
    return VerificationResult(
        "expectation", variable, {"at_time": at_time, "n": n}, mean,
        mean - Z95 * se, mean + Z95 * se, None, n, seed, time.perf_counter() - t0, se)


def run_query(model: Model, target, query, seed: int, jobs: int = 1) -> VerificationResult:
    """Dispatch a query object; ``target`` is a formula (or, for
    :class:`Expectation`, ignored in favour of the query's variable)."""
    if isinstance(query, FixedRuns):
        return estimate_fixed(model, target, query.n, seed, jobs)
    if isinstance(query, ChernoffBound):
        return estimate_chernoff(model, target, query.epsilon, query.delta, seed, jobs)
    if isinstance(query, Sprt):
        return sprt(model, target, query.theta, query.alpha, query.beta, query.half_width,
                    seed, jobs)
    if isinstance(query, Expectation):
        return estimate_expectation(model, query.variable, query.at_time, query.n, seed, jobs)
    raise QueryError(f"unknown query {query!r}")
