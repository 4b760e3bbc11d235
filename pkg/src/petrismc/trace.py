"""Observed variables, temporal resolution and timed execution traces.

Between two firings the marking is constant, so traces are produced as
*runs*: one observed state together with the ordered times at which it was
sampled. :func:`iter_runs` is the streaming primitive the checker consumes;
:func:`run_trace` expands it into an :class:`ExecutionTrace`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ClassificationError, ModelError, UnknownVariableError
from .sampling import RandomStream
from .shlpn import Marking, Net, firings

REWARD_PREFIX = "reward_"


@dataclass(frozen=True)
class Observer:
    """Marking-derived variables plus time-in-class reward accumulators.

    ``variables`` is a sequence of ``(name, fn(marking))``. ``rewards`` is a
    sequence of ``(class_name, predicate(marking))``; each class exposes a
    variable ``reward_<class_name>`` holding the time spent in that class.
    Exactly one class predicate must hold on every reached marking.
    """

    variables: tuple = ()
    rewards: tuple = ()
    names: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(tuple(v) for v in self.variables))
        object.__setattr__(self, "rewards", tuple(tuple(r) for r in self.rewards))
        names = tuple(n for n, _ in self.variables) + self.reward_names
        if len(set(names)) != len(names):
            raise ModelError(f"duplicate observed variable names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def reward_names(self) -> tuple:
        return tuple(REWARD_PREFIX + c for c, _ in self.rewards)

    def observe(self, marking: Marking) -> dict:
        return {n: fn(marking) for n, fn in self.variables}

    def classify(self, marking: Marking) -> int:
        hits = [i for i, (_, pred) in enumerate(self.rewards) if pred(marking)]
        if len(hits) != 1:
            state = self.observe(marking)
            which = [self.rewards[i][0] for i in hits] or "no class"
            raise ClassificationError(
                f"reward classes must partition the states; {which} matched {state}")
        return hits[0]


@dataclass(frozen=True)
class TemporalResolution:
    """When observed variables are sampled.

    ``tick`` samples every ``tick`` time units starting at 0; ``on_rules``
    samples right after any of the named rules fires; ``on_any_firing``
    samples after every firing. At equal times a firing sample precedes the
    tick sample and both are emitted.
    """

    tick: Optional[float] = None
    on_rules: frozenset = frozenset()
    on_any_firing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "on_rules", frozenset(self.on_rules))
        if self.tick is not None and not (self.tick > 0 and math.isfinite(self.tick)):
            raise ValueError(f"tick must be positive and finite, got {self.tick!r}")
        if self.tick is None and not self.on_rules and not self.on_any_firing:
            raise ValueError("a temporal resolution needs at least one event kind")

    @classmethod
    def every(cls, tick: float) -> "TemporalResolution":
        return cls(tick=tick)


@dataclass(frozen=True)
class TimedSample:
    state: Mapping
    time: float


class TickTimes(Sequence):
    """The times ``k * step`` for ``k`` in ``[first, stop)``."""

    __slots__ = ("first", "stop", "step")

    def __init__(self, first: int, stop: int, step: float):
        self.first, self.stop, self.step = first, stop, step

    def __len__(self):
        return max(0, self.stop - self.first)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        return (self.first + i) * self.step

    def __iter__(self):
        step = self.step
        return (k * step for k in range(self.first, self.stop))

    def __repr__(self):
        return f"TickTimes({self.first}, {self.stop}, {self.step})"


def _first_tick_at_or_after(t: float, step: float) -> int:
    k = max(0, math.ceil(t / step))
    while k > 0 and (k - 1) * step >= t:
        k -= 1
    while k * step < t:
        k += 1
    return k


def _last_tick_at_or_before(t: float, step: float) -> int:
    k = math.floor(t / step)
    while k * step > t:
        k -= 1
    while (k + 1) * step <= t:
        k += 1
    return k


@dataclass
class _Segment:
    start: float
    end: float
    marking: Marking
    rule: Optional[int]
    rewards: list
    cls: Optional[int]


def _segments(net: Net, observer: Observer, horizon: float, stream: RandomStream,
              classify: bool) -> Iterator[_Segment]:
    """Constant-marking intervals ``[start, end)`` until ``end > horizon``.

    ``rewards`` holds the accumulators at ``start``.
    """
    nrew = len(observer.rewards)
    rewards = [0.0] * nrew
    gen = firings(net, stream)
    t, rule, marking = 0.0, None, net.initial_marking
    while True:
        nxt = next(gen, None)
        end = math.inf if nxt is None else nxt[0]
        cls = observer.classify(marking) if classify else None
        yield _Segment(t, end, marking, rule, list(rewards), cls)
        if nxt is None or end > horizon:
            return
        if cls is not None:
            rewards[cls] += end - t
        t, rule, marking = nxt


def _check_variables(observer: Observer, variables) -> tuple:
    if variables is None:
        return observer.names
    variables = tuple(variables)
    unknown = [v for v in variables if v not in observer.names]
    if unknown:
        raise UnknownVariableError(f"unknown observed variables {unknown}")
    return variables


def iter_runs(net: Net, observer: Observer, resolution: TemporalResolution,
              horizon: float, stream: RandomStream,
              variables: Optional[Iterable[str]] = None) -> Iterator[tuple]:
    """Yield ``(state, times)`` runs covering all samples with time <= horizon.

    ``state`` maps each requested variable to its value and is shared by
    every time in ``times``. Reward variables change between ticks, so when
    any is requested each tick gets a run of its own.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    names = _check_variables(observer, variables)
    reward_index = {n: i for i, n in enumerate(observer.reward_names)}
    derived = [(n, fn) for n, fn in observer.variables if n in names]
    rewards_wanted = [(n, reward_index[n]) for n in names if n in reward_index]
    order = names
    tick = resolution.tick
    any_firing = resolution.on_any_firing
    watched = {net.rule_id(r) for r in resolution.on_rules} if resolution.on_rules else ()
    classify = bool(rewards_wanted)
    k_next = 0
    if tick is not None:
        if math.isinf(horizon):
            raise ValueError("tick sampling needs a finite horizon")
        k_last = _last_tick_at_or_before(horizon, tick)

    for seg in _segments(net, observer, horizon, stream, classify):
        base = {n: fn(seg.marking) for n, fn in derived}
        cls = seg.cls

        def state_at(t):
            if not rewards_wanted:
                return base if len(base) == len(order) else {n: base[n] for n in order}
            vals = dict(base)
            for n, i in rewards_wanted:
                vals[n] = seg.rewards[i] + (t - seg.start if i == cls else 0.0)
            return {n: vals[n] for n in order}

        if seg.rule is None:
            if tick is None:
                yield state_at(0.0), (0.0,)
        elif any_firing or seg.rule in watched:
            yield state_at(seg.start), (seg.start,)
        if tick is not None:
            k_stop = k_last + 1
            if not math.isinf(seg.end):
                k_stop = min(k_stop, _first_tick_at_or_after(seg.end, tick))
            if k_stop > k_next:
                if rewards_wanted:
                    for k in range(k_next, k_stop):
                        yield state_at(k * tick), (k * tick,)
                else:
                    yield state_at(0.0), TickTimes(k_next, k_stop, tick)
                k_next = k_stop


@dataclass(frozen=True)
class ExecutionTrace:
    variables: tuple
    samples: tuple

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def times(self) -> list:
        return [s.time for s in self.samples]

    def prefix(self, k: int) -> "ExecutionTrace":
        return prefix(self, k)

    def suffix(self, k: int) -> "ExecutionTrace":
        return suffix(self, k)

    def project(self, variables) -> "ExecutionTrace":
        return project(self, variables)


def run_trace(net: Net, observer: Observer, resolution: TemporalResolution,
              horizon: float, stream: RandomStream,
              variables: Optional[Iterable[str]] = None) -> ExecutionTrace:
    names = _check_variables(observer, variables)
    samples = []
    for state, times in iter_runs(net, observer, resolution, horizon, stream, names):
        samples.extend(TimedSample(state, t) for t in times)
    return ExecutionTrace(names, tuple(samples))


def values_at(net: Net, observer: Observer, resolution: TemporalResolution,
              times: Sequence[float], stream: RandomStream, variables=None) -> list:
    """State of the last sample with time <= T, for each T in ``times``.

    Equivalent to the final sample of ``run_trace`` with horizon T, but a
    single simulation serves every T and ticks are never expanded.
    """
    names = _check_variables(observer, variables)
    times = list(times)
    if not times or any(b <= a for a, b in zip(times, times[1:])) or times[0] < 0:
        raise ValueError("times must be non-negative and strictly increasing")
    reward_index = {n: i for i, n in enumerate(observer.reward_names)}
    fns = dict(observer.variables)
    tick = resolution.tick
    watched = {net.rule_id(r) for r in resolution.on_rules} if resolution.on_rules else ()
    results = [None] * len(times)
    pending = 0
    classify = any(n in reward_index for n in names)
    for seg in _segments(net, observer, times[-1], stream, classify):
        sampled_start = (seg.rule is None and tick is None) or (
            seg.rule is not None and (resolution.on_any_firing or seg.rule in watched))
        cls = seg.cls
        for j in range(pending, len(times)):
            T = times[j]
            if seg.start > T:
                break
            last = seg.start if sampled_start else None
            if tick is not None:
                k = _last_tick_at_or_before(min(T, seg.end), tick)
                if k * tick >= seg.end:
                    k -= 1
                if k >= 0 and k * tick >= seg.start and (last is None or k * tick >= last):
                    last = k * tick
            if last is not None:
                vals = {}
                for n in names:
                    if n in reward_index:
                        i = reward_index[n]
                        vals[n] = seg.rewards[i] + (last - seg.start if i == cls else 0.0)
                    else:
                        vals[n] = fns[n](seg.marking)
                results[j] = TimedSample(vals, last)
        while pending < len(times) and seg.end > times[pending]:
            pending += 1
    return results


def _check_index(trace: ExecutionTrace, k: int):
    if not 0 <= k < len(trace):
        raise IndexError(f"index {k} outside trace of length {len(trace)}")


def prefix(trace: ExecutionTrace, k: int) -> ExecutionTrace:
    """Samples ``0..k`` inclusive."""
    _check_index(trace, k)
    return ExecutionTrace(trace.variables, trace.samples[:k + 1])


def suffix(trace: ExecutionTrace, k: int) -> ExecutionTrace:
    """Samples ``k..end``."""
    _check_index(trace, k)
    return ExecutionTrace(trace.variables, trace.samples[k:])


def project(trace: ExecutionTrace, variables) -> ExecutionTrace:
    keep = tuple(v for v in trace.variables if v in set(variables))
    unknown = set(variables) - set(trace.variables)
    if unknown:
        raise UnknownVariableError(f"unknown variables {sorted(unknown)}")
    return ExecutionTrace(keep, tuple(
        TimedSample({v: s.state[v] for v in keep}, s.time) for s in trace.samples))


def format_value(v) -> str:
    if type(v) is bool:
        return "1" if v else "0"
    if type(v) is int:
        return str(v)
    return format(v, ".9g")


def write_csv(runs: Iterable[tuple], variables: Sequence[str], fh) -> int:
    """Write runs as trace CSV (``time,<vars>...``); returns the row count."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["time", *variables])
    rows = 0
    for state, times in runs:
        vals = [format_value(state[v]) for v in variables]
        for t in times:
            w.writerow([format_value(float(t)), *vals])
            rows += 1
    return rows


def trace_runs(trace: ExecutionTrace) -> Iterator[tuple]:
    for s in trace.samples:
        yield s.state, (s.time,)
