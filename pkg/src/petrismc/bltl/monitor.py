"""Incremental monitoring by formula progression.

The formula is rewritten against each incoming sample. What remains after a
sample (the *residual*) is a boolean combination of pending Until
obligations; each remembers the time and index of the sample it was opened
at, so the bound check at a later sample is ``t - t_open <= T`` (or
``i - i_open <= n``), exactly as in the offline evaluator.

Feeding a run of identical states is fast-forwarded: if progressing the
residual against the state leaves it unchanged, it stays unchanged for the
same state until the earliest pending bound expires, so the samples in
between can be skipped without being inspected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from ..errors import OrderingError
from .formula import FALSE, TRUE, And, BoolVar, Compare, Const, Formula, Not, Or, Until, desugar
from .semantics import atom_holds


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDECIDED = "undecided"

    @property
    def conclusive(self) -> bool:
        return self is not Verdict.UNDECIDED


@dataclass(frozen=True, slots=True)
class _Pending:
    left: Formula
    right: Formula
    limit: float
    steps: bool
    t0: float
    i0: int


def _and(a, b):
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    return And(a, b)


def _or(a, b):
    if a is TRUE or b is TRUE:
        return TRUE
    if a is FALSE:
        return b
    if b is FALSE:
        return a
    return Or(a, b)


def _not(a):
    if a is TRUE:
        return FALSE
    if a is FALSE:
        return TRUE
    if type(a) is Not:
        return a.arg
    return Not(a)


def _progress(f, state, t, i):
    """Residual of a core formula opened at the current sample."""
    tp = type(f)
    if tp is Const:
        return TRUE if f.value else FALSE
    if tp is BoolVar or tp is Compare:
        return TRUE if atom_holds(f, state) else FALSE
    if tp is Not:
        return _not(_progress(f.arg, state, t, i))
    if tp is And:
        a = _progress(f.left, state, t, i)
        return FALSE if a is FALSE else _and(a, _progress(f.right, state, t, i))
    if tp is Or:
        a = _progress(f.left, state, t, i)
        return TRUE if a is TRUE else _or(a, _progress(f.right, state, t, i))
    if tp is Until:
        b = f.bound
        return _expand(_Pending(f.left, f.right, b.value, b.steps, t, i), state, t, i)
    raise TypeError(f"not a core formula: {f!r}")


def _expand(p, state, t, i):
    elapsed = (i - p.i0) if p.steps else (t - p.t0)
    if elapsed > p.limit:
        return FALSE
    r = _progress(p.right, state, t, i)
    if r is TRUE:
        return TRUE
    return _or(r, _and(_progress(p.left, state, t, i), p))


def _advance(res, state, t, i):
    """Residual after one more sample."""
    tp = type(res)
    if tp is _Pending:
        return _expand(res, state, t, i)
    if tp is Not:
        return _not(_advance(res.arg, state, t, i))
    if tp is And:
        a = _advance(res.left, state, t, i)
        return FALSE if a is FALSE else _and(a, _advance(res.right, state, t, i))
    if tp is Or:
        a = _advance(res.left, state, t, i)
        return TRUE if a is TRUE else _or(a, _advance(res.right, state, t, i))
    return res


def _close(res):
    """Value of a residual when no further sample will arrive."""
    tp = type(res)
    if tp is _Pending:
        return False
    if tp is Not:
        return not _close(res.arg)
    if tp is And:
        return _close(res.left) and _close(res.right)
    if tp is Or:
        return _close(res.left) or _close(res.right)
    return res.value


def _pending(res, out):
    tp = type(res)
    if tp is _Pending:
        out.append(res)
    elif tp is Not:
        _pending(res.arg, out)
    elif tp is And or tp is Or:
        _pending(res.left, out)
        _pending(res.right, out)
    return out


class Monitor:
    """Incremental verdict for one formula over one trace.

    >>> from petrismc.bltl import parse
    >>> m = Monitor(parse("F<=10 p"))
    >>> m.feed_state({"p": True}, 0.0)
    <Verdict.TRUE: 'true'>
    """

    def __init__(self, formula: Formula):
        self.formula = formula
        self._core = desugar(formula)
        self._res = None
        self._time = None
        self._index = -1
        self.verdict = Verdict.UNDECIDED
        self.samples_seen = 0

    def feed(self, sample) -> Verdict:
        return self.feed_run(sample.state, (sample.time,))

    def feed_state(self, state, time: float) -> Verdict:
        return self.feed_run(state, (time,))

    def feed_run(self, state, times: Sequence[float]) -> Verdict:
        """Feed the same ``state`` observed at each of ``times`` (nondecreasing)."""
        if self.verdict is not Verdict.UNDECIDED:
            return self.verdict
        n = len(times)
        pos = 0
        while pos < n:
            t = times[pos]
            if self._time is not None and t < self._time:
                raise OrderingError(f"sample at t={t} after t={self._time}")
            self._index += 1
            self._time = t
            self.samples_seen += 1
            old = self._res
            if old is None:
                new = _progress(self._core, state, t, self._index)
            else:
                new = _advance(old, state, t, self._index)
            self._res = new
            if type(new) is Const:
                self.verdict = Verdict.TRUE if new.value else Verdict.FALSE
                return self.verdict
            if old is not None and pos + 1 < n and new == old:
                skip = self._skippable(new, times, pos)
                if skip:
                    pos += skip
                    self._index += skip
                    self._time = times[pos]
                    self.samples_seen += skip
            pos += 1
        return self.verdict

    def _skippable(self, res, times, pos) -> int:
        """How many of ``times[pos+1:]`` leave ``res`` unchanged."""
        last = len(times) - 1
        allowed = last - pos
        for p in _pending(res, []):
            if p.steps:
                allowed = min(allowed, int(p.limit) - (self._index - p.i0))
            else:
                lo, hi = pos, pos + allowed
                # largest q in [pos, hi] with times[q] - t0 <= limit
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if times[mid] - p.t0 <= p.limit:
                        lo = mid
                    else:
                        hi = mid - 1
                allowed = lo - pos
            if allowed <= 0:
                return 0
        return allowed

    def finish(self) -> bool:
        """Final verdict, closing any obligation still pending at trace end."""
        if self._res is None:
            raise ValueError("no sample was fed")
        if self.verdict is Verdict.UNDECIDED:
            self.verdict = Verdict.TRUE if _close(self._res) else Verdict.FALSE
        return self.verdict is Verdict.TRUE


def check_trace(formula: Formula, trace) -> bool:
    """Verdict of a monitor fed the whole trace."""
    m = Monitor(formula)
    for s in trace.samples:
        if m.feed(s).conclusive:
            break
    return m.finish()
