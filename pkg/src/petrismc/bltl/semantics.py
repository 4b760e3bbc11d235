"""Satisfaction of a formula by a finite execution trace.

``evaluate(phi, trace, k)`` decides whether the suffix starting at sample
``k`` satisfies ``phi``. ``p U<=T q`` holds at ``k`` iff some ``i >= 0``
exists with ``q`` at ``k+i``, ``t[k+i] - t[k] <= T`` (for a step bound,
``i <= n``) and ``p`` at every ``k+j`` for ``j < i``. On a finite trace the
witness must be an existing sample; without one the Until is false.
"""

from __future__ import annotations

import operator

from ..errors import KindMismatchError, UnknownVariableError
from .formula import (
    And,
    BoolVar,
    Compare,
    Const,
    Eventually,
    Formula,
    Globally,
    Implies,
    Not,
    Or,
    Until,
)

_OPS = {
    "<": operator.lt, "<=": operator.le, "=": operator.eq,
    "!=": operator.ne, ">=": operator.ge, ">": operator.gt,
}


def atom_holds(atom, state) -> bool:
    try:
        v = state[atom.name]
    except KeyError:
        raise UnknownVariableError(f"variable {atom.name!r} is not observed") from None
    if type(atom) is BoolVar:
        if type(v) is not bool:
            raise KindMismatchError(f"{atom.name!r} is {type(v).__name__}, used as a boolean")
        return v
    if type(v) is bool:
        raise KindMismatchError(f"boolean {atom.name!r} compared with {atom.value!r}")
    return _OPS[atom.op](v, atom.value)


def _within(bound, times, k, i) -> bool:
    if bound.steps:
        return i <= bound.value
    return times[k + i] - times[k] <= bound.value


def evaluate(formula: Formula, trace, k: int = 0) -> bool:
    """Offline satisfaction of ``formula`` by ``trace`` from sample ``k``."""
    n = len(trace)
    if not 0 <= k < n:
        raise IndexError(f"start index {k} outside trace of length {n}")
    states = [s.state for s in trace.samples]
    times = [s.time for s in trace.samples]
    memo = {}

    def sat(f, k):
        key = (id(f), k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        memo[key] = out = _sat(f, k)
        return out

    def _sat(f, k):
        tp = type(f)
        if tp is Const:
            return f.value
        if tp is BoolVar or tp is Compare:
            return atom_holds(f, states[k])
        if tp is Not:
            return not sat(f.arg, k)
        if tp is And:
            return sat(f.left, k) and sat(f.right, k)
        if tp is Or:
            return sat(f.left, k) or sat(f.right, k)
        if tp is Implies:
            return (not sat(f.left, k)) or sat(f.right, k)
        if tp is Until:
            i = 0
            while k + i < n and _within(f.bound, times, k, i):
                if sat(f.right, k + i):
                    return True
                if not sat(f.left, k + i):
                    return False
                i += 1
            return False
        if tp is Eventually:
            i = 0
            while k + i < n and _within(f.bound, times, k, i):
                if sat(f.arg, k + i):
                    return True
                i += 1
            return False
        if tp is Globally:
            i = 0
            while k + i < n and _within(f.bound, times, k, i):
                if not sat(f.arg, k + i):
                    return False
                i += 1
            return True
        raise TypeError(f"not a formula: {f!r}")

    return sat(formula, k)
