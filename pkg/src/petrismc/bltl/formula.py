"""Abstract syntax of bounded LTL and its concrete printed form."""

from __future__ import annotations

import math
from dataclasses import dataclass

COMPARISONS = ("<", "<=", "=", "!=", ">=", ">")


class Formula:
    __slots__ = ()

    def __str__(self):
        return format_formula(self)


@dataclass(frozen=True, slots=True)
class Bound:
    """A time bound, or with ``steps=True`` a number of samples."""

    value: float
    steps: bool = False

    def __post_init__(self):
        if self.steps:
            if self.value != int(self.value) or self.value < 1:
                raise ValueError(f"step bound must be a positive integer, got {self.value!r}")
            object.__setattr__(self, "value", int(self.value))
        elif not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"time bound must be positive and finite, got {self.value!r}")

    def __str__(self):
        if self.steps:
            return f"#{self.value}"
        return f"<={_num(self.value)}"


def as_bound(b) -> Bound:
    return b if isinstance(b, Bound) else Bound(float(b))


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, slots=True)
class BoolVar(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Compare(Formula):
    name: str
    op: str
    value: float

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")
        if type(self.value) not in (int, float) or not math.isfinite(self.value):
            raise ValueError(f"comparison constant must be a finite number, got {self.value!r}")


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula
    bound: Bound

    def __post_init__(self):
        object.__setattr__(self, "bound", as_bound(self.bound))


@dataclass(frozen=True, slots=True)
class Eventually(Formula):
    """``F<=T arg``, i.e. ``true U<=T arg``."""

    arg: Formula
    bound: Bound

    def __post_init__(self):
        object.__setattr__(self, "bound", as_bound(self.bound))


@dataclass(frozen=True, slots=True)
class Globally(Formula):
    """``G<=T arg``, i.e. ``!F<=T !arg``."""

    arg: Formula
    bound: Bound

    def __post_init__(self):
        object.__setattr__(self, "bound", as_bound(self.bound))


ATOMS = (BoolVar, Compare)
BINARY = (And, Or, Implies, Until)
UNARY = (Not, Eventually, Globally)


def children(f: Formula) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, UNARY):
        return (f.arg,)
    return ()


def variables(f: Formula) -> set:
    """Names of the observed variables the formula reads."""
    if isinstance(f, ATOMS):
        return {f.name}
    out = set()
    for c in children(f):
        out |= variables(c)
    return out


def depth(f: Formula) -> int:
    cs = children(f)
    return 1 + max(map(depth, cs)) if cs else 0


def bounds(f: Formula) -> list:
    out = [f.bound] if hasattr(f, "bound") else []
    for c in children(f):
        out.extend(bounds(c))
    return out


def horizon(f: Formula, tick: float = None) -> float:
    """Largest sum of time bounds along any nesting path.

    Step bounds count ``n * tick``; without a tick they cannot be turned into
    a time and a :class:`ValueError` is raised.
    """
    own = 0.0
    if hasattr(f, "bound"):
        if f.bound.steps:
            if tick is None:
                raise ValueError("step-count bounds need tick sampling to fix a horizon")
            own = f.bound.value * tick
        else:
            own = f.bound.value
    return own + max((horizon(c, tick) for c in children(f)), default=0.0)


def desugar(f: Formula) -> Formula:
    """Rewrite F, G and -> into the core ``true/false/atom/!/&/|/U`` forms."""
    if isinstance(f, Eventually):
        return Until(TRUE, desugar(f.arg), f.bound)
    if isinstance(f, Globally):
        return Not(Until(TRUE, Not(desugar(f.arg)), f.bound))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Not):
        return Not(desugar(f.arg))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right), f.bound)
    return f


# printing: higher binds tighter
_PREC = {Implies: 1, Or: 2, And: 3, Until: 4, Not: 5, Eventually: 5, Globally: 5}
_SYMBOL = {Implies: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = (Implies, Until)


def _num(v) -> str:
    if type(v) is int:
        return str(v)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(f) -> int:
    return _PREC.get(type(f), 6)


def format_formula(f: Formula) -> str:
    """Concrete syntax accepted by :func:`parse`, with minimal parentheses."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, BoolVar):
        return f.name
    if isinstance(f, Compare):
        v = f.value
        text = str(v) if type(v) is int else repr(float(v))
        return f"{f.name} {f.op} {text}"
    p = _prec(f)
    if isinstance(f, UNARY):
        inner = format_formula(f.arg)
        if _prec(f.arg) < p:
            inner = f"({inner})"
        if isinstance(f, Not):
            return "!" + inner
        op = "F" if isinstance(f, Eventually) else "G"
        return f"{op}{f.bound} {inner}"
    left, right = format_formula(f.left), format_formula(f.right)
    right_assoc = isinstance(f, _RIGHT_ASSOC)
    if _prec(f.left) < p or (right_assoc and _prec(f.left) == p):
        left = f"({left})"
    if _prec(f.right) < p or (not right_assoc and _prec(f.right) == p):
        right = f"({right})"
    op = f"U{f.bound}" if isinstance(f, Until) else _SYMBOL[type(f)]
    return f"{left} {op} {right}"
