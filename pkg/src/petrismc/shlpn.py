"""Stochastic high-level Petri nets executed as a rule-based system.

A net is a set of capacity-bounded typed places and a set of rules. Each
rule carries a guard, a (possibly marking-dependent) exponential rate and an
effect, all plain callables over a :class:`Marking`. Execution follows the
forward-chaining loop Select / SolveConflicts / ApplyRule with race
semantics: the sojourn in a marking is Exp(sum of enabled rates) and rule
``k`` wins with probability ``rate_k / sum``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Iterator, Optional, Sequence, Union

from .errors import (
    CorruptEffectError,
    GuardViolationError,
    InvalidRateError,
    ModelError,
    NoEnabledRuleError,
)
from .sampling import RandomStream, pick_index, sample_discrete, sample_exponential


class TokenKind(enum.Enum):
    INT = "int"
    BOOL = "bool"

    def accepts(self, value) -> bool:
        if self is TokenKind.BOOL:
            return type(value) is bool
        return type(value) is int


@dataclass(frozen=True)
class Place:
    id: int
    name: str
    kind: TokenKind
    capacity: int = 1


class Marking:
    """Immutable assignment of ordered token sequences to places.

    Use :meth:`edit` to derive a modified marking; places that are not
    touched share their token tuples with the original.
    """

    __slots__ = ("_tokens", "_hash")

    def __init__(self, tokens: Sequence[Sequence]):
        self._tokens = tuple(tuple(t) for t in tokens)
        self._hash = None

    @classmethod
    def _wrap(cls, tokens: tuple) -> "Marking":
        m = cls.__new__(cls)
        m._tokens = tokens
        m._hash = None
        return m

    def __len__(self):
        return len(self._tokens)

    def tokens(self, place: int) -> tuple:
        return self._tokens[place]

    def count(self, place: int) -> int:
        return len(self._tokens[place])

    def get(self, place: int, index: int = 0):
        return self._tokens[place][index]

    def value(self, place: int, default=None):
        """First token of ``place``, or ``default`` when it is empty."""
        toks = self._tokens[place]
        return toks[0] if toks else default

    def edit(self) -> "MarkingEditor":
        return MarkingEditor(self)

    def with_values(self, values: dict) -> "Marking":
        """Copy with each listed place holding exactly one token."""
        toks = list(self._tokens)
        for p, v in values.items():
            toks[p] = (v,)
        return Marking._wrap(tuple(toks))

    def as_tuple(self) -> tuple:
        return self._tokens

    def __eq__(self, other):
        if not isinstance(other, Marking):
            return NotImplemented
        return self._tokens == other._tokens

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._tokens)
        return self._hash

    def __repr__(self):
        return f"Marking({list(self._tokens)!r})"


class MarkingEditor:
    """Mutable scratch copy of a marking, mirroring get/mark/demark."""

    __slots__ = ("_toks",)

    def __init__(self, marking: Marking):
        self._toks = list(marking.as_tuple())

    def get(self, place: int, index: int = 0):
        return self._toks[place][index]

    def count(self, place: int) -> int:
        return len(self._toks[place])

    def mark(self, place: int, value) -> "MarkingEditor":
        self._toks[place] = self._toks[place] + (value,)
        return self

    def demark(self, place: int, index: int = 0) -> "MarkingEditor":
        toks = self._toks[place]
        self._toks[place] = toks[:index] + toks[index + 1:]
        return self

    def set(self, place: int, *values) -> "MarkingEditor":
        self._toks[place] = tuple(values)
        return self

    def done(self) -> Marking:
        return Marking._wrap(tuple(self._toks))


Rate = Union[float, Callable[[Marking], float]]


@dataclass(frozen=True)
class Rule:
    """``if guard(M) then M := effect(M)`` after an Exp(rate(M)) delay.

    ``reads`` lists the places the guard and rate depend on. It lets the
    simulator re-evaluate only the rules touched by a firing; ``None``
    means the rule is re-evaluated after every firing.
    """

    name: str
    guard: Callable[[Marking], bool]
    rate: Rate
    effect: Callable[[Marking], Marking]
    reads: Optional[frozenset] = None
    id: int = -1

    def rate_at(self, marking: Marking) -> float:
        r = self.rate
        return r(marking) if callable(r) else r


def check_tokens(place: Place, tokens: tuple) -> Optional[str]:
    if len(tokens) > place.capacity:
        return (f"place {place.name!r} holds {len(tokens)} tokens, "
                f"capacity is {place.capacity}")
    for v in tokens:
        if not place.kind.accepts(v):
            return f"place {place.name!r} of kind {place.kind.value} holds {v!r}"
    return None


@dataclass(frozen=True)
class Net:
    places: tuple
    rules: tuple
    initial_marking: Marking
    _place_ids: dict = field(default_factory=dict, repr=False, compare=False)
    _rule_ids: dict = field(default_factory=dict, repr=False, compare=False)
    _dependents: tuple = field(default=(), repr=False, compare=False)
    _always: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "rules", tuple(self.rules))
        self._place_ids.update({p.name: p.id for p in self.places})
        self._rule_ids.update({r.name: r.id for r in self.rules})
        deps = [[] for _ in self.places]
        always = []
        for r in self.rules:
            if r.reads is None:
                always.append(r.id)
                continue
            for p in r.reads:
                if 0 <= p < len(deps):
                    deps[p].append(r.id)
        object.__setattr__(self, "_dependents", tuple(tuple(d) for d in deps))
        object.__setattr__(self, "_always", tuple(always))

    def place_id(self, name: str) -> int:
        try:
            return self._place_ids[name]
        except KeyError:
            raise ModelError(f"unknown place {name!r}") from None

    def rule_id(self, name: str) -> int:
        try:
            return self._rule_ids[name]
        except KeyError:
            raise ModelError(f"unknown rule {name!r}") from None


class NetBuilder:
    """Incremental construction of a :class:`Net` with dense ids."""

    def __init__(self):
        self._places: list[Place] = []
        self._tokens: list[tuple] = []
        self._rules: list[Rule] = []

    def place(self, name: str, kind: TokenKind = TokenKind.INT, capacity: int = 1,
              tokens: Sequence = ()) -> int:
        pid = len(self._places)
        self._places.append(Place(pid, name, TokenKind(kind), capacity))
        self._tokens.append(tuple(tokens))
        return pid

    def rule(self, name: str, guard, rate: Rate, effect, reads=None) -> int:
        rid = len(self._rules)
        reads = None if reads is None else frozenset(reads)
        self._rules.append(Rule(name, guard, rate, effect, reads, rid))
        return rid

    def build(self, validate: bool = True) -> Net:
        net = Net(self._places, self._rules, Marking(self._tokens))
        if validate:
            problems = validate_net(net)
            if problems:
                raise ModelError("; ".join(problems))
        return net


def validate_net(net: Net) -> list:
    """Diagnostics for a net; an empty list means the net is well formed."""
    out = []
    seen = set()
    for i, p in enumerate(net.places):
        if p.id != i:
            out.append(f"place {p.name!r} has id {p.id}, expected {i}")
        if p.name in seen:
            out.append(f"duplicate place name {p.name!r}")
        seen.add(p.name)
        if not isinstance(p.capacity, int) or p.capacity < 1:
            out.append(f"place {p.name!r} has capacity {p.capacity!r}, must be >= 1")
    seen = set()
    for i, r in enumerate(net.rules):
        if r.id != i:
            out.append(f"rule {r.name!r} has id {r.id}, expected {i}")
        if r.name in seen:
            out.append(f"duplicate rule name {r.name!r}")
        seen.add(r.name)
        if r.reads is not None:
            bad = sorted(p for p in r.reads if not 0 <= p < len(net.places))
            if bad:
                out.append(f"rule {r.name!r} reads unknown places {bad}")
    m = net.initial_marking
    if len(m) != len(net.places):
        out.append(f"initial marking covers {len(m)} places, net has {len(net.places)}")
    else:
        for p in net.places:
            msg = check_tokens(p, m.tokens(p.id))
            if msg:
                out.append("initial marking: " + msg)
    return out


@dataclass(frozen=True)
class EnabledSet:
    rule_ids: tuple
    rates: tuple
    total_rate: float

    def __bool__(self):
        return bool(self.rule_ids)

    def __len__(self):
        return len(self.rule_ids)


def _rate_of(rule: Rule, marking: Marking) -> float:
    r = rule.rate_at(marking)
    if not (r > 0 and math.isfinite(r)):
        raise InvalidRateError(f"rule {rule.name!r} is enabled with rate {r!r}")
    return float(r)


def select(net: Net, marking: Marking) -> EnabledSet:
    """The rules whose guard holds on ``marking``, in id order."""
    ids, rates = [], []
    for rule in net.rules:
        if rule.guard(marking):
            ids.append(rule.id)
            rates.append(_rate_of(rule, marking))
    return EnabledSet(tuple(ids), tuple(rates), math.fsum(rates))


def solve_conflicts(enabled: EnabledSet, stream: RandomStream) -> int:
    if not enabled:
        raise NoEnabledRuleError("no rule is enabled")
    return enabled.rule_ids[sample_discrete(stream, enabled.rates)]


def sample_sojourn(enabled: EnabledSet, stream: RandomStream) -> float:
    if not enabled:
        raise NoEnabledRuleError("no rule is enabled")
    return sample_exponential(stream, enabled.total_rate)


def _checked_effect(net: Net, marking: Marking, rule: Rule) -> tuple:
    new = rule.effect(marking)
    if not isinstance(new, Marking) or len(new) != len(net.places):
        raise CorruptEffectError(f"rule {rule.name!r} did not return a full marking")
    old_t, new_t = marking.as_tuple(), new.as_tuple()
    changed = [i for i in range(len(old_t))
               if old_t[i] is not new_t[i] and old_t[i] != new_t[i]]
    for i in changed:
        msg = check_tokens(net.places[i], new_t[i])
        if msg:
            raise CorruptEffectError(f"rule {rule.name!r}: {msg}")
    return new, changed


def apply_rule(net: Net, marking: Marking, rule_id: int) -> Marking:
    rule = net.rules[rule_id]
    if not rule.guard(marking):
        raise GuardViolationError(f"rule {rule.name!r} is not enabled")
    return _checked_effect(net, marking, rule)[0]


def step(net: Net, marking: Marking, now: float, stream: RandomStream):
    """One race step: ``(next marking, now + sojourn)``, or None if absorbing.

    The sojourn is drawn before the winner.
    """
    enabled = select(net, marking)
    if not enabled:
        return None
    dt = sample_sojourn(enabled, stream)
    k = solve_conflicts(enabled, stream)
    return apply_rule(net, marking, k), now + dt


def firings(net: Net, stream: RandomStream, marking: Optional[Marking] = None,
            start: float = 0.0, check_reads: bool = False) -> Iterator[tuple]:
    """Run the net forever, yielding ``(time, rule_id, marking)`` per firing.

    Draws are identical to repeated :func:`step` calls; rates are kept in a
    vector indexed by rule id and only rules reading a changed place are
    re-evaluated. ``check_reads`` re-selects from scratch after every firing
    and fails loudly when a rule's ``reads`` declaration is incomplete.
    """
    rules = net.rules
    marking = net.initial_marking if marking is None else marking
    rates = [0.0] * len(rules)
    for rule in rules:
        if rule.guard(marking):
            rates[rule.id] = _rate_of(rule, marking)
    deps, always = net._dependents, net._always
    fsum, log1p = math.fsum, math.log1p
    uniform = stream.uniform01
    now = start
    while True:
        total = fsum(rates)
        if total == 0.0:
            return
        dt = -log1p(-uniform()) / total
        k = pick_index(uniform() * total, list(accumulate(rates)), rates)
        marking, changed = _checked_effect(net, marking, rules[k])
        now += dt
        touched = set(always)
        for p in changed:
            touched.update(deps[p])
        for i in touched:
            rule = rules[i]
            rates[i] = _rate_of(rule, marking) if rule.guard(marking) else 0.0
        if check_reads:
            fresh = select(net, marking)
            expect = [0.0] * len(rules)
            for i, r in zip(fresh.rule_ids, fresh.rates):
                expect[i] = r
            if expect != rates:
                stale = [rules[i].name for i in range(len(rules)) if expect[i] != rates[i]]
                raise ModelError(f"incomplete reads declaration for rules {stale}")
        yield now, k, marking
