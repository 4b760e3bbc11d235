"""A small JSON net format for tests and oracles.

Rules have constant rates and act on the first token of named places::

    {
      "places": [
        {"name": "ready", "kind": "bool", "tokens": [true]},
        {"name": "fired1", "kind": "bool", "observe": "marked"},
        {"name": "count", "kind": "int", "tokens": [0], "observe": "value"}
      ],
      "rules": [
        {"name": "t1", "rate": 1.0, "inputs": ["ready"], "outputs": {"fired1": true},
         "tests": [["count", "<", 5]], "updates": {"count": {"add": 1}}}
      ],
      "tick": 1.0,
      "on_any_firing": true
    }

``inputs`` each need a token and lose their first one; ``outputs`` gain a
token with the given value and need free capacity; ``tests`` compare the
first token value; ``updates`` set or add to it. ``observe`` is one of
``value`` (first token; the place should never be empty), ``count`` or
``marked``.
"""

from __future__ import annotations

import json
import operator
from pathlib import Path

from .errors import ModelError
from .models import Model
from .shlpn import NetBuilder, TokenKind
from .trace import Observer, TemporalResolution

_OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge,
        "=": operator.eq, "==": operator.eq, "!=": operator.ne}
_KINDS = {"int": TokenKind.INT, "bool": TokenKind.BOOL}


def _fail(where, msg):
    raise ModelError(f"{where}: {msg}")


def _rule_parts(b, spec, where, pid, places):
    rate = spec.get("rate")
    if type(rate) not in (int, float) or not rate > 0:
        _fail(where, f"rate must be a positive number, got {rate!r}")
    inputs = [pid(n, where) for n in spec.get("inputs", [])]
    outputs = [(pid(n, where), v) for n, v in dict(spec.get("outputs", {})).items()]
    for p, v in outputs:
        name, kind, _ = places[p]
        if not kind.accepts(v):
            _fail(where, f"output {name!r} expects {kind.value}, got {v!r}")
    tests = []
    for t in spec.get("tests", []):
        if len(t) != 3 or t[1] not in _OPS:
            _fail(where, f"bad test {t!r}; expected [place, op, value]")
        tests.append((pid(t[0], where), _OPS[t[1]], t[2]))
    updates = []
    for n, u in dict(spec.get("updates", {})).items():
        if not isinstance(u, dict) or len(u) != 1 or next(iter(u)) not in ("set", "add"):
            _fail(where, f"update of {n!r} must be {{\"set\": v}} or {{\"add\": n}}")
        updates.append((pid(n, where), *next(iter(u.items()))))

    growth = {}
    for p, _ in outputs:
        growth[p] = growth.get(p, 0) + 1
    for p in inputs:
        growth[p] = growth.get(p, 0) - 1
    growth = [(p, d) for p, d in growth.items() if d > 0]
    needs = {p for p in inputs} | {p for p, _, _ in tests} | {p for p, _, _ in updates}

    def guard(m):
        if any(m.count(p) == 0 for p in needs):
            return False
        for p, op, v in tests:
            if not op(m.get(p), v):
                return False
        for p, d in growth:
            if m.count(p) + d > places[p][2]:
                return False
        return True

    def effect(m):
        e = m.edit()
        for p, how, v in updates:
            e.set(p, v if how == "set" else e.get(p) + v, *m.tokens(p)[1:])
        for p in inputs:
            e.demark(p)
        for p, v in outputs:
            e.mark(p, v)
        return e.done()

    reads = sorted(needs | {p for p, _ in outputs})
    b.rule(spec.get("name") or where, guard, float(rate), effect, reads=reads)


def _observe(how, p, where):
    if how is True or how == "value":
        return lambda m: m.value(p)
    if how == "count":
        return lambda m: m.count(p)
    if how == "marked":
        return lambda m: m.count(p) > 0
    _fail(where, f"observe must be value, count or marked, got {how!r}")


def net_from_dict(data: dict, name: str = "netfile") -> Model:
    if not isinstance(data, dict):
        _fail(name, "top level must be an object")
    b = NetBuilder()
    ids = {}
    info = []
    variables = []
    for i, spec in enumerate(data.get("places", [])):
        where = f"{name}: places[{i}]"
        kind = _KINDS.get(spec.get("kind", "int"))
        if kind is None:
            _fail(where, f"kind must be int or bool, got {spec.get('kind')!r}")
        if "name" not in spec:
            _fail(where, "missing name")
        p = b.place(spec["name"], kind, spec.get("capacity", 1), spec.get("tokens", []))
        ids[spec["name"]] = p
        info.append((spec["name"], kind, spec.get("capacity", 1)))
        if spec.get("observe"):
            variables.append((spec["name"], _observe(spec["observe"], p, where)))

    def pid(n, where):
        if n not in ids:
            _fail(where, f"unknown place {n!r}")
        return ids[n]

    for i, spec in enumerate(data.get("rules", [])):
        _rule_parts(b, spec, f"{name}: rules[{i}]", pid, info)
    try:
        net = b.build()
    except ModelError as e:
        _fail(name, str(e))
    tick = data.get("tick")
    res = TemporalResolution(tick=None if tick is None else float(tick),
                             on_any_firing=bool(data.get("on_any_firing", tick is None)))
    return Model(net, Observer(variables), res, name=data.get("name", name))


def load_net_file(path) -> Model:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ModelError(f"cannot read net file {str(path)!r}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ModelError(f"{path}: invalid JSON ({e.msg}, line {e.lineno})") from e
    return net_from_dict(data, str(path))
