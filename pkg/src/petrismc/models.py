"""Simulation models: a net plus how it is observed, and the built-in registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bltl import Formula, parse
from .errors import ModelError
from .shlpn import Net, NetBuilder, TokenKind
from .trace import Observer, TemporalResolution


@dataclass(frozen=True)
class Model:
    net: Net
    observer: Observer
    resolution: TemporalResolution
    propositions: Mapping[str, Formula] = field(default_factory=dict)
    name: str = "model"

    def parse(self, text: str, constants=None) -> Formula:
        return parse(text, self.propositions, constants)

    def formula(self, f) -> Formula:
        return self.parse(f) if isinstance(f, str) else f


def race_model(rate1: float = 1.0, rate2: float = 3.0, tick: float = None) -> Model:
    """Two rules racing for one token; ``fired1``/``fired2`` record the winner.

    The first rule wins with probability ``rate1 / (rate1 + rate2)``.
    """
    b = NetBuilder()
    ready = b.place("ready", TokenKind.BOOL, 1, [True])
    f1 = b.place("fired1", TokenKind.BOOL, 1)
    f2 = b.place("fired2", TokenKind.BOOL, 1)
    for name, rate, out in (("t1", rate1, f1), ("t2", rate2, f2)):
        b.rule(name,
               guard=lambda m, out=out: m.count(ready) == 1 and m.count(out) == 0,
               rate=rate,
               effect=lambda m, out=out: m.edit().demark(ready).mark(out, True).done(),
               reads=(ready, out))
    net = b.build()
    observer = Observer([
        ("fired1", lambda m: m.count(f1) > 0),
        ("fired2", lambda m: m.count(f2) > 0),
    ])
    res = TemporalResolution(tick=tick, on_any_firing=True)
    return Model(net, observer, res, name="race")


def counter_model(rate: float = 1.0, tick: float = 1.0) -> Model:
    """A single always-enabled rule counting its own firings (a Poisson process)."""
    b = NetBuilder()
    c = b.place("count", TokenKind.INT, 1, [0])
    b.rule("tick", guard=lambda m: True, rate=rate,
           effect=lambda m: m.with_values({c: m.get(c) + 1}), reads=(c,))
    observer = Observer([("count", lambda m: m.get(c))])
    return Model(b.build(), observer, TemporalResolution(tick=tick), name="counter")


def builtin_models() -> dict:
    from . import controlsys
    return {
        "controlsys": controlsys.model_from_config,
        "race": lambda cfg: race_model(float(cfg.get("rate1", 1.0)), float(cfg.get("rate2", 3.0))),
        "counter": lambda cfg: counter_model(float(cfg.get("rate", 1.0))),
    }


def load_model(ref: str, config: Mapping = None) -> Model:
    """A built-in model by name, or a declarative net file by path."""
    config = dict(config or {})
    builtins = builtin_models()
    if ref in builtins:
        return builtins[ref](config)
    if ref.endswith(".json"):
        from .netfile import load_net_file
        return load_net_file(ref)
    raise ModelError(f"unknown model {ref!r}; built-ins are {sorted(builtins)}")
