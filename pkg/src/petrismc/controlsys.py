"""Embedded control system dependability model.

An input processor polls 50 groups of 3 sensors, an output processor drives
30 groups of 2 actuators, and a main processor runs the control cycle. The
system needs 37 functional sensor groups (2 of 3 sensors each) and 27
functional actuator groups (1 of 2 actuators each). Transient faults of the
I/O processors are repaired by a reboot; while an I/O processor is down the
main processor skips cycles, and more than ``skip_limit`` consecutive skips
shut the system down. A failed main processor shuts the system down too.

Marking encoding:

* one int place per sensor / actuator group holding its functional count;
* ``proc_i``, ``proc_o`` hold 2 (functional), 1 (transient fault,
  rebooting) or 0 (failed); ``proc_m`` holds 2 or 0;
* ``timeout`` holds the consecutive skipped cycles, latched once above the
  limit;
* ``shutdown`` is a bool flag; once set no rule is enabled;
* ``cycle_timer`` is marked while the control cycle runs;
* ``sensor_groups_ok``, ``actuator_groups_ok`` count functional groups and
  ``reboots_i``, ``reboots_o`` count completed reboots; these are
  maintained by the rule effects so guards never scan all groups.

A clean cycle with no skips pending leaves the marking unchanged, so the
cycle rule is only enabled when it would change something. Dropping such
self-loops leaves the marking process unchanged in distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .bltl import parse
from .errors import ModelError
from .models import Model
from .shlpn import NetBuilder, TokenKind
from .trace import Observer, TemporalResolution
from .units import DAY, MONTH, YEAR

FUNCTIONAL, REBOOTING, FAILED = 2, 1, 0


@dataclass(frozen=True)
class SystemParams:
    sensor_groups: int = 50
    sensors_per_group: int = 3
    sensor_quorum: int = 37
    sensors_per_group_quorum: int = 2
    actuator_groups: int = 30
    actuators_per_group: int = 2
    actuator_quorum: int = 27
    actuators_per_group_quorum: int = 1
    skip_limit: int = 4
    # mean times, in 30 s time units
    sensor_mttf: float = MONTH
    actuator_mttf: float = 2 * MONTH
    transient_mttf: float = DAY
    processor_mttf: float = YEAR
    cycle_time: float = 2.0
    reboot_mean: float = 1.0

    def problems(self) -> list:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type == "int" and (type(v) is not int or v < (0 if f.name == "skip_limit" else 1)):
                out.append(f"{f.name} must be a positive integer, got {v!r}")
            if f.type == "float" and not (isinstance(v, (int, float)) and v > 0):
                out.append(f"{f.name} must be a positive time, got {v!r}")
        if out:
            return out
        if self.sensor_quorum > self.sensor_groups:
            out.append("sensor_quorum exceeds sensor_groups")
        if self.sensors_per_group_quorum > self.sensors_per_group:
            out.append("sensors_per_group_quorum exceeds sensors_per_group")
        if self.actuator_quorum > self.actuator_groups:
            out.append("actuator_quorum exceeds actuator_groups")
        if self.actuators_per_group_quorum > self.actuators_per_group:
            out.append("actuators_per_group_quorum exceeds actuators_per_group")
        return out

    @classmethod
    def from_config(cls, config) -> "SystemParams":
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in config.items():
            if key not in known:
                raise ModelError(f"unknown controlsys parameter {key!r}")
            if known[key] == "int":
                if isinstance(value, float) and value.is_integer():
                    value = int(value)
                if type(value) is not int:
                    raise ModelError(f"{key} must be an integer, got {value!r}")
            else:
                if type(value) not in (int, float):
                    raise ModelError(f"{key} must be a number, got {value!r}")
                value = float(value)
            kwargs[key] = value
        return cls(**kwargs)


def failure_predicates(params: SystemParams = SystemParams()) -> dict:
    """``failure_1`` .. ``failure_4`` and ``shutdown`` over observed variables."""
    p = params
    f = {
        "failure_1": parse(f"number_sensors < {p.sensor_quorum} & proci_status = 2"),
        "failure_2": parse(f"number_actuators < {p.actuator_quorum} & proco_status = 2"),
        "failure_3": parse(f"timeout_counts > {p.skip_limit}"),
        "failure_4": parse("procm_status = 0"),
    }
    f["shutdown"] = parse("failure_1 | failure_2 | failure_3 | failure_4", f)
    return f


def build_model(params: SystemParams = SystemParams()) -> Model:
    problems = params.problems()
    if problems:
        raise ModelError("; ".join(problems))
    p = params
    b = NetBuilder()
    sensors = [b.place(f"sensor_g{g + 1}", TokenKind.INT, 1, [p.sensors_per_group])
               for g in range(p.sensor_groups)]
    actuators = [b.place(f"actuator_g{g + 1}", TokenKind.INT, 1, [p.actuators_per_group])
                 for g in range(p.actuator_groups)]
    PI = b.place("proc_i", TokenKind.INT, 1, [FUNCTIONAL])
    PO = b.place("proc_o", TokenKind.INT, 1, [FUNCTIONAL])
    PM = b.place("proc_m", TokenKind.INT, 1, [FUNCTIONAL])
    TO = b.place("timeout", TokenKind.INT, 1, [0])
    SD = b.place("shutdown", TokenKind.BOOL, 1, [False])
    TIMER = b.place("cycle_timer", TokenKind.BOOL, 1, [True])
    SOK = b.place("sensor_groups_ok", TokenKind.INT, 1, [p.sensor_groups])
    AOK = b.place("actuator_groups_ok", TokenKind.INT, 1, [p.actuator_groups])
    RI = b.place("reboots_i", TokenKind.INT, 1, [0])
    RO = b.place("reboots_o", TokenKind.INT, 1, [0])
    K = p.skip_limit

    def running(m):
        return not m.get(SD)

    def unit_failures(kind, places, ok_place, mttf, quorum):
        for g, pl in enumerate(places):
            def guard(m, pl=pl):
                return m.get(pl) > 0 and not m.get(SD)

            def rate(m, pl=pl):
                return m.get(pl) / mttf

            def effect(m, pl=pl):
                n = m.get(pl)
                changes = {pl: n - 1}
                if n == quorum:
                    changes[ok_place] = m.get(ok_place) - 1
                return m.with_values(changes)

            b.rule(f"{kind}_fail_g{g + 1}", guard, rate, effect, reads=(pl, SD))

    unit_failures("sensor", sensors, SOK, p.sensor_mttf, p.sensors_per_group_quorum)
    unit_failures("actuator", actuators, AOK, p.actuator_mttf, p.actuators_per_group_quorum)

    for tag, P, R in (("i", PI, RI), ("o", PO, RO)):
        b.rule(f"transient_{tag}",
               guard=lambda m, P=P: m.get(P) == FUNCTIONAL and running(m),
               rate=1.0 / p.transient_mttf,
               effect=lambda m, P=P: m.with_values({P: REBOOTING}),
               reads=(P, SD))
        b.rule(f"permanent_{tag}",
               guard=lambda m, P=P: m.get(P) != FAILED and running(m),
               rate=1.0 / p.processor_mttf,
               effect=lambda m, P=P: m.with_values({P: FAILED}),
               reads=(P, SD))

        def reboot(m, P=P, R=R):
            changes = {P: FUNCTIONAL, R: m.get(R) + 1}
            if m.get(TO) <= K:
                changes[TO] = 0
            return m.with_values(changes)

        b.rule(f"reboot_{tag}",
               guard=lambda m, P=P: m.get(P) == REBOOTING and running(m),
               rate=1.0 / p.reboot_mean,
               effect=reboot,
               reads=(P, SD))

    b.rule("permanent_m",
           guard=lambda m: m.get(PM) == FUNCTIONAL and running(m),
           rate=1.0 / p.processor_mttf,
           effect=lambda m: m.with_values({PM: FAILED}),
           reads=(PM, SD))

    def io_down(m):
        return m.get(PI) != FUNCTIONAL or m.get(PO) != FUNCTIONAL

    def cycle_guard(m):
        if m.get(SD) or m.count(TIMER) == 0:
            return False
        to = m.get(TO)
        return to <= K and (to > 0 or io_down(m))

    b.rule("cycle", cycle_guard, 1.0 / p.cycle_time,
           lambda m: m.with_values({TO: m.get(TO) + 1 if io_down(m) else 0}),
           reads=(PI, PO, TO, SD, TIMER))

    def failed(m):
        return ((m.get(SOK) < p.sensor_quorum and m.get(PI) == FUNCTIONAL)
                or (m.get(AOK) < p.actuator_quorum and m.get(PO) == FUNCTIONAL)
                or m.get(TO) > K
                or m.get(PM) == FAILED)

    b.rule("shutdown", lambda m: running(m) and failed(m), 1.0 / p.cycle_time,
           lambda m: m.edit().set(SD, True).set(TIMER).done(),
           reads=(SOK, AOK, PI, PO, PM, TO, SD))

    net = b.build()

    def is_up(m):
        return (not m.get(SD) and m.get(PI) == FUNCTIONAL and m.get(PO) == FUNCTIONAL
                and m.get(PM) == FUNCTIONAL and m.get(TO) == 0
                and m.get(SOK) == p.sensor_groups and m.get(AOK) == p.actuator_groups)

    observer = Observer(
        variables=[
            ("number_sensors", lambda m: m.get(SOK)),
            ("number_actuators", lambda m: m.get(AOK)),
            ("proci_status", lambda m: m.get(PI)),
            ("proco_status", lambda m: m.get(PO)),
            ("procm_status", lambda m: m.get(PM)),
            ("timeout_counts", lambda m: m.get(TO)),
            ("reboots_input", lambda m: m.get(RI)),
            ("reboots_output", lambda m: m.get(RO)),
            ("reboots_total", lambda m: m.get(RI) + m.get(RO)),
        ],
        rewards=reward_classes(is_up, lambda m: m.get(SD)),
    )
    return Model(net, observer, TemporalResolution(tick=1.0),
                 failure_predicates(params), name="controlsys")


def reward_classes(is_up, is_shutdown) -> list:
    """``up``, ``danger`` and ``shutdown`` as a partition of the markings."""
    return [
        ("up", is_up),
        ("danger", lambda m: not is_up(m) and not is_shutdown(m)),
        ("shutdown", is_shutdown),
    ]


def model_from_config(config) -> Model:
    return build_model(SystemParams.from_config(config))
