"""Command-line interface.

Exit codes: 0 success, 1 the ``--expect``-ed verdict was not reached,
2 usage or configuration error, 3 internal error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import traceback
import warnings
from dataclasses import replace

from . import smc
from .config import load_config
from .errors import (
    ConfigError,
    KindMismatchError,
    ModelError,
    ParseError,
    QueryError,
    UnknownVariableError,
)
from .experiments import load_spec, parse_times, preset, run_experiment
from .models import load_model
from .sampling import derive_stream, RandomStream
from .shlpn import validate_net
from .trace import iter_runs, write_csv
from .units import parse_time

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

USER_ERRORS = (ConfigError, KindMismatchError, ModelError, ParseError, QueryError,
               UnknownVariableError)


def _time(text):
    try:
        value = parse_time(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"time must be positive, got {text!r}")
    return value


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model",
                        help="built-in model name or path to a .json net file (default: controlsys)")
    common.add_argument("--config", help="flat key = value file of model parameters")
    common.add_argument("--seed", type=_seed, help="master seed (default: 0)")
    common.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker processes; results do not depend on it")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--tick", type=_time,
                        help="override the model's sampling period (time units or 30d/12h/5m/30s)")

    parser = argparse.ArgumentParser(
        prog="petrismc",
        description="Simulate stochastic high-level Petri nets and check BLTL properties.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", parents=[common], help="write one trace as CSV")
    p.add_argument("--horizon", type=_time, required=True)
    p.add_argument("--trace-index", type=int, default=0,
                   help="which derived stream to use (default: 0)")

    p = sub.add_parser("check", parents=[common], help="run a statistical query, print JSON")
    p.add_argument("--prop", help="BLTL property")
    p.add_argument("--runs", type=_positive_int,
                   help="number of traces for a fixed-size or expectation query (default: 3000)")
    q = p.add_mutually_exclusive_group()
    q.add_argument("--chernoff", nargs=2, type=float, metavar=("EPSILON", "DELTA"))
    q.add_argument("--sprt", type=float, metavar="THETA",
                   help="test P(prop) >= THETA sequentially")
    q.add_argument("--expectation", metavar="VARIABLE",
                   help="mean of an observed variable at time --at")
    p.add_argument("--at", type=_time, help="time for --expectation")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--half-width", type=float, default=0.05)
    p.add_argument("--expect", choices=("accept", "reject"),
                   help="with --sprt, exit 1 unless this verdict is reached")
    p.add_argument("--no-timing", action="store_true",
                   help="omit elapsed_seconds so repeated runs are byte-identical")

    p = sub.add_parser("experiment", parents=[common], help="sweep a query over T, write CSV")
    p.add_argument("spec", nargs="?", help="experiment file (flat key = value)")
    p.add_argument("--preset", help="fig4, fig5, fig6, fig7 or fig8")
    p.add_argument("--times", help="comma-separated sweep values (default: 5d,...,30d)")
    p.add_argument("--runs", type=_positive_int, help="traces per cell (default: 3000)")

    p = sub.add_parser("validate", parents=[common], help="check a model (and properties)")
    p.add_argument("--prop", action="append", default=[], help="property to parse and check")
    return parser


def _load(args, ref=None, config=None):
    cfg = dict(config or {})
    if args.config:
        cfg.update(load_config(args.config))
    ref = ref or args.model or "controlsys"
    if cfg and ref.endswith(".json"):
        raise ConfigError("--config only applies to built-in models")
    model = load_model(ref, cfg)
    if args.tick is not None:
        model = replace(model, resolution=replace(model.resolution, tick=args.tick))
    return model


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_simulate(args) -> int:
    model = _load(args)
    stream = derive_stream(RandomStream(args.seed or 0), args.trace_index)
    names = model.observer.names
    runs = iter_runs(model.net, model.observer, model.resolution, args.horizon, stream, names)
    with _output(args.out) as fh:
        write_csv(runs, names, fh)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.expect and args.sprt is None:
        raise QueryError("--expect needs --sprt")
    if args.runs and (args.chernoff or args.sprt is not None):
        raise QueryError("--runs does not combine with --chernoff or --sprt")
    seed = args.seed or 0
    model = _load(args)
    if args.expectation is not None:
        if args.at is None:
            raise QueryError("--expectation needs --at")
        res = smc.estimate_expectation(model, args.expectation, args.at, args.runs or 3000,
                                       seed, args.jobs)
    else:
        if args.prop is None:
            raise QueryError("--prop is required unless --expectation is given")
        if args.chernoff:
            res = smc.estimate_chernoff(model, args.prop, *args.chernoff, seed, args.jobs)
        elif args.sprt is not None:
            res = smc.sprt(model, args.prop, args.sprt, args.alpha, args.beta, args.half_width,
                           seed, args.jobs)
        else:
            res = smc.estimate_fixed(model, args.prop, args.runs or 3000, seed, args.jobs)
    out = res.to_dict()
    if args.no_timing:
        del out["elapsed_seconds"]
    with _output(args.out) as fh:
        fh.write(json.dumps(out, sort_keys=True) + "\n")
    if args.expect and (res.verdict or "").lower() != args.expect:
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_experiment(args) -> int:
    if (args.spec is None) == (args.preset is None):
        raise ConfigError("give either an experiment file or --preset")
    spec = load_spec(args.spec) if args.spec else preset(args.preset)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.times:
        spec = replace(spec, times=parse_times(args.times))
    if args.runs:
        spec = replace(spec, n=args.runs)
    if args.model is not None:
        spec = replace(spec, model=args.model)
    problems = spec.problems()
    if problems:
        raise ConfigError("; ".join(problems))
    model = _load(args, spec.model, spec.model_config)
    with _output(args.out) as fh:
        run_experiment(spec, model, fh, args.jobs)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _load(args)
    problems = validate_net(model.net)
    formulas = [model.parse(p) for p in args.prop]
    if formulas:
        try:
            smc.check_variables(model, formulas)
        except UnknownVariableError as e:
            problems.append(str(e))
    with _output(args.out) as fh:
        for p in problems:
            fh.write(f"error: {p}\n")
        fh.write(f"{model.name}: {len(model.net.places)} places, {len(model.net.rules)} rules, "
                 f"observes {', '.join(model.observer.names)}\n")
    return EXIT_USAGE if problems else EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "check": cmd_check,
            "experiment": cmd_experiment, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except USER_ERRORS as e:
        print(f"petrismc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"petrismc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        print("petrismc: internal error", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
