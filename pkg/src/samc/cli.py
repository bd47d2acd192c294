"""Command-line front end.

Every subcommand writes one JSON document (or CSV table) whose content is a
function of the flags and ``--seed`` only: replica ``r`` always draws from
the substream derived from ``(seed, r)`` and records are written in replica
order whatever the worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from functools import partial

import numpy as np

from . import __version__
from .chain import ChainState, run_observed
from .core import AugmentedPartition, InvalidInputError, ScalingParams
from .graphsim import component_table, multigraph_at, project_simple
from .limit import LimitConfig, sample_limit_excursions, write_path_csv
from .replicas import WORKERS_ENV, replica_rng, run_replicas
from .sbfw import excursion_table, poisson_marks, sample_walk
from .stats import ks_two_sample
from .validation import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SAMPLERS = ("graph", "simple", "sbfw", "chain", "limit")

_PAIR_LIST = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "number", "exclusiveMinimum": 0}, {"type": "integer", "minimum": 0}],
        "minItems": 2,
        "maxItems": 2,
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["meta", "data"],
    "additionalProperties": False,
    "properties": {
        "meta": {
            "type": "object",
            "required": ["version", "command", "seed", "params"],
            "properties": {
                "version": {"type": "string"},
                "command": {"enum": ["graph", "sbfw", "limit", "chain", "compare", "validate"]},
                "seed": {"type": "integer"},
                "params": {"type": "object"},
                "timestamp": {"type": "string"},
            },
        },
        "data": {
            "type": "array",
            "items": {
                "type": "object",
                "anyOf": [
                    {
                        "required": ["replica", "pairs"],
                        "properties": {
                            "replica": {"type": "integer", "minimum": 0},
                            "pairs": _PAIR_LIST,
                            "excursions": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["start", "end", "length", "area", "marks"],
                                },
                            },
                        },
                    },
                    {
                        "required": ["replica", "observations"],
                        "properties": {
                            "replica": {"type": "integer", "minimum": 0},
                            "observations": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["time", "pairs"],
                                    "properties": {"time": {"type": "number"}, "pairs": _PAIR_LIST},
                                },
                            },
                        },
                    },
                    {"required": ["name", "passed", "estimates"]},
                ],
            },
        },
    },
}

CSV_COLUMNS = ["replica", "rank", "mass_or_length", "surplus_or_marks", "area"]


def _pairs(state: AugmentedPartition) -> list[list]:
    return [[float(x), int(k)] for x, k in zip(state.masses, state.surpluses)]


# replica workers; module level so they pickle


def _graph_replica(rng, n, t, kind):
    params = ScalingParams(n, t)
    g = multigraph_at(n, params.q, rng)
    if kind == "simple":
        g = project_simple(g)
    table = component_table(g)
    return {"pairs": [[float(m), int(s)] for m, s in zip(table.masses(n), table.surpluses)]}


def _excursion_record(start, length, area, marks) -> dict:
    # canonical pair order, then earlier start
    order = np.lexsort((start, -marks, -length))
    excursions = [
        {"start": float(start[i]), "end": float(start[i] + length[i]),
         "length": float(length[i]), "area": float(area[i]), "marks": int(marks[i])}
        for i in order
    ]
    return {"pairs": [[e["length"], e["marks"]] for e in excursions], "excursions": excursions}


def _sbfw_replica(rng, n, t):
    table = excursion_table(sample_walk(ScalingParams(n, t), rng))
    return _excursion_record(table.start, table.length, table.area, poisson_marks(table.area, rng))


def _limit_replica(rng, config):
    exc = sample_limit_excursions(config, rng)
    return _excursion_record(exc.start, exc.length, exc.area, poisson_marks(exc.area, rng))


def _chain_replica(rng, n, t, times):
    states = run_observed(ChainState.initial(ScalingParams(n, t)), times, rng)
    return {"observations": [{"time": float(s.clock), "pairs": _pairs(s.blocks)} for s in states]}


def _largest(rng, sampler, n, t, config) -> float:
    """Largest mass (or excursion length) from one draw of ``sampler``."""
    params = ScalingParams(n, t)
    if sampler in ("graph", "simple"):
        # projection keeps the vertex partition, so both share the same law here
        return float(component_table(multigraph_at(n, params.q, rng)).masses(n)[0])
    if sampler == "sbfw":
        return float(excursion_table(sample_walk(params, rng)).length.max())
    if sampler == "chain":
        (state,) = run_observed(ChainState.initial(params), [params.q], rng)
        return float(state.blocks.masses[0])
    exc = sample_limit_excursions(config, rng)
    return float(exc.length[0]) if len(exc) else 0.0


# argument handling


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default="-", help="file path, or - for stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true")
    common.add_argument("--workers", type=int, default=None,
                        help=f"process count (default: ${WORKERS_ENV} or 1)")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--n", type=int, default=100)
    model.add_argument("--t", type=float, default=0.0)
    model.add_argument("--replicas", type=int, default=1)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--step", type=float, default=1e-4)
    grid.add_argument("--horizon", type=float, default=None)
    grid.add_argument("--eps", type=float, default=None)

    p = argparse.ArgumentParser(prog="samc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", parents=[common, model], help="component (mass, surplus) lists")
    g.add_argument("--kind", choices=("multigraph", "simple"), default="multigraph")
    sub.add_parser("sbfw", parents=[common, model], help="walk excursions and marks")
    lim = sub.add_parser("limit", parents=[common, model, grid], help="grid limit-process draws")
    lim.add_argument("--path-dump", default=None, help="write one sampled path (s, W^t, B^t) as CSV")
    ch = sub.add_parser("chain", parents=[common, model], help="Gillespie states at observation times")
    ch.add_argument("--times", default=None, help="comma-separated observation times (default: q)")
    cmp_ = sub.add_parser("compare", parents=[common, model, grid], help="KS between two samplers")
    cmp_.add_argument("--a", choices=SAMPLERS, required=True)
    cmp_.add_argument("--b", choices=SAMPLERS, required=True)
    val = sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    val.add_argument("--quick", action="store_true", help="reduced replica counts")
    return p


def _validate_args(args) -> dict:
    params = {}
    if args.command != "validate":
        if args.replicas < 1:
            raise InvalidInputError("--replicas must be >= 1")
        sp = ScalingParams(args.n, args.t)
        params.update(n=sp.n, t=sp.t, replicas=args.replicas)
    if args.command in ("limit", "compare"):
        cfg = LimitConfig(args.t, args.horizon, args.step, args.eps)
        params.update(step=cfg.step, horizon=cfg.horizon, eps=cfg.min_excursion_length)
        args.config = cfg
    if args.command == "graph":
        params["kind"] = args.kind
    if args.command == "chain":
        q = ScalingParams(args.n, args.t).q
        times = [q] if args.times is None else [float(x) for x in args.times.split(",")]
        if any(b < a for a, b in zip(times, times[1:])) or times[0] < 0:
            raise InvalidInputError("--times must be nonnegative and increasing")
        args.times_list = times
        params["times"] = times
    if args.command == "compare":
        params.update(a=args.a, b=args.b)
    if args.command == "validate":
        params["quick"] = args.quick
    if args.workers is not None and args.workers < 1:
        raise InvalidInputError("--workers must be >= 1")
    return params


def _csv_rows(command: str, data: list[dict]) -> tuple[list[str], list[list]]:
    if command in ("compare", "validate"):
        cols = ["name", "passed", "estimates"]
        return cols, [[d["name"], d["passed"], json.dumps(d["estimates"], sort_keys=True)] for d in data]
    if command == "chain":
        cols = CSV_COLUMNS + ["time"]
        rows = [
            [d["replica"], rank, x, k, "", obs["time"]]
            for d in data
            for obs in d["observations"]
            for rank, (x, k) in enumerate(obs["pairs"], start=1)
        ]
        return cols, rows
    rows = []
    for d in data:
        areas = [e["area"] for e in d.get("excursions", [])]
        for rank, (x, k) in enumerate(d["pairs"], start=1):
            rows.append([d["replica"], rank, x, k, areas[rank - 1] if areas else ""])
    return CSV_COLUMNS, rows


def _emit(args, params: dict, data: list[dict]) -> None:
    if args.format == "json":
        meta = {"version": __version__, "command": args.command, "seed": args.seed, "params": params}
        if not args.no_timestamp:
            meta["timestamp"] = datetime.now(timezone.utc).isoformat()
        text = json.dumps({"meta": meta, "data": data}, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        cols, rows = _csv_rows(args.command, data)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        writer.writerows(rows)
        text = buf.getvalue()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _replicated(fn, args) -> list[dict]:
    records = run_replicas(fn, args.seed, args.replicas, args.workers)
    return [{"replica": r, **rec} for r, rec in enumerate(records)]


def _compare(args) -> list[dict]:
    samples = []
    for side, name in enumerate((args.a, args.b), start=1):
        fn = partial(_largest, sampler=name, n=args.n, t=args.t, config=args.config)
        # distinct stream per side so that --a X --b X compares independent draws
        samples.append(np.array(run_replicas(fn, args.seed, args.replicas, args.workers, side)))
    ks = ks_two_sample(samples[0], samples[1])
    return [{
        "name": f"ks[{args.a} vs {args.b}]",
        "passed": ks.passed,
        "estimates": {"ks": ks.statistic, "critical": ks.critical,
                      "mean_a": float(samples[0].mean()), "mean_b": float(samples[1].mean())},
    }]


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        params = _validate_args(args)
    except (InvalidInputError, ValueError) as exc:
        print(f"samc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    status = EXIT_OK
    if args.command == "graph":
        data = _replicated(partial(_graph_replica, n=args.n, t=args.t, kind=args.kind), args)
    elif args.command == "sbfw":
        data = _replicated(partial(_sbfw_replica, n=args.n, t=args.t), args)
    elif args.command == "limit":
        data = _replicated(partial(_limit_replica, config=args.config), args)
        if args.path_dump:
            with open(args.path_dump, "w", encoding="utf-8") as fh:
                write_path_csv(args.config, replica_rng(args.seed, 0, 99), fh)
    elif args.command == "chain":
        data = _replicated(partial(_chain_replica, n=args.n, t=args.t, times=args.times_list), args)
    elif args.command == "compare":
        data = _compare(args)
    else:
        reports = run_suite(args.seed, quick=args.quick)
        for rep in reports:
            print(rep.line(), file=sys.stderr)
        data = [rep.to_dict() for rep in reports]
        status = EXIT_OK if all(rep.passed for rep in reports) else EXIT_FAIL
    _emit(args, params, data)
    return status


if __name__ == "__main__":
    sys.exit(main())
