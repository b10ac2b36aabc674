"""Command line interface: ``pathagg {generate,solve,verify,oracle,baseline,bench}``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 resource limit, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .aggregation import InvalidInstanceError, Solution, Trace, solve
from .bounds import paper_switching_bound, safe_switching_bound
from .dot import solution_to_dot
from .generators import FAMILIES, GenSpec, generate
from .heavy_path import BaselineError, crossing_bound, solve_baseline
from .instance import Instance, InstanceFormatError, parse_instance, serialize_instance, validate_instance
from .oracle import DEFAULT_MAX_STATES, OracleLimitError, brute_force_opt
from .verification import TraceMismatchError, check_arborescence, check_trace, switching_costs

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_LIMIT = 3
EXIT_IO = 4

SUMMARY_FIELDS = (
    "instance_id", "n", "m", "k", "iterations", "max_switching",
    "paper_bound", "safe_bound", "oracle_opt", "wall_time",
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunSummary:
    instance_id: str
    n: int
    m: int
    k: int
    iterations: int
    max_switching: int
    paper_bound: float
    safe_bound: int
    oracle_opt: int | None = None
    wall_time: float = 0.0

    def row(self) -> dict:
        d = dataclasses.asdict(self)
        d["paper_bound"] = f"{self.paper_bound:.3f}"
        d["wall_time"] = f"{self.wall_time:.4f}"
        d["oracle_opt"] = "" if self.oracle_opt is None else self.oracle_opt
        return d

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["paper_bound"] = round(self.paper_bound, 3)
        d["wall_time"] = round(self.wall_time, 4)
        return json.dumps(d)


def default_seed() -> int:
    raw = os.environ.get("PATHAGG_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise CliError(f"PATHAGG_SEED must be an integer, got {raw!r}", EXIT_INVALID) from None


def _read_bytes(path: str) -> bytes:
    try:
        return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from exc


def _write_bytes(path: str, data: bytes) -> None:
    try:
        if path == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from exc


def load_instance(path: str, *, validate: bool = True) -> Instance:
    try:
        inst = parse_instance(_read_bytes(path))
    except InstanceFormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INVALID) from exc
    if validate:
        report = validate_instance(inst)
        if not report.ok:
            lines = "\n".join(f"  [{v.rule}] {v.message}" for v in report.violations)
            raise CliError(f"{path}: invalid instance\n{lines}", EXIT_INVALID)
    return inst


def run_solve(inst: Instance, instance_id: str = "") -> tuple[Solution, Trace, RunSummary]:
    start = time.perf_counter()
    solution, trace = solve(inst)
    elapsed = time.perf_counter() - start
    summary = RunSummary(
        instance_id=instance_id,
        n=inst.vertex_count,
        m=len(inst.arcs),
        k=inst.k,
        iterations=solution.iterations,
        max_switching=solution.max_switching,
        paper_bound=paper_switching_bound(inst.k),
        safe_bound=safe_switching_bound(inst.k),
        wall_time=elapsed,
    )
    return solution, trace, summary


def _gen_spec(args: argparse.Namespace, seed: int) -> GenSpec:
    params = {
        "depth": args.depth,
        "n": args.n,
        "k": args.k,
        "extra_arcs": args.extra_arcs,
        "max_parallel": args.max_parallel,
        "max_path_len": args.max_path_len,
        "ordered": args.ordered,
    }
    return GenSpec(args.family, {key: v for key, v in params.items() if v is not None}, seed)


def _generate(spec: GenSpec) -> Instance:
    try:
        return generate(spec)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc


def cmd_generate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    inst = _generate(_gen_spec(args, seed))
    _write_bytes(args.out, serialize_instance(inst))
    line = f"generated {args.family} seed={seed} n={inst.vertex_count} m={len(inst.arcs)} k={inst.k}"
    print(line, file=sys.stderr if args.out == "-" else sys.stdout)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    solution, trace, summary = run_solve(inst, Path(args.instance).stem)
    if args.out:
        _write_bytes(args.out, (json.dumps(solution.to_dict()) + "\n").encode())
    if args.trace:
        _write_bytes(args.trace, trace.dumps())
    if args.dot:
        _write_bytes(args.dot, solution_to_dot(inst, solution.arcs).encode())
    print(summary.to_json())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    try:
        solution = Solution.from_dict(json.loads(_read_bytes(args.solution)))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{args.solution}: malformed solution: {exc}", EXIT_INVALID) from exc

    result: dict = {}
    arb = check_arborescence(solution, inst)
    result["arborescence"] = {"ok": arb.ok, "reason": arb.reason, "witness": list(arb.witness)}
    ok = arb.ok
    if arb.ok:
        costs = switching_costs(solution, inst)
        result["max_switching"] = costs.max_cost
        result["safe_bound"] = safe_switching_bound(inst.k)
    if args.trace:
        try:
            trace = Trace.loads(_read_bytes(args.trace))
            report = check_trace(trace, inst)
        except TraceMismatchError as exc:
            raise CliError(f"{args.trace}: {exc}", EXIT_INVALID) from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"{args.trace}: malformed trace: {exc}", EXIT_INVALID) from exc
        result["trace"] = report.to_dict()
        ok = ok and report.ok and sorted(trace.solution.arcs) == sorted(solution.arcs)
    result["ok"] = ok
    print(json.dumps(result))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    try:
        res = brute_force_opt(inst, args.max_states)
    except OracleLimitError as exc:
        raise CliError(str(exc), EXIT_LIMIT) from exc
    print(json.dumps({
        "optimum": res.optimum,
        "witness": list(res.witness.arcs),
        "search_space": res.search_space,
        "nodes_explored": res.nodes_explored,
    }))
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    try:
        solution, hpd = solve_baseline(inst)
    except BaselineError as exc:
        raise CliError(f"baseline refused: {exc}", EXIT_INVALID) from exc
    if args.out:
        _write_bytes(args.out, (json.dumps(solution.to_dict()) + "\n").encode())
    print(json.dumps({
        "heavy_paths": len(hpd.paths),
        "max_switching": solution.max_switching,
        "bound": crossing_bound(inst.vertex_count),
    }))
    return EXIT_OK


def parse_seed_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise CliError(f"bad seed range {text!r}; expected A..B", EXIT_INVALID) from None


def _bench_one(job: tuple[GenSpec, bool, int]) -> RunSummary:
    spec, with_oracle, max_states = job
    inst = generate(spec)
    _, _, summary = run_solve(inst, f"{spec.family}-{spec.seed}")
    if with_oracle:
        try:
            summary.oracle_opt = brute_force_opt(inst, max_states).optimum
        except OracleLimitError:
            summary.oracle_opt = None
    return summary


def cmd_bench(args: argparse.Namespace) -> int:
    seeds = parse_seed_range(args.seeds)
    jobs = [(_gen_spec(args, s), args.oracle, args.max_states) for s in seeds]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_bench_one, jobs))
        else:
            rows = [_bench_one(j) for j in jobs]
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.row())
    _write_bytes(args.out, buf.getvalue().encode())

    violations = sum(r.max_switching > r.safe_bound for r in rows)
    over_paper = sum(r.max_switching > r.paper_bound for r in rows)
    print(f"rows={len(rows)} bound_violations={violations} paper_bound_exceeded={over_paper}", file=sys.stderr)
    return EXIT_VERIFY if violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathagg", description="Steiner path aggregation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def family_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--family", choices=FAMILIES, required=True)
        p.add_argument("--depth", type=int, help="lb-tree depth")
        p.add_argument("--n", type=int, help="vertex count (rand-tree, planted-dag)")
        p.add_argument("--k", type=int, help="terminal count (planted-dag)")
        p.add_argument("--extra-arcs", type=int, dest="extra_arcs", help="decoy arcs (planted-dag)")
        p.add_argument("--max-parallel", type=int, dest="max_parallel", help="rand-tree reuse threshold")
        p.add_argument("--max-path-len", type=int, dest="max_path_len", help="planted path interior cap")
        p.add_argument("--ordered", action="store_true", default=None, help="acyclic planted-dag")

    p = sub.add_parser("generate", help="write a generated instance")
    family_flags(p)
    p.add_argument("--seed", type=int, help="defaults to $PATHAGG_SEED or 0")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run path aggregation on an instance")
    p.add_argument("instance")
    p.add_argument("--out", help="solution file")
    p.add_argument("--trace", help="trace file (one JSON record per line)")
    p.add_argument("--dot", help="Graphviz rendering of the solution")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution and optionally its trace")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("instance")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, dest="max_states")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("baseline", help="heavy path decomposition solution for tree instances")
    p.add_argument("instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("bench", help="solve a seeded batch and write CSV summaries")
    family_flags(p)
    p.add_argument("--seeds", default="0..9", help="inclusive range A..B")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive oracle")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES, dest="max_states")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pathagg: {exc}", file=sys.stderr)
        return exc.code
    except InvalidInstanceError as exc:
        print(f"pathagg: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
