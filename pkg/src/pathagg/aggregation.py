"""The path aggregation solver.

The solver keeps a branching ``B`` (at most one chosen out-arc per vertex) and
a set of active terminals, each owning a committed prefix of its proposed
path.  Every iteration

1. grows vertex-disjoint maximal prefixes for the active terminals,
2. builds the dependency graph of which prefix blocks which,
3. 3-colors it and retires the largest color class by letting each member
   step one arc onto the prefix that blocks it,
4. rewrites ``B``: all prefix arcs go in, and any old arc leaving a prefix
   vertex goes out.

Each iteration retires at least a third of the blocked terminals and costs
every terminal at most two extra color switches.  Every iteration is recorded
in a :class:`Trace` so that :mod:`pathagg.verification` can replay the run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .bounds import iteration_bound
from .coloring import SparseGraph, largest_color_class, three_color
from .instance import Instance, ValidationReport, validate_instance


class InvalidInstanceError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.violations[0]
        super().__init__(f"invalid instance ({len(report.violations)} violations), first: {first.message}")


class SolverInvariantError(RuntimeError):
    """Internal contradiction; the algorithm's invariants rule these out."""


@dataclass
class AlgorithmState:
    branching: dict[int, int]
    active: list[int]
    active_prefix_len: dict[int, int]
    iteration: int = 0


@dataclass
class PrefixSet:
    prefix_len: dict[int, int]
    owner: dict[int, int]
    root_reacher: int | None = None
    extended: frozenset[int] = frozenset()

    def reaches_root(self, v: int, inst: Instance) -> bool:
        return self.prefix_len[v] == len(inst.proposed_paths[v])


@dataclass(frozen=True)
class DependencyGraph:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    active_before: tuple[int, ...]
    prefix_before: tuple[tuple[int, int], ...]
    prefix_after: tuple[tuple[int, int], ...]
    dependency_edges: tuple[tuple[int, int], ...]
    coloring: tuple[tuple[int, int], ...]
    selected: tuple[int, ...]
    root_reacher: int | None
    arcs_added: tuple[int, ...]
    arcs_removed: tuple[int, ...]
    active_after: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "type": "iteration",
            "iteration": self.iteration,
            "active_before": list(self.active_before),
            "prefix_before": [list(p) for p in self.prefix_before],
            "prefix_after": [list(p) for p in self.prefix_after],
            "dependency_edges": [list(e) for e in self.dependency_edges],
            "coloring": [list(c) for c in self.coloring],
            "selected": list(self.selected),
            "root_reacher": self.root_reacher,
            "arcs_added": list(self.arcs_added),
            "arcs_removed": list(self.arcs_removed),
            "active_after": list(self.active_after),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "IterationRecord":
        pairs = lambda key: tuple(tuple(x) for x in d[key])  # noqa: E731
        return cls(
            iteration=d["iteration"],
            active_before=tuple(d["active_before"]),
            prefix_before=pairs("prefix_before"),
            prefix_after=pairs("prefix_after"),
            dependency_edges=pairs("dependency_edges"),
            coloring=pairs("coloring"),
            selected=tuple(d["selected"]),
            root_reacher=d["root_reacher"],
            arcs_added=tuple(d["arcs_added"]),
            arcs_removed=tuple(d["arcs_removed"]),
            active_after=tuple(d["active_after"]),
        )


@dataclass(frozen=True)
class Solution:
    arcs: tuple[int, ...]
    iterations: int
    switching: Mapping[int, int] = field(default_factory=dict)

    @property
    def max_switching(self) -> int:
        return max(self.switching.values(), default=0)

    def out_arc(self, inst: Instance) -> dict[int, int]:
        return {inst.arcs[a].tail: a for a in self.arcs}

    def to_dict(self) -> dict:
        return {
            "arcs": list(self.arcs),
            "iterations": self.iterations,
            "switching": [[t, c] for t, c in self.switching.items()],
            "max_switching": self.max_switching,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Solution":
        return cls(
            arcs=tuple(d["arcs"]),
            iterations=d.get("iterations", 0),
            switching={t: c for t, c in d.get("switching", [])},
        )


@dataclass
class Trace:
    instance_sha256: str
    records: list[IterationRecord]
    solution: Solution

    def dumps(self) -> bytes:
        lines = [_dump(r.to_dict()) for r in self.records]
        final = {"type": "solution", "instance_sha256": self.instance_sha256}
        final.update(self.solution.to_dict())
        lines.append(_dump(final))
        return ("\n".join(lines) + "\n").encode("utf-8")

    def dump(self, fh: IO[bytes]) -> None:
        fh.write(self.dumps())

    @classmethod
    def loads(cls, data: bytes | str) -> "Trace":
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        records = []
        final = None
        for lineno, line in enumerate(data.splitlines(), 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            kind = obj.get("type")
            if kind == "iteration":
                records.append(IterationRecord.from_dict(obj))
            elif kind == "solution":
                final = obj
            else:
                raise ValueError(f"line {lineno}: unknown record type {kind!r}")
        if final is None:
            raise ValueError("trace has no solution record")
        return cls(final["instance_sha256"], records, Solution.from_dict(final))


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def initial_state(inst: Instance) -> AlgorithmState:
    active = sorted(inst.terminals)
    return AlgorithmState({}, active, {v: 0 for v in active}, 0)


def extend_maximal_prefixes(state: AlgorithmState, inst: Instance) -> PrefixSet:
    """Greedily grow vertex-disjoint prefixes, lowest terminal id first."""
    arcs = inst.arcs
    owner: dict[int, int] = {}
    for v in state.active:
        owner[v] = v
        for a in inst.proposed_paths[v][: state.active_prefix_len[v]]:
            owner[arcs[a].head] = v

    lengths: dict[int, int] = {}
    root_reacher = None
    for v in state.active:
        path = inst.proposed_paths[v]
        n = state.active_prefix_len[v]
        while n < len(path) and arcs[path[n]].head not in owner:
            owner[arcs[path[n]].head] = v
            n += 1
        lengths[v] = n
        if n == len(path):
            root_reacher = v
    return PrefixSet(lengths, owner, root_reacher)


def build_dependency_graph(p: PrefixSet, inst: Instance) -> DependencyGraph:
    """One edge per blocked prefix, pointing at the owner of the vertex it runs into."""
    vertices = []
    edges = []
    for v, n in p.prefix_len.items():
        if v == p.root_reacher:
            continue
        vertices.append(v)
        head = inst.arcs[inst.proposed_paths[v][n]].head
        blocker = p.owner.get(head)
        if blocker is None or blocker == v:
            raise SolverInvariantError(f"prefix of {v} is not maximal: vertex {head} is free")
        if blocker != p.root_reacher:
            edges.append((v, blocker))
    return DependencyGraph(tuple(vertices), tuple(edges))


def color_dependency_graph(h: DependencyGraph) -> dict[int, int]:
    return three_color(SparseGraph.from_edges(h.vertices, h.edges))


def select_inactivation_set(h: DependencyGraph) -> list[int]:
    return largest_color_class(color_dependency_graph(h))


def extend_selected(p: PrefixSet, selected: Iterable[int], inst: Instance) -> PrefixSet:
    """Step each selected prefix one arc forward onto the prefix blocking it."""
    selected = frozenset(selected)
    lengths = dict(p.prefix_len)
    for v in sorted(selected):
        if v == p.root_reacher:
            raise SolverInvariantError(f"{v} already reaches the root and cannot be extended")
        head = inst.arcs[inst.proposed_paths[v][lengths[v]]].head
        target = p.owner.get(head)
        if target is None or target in selected:
            raise SolverInvariantError(f"extension of {v} lands on {head}, which no unextended prefix owns")
        lengths[v] += 1
    return PrefixSet(lengths, p.owner, p.root_reacher, p.extended | selected)


def merge_update(state: AlgorithmState, p: PrefixSet, inst: Instance) -> AlgorithmState:
    """Insert all prefix arcs into the branching and drop old arcs leaving prefix vertices."""
    arcs = inst.arcs
    # p.owner covers exactly the vertices of the (unextended) prefixes; extension heads are among them
    branching = {x: a for x, a in state.branching.items() if x not in p.owner}
    for v, n in p.prefix_len.items():
        for a in inst.proposed_paths[v][:n]:
            tail = arcs[a].tail
            if tail in branching:
                raise SolverInvariantError(f"vertex {tail} would get a second out-arc")
            branching[tail] = a
    active = [v for v in state.active if v not in p.extended]
    return AlgorithmState(
        branching,
        active,
        {v: p.prefix_len[v] for v in active},
        state.iteration + 1,
    )


def _sinks(branching: Mapping[int, int], inst: Instance, starts: Iterable[int]) -> dict[int, int]:
    """Map each start vertex to the end of its out-arc chain; raise on a cycle."""
    sink: dict[int, int] = {}
    arcs = inst.arcs
    for s in starts:
        trail = []
        on_trail = set()
        x = s
        while x not in sink and x in branching:
            if x in on_trail:
                raise SolverInvariantError(f"branching has a cycle through {x}")
            on_trail.add(x)
            trail.append(x)
            x = arcs[branching[x]].head
        end = sink.get(x, x)
        for y in trail:
            sink[y] = end
        sink.setdefault(x, end)
    return sink


def all_connected(branching: Mapping[int, int], inst: Instance) -> bool:
    sink = _sinks(branching, inst, inst.terminals)
    return all(sink[t] == inst.root for t in inst.terminals)


def run_iteration(state: AlgorithmState, inst: Instance) -> tuple[AlgorithmState, IterationRecord]:
    prefixes = extend_maximal_prefixes(state, inst)
    h = build_dependency_graph(prefixes, inst)
    coloring = color_dependency_graph(h)
    selected = largest_color_class(coloring)
    extended = extend_selected(prefixes, selected, inst)
    new_state = merge_update(state, extended, inst)

    old_arcs = set(state.branching.values())
    new_arcs = set(new_state.branching.values())
    record = IterationRecord(
        iteration=new_state.iteration,
        active_before=tuple(state.active),
        prefix_before=tuple(prefixes.prefix_len.items()),
        prefix_after=tuple(extended.prefix_len.items()),
        dependency_edges=h.edges,
        coloring=tuple(coloring.items()),
        selected=tuple(selected),
        root_reacher=prefixes.root_reacher,
        arcs_added=tuple(sorted(new_arcs - old_arcs)),
        arcs_removed=tuple(sorted(old_arcs - new_arcs)),
        active_after=tuple(new_state.active),
    )
    return new_state, record


def root_path_switches(branching: Mapping[int, int], inst: Instance) -> dict[int, int]:
    """Color switches along each terminal's chain to the root."""
    arcs = inst.arcs
    memo: dict[int, tuple[int, str | None]] = {inst.root: (0, None)}

    def resolve(start: int) -> tuple[int, str | None]:
        trail = []
        x = start
        while x not in memo:
            trail.append(x)
            x = arcs[branching[x]].head
        for y in reversed(trail):
            sw, color = memo[arcs[branching[y]].head]
            mine = arcs[branching[y]].color
            memo[y] = (sw + (color is not None and color != mine), mine)
        return memo[start]

    return {t: resolve(t)[0] for t in inst.terminals}


def solve(inst: Instance, *, validate: bool = True) -> tuple[Solution, Trace]:
    """Run path aggregation to completion and return the arborescence with its trace."""
    if validate:
        report = validate_instance(inst)
        if not report.ok:
            raise InvalidInstanceError(report)

    state = initial_state(inst)
    records: list[IterationRecord] = []
    limit = iteration_bound(inst.k)
    while not all_connected(state.branching, inst):
        if state.iteration >= limit:
            raise SolverInvariantError(f"no arborescence after {limit} iterations")
        state, record = run_iteration(state, inst)
        records.append(record)

    solution = Solution(
        arcs=tuple(sorted(state.branching.values())),
        iterations=state.iteration,
        switching=root_path_switches(state.branching, inst),
    )
    return solution, Trace(inst.digest(), records, solution)
