"""Independent checks for solutions and solver traces.

Nothing here reuses the solver's branching bookkeeping: traces are replayed
from their recorded arc deltas and every condition is recomputed from scratch,
so a solver bug cannot certify itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .aggregation import Solution, Trace
from .instance import Instance


class TraceMismatchError(ValueError):
    """The trace was produced for a different instance."""


@dataclass(frozen=True)
class ArborescenceCheck:
    ok: bool
    reason: str = ""
    witness: tuple[int, ...] = ()


@dataclass(frozen=True)
class SwitchReport:
    costs: dict[int, int]
    root_paths: dict[int, list[int]]

    @property
    def max_cost(self) -> int:
        return max(self.costs.values(), default=0)


@dataclass
class IterationCheck:
    iteration: int
    c1: bool = True
    c2: bool = True
    c3: bool = True
    c4: bool = True
    replay: bool = True

    @property
    def ok(self) -> bool:
        return self.c1 and self.c2 and self.c3 and self.c4 and self.replay


@dataclass
class InvariantReport:
    iterations: list[IterationCheck] = field(default_factory=list)
    final_ok: bool = True
    failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.final_ok and all(c.ok for c in self.iterations)

    def fail(self, check: IterationCheck | None, condition: str, message: str, witness: Iterable = ()) -> None:
        if check is None:
            self.final_ok = False
        else:
            setattr(check, condition, False)
        if self.failure is None:
            self.failure = {
                "iteration": None if check is None else check.iteration,
                "condition": condition,
                "message": message,
                "witness": list(witness),
            }

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "iterations": [
                {"iteration": c.iteration, "c1": c.c1, "c2": c.c2, "c3": c.c3, "c4": c.c4, "replay": c.replay}
                for c in self.iterations
            ],
            "final_ok": self.final_ok,
            "failure": self.failure,
        }


def color_switches(colors: Sequence[str]) -> int:
    return sum(a != b for a, b in zip(colors, colors[1:]))


def _arc_ids(solution: Solution | Iterable[int]) -> list[int]:
    return list(solution.arcs if isinstance(solution, Solution) else solution)


def check_arborescence(solution: Solution | Iterable[int], inst: Instance) -> ArborescenceCheck:
    """Out-degree at most one, no cycle, and every used vertex and terminal drains into the root."""
    out: dict[int, int] = {}
    for a in _arc_ids(solution):
        if not 0 <= a < len(inst.arcs):
            return ArborescenceCheck(False, "unknown arc id", (a,))
        tail = inst.arcs[a].tail
        if tail in out:
            return ArborescenceCheck(False, "vertex with two out-arcs", (tail, out[tail], a))
        out[tail] = a
    if inst.root in out:
        return ArborescenceCheck(False, "root has an out-arc", (inst.root,))

    state: dict[int, int] = {}  # 1 = drains to root, 2 = on current chain
    for start in [*inst.terminals, *sorted(out)]:
        chain = []
        x = start
        while x not in state and x in out:
            state[x] = 2
            chain.append(x)
            x = inst.arcs[out[x]].head
        if state.get(x) == 2:
            cycle = chain[chain.index(x):]
            return ArborescenceCheck(False, "cycle", tuple(cycle))
        if x != inst.root and state.get(x) != 1:
            return ArborescenceCheck(False, "chain ends at a non-root sink", (start, x))
        for y in chain:
            state[y] = 1
    return ArborescenceCheck(True)


def switching_costs(solution: Solution | Iterable[int], inst: Instance) -> SwitchReport:
    out = {inst.arcs[a].tail: a for a in _arc_ids(solution)}
    costs = {}
    paths = {}
    for t in inst.terminals:
        path = []
        x = t
        while x != inst.root:
            path.append(out[x])
            x = inst.arcs[out[x]].head
        paths[t] = path
        costs[t] = color_switches([inst.arcs[a].color for a in path])
    return SwitchReport(costs, paths)


def _active_path(inst: Instance, v: int, length: int) -> tuple[list[int], list[int]]:
    arcs = list(inst.proposed_paths[v][:length])
    verts = [v] + [inst.arcs[a].head for a in arcs]
    return arcs, verts


def _check_state(
    report: InvariantReport,
    check: IterationCheck,
    inst: Instance,
    branching: Mapping[int, int],
    active: Sequence[int],
    plen: Mapping[int, int],
) -> None:
    arcs = inst.arcs
    # c1: chains never revisit a vertex
    sink: dict[int, int] = {}
    for start in range(inst.vertex_count):
        chain = []
        seen = set()
        x = start
        while x not in sink and x in branching:
            if x in seen:
                report.fail(check, "c1", "branching contains a cycle", chain[chain.index(x):])
                return
            seen.add(x)
            chain.append(x)
            x = arcs[branching[x]].head
        end = sink.get(x, x)
        for y in chain:
            sink[y] = end
        sink[x] = end

    # c2: one representative per non-singleton component, holding its active path
    on_active: set[int] = set()
    rep_of_sink: dict[int, int] = {}
    for v in active:
        path_arcs, verts = _active_path(inst, v, plen[v])
        for a in path_arcs:
            if branching.get(arcs[a].tail) != a:
                report.fail(check, "c2", f"active path of {v} is not in the branching", (v, a))
                return
        last = verts[-1]
        if last in branching or sink[v] != last:
            report.fail(check, "c2", f"active path of {v} does not end at its component's root", (v, last))
            return
        if last in rep_of_sink:
            report.fail(check, "c2", "component with two representatives", (rep_of_sink[last], v))
            return
        rep_of_sink[last] = v
        on_active.update(verts)
    terminals = set(inst.terminals)
    for x in range(inst.vertex_count):
        nontrivial = x in branching
        if (nontrivial or x in terminals) and sink[x] not in rep_of_sink:
            report.fail(check, "c2", f"vertex {x} lies in a component without a representative", (x, sink[x]))
            return

    # c3: every terminal reaches its active path within 2i switches
    memo: dict[int, tuple[int, str | None]] = {x: (0, None) for x in on_active}
    limit = 2 * check.iteration
    for t in inst.terminals:
        trail = []
        x = t
        while x not in memo:
            trail.append(x)
            x = arcs[branching[x]].head
        for y in reversed(trail):
            a = arcs[branching[y]]
            sw, color = memo[a.head]
            memo[y] = (sw + (color is not None and color != a.color), a.color)
        if memo[t][0] > limit:
            report.fail(check, "c3", f"terminal {t} needs {memo[t][0]} switches, limit {limit}", (t, memo[t][0]))
            return


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def check_trace(trace: Trace, inst: Instance) -> InvariantReport:
    """Replay a trace and check the four per-iteration invariants plus the final solution."""
    if trace.instance_sha256 != inst.digest():
        raise TraceMismatchError("trace was recorded for a different instance")
    report = InvariantReport()
    arcs = inst.arcs
    branching: dict[int, int] = {}
    active = sorted(inst.terminals)
    plen = {v: 0 for v in active}

    check = IterationCheck(0)
    report.iterations.append(check)
    _check_state(report, check, inst, branching, active, plen)

    for index, rec in enumerate(trace.records, 1):
        check = IterationCheck(index)
        report.iterations.append(check)
        if rec.iteration != index or list(rec.active_before) != active:
            report.fail(check, "replay", "record does not continue the replayed state", (index,))
            break
        before = dict(rec.prefix_before)
        if set(before) != set(active) or any(before[v] < plen[v] for v in active):
            report.fail(check, "replay", "prefixes do not extend the active paths", (index,))
            break

        # c4 and the coloring it rests on
        colors = dict(rec.coloring)
        s, h = len(active), len(colors)
        selected = set(rec.selected)
        sizes = [sum(1 for c in colors.values() if c == k) for k in range(3)]
        if (
            not set(colors) <= set(active)
            or any(c not in (0, 1, 2) for c in colors.values())
            or any(colors.get(u) == colors.get(w) for u, w in rec.dependency_edges)
            or h not in (s, s - 1)
            or (selected and max(sizes) != len(selected))
            or any(colors.get(v) != colors.get(next(iter(selected))) for v in selected)
            or len(rec.active_after) > s - _ceil_div(h, 3)
            or list(rec.active_after) != [v for v in active if v not in selected]
        ):
            report.fail(check, "c4", "active set did not shrink by a largest color class", (s, h, len(rec.active_after)))

        for a in rec.arcs_removed:
            tail = arcs[a].tail
            if branching.get(tail) != a:
                report.fail(check, "replay", f"removed arc {a} is not in the branching", (a,))
            else:
                del branching[tail]
        for a in rec.arcs_added:
            tail = arcs[a].tail
            if tail in branching:
                report.fail(check, "c1", f"vertex {tail} gets a second out-arc", (tail, branching[tail], a))
            else:
                branching[tail] = a
        if not check.ok:
            break

        after = dict(rec.prefix_after)
        active = list(rec.active_after)
        plen = {v: before[v] for v in active}
        if any(after[v] != before[v] for v in active):
            report.fail(check, "replay", "an active prefix was extended", (index,))
            break
        _check_state(report, check, inst, branching, active, plen)
        if not check.ok:
            break

    if report.ok:
        sol = trace.solution
        if sorted(branching.values()) != sorted(sol.arcs) or sol.iterations != len(trace.records):
            report.fail(None, "final", "solution does not match the replayed branching")
        else:
            arb = check_arborescence(sol, inst)
            if not arb.ok:
                report.fail(None, "final", f"final branching is not an arborescence: {arb.reason}", arb.witness)
            else:
                costs = switching_costs(sol, inst)
                if costs.max_cost > 2 * sol.iterations or costs.costs != dict(sol.switching):
                    report.fail(None, "final", "recorded switching costs are wrong or exceed 2 * iterations")
    return report
