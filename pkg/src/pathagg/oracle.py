"""Exact min-max switching cost on tiny instances by exhaustive search.

A candidate solution is a choice function: every vertex picks one of its
out-arcs or none.  Candidates are explored vertex by vertex (ids ascending,
"none" before arcs in id order), and the smallest feasible ``alpha`` is found by
trying ``alpha = 0, 1, 2, ...``.  The first candidate found for that ``alpha``
is therefore the lexicographically least optimal choice function.

Pruning is sound: a branch is cut only if some already-determined chain cycles,
stops at a non-root vertex that chose nothing, or has a prefix with more than
``alpha`` switches (switch counts never decrease as a path grows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aggregation import Solution
from .instance import Instance

DEFAULT_MAX_STATES = 10**7


class OracleLimitError(RuntimeError):
    """The search space is larger than allowed; no answer is given."""


@dataclass(frozen=True)
class OptResult:
    optimum: int
    witness: Solution
    search_space: int
    nodes_explored: int


def search_space_size(inst: Instance) -> int:
    outdeg = [0] * inst.vertex_count
    for arc in inst.arcs:
        outdeg[arc.tail] += 1
    return math.prod(d + 1 for d in outdeg)


_NONE = -1
_UNSET = -2


class _Search:
    def __init__(self, inst: Instance, alpha: int):
        self.inst = inst
        self.alpha = alpha
        self.n = inst.vertex_count
        self.options = [[_NONE] for _ in range(self.n)]
        for a, arc in enumerate(inst.arcs):
            if arc.tail != inst.root:
                self.options[arc.tail].append(a)
        self.terminals = set(inst.terminals)
        self.choice = [_UNSET] * self.n
        self.nodes = 0

    def feasible_so_far(self) -> bool:
        arcs = self.inst.arcs
        root = self.inst.root
        for s in range(self.n):
            c = self.choice[s]
            if c == _UNSET or (c == _NONE and s not in self.terminals):
                continue
            seen = {s}
            x = s
            switches = 0
            color = None
            while True:
                c = self.choice[x]
                if c == _UNSET:
                    break
                if c == _NONE:
                    if x != root:
                        return False
                    break
                arc = arcs[c]
                if color is not None and arc.color != color:
                    switches += 1
                    if switches > self.alpha and s in self.terminals:
                        return False
                color = arc.color
                x = arc.head
                if x in seen:
                    return False
                seen.add(x)
        return True

    def run(self) -> list[int] | None:
        choice = self.choice

        def descend(v: int) -> bool:
            if v == self.n:
                return True
            for option in self.options[v]:
                self.nodes += 1
                choice[v] = option
                if self.feasible_so_far() and descend(v + 1):
                    return True
            choice[v] = _UNSET
            return False

        return list(choice) if descend(0) else None


def brute_force_opt(inst: Instance, max_states: int = DEFAULT_MAX_STATES) -> OptResult:
    """Minimum over all arborescences containing the terminals of the worst switching cost."""
    space = search_space_size(inst)
    if space > max_states:
        raise OracleLimitError(f"search space {space} exceeds the limit {max_states}")
    explored = 0
    # a simple path has fewer than n arcs, so n - 2 switches always suffice
    for alpha in range(max(inst.vertex_count - 1, 1)):
        search = _Search(inst, alpha)
        found = search.run()
        explored += search.nodes
        if found is not None:
            arcs = tuple(sorted(a for a in found if a >= 0))
            witness = Solution(arcs, 0, _costs(inst, found))
            return OptResult(witness.max_switching, witness, space, explored)
    raise OracleLimitError("no arborescence reaches every terminal")


def _costs(inst: Instance, choice: list[int]) -> dict[int, int]:
    costs = {}
    for t in inst.terminals:
        x = t
        count = 0
        color = None
        while x != inst.root:
            arc = inst.arcs[choice[x]]
            if color is not None and arc.color != color:
                count += 1
            color = arc.color
            x = arc.head
        costs[t] = count
    return costs
