"""Deterministic 3-coloring of pseudoforests.

Every connected component of a pseudoforest has at most as many edges as
vertices, so it holds at most one cycle.  Removing one cycle edge leaves a
forest, which breadth-first search 2-colors; the removed edge is then fixed
by moving one endpoint to the third color.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class SparseGraph:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def from_edges(cls, vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> "SparseGraph":
        """Build an undirected graph, collapsing parallel and reversed edges."""
        verts = tuple(sorted(set(vertices)))
        present = set(verts)
        undirected = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if u not in present or v not in present:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside the vertex set")
            undirected.add((min(u, v), max(u, v)))
        return cls(verts, tuple(sorted(undirected)))


def _components(g: SparseGraph, adj: Mapping[int, list[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in g.vertices:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def _cycle_edge(comp: list[int], adj: Mapping[int, list[int]]) -> tuple[int, int]:
    """Lexicographically smallest edge of the unique cycle of a unicyclic component."""
    degree = {v: len(adj[v]) for v in comp}
    leaves = deque(v for v in comp if degree[v] <= 1)
    stripped = set()
    while leaves:
        x = leaves.popleft()
        stripped.add(x)
        for y in adj[x]:
            if y not in stripped:
                degree[y] -= 1
                if degree[y] == 1:
                    leaves.append(y)
    on_cycle = [v for v in comp if v not in stripped]
    ring = set(on_cycle)
    return min((u, w) for u in on_cycle for w in adj[u] if w in ring and u < w)


def three_color(g: SparseGraph) -> dict[int, int]:
    """Proper coloring with colors {0, 1, 2}; raises if a component has too many edges."""
    adj: dict[int, list[int]] = {v: [] for v in g.vertices}
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()

    coloring: dict[int, int] = {}
    for comp in _components(g, adj):
        members = set(comp)
        n_edges = sum(len(adj[v]) for v in comp) // 2
        if n_edges > len(comp):
            raise ValueError(
                f"component containing {comp[0]} has {n_edges} edges on {len(comp)} vertices"
            )
        removed = _cycle_edge(comp, adj) if n_edges == len(comp) else None

        start = comp[0]
        coloring[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if (min(x, y), max(x, y)) == removed or y in coloring:
                    continue
                coloring[y] = 1 - coloring[x]
                queue.append(y)
        assert members <= coloring.keys()

        if removed is not None:
            u, w = removed
            if coloring[u] == coloring[w]:
                coloring[w] = 2
    return dict(sorted(coloring.items()))


def largest_color_class(coloring: Mapping[int, int]) -> list[int]:
    """Members of the biggest color class, ties going to the lowest color index."""
    if not coloring:
        return []
    sizes: dict[int, int] = {}
    for c in coloring.values():
        sizes[c] = sizes.get(c, 0) + 1
    best = min(sizes, key=lambda c: (-sizes[c], c))
    return sorted(v for v, c in coloring.items() if c == best)
