"""Heavy path decomposition baseline for instances whose graph is an in-tree.

An arc ``child -> parent`` is heavy when the child's subtree holds strictly
more than half of the parent's subtree (both counted in vertices, the parent
included).  A heavy path is a maximal chain of heavy arcs plus the light arc
leaving its top, so every root path crosses at most ``ceil(log2 n)`` of them.
Taking each heavy path's arcs from the proposed path of its lowest vertex
yields a solution with at most that many switches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aggregation import Solution
from .bounds import ceil_log2
from .instance import Instance


class BaselineError(ValueError):
    """The instance cannot be solved by the heavy path construction."""


@dataclass(frozen=True)
class InTree:
    root: int
    parent: tuple[int | None, ...]

    @property
    def size(self) -> int:
        return len(self.parent)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(v)
        return kids

    def order_leaves_first(self) -> list[int]:
        """Vertices ordered so that every vertex precedes its parent."""
        kids = self.children()
        order = [self.root]
        for v in order:
            order.extend(kids[v])
        return order[::-1]


@dataclass(frozen=True)
class HeavyPathDecomposition:
    # each path is a list of child vertices, lowest first; vertex v stands for the arc v -> parent(v)
    paths: tuple[tuple[int, ...], ...]
    heavy: tuple[bool, ...]
    path_of: tuple[int | None, ...]
    subtree: tuple[int, ...]

    def crossings(self, tree: InTree, v: int) -> int:
        """Number of distinct heavy paths used by the root path of ``v``."""
        seen = set()
        while tree.parent[v] is not None:
            seen.add(self.path_of[v])
            v = tree.parent[v]
        return len(seen)

    def max_crossings(self, tree: InTree) -> int:
        # crossings(v) = crossings(parent) + [arc v lies on a different path than parent's arc]
        best = 0
        memo: dict[int, int] = {tree.root: 0}
        for v in reversed(tree.order_leaves_first()):
            p = tree.parent[v]
            if p is None:
                continue
            memo[v] = memo[p] + (tree.parent[p] is None or self.path_of[p] != self.path_of[v])
            best = max(best, memo[v])
        return best


def is_tree_instance(inst: Instance) -> InTree | None:
    """The in-tree underlying ``inst`` after merging parallel arcs, if there is one."""
    heads: list[set[int]] = [set() for _ in range(inst.vertex_count)]
    for arc in inst.arcs:
        heads[arc.tail].add(arc.head)
    if heads[inst.root]:
        return None
    parent: list[int | None] = [None] * inst.vertex_count
    for v, hs in enumerate(heads):
        if v == inst.root:
            continue
        if len(hs) != 1:
            return None
        parent[v] = next(iter(hs))

    # every vertex must drain into the root without looping
    state = [0] * inst.vertex_count  # 0 unseen, 1 on stack, 2 reaches root
    state[inst.root] = 2
    for s in range(inst.vertex_count):
        chain = []
        x = s
        while state[x] == 0:
            state[x] = 1
            chain.append(x)
            x = parent[x]
        if state[x] == 1:
            return None
        for y in chain:
            state[y] = 2
    return InTree(inst.root, tuple(parent))


def heavy_path_decomposition(tree: InTree) -> HeavyPathDecomposition:
    n = tree.size
    subtree = [1] * n
    order = tree.order_leaves_first()
    for v in order:
        p = tree.parent[v]
        if p is not None:
            subtree[p] += subtree[v]
    heavy = [False] * n
    has_heavy_child = [False] * n
    for v in range(n):
        p = tree.parent[v]
        if p is not None and 2 * subtree[v] > subtree[p]:
            heavy[v] = True
            has_heavy_child[p] = True

    paths: list[tuple[int, ...]] = []
    path_of: list[int | None] = [None] * n
    # walk up from every vertex that is the bottom of a chain (no heavy child)
    for v in order:
        if tree.parent[v] is None or has_heavy_child[v]:
            continue
        chain = [v]
        x = v
        while heavy[x] and tree.parent[tree.parent[x]] is not None:
            x = tree.parent[x]
            chain.append(x)
        for y in chain:
            path_of[y] = len(paths)
        paths.append(tuple(chain))
    return HeavyPathDecomposition(tuple(paths), tuple(heavy), tuple(path_of), tuple(subtree))


def solve_tree_instance(
    inst: Instance, tree: InTree, hpd: HeavyPathDecomposition
) -> Solution:
    """Pick every heavy path's arcs from the proposed path of its lowest vertex."""
    chosen: list[int] = []
    for path in hpd.paths:
        low = path[0]
        if low not in inst.proposed_paths:
            raise BaselineError(f"lowest vertex {low} of a heavy path is not a terminal")
        proposed = inst.proposed_paths[low]
        if len(proposed) < len(path):
            raise BaselineError(f"proposed path of {low} is shorter than its heavy path")
        for child, a in zip(path, proposed):
            arc = inst.arcs[a]
            if arc.tail != child or arc.head != tree.parent[child]:
                raise BaselineError(f"proposed path of {low} leaves the tree at vertex {child}")
            chosen.append(a)

    out = {inst.arcs[a].tail: a for a in chosen}
    switching = {}
    for t in inst.terminals:
        count = 0
        x = t
        while x != tree.root:
            nxt = tree.parent[x]
            if nxt != tree.root and inst.arcs[out[x]].color != inst.arcs[out[nxt]].color:
                count += 1
            x = nxt
        switching[t] = count
    return Solution(tuple(sorted(chosen)), 0, switching)


def solve_baseline(inst: Instance) -> tuple[Solution, HeavyPathDecomposition]:
    tree = is_tree_instance(inst)
    if tree is None:
        raise BaselineError("is_tree_instance: the instance graph is not an in-tree")
    hpd = heavy_path_decomposition(tree)
    return solve_tree_instance(inst, tree, hpd), hpd


def crossing_bound(n: int) -> int:
    return ceil_log2(n)
