"""Seeded instance families.

* ``lb-tree``: complete binary in-tree where every non-root vertex is a
  terminal with its own color and its own parallel arcs.  No arborescence
  beats ``depth - 1`` switches on it.
* ``rand-tree``: random recursive in-tree, all non-root vertices terminals,
  with some terminals reusing a child's path (and so its arcs and color).
* ``planted-dag``: random graph with one planted monochromatic path per
  terminal plus random decoy arcs.  By default path interiors are visited in
  random order, so prefixes can block each other in cycles.

All randomness comes from :class:`pathagg.rng.SplitMix64`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .instance import Arc, Instance
from .rng import SplitMix64

FAMILIES = ("lb-tree", "rand-tree", "planted-dag")


@dataclass(frozen=True)
class GenSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0


def gen_binary_tree_lower_bound(depth: int) -> Instance:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n = 2 ** (depth + 1) - 1
    arcs: list[Arc] = []
    paths: dict[int, tuple[int, ...]] = {}
    for v in range(1, n):
        color = f"c{v}"
        path = []
        x = v
        while x != 0:
            parent = (x - 1) // 2
            path.append(len(arcs))
            arcs.append(Arc(x, parent, color))
            x = parent
        paths[v] = tuple(path)
    return Instance(n, 0, tuple(arcs), tuple(range(1, n)), paths)


def gen_random_tree(n: int, max_parallel: int = 2, seed: int = 0) -> Instance:
    """Random in-tree rooted at 0; every other vertex is a terminal.

    Terminals are built deepest-id first.  A terminal with children reuses the
    path of a random child (from itself upwards) with probability 1/2, and is
    forced to once its own tree edge already carries ``max_parallel`` arcs.
    Otherwise it gets a fresh color and fresh parallel arcs.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if max_parallel < 1:
        raise ValueError("max_parallel must be at least 1")
    rng = SplitMix64(seed)
    parent = [-1] + [rng.below(v) for v in range(1, n)]
    children: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        children[parent[v]].append(v)

    arcs: list[Arc] = []
    load = [0] * n  # arcs on the tree edge v -> parent[v]
    paths: dict[int, tuple[int, ...]] = {}
    for v in range(n - 1, 0, -1):
        kids = children[v]
        if kids and (load[v] >= max_parallel or rng.coin()):
            paths[v] = paths[rng.choice(kids)][1:]
            continue
        color = f"c{v}"
        path = []
        x = v
        while x != 0:
            path.append(len(arcs))
            arcs.append(Arc(x, parent[x], color))
            load[x] += 1
            x = parent[x]
        paths[v] = tuple(path)
    terminals = tuple(range(1, n))
    return Instance(n, 0, tuple(arcs), terminals, {t: paths[t] for t in terminals})


def gen_planted_dag(
    n: int,
    k: int,
    extra_arcs: int = 0,
    seed: int = 0,
    max_path_len: int = 16,
    ordered: bool = False,
) -> Instance:
    """Planted-path instance on vertices ``0..n-1`` with the root at ``n - 1``.

    Each terminal gets between 0 and ``max_path_len`` interior vertices, sampled
    without replacement.  With ``ordered`` the interiors are increasing ids
    greater than the terminal and decoys point forward, so the graph is acyclic.
    """
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    if extra_arcs < 0 or max_path_len < 0:
        raise ValueError("extra_arcs and max_path_len must be non-negative")
    rng = SplitMix64(seed)
    root = n - 1
    terminals = sorted(rng.sample(range(root), k))

    arcs: list[Arc] = []
    paths: dict[int, tuple[int, ...]] = {}
    colors = []
    for v in terminals:
        pool = range(v + 1, root) if ordered else _Skip(root, v)
        length = rng.between(0, min(max_path_len, len(pool)))
        interior = rng.sample(pool, length)
        if ordered:
            interior.sort()
        color = f"p{v}"
        colors.append(color)
        route = [v, *interior, root]
        path = []
        for a, b in zip(route, route[1:]):
            path.append(len(arcs))
            arcs.append(Arc(a, b, color))
        paths[v] = tuple(path)

    for _ in range(extra_arcs):
        if n < 2:
            break
        tail = rng.below(n)
        head = rng.below(n - 1)
        head += head >= tail
        if ordered and tail > head:
            tail, head = head, tail
        arcs.append(Arc(tail, head, rng.choice(colors)))

    return Instance(n, root, tuple(arcs), tuple(terminals), paths)


class _Skip:
    """``range(stop)`` with one value removed, without materialising it."""

    def __init__(self, stop: int, skip: int):
        self.stop = stop
        self.skip = skip

    def __len__(self) -> int:
        return self.stop - 1

    def __getitem__(self, i: int) -> int:
        return i + (i >= self.skip)


def generate(spec: GenSpec) -> Instance:
    p = spec.params
    if spec.family == "lb-tree":
        return gen_binary_tree_lower_bound(p.get("depth", 2))
    if spec.family == "rand-tree":
        return gen_random_tree(p.get("n", 16), p.get("max_parallel", 2), spec.seed)
    if spec.family == "planted-dag":
        return gen_planted_dag(
            p.get("n", 32),
            p.get("k", 8),
            p.get("extra_arcs", 0),
            spec.seed,
            max_path_len=p.get("max_path_len", 16),
            ordered=p.get("ordered", False),
        )
    raise ValueError(f"unknown family {spec.family!r}; expected one of {FAMILIES}")
