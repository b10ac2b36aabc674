"""Instances of the path aggregation problem: data model, validation and file I/O.

An instance is a directed multigraph on vertices ``0..n-1`` with colored arcs,
a root, a list of terminals and, for every terminal, a proposed path given as a
list of arc ids.  Arc ids are positions in ``Instance.arcs``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class InstanceFormatError(ValueError):
    """Raised when an instance document is malformed or references unknown ids."""


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    color: str


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}


@dataclass(frozen=True)
class Instance:
    vertex_count: int
    root: int
    arcs: tuple[Arc, ...]
    terminals: tuple[int, ...]
    proposed_paths: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # normalise containers so instances compare structurally
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "terminals", tuple(self.terminals))
        object.__setattr__(
            self,
            "proposed_paths",
            {int(t): tuple(p) for t, p in self.proposed_paths.items()},
        )

    @property
    def k(self) -> int:
        return len(self.terminals)

    def path_vertices(self, terminal: int) -> list[int]:
        """Vertex sequence of a terminal's proposed path, starting at the terminal."""
        path = self.proposed_paths[terminal]
        if not path:
            return [terminal]
        return [self.arcs[path[0]].tail] + [self.arcs[a].head for a in path]

    def out_arcs(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, arc in enumerate(self.arcs):
            out[arc.tail].append(i)
        return out

    def digest(self) -> str:
        return hashlib.sha256(serialize_instance(self)).hexdigest()


def _check_walk(inst: Instance, start: int, walk: Sequence[int]) -> list[Violation]:
    """Contiguity, range, and endpoint checks shared by validation and simplify_walk."""
    found: list[Violation] = []
    m = len(inst.arcs)
    bad = [a for a in walk if not (isinstance(a, int) and 0 <= a < m)]
    if bad:
        return [Violation("arc-range", f"path of {start} uses unknown arc ids", tuple(bad))]
    if not walk:
        return [Violation("empty-path", f"terminal {start} has an empty path", (start,))]
    arcs = inst.arcs
    if arcs[walk[0]].tail != start:
        found.append(
            Violation("path-start", f"path of {start} starts at {arcs[walk[0]].tail}", (start, walk[0]))
        )
    for a, b in zip(walk, walk[1:]):
        if arcs[a].head != arcs[b].tail:
            found.append(
                Violation("path-discontiguous", f"arcs {a} and {b} of path {start} do not meet", (start, a, b))
            )
    if arcs[walk[-1]].head != inst.root:
        found.append(
            Violation("path-end", f"path of {start} ends at {arcs[walk[-1]].head}, not the root", (start, walk[-1]))
        )
    return found


def validate_instance(inst: Instance) -> ValidationReport:
    """Check every instance rule and report all violations found."""
    found: list[Violation] = []
    n = inst.vertex_count
    if n < 1:
        found.append(Violation("vertex-count", "instance needs at least one vertex"))
    if not 0 <= inst.root < n:
        found.append(Violation("vertex-range", f"root {inst.root} out of range", (inst.root,)))

    for i, arc in enumerate(inst.arcs):
        if not (0 <= arc.tail < n and 0 <= arc.head < n):
            found.append(Violation("vertex-range", f"arc {i} has an endpoint out of range", (i,)))
        if arc.tail == arc.head:
            found.append(Violation("self-loop", f"arc {i} is a self-loop", (i,)))

    seen: set[int] = set()
    for t in inst.terminals:
        if not 0 <= t < n:
            found.append(Violation("vertex-range", f"terminal {t} out of range", (t,)))
        if t == inst.root:
            found.append(Violation("root-is-terminal", "the root cannot be a terminal", (t,)))
        if t in seen:
            found.append(Violation("duplicate-terminal", f"terminal {t} listed twice", (t,)))
        seen.add(t)

    for t in sorted(set(inst.proposed_paths) - seen):
        found.append(Violation("extra-path", f"path given for non-terminal {t}", (t,)))

    for t in inst.terminals:
        if t not in inst.proposed_paths:
            found.append(Violation("missing-path", f"terminal {t} has no proposed path", (t,)))
            continue
        path = inst.proposed_paths[t]
        walk_issues = _check_walk(inst, t, path)
        found.extend(walk_issues)
        if any(v.rule in ("arc-range", "empty-path") for v in walk_issues):
            continue
        colors = {inst.arcs[a].color for a in path}
        if len(colors) > 1:
            found.append(
                Violation("non-monochromatic", f"path of {t} uses colors {sorted(colors)}", (t,))
            )
        verts = [inst.arcs[path[0]].tail] + [inst.arcs[a].head for a in path]
        if len(set(verts)) != len(verts):
            dup = sorted({v for v in verts if verts.count(v) > 1})
            found.append(Violation("non-simple", f"path of {t} revisits vertices {dup}", (t, *dup)))

    return ValidationReport(tuple(found))


def simplify_walk(walk: Sequence[int], inst: Instance) -> list[int]:
    """Shortcut the loops of a monochromatic walk, scanning left to right.

    Whenever the walk returns to a vertex already on the kept path, the cycle
    segment since that vertex is discarded.
    """
    walk = list(walk)
    if not walk:
        return []
    if not all(isinstance(a, int) and 0 <= a < len(inst.arcs) for a in walk):
        raise ValueError("walk references unknown arc ids")
    issues = _check_walk(inst, inst.arcs[walk[0]].tail, walk)
    if issues:
        raise ValueError(issues[0].message)
    if len({inst.arcs[a].color for a in walk}) > 1:
        raise ValueError("walk is not monochromatic")

    kept: list[int] = []
    position = {inst.arcs[walk[0]].tail: 0}
    for a in walk:
        head = inst.arcs[a].head
        if head in position:
            cut = position[head]
            for dropped in kept[cut:]:
                del position[inst.arcs[dropped].head]
            del kept[cut:]
        else:
            kept.append(a)
            position[head] = len(kept)
    return kept


_FIELDS = ("vertices", "root", "arcs", "terminals", "paths")
_ARC_FIELDS = ("id", "tail", "head", "color")


def _require_int(value: object, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(f"{what} must be an integer, got {value!r}")
    return value


def parse_instance(data: bytes | str) -> Instance:
    """Parse an instance document, rejecting unknown fields and dangling ids.

    Path-level rules (monochromatic, simple, reaching the root) are left to
    :func:`validate_instance` so broken walks can still be loaded and repaired.
    """
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InstanceFormatError(f"not a valid document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    unknown = set(doc) - set(_FIELDS)
    if unknown:
        raise InstanceFormatError(f"unknown fields: {sorted(unknown)}")
    missing = [f for f in _FIELDS if f not in doc]
    if missing:
        raise InstanceFormatError(f"missing fields: {missing}")

    n = _require_int(doc["vertices"], "vertices")
    if n < 1:
        raise InstanceFormatError("vertices must be positive")

    def vertex(value: object, what: str) -> int:
        v = _require_int(value, what)
        if not 0 <= v < n:
            raise InstanceFormatError(f"{what} {v} is not a vertex id")
        return v

    root = vertex(doc["root"], "root")

    if not isinstance(doc["arcs"], list):
        raise InstanceFormatError("arcs must be an array")
    arcs = []
    for pos, raw in enumerate(doc["arcs"]):
        if not isinstance(raw, dict):
            raise InstanceFormatError(f"arc {pos} must be an object")
        extra = set(raw) - set(_ARC_FIELDS)
        if extra:
            raise InstanceFormatError(f"arc {pos} has unknown fields {sorted(extra)}")
        if set(raw) != set(_ARC_FIELDS):
            raise InstanceFormatError(f"arc {pos} must have fields {list(_ARC_FIELDS)}")
        if _require_int(raw["id"], "arc id") != pos:
            raise InstanceFormatError(f"arc id {raw['id']} does not match its position {pos}")
        tail = vertex(raw["tail"], "arc tail")
        head = vertex(raw["head"], "arc head")
        if tail == head:
            raise InstanceFormatError(f"arc {pos} is a self-loop at {tail}")
        if not isinstance(raw["color"], str):
            raise InstanceFormatError(f"arc {pos} color must be a string")
        arcs.append(Arc(tail, head, raw["color"]))

    if not isinstance(doc["terminals"], list):
        raise InstanceFormatError("terminals must be an array")
    terminals = [vertex(t, "terminal") for t in doc["terminals"]]

    if not isinstance(doc["paths"], dict):
        raise InstanceFormatError("paths must be an object")
    paths: dict[int, tuple[int, ...]] = {}
    for key, raw_path in doc["paths"].items():
        try:
            t = int(key)
        except ValueError:
            raise InstanceFormatError(f"path key {key!r} is not a vertex id") from None
        if str(t) != key:
            raise InstanceFormatError(f"path key {key!r} is not canonical")
        vertex(t, "path key")
        if not isinstance(raw_path, list):
            raise InstanceFormatError(f"path of {t} must be an array")
        ids = []
        for a in raw_path:
            a = _require_int(a, "path arc id")
            if not 0 <= a < len(arcs):
                raise InstanceFormatError(f"path of {t} references unknown arc {a}")
            ids.append(a)
        paths[t] = tuple(ids)

    return Instance(n, root, tuple(arcs), tuple(terminals), paths)


def serialize_instance(inst: Instance) -> bytes:
    """Deterministic, line-oriented JSON encoding: one arc and one path per line."""
    dumps = json.dumps
    lines = ["{", f'  "vertices": {inst.vertex_count},', f'  "root": {inst.root},']
    if inst.arcs:
        lines.append('  "arcs": [')
        body = [
            "    " + dumps({"id": i, "tail": a.tail, "head": a.head, "color": a.color}, ensure_ascii=False)
            for i, a in enumerate(inst.arcs)
        ]
        lines.append(",\n".join(body))
        lines.append("  ],")
    else:
        lines.append('  "arcs": [],')
    lines.append(f'  "terminals": {dumps(list(inst.terminals))},')
    keys = [t for t in inst.terminals if t in inst.proposed_paths]
    keys += sorted(set(inst.proposed_paths) - set(keys))
    if keys:
        lines.append('  "paths": {')
        lines.append(",\n".join(f'    "{t}": {dumps(list(inst.proposed_paths[t]))}' for t in keys))
        lines.append("  }")
    else:
        lines.append('  "paths": {}')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def build_instance(
    vertex_count: int,
    root: int,
    arcs: Iterable[tuple[int, int, str]],
    paths: Mapping[int, Sequence[int]],
) -> Instance:
    """Convenience constructor: terminals are the keys of ``paths`` in the given order."""
    return Instance(
        vertex_count,
        root,
        tuple(Arc(t, h, c) for t, h, c in arcs),
        tuple(paths),
        {t: tuple(p) for t, p in paths.items()},
    )
