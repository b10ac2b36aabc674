"""Graphviz rendering of a solution, one pen color per arc color token."""

from __future__ import annotations

import hashlib
from typing import Iterable

from .instance import Instance

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
    "#8c6d31", "#843c39", "#7b4173", "#3182bd",
)


def color_for(token: str) -> str:
    digest = hashlib.sha1(token.encode("utf-8")).digest()
    return PALETTE[int.from_bytes(digest[:4], "big") % len(PALETTE)]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def solution_to_dot(inst: Instance, arc_ids: Iterable[int], *, show_unused: bool = False) -> str:
    used = set(arc_ids)
    terminals = set(inst.terminals)
    lines = ["digraph solution {", "  rankdir=BT;", "  node [shape=circle fontname=Helvetica];"]
    touched = {inst.root, *terminals}
    for a in used:
        touched.update((inst.arcs[a].tail, inst.arcs[a].head))
    for v in sorted(touched):
        if v == inst.root:
            attrs = "shape=doublecircle style=filled fillcolor=black fontcolor=white"
        elif v in terminals:
            attrs = "style=filled fillcolor=white"
        else:
            attrs = "shape=point width=0.12"
        lines.append(f"  {v} [{attrs}];")
    for a, arc in enumerate(inst.arcs):
        if a in used:
            style = f"color={_quote(color_for(arc.color))} penwidth=2.5"
        elif show_unused:
            style = f"color={_quote(color_for(arc.color))} style=dashed"
        else:
            continue
        lines.append(f"  {arc.tail} -> {arc.head} [{style} label={_quote(arc.color)} tooltip={_quote(f'arc {a}')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
