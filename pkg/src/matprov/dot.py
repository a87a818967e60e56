"""Graphviz DOT rendering for procedures and backbones."""
from __future__ import annotations

from dataclasses import dataclass

from .backbone import BackboneGraph
from .model import EdgeKind, EntityType, NodeKind, SynthesisProcedure

_FILL = {
    EntityType.MATERIAL: "lightblue",
    EntityType.TOOL: "lightyellow",
    NodeKind.ACTIVITY: "lightsalmon",
}


@dataclass(frozen=True)
class DotOptions:
    # True draws edges in experimental time order (material -> operation ->
    # product); False keeps the PROV direction, pointing back to the source.
    temporal_arrows: bool = True
    color_by_kind: bool = False
    show_params: bool = True


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def export_dot(proc: SynthesisProcedure, opts: DotOptions = DotOptions()) -> str:
    lines = [f"digraph {quote(proc.label)} {{", "  rankdir=LR;"]
    for node in sorted(proc.nodes, key=lambda n: n.id):
        text = node.label
        if opts.show_params and node.params:
            text += "\n" + "\n".join(
                f"{str(k).split(':', 1)[1]}: {v}" for k, v in sorted(node.params.items())
            )
        attrs = [f"label={quote(text)}"]
        if node.kind is NodeKind.ACTIVITY:
            attrs.append("shape=ellipse")
        else:
            attrs.append("shape=box")
            if node.entity_type is EntityType.TOOL:
                attrs.append('style="rounded"')
        if opts.color_by_kind:
            fill = _FILL[node.entity_type or node.kind]
            style = '"rounded,filled"' if node.entity_type is EntityType.TOOL else "filled"
            attrs = [a for a in attrs if not a.startswith("style=")]
            attrs += [f"style={style}", f"fillcolor={fill}"]
        lines.append(f"  {quote(node.id)} [{', '.join(attrs)}];")

    edges = []
    for edge in proc.edges:
        src, dst = edge.source, edge.target
        if not opts.temporal_arrows:
            src, dst = dst, src
        style = "solid" if edge.kind is EdgeKind.USAGE else "bold"
        edges.append((src, dst, edge.kind.value, style))
    for src, dst, kind, style in sorted(edges):
        lines.append(f"  {quote(src)} -> {quote(dst)} [label={quote(kind)}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def backbone_dot(graph: BackboneGraph, name: str = "backbone") -> str:
    """Backbone in green with weighted edges; runner-up candidates in gray."""
    lines = [f"digraph {quote(name)} {{", "  rankdir=LR;",
             "  node [shape=ellipse, style=filled];"]
    for key in graph.backbone:
        label = graph.display.get(key, key)
        lines.append(f"  {quote(key)} [label={quote(label)}, color=darkgreen, "
                     f"fillcolor=palegreen];")
    for a, b, w in zip(graph.backbone, graph.backbone[1:], graph.weights):
        lines.append(f"  {quote(a)} -> {quote(b)} [label={quote(str(w))}, color=darkgreen, "
                     f"penwidth=2];")
    drawn = set(graph.backbone)
    for position in graph.gray_candidates:
        for g in position:
            if g.label not in drawn:
                drawn.add(g.label)
                label = graph.display.get(g.label, g.label)
                lines.append(f"  {quote(g.label)} [label={quote(label)}, color=gray, "
                             f"fillcolor=lightgray];")
            src, dst = (g.anchor, g.label) if g.direction == "forward" else (g.label, g.anchor)
            lines.append(f"  {quote(src)} -> {quote(dst)} [label={quote(str(g.count))}, "
                         f"color=gray, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
