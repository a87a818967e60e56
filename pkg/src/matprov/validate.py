"""Structural checks and corpus statistics for synthesis graphs."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .elements import parse_composition
from .model import SynthesisProcedure


class PrimaryClass(str, Enum):
    DAG = "DAG"
    CYCLIC = "Cyclic"
    ISOLATED_NODES = "IsolatedNodes"


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class GraphClass:
    is_dag: bool
    has_cycle: bool
    has_isolated_nodes: bool
    is_connected: bool

    @property
    def primary(self) -> PrimaryClass:
        # cyclic beats isolated beats DAG, so each procedure lands in one class
        if self.has_cycle:
            return PrimaryClass.CYCLIC
        if self.has_isolated_nodes:
            return PrimaryClass.ISOLATED_NODES
        return PrimaryClass.DAG

    def to_dict(self) -> dict:
        return {"primary": self.primary.value, "is_dag": self.is_dag,
                "has_cycle": self.has_cycle, "has_isolated_nodes": self.has_isolated_nodes,
                "is_connected": self.is_connected}


def successors(proc: SynthesisProcedure) -> dict[str, list[str]]:
    """Adjacency in experimental time order (entity -> activity -> entity)."""
    adj: dict[str, list[str]] = {n.id: [] for n in proc.nodes}
    for edge in proc.edges:
        adj[edge.source].append(edge.target)
    return adj


def has_cycle(adj: dict[str, list[str]]) -> bool:
    """Iterative three-colour DFS."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(adj, WHITE)
    for root in adj:
        if colour[root] != WHITE:
            continue
        colour[root] = GREY
        stack = [(root, iter(adj[root]))]
        while stack:
            node, children = stack[-1]
            for child in children:
                if colour[child] == GREY:
                    return True
                if colour[child] == WHITE:
                    colour[child] = GREY
                    stack.append((child, iter(adj[child])))
                    break
            else:
                colour[node] = BLACK
                stack.pop()
    return False


def _is_connected(proc: SynthesisProcedure) -> bool:
    if not proc.nodes:
        return True
    neighbours: dict[str, set[str]] = {n.id: set() for n in proc.nodes}
    for edge in proc.edges:
        neighbours[edge.activity_id].add(edge.entity_id)
        neighbours[edge.entity_id].add(edge.activity_id)
    start = proc.nodes[0].id
    seen = {start}
    todo = [start]
    while todo:
        for nxt in neighbours[todo.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return len(seen) == len(neighbours)


def classify(proc: SynthesisProcedure) -> GraphClass:
    cyclic = has_cycle(successors(proc))
    touched = {e.activity_id for e in proc.edges} | {e.entity_id for e in proc.edges}
    isolated = any(n.id not in touched for n in proc.nodes)
    return GraphClass(is_dag=not cyclic, has_cycle=cyclic, has_isolated_nodes=isolated,
                      is_connected=_is_connected(proc))


@dataclass
class CorpusStats:
    total_procedures: int
    class_counts: dict[str, int]
    # keyed by the lower edge of each [lo, lo + bin_width) bin
    node_histogram: dict[int, int]
    bin_width: int
    element_frequency: dict[str, int]
    composition_warnings: dict[str, list[str]] = field(default_factory=dict)

    def histogram_rows(self) -> list[tuple[str, int]]:
        w = self.bin_width
        return [(f"[{lo},{lo + w})", n) for lo, n in sorted(self.node_histogram.items())]

    def mode_bin(self) -> tuple[int, int]:
        lo = max(sorted(self.node_histogram), key=lambda k: self.node_histogram[k])
        return lo, lo + self.bin_width

    def to_dict(self) -> dict:
        return {
            "total_procedures": self.total_procedures,
            "class_counts": dict(self.class_counts),
            "bin_width": self.bin_width,
            "node_histogram": dict(self.histogram_rows()),
            "element_frequency": dict(self.element_frequency),
        }


def corpus_stats(corpus: Iterable[SynthesisProcedure], bin_width: int = 1) -> CorpusStats:
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    classes: Counter[str] = Counter({c.value: 0 for c in PrimaryClass})
    histogram: Counter[int] = Counter()
    elements: Counter[str] = Counter()
    warnings: dict[str, list[str]] = {}
    total = 0
    for proc in corpus:
        total += 1
        classes[classify(proc).primary.value] += 1
        histogram[len(proc.nodes) // bin_width * bin_width] += 1
        composition = proc.composition
        symbols = parse_composition(composition)
        elements.update(symbols)
        if not symbols:
            warnings.setdefault(proc.label, []).append("no element symbols found")
    if total == 0:
        raise EmptyCorpus("corpus contains no procedures")
    return CorpusStats(
        total_procedures=total,
        class_counts=dict(classes),
        node_histogram=dict(sorted(histogram.items())),
        bin_width=bin_width,
        element_frequency=dict(sorted(elements.items(), key=lambda kv: (-kv[1], kv[0]))),
        composition_warnings=warnings,
    )
