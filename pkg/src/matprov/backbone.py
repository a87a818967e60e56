"""Synthesis backbones: dominant activity chains across a corpus.

Forward co-occurrence counts how many procedures have activity ``b``
somewhere downstream of activity ``a``, directly connected or not. The
backbone starts from the most frequent pair and grows at either end with the
most frequent admissible neighbour while counts stay at or above the threshold.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .model import SynthesisProcedure
from .similarity import normalize
from .validate import has_cycle, successors

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 25


class EmptyMatrix(ValueError):
    pass


@dataclass
class CooccurrenceMatrix:
    # (upstream, downstream) normalized labels -> number of procedures
    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    # normalized label -> first raw spelling seen
    display: dict[str, str] = field(default_factory=dict)
    n_procedures: int = 0
    skipped: list[str] = field(default_factory=list)

    def count(self, a: str, b: str) -> int:
        return self.counts.get((a, b), 0)

    def following(self, a: str) -> dict[str, int]:
        return {y: c for (x, y), c in self.counts.items() if x == a}

    def preceding(self, b: str) -> dict[str, int]:
        return {x: c for (x, y), c in self.counts.items() if y == b}

    def label(self, key: str) -> str:
        return self.display.get(key, key)


def downstream_activity_pairs(proc: SynthesisProcedure) -> set[tuple[str, str]]:
    """Normalized (a, b) label pairs where activity b is reachable from activity a."""
    adj = successors(proc)
    nodes = proc.node_map
    pairs = set()
    for start in proc.activities:
        seen = {start.id}
        todo = list(adj[start.id])
        while todo:
            node_id = todo.pop()
            if node_id in seen:
                continue
            seen.add(node_id)
            todo.extend(adj[node_id])
            node = nodes[node_id]
            if node.is_activity:
                a, b = normalize(start.label), normalize(node.label)
                if a and b:
                    pairs.add((a, b))
    return pairs


def build_cooccurrence(corpus: Iterable[SynthesisProcedure]) -> CooccurrenceMatrix:
    """Count each ordered activity-label pair at most once per procedure.

    Cyclic procedures have no well-defined downstream order and are skipped;
    their labels are listed in ``skipped``.
    """
    matrix = CooccurrenceMatrix()
    counts: Counter[tuple[str, str]] = Counter()
    for proc in corpus:
        if has_cycle(successors(proc)):
            log.warning("skipping cyclic procedure %r", proc.label)
            matrix.skipped.append(proc.label)
            continue
        matrix.n_procedures += 1
        for node in proc.activities:
            matrix.display.setdefault(normalize(node.label), node.label)
        counts.update(downstream_activity_pairs(proc))
    matrix.counts = dict(sorted(counts.items()))
    return matrix


@dataclass(frozen=True)
class GrayCandidate:
    label: str
    count: int
    # backbone label the candidate would have been attached to
    anchor: str
    direction: str  # "forward" or "backward"


@dataclass
class BackboneGraph:
    backbone: list[str]
    # weights[i] is the co-occurrence count of backbone[i] -> backbone[i + 1]
    weights: list[int]
    # gray_candidates[i] lists runners-up for position i
    gray_candidates: list[list[GrayCandidate]]
    threshold: int
    display: dict[str, str] = field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return [self.display.get(k, k) for k in self.backbone]

    def __bool__(self) -> bool:
        return bool(self.backbone)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "backbone": self.labels,
            "weights": self.weights,
            "gray_candidates": [
                [{"label": self.display.get(g.label, g.label), "count": g.count,
                  "anchor": self.display.get(g.anchor, g.anchor), "direction": g.direction}
                 for g in position]
                for position in self.gray_candidates
            ],
        }


def _best(matrix: CooccurrenceMatrix, end: str, forward: bool, threshold: int,
          taken: set[str]) -> tuple[str, int] | None:
    options = matrix.following(end) if forward else matrix.preceding(end)
    admissible = {x: c for x, c in options.items() if x not in taken and c >= threshold}
    if not admissible:
        return None
    top = max(admissible.values())
    tied = [x for x, c in admissible.items() if c == top]

    # Counts are transitive, so in a repeated chain every later step ties with
    # the next one. Prefer the candidate lying between the end and its rivals.
    def closeness(x: str) -> int:
        return sum(matrix.count(x, y) if forward else matrix.count(y, x) for y in tied if y != x)

    return min(tied, key=lambda x: (-closeness(x), x)), top


def _detour(matrix: CooccurrenceMatrix, a: str, b: str) -> int:
    """Count mass through labels seen between ``a`` and ``b``."""
    return sum(min(c, matrix.count(mid, b)) for mid, c in matrix.following(a).items()
               if mid not in (a, b))


def mine_backbone(matrix: CooccurrenceMatrix, threshold: int = DEFAULT_THRESHOLD) -> BackboneGraph:
    """Grow the backbone from the most frequent pair.

    A pair is admissible only when its count is at least ``threshold``. When
    no pair is, the result is an empty backbone. When both ends can grow the
    larger count wins, with forward first on equal counts.

    Equal counts are resolved toward adjacency first: the seed with the least
    traffic through intermediate labels, and the extension that precedes (or
    follows) its tied rivals. Remaining ties are broken lexicographically.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if not matrix.counts:
        raise EmptyMatrix("co-occurrence matrix is empty")

    seeds = [(pair, c) for pair, c in matrix.counts.items() if pair[0] != pair[1] and c >= threshold]
    if not seeds:
        log.info("no activity pair reaches threshold %d", threshold)
        return BackboneGraph([], [], [], threshold, dict(matrix.display))
    top = max(c for _, c in seeds)
    head, tail = min((pair for pair, c in seeds if c == top),
                     key=lambda pair: (_detour(matrix, *pair), pair))
    count = top

    chain = [head, tail]
    weights = [count]
    # (chosen label, anchor, direction, alternatives) in the order decided
    decisions = [
        (tail, head, "forward", matrix.following(head)),
        (head, tail, "backward", matrix.preceding(tail)),
    ]
    while True:
        taken = set(chain)
        forward = _best(matrix, chain[-1], True, threshold, taken)
        backward = _best(matrix, chain[0], False, threshold, taken)
        if forward is None and backward is None:
            break
        if forward is not None and (backward is None or forward[1] >= backward[1]):
            label, c = forward
            decisions.append((label, chain[-1], "forward", matrix.following(chain[-1])))
            chain.append(label)
            weights.append(c)
        else:
            label, c = backward
            decisions.append((label, chain[0], "backward", matrix.preceding(chain[0])))
            chain.insert(0, label)
            weights.insert(0, c)

    on_chain = set(chain)
    position = {label: i for i, label in enumerate(chain)}
    gray: list[list[GrayCandidate]] = [[] for _ in chain]
    for chosen, anchor, direction, options in decisions:
        slot = gray[position[chosen]]
        listed = {g.label for g in slot}
        for label, c in sorted(options.items(), key=lambda xc: (-xc[1], xc[0])):
            if c >= threshold and label not in on_chain and label not in listed:
                slot.append(GrayCandidate(label, c, anchor, direction))
    return BackboneGraph(chain, weights, gray, threshold, dict(matrix.display))
