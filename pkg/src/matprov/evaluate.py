"""Scoring extracted procedures against expert ground truth.

Procedures within a paper are paired greedily by label similarity. Each pair
is then scored at the node, edge, structural (nodes and edges pooled) and
parametric levels. Strings are compared after :func:`normalize`, and gold
strings may list acceptable variants.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import SynthesisProcedure
from .similarity import normalize, similarity

LEVELS = ("node", "edge", "structural", "parametric")


class EmptyGold(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class VariantTable:
    """Maps canonical gold strings to acceptable alternatives.

    Keys and values are compared in normalized form, so ``{"Ar": ["Argon"]}``
    lets a predicted ``"argon"`` match a gold ``"Ar"``.
    """

    def __init__(self, table: Mapping[str, Iterable[str]] | None = None):
        self._lookup: dict[str, set[str]] = {}
        for canonical, variants in (table or {}).items():
            key = normalize(canonical)
            accepted = self._lookup.setdefault(key, {key})
            accepted.update(normalize(v) for v in variants)

    @classmethod
    def load(cls, path: str | Path) -> "VariantTable":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict) or not all(
            isinstance(v, list) and all(isinstance(s, str) for s in v) for v in data.values()
        ):
            raise ValueError(f"{path}: variant table must map strings to lists of strings")
        return cls(data)

    def accepted(self, *gold: str) -> frozenset[str]:
        out: set[str] = set()
        for s in gold:
            key = normalize(s)
            out |= self._lookup.get(key, {key})
        return frozenset(out)

    def __len__(self) -> int:
        return len(self._lookup)


@dataclass(frozen=True)
class Score:
    """Counts of correct, predicted and gold elements.

    When neither side has any element the level counts as perfect agreement
    (all three ratios 1.0); an empty side facing a non-empty one scores 0.
    """

    tp: int = 0
    n_pred: int = 0
    n_gold: int = 0

    def __add__(self, other: "Score") -> "Score":
        return Score(self.tp + other.tp, self.n_pred + other.n_pred, self.n_gold + other.n_gold)

    @property
    def precision(self) -> float:
        if self.n_pred:
            return self.tp / self.n_pred
        return 1.0 if self.n_gold == 0 else 0.0

    @property
    def recall(self) -> float:
        if self.n_gold:
            return self.tp / self.n_gold
        return 1.0 if self.n_pred == 0 else 0.0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)

    def to_dict(self, counts: bool = False) -> dict:
        out = {"precision": self.precision, "recall": self.recall, "f1": self.f1}
        if counts:
            out.update(tp=self.tp, n_pred=self.n_pred, n_gold=self.n_gold)
        return out


def f1_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class MatchedPair:
    gold_index: int
    pred_index: int
    similarity: float


def match_labels(gold: Sequence[str], pred: Sequence[str],
                 min_similarity: float = 0.0) -> list[MatchedPair]:
    """Pair labels greedily by descending similarity, each used at most once.

    Ties are broken by gold index, then pred index.
    """
    scored = sorted(
        ((similarity(g, p), gi, pi) for gi, g in enumerate(gold) for pi, p in enumerate(pred)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    used_gold: set[int] = set()
    used_pred: set[int] = set()
    pairs = []
    for sim, gi, pi in scored:
        if sim < min_similarity:
            break
        if gi in used_gold or pi in used_pred:
            continue
        used_gold.add(gi)
        used_pred.add(pi)
        pairs.append(MatchedPair(gi, pi, sim))
    return pairs


def match_procedures(gold: Sequence[SynthesisProcedure], pred: Sequence[SynthesisProcedure],
                     min_similarity: float = 0.0) -> tuple[list[MatchedPair], float]:
    """Pair gold and predicted procedures; return ``(pairs, collection_rate)``."""
    if not gold:
        raise EmptyGold("collection rate is undefined without gold procedures")
    pairs = match_labels([p.label for p in gold], [p.label for p in pred], min_similarity)
    return pairs, len(pairs) / len(gold)


@dataclass
class StructuralResult:
    node: Score
    edge: Score
    # gold node id -> pred node id for every correctly extracted node
    node_matches: dict[str, str] = field(default_factory=dict)
    # (gold edge index, pred edge index)
    edge_matches: list[tuple[int, int]] = field(default_factory=list)

    @property
    def structural(self) -> Score:
        return self.node + self.edge


def eval_structural(gold: SynthesisProcedure, pred: SynthesisProcedure,
                    variants: VariantTable | None = None) -> StructuralResult:
    variants = variants or VariantTable()
    gold_accept = {n.id: variants.accepted(*n.labels) for n in gold.nodes}
    pred_key = {n.id: normalize(n.label) for n in pred.nodes}

    node_matches: dict[str, str] = {}
    for pnode in pred.nodes:
        for gnode in gold.nodes:
            if gnode.id not in node_matches and pred_key[pnode.id] in gold_accept[gnode.id]:
                node_matches[gnode.id] = pnode.id
                break
    matched_pred = set(node_matches.values())

    consumed: set[int] = set()
    edge_matches = []
    for pi, pedge in enumerate(pred.edges):
        # an edge touching a wrongly extracted node can never be correct
        if pedge.activity_id not in matched_pred or pedge.entity_id not in matched_pred:
            continue
        act, ent = pred_key[pedge.activity_id], pred_key[pedge.entity_id]
        for gi, gedge in enumerate(gold.edges):
            if (gi in consumed or gedge.kind is not pedge.kind
                    or gedge.activity_id not in node_matches
                    or gedge.entity_id not in node_matches):
                continue
            if act in gold_accept[gedge.activity_id] and ent in gold_accept[gedge.entity_id]:
                consumed.add(gi)
                edge_matches.append((gi, pi))
                break

    return StructuralResult(
        node=Score(len(node_matches), len(pred.nodes), len(gold.nodes)),
        edge=Score(len(edge_matches), len(pred.edges), len(gold.edges)),
        node_matches=node_matches,
        edge_matches=edge_matches,
    )


def eval_parametric(gold: SynthesisProcedure, pred: SynthesisProcedure,
                    structural: StructuralResult,
                    variants: VariantTable | None = None) -> Score:
    """Score (parameter key, value) pairs on correctly extracted nodes only."""
    variants = variants or VariantTable()
    tp = n_pred = n_gold = 0
    for gold_id, pred_id in structural.node_matches.items():
        gparams = gold.node_map[gold_id].params
        pparams = pred.node_map[pred_id].params
        n_gold += len(gparams)
        n_pred += len(pparams)
        remaining = [(normalize(str(k)), variants.accepted(v)) for k, v in gparams.items()]
        for key, value in pparams.items():
            pk, pv = normalize(str(key)), normalize(value)
            for i, (gk, gv) in enumerate(remaining):
                if pk == gk and pv in gv:
                    del remaining[i]
                    tp += 1
                    break
    return Score(tp, n_pred, n_gold)


@dataclass
class PairResult:
    gold_label: str
    pred_label: str
    similarity: float
    scores: dict[str, Score]

    def to_dict(self) -> dict:
        out = {"gold_label": self.gold_label, "pred_label": self.pred_label,
               "similarity": self.similarity}
        out.update({level: s.to_dict(counts=True) for level, s in self.scores.items()})
        return out


def evaluate_pair(gold: SynthesisProcedure, pred: SynthesisProcedure,
                  variants: VariantTable | None = None, sim: float | None = None) -> PairResult:
    structural = eval_structural(gold, pred, variants)
    scores = {
        "node": structural.node,
        "edge": structural.edge,
        "structural": structural.structural,
        "parametric": eval_parametric(gold, pred, structural, variants),
    }
    if sim is None:
        sim = similarity(gold.label, pred.label)
    return PairResult(gold.label, pred.label, sim, scores)


@dataclass
class PaperResult:
    name: str
    n_gold: int
    n_pred: int
    pairs: list[PairResult]

    @property
    def n_matched(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> dict:
        return {"paper": self.name, "n_gold": self.n_gold, "n_pred": self.n_pred,
                "n_matched": self.n_matched,
                "collection_rate": self.n_matched / self.n_gold if self.n_gold else None,
                "pairs": [p.to_dict() for p in self.pairs]}


def evaluate_paper(gold: Sequence[SynthesisProcedure], pred: Sequence[SynthesisProcedure],
                   variants: VariantTable | None = None, name: str = "",
                   min_similarity: float = 0.0) -> PaperResult:
    pairs = match_labels([p.label for p in gold], [p.label for p in pred], min_similarity)
    results = [evaluate_pair(gold[m.gold_index], pred[m.pred_index], variants, m.similarity)
               for m in pairs]
    return PaperResult(name, len(gold), len(pred), results)


@dataclass
class EvalReport:
    """Corpus-level scores, micro-averaged over every matched pair."""

    collection_rate: float
    node: Score
    edge: Score
    structural: Score
    parametric: Score
    papers: list[PaperResult] = field(default_factory=list)

    def metrics(self) -> dict[str, float]:
        """Flat ``{"node.precision": ..., ...}`` view including collection_rate."""
        out = {"collection_rate": self.collection_rate}
        for level in LEVELS:
            score = getattr(self, level)
            for name in ("precision", "recall", "f1"):
                out[f"{level}.{name}"] = getattr(score, name)
        return out

    def to_dict(self, breakdown: bool = True) -> dict:
        out: dict = {"collection_rate": self.collection_rate}
        for level in LEVELS:
            out[level] = getattr(self, level).to_dict()
        if breakdown:
            out["counts"] = {level: getattr(self, level).to_dict(counts=True) for level in LEVELS}
            out["papers"] = [p.to_dict() for p in self.papers]
        return out


def build_report(papers: Sequence[PaperResult]) -> EvalReport:
    n_gold = sum(p.n_gold for p in papers)
    if not n_gold:
        raise EmptyGold("no gold procedures to evaluate against")
    totals = {level: Score() for level in LEVELS}
    for paper in papers:
        for pair in paper.pairs:
            for level in LEVELS:
                totals[level] = totals[level] + pair.scores[level]
    return EvalReport(
        collection_rate=sum(p.n_matched for p in papers) / n_gold,
        papers=list(papers),
        **totals,
    )


def evaluate(gold: Sequence[SynthesisProcedure], pred: Sequence[SynthesisProcedure],
             variants: VariantTable | None = None) -> EvalReport:
    """Evaluate a single paper's procedures."""
    return build_report([evaluate_paper(gold, pred, variants)])


@dataclass
class RunAggregate:
    n_runs: int
    # metric name -> (mean, population standard deviation)
    stats: dict[str, tuple[float, float]]

    def mean(self, metric: str) -> float:
        return self.stats[metric][0]

    def stddev(self, metric: str) -> float:
        return self.stats[metric][1]

    def to_dict(self) -> dict:
        return {"n_runs": self.n_runs, "stddev": "population",
                "metrics": {k: {"mean": m, "stddev": s} for k, (m, s) in self.stats.items()}}


def aggregate_runs(reports: Sequence[EvalReport]) -> RunAggregate:
    if not reports:
        raise EmptyInput("need at least one report")
    per_run = [r.metrics() for r in reports]
    stats = {}
    for key in per_run[0]:
        values = [m[key] for m in per_run]
        stats[key] = (statistics.fmean(values), statistics.pstdev(values))
    return RunAggregate(len(reports), stats)
