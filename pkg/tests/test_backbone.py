import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_proc
from generators import CHAIN, plant_cycle, planted_chain_corpus, random_dag
from oracles import longest_admissible_paths, reachable_activity_pairs
from matprov.backbone import (CooccurrenceMatrix, EmptyMatrix, build_cooccurrence,
                              downstream_activity_pairs, mine_backbone)


def chain_proc(label, steps):
    nodes = [("m0", "start", "material")]
    edges = []
    for i, step in enumerate(steps):
        nodes += [(f"a{i}", step), (f"m{i + 1}", f"after {step}", "material")]
        edges += [("U", f"a{i}", f"m{i}"), ("G", f"a{i}", f"m{i + 1}")]
    return make_proc(label, nodes, edges)


def matrix(counts):
    return CooccurrenceMatrix(counts=dict(counts), display={})


def test_three_step_chain_pairs():
    proc = chain_proc("X_y", ["Weighing", "Mixing", "Pressing"])
    assert downstream_activity_pairs(proc) == {
        ("weighing", "mixing"), ("weighing", "pressing"), ("mixing", "pressing")}


def test_pairs_counted_once_per_procedure():
    # mixing appears twice, both before pressing
    proc = chain_proc("X_y", ["Mixing", "mixing", "Pressing"])
    m = build_cooccurrence([proc])
    assert m.count("mixing", "pressing") == 1
    assert m.count("mixing", "mixing") == 1
    assert m.display["mixing"] == "Mixing"


def test_branching_is_not_ordered():
    # a generates two products consumed by independent steps b and c
    proc = make_proc("X_y", [("a", "split"), ("b", "left"), ("c", "right"),
                             ("e1", "p1", "material"), ("e2", "p2", "material")],
                     [("G", "a", "e1"), ("G", "a", "e2"), ("U", "b", "e1"), ("U", "c", "e2")])
    assert downstream_activity_pairs(proc) == {("split", "left"), ("split", "right")}


def test_cyclic_procedures_skipped():
    rng = random.Random(0)
    cyc = plant_cycle(rng, random_dag(rng, "X_cyc"))
    m = build_cooccurrence([cyc, chain_proc("X_ok", ["a", "b"])])
    assert m.skipped == ["X_cyc"] and m.n_procedures == 1
    assert m.counts == {("a", "b"): 1}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_pairs_match_transitive_closure(seed):
    proc = random_dag(random.Random(seed))
    assert downstream_activity_pairs(proc) == reachable_activity_pairs(proc)


def test_planted_chain():
    corpus = planted_chain_corpus()
    m = build_cooccurrence(corpus)
    graph = mine_backbone(m, threshold=25)
    assert graph.backbone == CHAIN
    assert graph.weights == [30, 30, 30]
    gray = {(g.label, g.count) for slot in graph.gray_candidates for g in slot}
    assert ("grinding", 26) in gray
    assert longest_admissible_paths(m.counts, 25) == [tuple(CHAIN)]
    assert graph.to_dict()["backbone"][0] in ("weighing", "Weighing")


def test_noise_stays_below_ten():
    corpus = planted_chain_corpus()
    m = build_cooccurrence(corpus)
    per_label = Counter()
    for proc in corpus:
        for label in {n.label.lower() for n in proc.activities}:
            per_label[label] += 1
    for label, n in per_label.items():
        if label not in CHAIN and label != "grinding":
            assert n <= 10
    assert max(c for (a, b), c in m.counts.items() if "grinding" not in (a, b)
               and not (a in CHAIN and b in CHAIN)) <= 10


def test_threshold_is_inclusive():
    m = matrix({("a", "b"): 25})
    assert mine_backbone(m, threshold=25).backbone == ["a", "b"]
    assert not mine_backbone(m, threshold=26)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["weigh", "mix", "press", "sinter", "anneal", "cut"]),
                min_size=2, max_size=6, unique=True),
       st.integers(1, 8), st.integers(0, 3))
def test_shared_chain_recovered(steps, threshold, extra):
    corpus = [chain_proc(f"X{i}_c", steps) for i in range(threshold + extra)]
    graph = mine_backbone(build_cooccurrence(corpus), threshold=threshold)
    assert graph.backbone == steps
    assert graph.weights == [threshold + extra] * (len(steps) - 1)


def test_competing_branch_is_gray():
    # grinding follows mixing in 26 procedures, pressing in 28
    corpus = []
    for i in range(30):
        steps = ["weighing", "mixing"]
        if i < 28:
            steps.append("pressing")
        nodes = [("m0", "start", "material")]
        edges = []
        for k, step in enumerate(steps):
            nodes += [(f"a{k}", step), (f"m{k + 1}", f"{step} out", "material")]
            edges += [("U", f"a{k}", f"m{k}"), ("G", f"a{k}", f"m{k + 1}")]
        if i >= 4:
            nodes += [("ag", "grinding"), ("mg", "ground", "material")]
            edges += [("U", "ag", "m2"), ("G", "ag", "mg")]
        corpus.append(make_proc(f"X{i}_b", nodes, edges))
    graph = mine_backbone(build_cooccurrence(corpus), threshold=25)
    assert graph.backbone == ["weighing", "mixing", "pressing"]
    slot = graph.gray_candidates[graph.backbone.index("pressing")]
    assert [(g.label, g.count, g.anchor) for g in slot] == [("grinding", 26, "mixing")]
    for a, b, w in zip(graph.backbone, graph.backbone[1:], graph.weights):
        assert w >= 25 and w == build_cooccurrence(corpus).count(a, b)


def test_no_seed_gives_empty_backbone():
    graph = mine_backbone(matrix({("a", "b"): 10, ("b", "c"): 4}), threshold=25)
    assert graph.backbone == [] and graph.weights == [] and not graph


def test_empty_matrix_raises():
    with pytest.raises(EmptyMatrix):
        mine_backbone(CooccurrenceMatrix())
    with pytest.raises(ValueError):
        mine_backbone(matrix({("a", "b"): 3}), threshold=0)


def test_self_pairs_never_seed():
    graph = mine_backbone(matrix({("a", "a"): 99, ("a", "b"): 30}), threshold=25)
    assert graph.backbone == ["a", "b"]


def test_seed_tie_breaks_lexicographically():
    graph = mine_backbone(matrix({("x", "y"): 40, ("c", "d"): 40}), threshold=25)
    assert graph.backbone == ["c", "d"]


def test_grows_toward_larger_count():
    counts = {("b", "c"): 50, ("a", "b"): 30, ("c", "d"): 40, ("c", "e"): 35}
    graph = mine_backbone(matrix(counts), threshold=25)
    assert graph.backbone == ["a", "b", "c", "d"]
    assert graph.weights == [30, 50, 40]
    assert [g.label for g in graph.gray_candidates[3]] == ["e"]


def test_equal_counts_extend_forward_first():
    # d could join at either end with the same count; forward wins
    counts = {("b", "c"): 50, ("c", "d"): 30, ("d", "b"): 30}
    graph = mine_backbone(matrix(counts), threshold=25)
    assert graph.backbone == ["b", "c", "d"]


def test_no_label_repeats():
    counts = {("a", "b"): 50, ("b", "a"): 45}
    graph = mine_backbone(matrix(counts), threshold=25)
    assert graph.backbone == ["a", "b"]


def test_raising_threshold_never_lengthens():
    m = build_cooccurrence(planted_chain_corpus())
    lengths = [len(mine_backbone(m, threshold=t).backbone) for t in range(1, 35)]
    assert lengths == sorted(lengths, reverse=True)


def test_deterministic_under_corpus_order():
    corpus = planted_chain_corpus()
    first = mine_backbone(build_cooccurrence(corpus))
    rng = random.Random(1)
    for _ in range(5):
        rng.shuffle(corpus)
        again = mine_backbone(build_cooccurrence(corpus))
        assert again.backbone == first.backbone
        assert again.weights == first.weights
        assert again.gray_candidates == first.gray_candidates


_labels = st.sampled_from(list("abcdefg"))
_matrices = st.dictionaries(st.tuples(_labels, _labels), st.integers(1, 40), min_size=1,
                            max_size=25)


@settings(max_examples=300, deadline=None)
@given(_matrices, st.integers(1, 40))
def test_backbone_invariants_on_random_matrices(counts, threshold):
    m = matrix(counts)
    graph = mine_backbone(m, threshold)
    assert len(set(graph.backbone)) == len(graph.backbone)
    assert len(graph.weights) == max(len(graph.backbone) - 1, 0)
    for a, b, w in zip(graph.backbone, graph.backbone[1:], graph.weights):
        assert w == m.count(a, b) and w >= threshold
    for slot in graph.gray_candidates:
        for g in slot:
            assert g.count >= threshold and g.label not in graph.backbone
    assert mine_backbone(matrix(dict(reversed(list(counts.items())))), threshold) == graph


@settings(max_examples=300, deadline=None)
@given(_matrices, st.integers(1, 39))
def test_raising_threshold_never_lengthens_random(counts, threshold):
    m = matrix(counts)
    assert len(mine_backbone(m, threshold + 1).backbone) <= len(mine_backbone(m, threshold).backbone)
