"""Seeded generators for synthetic procedures."""
from __future__ import annotations

import random

from conftest import make_proc
from matprov.model import ProvEdge, ProvNode, SynthesisProcedure

# -- classification suite ----------------------------------------------------


def random_dag(rng: random.Random, label: str = "X_dag") -> SynthesisProcedure:
    """A connected chain m0 -> a0 -> m1 -> ... plus random forward edges."""
    steps = rng.randint(1, 5)
    nodes = [("m0", "precursor", "material")]
    edges = []
    for i in range(steps):
        nodes.append((f"a{i}", f"step {i}"))
        nodes.append((f"m{i + 1}", f"product {i}", "material"))
        edges.append(("U", f"a{i}", f"m{i}"))
        edges.append(("G", f"a{i}", f"m{i + 1}"))
    for t in range(rng.randint(0, 3)):
        tool = f"t{t}"
        nodes.append((tool, f"tool {t}", "tool"))
        edges.append(("U", f"a{rng.randrange(steps)}", tool))
    # extra usages strictly forward in time keep the graph acyclic
    for _ in range(rng.randint(0, 3)):
        i = rng.randrange(steps)
        j = rng.randint(0, i)
        edges.append(("U", f"a{i}", f"m{j}"))
    rng.shuffle(nodes)
    return make_proc(label, nodes, edges)


def plant_cycle(rng: random.Random, proc: SynthesisProcedure) -> SynthesisProcedure:
    """Feed the last product back into an earlier (or the same) activity."""
    acts = sorted(n.id for n in proc.nodes if n.is_activity)
    last = max((n.id for n in proc.nodes if n.id.startswith("m")), key=lambda s: int(s[1:]))
    target = rng.choice(acts)
    return SynthesisProcedure(proc.label, proc.nodes,
                              proc.edges + (ProvEdge("Usage", target, last),))


def plant_isolated(rng: random.Random, proc: SynthesisProcedure) -> SynthesisProcedure:
    extra = []
    for k in range(rng.randint(1, 2)):
        if rng.random() < 0.5:
            extra.append(ProvNode(f"iso{k}", "Activity", f"stray step {k}"))
        else:
            extra.append(ProvNode(f"iso{k}", "Entity", f"stray {k}", "tool"))
    nodes = list(proc.nodes) + extra
    rng.shuffle(nodes)
    return SynthesisProcedure(proc.label, tuple(nodes), proc.edges)


def classification_suite(seed: int = 7):
    """60 graphs with their expected primary class, 20 of each kind."""
    rng = random.Random(seed)
    suite = []
    for i in range(20):
        suite.append((random_dag(rng, f"X_dag{i}"), "DAG"))
    for i in range(20):
        suite.append((plant_cycle(rng, random_dag(rng, f"X_cyc{i}")), "Cyclic"))
    for i in range(20):
        suite.append((plant_isolated(rng, random_dag(rng, f"X_iso{i}")), "IsolatedNodes"))
    return suite


# -- metric oracle pairs -----------------------------------------------------

ACTIVITIES = ["Mixing", "Ball-milling", "Pressing", "Sintering"]
ENTITIES = ["Cu", "Ar", "furnace", "mixed sample", "Te", "pellet"]
VARIANTS = {
    "Ar": ["Argon"],
    "Ball-milling": ["mechanical milling"],
    "furnace": ["tube furnace"],
    "Te": ["tellurium"],
}
PARAM_KEYS = ["matprov:temperature", "matprov:duration", "matprov:form", "matprov:purity"]
PARAM_VALUES = ["300 K", "1423 K", "2 h", "powder", "99.99 %", "5N", "10 h"]
VALUE_VARIANTS = {"99.99 %": ["5N"]}


def _alias(label: str, rng: random.Random) -> str:
    """A surface form that still normalizes to something accepted for ``label``."""
    roll = rng.random()
    if label in VARIANTS and roll < 0.4:
        return rng.choice(VARIANTS[label])
    if roll < 0.7:
        return label.upper()
    return label.replace(" ", "-") if " " in label else label + "."


def random_pair(rng: random.Random) -> tuple[SynthesisProcedure, SynthesisProcedure]:
    """A gold procedure and a perturbed prediction, each with at most 6 nodes.

    Labels are distinct within each procedure, so the maximum node matching
    is unique and both matchers must agree on it.
    """
    n_act = rng.randint(0, 3)
    n_ent = rng.randint(0, 6 - n_act)
    acts = rng.sample(ACTIVITIES, n_act)
    ents = rng.sample(ENTITIES, n_ent)

    def params():
        keys = rng.sample(PARAM_KEYS, rng.randint(0, 2))
        return {k: rng.choice(PARAM_VALUES) for k in keys}

    gold_nodes = [(f"a{i}", lab, params()) for i, lab in enumerate(acts)]
    gold_nodes += [(f"e{i}", lab, rng.choice(["material", "tool"]), params())
                   for i, lab in enumerate(ents)]
    gold_edges = []
    for i in range(n_act):
        for j in range(n_ent):
            if rng.random() < 0.35:
                gold_edges.append((rng.choice("UG"), f"a{i}", f"e{j}"))
    rng.shuffle(gold_nodes)
    gold = make_proc("G_gold", gold_nodes, gold_edges)

    # prediction: keep, rename (to an accepted alias or to something wrong), drop, add
    pred_nodes = []
    kept: dict[str, str] = {}
    used_act = set()
    used_ent = set()
    for item in gold_nodes:
        gid, label = item[0], item[1]
        is_act = gid.startswith("a")
        roll = rng.random()
        if roll < 0.15:
            continue
        pid = ("p" + gid) if rng.random() < 0.5 else gid + "x"
        if roll < 0.3:
            pool = [x for x in (ACTIVITIES if is_act else ENTITIES)
                    if x not in (acts if is_act else ents)
                    and x not in (used_act if is_act else used_ent)]
            if not pool:
                continue
            new_label = rng.choice(pool)
        elif roll < 0.55:
            new_label = _alias(label, rng)
        else:
            new_label = label
        canonical = new_label if roll < 0.3 else label
        (used_act if is_act else used_ent).add(canonical)
        p = dict(item[-1])
        for k in list(p):
            r = rng.random()
            if r < 0.2:
                del p[k]
            elif r < 0.35:
                p[k] = rng.choice(PARAM_VALUES)
            elif r < 0.5 and p[k] in VALUE_VARIANTS:
                p[k] = VALUE_VARIANTS[p[k]][0]
            elif r < 0.6:
                p[k] = p[k].lower().replace(" ", "")
        if rng.random() < 0.2:
            p[rng.choice(PARAM_KEYS)] = rng.choice(PARAM_VALUES)
        if is_act:
            pred_nodes.append((pid, new_label, p))
        else:
            pred_nodes.append((pid, new_label, item[2], p))
        kept[gid] = pid
    # spurious nodes with unused labels
    for k in range(rng.randint(0, 2)):
        if len(pred_nodes) >= 6:
            break
        if rng.random() < 0.5:
            pool = [x for x in ACTIVITIES if x not in acts and x not in used_act]
            if pool:
                lab = rng.choice(pool)
                used_act.add(lab)
                pred_nodes.append((f"za{k}", lab, {}))
        else:
            pool = [x for x in ENTITIES if x not in ents and x not in used_ent]
            if pool:
                lab = rng.choice(pool)
                used_ent.add(lab)
                pred_nodes.append((f"ze{k}", lab, "material", {}))

    pred_edges = []
    for kind, a, e in gold_edges:
        if a in kept and e in kept and rng.random() < 0.75:
            if rng.random() < 0.1:
                kind = "G" if kind == "U" else "U"
            pred_edges.append((kind, kept[a], kept[e]))
    pa = [n[0] for n in pred_nodes if len(n) == 3]
    pe = [n[0] for n in pred_nodes if len(n) == 4]
    for _ in range(rng.randint(0, 2)):
        if pa and pe:
            pred_edges.append((rng.choice("UG"), rng.choice(pa), rng.choice(pe)))
    rng.shuffle(pred_nodes)
    rng.shuffle(pred_edges)
    pred = make_proc("G_pred", pred_nodes, pred_edges)
    return gold, pred


# -- planted backbone --------------------------------------------------------

CHAIN = ["weighing", "mixing", "pressing", "sintering"]
NOISE = ["drying", "sieving", "annealing", "quenching", "polishing", "cutting"]


def planted_chain_corpus(seed: int = 11, n: int = 30, with_branch: int = 26):
    """``n`` procedures running the planted chain; ``with_branch`` of them also
    grind the mixed powder in a side branch. Noise activities occur in at
    most 10 procedures each."""
    rng = random.Random(seed)
    noise_left = {name: rng.randint(3, 10) for name in NOISE}
    corpus = []
    for i in range(n):
        nodes = [("m0", "raw elements", "material")]
        edges = []
        for k, step in enumerate(CHAIN):
            nodes.append((f"a{k}", step.capitalize() if rng.random() < 0.3 else step))
            nodes.append((f"m{k + 1}", f"{step} product", "material"))
            edges += [("U", f"a{k}", f"m{k}"), ("G", f"a{k}", f"m{k + 1}")]
        if i < with_branch:
            nodes += [("ag", "grinding"), ("mg", "ground powder", "material")]
            edges += [("U", "ag", "m2"), ("G", "ag", "mg")]
        for j, name in enumerate(rng.sample(NOISE, 2)):
            if noise_left[name] == 0:
                continue
            noise_left[name] -= 1
            # attach after a random chain product as a dead-end side step
            src = rng.randint(1, 4)
            nodes += [(f"an{j}", name), (f"mn{j}", f"{name} product", "material")]
            edges += [("U", f"an{j}", f"m{src}"), ("G", f"an{j}", f"mn{j}")]
        rng.shuffle(nodes)
        corpus.append(make_proc(f"X{i}_chain", nodes, edges))
    return corpus
