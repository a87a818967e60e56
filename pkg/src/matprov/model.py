"""PROV-JSONLD synthesis procedures: domain types, parsing and serialization.

A document is a JSON array of procedure objects, each shaped like::

    {"label": "<composition>_<characteristic>",
     "@graph": [<Entity|Activity nodes> ..., <Usage|Generation edges> ...]}

Node labels and types are arrays of ``{"@value": ...}`` objects and synthesis
parameters are ``"matprov:<base>[_<modifier>]"`` keys on nodes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Iterator, Mapping

PARAM_PREFIX = "matprov:"
PARAMETERS = (
    "temperature",
    "duration",
    "pressure",
    "mass",
    "length",
    "purity",
    "concentration",
    "rotation",
    "atmosphere",
    "form",
)
GLOBAL_MODIFIERS = ("start", "end", "rate")
LENGTH_MODIFIERS = ("width", "height", "thickness", "diameter")
MODIFIERS = GLOBAL_MODIFIERS + LENGTH_MODIFIERS

DEFAULT_CONTEXT_URL = "https://matprov-project.github.io/matprov-schema"
DEFAULT_LANGUAGE = "en"

_NODE_TYPES = ("Entity", "Activity")
_EDGE_TYPES = ("Usage", "Generation")
_NODE_RESERVED = {"@type", "@id", "label", "type"}
_EDGE_RESERVED = {"@type", "activity", "entity"}
_PROC_RESERVED = {"label", "@graph", "@context", "@language"}


class ProvError(ValueError):
    """Base class for every parse or validation failure.

    ``path`` locates the offending JSON value, e.g. ``[0].@graph[3].@id``.
    """

    def __init__(self, message: str, path: str = "", procedure: int | None = None):
        self.path = path
        self.procedure = procedure
        super().__init__(f"{path}: {message}" if path else message)


class ProvSyntaxError(ProvError):
    """Input is not JSON at all."""


class SchemaError(ProvError):
    def __init__(self, reason: str, path: str = "", procedure: int | None = None):
        self.reason = reason
        super().__init__(reason, path, procedure)


class ProvReferenceError(ProvError):
    """An edge names a node ID that is not declared in the procedure."""

    def __init__(self, edge: "ProvEdge | Mapping", missing_id: str, path: str = "",
                 procedure: int | None = None):
        self.edge = edge
        self.missing_id = missing_id
        super().__init__(f"edge references undeclared node {missing_id!r}", path, procedure)


class NodeKind(str, Enum):
    ENTITY = "Entity"
    ACTIVITY = "Activity"


class EntityType(str, Enum):
    MATERIAL = "material"
    TOOL = "tool"


class EdgeKind(str, Enum):
    USAGE = "Usage"
    GENERATION = "Generation"


@dataclass(frozen=True, order=True)
class ParamKey:
    base: str
    modifier: str | None = None

    def __post_init__(self):
        if self.base not in PARAMETERS:
            raise ValueError(f"unknown parameter {self.base!r}")
        if self.modifier is not None:
            if self.modifier not in MODIFIERS:
                raise ValueError(f"unknown modifier {self.modifier!r}")
            if self.modifier in LENGTH_MODIFIERS and self.base != "length":
                raise ValueError(f"modifier {self.modifier!r} only applies to 'length'")

    @classmethod
    def parse(cls, key: str) -> "ParamKey":
        """Parse ``"matprov:length_thickness"`` (the prefix is optional)."""
        if key.startswith(PARAM_PREFIX):
            key = key[len(PARAM_PREFIX):]
        base, sep, modifier = key.partition("_")
        if sep and not modifier:
            raise ValueError(f"empty modifier in {key!r}")
        return cls(base, modifier or None)

    def __str__(self) -> str:
        suffix = f"_{self.modifier}" if self.modifier else ""
        return f"{PARAM_PREFIX}{self.base}{suffix}"


@dataclass(frozen=True)
class ProvNode:
    id: str
    kind: NodeKind
    label: str
    entity_type: EntityType | None = None
    params: dict[ParamKey, str] = field(default_factory=dict, hash=False)
    # extra "@value"s of multi-valued label/type arrays, in input order
    label_variants: tuple[str, ...] = ()
    type_variants: tuple[str, ...] = ()
    extras: dict[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        if self.entity_type is not None:
            object.__setattr__(self, "entity_type", EntityType(self.entity_type))
        if not self.id:
            raise SchemaError("node id must be non-empty")
        if not self.label:
            raise SchemaError(f"node {self.id!r} has an empty label")
        if self.kind is NodeKind.ENTITY and self.entity_type is None:
            raise SchemaError(f"entity {self.id!r} needs a type (material or tool)")
        if self.kind is NodeKind.ACTIVITY and self.entity_type is not None:
            raise SchemaError(f"activity {self.id!r} must not carry an entity type")

    @property
    def is_activity(self) -> bool:
        return self.kind is NodeKind.ACTIVITY

    @property
    def labels(self) -> tuple[str, ...]:
        return (self.label,) + self.label_variants


@dataclass(frozen=True)
class ProvEdge:
    kind: EdgeKind
    activity_id: str
    entity_id: str
    extras: dict[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", EdgeKind(self.kind))

    @property
    def source(self) -> str:
        """Tail of the edge in experimental time order."""
        return self.entity_id if self.kind is EdgeKind.USAGE else self.activity_id

    @property
    def target(self) -> str:
        return self.activity_id if self.kind is EdgeKind.USAGE else self.entity_id


@dataclass(frozen=True)
class SynthesisProcedure:
    label: str
    nodes: tuple[ProvNode, ...] = ()
    edges: tuple[ProvEdge, ...] = ()
    source_doi: str | None = field(default=None, compare=False)
    extras: dict[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.label:
            raise SchemaError("procedure label must be non-empty")
        seen: dict[str, ProvNode] = {}
        for node in self.nodes:
            if node.id in seen:
                raise SchemaError(f"duplicate node id {node.id!r}")
            seen[node.id] = node
        for edge in self.edges:
            for node_id, want in ((edge.activity_id, NodeKind.ACTIVITY),
                                  (edge.entity_id, NodeKind.ENTITY)):
                if node_id not in seen:
                    raise ProvReferenceError(edge, node_id)
                if seen[node_id].kind is not want:
                    raise SchemaError(
                        f"{edge.kind.value} edge expects {want.value} at {node_id!r}, "
                        f"found {seen[node_id].kind.value}"
                    )

    @cached_property
    def node_map(self) -> dict[str, ProvNode]:
        return {node.id: node for node in self.nodes}

    @property
    def composition(self) -> str:
        return parse_label(self.label)[0]

    @property
    def activities(self) -> list[ProvNode]:
        return [n for n in self.nodes if n.is_activity]


@dataclass(frozen=True)
class ProcedureDocument:
    procedures: tuple[SynthesisProcedure, ...] = ()
    # any JSON value; usually the schema URL string
    context_url: Any = None
    language: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "procedures", tuple(self.procedures))

    def __len__(self) -> int:
        return len(self.procedures)

    def __iter__(self) -> Iterator[SynthesisProcedure]:
        return iter(self.procedures)


def parse_label(label: str) -> tuple[str, str]:
    """Split a procedure label at its first underscore.

    >>> parse_label("CuGaTe2_ball-milling")
    ('CuGaTe2', 'ball-milling')
    >>> parse_label("BiSbTe")
    ('BiSbTe', '')
    """
    composition, _, characteristic = label.partition("_")
    return composition, characteristic


# -- parsing -----------------------------------------------------------------


def _values(raw: Any, path: str) -> list[str]:
    """Read a ``[{"@value": ...}, ...]`` array (a bare string is tolerated)."""
    if isinstance(raw, str):
        return [raw]
    if isinstance(raw, Mapping):
        raw = [raw]
    if not isinstance(raw, list) or not raw:
        raise SchemaError("expected a non-empty array of {'@value': ...} objects", path)
    out = []
    for i, item in enumerate(raw):
        value = item.get("@value") if isinstance(item, Mapping) else item
        if isinstance(value, bool) or value is None:
            raise SchemaError("missing or invalid '@value'", f"{path}[{i}]")
        if isinstance(value, (int, float)):
            value = json.dumps(value)
        if not isinstance(value, str):
            raise SchemaError("'@value' must be a string", f"{path}[{i}]")
        out.append(value)
    return out


def _parse_node(obj: Mapping, path: str) -> ProvNode:
    node_id = obj.get("@id")
    if not isinstance(node_id, str) or not node_id:
        raise SchemaError("node needs a non-empty string '@id'", f"{path}.@id")
    if "label" not in obj:
        raise SchemaError("node has no 'label'", f"{path}.label")
    labels = _values(obj["label"], f"{path}.label")
    kind = NodeKind(obj["@type"])

    entity_type = None
    type_variants: tuple[str, ...] = ()
    if "type" in obj:
        if kind is NodeKind.ACTIVITY:
            raise SchemaError("activity nodes must not have 'type'", f"{path}.type")
        types = _values(obj["type"], f"{path}.type")
        try:
            entity_type = EntityType(types[0].strip().lower())
        except ValueError:
            raise SchemaError(f"entity type must be 'material' or 'tool', got {types[0]!r}",
                              f"{path}.type") from None
        type_variants = tuple(types[1:])
    elif kind is NodeKind.ENTITY:
        raise SchemaError("entity nodes need 'type'", f"{path}.type")

    params: dict[ParamKey, str] = {}
    extras: dict[str, Any] = {}
    for key, raw in obj.items():
        if key in _NODE_RESERVED:
            continue
        if key.startswith(PARAM_PREFIX):
            try:
                pkey = ParamKey.parse(key)
            except ValueError as exc:
                raise SchemaError(f"malformed parameter key {key!r}: {exc}",
                                  f"{path}.{key}") from None
            # several values for one parameter are folded into one string
            params[pkey] = ", ".join(_values(raw, f"{path}.{key}"))
        else:
            extras[key] = raw
    try:
        return ProvNode(node_id, kind, labels[0], entity_type, params,
                        tuple(labels[1:]), type_variants, extras)
    except SchemaError as exc:
        raise SchemaError(exc.reason, path) from None


def _parse_edge(obj: Mapping, path: str) -> ProvEdge:
    ids = []
    for key in ("activity", "entity"):
        value = obj.get(key)
        if not isinstance(value, str) or not value:
            raise SchemaError(f"edge needs a string '{key}'", f"{path}.{key}")
        ids.append(value)
    extras = {k: v for k, v in obj.items() if k not in _EDGE_RESERVED}
    return ProvEdge(EdgeKind(obj["@type"]), ids[0], ids[1], extras)


def _parse_procedure(obj: Any, index: int) -> tuple[SynthesisProcedure, dict[str, Any]]:
    path = f"[{index}]"
    if not isinstance(obj, Mapping):
        raise SchemaError("procedure must be a JSON object", path, index)
    label = obj.get("label")
    if not isinstance(label, str) or not label:
        raise SchemaError("procedure needs a non-empty string 'label'", f"{path}.label", index)
    graph = obj.get("@graph")
    if not isinstance(graph, list):
        raise SchemaError("procedure needs an '@graph' array", f"{path}.@graph", index)

    nodes: list[ProvNode] = []
    edges: list[tuple[ProvEdge, str]] = []
    seen: dict[str, ProvNode] = {}
    for i, item in enumerate(graph):
        item_path = f"{path}.@graph[{i}]"
        if not isinstance(item, Mapping):
            raise SchemaError("graph element must be a JSON object", item_path, index)
        kind = item.get("@type")
        try:
            if kind in _NODE_TYPES:
                node = _parse_node(item, item_path)
                if node.id in seen:
                    raise SchemaError(f"duplicate node id {node.id!r}", f"{item_path}.@id")
                seen[node.id] = node
                nodes.append(node)
            elif kind in _EDGE_TYPES:
                edges.append((_parse_edge(item, item_path), item_path))
            else:
                raise SchemaError(f"unknown '@type' {kind!r}", f"{item_path}.@type")
        except SchemaError as exc:
            exc.procedure = index
            raise

    for edge, edge_path in edges:
        for key, node_id, want in (("activity", edge.activity_id, NodeKind.ACTIVITY),
                                   ("entity", edge.entity_id, NodeKind.ENTITY)):
            if node_id not in seen:
                raise ProvReferenceError(edge, node_id, f"{edge_path}.{key}", index)
            if seen[node_id].kind is not want:
                raise SchemaError(f"'{key}' must reference an {want.value} node, "
                                  f"{node_id!r} is an {seen[node_id].kind.value}",
                                  f"{edge_path}.{key}", index)

    extras = {k: v for k, v in obj.items() if k not in _PROC_RESERVED}
    meta = {k: obj[k] for k in ("@context", "@language") if k in obj}
    proc = SynthesisProcedure(label, tuple(nodes), tuple(e for e, _ in edges), extras=extras)
    return proc, meta


def parse_document(data: str | bytes, source_doi: str | None = None) -> ProcedureDocument:
    """Parse PROV-JSONLD text into a :class:`ProcedureDocument`.

    Accepts a top-level array of procedures or one bare procedure object.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ProvSyntaxError(f"input is not UTF-8: {exc}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProvSyntaxError(f"invalid JSON: {exc}") from None
    if isinstance(raw, Mapping):
        raw = [raw]
    if not isinstance(raw, list):
        raise SchemaError("top level must be an array of procedures or one procedure object")

    procedures = []
    context = language = None
    for index, obj in enumerate(raw):
        proc, meta = _parse_procedure(obj, index)
        if source_doi is not None:
            proc = replace(proc, source_doi=source_doi)
        procedures.append(proc)
        if context is None:
            context = meta.get("@context")
        if language is None:
            language = meta.get("@language")
    return ProcedureDocument(tuple(procedures), context, language)


# -- serialization -----------------------------------------------------------


def _wrap(*values: str) -> list[dict[str, str]]:
    return [{"@value": v} for v in values]


def node_to_json(node: ProvNode) -> dict[str, Any]:
    obj: dict[str, Any] = {"@type": node.kind.value, "@id": node.id,
                           "label": _wrap(*node.labels)}
    if node.entity_type is not None:
        obj["type"] = _wrap(node.entity_type.value, *node.type_variants)
    for key, value in node.params.items():
        obj[str(key)] = _wrap(value)
    obj.update(node.extras)
    return obj


def edge_to_json(edge: ProvEdge) -> dict[str, Any]:
    return {"@type": edge.kind.value, "activity": edge.activity_id,
            "entity": edge.entity_id, **edge.extras}


def procedure_to_json(proc: SynthesisProcedure) -> dict[str, Any]:
    graph = [node_to_json(n) for n in proc.nodes] + [edge_to_json(e) for e in proc.edges]
    return {"label": proc.label, "@graph": graph, **proc.extras}


def document_to_json(doc: ProcedureDocument, with_metadata: bool = False) -> list[dict[str, Any]]:
    out = []
    for proc in doc.procedures:
        obj = procedure_to_json(proc)
        if with_metadata:
            context = doc.context_url if doc.context_url is not None else DEFAULT_CONTEXT_URL
            obj = {"@context": context, "@language": DEFAULT_LANGUAGE, **obj}
        out.append(obj)
    return out


def serialize_document(doc: ProcedureDocument, with_metadata: bool = False) -> str:
    return json.dumps(document_to_json(doc, with_metadata), ensure_ascii=False, indent=2) + "\n"


# -- dataset files -----------------------------------------------------------


def filename_for_doi(doi: str) -> str:
    return doi.replace("/", "_") + ".json"


def doi_from_filename(path: str | Path) -> str:
    # DOI prefixes ("10.xxxx") never contain "_", so the first one is the slash
    return Path(path).stem.replace("_", "/", 1)


def read_document(path: str | Path) -> ProcedureDocument:
    path = Path(path)
    return parse_document(path.read_bytes(), source_doi=doi_from_filename(path))


def iter_json_files(path: str | Path) -> list[Path]:
    """A single file, or every ``*.json`` under a directory in lexicographic order."""
    path = Path(path)
    if path.is_dir():
        return sorted(p for p in path.rglob("*.json") if p.is_file())
    if path.is_file():
        return [path]
    raise FileNotFoundError(str(path))
