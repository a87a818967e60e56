"""Toolkit for PROV-JSONLD material synthesis procedures."""
from .backbone import BackboneGraph, CooccurrenceMatrix, build_cooccurrence, mine_backbone
from .dot import DotOptions, export_dot
from .elements import parse_composition
from .evaluate import (EvalReport, Score, VariantTable, aggregate_runs, eval_parametric,
                       eval_structural, evaluate, match_procedures)
from .model import (ParamKey, ProcedureDocument, ProvEdge, ProvError, ProvNode,
                    ProvReferenceError, ProvSyntaxError, SchemaError, SynthesisProcedure,
                    parse_document, parse_label, read_document, serialize_document)
from .similarity import normalize, similarity
from .validate import GraphClass, PrimaryClass, classify, corpus_stats

__version__ = "0.1.0"

__all__ = [
    "BackboneGraph", "CooccurrenceMatrix", "build_cooccurrence", "mine_backbone",
    "DotOptions", "export_dot", "parse_composition", "EvalReport", "Score", "VariantTable",
    "aggregate_runs", "eval_parametric", "eval_structural", "evaluate", "match_procedures",
    "ParamKey", "ProcedureDocument", "ProvEdge", "ProvError", "ProvNode", "ProvReferenceError",
    "ProvSyntaxError", "SchemaError", "SynthesisProcedure", "parse_document", "parse_label",
    "read_document", "serialize_document", "normalize", "similarity", "GraphClass",
    "PrimaryClass", "classify", "corpus_stats",
]
