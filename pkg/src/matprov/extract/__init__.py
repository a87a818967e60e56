"""LLM-driven extraction of synthesis procedures from paper text."""
from .backend import (BackendError, BackendRequest, BackendResponse, ChatBackend, HttpBackend,
                      ReplayBackend, Transcript, request_hash)
from .pipeline import (OneShotExample, PipelineConfig, PipelineRecord, Status, extract_json_text,
                       load_example, run_many, run_pipeline)
from .prompts import (PROCEDURE_EXTRACTION, RELEVANT_TEXT, MissingSubstitution, PromptTemplate,
                      Stage, render_prompt)
from .tei import NoBody, PaperText, XmlError, read_paper, tei_body_text

__all__ = [
    "BackendError", "BackendRequest", "BackendResponse", "ChatBackend", "HttpBackend",
    "ReplayBackend", "Transcript", "request_hash", "OneShotExample", "PipelineConfig",
    "PipelineRecord", "Status", "extract_json_text", "load_example", "run_many", "run_pipeline",
    "PROCEDURE_EXTRACTION", "RELEVANT_TEXT", "MissingSubstitution", "PromptTemplate", "Stage",
    "render_prompt", "NoBody", "PaperText", "XmlError", "read_paper", "tei_body_text",
]
