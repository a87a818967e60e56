"""Two-stage extraction: relevant text first, then PROV-JSONLD procedures."""
from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path
from typing import Sequence

from ..model import (DEFAULT_CONTEXT_URL, ProcedureDocument, ProvError, filename_for_doi,
                     parse_document, serialize_document)
from .backend import BackendError, BackendRequest, ChatBackend, HttpBackend, ReplayBackend
from .prompts import (IN_CONTEXT_EXAMPLE, PAPER_TEXT, PROCEDURE_EXTRACTION, RELEVANT_TEXT,
                      SYNTHESIS_TEXT, format_example, render_prompt)
from .tei import PaperText

log = logging.getLogger(__name__)


class Status(str, Enum):
    OK = "Ok"
    NO_SYNTHESIS = "NoSynthesis"
    PARSE_FAILED = "ParseFailedAfterRetries"
    BACKEND_ERROR = "BackendError"


@dataclass
class PipelineConfig:
    backend_url: str = "https://api.openai.com/v1/chat/completions"
    relevant_text_model: str = "gpt-4o-mini"
    procedure_model: str = "o4-mini"
    relevant_text_temperature: float | None = 0.0
    procedure_temperature: float | None = None
    # extra stage-2 attempts after an unparseable response
    retry_budget: int = 2
    concurrency: int = 4
    transport_retries: int = 3
    backoff: float = 0.5
    timeout: float = 120.0
    context_url: str = DEFAULT_CONTEXT_URL
    mock_transcript: str | None = None
    examples_dir: str | None = None

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | Path | None = None) -> "PipelineConfig":
        data = dict(data)
        if "model" in data:
            model = data.pop("model")
            data.setdefault("relevant_text_model", model)
            data.setdefault("procedure_model", model)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        config = cls(**data)
        if config.retry_budget < 0 or config.concurrency < 1:
            raise ValueError("retry_budget must be >= 0 and concurrency >= 1")
        if base_dir is not None:
            for name in ("mock_transcript", "examples_dir"):
                value = getattr(config, name)
                if value and not Path(value).is_absolute():
                    setattr(config, name, str(Path(base_dir) / value))
        return config

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), Path(path).parent)

    def make_backend(self) -> ChatBackend:
        if self.mock_transcript:
            return ReplayBackend.from_file(self.mock_transcript)
        return HttpBackend(self.backend_url, retries=self.transport_retries,
                           backoff=self.backoff, timeout=self.timeout)


@dataclass(frozen=True)
class OneShotExample:
    doi: str
    relevant_text: str
    procedures_json: str

    def render(self) -> str:
        return format_example(self.relevant_text, self.procedures_json)


def load_example(directory: str | Path, doi: str) -> OneShotExample:
    """Read ``<doi>.txt`` and ``<doi>.json`` (``/`` written as ``_``) from ``directory``."""
    stem = Path(directory) / filename_for_doi(doi)[: -len(".json")]
    text = stem.with_name(stem.name + ".txt").read_text(encoding="utf-8")
    raw = stem.with_name(stem.name + ".json").read_text(encoding="utf-8")
    # re-serialize so the example carries no metadata and a stable layout
    doc = parse_document(raw)
    return OneShotExample(doi, text, serialize_document(doc, with_metadata=False))


@dataclass
class PipelineRecord:
    doi: str
    status: Status
    attempts: int = 0
    relevant_text: str | None = None
    procedures: ProcedureDocument | None = None
    # serialized procedures with "@context" and "@language" injected
    output: str | None = None
    error: str | None = None

    def summary(self) -> dict:
        return {
            "doi": self.doi,
            "status": self.status.value,
            "attempts": self.attempts,
            "procedures": len(self.procedures) if self.procedures is not None else 0,
            "error": self.error,
        }


_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n?(.*?)```", re.DOTALL)


def extract_json_text(content: str) -> str:
    """Strip Markdown fences and any prose around the outermost JSON value."""
    fenced = _FENCE.search(content)
    if fenced:
        content = fenced.group(1)
    starts = [i for i in (content.find("["), content.find("{")) if i >= 0]
    if not starts:
        return content.strip()
    start = min(starts)
    end = content.rfind("]" if content[start] == "[" else "}")
    return content[start : end + 1] if end > start else content[start:]


def run_pipeline(backend: ChatBackend, paper: PaperText, config: PipelineConfig | None = None,
                 example: OneShotExample | None = None) -> PipelineRecord:
    config = config or PipelineConfig()
    record = PipelineRecord(paper.doi, Status.NO_SYNTHESIS)

    prompt = render_prompt(RELEVANT_TEXT, {PAPER_TEXT: paper.body})
    try:
        reply = backend.complete(BackendRequest.user(
            config.relevant_text_model, prompt, config.relevant_text_temperature))
    except BackendError as exc:
        record.status, record.error = Status.BACKEND_ERROR, f"relevant text: {exc}"
        return record
    relevant = reply.content.strip()
    record.relevant_text = relevant
    if not relevant:
        return record

    prompt = render_prompt(PROCEDURE_EXTRACTION, {
        IN_CONTEXT_EXAMPLE: example.render() if example else "",
        SYNTHESIS_TEXT: relevant,
    })
    request = BackendRequest.user(config.procedure_model, prompt, config.procedure_temperature)
    for attempt in range(1, config.retry_budget + 2):
        record.attempts = attempt
        try:
            reply = backend.complete(request)
        except BackendError as exc:
            record.status, record.error = Status.BACKEND_ERROR, f"procedure extraction: {exc}"
            return record
        try:
            doc = parse_document(extract_json_text(reply.content))
        except ProvError as exc:
            log.info("%s: attempt %d unparseable: %s", paper.doi, attempt, exc)
            record.error = str(exc)
            continue
        if not doc.procedures:
            record.status, record.error = Status.NO_SYNTHESIS, None
            return record
        doc = ProcedureDocument(doc.procedures, context_url=config.context_url)
        record.output = serialize_document(doc, with_metadata=True)
        record.procedures = parse_document(record.output, source_doi=paper.doi or None)
        record.status, record.error = Status.OK, None
        return record
    record.status = Status.PARSE_FAILED
    return record


def run_many(backend: ChatBackend, papers: Sequence[PaperText],
             config: PipelineConfig | None = None,
             example: OneShotExample | None = None) -> list[PipelineRecord]:
    """Run papers concurrently (at most ``config.concurrency`` in flight), in input order."""
    config = config or PipelineConfig()
    with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
        return list(pool.map(lambda p: run_pipeline(backend, p, config, example), papers))
