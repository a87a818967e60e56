"""Body text from GROBID-style TEI XML."""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

TEI_NS = "http://www.tei-c.org/ns/1.0"

# paragraphs inside these body elements are captions or footnotes, not prose
_SKIP = {"figure", "table", "note", "figDesc"}


class XmlError(ValueError):
    pass


class NoBody(ValueError):
    pass


@dataclass(frozen=True)
class PaperText:
    doi: str
    body: str


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def _find_local(root: ET.Element, name: str) -> ET.Element | None:
    for el in root.iter():
        if _local(el.tag) == name:
            return el
    return None


def _paragraphs(el: ET.Element):
    for child in el:
        name = _local(child.tag)
        if name in _SKIP:
            continue
        if name == "p":
            yield child
        else:
            yield from _paragraphs(child)


def _doi(root: ET.Element) -> str | None:
    header = _find_local(root, "teiHeader")
    if header is None:
        return None
    for el in header.iter():
        if _local(el.tag) == "idno" and (el.get("type") or "").upper() == "DOI" and el.text:
            return el.text.strip()
    return None


def tei_body_text(xml: str | bytes, doi: str | None = None) -> PaperText:
    """Join the ``<p>`` paragraphs of ``<text><body>`` with blank lines.

    The title and abstract live in ``teiHeader`` and the references in
    ``<back>``, so only body paragraphs are kept. Whitespace inside a
    paragraph is collapsed to single spaces.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise XmlError(f"malformed XML: {exc}") from None
    text = _find_local(root, "text")
    body = _find_local(text if text is not None else root, "body")
    paragraphs = []
    if body is not None:
        for p in _paragraphs(body):
            content = re.sub(r"\s+", " ", "".join(p.itertext())).strip()
            if content:
                paragraphs.append(content)
    if not paragraphs:
        raise NoBody("no body text")
    return PaperText(doi or _doi(root) or "", "\n\n".join(paragraphs))


def read_paper(path: str | Path) -> PaperText:
    """Load a TEI file, or a plain-text file taken verbatim as the body.

    The DOI falls back to the file name with its first ``_`` read as ``/``.
    """
    path = Path(path)
    stem = path.stem[:-4] if path.stem.lower().endswith(".tei") else path.stem
    fallback = stem.replace("_", "/", 1)
    if path.suffix.lower() == ".xml":
        paper = tei_body_text(path.read_bytes())
        return PaperText(paper.doi or fallback, paper.body)
    body = path.read_text(encoding="utf-8").strip()
    if not body:
        raise NoBody(f"{path}: no body text")
    return PaperText(fallback, body)
