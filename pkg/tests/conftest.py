from __future__ import annotations

import sys
from pathlib import Path

import pytest

from matprov.model import ParamKey, ProvEdge, ProvNode, SynthesisProcedure

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))

_ACCEPTANCE: list[str] = []


def make_proc(label: str, nodes, edges=(), doi=None) -> SynthesisProcedure:
    """Build a procedure from compact tuples.

    ``nodes``: ``(id, label)`` for activities, ``(id, label, "material"|"tool")``
    for entities, optionally followed by a ``{"temperature": "300 K"}`` dict.
    ``edges``: ``("U"|"G", activity_id, entity_id)``.
    """
    built = []
    for item in nodes:
        params = item[-1] if isinstance(item[-1], dict) else {}
        core = item[:-1] if params or isinstance(item[-1], dict) else item
        keyed = {ParamKey.parse(k): v for k, v in params.items()}
        if len(core) == 2:
            built.append(ProvNode(core[0], "Activity", core[1], params=keyed))
        else:
            built.append(ProvNode(core[0], "Entity", core[1], core[2], params=keyed))
    kinds = {"U": "Usage", "G": "Generation"}
    return SynthesisProcedure(label, tuple(built),
                              tuple(ProvEdge(kinds[k], a, e) for k, a, e in edges),
                              source_doi=doi)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def record_acceptance():
    """Register a one-line verdict printed in the terminal summary."""

    def record(number: int, passed: bool | None, detail: str) -> None:
        verdict = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        _ACCEPTANCE.append(f"criterion {number}: {verdict}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
