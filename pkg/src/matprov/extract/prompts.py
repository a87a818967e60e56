"""Prompt templates for the two extraction stages."""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping


class Stage(str, Enum):
    RELEVANT_TEXT = "relevant_text"
    PROCEDURE_EXTRACTION = "procedure_extraction"


PAPER_TEXT = "<PAPER_TEXT>"
SYNTHESIS_TEXT = "<SYNTHESIS_TEXT>"
IN_CONTEXT_EXAMPLE = "<IN_CONTEXT_EXAMPLE>"

RELEVANT_TEXT_TEMPLATE = """\
# Task
You are a materials science expert. Your task is to extract all paragraphs from the provided "Materials Science Text" that describe material synthesis procedures performed by the authors.

# General Instructions
- Output ONLY the exact text of each extracted paragraph, preserving original line breaks and without modifying, splitting, or combining them.
- Do not include any explanations, summaries, or comments in your output.
- If multiple relevant paragraphs are found, include all in their original order.
- If no relevant paragraphs are found, output nothing (leave the response empty).

# Extraction Rules
- Do not include paragraphs that only discuss characterization, measurement, analysis, or results unless such content is embedded within a synthesis description.
- Do not extract synthesis procedures if they refer to prior work or the procedures of other researchers (e.g., "Smith et al. synthesized..." or "previous reports prepared...").

The following categories of synthesis steps should be extracted:
- Raw material preparation and handling: e.g., sourcing, weighing, drying, or pre-treatment of components.
- Mixing and powder processing: e.g., manual or mechanical grinding, ball milling, mixing with solvents.
- Forming and compaction: e.g., pressing, molding, casting, or shaping into desired geometries.
- Thermal treatments: e.g., annealing, sintering, calcination, with specified temperatures and durations.
- Chemical synthesis steps: e.g., hydrothermal, solvothermal, precipitation, or solid-state reactions.
- Crystal growth processes: e.g., flux growth, solution growth, vapor transport, or melt growth, with specified conditions such as temperature gradients, cooling rates, and growth atmospheres.
- Post-processing: e.g., quenching, cooling, polishing, etching, aging, surface treatments, or irradiating.

# Example Paragraph
Polycrystalline Cu2-δFexS (δ = 0.1, x = 0, 0.0125, 0.0225, and 0.0325) and Cu2-δS (δ = 0, 0.01, 0.03, 0.04, 0.06, and 0.1) samples were synthesized by a combination of melting and long-term high-temperature annealing method. High purity raw elements, Cu (shot, 99.999%, Alfa Aesar), S (shot, 99.999%, Alfa Aesar), and Fe (shots, 99.98%, Alfa Aesar) were weighed in their stoichiometric ratios and placed in boron nitride crucibles, and then sealed in fused silica tubes under vacuum. The temperature of the tubes was slowly raised to 1423 K in 6 h and then maintained at this temperature for 12 h before quenching into ice water. Then, the ingots were annealed at 773 K for 5 d. The annealed ingots were crushed into powders and consolidated by spark plasma sintering (Sumitomo SPS-2040) at 723 K under a pressure of 65 MPa for 5 min. Electrically insulating but thermally conducting BN layers were sprayed onto the carbon foils and the inner sides of the graphite die before the SPS process in order to prohibit DC pulsed currents going through the powders.

# Materials Science Text
<PAPER_TEXT>"""

PROCEDURE_EXTRACTION_TEMPLATE = """\
# Task
You are a materials science expert. Your task is to extract the material synthesis procedure described in the provided "Materials Science Text" and represent it as a directed acyclic graph (DAG) based on the PROV Data Model (PROV-DM).

# General Instructions
- Output ONLY valid JSON. Do NOT include any explanations, comments, or Markdown formatting in your output.
- Extract information exactly as stated in the input text. Do NOT paraphrase, infer, generalize, or modify the original wording.
- The input text may contain paragraphs that are not related to material synthesis. Extract information only from paragraphs that describe actual material synthesis procedures.
- The input text may describe multiple distinct synthesis procedures. If procedures differ in nodes, edges, or node labels (e.g., due to different activity sequences, materials, equipment, or target compositions), extract each as a separate JSON object. If procedures have identical nodes, edges, and node labels but differ only in parameter values, combine them into a single JSON object.

# Output JSON Structure
Each material synthesis procedure must be represented as a JSON object with exactly two top-level keys: "label" and "@graph". Do NOT add any additional top-level keys. The JSON structure rules are explained using the following minimal sample.

```json
[
  {
    "label": "<chemical composition>_<characteristic>",
    "@graph": [
      {
        "@type": "Entity",
        "@id": "e1",
        "label": [{ "@value": "Cu" }],
        "type": [{ "@value": "material" }],
        "matprov:purity": [{ "@value": "99.99 %" }],
        "matprov:form": [{ "@value": "pieces" }]
      },
      {
        "@type": "Activity",
        "@id": "a1",
        "label": [{ "@value": "Sealing" }]
      },
      {
        "@type": "Entity",
        "@id": "e2",
        "label": [{ "@value": "silica tube" }],
        "type": [{ "@value": "tool" }]
      },
      {
        "@type": "Entity",
        "@id": "e3",
        "label": [{ "@value": "Sealed sample" }],
        "type": [{ "@value": "material" }]
      },
      { "@type": "Usage", "activity": "a1", "entity": "e1" },
      { "@type": "Usage", "activity": "a1", "entity": "e2" },
      { "@type": "Generation", "activity": "a1", "entity": "e3" }
    ]
  }
]
```

Each object in "@graph" represents either a node ("@type": "Activity" or "Entity") or an edge ("@type": "Usage" or "Generation") in a DAG that describes the provenance chain of the material synthesis procedure. The minimal sample above corresponds to the following graph:

Cu & silica tube → sealing → sealed sample

IMPORTANT: All nodes (Activity or Entity) must be connected by at least one edge (Usage or Generation). For each synthesis procedure, construct a single connected graph where every node is reachable from every other node via directed edges, forming a continuous provenance chain. Do not leave any node isolated or disconnected. Avoid creating disconnected subgraphs or unlinked activities/entities. Reuse intermediate @ids appropriately to ensure continuity across multiple synthesis steps.

## Nodes
Fill in the "@value" of "label" for each node following the rules below. Node labels MUST represent single atomic concepts - NEVER use "and" in labels. Split items joined by "and" into separate nodes.

### Activity
Use the gerund form of the verb as the label (e.g., melting, crushing, sealing, adding, ball-milling). Include modifying terms in the label (e.g., spark plasma sintering, arc-melting).

### Entity
Entity has two types: material and tool.

1. material
- Precursors: Use the names or symbols exactly as presented in the input text (e.g., element symbols, full names).
- Intermediate/Final products: MANDATORY RULE: The label MUST be exactly "<past participle> sample" where the past participle corresponds to the Activity that generates the Entity.
  - Examples: arc-melting → arc-melted sample, crushing → crushed sample, spark plasma sintering → spark plasma sintered sample
  - Physical form information (e.g., ingot, powder, pellet) must be recorded in the "matprov:form" parameter, NOT in the label.

2. tool
- Extract every apparatus and tool as a single generic noun phrase from the text (e.g., graphite die, furnace).
- If model name and company name are both given, exclude the company name (e.g., "ARC-2000 furnace, ABC Corp." → "ARC-2000 furnace").

## Edges
Each edge type represents a directed connection between nodes as follows:
- Usage: Entity → Activity
- Generation: Activity → Entity

Use the following format:

```json
{ "@type": "Usage", "activity": "<unique id>", "entity": "<unique id>" },
{ "@type": "Generation", "activity": "<unique id>", "entity": "<unique id>" }
```

## Parameters
Attach only explicitly stated parameters to relevant nodes using the following format:

```json
"matprov:<parameter>": [{ "@value": "<value>" }]
```

Accepted Parameters (10):
temperature, duration, pressure, mass, length, purity, concentration, rotation, atmosphere, form

Modifiers (7):
- Global modifiers: _start, _end, _rate
- Length-specific modifiers: _width, _height, _thickness, _diameter
  - Example: "matprov:length_thickness"

Parameter placement:
- Activity nodes: Process conditions (e.g., temperature, duration, pressure, mass, concentration, rotation, atmosphere, form)
- Entity nodes: Object descriptors (e.g., mass, length, purity, concentration, form)

IMPORTANT: If multiple values are mentioned for the same parameter in the input text (e.g., "annealed at 100, 200, and 300 K"), combine all values into a single @value string, preserving the original wording as follows:

```json
"matprov:temperature": [{ "@value": "100, 200, and 300 K" }]
```

Do NOT output each value as a separate dictionary in the parameter list.

# Example
<IN_CONTEXT_EXAMPLE>

# Materials Science Text
<SYNTHESIS_TEXT>"""


class MissingSubstitution(KeyError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    stage: Stage
    template: str
    placeholders: tuple[str, ...]

    def __post_init__(self):
        for marker in self.placeholders:
            if self.template.count(marker) != 1:
                raise ValueError(f"{marker} must occur exactly once in the {self.stage.value} template")

    def render(self, substitutions: Mapping[str, str]) -> str:
        return render_prompt(self, substitutions)


RELEVANT_TEXT = PromptTemplate(Stage.RELEVANT_TEXT, RELEVANT_TEXT_TEMPLATE, (PAPER_TEXT,))
PROCEDURE_EXTRACTION = PromptTemplate(
    Stage.PROCEDURE_EXTRACTION, PROCEDURE_EXTRACTION_TEMPLATE, (IN_CONTEXT_EXAMPLE, SYNTHESIS_TEXT)
)
TEMPLATES = {t.stage: t for t in (RELEVANT_TEXT, PROCEDURE_EXTRACTION)}


def render_prompt(template: PromptTemplate, substitutions: Mapping[str, str]) -> str:
    """Fill every placeholder in one pass.

    Keys may be given with or without angle brackets (``"PAPER_TEXT"`` or
    ``"<PAPER_TEXT>"``). Substituted text is never rescanned, so a paper that
    happens to contain a marker string is inserted verbatim.
    """
    values = {}
    for key, value in substitutions.items():
        values[key if key.startswith("<") else f"<{key}>"] = value
    missing = [m for m in template.placeholders if m not in values]
    if missing:
        raise MissingSubstitution(", ".join(missing))
    pattern = re.compile("|".join(re.escape(m) for m in template.placeholders))
    return pattern.sub(lambda m: values[m.group(0)], template.template)


def format_example(relevant_text: str, procedures_json: str) -> str:
    """One-shot example block: a synthesis text followed by its expected JSON."""
    return (f"## Materials Science Text\n{relevant_text.strip()}\n\n"
            f"## Output\n{procedures_json.strip()}")
