"""Dialogue-state codec: flattened-string linearization, tolerant inverse parsing,
and extraction of JSON-formatted states from raw model output."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    DEFAULT_WILDCARD_VALUES,
    DialogueState,
    Ontology,
    normalize_name,
    validate_state,
)

# Exact token separators of the flattened grammar:
#   domain # slot = value ; slot = value | domain # ...
DOMAIN_SEP = " | "
SLOT_SEP = " ; "
DOMAIN_MARK = " # "
ASSIGN = " = "
_RESERVED = (DOMAIN_SEP, SLOT_SEP, DOMAIN_MARK, ASSIGN)


class CodecError(ValueError):
    """Raised when a state cannot be rendered in the flattened grammar."""


@dataclass(frozen=True)
class ParseOutcome:
    """Parse result plus a format-adherence verdict.

    `compliant` is True only when the input matched the prescribed format
    exactly (modulo surrounding whitespace) and every triple respects the
    ontology; every deviation is listed in `diagnostics`.
    """

    state: DialogueState
    compliant: bool
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        if self.compliant and self.diagnostics:
            raise ValueError("a compliant outcome cannot carry diagnostics")


def linearize_state(state: DialogueState) -> str:
    """Render a state as `d1 # s1 = v1 ; s2 = v2 | d2 # ...`.

    Domains and slots are ordered lexicographically so equal states always
    produce byte-identical strings. Values containing a reserved separator
    sequence cannot be represented (the grammar is not escapable) and raise
    CodecError.
    """
    for domain, slot, value in state:
        for part in (domain, slot, value):
            for sep in _RESERVED:
                if sep in part:
                    raise CodecError(
                        f"cannot linearize {(domain, slot, value)!r}: contains reserved separator {sep!r}"
                    )
    blocks = []
    for domain, slot_map in sorted(state.by_domain().items()):
        assignments = SLOT_SEP.join(f"{s}{ASSIGN}{v}" for s, v in sorted(slot_map.items()))
        blocks.append(f"{domain}{DOMAIN_MARK}{assignments}")
    return DOMAIN_SEP.join(blocks)


def _ontology_diagnostics(state: DialogueState, ontology: Ontology) -> tuple[DialogueState, list[str]]:
    """Drop triples with unknown domain/slot; keep value violations but report them."""
    diagnostics = []
    dropped = set()
    for violation in validate_state(state, ontology, DEFAULT_WILDCARD_VALUES):
        if violation.kind in ("unknown-domain", "unknown-slot"):
            dropped.add((violation.domain, violation.slot, violation.value))
        diagnostics.append(f"{violation.kind}: {violation.message}")
    if dropped:
        state = DialogueState(frozenset(t for t in state.triples if t not in dropped))
    return state, diagnostics


def parse_linearized_state(text: str, ontology: Ontology) -> ParseOutcome:
    """Tolerantly parse the flattened grammar back into a state.

    Unparseable segments are skipped and reported; the parse never aborts.
    The outcome is compliant only when re-rendering the parsed segments in
    their original order with canonical separators reproduces the input.
    """
    stripped = text.strip()
    if not stripped:
        return ParseOutcome(state=DialogueState(), compliant=True)

    diagnostics: list[str] = []
    blocks: list[tuple[str, list[tuple[str, str]]]] = []
    triples: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str]] = set()

    for block in stripped.split("|"):
        if "#" not in block:
            diagnostics.append(f"segment {block.strip()!r}: missing '#' domain marker")
            continue
        raw_domain, _, rest = block.partition("#")
        domain = normalize_name(raw_domain)
        if not domain:
            diagnostics.append(f"segment {block.strip()!r}: empty domain name")
            continue
        assignments: list[tuple[str, str]] = []
        for assignment in rest.split(";"):
            if "=" not in assignment:
                diagnostics.append(f"assignment {assignment.strip()!r} in {domain!r}: missing '='")
                continue
            raw_slot, _, raw_value = assignment.partition("=")
            slot, value = normalize_name(raw_slot), raw_value.strip()
            if not slot or not value:
                diagnostics.append(f"assignment {assignment.strip()!r} in {domain!r}: empty slot or value")
                continue
            if (domain, slot) in seen:
                diagnostics.append(f"duplicate slot {domain}.{slot}: keeping the last value")
            seen.add((domain, slot))
            assignments.append((slot, value))
            triples.append((domain, slot, value))
        blocks.append((domain, assignments))

    state = DialogueState.from_triples(triples)
    state, ontology_diags = _ontology_diagnostics(state, ontology)
    diagnostics.extend(ontology_diags)

    rendered = DOMAIN_SEP.join(
        f"{domain}{DOMAIN_MARK}{SLOT_SEP.join(f'{s}{ASSIGN}{v}' for s, v in assignments)}"
        for domain, assignments in blocks
    )
    compliant = not diagnostics and rendered == stripped
    if not compliant and not diagnostics:
        diagnostics.append("text deviates from the canonical separator rendering")
    return ParseOutcome(state=state, compliant=compliant, diagnostics=tuple(diagnostics))


def _first_json_object(text: str):
    """The first syntactically valid JSON object embedded anywhere in the text."""
    decoder = json.JSONDecoder()
    start = text.find("{")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(text[start:])
        except json.JSONDecodeError:
            value = None
        if isinstance(value, dict):
            return value
        start = text.find("{", start + 1)
    return None


def _scalar(value) -> str:
    return value if isinstance(value, str) else json.dumps(value)


def parse_structured_state(text: str, ontology: Ontology) -> ParseOutcome:
    """Extract a JSON-formatted state from raw model output.

    Surrounding prose is ignored; the first valid JSON object wins. Both
    nested `{"domain": {"slot": "value"}}` objects and flat `"domain-slot"`
    keys are accepted. Unknown keys and slot-kind violations make the
    outcome non-compliant.
    """
    obj = _first_json_object(text)
    if obj is None:
        return ParseOutcome(
            state=DialogueState(), compliant=False, diagnostics=("no JSON object found in output",)
        )

    diagnostics: list[str] = []
    triples: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str]] = set()

    def add(domain: str, slot: str, value) -> None:
        if value is None:
            return  # null means "not filled"
        if isinstance(value, (dict, list)):
            diagnostics.append(f"{domain}.{slot}: expected a scalar value, got {type(value).__name__}")
            return
        if (domain, slot) in seen:
            diagnostics.append(f"duplicate slot {domain}.{slot}: keeping the last value")
        seen.add((domain, slot))
        triples.append((domain, slot, _scalar(value)))

    for key, value in obj.items():
        if isinstance(value, dict):
            domain = normalize_name(key)
            for slot, slot_value in value.items():
                add(domain, normalize_name(slot), slot_value)
        elif "-" in key:
            domain, slot = key.split("-", 1)
            add(normalize_name(domain), normalize_name(slot), value)
        else:
            diagnostics.append(f"key {key!r}: neither a domain object nor a 'domain-slot' key")

    state = DialogueState.from_triples(triples)
    state, ontology_diags = _ontology_diagnostics(state, ontology)
    diagnostics.extend(ontology_diags)
    return ParseOutcome(state=state, compliant=not diagnostics, diagnostics=tuple(diagnostics))
