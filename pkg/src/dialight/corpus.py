"""Corpus and ontology loading for MultiWOZ-schema datasets plus a simplified fixture format."""

from __future__ import annotations

import json
from pathlib import Path

from .model import (
    Corpus,
    DelexResponse,
    Dialogue,
    DialogueState,
    DomainGoal,
    Goal,
    LoadWarning,
    ModelError,
    Ontology,
    SlotSpec,
    Turn,
    Utterance,
    normalize_name,
    normalize_value,
    validate_state,
)

# Annotation artifacts meaning "slot not filled"; never become state triples.
EMPTY_SLOT_VALUES = frozenset({"", "none", "not mentioned"})

# MultiWOZ goal keys that are not domains.
_NON_DOMAIN_GOAL_KEYS = frozenset({"message", "topic"})


class CorpusFormatError(ValueError):
    """Malformed corpus or ontology file; message carries file/field context."""


def _read_json(path) -> object:
    path = Path(path)
    if not path.exists():
        raise CorpusFormatError(f"{path}: file not found")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_ontology(path) -> Ontology:
    """Read a `"domain-slot" -> {kind, values?}` JSON mapping."""
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise CorpusFormatError(f"{path}: ontology must be a JSON object")
    slots: dict[str, dict[str, SlotSpec]] = {}
    for key, spec in raw.items():
        if "-" not in key:
            raise CorpusFormatError(f"{path}: ontology key {key!r} is not of the form 'domain-slot'")
        domain, slot = key.split("-", 1)
        domain, slot = normalize_name(domain), normalize_name(slot)
        if not isinstance(spec, dict) or "kind" not in spec:
            raise CorpusFormatError(
                f"{path}: ontology entry {key!r} must be an object with a 'kind' field"
                " (raw MultiWOZ value lists are not accepted; see the data docs)"
            )
        values = spec.get("values")
        try:
            slot_spec = SlotSpec(
                name=slot,
                kind=spec["kind"],
                allowed_values=frozenset(normalize_value(v) for v in values) if values is not None else None,
            )
        except ModelError as exc:
            raise CorpusFormatError(f"{path}: ontology entry {key!r}: {exc}") from exc
        slots.setdefault(domain, {})[slot] = slot_spec
    return Ontology(slots=slots)


def load_dataset(corpus_path, ontology_path) -> tuple[Corpus, Ontology]:
    """Load a corpus plus its ontology; gold states are validated, divergences reported as warnings."""
    ontology = load_ontology(ontology_path)
    return load_corpus(corpus_path, ontology), ontology


def load_corpus(path, ontology: Ontology) -> Corpus:
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise CorpusFormatError(f"{path}: corpus must be a JSON object")
    if "dialogues" in raw and "language" in raw:
        return _load_simplified(path, raw, ontology)
    return _load_multiwoz(path, raw, ontology)


def _state_warnings(dialogue_id: str, turn_index: int, state: DialogueState, ontology: Ontology):
    for violation in validate_state(state, ontology):
        yield LoadWarning(
            dialogue_id=dialogue_id,
            location=f"turn {turn_index}, {violation.domain}.{violation.slot}",
            message=f"{violation.kind}: {violation.message}",
        )


def _goal_warnings(dialogue_id: str, goal: Goal, ontology: Ontology):
    for domain, domain_goal in goal.domains.items():
        if not ontology.has_domain(domain):
            yield LoadWarning(dialogue_id, f"goal.{domain}", f"unknown-domain: {domain!r} not in ontology")
            continue
        named = list(domain_goal.inform) + list(domain_goal.request) + list(domain_goal.book)
        for slot in named:
            if ontology.spec(domain, slot) is None:
                yield LoadWarning(
                    dialogue_id, f"goal.{domain}.{slot}", f"unknown-slot: {slot!r} not in domain {domain!r}"
                )


def _load_simplified(path, raw: dict, ontology: Ontology) -> Corpus:
    language = raw["language"]
    split = raw.get("split", "test")
    dialogues: dict[str, Dialogue] = {}
    warnings: list[LoadWarning] = []
    for dialogue_id, body in raw["dialogues"].items():
        goal = _parse_simplified_goal(body.get("goal", {}))
        turns = []
        for i, turn in enumerate(body.get("turns", [])):
            try:
                state = DialogueState.from_triples(
                    (normalize_name(d), normalize_name(s), str(v))
                    for d, slot_map in turn.get("state", {}).items()
                    for s, v in slot_map.items()
                )
                turns.append(
                    Turn(
                        user=Utterance("user", turn["user"], language),
                        system=Utterance("system", turn["system"], language),
                        gold_state=state,
                        gold_delex=DelexResponse.from_text(turn.get("delex", turn["system"])),
                    )
                )
            except (KeyError, ModelError, AttributeError) as exc:
                raise CorpusFormatError(f"{path}: dialogue {dialogue_id!r} turn {i}: {exc}") from exc
            warnings.extend(_state_warnings(dialogue_id, i, state, ontology))
        try:
            dialogues[dialogue_id] = Dialogue(id=dialogue_id, goal=goal, turns=tuple(turns))
        except ModelError as exc:
            raise CorpusFormatError(f"{path}: dialogue {dialogue_id!r}: {exc}") from exc
        warnings.extend(_goal_warnings(dialogue_id, goal, ontology))
    return Corpus(dialogues=dialogues, language=language, split=split, warnings=tuple(warnings))


def _parse_simplified_goal(raw: dict) -> Goal:
    domains = {}
    for domain, body in raw.items():
        domains[normalize_name(domain)] = DomainGoal(
            inform={normalize_name(s): str(v) for s, v in body.get("inform", {}).items()},
            request=frozenset(normalize_name(s) for s in body.get("request", [])),
            book={normalize_name(s): str(v) for s, v in body.get("book", {}).items()},
        )
    return Goal(domains=domains)


def _load_multiwoz(path, raw: dict, ontology: Ontology, language: str = "eng", split: str = "test") -> Corpus:
    dialogues: dict[str, Dialogue] = {}
    warnings: list[LoadWarning] = []
    for dialogue_id, body in raw.items():
        if not isinstance(body, dict) or "log" not in body:
            raise CorpusFormatError(f"{path}: dialogue {dialogue_id!r}: expected an object with a 'log' field")
        log = body["log"]
        if len(log) % 2 != 0:
            raise CorpusFormatError(
                f"{path}: dialogue {dialogue_id!r}: log has {len(log)} entries, expected user/system pairs"
            )
        goal = _parse_multiwoz_goal(body.get("goal", {}))
        turns = []
        for i in range(0, len(log), 2):
            user_entry, system_entry = log[i], log[i + 1]
            turn_index = i // 2
            try:
                state = _state_from_metadata(system_entry.get("metadata", {}))
                delex_text = system_entry.get("delex_text", system_entry.get("delex", system_entry["text"]))
                turns.append(
                    Turn(
                        user=Utterance("user", user_entry["text"], language),
                        system=Utterance("system", system_entry["text"], language),
                        gold_state=state,
                        gold_delex=DelexResponse.from_text(delex_text),
                    )
                )
            except (KeyError, ModelError, AttributeError, TypeError) as exc:
                raise CorpusFormatError(f"{path}: dialogue {dialogue_id!r} turn {turn_index}: {exc}") from exc
            warnings.extend(_state_warnings(dialogue_id, turn_index, state, ontology))
        try:
            dialogues[dialogue_id] = Dialogue(id=dialogue_id, goal=goal, turns=tuple(turns))
        except ModelError as exc:
            raise CorpusFormatError(f"{path}: dialogue {dialogue_id!r}: {exc}") from exc
        warnings.extend(_goal_warnings(dialogue_id, goal, ontology))
    return Corpus(dialogues=dialogues, language=language, split=split, warnings=tuple(warnings))


def _state_from_metadata(metadata: dict) -> DialogueState:
    """Accumulated state from a MultiWOZ system-turn `metadata` block."""
    triples = []
    for domain, body in metadata.items():
        domain = normalize_name(domain)
        for slot, value in body.get("semi", {}).items():
            if isinstance(value, list):  # some annotations keep alternatives; first is canonical
                value = value[0] if value else ""
            if normalize_value(str(value)) in EMPTY_SLOT_VALUES:
                continue
            triples.append((domain, normalize_name(slot), str(value)))
        for slot, value in body.get("book", {}).items():
            if slot == "booked" or isinstance(value, (list, dict)):
                continue
            if normalize_value(str(value)) in EMPTY_SLOT_VALUES:
                continue
            triples.append((domain, normalize_name(f"book {slot}"), str(value)))
    return DialogueState.from_triples(triples)


def _parse_multiwoz_goal(raw: dict) -> Goal:
    domains = {}
    for domain, body in raw.items():
        if domain in _NON_DOMAIN_GOAL_KEYS or not isinstance(body, dict) or not body:
            continue
        inform = {
            normalize_name(s): str(v)
            for s, v in body.get("info", {}).items()
            if normalize_value(str(v)) not in EMPTY_SLOT_VALUES
        }
        request = frozenset(normalize_name(s) for s in body.get("reqt", []))
        book = {
            normalize_name(s): str(v)
            for s, v in body.get("book", {}).items()
            if not isinstance(v, (list, dict)) and normalize_value(str(v)) not in EMPTY_SLOT_VALUES
        }
        if inform or request or book:
            domains[normalize_name(domain)] = DomainGoal(inform=inform, request=request, book=book)
    return Goal(domains=domains)
