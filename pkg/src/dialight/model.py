"""Shared domain types: utterances, dialogue states, ontologies, goals, corpora."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

SPEAKERS = ("user", "system")
SLOT_KINDS = ("categorical", "time", "number", "open")

# Wildcard slot values meaning "no preference"; they satisfy every slot kind
# and never constrain a database query. Extendable per language via config.
DEFAULT_WILDCARD_VALUES = frozenset(
    {"dontcare", "dont care", "do not care", "don't care", "do n't care"}
)

_TIME_RE = re.compile(r"^([01][0-9]|2[0-3]):[0-5][0-9]$")
_PLACEHOLDER_RE = re.compile(r"\[value_([a-z0-9_]+)\]")


def normalize_name(name: str) -> str:
    """Canonical form for domain/slot names: casefolded, whitespace collapsed."""
    return " ".join(name.split()).casefold()


def normalize_value(value: str) -> str:
    """Comparison form for slot values; stored values stay verbatim."""
    return " ".join(value.split()).casefold()


class ModelError(ValueError):
    """Invalid construction of a domain object."""


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    language: str = "eng"

    def __post_init__(self):
        if self.speaker not in SPEAKERS:
            raise ModelError(f"speaker must be one of {SPEAKERS}, got {self.speaker!r}")
        if not self.text.strip():
            raise ModelError("utterance text must be non-empty")


@dataclass(frozen=True)
class DialogueState:
    """A set of (domain, slot, value) triples with at most one value per (domain, slot)."""

    triples: frozenset[tuple[str, str, str]] = frozenset()

    def __post_init__(self):
        seen = {}
        for domain, slot, value in self.triples:
            key = (domain, slot)
            if key in seen and seen[key] != value:
                raise ModelError(f"conflicting values for {key}: {seen[key]!r} vs {value!r}")
            seen[key] = value

    @classmethod
    def from_triples(cls, triples) -> "DialogueState":
        """Build a state from an iterable; a later (domain, slot) overwrites an earlier one."""
        merged: dict[tuple[str, str], str] = {}
        for domain, slot, value in triples:
            merged[(domain, slot)] = value
        return cls(frozenset((d, s, v) for (d, s), v in merged.items()))

    def merge(self, other: "DialogueState") -> "DialogueState":
        """Overwrite-merge: triples of `other` win on (domain, slot) collisions."""
        merged = {(d, s): v for d, s, v in self.triples}
        merged.update({(d, s): v for d, s, v in other.triples})
        return DialogueState(frozenset((d, s, v) for (d, s), v in merged.items()))

    def value(self, domain: str, slot: str) -> str | None:
        for d, s, v in self.triples:
            if d == domain and s == slot:
                return v
        return None

    def domains(self) -> list[str]:
        return sorted({d for d, _, _ in self.triples})

    def by_domain(self) -> dict[str, dict[str, str]]:
        out: dict[str, dict[str, str]] = {}
        for d, s, v in sorted(self.triples):
            out.setdefault(d, {})[s] = v
        return out

    def __iter__(self):
        return iter(sorted(self.triples))

    def __len__(self):
        return len(self.triples)

    def __bool__(self):
        return bool(self.triples)


EMPTY_STATE = DialogueState()


@dataclass(frozen=True)
class SlotSpec:
    name: str
    kind: str
    allowed_values: frozenset[str] | None = None

    def __post_init__(self):
        if self.kind not in SLOT_KINDS:
            raise ModelError(f"unknown slot kind {self.kind!r} for slot {self.name!r}")
        if self.kind == "categorical":
            if not self.allowed_values:
                raise ModelError(f"categorical slot {self.name!r} needs allowed values")
        elif self.allowed_values is not None:
            raise ModelError(f"{self.kind} slot {self.name!r} must not list allowed values")


@dataclass(frozen=True)
class Ontology:
    """Domains and their slot specifications, keyed by normalized names."""

    slots: dict[str, dict[str, SlotSpec]]

    @property
    def domains(self) -> list[str]:
        return sorted(self.slots)

    def has_domain(self, domain: str) -> bool:
        return domain in self.slots

    def spec(self, domain: str, slot: str) -> SlotSpec | None:
        return self.slots.get(domain, {}).get(slot)

    def categorical_slots(self) -> list[tuple[str, SlotSpec]]:
        return [
            (domain, spec)
            for domain in self.domains
            for spec in sorted(self.slots[domain].values(), key=lambda s: s.name)
            if spec.kind == "categorical"
        ]

    def slots_of_kind(self, kind: str) -> list[tuple[str, SlotSpec]]:
        return [
            (domain, spec)
            for domain in self.domains
            for spec in sorted(self.slots[domain].values(), key=lambda s: s.name)
            if spec.kind == kind
        ]


@dataclass(frozen=True)
class Violation:
    """One triple breaking its slot specification. Data, not an exception."""

    domain: str
    slot: str
    value: str
    kind: str  # unknown-domain | unknown-slot | categorical | time | number
    message: str


def validate_state(
    state: DialogueState,
    ontology: Ontology,
    wildcard_values: frozenset[str] = DEFAULT_WILDCARD_VALUES,
) -> list[Violation]:
    """Check every triple against its slot kind; returns one Violation per breach."""
    violations = []
    for domain, slot, value in state:
        if not ontology.has_domain(domain):
            violations.append(
                Violation(domain, slot, value, "unknown-domain", f"domain {domain!r} not in ontology")
            )
            continue
        spec = ontology.spec(domain, slot)
        if spec is None:
            violations.append(
                Violation(domain, slot, value, "unknown-slot", f"slot {slot!r} not in domain {domain!r}")
            )
            continue
        if normalize_value(value) in wildcard_values:
            continue
        if spec.kind == "categorical":
            allowed = {normalize_value(v) for v in spec.allowed_values}
            if normalize_value(value) not in allowed:
                violations.append(
                    Violation(
                        domain, slot, value, "categorical",
                        f"value {value!r} not in allowed set for {domain}.{slot}",
                    )
                )
        elif spec.kind == "time":
            if not _TIME_RE.match(value.strip()):
                violations.append(
                    Violation(domain, slot, value, "time", f"value {value!r} is not hh:mm in 00:00-23:59")
                )
        elif spec.kind == "number":
            try:
                number = int(value.strip())
            except ValueError:
                number = -1
            if number < 0:
                violations.append(
                    Violation(domain, slot, value, "number", f"value {value!r} is not a non-negative integer")
                )
    return violations


@dataclass(frozen=True)
class Placeholder:
    """One `[value_<slot>]` occurrence; `start` is its character offset in the text."""

    slot: str
    start: int = 0

    @property
    def token(self) -> str:
        return f"[value_{self.slot}]"

    @property
    def end(self) -> int:
        return self.start + len(self.token)


def extract_placeholders(text: str) -> list[Placeholder]:
    """All non-overlapping `[value_<name>]` occurrences, left to right, duplicates kept."""
    return [Placeholder(m.group(1), m.start()) for m in _PLACEHOLDER_RE.finditer(text)]


@dataclass(frozen=True)
class DelexResponse:
    """A delexicalized system utterance plus its enumerated placeholder occurrences."""

    text: str
    placeholders: tuple[Placeholder, ...]

    def __post_init__(self):
        expected = tuple(extract_placeholders(self.text))
        if tuple(self.placeholders) != expected:
            raise ModelError("placeholders must enumerate every [value_*] occurrence in order")

    @classmethod
    def from_text(cls, text: str) -> "DelexResponse":
        return cls(text=text, placeholders=tuple(extract_placeholders(text)))

    def tokens(self) -> list[str]:
        return [p.token for p in self.placeholders]


@dataclass(frozen=True)
class DomainGoal:
    inform: dict[str, str] = field(default_factory=dict)
    request: frozenset[str] = frozenset()
    book: dict[str, str] = field(default_factory=dict)

    def empty(self) -> bool:
        return not (self.inform or self.request or self.book)


@dataclass(frozen=True)
class Goal:
    domains: dict[str, DomainGoal] = field(default_factory=dict)

    def __bool__(self):
        return any(not g.empty() for g in self.domains.values())


@dataclass(frozen=True)
class Turn:
    user: Utterance
    system: Utterance
    gold_state: DialogueState
    gold_delex: DelexResponse


@dataclass(frozen=True)
class Dialogue:
    id: str
    goal: Goal
    turns: tuple[Turn, ...]

    def __post_init__(self):
        if not self.turns:
            raise ModelError(f"dialogue {self.id!r} has no turns")

    def utterances(self) -> list[Utterance]:
        flat = []
        for turn in self.turns:
            flat.append(turn.user)
            flat.append(turn.system)
        return flat


@dataclass(frozen=True)
class LoadWarning:
    """A non-fatal schema divergence discovered while loading a corpus."""

    dialogue_id: str
    location: str
    message: str


@dataclass(frozen=True)
class Corpus:
    dialogues: dict[str, Dialogue]
    language: str
    split: str = "test"
    warnings: tuple[LoadWarning, ...] = ()

    def __iter__(self):
        return (self.dialogues[i] for i in sorted(self.dialogues))

    def __len__(self):
        return len(self.dialogues)

    def turn_count(self) -> int:
        return sum(len(d.turns) for d in self.dialogues.values())
