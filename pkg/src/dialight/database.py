"""Per-domain entity databases with exact categorical and threshold-Levenshtein fuzzy retrieval."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .model import (
    DEFAULT_WILDCARD_VALUES,
    DialogueState,
    Ontology,
    normalize_name,
    normalize_value,
)

logger = logging.getLogger(__name__)


class DatabaseError(ValueError):
    pass


class UnknownDomainError(DatabaseError):
    pass


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode scalar values."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,  # deletion
                    current[j - 1] + 1,  # insertion
                    previous[j - 1] + (ch_a != ch_b),  # substitution
                )
            )
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class DbEntry:
    domain: str
    attributes: dict[str, str]

    def __post_init__(self):
        if not self.attributes:
            raise DatabaseError(f"entry in domain {self.domain!r} has no attributes")


@dataclass(frozen=True)
class DomainDatabase:
    """Entries in file order; the order is canonical and never changes after load."""

    domain: str
    entries: tuple[DbEntry, ...]

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class MatchConfig:
    """Matching knobs shared by retrieval and goal-satisfaction checks.

    `slot_aliases` maps state slot names to database attribute names; an
    alias of None marks a slot that is not a database attribute at all
    (it never constrains a query). `ignored_slot_prefixes` does the same
    wholesale for booking-style slots.
    """

    threshold: int = 2
    wildcard_values: frozenset[str] = DEFAULT_WILDCARD_VALUES
    slot_aliases: dict[str, str | None] = field(default_factory=dict)
    ignored_slot_prefixes: tuple[str, ...] = ("book",)

    def queryable(self, slot: str) -> bool:
        if slot in self.slot_aliases:
            return self.slot_aliases[slot] is not None
        return not any(slot.startswith(p) for p in self.ignored_slot_prefixes)

    def attribute_name(self, slot: str) -> str:
        alias = self.slot_aliases.get(slot)
        return alias if alias is not None else slot


def _value_matches(entry_value: str, wanted: str, categorical: bool, threshold: int) -> bool:
    entry_value, wanted = normalize_value(entry_value), normalize_value(wanted)
    if categorical:
        return entry_value == wanted
    return levenshtein(entry_value, wanted) <= threshold


def entry_matches(
    entry: DbEntry,
    constraints: dict[str, str],
    domain: str,
    ontology: Ontology,
    threshold: int,
    config: MatchConfig,
) -> bool:
    """True when the entry possesses every constrained slot and each value matches.

    Categorical slots compare exactly after casefolding; all other kinds
    within the Levenshtein threshold. Wildcard values never constrain.
    """
    for slot, wanted in constraints.items():
        if normalize_value(wanted) in config.wildcard_values:
            continue
        if not config.queryable(slot):
            continue
        entry_value = entry.attributes.get(config.attribute_name(slot))
        if entry_value is None:
            return False
        spec = ontology.spec(domain, slot)
        categorical = spec is not None and spec.kind == "categorical"
        if not _value_matches(entry_value, wanted, categorical, threshold):
            return False
    return True


def query_domain(
    db: DomainDatabase,
    state: DialogueState,
    domain: str,
    ontology: Ontology,
    threshold: int = 2,
    config: MatchConfig | None = None,
) -> list[DbEntry]:
    """Entries satisfying every state constraint for `domain`, in canonical order."""
    if threshold < 0:
        raise DatabaseError(f"threshold must be >= 0, got {threshold}")
    if domain != db.domain:
        raise UnknownDomainError(f"database holds domain {db.domain!r}, queried for {domain!r}")
    if not ontology.has_domain(domain):
        raise UnknownDomainError(f"domain {domain!r} not in ontology")
    config = config or MatchConfig()
    constraints = {s: v for d, s, v in state if d == domain}
    return [e for e in db.entries if entry_matches(e, constraints, domain, ontology, threshold, config)]


def load_domain_database(path, domain: str | None = None) -> DomainDatabase:
    """Read one `<domain>_db.json` file: a JSON array of attribute maps.

    Attribute names are normalized; scalar values are stringified; nested
    structures (MultiWOZ keeps coordinates and price tables in some files)
    are not matchable and are skipped.
    """
    path = Path(path)
    if domain is None:
        domain = normalize_name(path.stem.removesuffix("_db"))
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatabaseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise DatabaseError(f"{path}: expected a JSON array of entries")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise DatabaseError(f"{path}: entry {i} is not an object")
        attributes = {
            normalize_name(k): v if isinstance(v, str) else json.dumps(v)
            for k, v in item.items()
            if not isinstance(v, (dict, list))
        }
        if not attributes:
            raise DatabaseError(f"{path}: entry {i} has no scalar attributes")
        entries.append(DbEntry(domain=domain, attributes=attributes))
    return DomainDatabase(domain=domain, entries=tuple(entries))


def load_databases(db_dir, ontology: Ontology | None = None) -> dict[str, DomainDatabase]:
    """Load every `*_db.json` in a directory, keyed by domain."""
    db_dir = Path(db_dir)
    if not db_dir.is_dir():
        raise DatabaseError(f"{db_dir}: not a directory")
    databases = {}
    for path in sorted(db_dir.glob("*_db.json")):
        db = load_domain_database(path)
        databases[db.domain] = db
        if ontology is not None and ontology.has_domain(db.domain):
            known = set(ontology.slots[db.domain])
            for entry in db.entries:
                unknown = set(entry.attributes) - known
                if unknown:
                    logger.warning("%s: attributes %s not in ontology for %r", path.name, sorted(unknown), db.domain)
                break  # schemas are uniform per file; first entry suffices
    return databases
