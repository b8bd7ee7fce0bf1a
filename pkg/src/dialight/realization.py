"""Database-result summaries, placeholder handling, and lexicalization of delexicalized responses."""

from __future__ import annotations

from dataclasses import dataclass

from .database import DbEntry, MatchConfig
from .model import (
    Corpus,
    DelexResponse,
    DialogueState,
    Placeholder,
    extract_placeholders,
)

__all__ = [
    "Placeholder",
    "DelexResponse",
    "extract_placeholders",
    "SummaryTemplate",
    "SummaryError",
    "DEFAULT_SUMMARY_TEMPLATES",
    "summarize_results",
    "lexicalize",
    "placeholder_inventory",
    "pick_active_domain",
    "UNKNOWN_MARKER",
]

UNKNOWN_MARKER = "[unknown]"


class SummaryError(KeyError):
    """No summary template configured for the requested language."""


@dataclass(frozen=True)
class SummaryTemplate:
    """Per-language clause template; `clause` takes {domain} and {count} fields."""

    clause: str
    zero: str
    one: str
    many: str  # takes {n}

    def render(self, domain: str, count: int) -> str:
        if count == 0:
            count_text = self.zero
        elif count == 1:
            count_text = self.one
        else:
            count_text = self.many.format(n=count)
        return self.clause.format(domain=domain, count=count_text)


DEFAULT_SUMMARY_TEMPLATES: dict[str, SummaryTemplate] = {
    "eng": SummaryTemplate(
        clause="{domain} has {count}",
        zero="no result found",
        one="one result found",
        many="{n} results found",
    ),
}


def summarize_results(
    counts: dict[str, int],
    language: str = "eng",
    templates: dict[str, SummaryTemplate] | None = None,
) -> str:
    """One clause per domain in lexicographic order, joined by '; '."""
    templates = templates if templates is not None else DEFAULT_SUMMARY_TEMPLATES
    template = templates.get(language)
    if template is None:
        raise SummaryError(f"no summary template configured for language {language!r}")
    return "; ".join(template.render(domain, counts[domain]) for domain in sorted(counts))


def lexicalize(
    delex: DelexResponse,
    state: DialogueState,
    entries: dict[str, list[DbEntry]],
    active_domain: str | None,
    config: MatchConfig | None = None,
) -> str:
    """Substitute every placeholder with a concrete value.

    Priority per placeholder: the active domain's first retrieved entry,
    then the dialogue state value for (active_domain, slot), then the
    literal [unknown] marker. Substitution is literal; no grammatical
    agreement is attempted.
    """
    config = config or MatchConfig()
    first_entry = None
    if active_domain is not None and entries.get(active_domain):
        first_entry = entries[active_domain][0]

    def resolve(placeholder: Placeholder) -> str:
        slot = placeholder.slot
        if first_entry is not None:
            value = first_entry.attributes.get(config.attribute_name(slot))
            if value is not None:
                return value
        if active_domain is not None:
            value = state.value(active_domain, slot)
            if value is not None:
                return value
        return UNKNOWN_MARKER

    pieces = []
    cursor = 0
    for placeholder in delex.placeholders:
        pieces.append(delex.text[cursor : placeholder.start])
        pieces.append(resolve(placeholder))
        cursor = placeholder.end
    pieces.append(delex.text[cursor:])
    return "".join(pieces)


def placeholder_inventory(corpus: Corpus) -> list[str]:
    """Union of placeholder tokens observed in the corpus's gold delexicalized responses."""
    tokens = {
        placeholder.token
        for dialogue in corpus
        for turn in dialogue.turns
        for placeholder in turn.gold_delex.placeholders
    }
    return sorted(tokens)


def pick_active_domain(
    changed_domains: set[str],
    entries: dict[str, list[DbEntry]],
    fallback: str | None = None,
) -> str | None:
    """Most-recently-changed domain; ties prefer a domain with retrieved entries, then lexicographic.

    With no change this turn the previously active domain carries over; a
    fresh session with an empty state has no active domain.
    """
    if not changed_domains:
        return fallback
    candidates = sorted(changed_domains)
    with_entries = [d for d in candidates if entries.get(d)]
    return with_entries[0] if with_entries else candidates[0]
