"""Instruction-prompt assembly for in-context-learning backends, with reproducible example selection."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .model import Corpus, DialogueState, Ontology, Utterance

SECTION_PREFIX = "### "

DST_SECTIONS = (
    "task-instruction",
    "output-format",
    "ontology",
    "categorical-slots",
    "time-slots",
    "number-slots",
)
RG_SECTIONS = (
    "task-instruction",
    "ontology",
    "delexicalization",
    "target-language",
)


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class PromptConfig:
    n_icl_examples: int = 0
    rng_seed: int = 0
    target_language: str = "eng"
    context_window: int = 10

    def __post_init__(self):
        if self.context_window < 1:
            raise PromptError(f"context_window must be >= 1, got {self.context_window}")
        if self.n_icl_examples < 0:
            raise PromptError(f"n_icl_examples must be >= 0, got {self.n_icl_examples}")


@dataclass(frozen=True)
class IclExample:
    """One training turn usable as an in-context example for either task."""

    history: tuple[Utterance, ...]
    state: DialogueState
    response: str  # gold delexicalized response


@dataclass(frozen=True)
class PromptTemplates:
    dst: dict[str, str]
    rg: dict[str, str]
    languages: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "PromptTemplates":
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        return cls(dst=raw["dst"], rg=raw["rg"], languages=raw.get("languages", {}))

    @classmethod
    def default(cls) -> "PromptTemplates":
        raw = yaml.safe_load(resources.files("dialight").joinpath("templates/prompts.yaml").read_text("utf-8"))
        return cls(dst=raw["dst"], rg=raw["rg"], languages=raw.get("languages", {}))


_DEFAULT_TEMPLATES: PromptTemplates | None = None


def default_templates() -> PromptTemplates:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = PromptTemplates.default()
    return _DEFAULT_TEMPLATES


def select_icl_examples(corpus: Corpus, k: int, seed: int = 0) -> list[IclExample]:
    """Uniform sample of `k` turns without replacement, reproducible from `seed`."""
    pool = []
    for dialogue in corpus:
        history: list[Utterance] = []
        for turn in dialogue.turns:
            history.append(turn.user)
            pool.append(
                IclExample(history=tuple(history), state=turn.gold_state, response=turn.gold_delex.text)
            )
            history.append(turn.system)
    if k > len(pool):
        raise PromptError(f"requested {k} examples but the corpus has only {len(pool)} turns")
    if k == 0:
        return []
    return random.Random(seed).sample(pool, k)


def _section(name: str, body: str) -> str:
    return f"{SECTION_PREFIX}{name}\n{body.rstrip()}"


def _render_history(history, window: int) -> str:
    return "\n".join(f"{u.speaker}: {u.text}" for u in list(history)[-window:])


def _domains_and_slots(ontology: Ontology) -> str:
    return "\n".join(
        f"{domain}: {', '.join(sorted(ontology.slots[domain]))}" for domain in ontology.domains
    )


def _state_as_json(state: DialogueState) -> str:
    return json.dumps(state.by_domain(), sort_keys=True, ensure_ascii=False)


def build_dst_prompt(
    ontology: Ontology,
    examples: list[IclExample],
    history,
    config: PromptConfig,
    templates: PromptTemplates | None = None,
) -> str:
    """Six instruction sections in fixed order, then examples, then the truncated history."""
    if not history:
        raise PromptError("history must be non-empty")
    templates = templates or default_templates()
    t = templates.dst

    categorical = "\n".join(
        f"{domain} {spec.name}: {', '.join(sorted(spec.allowed_values))}"
        for domain, spec in ontology.categorical_slots()
    )
    time_slots = ", ".join(f"{d} {s.name}" for d, s in ontology.slots_of_kind("time")) or "(none)"
    number_slots = ", ".join(f"{d} {s.name}" for d, s in ontology.slots_of_kind("number")) or "(none)"

    parts = [
        _section("task-instruction", t["task"]),
        _section("output-format", t["format"]),
        _section("ontology", t["ontology"].format(domains_and_slots=_domains_and_slots(ontology))),
        _section("categorical-slots", t["categorical"].format(categorical_values=categorical or "(none)")),
        _section("time-slots", t["time"].format(time_slots=time_slots)),
        _section("number-slots", t["number"].format(number_slots=number_slots)),
    ]
    if examples:
        blocks = [
            f"{_render_history(e.history, config.context_window)}\nstate: {_state_as_json(e.state)}"
            for e in examples
        ]
        parts.append(_section("examples", "\n\n".join(blocks)))
    parts.append(_section("dialogue-history", _render_history(history, config.context_window)))
    return "\n\n".join(parts) + "\n"


def build_rg_prompt(
    ontology: Ontology,
    examples: list[IclExample],
    history,
    db_summary: str,
    config: PromptConfig,
    placeholders: list[str] | None = None,
    templates: PromptTemplates | None = None,
) -> str:
    """Four instruction sections in fixed order, then examples, the database summary, the history."""
    if not history:
        raise PromptError("history must be non-empty")
    templates = templates or default_templates()
    t = templates.rg
    language_name = templates.languages.get(config.target_language, config.target_language)

    parts = [
        _section("task-instruction", t["task"]),
        _section("ontology", t["ontology"].format(domains_and_slots=_domains_and_slots(ontology))),
        _section(
            "delexicalization",
            t["delex"].format(placeholders=", ".join(placeholders) if placeholders else "(none)"),
        ),
        _section("target-language", t["language"].format(language_name=language_name)),
    ]
    if examples:
        blocks = [
            f"{_render_history(e.history, config.context_window)}\nresponse: {e.response}"
            for e in examples
        ]
        parts.append(_section("examples", "\n\n".join(blocks)))
    parts.append(_section("database-summary", db_summary or "(no query issued)"))
    parts.append(_section("dialogue-history", _render_history(history, config.context_window)))
    return "\n\n".join(parts) + "\n"


def prompt_sections(prompt: str) -> list[str]:
    """Section names in order of appearance; used by tests and debugging."""
    return [line[len(SECTION_PREFIX):] for line in prompt.splitlines() if line.startswith(SECTION_PREFIX)]
