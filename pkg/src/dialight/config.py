"""The central deployment configuration: one declarative document drives every service."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .database import MatchConfig
from .humaneval.questions import QuestionnaireConfig, default_questionnaire
from .humaneval.service import HumanEvalConfig, SystemArm
from .model import DEFAULT_WILDCARD_VALUES
from .prompts import PromptConfig, PromptTemplates
from .realization import DEFAULT_SUMMARY_TEMPLATES, SummaryTemplate


class ConfigError(ValueError):
    pass


@dataclass
class DeploymentConfig:
    language: str = "eng"
    corpus_path: str | None = None
    ontology_path: str | None = None
    db_dir: str | None = None
    match: MatchConfig = field(default_factory=MatchConfig)
    prompt: PromptConfig = field(default_factory=PromptConfig)
    prompt_templates: PromptTemplates | None = None
    summary_templates: dict[str, SummaryTemplate] = field(
        default_factory=lambda: dict(DEFAULT_SUMMARY_TEMPLATES)
    )
    backends: list[dict] = field(default_factory=list)
    ports: dict[str, int] = field(default_factory=lambda: {"system": 8200, "humaneval": 8300})
    orchestrator_url: str = "http://127.0.0.1:8200"
    humaneval: HumanEvalConfig | None = None


def _parse_match(raw: dict) -> MatchConfig:
    wildcards = raw.get("wildcard_values")
    return MatchConfig(
        threshold=raw.get("threshold", 2),
        wildcard_values=frozenset(wildcards) if wildcards else DEFAULT_WILDCARD_VALUES,
        slot_aliases=dict(raw.get("slot_aliases", {})),
        ignored_slot_prefixes=tuple(raw.get("ignored_slot_prefixes", ("book",))),
    )


def _parse_summaries(raw: dict) -> dict[str, SummaryTemplate]:
    templates = dict(DEFAULT_SUMMARY_TEMPLATES)
    for language, body in raw.items():
        templates[language] = SummaryTemplate(
            clause=body["clause"],
            zero=body["zero"],
            one=body["one"],
            many=body["many"],
        )
    return templates


def _parse_humaneval(raw: dict, questionnaire_base: Path) -> HumanEvalConfig:
    if "token_secret" not in raw:
        raise ConfigError("humaneval.token_secret is required")
    questionnaire = default_questionnaire()
    if raw.get("questionnaire_path"):
        questionnaire = QuestionnaireConfig.from_file(questionnaire_base / raw["questionnaire_path"])
    return HumanEvalConfig(
        token_secret=raw["token_secret"],
        token_ttl_hours=raw.get("token_ttl_hours", 24.0),
        systems=tuple(SystemArm(label=s["label"], session=dict(s["session"])) for s in raw.get("systems", [])),
        dialogues_per_system=raw.get("dialogues_per_system", 2),
        scenarios=tuple(raw["scenarios"]) if raw.get("scenarios") else HumanEvalConfig.__dataclass_fields__["scenarios"].default,
        consent_text=raw.get("consent_text", HumanEvalConfig.__dataclass_fields__["consent_text"].default),
        assignment_seed=raw.get("assignment_seed", 0),
        admins=tuple((a["username"], a["password"]) for a in raw.get("admins", [])),
        questionnaire=questionnaire,
    )


def load_config(path) -> DeploymentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    prompt_raw = raw.get("prompts", {})
    prompt = PromptConfig(
        n_icl_examples=prompt_raw.get("n_icl_examples", 0),
        rng_seed=prompt_raw.get("rng_seed", 0),
        target_language=raw.get("language", "eng"),
        context_window=prompt_raw.get("context_window", 10),
    )
    templates = None
    if prompt_raw.get("template_path"):
        templates = PromptTemplates.from_file(path.parent / prompt_raw["template_path"])

    humaneval = None
    if "humaneval" in raw:
        humaneval = _parse_humaneval(raw["humaneval"], path.parent)

    data = raw.get("data", {})
    return DeploymentConfig(
        language=raw.get("language", "eng"),
        corpus_path=str(path.parent / data["corpus"]) if data.get("corpus") else None,
        ontology_path=str(path.parent / data["ontology"]) if data.get("ontology") else None,
        db_dir=str(path.parent / data["db_dir"]) if data.get("db_dir") else None,
        match=_parse_match(raw.get("database", {})),
        prompt=prompt,
        prompt_templates=templates,
        summary_templates=_parse_summaries(raw.get("summaries", {})),
        backends=list(raw.get("backends", [])),
        ports=dict(raw.get("ports", {"system": 8200, "humaneval": 8300})),
        orchestrator_url=raw.get("orchestrator_url", "http://127.0.0.1:8200"),
        humaneval=humaneval,
    )
