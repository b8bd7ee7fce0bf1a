"""Questionnaire configuration: question kinds, levels, and answer validation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import yaml

LEVELS = ("utterance", "dialogue")
KINDS = ("likert5", "binary", "freetext")

# Dialogue-level quality dimensions of the default instrument.
DIALOGUE_DIMENSIONS = (
    ("coherent", "The dialogue stayed coherent from start to finish."),
    ("consistent", "The system provided consistent information."),
    ("understands_user", "The system understood what I asked for."),
    ("informative", "The system's responses were informative."),
    ("diverse", "The system's responses were diverse, not repetitive."),
    ("likeable", "The system displayed a likeable personality."),
)


class QuestionnaireError(ValueError):
    pass


class AnswerTypeError(ValueError):
    """Answer does not match the question kind."""


@dataclass(frozen=True)
class Question:
    id: str
    level: str
    kind: str
    prompt: dict[str, str]  # language tag -> text
    required: bool = True

    def __post_init__(self):
        if self.level not in LEVELS:
            raise QuestionnaireError(f"question {self.id!r}: level must be one of {LEVELS}")
        if self.kind not in KINDS:
            raise QuestionnaireError(f"question {self.id!r}: kind must be one of {KINDS}")
        if not self.prompt:
            raise QuestionnaireError(f"question {self.id!r}: prompt text missing")

    def validate_answer(self, answer):
        """Normalized answer, or AnswerTypeError."""
        if self.kind == "likert5":
            if isinstance(answer, bool) or not isinstance(answer, int) or not 1 <= answer <= 5:
                raise AnswerTypeError(f"question {self.id!r} expects an integer in 1..5, got {answer!r}")
            return answer
        if self.kind == "binary":
            if not isinstance(answer, bool):
                raise AnswerTypeError(f"question {self.id!r} expects true/false, got {answer!r}")
            return answer
        if not isinstance(answer, str):
            raise AnswerTypeError(f"question {self.id!r} expects text, got {answer!r}")
        return answer


@dataclass(frozen=True)
class QuestionnaireConfig:
    questions: tuple[Question, ...]

    def __post_init__(self):
        ids = [q.id for q in self.questions]
        if len(ids) != len(set(ids)):
            raise QuestionnaireError("question ids must be unique")
        if not any(q.level == "dialogue" for q in self.questions):
            raise QuestionnaireError("at least one dialogue-level question is required")

    def question(self, question_id: str) -> Question | None:
        for question in self.questions:
            if question.id == question_id:
                return question
        return None

    def at_level(self, level: str) -> list[Question]:
        return [q for q in self.questions if q.level == level]

    def to_dict(self) -> dict:
        return {
            "questions": [
                {
                    "id": q.id,
                    "level": q.level,
                    "kind": q.kind,
                    "prompt": dict(q.prompt),
                    "required": q.required,
                }
                for q in self.questions
            ]
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "QuestionnaireConfig":
        return cls(
            questions=tuple(
                Question(
                    id=q["id"],
                    level=q["level"],
                    kind=q["kind"],
                    prompt=dict(q["prompt"]),
                    required=q.get("required", True),
                )
                for q in raw["questions"]
            )
        )

    @classmethod
    def from_file(cls, path) -> "QuestionnaireConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        raw = yaml.safe_load(text) if path.suffix in (".yaml", ".yml") else json.loads(text)
        return cls.from_dict(raw)


def default_questionnaire() -> QuestionnaireConfig:
    """The stock instrument: six binary dialogue dimensions, an overall 1-5
    score, and a per-utterance 1-5 quality score."""
    questions = [
        Question(id=key, level="dialogue", kind="binary", prompt={"eng": text})
        for key, text in DIALOGUE_DIMENSIONS
    ]
    questions.append(
        Question(
            id="overall",
            level="dialogue",
            kind="likert5",
            prompt={"eng": "Overall, how would you rate this dialogue? (1 = very poor, 5 = excellent)"},
        )
    )
    questions.append(
        Question(
            id="utterance_quality",
            level="utterance",
            kind="likert5",
            prompt={"eng": "How good was this system response? (1 = very poor, 5 = excellent)"},
        )
    )
    questions.append(
        Question(
            id="comments",
            level="dialogue",
            kind="freetext",
            prompt={"eng": "Any other comments? (optional)"},
            required=False,
        )
    )
    return QuestionnaireConfig(questions=tuple(questions))
