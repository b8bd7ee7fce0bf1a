from .auth import TokenError, TokenSigner, hash_password, verify_password
from .questions import (
    AnswerTypeError,
    Question,
    QuestionnaireConfig,
    QuestionnaireError,
    default_questionnaire,
)
from .service import (
    HumanEvalConfig,
    SystemArm,
    create_humaneval_app,
    format_mean_std,
)
from .store import AppendLog, EvalStore

__all__ = [
    "AnswerTypeError",
    "AppendLog",
    "EvalStore",
    "HumanEvalConfig",
    "Question",
    "QuestionnaireConfig",
    "QuestionnaireError",
    "SystemArm",
    "TokenError",
    "TokenSigner",
    "create_humaneval_app",
    "default_questionnaire",
    "format_mean_std",
    "hash_password",
    "verify_password",
]
