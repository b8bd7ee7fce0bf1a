"""dialight: a multilingual task-oriented dialogue pipeline, evaluation harness,
and human-evaluation backend built around stateless model services."""

from .codec import (
    CodecError,
    ParseOutcome,
    linearize_state,
    parse_linearized_state,
    parse_structured_state,
)
from .corpus import CorpusFormatError, load_corpus, load_dataset, load_ontology
from .database import (
    DatabaseError,
    DbEntry,
    DomainDatabase,
    MatchConfig,
    UnknownDomainError,
    levenshtein,
    load_databases,
    load_domain_database,
    query_domain,
)
from .evaluation import (
    CoverageError,
    DialogueRun,
    EvalConfig,
    EvalReport,
    evaluate_run,
    inform_success,
    render_report,
)
from .gateway import (
    BackendDescriptor,
    GatewayError,
    InferenceRequest,
    InferenceResponse,
    ModelGateway,
    PromptFactory,
)
from .metrics import (
    corpus_bleu,
    joint_goal_accuracy,
    meteor,
    rouge_l,
    slot_prf,
    tokenize,
)
from .model import (
    Corpus,
    DelexResponse,
    Dialogue,
    DialogueState,
    DomainGoal,
    Goal,
    Ontology,
    Placeholder,
    SlotSpec,
    Turn,
    Utterance,
    Violation,
    extract_placeholders,
    validate_state,
)
from .orchestrator import DialogueEngine, SessionConfig, TurnTrace
from .prompts import (
    IclExample,
    PromptConfig,
    PromptTemplates,
    build_dst_prompt,
    build_rg_prompt,
    select_icl_examples,
)
from .realization import (
    SummaryTemplate,
    lexicalize,
    pick_active_domain,
    placeholder_inventory,
    summarize_results,
)
from .replay import ReplayScript, ReplayServer, replay_lookup

__version__ = "0.1.0"
