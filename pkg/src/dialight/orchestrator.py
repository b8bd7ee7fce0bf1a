"""Per-turn pipeline execution: DST inference, state parse, database query,
result summary, RG inference, delex parse, lexicalization. Manages live sessions."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import asdict, dataclass, field

from .codec import ParseOutcome, parse_linearized_state, parse_structured_state
from .database import DomainDatabase, MatchConfig, query_domain
from .gateway import GatewayError, InferenceRequest, ModelGateway
from .model import DelexResponse, DialogueState, Ontology, Utterance
from .prompts import PromptConfig
from .realization import (
    DEFAULT_SUMMARY_TEMPLATES,
    SummaryTemplate,
    lexicalize,
    pick_active_domain,
    summarize_results,
)

STATE_FORMATS = ("auto", "linear", "json")


class OrchestratorError(RuntimeError):
    pass


class UnknownSessionError(OrchestratorError):
    pass


class TurnError(OrchestratorError):
    """A pipeline stage failed; the session is unchanged."""


@dataclass(frozen=True)
class SessionConfig:
    dst_backend: str
    rg_backend: str
    language: str = "eng"
    threshold: int = 2
    prompt: PromptConfig = field(default_factory=PromptConfig)
    state_format: str = "auto"
    reference_id: str | None = None  # keys replay backends; ignored by real models
    label: str = ""

    def __post_init__(self):
        if self.state_format not in STATE_FORMATS:
            raise OrchestratorError(f"state_format must be one of {STATE_FORMATS}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionConfig":
        prompt = PromptConfig(
            n_icl_examples=raw.get("n_icl_examples", 0),
            rng_seed=raw.get("rng_seed", 0),
            target_language=raw.get("language", "eng"),
            context_window=raw.get("context_window", 10),
        )
        return cls(
            dst_backend=raw["dst_backend"],
            rg_backend=raw["rg_backend"],
            language=raw.get("language", "eng"),
            threshold=raw.get("threshold", 2),
            prompt=prompt,
            state_format=raw.get("state_format", "auto"),
            reference_id=raw.get("reference_id"),
            label=raw.get("label", ""),
        )


@dataclass(frozen=True)
class TurnTrace:
    """Everything one pipeline pass produced, one field per stage."""

    turn_index: int
    user_text: str
    dst_output: str
    parse: ParseOutcome
    result_counts: dict[str, int]
    db_summary: str
    rg_output: str
    delex: DelexResponse
    response_text: str
    active_domain: str | None
    domain_switched: bool
    latencies: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "turn_index": self.turn_index,
            "user_text": self.user_text,
            "dst_output": self.dst_output,
            "state": {d: dict(slots) for d, slots in _by_domain(self.parse.state).items()},
            "compliant": self.parse.compliant,
            "diagnostics": list(self.parse.diagnostics),
            "result_counts": dict(self.result_counts),
            "db_summary": self.db_summary,
            "rg_output": self.rg_output,
            "delex_text": self.delex.text,
            "placeholders": [asdict(p) | {"token": p.token} for p in self.delex.placeholders],
            "response_text": self.response_text,
            "active_domain": self.active_domain,
            "domain_switched": self.domain_switched,
            "latencies": dict(self.latencies),
        }


def _by_domain(state: DialogueState) -> dict[str, dict[str, str]]:
    return state.by_domain()


@dataclass
class Session:
    id: str
    config: SessionConfig
    history: list[Utterance] = field(default_factory=list)
    state: DialogueState = field(default_factory=DialogueState)
    traces: list[TurnTrace] = field(default_factory=list)
    active_domain: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> dict:
        return {
            "session_id": self.id,
            "label": self.config.label,
            "language": self.config.language,
            "history": [{"speaker": u.speaker, "text": u.text} for u in self.history],
            "state": self.state.by_domain(),
            "turns": [t.to_dict() for t in self.traces],
        }


class DialogueEngine:
    """Owns live sessions and drives the full pipeline once per user turn."""

    def __init__(
        self,
        gateway: ModelGateway,
        ontology: Ontology,
        databases: dict[str, DomainDatabase],
        match_config: MatchConfig | None = None,
        summary_templates: dict[str, SummaryTemplate] | None = None,
    ):
        self.gateway = gateway
        self.ontology = ontology
        self.databases = databases
        self.match_config = match_config or MatchConfig()
        self.summary_templates = summary_templates if summary_templates is not None else dict(DEFAULT_SUMMARY_TEMPLATES)
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()

    def create_session(self, config: SessionConfig) -> str:
        for backend_id in (config.dst_backend, config.rg_backend):
            if not self.gateway.has_backend(backend_id):
                raise OrchestratorError(f"backend {backend_id!r} is not registered")
        session_id = uuid.uuid4().hex
        with self._sessions_lock:
            self._sessions[session_id] = Session(id=session_id, config=config)
        return session_id

    def session(self, session_id: str) -> Session:
        with self._sessions_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"session {session_id!r} does not exist")
        return session

    def _parse_state(self, text: str, state_format: str) -> ParseOutcome:
        if state_format == "linear":
            return parse_linearized_state(text, self.ontology)
        if state_format == "json":
            return parse_structured_state(text, self.ontology)
        linear = parse_linearized_state(text, self.ontology)
        if linear.compliant:
            return linear
        structured = parse_structured_state(text, self.ontology)
        return structured if structured.compliant else linear

    def query_all(self, state: DialogueState, threshold: int):
        """Retrieve entries independently for every state domain with a database."""
        entries = {}
        counts = {}
        for domain in state.domains():
            db = self.databases.get(domain)
            if db is None or not self.ontology.has_domain(domain):
                continue
            found = query_domain(db, state, domain, self.ontology, threshold, self.match_config)
            entries[domain] = found
            counts[domain] = len(found)
        return entries, counts

    def process_user_turn(self, session_id: str, user_text: str) -> TurnTrace:
        """Run the pipeline for one user utterance; commits only on full success."""
        if not user_text.strip():
            raise TurnError("user text must be non-empty")
        session = self.session(session_id)
        with session.lock:
            config = session.config
            turn_index = len(session.traces)
            user = Utterance("user", user_text, config.language)
            pending_history = [*session.history, user]
            window = pending_history[-config.prompt.context_window:]
            reference = config.reference_id or session.id
            latencies: dict[str, float] = {}
            started = time.perf_counter()

            try:
                dst = self.gateway.route(
                    InferenceRequest(
                        backend_id=config.dst_backend,
                        session_id=session.id,
                        history=tuple(window),
                        language=config.language,
                        dialogue_id=reference,
                        turn_index=turn_index,
                    )
                )
            except GatewayError as exc:
                raise TurnError(f"DST inference failed: {exc}") from exc
            latencies["dst"] = dst.latency

            outcome = self._parse_state(dst.output, config.state_format)
            if not outcome.compliant and not outcome.state:
                new_state = session.state  # carry the previous state forward
            else:
                new_state = session.state.merge(outcome.state)

            entries, counts = self.query_all(new_state, config.threshold)
            db_summary = summarize_results(counts, config.language, self.summary_templates)

            try:
                rg = self.gateway.route(
                    InferenceRequest(
                        backend_id=config.rg_backend,
                        session_id=session.id,
                        history=tuple(window),
                        db_summary=db_summary,
                        language=config.language,
                        dialogue_id=reference,
                        turn_index=turn_index,
                    )
                )
            except GatewayError as exc:
                raise TurnError(f"RG inference failed: {exc}") from exc
            latencies["rg"] = rg.latency

            delex = DelexResponse.from_text(rg.output)
            changed = _changed_domains(session.state, new_state)
            active = pick_active_domain(changed, entries, fallback=session.active_domain)
            response_text = lexicalize(delex, new_state, entries, active, self.match_config)
            system = Utterance("system", response_text if response_text.strip() else "(empty)", config.language)
            latencies["total"] = time.perf_counter() - started

            trace = TurnTrace(
                turn_index=turn_index,
                user_text=user_text,
                dst_output=dst.output,
                parse=outcome,
                result_counts=counts,
                db_summary=db_summary,
                rg_output=rg.output,
                delex=delex,
                response_text=response_text,
                active_domain=active,
                domain_switched=session.active_domain is not None and active != session.active_domain,
                latencies=latencies,
            )

            # commit
            session.history.append(user)
            session.history.append(system)
            session.state = new_state
            session.active_domain = active
            session.traces.append(trace)
            return trace


def _changed_domains(before: DialogueState, after: DialogueState) -> set[str]:
    before_map = before.by_domain()
    after_map = after.by_domain()
    return {
        d
        for d in set(before_map) | set(after_map)
        if before_map.get(d) != after_map.get(d)
    }


def rebuild_state(traces: list[TurnTrace]) -> DialogueState:
    """Re-derive the accumulated state from a turn log (overwrite-merge, carry-forward)."""
    state = DialogueState()
    for trace in traces:
        if not trace.parse.compliant and not trace.parse.state:
            continue
        state = state.merge(trace.parse.state)
    return state
