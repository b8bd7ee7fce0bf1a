"""The model connector: registers stateless model backends, routes inference
requests over HTTP, and load-balances round-robin across instances."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import httpx

from .model import Utterance
from .prompts import PromptConfig, PromptTemplates, build_dst_prompt, build_rg_prompt

TASKS = ("dst", "rg")
MODES = ("structured", "prompted")

DEFAULT_TIMEOUT = 120.0  # LLM backends are slow; see deployment docs


class GatewayError(RuntimeError):
    pass


class RegistrationError(GatewayError):
    pass


class BackendConflictError(GatewayError):
    pass


class UnknownBackendError(GatewayError):
    pass


class BackendUnavailableError(GatewayError):
    pass


class GatewayTimeoutError(GatewayError):
    def __init__(self, message: str, instance: str):
        super().__init__(message)
        self.instance = instance


@dataclass(frozen=True)
class BackendDescriptor:
    id: str
    task: str
    mode: str
    instances: tuple[str, ...]

    def __post_init__(self):
        if self.task not in TASKS:
            raise GatewayError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.mode not in MODES:
            raise GatewayError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.instances:
            raise GatewayError(f"backend {self.id!r} needs at least one instance")


@dataclass(frozen=True)
class InferenceRequest:
    backend_id: str
    session_id: str
    history: tuple[Utterance, ...] = ()
    db_summary: str | None = None
    language: str | None = None
    dialogue_id: str | None = None
    turn_index: int | None = None
    request_id: str = ""


@dataclass(frozen=True)
class InferenceResponse:
    output: str
    latency: float
    instance: str
    request_id: str


@dataclass
class PromptFactory:
    """Builds task prompts for `prompted` backends from structured payload fields."""

    ontology: object
    config: PromptConfig = field(default_factory=PromptConfig)
    placeholders: list[str] = field(default_factory=list)
    templates: PromptTemplates | None = None
    examples: list = field(default_factory=list)

    def build(self, task: str, history, db_summary: str | None, language: str | None) -> str:
        config = self.config
        if language and language != config.target_language:
            config = PromptConfig(
                n_icl_examples=config.n_icl_examples,
                rng_seed=config.rng_seed,
                target_language=language,
                context_window=config.context_window,
            )
        if task == "dst":
            return build_dst_prompt(self.ontology, self.examples, history, config, self.templates)
        return build_rg_prompt(
            self.ontology, self.examples, history, db_summary or "", config, self.placeholders, self.templates
        )


class _BackendState:
    def __init__(self, descriptor: BackendDescriptor):
        self.descriptor = descriptor
        self.next_instance = 0
        self.lock = threading.Lock()

    def take_instances(self) -> list[str]:
        """Instances starting at the round-robin cursor, advancing it by one."""
        with self.lock:
            start = self.next_instance
            self.next_instance = (self.next_instance + 1) % len(self.descriptor.instances)
        n = len(self.descriptor.instances)
        return [self.descriptor.instances[(start + i) % n] for i in range(n)]


class ModelGateway:
    """Routes inference requests to registered backends.

    The gateway itself holds no session state: responses depend only on the
    request payload, and one backend instance may serve many systems and
    dialogue sessions concurrently. Calls for a single session are expected
    to be issued in order by the caller (the orchestrator serializes turns
    per session), so per-session response ordering follows request ordering.
    """

    def __init__(
        self,
        prompt_factory: PromptFactory | None = None,
        client: httpx.Client | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        health_check: bool = True,
    ):
        self._backends: dict[str, _BackendState] = {}
        self._registry_lock = threading.Lock()
        self._prompt_factory = prompt_factory
        self._client = client or httpx.Client()
        self._timeout = timeout
        self._health_check = health_check

    def register_backend(self, descriptor: BackendDescriptor) -> str:
        with self._registry_lock:
            if descriptor.id in self._backends:
                raise BackendConflictError(f"backend {descriptor.id!r} is already registered")
        if self._health_check:
            for instance in descriptor.instances:
                try:
                    response = self._client.get(f"{instance}/healthz", timeout=5.0)
                    response.raise_for_status()
                except httpx.HTTPError as exc:
                    raise RegistrationError(f"instance {instance!r} failed its health probe: {exc}") from exc
        with self._registry_lock:
            if descriptor.id in self._backends:
                raise BackendConflictError(f"backend {descriptor.id!r} is already registered")
            self._backends[descriptor.id] = _BackendState(descriptor)
        return descriptor.id

    def backends(self) -> list[BackendDescriptor]:
        with self._registry_lock:
            return [state.descriptor for state in self._backends.values()]

    def has_backend(self, backend_id: str) -> bool:
        with self._registry_lock:
            return backend_id in self._backends

    def describe(self, backend_id: str) -> BackendDescriptor:
        with self._registry_lock:
            state = self._backends.get(backend_id)
        if state is None:
            raise UnknownBackendError(f"backend {backend_id!r} is not registered")
        return state.descriptor

    def route(self, request: InferenceRequest) -> InferenceResponse:
        """Forward to one healthy instance, chosen round-robin.

        Connection failures fall through to the next instance; a timeout is
        reported as such with the failing instance id.
        """
        with self._registry_lock:
            state = self._backends.get(request.backend_id)
        if state is None:
            raise UnknownBackendError(f"backend {request.backend_id!r} is not registered")
        descriptor = state.descriptor
        request_id = request.request_id or uuid.uuid4().hex

        payload: dict = {
            "history": [{"speaker": u.speaker, "text": u.text} for u in request.history],
        }
        if request.db_summary is not None:
            payload["db_summary"] = request.db_summary
        if request.language is not None:
            payload["language"] = request.language
        if request.dialogue_id is not None:
            payload["dialogue_id"] = request.dialogue_id
        if request.turn_index is not None:
            payload["turn_index"] = request.turn_index
        if descriptor.mode == "prompted":
            if self._prompt_factory is None:
                raise GatewayError(f"backend {descriptor.id!r} is prompted but no prompt factory is configured")
            payload["prompt"] = self._prompt_factory.build(
                descriptor.task, request.history, request.db_summary, request.language
            )

        body = {
            "task": descriptor.task,
            "mode": descriptor.mode,
            "payload": payload,
            "request_id": request_id,
            "session_id": request.session_id,
        }

        last_error: Exception | None = None
        for instance in state.take_instances():
            started = time.perf_counter()
            try:
                response = self._client.post(f"{instance}/v1/infer", json=body, timeout=self._timeout)
            except httpx.TimeoutException as exc:
                raise GatewayTimeoutError(
                    f"backend {descriptor.id!r} instance {instance!r} timed out after {self._timeout}s",
                    instance=instance,
                ) from exc
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = GatewayError(f"instance {instance!r} returned {response.status_code}")
                continue
            if response.status_code >= 400:
                raise GatewayError(
                    f"instance {instance!r} rejected the request: {response.status_code} {response.text}"
                )
            data = response.json()
            return InferenceResponse(
                output=data["output"],
                latency=time.perf_counter() - started,
                instance=data.get("instance", instance),
                request_id=data.get("request_id", request_id),
            )
        raise BackendUnavailableError(
            f"no healthy instance for backend {descriptor.id!r}: {last_error}"
        )
