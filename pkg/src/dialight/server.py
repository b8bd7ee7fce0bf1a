"""HTTP surface of the system service: session endpoints plus gateway administration."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .gateway import (
    BackendConflictError,
    BackendDescriptor,
    GatewayError,
    GatewayTimeoutError,
    ModelGateway,
    RegistrationError,
)
from .orchestrator import (
    DialogueEngine,
    OrchestratorError,
    SessionConfig,
    TurnError,
    UnknownSessionError,
)


class BackendBody(BaseModel):
    id: str
    task: str
    mode: str = "structured"
    instances: list[str] = Field(min_length=1)


class SessionBody(BaseModel):
    dst_backend: str
    rg_backend: str
    language: str = "eng"
    threshold: int = 2
    context_window: int = 10
    state_format: str = "auto"
    reference_id: str | None = None
    label: str = ""


class TurnBody(BaseModel):
    text: str


def create_system_app(engine: DialogueEngine) -> FastAPI:
    app = FastAPI(title="dialight system service")
    gateway: ModelGateway = engine.gateway

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/backends", status_code=201)
    def register_backend(body: BackendBody):
        descriptor = BackendDescriptor(
            id=body.id, task=body.task, mode=body.mode, instances=tuple(body.instances)
        )
        try:
            gateway.register_backend(descriptor)
        except BackendConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except RegistrationError as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return {"id": descriptor.id}

    @app.get("/v1/backends")
    def list_backends():
        return {
            "backends": [
                {"id": d.id, "task": d.task, "mode": d.mode, "instances": list(d.instances)}
                for d in gateway.backends()
            ]
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: SessionBody):
        try:
            config = SessionConfig.from_dict(body.model_dump())
            session_id = engine.create_session(config)
        except (OrchestratorError, GatewayError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"session_id": session_id}

    @app.post("/v1/sessions/{session_id}/turns")
    def process_turn(session_id: str, body: TurnBody):
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="text must be non-empty")
        try:
            trace = engine.process_user_turn(session_id, body.text)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except TurnError as exc:
            cause = exc.__cause__
            status = 504 if isinstance(cause, GatewayTimeoutError) else 502
            raise HTTPException(status_code=status, detail=str(exc))
        return trace.to_dict()

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return engine.session(session_id).snapshot()
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    return app
