"""REST backend for human evaluation: accounts, consent, JWT auth, balanced task
assignment, dialogue relay to the orchestrator, feedback persistence, admin export."""

from __future__ import annotations

import hashlib
import random
import statistics
import time
import uuid
from dataclasses import dataclass, field

import httpx
from fastapi import Depends, FastAPI, Header, HTTPException
from pydantic import BaseModel

from .auth import TokenError, TokenSigner, hash_password, verify_password
from .questions import AnswerTypeError, QuestionnaireConfig, default_questionnaire
from .store import EvalStore

ROLE_PARTICIPANT = "participant"
ROLE_ADMIN = "administrator"

DEFAULT_CONSENT_TEXT = (
    "Your dialogues and questionnaire answers will be stored and analysed for "
    "research. Participation is voluntary and data is pseudonymized in exports."
)


@dataclass(frozen=True)
class SystemArm:
    """One blinded pipeline variant under evaluation."""

    label: str
    session: dict  # body for the orchestrator's session-creation endpoint


@dataclass
class HumanEvalConfig:
    token_secret: str
    token_ttl_hours: float = 24.0
    systems: tuple[SystemArm, ...] = ()
    dialogues_per_system: int = 2
    scenarios: tuple[str, ...] = ("Find a venue that matches your preferences and ask for details.",)
    consent_text: str = DEFAULT_CONSENT_TEXT
    assignment_seed: int = 0
    admins: tuple[tuple[str, str], ...] = ()  # (username, password) seeded at startup
    questionnaire: QuestionnaireConfig = field(default_factory=default_questionnaire)


def format_mean_std(mean: float, std: float) -> str:
    return f"{mean:.1f} ± {std:.1f}"


class RegisterBody(BaseModel):
    username: str
    password: str
    consent: bool = False


class LoginBody(BaseModel):
    username: str
    password: str


class TurnBody(BaseModel):
    text: str


class FeedbackBody(BaseModel):
    session_id: str
    question_id: str
    answer: object = None
    turn_index: int | None = None


def create_humaneval_app(
    config: HumanEvalConfig,
    orchestrator: httpx.Client,
    store: EvalStore | None = None,
) -> FastAPI:
    app = FastAPI(title="dialight human evaluation service")
    store = store if store is not None else EvalStore(None)
    signer = TokenSigner(config.token_secret, config.token_ttl_hours)
    questionnaire = config.questionnaire

    for username, password in config.admins:
        if store.find_account(username) is None:
            store.add_account(
                {
                    "user_id": uuid.uuid4().hex,
                    "username": username,
                    "password_hash": hash_password(password),
                    "role": ROLE_ADMIN,
                    "consent": True,
                    "consent_timestamp": time.time(),
                }
            )

    def authenticated(authorization: str | None = Header(default=None)) -> dict:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        try:
            return signer.verify(authorization.removeprefix("Bearer ").strip())
        except TokenError as exc:
            raise HTTPException(status_code=401, detail=str(exc))

    def require_role(role: str):
        def check(claims: dict = Depends(authenticated)) -> dict:
            if claims["role"] != role:
                raise HTTPException(status_code=403, detail=f"requires role {role!r}")
            return claims

        return check

    def pseudonym(user_id: str) -> str:
        return hashlib.sha256(f"{config.token_secret}:export:{user_id}".encode("utf-8")).hexdigest()[:12]

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/meta")
    def meta():
        return {
            "consent_text": config.consent_text,
            "dialogues_per_participant": len(config.systems) * config.dialogues_per_system,
        }

    # auth ---------------------------------------------------------------
    @app.post("/auth/register", status_code=201)
    def register(body: RegisterBody):
        if not body.consent:
            raise HTTPException(status_code=400, detail="registration requires consent")
        if not body.username.strip() or not body.password:
            raise HTTPException(status_code=422, detail="username and password must be non-empty")
        with store.lock:
            if store.find_account(body.username) is not None:
                raise HTTPException(status_code=409, detail="username already registered")
            record = store.add_account(
                {
                    "user_id": uuid.uuid4().hex,
                    "username": body.username,
                    "password_hash": hash_password(body.password),
                    "role": ROLE_PARTICIPANT,
                    "consent": True,
                    "consent_timestamp": time.time(),
                }
            )
        return {"user_id": record["user_id"], "role": record["role"]}

    @app.post("/auth/login")
    def login(body: LoginBody):
        account = store.find_account(body.username)
        # identical failure for unknown user and wrong password
        if account is None or not verify_password(body.password, account["password_hash"]):
            raise HTTPException(status_code=401, detail="invalid credentials")
        return {
            "token": signer.issue(account["user_id"], account["role"]),
            "role": account["role"],
        }

    @app.get("/questionnaire")
    def get_questionnaire(claims: dict = Depends(authenticated)):
        return questionnaire.to_dict()

    # task assignment ------------------------------------------------------
    def _plan_for(user_id: str) -> list[str]:
        plan = [arm.label for arm in config.systems for _ in range(config.dialogues_per_system)]
        random.Random(f"{config.assignment_seed}:{user_id}").shuffle(plan)
        return plan

    @app.get("/tasks/next")
    def next_task(claims: dict = Depends(require_role(ROLE_PARTICIPANT))):
        if not config.systems:
            return {"task": None, "reason": "no systems configured"}
        user_id = claims["sub"]
        with store.lock:  # compare-and-swap: quota check and insert are atomic
            done = store.assignments_for(user_id)
            plan = _plan_for(user_id)
            if len(done) >= len(plan):
                return {"task": None, "reason": "quota exhausted"}
            label = plan[len(done)]
            arm = next(a for a in config.systems if a.label == label)
            response = orchestrator.post("/v1/sessions", json=dict(arm.session, label=label))
            if response.status_code >= 400:
                raise HTTPException(status_code=502, detail=f"orchestrator refused session: {response.text}")
            session_id = response.json()["session_id"]
            scenario = config.scenarios[len(done) % len(config.scenarios)]
            record = store.add_assignment(
                {
                    "task_id": uuid.uuid4().hex,
                    "user_id": user_id,
                    "system": label,  # never exposed to the participant
                    "session_id": session_id,
                    "scenario": scenario,
                    "created": time.time(),
                }
            )
        return {
            "task": {
                "task_id": record["task_id"],
                "session_id": session_id,
                "scenario": scenario,
                "dialogue_number": len(done) + 1,
                "dialogues_total": len(plan),
            }
        }

    def _owned_assignment(session_id: str, claims: dict) -> dict:
        assignment = store.assignment_for_session(session_id)
        if assignment is None:
            raise HTTPException(status_code=404, detail="unknown session")
        if assignment["user_id"] != claims["sub"]:
            raise HTTPException(status_code=403, detail="session belongs to another participant")
        return assignment

    # dialogue relay -------------------------------------------------------
    @app.post("/sessions/{session_id}/turns")
    def relay_turn(session_id: str, body: TurnBody, claims: dict = Depends(require_role(ROLE_PARTICIPANT))):
        _owned_assignment(session_id, claims)
        response = orchestrator.post(f"/v1/sessions/{session_id}/turns", json={"text": body.text})
        if response.status_code >= 400:
            detail = response.json().get("detail", response.text) if response.content else response.text
            raise HTTPException(status_code=502 if response.status_code >= 500 else response.status_code, detail=detail)
        return response.json()

    # feedback ---------------------------------------------------------------
    @app.post("/feedback", status_code=201)
    def submit_feedback(body: FeedbackBody, claims: dict = Depends(require_role(ROLE_PARTICIPANT))):
        assignment = _owned_assignment(body.session_id, claims)
        question = questionnaire.question(body.question_id)
        if question is None:
            raise HTTPException(status_code=422, detail=f"unknown question {body.question_id!r}")
        if question.level == "utterance" and body.turn_index is None:
            raise HTTPException(status_code=422, detail="utterance-level feedback needs turn_index")
        if question.level == "dialogue" and body.turn_index is not None:
            raise HTTPException(status_code=422, detail="dialogue-level feedback must not carry turn_index")
        try:
            answer = question.validate_answer(body.answer)
        except AnswerTypeError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        record = store.add_feedback(
            {
                "user_id": claims["sub"],
                "session_id": body.session_id,
                "turn_index": body.turn_index,
                "question_id": body.question_id,
                "answer": answer,
                "system": assignment["system"],
                "timestamp": time.time(),
            }
        )
        return {"status": "stored", "question_id": record["question_id"]}

    @app.get("/feedback")
    def my_feedback(session_id: str, claims: dict = Depends(require_role(ROLE_PARTICIPANT))):
        _owned_assignment(session_id, claims)
        return {
            "records": [
                {k: r[k] for k in ("session_id", "turn_index", "question_id", "answer")}
                for r in store.feedback_records()
                if r["session_id"] == session_id and r["user_id"] == claims["sub"]
            ]
        }

    # administration ---------------------------------------------------------
    @app.get("/admin/export")
    def export(claims: dict = Depends(require_role(ROLE_ADMIN))):
        sessions = {}
        for assignment in store.assignments.records():
            response = orchestrator.get(f"/v1/sessions/{assignment['session_id']}")
            if response.status_code == 200:
                sessions[assignment["session_id"]] = response.json()
        return {
            "feedback": [
                dict(record, user_id=pseudonym(record["user_id"]))
                for record in store.feedback_records()
            ],
            "assignments": [
                dict(record, user_id=pseudonym(record["user_id"]))
                for record in store.assignments.records()
            ],
            "sessions": sessions,
            "questionnaire": questionnaire.to_dict(),
        }

    @app.get("/admin/aggregate")
    def aggregate(system: str, question: str, claims: dict = Depends(require_role(ROLE_ADMIN))):
        spec = questionnaire.question(question)
        if spec is None:
            raise HTTPException(status_code=404, detail=f"unknown question {question!r}")
        values = [
            float(r["answer"])
            for r in store.feedback_records()
            if r["system"] == system and r["question_id"] == question and isinstance(r["answer"], (int, float))
        ]
        if not values:
            return {"system": system, "question": question, "mean": None, "std": None, "n": 0, "formatted": "n/a"}
        mean = statistics.fmean(values)
        std = statistics.pstdev(values)
        return {
            "system": system,
            "question": question,
            "mean": mean,
            "std": std,
            "n": len(values),
            "formatted": format_mean_std(mean, std),
        }

    return app
