"""File-backed persistence: append-only JSONL logs with last-write-wins keyed views.

Keeps the one-click deployment free of external database servers while
guaranteeing that every acknowledged record survives a process restart.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path


class AppendLog:
    """A durable append-only log of JSON records. In-memory when path is None."""

    def __init__(self, path: str | os.PathLike | None):
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._records: list[dict] = []
        if self._path is not None and self._path.exists():
            with self._path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        self._records.append(json.loads(line))
        elif self._path is not None:
            self._path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> dict:
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with self._lock:
            if self._path is not None:
                with self._path.open("a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()
                    os.fsync(handle.fileno())
            self._records.append(record)
        return record

    def records(self) -> list[dict]:
        with self._lock:
            return list(self._records)


class EvalStore:
    """All persisted state of the human-evaluation service."""

    def __init__(self, directory: str | os.PathLike | None = None):
        base = Path(directory) if directory is not None else None
        self.accounts = AppendLog(base / "accounts.jsonl" if base else None)
        self.feedback = AppendLog(base / "feedback.jsonl" if base else None)
        self.assignments = AppendLog(base / "assignments.jsonl" if base else None)
        self.lock = threading.Lock()  # guards cross-record invariants (quota checks)

    # accounts ---------------------------------------------------------
    def find_account(self, username: str) -> dict | None:
        found = None
        for record in self.accounts.records():
            if record["username"] == username:
                found = record
        return found

    def add_account(self, record: dict) -> dict:
        return self.accounts.append(record)

    # feedback ---------------------------------------------------------
    @staticmethod
    def feedback_key(record: dict) -> tuple:
        return (
            record["user_id"],
            record["session_id"],
            record.get("turn_index"),
            record["question_id"],
        )

    def add_feedback(self, record: dict) -> dict:
        return self.feedback.append(record)

    def feedback_records(self) -> list[dict]:
        """Last-write-wins view over (user, session, turn, question)."""
        latest: dict[tuple, dict] = {}
        for record in self.feedback.records():
            latest[self.feedback_key(record)] = record
        return list(latest.values())

    # assignments ------------------------------------------------------
    def add_assignment(self, record: dict) -> dict:
        return self.assignments.append(record)

    def assignments_for(self, user_id: str) -> list[dict]:
        return [r for r in self.assignments.records() if r["user_id"] == user_id]

    def assignment_for_session(self, session_id: str) -> dict | None:
        for record in self.assignments.records():
            if record["session_id"] == session_id:
                return record
        return None
