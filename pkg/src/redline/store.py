"""Plain-text persistence: users, tasks, and per-job revision event logs.

Layout under the store root:

    users.tsv        one "id<TAB>name<TAB>role<TAB>token" line per user
    tasks/<id>.task  JSON metadata line, then one sentence per line
    jobs/<id>.log    append-only event log, one checksummed line per event

Log lines are "<seq>\t<crc32 hex>\t<json payload>". Events are the header
(written at assignment), revision events in the export-format shape, and
status events. Loading a job replays its log; every stored result is
verified against the replay, so corruption surfaces with a line number.
"""

from __future__ import annotations

import json
import os
import re
import secrets
import threading
import zlib
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import exportfmt
from .errors import (
    ConflictError,
    CorruptLogError,
    NotFoundError,
    ValidationError,
)
from .exportfmt import (
    STATUS_COMPLETE,
    STATUS_INCOMPLETE,
    STATUSES,
    JobRecord,
    dumps_canonical,
    format_timestamp,
    parse_timestamp,
)
from .history import Revision, RevisionHistory, append_revision, revert
from .ops import EditOp
from .tokens import Sentence, detokenize, tokenize

ROLE_ANNOTATOR = "annotator"
ROLE_ADMIN = "administrator"
ROLES = (ROLE_ANNOTATOR, ROLE_ADMIN)

_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


@dataclass(frozen=True)
class User:
    id: str
    name: str
    role: str
    token: str


@dataclass(frozen=True)
class Task:
    id: str
    title: str
    sentences: tuple[str, ...]
    providers: tuple[str, ...]
    labels: tuple[str, ...]
    target_label: str | None


@dataclass(frozen=True)
class Job:
    id: str
    task_id: str
    sentence_index: int
    assignee: str
    status: str
    history: RevisionHistory
    original_text: str
    event_count: int = 0

    def current_sentence(self) -> Sentence:
        return self.history.current()


def _check_id(value: str, what: str) -> str:
    if not isinstance(value, str) or not _ID_RE.match(value):
        raise ValidationError(f"{what} must match [A-Za-z0-9_-]+, got {value!r}")
    return value


def _check_field(value: str, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{what} must be a non-empty string")
    if "\t" in value or "\n" in value:
        raise ValidationError(f"{what} may not contain tabs or newlines")
    return value


class Store:
    """File-backed store; one instance owns the per-job write locks."""

    def __init__(self, root: str | Path, clock: Callable[[], datetime] | None = None):
        self.root = Path(root)
        self.tasks_dir = self.root / "tasks"
        self.jobs_dir = self.root / "jobs"
        for path in (self.root, self.tasks_dir, self.jobs_dir):
            path.mkdir(parents=True, exist_ok=True)
        self.users_path = self.root / "users.tsv"
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- users ---------------------------------------------------------

    def list_users(self) -> list[User]:
        if not self.users_path.exists():
            return []
        users = []
        for line in self.users_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValidationError(f"malformed users.tsv line: {line!r}")
            users.append(User(*fields))
        return users

    def create_user(
        self,
        name: str,
        role: str = ROLE_ANNOTATOR,
        *,
        user_id: str | None = None,
        token: str | None = None,
    ) -> User:
        if role not in ROLES:
            raise ValidationError(f"role must be one of {ROLES}, got {role!r}")
        existing = {u.id for u in self.list_users()}
        if user_id is None:
            n = len(existing) + 1
            while f"u{n:02d}" in existing:
                n += 1
            user_id = f"u{n:02d}"
        _check_id(user_id, "user id")
        if user_id in existing:
            raise ConflictError(f"user {user_id!r} already exists")
        user = User(
            id=user_id,
            name=_check_field(name, "name"),
            role=role,
            token=_check_field(token or secrets.token_hex(16), "token"),
        )
        with open(self.users_path, "a", encoding="utf-8") as fh:
            fh.write(f"{user.id}\t{user.name}\t{user.role}\t{user.token}\n")
            fh.flush()
            os.fsync(fh.fileno())
        return user

    def get_user(self, user_id: str) -> User:
        for user in self.list_users():
            if user.id == user_id:
                return user
        raise NotFoundError(f"no user {user_id!r}")

    def find_user_by_token(self, token: str) -> User | None:
        for user in self.list_users():
            if user.token == token:
                return user
        return None

    # -- tasks ---------------------------------------------------------

    def _task_path(self, task_id: str) -> Path:
        return self.tasks_dir / f"{task_id}.task"

    def create_task(
        self,
        title: str,
        sentences: Sequence[str],
        *,
        providers: Sequence[str] = (),
        labels: Sequence[str] = (),
        target_label: str | None = None,
        task_id: str | None = None,
    ) -> Task:
        if task_id is None:
            n = len(list(self.tasks_dir.glob("*.task"))) + 1
            while self._task_path(f"t{n:02d}").exists():
                n += 1
            task_id = f"t{n:02d}"
        _check_id(task_id, "task id")
        if not sentences:
            raise ValidationError("a task needs at least one sentence")
        for sentence in sentences:
            _check_field(sentence, "sentence")
        if target_label is not None and target_label not in labels:
            raise ValidationError(f"target label {target_label!r} not in labels {tuple(labels)}")
        path = self._task_path(task_id)
        if path.exists():
            raise ConflictError(f"task {task_id!r} already exists")
        task = Task(
            id=task_id,
            title=_check_field(title, "title"),
            sentences=tuple(sentences),
            providers=tuple(providers),
            labels=tuple(labels),
            target_label=target_label,
        )
        meta = {
            "id": task.id,
            "title": task.title,
            "providers": list(task.providers),
            "labels": list(task.labels),
            "target_label": task.target_label,
        }
        body = dumps_canonical(meta) + "\n" + "".join(s + "\n" for s in task.sentences)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(body)
            fh.flush()
            os.fsync(fh.fileno())
        return task

    def get_task(self, task_id: str) -> Task:
        path = self._task_path(task_id)
        if not path.exists():
            raise NotFoundError(f"no task {task_id!r}")
        lines = path.read_text(encoding="utf-8").splitlines()
        meta = json.loads(lines[0])
        return Task(
            id=meta["id"],
            title=meta["title"],
            sentences=tuple(lines[1:]),
            providers=tuple(meta.get("providers") or ()),
            labels=tuple(meta.get("labels") or ()),
            target_label=meta.get("target_label"),
        )

    def list_tasks(self) -> list[Task]:
        return [self.get_task(p.stem) for p in sorted(self.tasks_dir.glob("*.task"))]

    # -- job logs ------------------------------------------------------

    def _job_path(self, job_id: str) -> Path:
        return self.jobs_dir / f"{job_id}.log"

    def _job_lock(self, job_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(job_id, threading.Lock())

    def _append_line(self, path: Path, seq: int, payload: dict) -> None:
        body = dumps_canonical(payload)
        checksum = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(f"{seq}\t{checksum:08x}\t{body}\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _read_log(self, path: Path) -> list[tuple[int, dict]]:
        """Yield (line_number, payload) pairs, verifying seq and checksum."""
        events: list[tuple[int, dict]] = []
        with open(path, encoding="utf-8") as fh:
            raw_lines = fh.read().split("\n")
        if raw_lines and raw_lines[-1] == "":
            raw_lines.pop()
        for line_no, line in enumerate(raw_lines, start=1):
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise CorruptLogError("not a seq/checksum/payload line", line_no)
            seq_text, checksum_text, body = parts
            try:
                seq = int(seq_text)
            except ValueError:
                raise CorruptLogError(f"bad sequence number {seq_text!r}", line_no) from None
            if seq != line_no - 1:
                raise CorruptLogError(f"sequence {seq} does not match position", line_no)
            actual = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
            if checksum_text != f"{actual:08x}":
                raise CorruptLogError("checksum mismatch", line_no)
            try:
                payload = json.loads(body)
            except json.JSONDecodeError as exc:
                raise CorruptLogError(f"invalid JSON ({exc.msg})", line_no) from None
            events.append((line_no, payload))
        return events

    def assign_jobs(self, task_id: str, user_ids: Sequence[str]) -> list[str]:
        """Create one job per (sentence, user); all-or-nothing on conflicts."""
        task = self.get_task(task_id)
        users = [self.get_user(uid) for uid in user_ids]
        planned: list[tuple[str, int, str]] = []
        for user in users:
            for index, _ in enumerate(task.sentences):
                job_id = f"{task.id}.{index}.{user.id}"
                if self._job_path(job_id).exists():
                    raise ConflictError(f"job {job_id!r} already exists")
                planned.append((job_id, index, user.id))
        created = []
        for job_id, index, user_id in planned:
            header = {
                "type": "header",
                "job_id": job_id,
                "task_id": task.id,
                "sentence_index": index,
                "assignee": user_id,
                "original_text": task.sentences[index],
            }
            self._append_line(self._job_path(job_id), 0, header)
            created.append(job_id)
        return created

    def load_job(self, job_id: str) -> Job:
        path = self._job_path(job_id)
        if not path.exists():
            raise NotFoundError(f"no job {job_id!r}")
        events = self._read_log(path)
        if not events:
            raise CorruptLogError("log file is empty", 1)
        first_line, header = events[0]
        if header.get("type") != "header":
            raise CorruptLogError("first event is not a header", first_line)
        history = RevisionHistory(tokenize(header["original_text"]))
        status = STATUS_INCOMPLETE
        for line_no, payload in events[1:]:
            kind = payload.get("type")
            if kind == "revision":
                try:
                    rev = exportfmt.revision_from_record(payload)
                except Exception as exc:
                    raise CorruptLogError(str(exc), line_no) from None
                if rev.index != len(history.revisions):
                    raise CorruptLogError(
                        f"revision index {rev.index} out of order", line_no
                    )
                if rev.op.kind == "revert":
                    history = revert(
                        history, rev.op.target, rev.feedback, timestamp=rev.timestamp
                    )
                else:
                    history = append_revision(
                        history,
                        rev.op,
                        rev.feedback,
                        timestamp=rev.timestamp,
                        derived_script=rev.derived_script,
                    )
                replayed = history.revisions[-1].result
                if detokenize(replayed) != payload.get("result_text"):
                    raise CorruptLogError("stored result does not match replay", line_no)
            elif kind == "status":
                if payload.get("status") not in STATUSES:
                    raise CorruptLogError(f"unknown status {payload.get('status')!r}", line_no)
                status = payload["status"]
            else:
                raise CorruptLogError(f"unknown event type {kind!r}", line_no)
        return Job(
            id=job_id,
            task_id=header.get("task_id", ""),
            sentence_index=int(header.get("sentence_index", 0)),
            assignee=header.get("assignee", ""),
            status=status,
            history=history,
            original_text=header["original_text"],
            event_count=len(events),
        )

    def list_jobs(self, *, user_id: str | None = None, task_id: str | None = None) -> list[Job]:
        jobs = []
        for path in sorted(self.jobs_dir.glob("*.log")):
            job = self.load_job(path.stem)
            if user_id is not None and job.assignee != user_id:
                continue
            if task_id is not None and job.task_id != task_id:
                continue
            jobs.append(job)
        return jobs

    def append_op(
        self,
        job_id: str,
        op: EditOp,
        *,
        expected_parent: int | None = None,
        feedback_fn: Callable[[Sentence, Sentence], dict] | None = None,
        feedback: dict | None = None,
        timestamp: datetime | None = None,
        derived_script: tuple[EditOp, ...] | None = None,
    ) -> Revision:
        """Validate, apply and durably append one edit op.

        expected_parent implements optimistic concurrency: it must equal the
        job's last revision index or the append fails with ConflictError.
        feedback_fn, when given, is called with (original, new_sentence)
        after the op is applied but before anything is written.
        """
        with self._job_lock(job_id):
            job = self.load_job(job_id)
            if expected_parent is not None and expected_parent != job.history.last_index():
                raise ConflictError(
                    f"stale parent revision index {expected_parent}; "
                    f"current is {job.history.last_index()}"
                )
            new_history = append_revision(
                job.history,
                op,
                timestamp=timestamp or self._clock(),
                derived_script=derived_script,
            )
            revision = new_history.revisions[-1]
            if feedback_fn is not None:
                feedback = feedback_fn(job.history.original, revision.result)
            if feedback:
                revision = Revision(
                    index=revision.index,
                    op=revision.op,
                    result=revision.result,
                    timestamp=revision.timestamp,
                    feedback=dict(feedback),
                    derived_script=revision.derived_script,
                )
            self._append_line(
                self._job_path(job_id), job.event_count, exportfmt.revision_record(revision)
            )
            return revision

    def append_revert(
        self,
        job_id: str,
        target_index: int,
        *,
        expected_parent: int | None = None,
        feedback_fn: Callable[[Sentence, Sentence], dict] | None = None,
        feedback: dict | None = None,
        timestamp: datetime | None = None,
    ) -> Revision:
        with self._job_lock(job_id):
            job = self.load_job(job_id)
            if expected_parent is not None and expected_parent != job.history.last_index():
                raise ConflictError(
                    f"stale parent revision index {expected_parent}; "
                    f"current is {job.history.last_index()}"
                )
            new_history = revert(
                job.history, target_index, timestamp=timestamp or self._clock()
            )
            revision = new_history.revisions[-1]
            if feedback_fn is not None:
                feedback = feedback_fn(job.history.original, revision.result)
            if feedback:
                revision = Revision(
                    index=revision.index,
                    op=revision.op,
                    result=revision.result,
                    timestamp=revision.timestamp,
                    feedback=dict(feedback),
                )
            self._append_line(
                self._job_path(job_id), job.event_count, exportfmt.revision_record(revision)
            )
            return revision

    def set_status(self, job_id: str, status: str, *, timestamp: datetime | None = None) -> str:
        if status not in STATUSES:
            raise ValidationError(f"status must be one of {STATUSES}, got {status!r}")
        with self._job_lock(job_id):
            job = self.load_job(job_id)
            if job.status == status:
                return status  # idempotent
            event = {
                "type": "status",
                "status": status,
                "timestamp": format_timestamp(timestamp or self._clock()),
            }
            self._append_line(self._job_path(job_id), job.event_count, event)
            return status

    # -- export / import ------------------------------------------------

    def _job_record(self, job: Job) -> JobRecord:
        return JobRecord(
            job_id=job.id,
            task_id=job.task_id,
            sentence_index=job.sentence_index,
            assignee=job.assignee,
            status=job.status,
            original_text=job.original_text,
            revisions=list(job.history.revisions),
        )

    def export_histories(
        self, *, user_id: str | None = None, task_id: str | None = None
    ) -> str:
        """Serialize matching jobs (sorted by id) to the export format."""
        jobs = self.list_jobs(user_id=user_id, task_id=task_id)
        return exportfmt.write_export(self._job_record(job) for job in jobs)

    def import_histories(self, lines: Iterable[str]) -> list[str]:
        """Recreate job logs from an export stream; timestamps are preserved."""
        imported = []
        for record in exportfmt.parse_export(lines):
            path = self._job_path(_check_id(record.job_id, "job id"))
            if path.exists():
                raise ConflictError(f"job {record.job_id!r} already exists")
            header = {
                "type": "header",
                "job_id": record.job_id,
                "task_id": record.task_id,
                "sentence_index": record.sentence_index,
                "assignee": record.assignee,
                "original_text": record.original_text,
            }
            self._append_line(path, 0, header)
            seq = 1
            for rev in record.revisions:
                self._append_line(path, seq, exportfmt.revision_record(rev))
                seq += 1
            if record.status != STATUS_INCOMPLETE:
                event = {
                    "type": "status",
                    "status": record.status,
                    "timestamp": format_timestamp(self._clock()),
                }
                self._append_line(path, seq, event)
            imported.append(record.job_id)
        return imported
