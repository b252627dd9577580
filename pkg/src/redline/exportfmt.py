"""The revision-history export format.

One JSON record per line. A header record opens each job block:

    {"type": "header", "job_id": ..., "task_id": ..., "sentence_index": ...,
     "assignee": ..., "status": ..., "original_text": ...}

followed by one revision record per revision:

    {"type": "revision", "index": ..., "op": {...}, "result_text": ...,
     "timestamp": "<RFC-3339>", "feedback": {...}[, "derived_script": [...]]}

Writers emit canonical JSON (sorted keys, compact separators) so identical
content always serializes to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable

from .errors import FormatError, InvalidOpError
from .history import Revision, RevisionHistory
from .ops import op_from_dict
from .tokens import Sentence, tokenize

STATUS_INCOMPLETE = "incomplete"
STATUS_COMPLETE = "complete"
STATUSES = (STATUS_INCOMPLETE, STATUS_COMPLETE)


def dumps_canonical(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def format_timestamp(ts: datetime) -> str:
    """RFC-3339 with a Z suffix; naive datetimes are taken as UTC."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_timestamp(value: str) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError) as exc:
        raise FormatError(f"bad timestamp {value!r}: {exc}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def split_result_text(text: str) -> Sentence:
    """Inverse of detokenize: split on single spaces, empty text -> ()."""
    return tuple(text.split(" ")) if text else ()


@dataclass
class JobRecord:
    """One exported job: identity, status, original text and revisions."""

    job_id: str
    task_id: str
    sentence_index: int
    assignee: str
    status: str
    original_text: str
    revisions: list[Revision] = field(default_factory=list)

    def original_sentence(self) -> Sentence:
        return tokenize(self.original_text)

    def history(self) -> RevisionHistory:
        return RevisionHistory(self.original_sentence(), tuple(self.revisions))

    def final_sentence(self) -> Sentence:
        return self.revisions[-1].result if self.revisions else self.original_sentence()


def header_record(job: JobRecord) -> dict:
    return {
        "type": "header",
        "job_id": job.job_id,
        "task_id": job.task_id,
        "sentence_index": job.sentence_index,
        "assignee": job.assignee,
        "status": job.status,
        "original_text": job.original_text,
    }


def revision_record(rev: Revision) -> dict:
    record = {
        "type": "revision",
        "index": rev.index,
        "op": rev.op.to_dict(),
        "result_text": " ".join(rev.result),
        "timestamp": format_timestamp(rev.timestamp),
        "feedback": dict(rev.feedback),
    }
    if rev.derived_script is not None:
        record["derived_script"] = [op.to_dict() for op in rev.derived_script]
    return record


def revision_from_record(record: dict, line_no: int = 0) -> Revision:
    where = f"line {line_no}: " if line_no else ""
    try:
        op = op_from_dict(record["op"])
        derived = record.get("derived_script")
        return Revision(
            index=int(record["index"]),
            op=op,
            result=split_result_text(record["result_text"]),
            timestamp=parse_timestamp(record["timestamp"]),
            feedback=dict(record.get("feedback") or {}),
            derived_script=tuple(op_from_dict(d) for d in derived)
            if derived is not None
            else None,
        )
    except (KeyError, TypeError, ValueError, InvalidOpError) as exc:
        raise FormatError(f"{where}bad revision record: {exc}") from None


def write_export(jobs: Iterable[JobRecord]) -> str:
    """Serialize jobs, in the given order, to canonical export text."""
    lines: list[str] = []
    for job in jobs:
        lines.append(dumps_canonical(header_record(job)))
        for rev in job.revisions:
            lines.append(dumps_canonical(revision_record(rev)))
    return "".join(line + "\n" for line in lines)


def parse_export(lines: Iterable[str]) -> list[JobRecord]:
    """Parse export text into job records; errors carry line numbers."""
    jobs: list[JobRecord] = []
    current: JobRecord | None = None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        kind = record.get("type")
        if kind == "header":
            try:
                current = JobRecord(
                    job_id=str(record["job_id"]),
                    task_id=str(record.get("task_id", "")),
                    sentence_index=int(record.get("sentence_index", 0)),
                    assignee=str(record.get("assignee", "")),
                    status=str(record.get("status", STATUS_INCOMPLETE)),
                    original_text=str(record["original_text"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"line {line_no}: bad header record: {exc}") from None
            if current.status not in STATUSES:
                raise FormatError(f"line {line_no}: unknown status {current.status!r}")
            jobs.append(current)
        elif kind == "revision":
            if current is None:
                raise FormatError(f"line {line_no}: revision before any header")
            revision = revision_from_record(record, line_no)
            if revision.index != len(current.revisions):
                raise FormatError(
                    f"line {line_no}: expected revision index "
                    f"{len(current.revisions)}, got {revision.index}"
                )
            current.revisions.append(revision)
        else:
            raise FormatError(f"line {line_no}: unknown record type {kind!r}")
    return jobs
