"""HTTP API over the store, models and feedback providers.

Annotator endpoints:

    GET  /jobs?user=<id>                  job summaries for one user
    GET  /jobs/<id>                       full job state with salience
    POST /jobs/<id>/ops                   apply one edit op
    POST /jobs/<id>/revert                roll back to an earlier revision
    GET  /jobs/<id>/recommend             word recommendations
    POST /jobs/<id>/complete|/reopen      status changes

Admin endpoints (administrator token required):

    POST /users   POST /tasks   POST /tasks/<id>/assign

All requests carry "Authorization: Bearer <token>" using the per-user
tokens from the users file. Mutations use optimistic concurrency: the body
must name the parent revision index, and a stale index gets a 409 carrying
the current job state so clients can resynchronize. Every 200 response to
a mutation reflects state already fsynced by the store.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .config import ApiConfig
from .errors import (
    ConflictError,
    CorruptLogError,
    EmptyInputError,
    LabelError,
    NotFoundError,
    RedlineError,
)
from .exportfmt import STATUS_COMPLETE, STATUS_INCOMPLETE
from .feedback import build_registry, salience, score_all
from .models.classifier import (
    AttributeClassifier,
    load_classifier,
    load_labeled_corpus,
    train_classifier,
)
from .models.embeddings import EmbeddingTable, load_embeddings
from .models.ngram import NGramLM, load_ngram, train_ngram
from .ops import REVERT, op_from_dict
from .recommend import lm_predict, similar_words
from .store import ROLE_ADMIN, Job, Store, Task
from .tokens import detokenize


@dataclass
class ModelBundle:
    embeddings: EmbeddingTable | None = None
    lm: NGramLM | None = None
    classifier: AttributeClassifier | None = None


def load_models(config: ApiConfig) -> ModelBundle:
    """Load or train the models referenced by the configuration."""
    bundle = ModelBundle()
    if config.embeddings_path:
        with open(config.embeddings_path, encoding="utf-8") as fh:
            bundle.embeddings = load_embeddings(fh)
    if config.lm_model_path:
        bundle.lm = load_ngram(config.lm_model_path)
    elif config.lm_corpus_path:
        texts = Path(config.lm_corpus_path).read_text(encoding="utf-8").splitlines()
        bundle.lm = train_ngram([t for t in texts if t.strip()], config.lm_order, config.lm_alpha)
    if config.classifier_model_path:
        bundle.classifier = load_classifier(config.classifier_model_path)
    elif config.classifier_corpus_path:
        with open(config.classifier_corpus_path, encoding="utf-8") as fh:
            corpus = load_labeled_corpus(fh)
        bundle.classifier = train_classifier(corpus, config.classifier_beta)
    return bundle


class _HttpError(Exception):
    def __init__(self, status: int, message: str, extra: dict | None = None):
        super().__init__(message)
        self.status = status
        self.body = {"error": message}
        if extra:
            self.body.update(extra)


def _status_for(exc: RedlineError) -> int:
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, ConflictError):
        return 409
    if isinstance(exc, CorruptLogError):
        return 500
    return 422


class Api:
    """Transport-independent request handling over one store and model set."""

    def __init__(self, store: Store, models: ModelBundle, config: ApiConfig):
        self.store = store
        self.models = models
        self.config = config

    # -- helpers --------------------------------------------------------

    def _task_for(self, job: Job) -> Task | None:
        try:
            return self.store.get_task(job.task_id)
        except NotFoundError:
            return None  # imported jobs may reference tasks we never had

    def _registry_for(self, task: Task | None) -> dict:
        names = task.providers if task is not None and task.providers else self.config.providers
        target = task.target_label if task is not None else None
        usable = []
        for name in names:
            if name == "wmd" and self.models.embeddings is None:
                continue
            if name == "ppl" and self.models.lm is None:
                continue
            if name == "class" and (self.models.classifier is None or target is None):
                continue
            if name == "entropy" and self.models.classifier is None:
                continue
            usable.append(name)
        return build_registry(
            usable,
            embeddings=self.models.embeddings,
            lm=self.models.lm,
            classifier=self.models.classifier,
            target_label=target,
        )

    def _salience_payload(self, job: Job, task: Task | None) -> dict | None:
        clf = self.models.classifier
        sentence = job.current_sentence()
        if clf is None or not sentence:
            return None
        target = task.target_label if task is not None else None
        try:
            vector = salience(sentence, clf, target)
        except (EmptyInputError, LabelError):
            return None
        return {"target": vector.target, "scores": list(vector.scores)}

    def _job_payload(self, job: Job) -> dict:
        from .exportfmt import revision_record

        task = self._task_for(job)
        current = job.current_sentence()
        return {
            "id": job.id,
            "task_id": job.task_id,
            "sentence_index": job.sentence_index,
            "assignee": job.assignee,
            "status": job.status,
            "original_text": job.original_text,
            "current_text": detokenize(current),
            "current_tokens": [
                {"index": i, "text": tok} for i, tok in enumerate(current)
            ],
            "parent_revision_index": job.history.last_index(),
            "revisions": [revision_record(rev) for rev in job.history.revisions],
            "salience": self._salience_payload(job, task),
        }

    def _authorize_job(self, user, job: Job) -> None:
        if user.role != ROLE_ADMIN and user.id != job.assignee:
            raise _HttpError(403, "job belongs to another annotator")

    # -- annotator endpoints ---------------------------------------------

    def whoami(self, user) -> dict:
        return {"id": user.id, "name": user.name, "role": user.role}

    def list_jobs(self, user, query: dict) -> dict:
        target_user = query.get("user")
        if not target_user:
            raise _HttpError(422, "missing user query parameter")
        self.store.get_user(target_user)  # 404 for unknown users
        if user.role != ROLE_ADMIN and user.id != target_user:
            raise _HttpError(403, "cannot list another annotator's jobs")
        jobs = self.store.list_jobs(user_id=target_user)
        return {
            "jobs": [
                {"id": job.id, "original_text": job.original_text, "status": job.status}
                for job in jobs
            ]
        }

    def get_job(self, user, job_id: str) -> dict:
        job = self.store.load_job(job_id)
        self._authorize_job(user, job)
        return self._job_payload(job)

    def post_op(self, user, job_id: str, body: dict) -> dict:
        job = self.store.load_job(job_id)
        self._authorize_job(user, job)
        if "parent_revision_index" not in body:
            raise _HttpError(422, "missing parent_revision_index")
        parent = body["parent_revision_index"]
        if not isinstance(parent, int) or isinstance(parent, bool):
            raise _HttpError(422, "parent_revision_index must be an integer")
        op_dict = body.get("op")
        if not isinstance(op_dict, dict):
            raise _HttpError(422, "missing op object")
        op_dict = dict(op_dict)
        if "source" in body:
            op_dict["source"] = body["source"]
        op_dict.setdefault("source", "typed")
        op = op_from_dict(op_dict)
        if op.kind == REVERT:
            raise _HttpError(422, "use the revert endpoint to roll back")
        task = self._task_for(job)
        registry = self._registry_for(task)
        try:
            revision = self.store.append_op(
                job_id,
                op,
                expected_parent=parent,
                feedback_fn=lambda original, edited: score_all(original, edited, registry),
            )
        except ConflictError as exc:
            current = self.store.load_job(job_id)
            raise _HttpError(409, str(exc), {"current": self._job_payload(current)}) from None
        from .exportfmt import revision_record

        updated = self.store.load_job(job_id)
        payload = self._job_payload(updated)
        payload["revision"] = revision_record(revision)
        payload["feedback"] = dict(revision.feedback)
        return payload

    def post_revert(self, user, job_id: str, body: dict) -> dict:
        job = self.store.load_job(job_id)
        self._authorize_job(user, job)
        if "parent_revision_index" not in body or "target_revision_index" not in body:
            raise _HttpError(422, "missing target_revision_index or parent_revision_index")
        parent = body["parent_revision_index"]
        target = body["target_revision_index"]
        if not isinstance(parent, int) or not isinstance(target, int):
            raise _HttpError(422, "revision indices must be integers")
        task = self._task_for(job)
        registry = self._registry_for(task)
        try:
            revision = self.store.append_revert(
                job_id,
                target,
                expected_parent=parent,
                feedback_fn=lambda original, edited: score_all(original, edited, registry),
            )
        except ConflictError as exc:
            current = self.store.load_job(job_id)
            raise _HttpError(409, str(exc), {"current": self._job_payload(current)}) from None
        except IndexError as exc:
            raise _HttpError(422, str(exc)) from None
        from .exportfmt import revision_record

        updated = self.store.load_job(job_id)
        payload = self._job_payload(updated)
        payload["revision"] = revision_record(revision)
        payload["feedback"] = dict(revision.feedback)
        return payload

    def recommend(self, user, job_id: str, query: dict) -> dict:
        job = self.store.load_job(job_id)
        self._authorize_job(user, job)
        sentence = job.current_sentence()
        try:
            position = int(query.get("position", ""))
        except ValueError:
            raise _HttpError(422, "position must be an integer") from None
        kind = query.get("kind", "similarity")
        try:
            k = int(query.get("k", self.config.recommend_k))
        except ValueError:
            raise _HttpError(422, "k must be an integer") from None
        if not 0 <= position < len(sentence):
            raise _HttpError(422, f"position {position} outside the current sentence")
        if kind == "similarity":
            if self.models.embeddings is None:
                raise _HttpError(422, "no embedding table configured")
            recs = similar_words(sentence[position], k, self.models.embeddings)
        elif kind == "lm":
            if self.models.lm is None:
                raise _HttpError(422, "no language model configured")
            recs = lm_predict(sentence, position, k, self.models.lm)
        else:
            raise _HttpError(422, f"unknown recommendation kind {kind!r}")
        return {
            "recommendations": [
                {"word": r.word, "score": r.score, "provider": r.provider} for r in recs
            ]
        }

    def set_status(self, user, job_id: str, status: str) -> dict:
        job = self.store.load_job(job_id)
        self._authorize_job(user, job)
        self.store.set_status(job_id, status)
        return {"id": job_id, "status": status}

    # -- admin endpoints --------------------------------------------------

    def _require_admin(self, user) -> None:
        if user.role != ROLE_ADMIN:
            raise _HttpError(403, "administrator token required")

    def create_user(self, user, body: dict) -> dict:
        self._require_admin(user)
        created = self.store.create_user(
            body.get("name", ""),
            body.get("role", "annotator"),
            user_id=body.get("id"),
            token=body.get("token"),
        )
        return {"id": created.id, "name": created.name, "role": created.role, "token": created.token}

    def create_task(self, user, body: dict) -> dict:
        self._require_admin(user)
        providers = body.get("providers")
        if providers is not None:
            from .feedback import PROVIDER_NAMES

            for name in providers:
                if name not in PROVIDER_NAMES:
                    raise _HttpError(422, f"unknown feedback provider {name!r}")
        task = self.store.create_task(
            body.get("title", ""),
            body.get("sentences") or (),
            providers=providers or (),
            labels=body.get("labels") or (),
            target_label=body.get("target_label"),
            task_id=body.get("id"),
        )
        return {"id": task.id, "title": task.title, "sentence_count": len(task.sentences)}

    def assign_task(self, user, task_id: str, body: dict) -> dict:
        self._require_admin(user)
        users = body.get("users")
        if not users:
            raise _HttpError(422, "missing users list")
        created = self.store.assign_jobs(task_id, users)
        return {"job_ids": created, "count": len(created)}


def _make_handler(api: Api):
    class Handler(BaseHTTPRequestHandler):
        server_version = "redline"
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send(self, status: int, body: dict) -> None:
            data = json.dumps(body).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                parsed = json.loads(raw.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                raise _HttpError(400, "request body is not valid JSON") from None
            if not isinstance(parsed, dict):
                raise _HttpError(400, "request body must be a JSON object")
            return parsed

        def _user(self):
            header = self.headers.get("Authorization") or ""
            token = header.removeprefix("Bearer ").strip()
            user = api.store.find_user_by_token(token) if token else None
            if user is None:
                raise _HttpError(401, "missing or invalid bearer token")
            return user

        def _route(self, method: str) -> None:
            try:
                url = urlsplit(self.path)
                parts = [p for p in url.path.split("/") if p]
                query = {k: v[-1] for k, v in parse_qs(url.query).items()}
                user = self._user()
                body = self._body() if method == "POST" else {}
                self._send(200, self._dispatch(method, parts, query, user, body))
            except _HttpError as exc:
                self._send(exc.status, exc.body)
            except RedlineError as exc:
                self._send(_status_for(exc), {"error": str(exc)})
            except Exception as exc:  # pragma: no cover - defensive
                self._send(500, {"error": f"internal error: {exc}"})

        def _dispatch(self, method, parts, query, user, body) -> dict:
            if method == "GET" and parts == ["whoami"]:
                return api.whoami(user)
            if method == "GET" and parts == ["jobs"]:
                return api.list_jobs(user, query)
            if method == "GET" and len(parts) == 2 and parts[0] == "jobs":
                return api.get_job(user, parts[1])
            if method == "GET" and len(parts) == 3 and parts[0] == "jobs" and parts[2] == "recommend":
                return api.recommend(user, parts[1], query)
            if method == "POST" and len(parts) == 3 and parts[0] == "jobs":
                job_id, action = parts[1], parts[2]
                if action == "ops":
                    return api.post_op(user, job_id, body)
                if action == "revert":
                    return api.post_revert(user, job_id, body)
                if action == "complete":
                    return api.set_status(user, job_id, STATUS_COMPLETE)
                if action == "reopen":
                    return api.set_status(user, job_id, STATUS_INCOMPLETE)
            if method == "POST" and parts == ["users"]:
                return api.create_user(user, body)
            if method == "POST" and parts == ["tasks"]:
                return api.create_task(user, body)
            if method == "POST" and len(parts) == 3 and parts[0] == "tasks" and parts[2] == "assign":
                return api.assign_task(user, parts[1], body)
            raise _HttpError(404, f"no route for {method} /{'/'.join(parts)}")

        def do_GET(self):
            self._route("GET")

        def do_POST(self):
            self._route("POST")

    return Handler


class ApiServer:
    """Threaded HTTP server wrapper; use as a context manager in tests."""

    def __init__(self, config: ApiConfig, store: Store | None = None, models: ModelBundle | None = None):
        self.config = config
        self.store = store or Store(config.store_dir)
        self.models = models if models is not None else load_models(config)
        self.api = Api(self.store, self.models, config)
        self._httpd = ThreadingHTTPServer(
            (config.listen_host, config.listen_port), _make_handler(self.api)
        )
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    @property
    def base_url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start(self) -> "ApiServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "ApiServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.shutdown()
