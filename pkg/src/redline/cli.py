"""Administration and analysis command line.

Admin subcommands (user/task/assign, export/import) work either directly
against a store directory (--store) or through a running service
(--server + --token). Analysis subcommands read export files and print
delimited reports; pass --figure to also render the report as a PNG.

Exit codes: 0 ok, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

from . import reporting
from .config import load_config
from .errors import RedlineError
from .exportfmt import parse_export
from .models.classifier import load_classifier, load_labeled_corpus, save_classifier, train_classifier
from .models.ngram import save_ngram, train_ngram
from .store import Store


class _RemoteError(RedlineError):
    pass


class _Client:
    """Tiny JSON-over-HTTP client for the admin endpoints."""

    def __init__(self, base_url: str, token: str):
        self.base_url = base_url.rstrip("/")
        self.token = token

    def post(self, path: str, body: dict) -> dict:
        request = urllib.request.Request(
            self.base_url + path,
            data=json.dumps(body).encode("utf-8"),
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {self.token}",
            },
            method="POST",
        )
        try:
            with urllib.request.urlopen(request) as response:
                return json.loads(response.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", "replace")
            try:
                detail = json.loads(detail).get("error", detail)
            except json.JSONDecodeError:
                pass
            raise _RemoteError(f"{exc.code}: {detail}") from None
        except urllib.error.URLError as exc:
            raise _RemoteError(f"cannot reach {self.base_url}: {exc.reason}") from None


def _admin_target(args) -> Store | _Client:
    if args.server:
        if not args.token:
            raise RedlineError("--server requires --token")
        return _Client(args.server, args.token)
    if args.store:
        return Store(args.store)
    raise RedlineError("pass either --store DIR or --server URL --token T")


def _read_export(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_export(fh)


def _emit_rows(rows: list[tuple], header: tuple[str, ...], fmt: str) -> None:
    if fmt == "tsv":
        print("\t".join(header))
        for row in rows:
            print("\t".join(str(cell) for cell in row))
        return
    widths = [
        max(len(str(header[i])), *(len(str(row[i])) for row in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    print("  ".join(str(header[i]).ljust(widths[i]) for i in range(len(header))))
    for row in rows:
        print("  ".join(str(row[i]).ljust(widths[i]) for i in range(len(header))))


# -- admin commands ------------------------------------------------------


def cmd_user_create(args) -> int:
    target = _admin_target(args)
    if isinstance(target, Store):
        user = target.create_user(args.name, args.role, user_id=args.id, token=args.user_token)
        print(f"{user.id}\t{user.token}")
    else:
        body = {"name": args.name, "role": args.role}
        if args.id:
            body["id"] = args.id
        if args.user_token:
            body["token"] = args.user_token
        created = target.post("/users", body)
        print(f"{created['id']}\t{created['token']}")
    return 0


def cmd_task_create(args) -> int:
    sentences = [
        line.strip()
        for line in Path(args.sentences).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    providers = [p.strip() for p in args.providers.split(",") if p.strip()] if args.providers else []
    labels = [l.strip() for l in args.labels.split(",") if l.strip()] if args.labels else []
    target = _admin_target(args)
    if isinstance(target, Store):
        task = target.create_task(
            args.title,
            sentences,
            providers=providers,
            labels=labels,
            target_label=args.target_label,
            task_id=args.id,
        )
        print(f"{task.id}\t{len(task.sentences)} sentences")
    else:
        body = {
            "title": args.title,
            "sentences": sentences,
            "providers": providers,
            "labels": labels,
            "target_label": args.target_label,
        }
        if args.id:
            body["id"] = args.id
        created = target.post("/tasks", body)
        print(f"{created['id']}\t{created['sentence_count']} sentences")
    return 0


def cmd_assign(args) -> int:
    users = [u.strip() for u in args.users.split(",") if u.strip()]
    target = _admin_target(args)
    if isinstance(target, Store):
        created = target.assign_jobs(args.task, users)
        print(f"created {len(created)} jobs")
    else:
        response = target.post(f"/tasks/{args.task}/assign", {"users": users})
        print(f"created {response['count']} jobs")
    return 0


def cmd_export(args) -> int:
    store = Store(args.store)
    text = store.export_histories(user_id=args.user, task_id=args.task)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_import(args) -> int:
    store = Store(args.store)
    with open(args.export, encoding="utf-8") as fh:
        imported = store.import_histories(fh)
    print(f"imported {len(imported)} jobs")
    return 0


def cmd_serve(args) -> int:
    from .service import ApiServer

    server = ApiServer(load_config(args.config))
    host, port = server.address
    print(f"listening on {host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


# -- model training ------------------------------------------------------


def cmd_train_lm(args) -> int:
    texts = [
        line for line in Path(args.corpus).read_text(encoding="utf-8").splitlines() if line.strip()
    ]
    lm = train_ngram(texts, args.order, args.alpha)
    save_ngram(lm, args.out)
    print(f"trained order-{lm.order} model over {len(texts)} sentences, |V|={lm.vocab_size()}")
    return 0


def cmd_train_classifier(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = load_labeled_corpus(fh)
    clf = train_classifier(corpus, args.beta)
    save_classifier(clf, args.out)
    print(f"trained classifier with labels {','.join(clf.labels)}, |V|={len(clf.vocab)}")
    return 0


# -- analysis commands -----------------------------------------------------


def cmd_op_distribution(args) -> int:
    jobs = _read_export(args.export)
    counts = reporting.op_distribution(jobs)
    rows = [
        (category, count, f"{pct:.2f}")
        for category, count, pct in reporting.distribution_rows(counts)
    ]
    _emit_rows(rows, ("category", "count", "percent"), args.format)
    if args.figure:
        reporting.save_bar_figure(
            args.figure,
            [row[0] for row in rows],
            [counts[row[0]] for row in rows],
            title="Edit operations by category",
            ylabel="count",
        )
    return 0


def cmd_engagement(args) -> int:
    jobs = _read_export(args.export)
    report = reporting.engagement(jobs)
    rows = [
        ("jobs", report.job_count),
        ("jobs_with_auxiliary_edits", report.jobs_with_auxiliary_edits),
        ("auxiliary_fraction", f"{report.auxiliary_fraction:.4f}"),
        ("mean_ops_per_job", f"{report.mean_ops:.4f}"),
    ]
    _emit_rows(rows, ("metric", "value"), args.format)
    if args.figure:
        reporting.save_bar_figure(
            args.figure,
            ["auxiliary fraction", "mean ops"],
            [report.auxiliary_fraction, report.mean_ops],
            title="Annotator engagement",
            ylabel="value",
        )
    return 0


def cmd_entropy_report(args) -> int:
    jobs = _read_export(args.export)
    clf = load_classifier(args.classifier)
    report = reporting.entropy_report(jobs, clf)
    if report.job_count == 0:
        print("warning: export contains no jobs", file=sys.stderr)
    rows = [
        ("jobs", report.job_count),
        ("mean_entropy_original", f"{report.mean_original_entropy:.6f}"),
        ("mean_entropy_final", f"{report.mean_final_entropy:.6f}"),
    ]
    _emit_rows(rows, ("metric", "value"), args.format)
    if args.figure:
        reporting.save_bar_figure(
            args.figure,
            ["original", "final"],
            [report.mean_original_entropy, report.mean_final_entropy],
            title="Mean posterior entropy",
            ylabel="entropy (nats)",
        )
    return 0


def cmd_reference_count(args) -> int:
    jobs = _read_export(args.export)
    rows, mean = reporting.reference_counts(jobs)
    table = [(job_id, count) for job_id, count in rows]
    table.append(("mean", f"{mean:.4f}"))
    _emit_rows(table, ("job", "candidate_references"), args.format)
    if args.figure:
        reporting.save_bar_figure(
            args.figure,
            [job_id for job_id, _ in rows],
            [count for _, count in rows],
            title="Candidate references per job",
            ylabel="count",
        )
    return 0


# -- parser -----------------------------------------------------------------


def _add_admin_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", help="store directory (offline mode)")
    parser.add_argument("--server", help="service base URL")
    parser.add_argument("--token", help="bearer token for --server")


def _add_report_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--export", required=True, help="export file to analyze")
    parser.add_argument("--format", choices=("table", "tsv"), default="table")
    parser.add_argument("--figure", help="also render the report to this PNG file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="redline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("user", help="user management")
    user_sub = p.add_subparsers(dest="user_command", required=True)
    p = user_sub.add_parser("create", help="create a user")
    _add_admin_flags(p)
    p.add_argument("--name", required=True)
    p.add_argument("--role", choices=("annotator", "administrator"), default="annotator")
    p.add_argument("--id")
    p.add_argument("--user-token", dest="user_token")
    p.set_defaults(func=cmd_user_create)

    p = sub.add_parser("task", help="task management")
    task_sub = p.add_subparsers(dest="task_command", required=True)
    p = task_sub.add_parser("create", help="create a task from a sentences file")
    _add_admin_flags(p)
    p.add_argument("--title", required=True)
    p.add_argument("--sentences", required=True, help="file with one sentence per line")
    p.add_argument("--providers", help="comma-separated feedback provider names")
    p.add_argument("--labels", help="comma-separated classifier labels")
    p.add_argument("--target-label", dest="target_label")
    p.add_argument("--id")
    p.set_defaults(func=cmd_task_create)

    p = sub.add_parser("assign", help="assign a task's sentences to users as jobs")
    _add_admin_flags(p)
    p.add_argument("--task", required=True)
    p.add_argument("--users", required=True, help="comma-separated user ids")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("export", help="export revision histories")
    p.add_argument("--store", required=True)
    p.add_argument("--user")
    p.add_argument("--task")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="import an export file into a store")
    p.add_argument("--store", required=True)
    p.add_argument("--export", required=True)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("train-lm", help="train and save an n-gram language model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("train-classifier", help="train and save a naive-Bayes classifier")
    p.add_argument("--corpus", required=True, help="label<TAB>text lines")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_classifier)

    p = sub.add_parser("op-distribution", help="edit-operation category distribution")
    _add_report_flags(p)
    p.set_defaults(func=cmd_op_distribution)

    p = sub.add_parser("engagement-report", help="auxiliary-edit engagement statistics")
    _add_report_flags(p)
    p.set_defaults(func=cmd_engagement)

    p = sub.add_parser("entropy-report", help="posterior entropy of originals vs finals")
    _add_report_flags(p)
    p.add_argument("--classifier", required=True, help="trained classifier file")
    p.set_defaults(func=cmd_entropy_report)

    p = sub.add_parser("reference-count", help="candidate references per job")
    _add_report_flags(p)
    p.set_defaults(func=cmd_reference_count)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RedlineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
