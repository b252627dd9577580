"""Analysis over exported revision histories.

All functions are pure over parsed export records, so a report is a
deterministic function of the export file bytes. The CLI renders results
as aligned tables or TSV; each report can also be drawn to a PNG figure.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .exportfmt import JobRecord
from .feedback import entropy
from .history import extract_references
from .models.classifier import AttributeClassifier
from .ops import CATEGORIES, REVERT, category_of

# Ops performed word-by-word in the guided editing mode.
AUXILIARY_KINDS = frozenset({"insert", "delete", "substitute", "reorder"})


def op_distribution(jobs: Sequence[JobRecord]) -> dict[str, int]:
    """Count every non-revert revision by reporting category."""
    counts = {category: 0 for category in CATEGORIES}
    for job in jobs:
        for rev in job.revisions:
            if rev.op.kind == REVERT:
                continue
            counts[category_of(rev.op)] += 1
    return counts


def distribution_rows(counts: dict[str, int]) -> list[tuple[str, int, float]]:
    total = sum(counts.values())
    return [
        (category, counts[category], 100.0 * counts[category] / total if total else 0.0)
        for category in CATEGORIES
    ]


@dataclass(frozen=True)
class EngagementReport:
    job_count: int
    jobs_with_auxiliary_edits: int
    total_ops: int

    @property
    def auxiliary_fraction(self) -> float:
        return self.jobs_with_auxiliary_edits / self.job_count if self.job_count else 0.0

    @property
    def mean_ops(self) -> float:
        return self.total_ops / self.job_count if self.job_count else 0.0


def engagement(jobs: Sequence[JobRecord]) -> EngagementReport:
    with_aux = 0
    total_ops = 0
    for job in jobs:
        total_ops += len(job.revisions)
        if any(rev.op.kind in AUXILIARY_KINDS for rev in job.revisions):
            with_aux += 1
    return EngagementReport(len(jobs), with_aux, total_ops)


@dataclass(frozen=True)
class EntropyReport:
    job_count: int
    mean_original_entropy: float
    mean_final_entropy: float


def entropy_report(jobs: Sequence[JobRecord], clf: AttributeClassifier) -> EntropyReport:
    """Mean posterior entropy of each job's original vs. final sentence."""
    if not jobs:
        return EntropyReport(0, 0.0, 0.0)

    def sentence_entropy(sentence) -> float:
        posterior = clf.posterior(sentence)
        return entropy([posterior[label] for label in clf.labels])

    originals = [sentence_entropy(job.original_sentence()) for job in jobs]
    finals = [sentence_entropy(job.final_sentence()) for job in jobs]
    return EntropyReport(
        job_count=len(jobs),
        mean_original_entropy=sum(originals) / len(jobs),
        mean_final_entropy=sum(finals) / len(jobs),
    )


def reference_counts(jobs: Sequence[JobRecord]) -> tuple[list[tuple[str, int]], float]:
    """Distinct candidate-reference count per job, plus the mean."""
    rows = [(job.job_id, len(extract_references(job.history()))) for job in jobs]
    mean = sum(count for _, count in rows) / len(rows) if rows else 0.0
    return rows, mean


def save_bar_figure(
    path: str | Path,
    labels: Sequence[str],
    values: Sequence[float],
    *,
    title: str,
    ylabel: str,
) -> None:
    """Render a simple labelled bar chart to an image file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    positions = range(len(labels))
    ax.bar(positions, values, color="#4878a8")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    for x, v in zip(positions, values):
        ax.annotate(f"{v:g}", (x, v), ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
