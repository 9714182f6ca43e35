"""Ranking-quality metrics: average precision, ROC AUC, and aggregation.

Only labeled videos count: a video absent from the ground truth is dropped
from that event's evaluation rather than assumed negative. AUC uses the
rank-sum form with average ranks for tied scores; AP follows the ranked
list's order, whose ties are already resolved deterministically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .retrieval import RankedList


@dataclass(frozen=True)
class GroundTruth:
    """(event id, video id) -> 1 or 0. Unlisted pairs are unjudged."""

    labels: dict[tuple[str, str], int]

    def __contains__(self, key) -> bool:
        return key in self.labels

    def label(self, event_id: str, video_id: str) -> int:
        return self.labels[(event_id, video_id)]

    def events(self) -> list[str]:
        return sorted({event for event, _ in self.labels})


def load_truth(path) -> GroundTruth:
    """CSV with columns event_id, video_id, label (1 or 0); the header row
    is optional."""
    labels: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 3:
                raise EvaluationError(f"{path} line {lineno}: expected 3 CSV columns")
            event_id, video_id, label = (field.strip() for field in row)
            if lineno == 1 and label.lower() == "label":
                continue
            if label not in ("0", "1"):
                raise EvaluationError(f"{path} line {lineno}: label must be 0 or 1, got {label!r}")
            key = (event_id, video_id)
            if key in labels:
                raise EvaluationError(f"{path} line {lineno}: duplicate label for {key}")
            labels[key] = int(label)
    return GroundTruth(labels=labels)


def _labeled(ranked: RankedList, truth: GroundTruth):
    """Restrict the ranked entries to judged videos, keeping order."""
    event = ranked.event_id
    kept = [(vid, score) for vid, score in ranked.entries if (event, vid) in truth]
    relevance = np.array([truth.label(event, vid) for vid, _ in kept], dtype=np.int64)
    scores = np.array([score for _, score in kept], dtype=np.float64)
    return relevance, scores


def average_precision(ranked: RankedList, truth: GroundTruth) -> float:
    """Mean of precision-at-k over the positions of the positives."""
    relevance, _ = _labeled(ranked, truth)
    positives = int(relevance.sum())
    if positives == 0:
        raise EvaluationError(f"event {ranked.event_id!r} has no labeled positives")
    hits = 0
    total = 0.0
    for k, rel in enumerate(relevance, start=1):
        if rel:
            hits += 1
            total += hits / k
    return total / positives


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """Ascending 1-based ranks; tied values share their mean rank."""
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.shape[0], dtype=np.float64)
    i = 0
    while i < scores.shape[0]:
        j = i
        while j + 1 < scores.shape[0] and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def roc_auc(ranked: RankedList, truth: GroundTruth) -> float:
    """Rank-sum AUC: probability a random positive outscores a random
    negative, ties counted half."""
    relevance, scores = _labeled(ranked, truth)
    positives = int(relevance.sum())
    negatives = relevance.shape[0] - positives
    if positives == 0 or negatives == 0:
        raise EvaluationError(
            f"event {ranked.event_id!r} needs both classes for AUC "
            f"(got {positives} positive, {negatives} negative)"
        )
    ranks = _average_ranks(scores)
    rank_sum = float(ranks[relevance == 1].sum())
    return (rank_sum - positives * (positives + 1) / 2.0) / (positives * negatives)


@dataclass(frozen=True)
class EventResult:
    event_id: str
    ap: float
    auc: float
    n_videos: int
    n_positives: int


@dataclass(frozen=True)
class EvaluationReport:
    per_event: tuple[EventResult, ...]
    mean_ap: float
    mean_auc: float


def evaluate(runs: list[RankedList], truth: GroundTruth) -> EvaluationReport:
    """Per-event AP and AUC plus their arithmetic means."""
    known = set(truth.events())
    results = []
    for ranked in runs:
        if ranked.event_id not in known:
            raise EvaluationError(f"event {ranked.event_id!r} absent from ground truth")
        relevance, _ = _labeled(ranked, truth)
        results.append(
            EventResult(
                event_id=ranked.event_id,
                ap=average_precision(ranked, truth),
                auc=roc_auc(ranked, truth),
                n_videos=int(relevance.shape[0]),
                n_positives=int(relevance.sum()),
            )
        )
    if not results:
        raise EvaluationError("nothing to evaluate")
    return EvaluationReport(
        per_event=tuple(results),
        mean_ap=float(np.mean([r.ap for r in results])),
        mean_auc=float(np.mean([r.auc for r in results])),
    )


def write_report_tsv(report: EvaluationReport, fh) -> None:
    fh.write("event_id\tap\tauc\tn_videos\tn_positives\n")
    for r in report.per_event:
        fh.write(f"{r.event_id}\t{r.ap:.6f}\t{r.auc:.6f}\t{r.n_videos}\t{r.n_positives}\n")


def format_report_table(report: EvaluationReport) -> str:
    """Human-readable aligned table with the MAP / mean AUC summary."""
    width = max([len("event")] + [len(r.event_id) for r in report.per_event])
    lines = [f"{'event':<{width}}  {'AP':>8}  {'AUC':>8}  {'videos':>6}  {'pos':>4}"]
    for r in report.per_event:
        lines.append(
            f"{r.event_id:<{width}}  {r.ap:>8.4f}  {r.auc:>8.4f}  {r.n_videos:>6}  {r.n_positives:>4}"
        )
    lines.append(f"{'MAP':<{width}}  {report.mean_ap:>8.4f}")
    lines.append(f"{'mean AUC':<{width}}  {'':>8}  {report.mean_auc:>8.4f}")
    return "\n".join(lines) + "\n"
