"""Evaluation protocol: one template subject, everyone else is test data.

For every gesture the template subject's trials are reduced to a single
template by :func:`~posedtw.classify.select_template`; that subject's other
trials are dropped. Every sequence from the remaining subjects is then
classified against the template set.
"""
from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classify import (
    REJECTED, ClassificationOutcome, PipelineParams, TemplateSet, classify, select_template,
)
from .errors import ClassificationFailed, FormatError, MissingGesture
from .formats import read_manifest, read_sequence
from .normalize import NormalizedSequence
from .signals import PreparedSequence

logger = logging.getLogger(__name__)

FAILED = "FAILED"


@dataclass(frozen=True)
class CorpusEntry:
    sequence: NormalizedSequence
    subject: str
    trial: int

    @property
    def label(self) -> str:
        return self.sequence.label


@dataclass
class LabeledCorpus:
    entries: list[CorpusEntry]
    gesture_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.gesture_ids:
            self.gesture_ids = sorted({e.label for e in self.entries})
        known = set(self.gesture_ids)
        seen = set()
        for e in self.entries:
            if e.label not in known:
                raise ValueError(f"{e.sequence.source_id}: label {e.label!r} not in gesture_ids")
            key = (e.label, e.subject, e.trial)
            if key in seen:
                raise ValueError(f"duplicate (label, subject, trial) {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def subjects(self) -> list[str]:
        return sorted({e.subject for e in self.entries})

    def restricted_to(self, gesture_ids: Iterable[str]) -> "LabeledCorpus":
        keep = list(gesture_ids)
        return LabeledCorpus([e for e in self.entries if e.label in keep], keep)


def load_corpus(manifest: str | Path) -> LabeledCorpus:
    entries = []
    labels: list[str] = []
    for item in read_manifest(manifest):
        seq = read_sequence(item["path"]).with_label(item["label"])
        entries.append(CorpusEntry(seq, item["subject"], item["trial"]))
        if item["label"] not in labels:
            labels.append(item["label"])
    if not entries:
        raise FormatError(f"{manifest}: manifest lists no sequences")
    return LabeledCorpus(entries, labels)


@dataclass
class ConfusionMatrix:
    """Counts with rows = actual gesture and columns = predicted label.

    Columns are the gesture ids followed by REJECTED and FAILED when any
    sequence ended that way.
    """

    labels: list[str]
    columns: list[str]
    counts: np.ndarray

    @classmethod
    def from_pairs(cls, labels: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "ConfusionMatrix":
        pairs = list(pairs)
        labels = list(labels)
        extra = [c for c in (REJECTED, FAILED) if any(p == c for _, p in pairs)]
        columns = labels + extra
        counts = np.zeros((len(labels), len(columns)), dtype=int)
        ri = {l: k for k, l in enumerate(labels)}
        ci = {l: k for k, l in enumerate(columns)}
        for actual, predicted in pairs:
            counts[ri[actual], ci[predicted]] += 1
        return cls(labels, columns, counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(sum(self.counts[k, k] for k in range(len(self.labels))))

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            return np.zeros(len(self.labels), dtype=int)
        return self.counts[:, self.columns.index(name)]


@dataclass
class ProtocolResult:
    confusion: ConfusionMatrix
    templates: TemplateSet
    outcomes: list[tuple[str, ClassificationOutcome | None]]  # (actual, outcome or None=failed)

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def n_failed(self) -> int:
        return int(self.confusion.column(FAILED).sum())

    @property
    def n_total(self) -> int:
        return self.confusion.total


@dataclass
class SweepReport:
    rows: list[tuple[float, float, int, int, int]]  # t_var, accuracy, n_correct, n_total, n_failed

    COLUMNS = ("t_var", "accuracy", "n_correct", "n_total", "n_failed")


def build_templates(
    prepared: Sequence[tuple[CorpusEntry, PreparedSequence]],
    gesture_ids: Sequence[str], template_subject: str, params: PipelineParams,
) -> TemplateSet:
    templates = {}
    for g in gesture_ids:
        cands = [p for e, p in prepared if e.subject == template_subject and e.label == g]
        if not cands:
            raise MissingGesture(template_subject, g)
        templates[g] = select_template(cands, params)
    return TemplateSet(templates, params)


_worker_templates: TemplateSet | None = None


def _init_worker(templates: TemplateSet) -> None:
    global _worker_templates
    _worker_templates = templates


def _classify_or_none(query: PreparedSequence, templates: TemplateSet | None = None):
    try:
        return classify(query, templates or _worker_templates)
    except ClassificationFailed:
        return None


def _run_prepared(
    prepared: Sequence[tuple[CorpusEntry, PreparedSequence]],
    gesture_ids: Sequence[str], template_subject: str, params: PipelineParams,
    workers: int = 1,
) -> ProtocolResult:
    templates = build_templates(prepared, gesture_ids, template_subject, params)
    queries = [(e, p) for e, p in prepared if e.subject != template_subject]
    if workers > 1 and len(queries) > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(templates,)) as ex:
            results = list(ex.map(_classify_or_none, [p for _, p in queries],
                                  chunksize=max(1, len(queries) // (4 * workers))))
    else:
        results = [_classify_or_none(p, templates) for _, p in queries]
    pairs = []
    outcomes = []
    for (e, _), res in zip(queries, results):
        pairs.append((e.label, FAILED if res is None else res.predicted))
        outcomes.append((e.label, res))
    cm = ConfusionMatrix.from_pairs(gesture_ids, pairs)
    return ProtocolResult(cm, templates, outcomes)


def _prepare_corpus(corpus: LabeledCorpus, params: PipelineParams):
    return [(e, params.prepare(e.sequence)) for e in corpus.entries]


def run_protocol(
    corpus: LabeledCorpus, template_subject: str, params: PipelineParams | None = None,
    workers: int = 1,
) -> ProtocolResult:
    """Select templates from ``template_subject`` and classify every other subject."""
    params = params or PipelineParams()
    return _run_prepared(
        _prepare_corpus(corpus, params), corpus.gesture_ids, str(template_subject), params, workers,
    )


def sweep_t_var(
    corpus: LabeledCorpus, template_subject: str, params: PipelineParams | None,
    thresholds: Sequence[float], workers: int = 1,
) -> SweepReport:
    """Rerun the protocol (template selection included) for each threshold."""
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    params = params or PipelineParams()
    # t_var does not affect preparation, so prepare once
    prepared = _prepare_corpus(corpus, params)
    rows = []
    for t in thresholds:
        res = _run_prepared(prepared, corpus.gesture_ids, str(template_subject),
                            params.replace(t_var=float(t)), workers)
        cm = res.confusion
        rows.append((float(t), cm.accuracy, cm.correct, cm.total, res.n_failed))
        logger.info("t_var=%.3f accuracy=%.4f (%d/%d, %d failed)", t, cm.accuracy,
                    cm.correct, cm.total, res.n_failed)
    return SweepReport(rows)


def _open_csv(destination):
    return open(destination, "w", encoding="utf-8", newline="")


def write_confusion_csv(cm: ConfusionMatrix, destination: str | Path) -> None:
    """Rows are actual labels, columns predicted labels."""
    with _open_csv(destination) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["actual\\predicted", *cm.columns])
        for label, row in zip(cm.labels, cm.counts):
            w.writerow([label, *(int(v) for v in row)])


def write_sweep_csv(report: SweepReport, destination: str | Path) -> None:
    with _open_csv(destination) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SweepReport.COLUMNS)
        for t, acc, n_ok, n, n_fail in report.rows:
            w.writerow([f"{t:g}", f"{acc:.6f}", n_ok, n, n_fail])


def default_workers() -> int:
    return os.cpu_count() or 1
