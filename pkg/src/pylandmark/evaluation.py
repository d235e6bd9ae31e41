"""Voiced-class F1, accuracy and cross-corpus error increments

Voiced is the positive class throughout. Error rate is 1 - accuracy; the
relative error increment of a test corpus is (err / err_ref - 1) * 100
against the corpus the model was trained on.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from pylandmark.common import DataError, VariantMismatchError

REPORT_HEADER = ["variant", "model", "corpus", "tp", "fp", "fn", "tn", "f1", "accuracy", "error_rate", "increment_pct"]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError(f"negative confusion count in {self}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predictions, labels) -> ConfusionMatrix:
    """Counts with 1 = voiced as positive"""
    predictions = np.asarray(predictions).astype(np.int64)
    labels = np.asarray(labels).astype(np.int64)
    if len(predictions) != len(labels):
        raise DataError(f"{len(predictions)} predictions for {len(labels)} labels")
    if len(labels) == 0:
        raise DataError("cannot score an empty prediction list")
    return ConfusionMatrix(
        tp=int(np.sum((predictions == 1) & (labels == 1))),
        fp=int(np.sum((predictions == 1) & (labels == 0))),
        fn=int(np.sum((predictions == 0) & (labels == 1))),
        tn=int(np.sum((predictions == 0) & (labels == 0))),
    )


def f1_voiced(cm: ConfusionMatrix) -> float:
    denominator = 2 * cm.tp + cm.fp + cm.fn
    return 2 * cm.tp / denominator if denominator else 0.0


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise DataError("accuracy of an empty confusion matrix")
    return (cm.tp + cm.tn) / cm.total


def relative_error_increment(err_ref: float, err_other: float) -> float | None:
    """Percent increase of err_other over err_ref; None (not applicable) when err_ref is 0"""
    if err_ref <= 0:
        return None
    return (err_other / err_ref - 1.0) * 100.0


def _fmt_increment(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.1f}"


@dataclass(frozen=True)
class EvalReport:
    corpus_id: str
    feature_variant: str
    model_family: str
    confusion: ConfusionMatrix

    @classmethod
    def from_predictions(cls, corpus_id: str, feature_variant: str, model_family: str, predictions, labels) -> "EvalReport":
        return cls(corpus_id, str(feature_variant), str(model_family), confusion(predictions, labels))

    @property
    def f1(self) -> float:
        return f1_voiced(self.confusion)

    @property
    def accuracy(self) -> float:
        return accuracy(self.confusion)

    @property
    def error_rate(self) -> float:
        return 1.0 - self.accuracy

    @property
    def system(self) -> str:
        """Row label: feature variant and model family"""
        return f"{self.feature_variant}/{self.model_family}"

    def csv_row(self, increment: str = "") -> list[str]:
        cm = self.confusion
        return [self.feature_variant, self.model_family, self.corpus_id, str(cm.tp), str(cm.fp), str(cm.fn), str(cm.tn), f"{self.f1:.6f}", f"{self.accuracy:.6f}", f"{self.error_rate:.6f}", increment]


@dataclass
class CrossLingualReport:
    reference: EvalReport
    others: list[EvalReport] = field(default_factory=list)
    increments: dict[str, float | None] = field(default_factory=dict)

    @property
    def system(self) -> str:
        return self.reference.system

    def csv_rows(self) -> list[list[str]]:
        rows = [self.reference.csv_row("")]
        rows += [r.csv_row(_fmt_increment(self.increments[r.corpus_id])) for r in self.others]
        return rows

    def to_csv(self) -> str:
        return csv_text([REPORT_HEADER] + self.csv_rows())

    def increments_csv(self) -> str:
        rows = [["variant", "model", "reference", "corpus", "increment_pct"]]
        rows += [[self.reference.feature_variant, self.reference.model_family, self.reference.corpus_id, c, _fmt_increment(v)] for c, v in self.increments.items()]
        return csv_text(rows)

    def render(self) -> str:
        """Human-readable metrics and increment table"""
        lines = [f"{self.system} trained on {self.reference.corpus_id}", ""]
        lines.append(f"{'corpus':<20} {'F1':>8} {'accuracy':>9} {'error':>8} {'incr %':>8}")
        lines.append(f"{self.reference.corpus_id + ' (ref)':<20} {self.reference.f1:>8.4f} {self.reference.accuracy:>9.4f} {self.reference.error_rate:>8.4f} {'-':>8}")
        for r in self.others:
            lines.append(f"{r.corpus_id:<20} {r.f1:>8.4f} {r.accuracy:>9.4f} {r.error_rate:>8.4f} {_fmt_increment(self.increments[r.corpus_id]):>8}")
        return "\n".join(lines) + "\n"


def cross_lingual_report(reference: EvalReport, others: list[EvalReport]) -> CrossLingualReport:
    for r in others:
        if (r.feature_variant, r.model_family) != (reference.feature_variant, reference.model_family):
            raise VariantMismatchError(f"cannot compare {r.system} on {r.corpus_id} against reference {reference.system}")
    ids = [reference.corpus_id] + [r.corpus_id for r in others]
    duplicates = sorted({c for c in ids if ids.count(c) > 1})
    if duplicates:
        raise DataError(f"corpus id(s) evaluated more than once: {', '.join(duplicates)}")
    increments = {r.corpus_id: relative_error_increment(reference.error_rate, r.error_rate) for r in others}
    return CrossLingualReport(reference, list(others), increments)


def comparison_table(reports: list[CrossLingualReport]) -> tuple[list[str], list[list[str]]]:
    """Rows = systems, columns = non-reference corpora, cells = increment %"""
    corpora: list[str] = []
    for report in reports:
        for corpus_id in report.increments:
            if corpus_id not in corpora:
                corpora.append(corpus_id)
    header = ["system", "reference"] + corpora
    rows = []
    for report in reports:
        cells = [_fmt_increment(report.increments[c]) if c in report.increments else "" for c in corpora]
        rows.append([report.system, report.reference.corpus_id] + cells)
    return header, rows


def comparison_csv(reports: list[CrossLingualReport]) -> str:
    header, rows = comparison_table(reports)
    return csv_text([header] + rows)


def comparison_text(reports: list[CrossLingualReport]) -> str:
    header, rows = comparison_table(reports)
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    lines = ["Relative error rate increment (%)", ""]
    for row in [header] + rows:
        lines.append("  ".join(cell.ljust(w) if i < 2 else cell.rjust(w) for i, (cell, w) in enumerate(zip(row, widths))).rstrip())
    return "\n".join(lines) + "\n"


def bar_chart_rows(reports: list[CrossLingualReport]) -> list[list[str]]:
    """Per-metric bar data: metric, system, corpus, value"""
    rows = [["metric", "system", "corpus", "value"]]
    for metric in ("f1", "accuracy"):
        for report in reports:
            for r in [report.reference] + report.others:
                rows.append([metric, r.system, r.corpus_id, f"{getattr(r, metric):.6f}"])
    return rows


def csv_text(rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue()


def read_report_csv(text: str) -> CrossLingualReport:
    """Inverse of CrossLingualReport.to_csv; the row with an empty increment is the reference"""
    records = list(csv.reader(io.StringIO(text)))
    if not records or records[0] != REPORT_HEADER:
        raise DataError("not a report CSV (header mismatch)")
    reference = None
    others = []
    for record in records[1:]:
        if len(record) != len(REPORT_HEADER):
            raise DataError(f"report row has {len(record)} fields, expected {len(REPORT_HEADER)}")
        tp, fp, fn, tn = (int(v) for v in record[3:7])
        report = EvalReport(record[2], record[0], record[1], ConfusionMatrix(tp, fp, fn, tn))
        if record[10] == "":
            reference = report
        else:
            others.append(report)
    if reference is None:
        raise DataError("report CSV has no reference row")
    return cross_lingual_report(reference, others)
