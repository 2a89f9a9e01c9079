"""Per-class precision/recall/F1 and the two-class report format."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataValidationError


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    """Confusion counts plus derived metrics for a two-class evaluation.

    counts[t][p] = number of rows with true class t predicted as p
    (indices follow class_names order). Undefined precision (a class never
    predicted) is reported as 0.0 and flagged.
    """

    class_names: tuple[str, str]
    counts: np.ndarray
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (2, 2):
            raise DataValidationError("MetricsReport needs a 2x2 count matrix")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total

    @property
    def accuracy_percent(self) -> int:
        return int(np.floor(self.accuracy * 100.0 + 0.5))

    def per_class(self) -> dict[str, ClassMetrics]:
        out = {}
        for i, name in enumerate(self.class_names):
            tp = float(self.counts[i, i])
            predicted = float(self.counts[:, i].sum())
            actual = float(self.counts[i, :].sum())
            precision = tp / predicted if predicted > 0 else 0.0
            recall = tp / actual if actual > 0 else 0.0
            f1 = (
                2.0 * precision * recall / (precision + recall)
                if precision + recall > 0
                else 0.0
            )
            out[name] = ClassMetrics(precision, recall, f1)
        return out


def report_from_predictions(true_labels, predicted_labels,
                            class_names: tuple[str, str]) -> MetricsReport:
    if len(true_labels) == 0:
        raise DataValidationError("cannot evaluate on an empty split")
    if len(true_labels) != len(predicted_labels):
        raise DataValidationError("prediction count does not match row count")
    index = {c: i for i, c in enumerate(class_names)}
    counts = np.zeros((2, 2), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        counts[index[t], index[p]] += 1
    flags = [
        f"empty-predicted:{c}" for i, c in enumerate(class_names)
        if counts[:, i].sum() == 0
    ]
    return MetricsReport(class_names=tuple(class_names), counts=counts, flags=flags)
