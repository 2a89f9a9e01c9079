"""The full evaluation grid and its table renderings.

Grid order: k-NN over k = 3, 5, 7, 11, 13, 15; SVM with linear, poly,
rbf, sigmoid kernels; LDA; Decision-Tree; Random Forest; GBoost. A k = 1
row is prepended and flagged "text-only": it belongs to the method
description but not to the reference results table.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from .api import ClassifierConfig, evaluate, train
from .dataset import LabeledDataset, validate_paper_protocol
from .metrics import MetricsReport

KNN_TABLE_KS = (3, 5, 7, 11, 13, 15)
SVM_KERNELS_ORDER = ("linear", "poly", "rbf", "sigmoid")


@dataclass
class GridEntry:
    config: ClassifierConfig
    note: str = ""  # "text-only" marks rows outside the reference table


@dataclass
class GridResult:
    entry: GridEntry
    report: MetricsReport


def _config_seed(master_seed: int, index: int) -> int:
    # stable per-config substream, independent of which configs run
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def grid_entries(seed: int = 0, include_text_only: bool = True) -> list[GridEntry]:
    entries: list[GridEntry] = []
    for k in (1,) + KNN_TABLE_KS:
        entries.append(GridEntry(
            config=ClassifierConfig(family="knn", k=k),
            note="text-only" if k == 1 else "",
        ))
    for kernel in SVM_KERNELS_ORDER:
        entries.append(GridEntry(config=ClassifierConfig(family="svm", kernel=kernel)))
    entries.append(GridEntry(config=ClassifierConfig(family="lda")))
    entries.append(GridEntry(config=ClassifierConfig(family="tree")))
    entries.append(GridEntry(config=ClassifierConfig(family="forest")))
    entries.append(GridEntry(config=ClassifierConfig(family="gboost")))
    # bake per-entry seeds before any filtering so a config's substream
    # does not depend on which other configs run
    entries = [
        GridEntry(config=dataclasses.replace(e.config, rng_seed=_config_seed(seed, i)),
                  note=e.note)
        for i, e in enumerate(entries)
    ]
    if not include_text_only:
        entries = [e for e in entries if not e.note]
    return entries


def run_grid(train_split: LabeledDataset, test_split: LabeledDataset,
             seed: int = 0, include_text_only: bool = True,
             enforce_protocol: bool = True) -> list[GridResult]:
    """Train and evaluate every grid configuration, in table order."""
    if enforce_protocol:
        validate_paper_protocol(train_split, test_split)
    results = []
    for entry in grid_entries(seed=seed, include_text_only=include_text_only):
        model = train(entry.config, train_split)
        results.append(GridResult(entry=entry, report=evaluate(model, test_split)))
    return results


def _rows(results: list[GridResult]):
    for res in results:
        name = res.entry.config.display_name()
        if res.entry.note:
            name += f" [{res.entry.note}]"
        per_class = res.report.per_class()
        for j, cls in enumerate(res.report.class_names):
            m = per_class[cls]
            yield (
                name if j == 0 else "",
                cls,
                f"{m.precision:.2f}",
                f"{m.recall:.2f}",
                f"{m.f1:.2f}",
                f"{res.report.accuracy_percent}%" if j == 0 else "",
            )


def grid_table_text(results: list[GridResult]) -> str:
    """Aligned text table mirroring the reference report columns."""
    header = ("Classifier", "Classes", "Precision", "Recall", "F1-score", "Accuracy (%)")
    rows = [header, *_rows(results)]
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def grid_table_csv(results: list[GridResult], header_comment: str | None = None) -> str:
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append("classifier,note,class,precision,recall,f1,accuracy_percent")
    for res in results:
        per_class = res.report.per_class()
        for cls in res.report.class_names:
            m = per_class[cls]
            lines.append(
                f"{res.entry.config.display_name()},{res.entry.note},{cls},"
                f"{m.precision:.2f},{m.recall:.2f},{m.f1:.2f},{res.report.accuracy_percent}"
            )
    return "\n".join(lines) + "\n"
