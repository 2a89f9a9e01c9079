"""Labeled feature datasets and the feature-store/manifest join."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..dct_features import N_AC, FeatureRecord, read_feature_csv
from ..errors import DataValidationError

PAPER_TRAIN_PER_CLASS = 1200
PAPER_TEST_PER_CLASS = 200
DEFAULT_CLASSES = ("Deepfake-2", "Deepfake-3")


@dataclass
class LabeledDataset:
    """Feature matrix plus string labels for one split (train or test)."""

    X: np.ndarray
    labels: list[str]
    split: str = ""
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        self.X = np.ascontiguousarray(np.asarray(self.X, dtype=np.float64))
        if self.X.ndim != 2 or self.X.shape[1] != N_AC:
            raise DataValidationError(
                f"feature matrix must be (n, {N_AC}), got {self.X.shape}"
            )
        if len(self.labels) != self.X.shape[0]:
            raise DataValidationError("label count does not match row count")
        if not self.class_names:
            self.class_names = tuple(sorted(set(self.labels)))
        unknown = set(self.labels) - set(self.class_names)
        if unknown:
            raise DataValidationError(f"labels outside class set: {sorted(unknown)}")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def y(self) -> np.ndarray:
        index = {c: i for i, c in enumerate(self.class_names)}
        return np.array([index[l] for l in self.labels], dtype=np.int64)

    def class_counts(self) -> dict:
        return {c: self.labels.count(c) for c in self.class_names}

    @classmethod
    def from_records(cls, records: list[FeatureRecord], split: str = "",
                     class_names: tuple[str, ...] = ()) -> "LabeledDataset":
        if not records:
            raise DataValidationError("cannot build a dataset from zero records")
        X = np.stack([r.features.values for r in records])
        return cls(X=X, labels=[r.label for r in records], split=split,
                   class_names=class_names)


def validate_paper_protocol(train: LabeledDataset, test: LabeledDataset) -> None:
    """Enforce the 1200/200-per-class bookkeeping of the reference protocol."""
    for ds, want, name in ((train, PAPER_TRAIN_PER_CLASS, "train"),
                           (test, PAPER_TEST_PER_CLASS, "test")):
        counts = ds.class_counts()
        if tuple(ds.class_names) != DEFAULT_CLASSES:
            raise DataValidationError(
                f"{name} split classes {ds.class_names} != {DEFAULT_CLASSES}"
            )
        bad = {c: n for c, n in counts.items() if n != want}
        if bad:
            raise DataValidationError(
                f"{name} split must hold {want} rows per class, got {counts}"
            )


def read_split_manifest(path) -> dict:
    """Map image id -> split name from a dataset manifest (JSON lines)."""
    split_of = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("record") == "entry":
                split_of[rec["id"]] = rec["split"]
    if not split_of:
        raise DataValidationError(f"{path} holds no dataset entries")
    return split_of


def load_split_datasets(features_csv, manifest_jsonl) -> tuple[LabeledDataset, LabeledDataset]:
    """Join a feature store with a manifest's split assignment."""
    records = read_feature_csv(features_csv)
    split_of = read_split_manifest(manifest_jsonl)
    classes = tuple(sorted({r.label for r in records}))
    by_split: dict[str, list[FeatureRecord]] = {"train": [], "test": []}
    for rec in records:
        split = split_of.get(rec.features.source_id)
        if split is None:
            raise DataValidationError(
                f"feature row {rec.features.source_id!r} missing from manifest"
            )
        by_split.setdefault(split, []).append(rec)
    for name in ("train", "test"):
        if not by_split[name]:
            raise DataValidationError(f"manifest assigns no rows to the {name} split")
    return (
        LabeledDataset.from_records(by_split["train"], "train", classes),
        LabeledDataset.from_records(by_split["test"], "test", classes),
    )
