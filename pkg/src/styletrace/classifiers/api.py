"""Training/prediction façade over the six classifier families."""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .. import __version__ as _toolkit_version
from ..dct_features import N_AC, BetaVector
from ..errors import DataValidationError, DegenerateDataError, DimensionMismatchError
from .dataset import LabeledDataset
from .forest import ForestModel
from .gboost import GboostModel
from .knn import KnnModel
from .lda import LdaModel
from .metrics import MetricsReport, report_from_predictions
from .svm import KERNELS, SvmModel
from .tree import FlatTree, fit_classification_tree

FAMILIES = ("knn", "svm", "lda", "tree", "forest", "gboost")

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ClassifierConfig:
    """One grid cell: a family plus every hyperparameter it needs."""

    family: str
    k: int = 5                    # knn
    kernel: str = "rbf"           # svm
    c: float = 1.0
    tol: float = 1e-3
    max_passes: int = 10_000
    degree: int = 3
    coef0: float = 0.0
    n_trees: int = 100            # forest
    max_features: int = 8
    n_rounds: int = 100           # gboost
    max_depth: int = 3
    learning_rate: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DataValidationError(f"unknown family {self.family!r}, pick from {FAMILIES}")
        if self.family == "svm" and self.kernel not in KERNELS:
            raise DataValidationError(f"unknown kernel {self.kernel!r}, pick from {KERNELS}")
        if self.family == "knn" and self.k < 1:
            raise DataValidationError("k must be >= 1")

    def display_name(self) -> str:
        if self.family == "knn":
            return f"k-NN (k = {self.k})"
        if self.family == "svm":
            return f"SVM ({self.kernel})"
        return {"lda": "LDA", "tree": "Decision-Tree",
                "forest": "Random Forest", "gboost": "GBoost"}[self.family]


@dataclass
class _TreeOnly:
    tree: FlatTree

    def predict_index(self, Q):
        return self.tree.predict(Q).astype(np.int64)

    def to_params(self) -> dict:
        return self.tree.to_params()

    @classmethod
    def from_params(cls, p: dict) -> "_TreeOnly":
        return cls(tree=FlatTree.from_params(p))


@dataclass
class TrainedModel:
    """A fitted classifier: family parameters plus its config echo."""

    config: ClassifierConfig
    class_names: tuple[str, str]
    impl: object
    schema_version: int = MODEL_SCHEMA_VERSION

    @property
    def family(self) -> str:
        return self.config.family


def train(config: ClassifierConfig, data: LabeledDataset) -> TrainedModel:
    """Fit one classifier on a train split, deterministically."""
    if data.n == 0:
        raise DataValidationError("empty train split")
    if len(data.class_names) != 2:
        raise DegenerateDataError(
            f"need a two-class dataset, got classes {data.class_names}"
        )
    X, y = data.X, data.y
    if config.family != "knn" and np.unique(y).size < 2:
        raise DegenerateDataError(f"{config.family} needs both classes in the train split")
    if config.family == "knn":
        impl = KnnModel.fit(X, y, k=config.k)
    elif config.family == "svm":
        impl = SvmModel.fit(X, y, kernel=config.kernel, c=config.c, tol=config.tol,
                            max_passes=config.max_passes, degree=config.degree,
                            coef0=config.coef0)
    elif config.family == "lda":
        impl = LdaModel.fit(X, y)
    elif config.family == "tree":
        impl = _TreeOnly(fit_classification_tree(X, y))
    elif config.family == "forest":
        impl = ForestModel.fit(X, y, n_trees=config.n_trees,
                               max_features=config.max_features, seed=config.rng_seed)
    else:
        impl = GboostModel.fit(X, y, n_rounds=config.n_rounds,
                               max_depth=config.max_depth,
                               learning_rate=config.learning_rate)
    return TrainedModel(config=config, class_names=tuple(data.class_names), impl=impl)


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, BetaVector):
        return x.values.reshape(1, -1)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != N_AC:
        raise DimensionMismatchError(
            f"feature input must have {N_AC} components, got shape {arr.shape}"
        )
    return arr


def predict(model: TrainedModel, x) -> str:
    """Label one feature vector."""
    return predict_many(model, _as_matrix(x))[0]


def predict_many(model: TrainedModel, X) -> list[str]:
    Q = _as_matrix(X)
    idx = model.impl.predict_index(Q)
    return [model.class_names[i] for i in idx]


def evaluate(model: TrainedModel, data: LabeledDataset) -> MetricsReport:
    """Score a model on a test split the Table-report way."""
    if data.n == 0:
        raise DataValidationError("empty test split")
    if tuple(data.class_names) != tuple(model.class_names):
        raise DataValidationError(
            f"model classes {model.class_names} != data classes {data.class_names}"
        )
    predicted = predict_many(model, data.X)
    return report_from_predictions(data.labels, predicted, model.class_names)


_IMPL_TYPES = {
    "knn": KnnModel, "svm": SvmModel, "lda": LdaModel,
    "tree": _TreeOnly, "forest": ForestModel, "gboost": GboostModel,
}


def model_to_json(model: TrainedModel, config_hash: str = "") -> str:
    """Versioned, self-describing flat serialization (sorted keys, repr floats)."""
    doc = {
        "schema_version": model.schema_version,
        "toolkit_version": _toolkit_version,
        "config_hash": config_hash,
        "family": model.family,
        "class_names": list(model.class_names),
        "config": asdict(model.config),
        "params": model.impl.to_params(),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def model_from_json(text: str) -> TrainedModel:
    doc = json.loads(text)
    if doc.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise DataValidationError(
            f"unsupported model schema {doc.get('schema_version')!r}"
        )
    config = ClassifierConfig(**doc["config"])
    impl = _IMPL_TYPES[doc["family"]].from_params(doc["params"])
    return TrainedModel(config=config, class_names=tuple(doc["class_names"]), impl=impl)


def save_model(model: TrainedModel, path, config_hash: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_json(model, config_hash=config_hash) + "\n")


def load_model(path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
