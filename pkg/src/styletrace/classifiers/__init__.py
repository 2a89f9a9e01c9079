from .api import (
    FAMILIES,
    ClassifierConfig,
    TrainedModel,
    evaluate,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    predict_many,
    save_model,
    train,
)
from .dataset import (
    DEFAULT_CLASSES,
    LabeledDataset,
    load_split_datasets,
    validate_paper_protocol,
)
from .grid import (
    GridEntry,
    GridResult,
    grid_entries,
    grid_table_csv,
    grid_table_text,
    run_grid,
)
from .metrics import ClassMetrics, MetricsReport, report_from_predictions

__all__ = [
    "FAMILIES",
    "ClassifierConfig",
    "TrainedModel",
    "train",
    "predict",
    "predict_many",
    "evaluate",
    "save_model",
    "load_model",
    "model_to_json",
    "model_from_json",
    "LabeledDataset",
    "DEFAULT_CLASSES",
    "load_split_datasets",
    "validate_paper_protocol",
    "GridEntry",
    "GridResult",
    "grid_entries",
    "run_grid",
    "grid_table_text",
    "grid_table_csv",
    "ClassMetrics",
    "MetricsReport",
    "report_from_predictions",
]
