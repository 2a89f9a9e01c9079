"""Command-line front end for reproducible batch runs.

Every subcommand resolves its full configuration (including the seed),
hashes it, embeds toolkit version + config hash in its primary artifacts,
and confines timestamps to a sidecar run log so that re-runs with the
same inputs produce byte-identical outputs.

Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 data validation.
"""

import argparse
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ballistics import (
    CLASS_ONE_PASS,
    CLASS_TWO_PASS,
    ExternalTransferOp,
    ProxyTransferOp,
    aggregate,
    associativity_batch,
    build_dataset,
    check_commutativity,
    check_neutral,
    format_aggregate,
    sample_triples,
    write_property_reports,
)
from .classifiers import (
    ClassifierConfig,
    LabeledDataset,
    evaluate,
    grid_table_csv,
    grid_table_text,
    load_model,
    load_split_datasets,
    run_grid,
    save_model,
    train,
)
from .classifiers.grid import GridResult
from .classifiers.metrics import MetricsReport
from .dct_features import (
    FeatureRecord,
    extract_many,
    read_feature_csv,
    write_class_mean_csv,
    write_feature_csv,
)
from .errors import DataValidationError, DecodeError, OperatorError, StyletraceError
from .imaging import load_image
from .similarity import (
    bhattacharyya,
    chi_square,
    compare,
    correlation,
    rgb_histogram,
    ssim,
    write_ssim_map_png,
)

DEFAULT_SEED = 101  # fixed default: reproducibility over entropy

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


def _config_hash(resolved: dict) -> str:
    text = json.dumps(resolved, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _artifact_comment(config_hash: str) -> str:
    return f"styletrace={__version__} config={config_hash}"


def _write_run_log(primary_out, resolved: dict, config_hash: str) -> None:
    log_path = Path(str(primary_out) + ".run.json")
    doc = {
        "timestamp_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "toolkit_version": __version__,
        "config_hash": config_hash,
        "resolved_config": resolved,
    }
    log_path.parent.mkdir(parents=True, exist_ok=True)
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1, default=str)
        fh.write("\n")


def _workers() -> int | None:
    raw = os.environ.get("STYLETRACE_WORKERS")
    return int(raw) if raw else None


def _image_files(root) -> list[Path]:
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"image directory not found: {root}")
    files = sorted(p for p in root.rglob("*") if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not files:
        raise DataValidationError(f"no PNG/JPEG files under {root}")
    return files


def _label_for(path: Path, root: Path) -> str:
    parent = path.parent
    return parent.name if parent != root else "unlabeled"


def _resolved(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _build_op(args):
    if getattr(args, "op_template", None):
        return ExternalTransferOp(args.op_template, op_id=getattr(args, "op_id", "external"))
    return ProxyTransferOp()


# --- subcommands -----------------------------------------------------------

def _cmd_extract(args) -> int:
    files = _image_files(args.images)
    root = Path(args.images)
    vectors = extract_many(files, workers=_workers())
    records = [FeatureRecord(features=v, label=_label_for(f, root))
               for f, v in zip(files, vectors)]
    resolved = _resolved(args)
    h = _config_hash(resolved)
    write_feature_csv(records, args.out, header_comment=_artifact_comment(h))
    _write_run_log(args.out, resolved, h)
    print(f"extracted {len(records)} feature rows -> {args.out}")
    return EXIT_OK


def _dataset_from_csv(features_csv, manifest, want_split):
    if manifest:
        train_ds, test_ds = load_split_datasets(features_csv, manifest)
        return train_ds if want_split == "train" else test_ds
    records = read_feature_csv(features_csv)
    return LabeledDataset.from_records(records, split=want_split)


def _cmd_train(args) -> int:
    data = _dataset_from_csv(args.features, args.split_manifest, "train")
    config = ClassifierConfig(
        family=args.family, k=args.k, kernel=args.kernel, rng_seed=args.seed,
    )
    model = train(config, data)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    save_model(model, args.out, config_hash=h)
    _write_run_log(args.out, resolved, h)
    print(f"trained {config.display_name()} on {data.n} rows -> {args.out}")
    return EXIT_OK


def _report_csv(report: MetricsReport, name: str, config_hash: str) -> str:
    lines = [f"# {_artifact_comment(config_hash)}",
             "classifier,note,class,precision,recall,f1,accuracy_percent"]
    per_class = report.per_class()
    for cls in report.class_names:
        m = per_class[cls]
        lines.append(f"{name},,{cls},{m.precision:.2f},{m.recall:.2f},{m.f1:.2f},"
                     f"{report.accuracy_percent}")
    return "\n".join(lines) + "\n"


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = _dataset_from_csv(args.features, args.split_manifest, "test")
    report = evaluate(model, data)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_report_csv(report, model.config.display_name(), h))
    _write_run_log(args.out, resolved, h)
    fake_result = [GridResult(entry=_entry_for(model.config), report=report)]
    print(grid_table_text(fake_result), end="")
    if report.flags:
        print(f"flags: {','.join(report.flags)}")
    return EXIT_OK


def _entry_for(config):
    from .classifiers.grid import GridEntry

    return GridEntry(config=config)


def _cmd_grid(args) -> int:
    train_ds, test_ds = load_split_datasets(args.features, args.split_manifest)
    results = run_grid(train_ds, test_ds, seed=args.seed,
                       include_text_only=not args.table_only,
                       enforce_protocol=not args.no_protocol_check)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    csv_text = grid_table_csv(results, header_comment=_artifact_comment(h))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text)
    table = grid_table_text(results)
    if args.text_out:
        with open(args.text_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# {_artifact_comment(h)}\n" + table)
    _write_run_log(args.out, resolved, h)
    print(table, end="")
    return EXIT_OK


def _cmd_fig4(args) -> int:
    records = read_feature_csv(args.features)
    by_class: dict[str, list] = {}
    for rec in records:
        by_class.setdefault(rec.label, []).append(rec.features)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    write_class_mean_csv(by_class, args.out,
                         classes=(CLASS_ONE_PASS, CLASS_TWO_PASS),
                         header_comment=_artifact_comment(h))
    _write_run_log(args.out, resolved, h)
    print(f"wrote per-class mean curves -> {args.out}")
    return EXIT_OK


def _cmd_make_dataset(args) -> int:
    rng = np.random.default_rng(args.seed)
    pools = []
    for d in (args.sources, args.targets1, args.targets2):
        files = _image_files(d)
        perm = rng.permutation(len(files))
        pools.append([files[i] for i in perm])
    op = _build_op(args)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    manifest = build_dataset(pools[0], pools[1], pools[2], op,
                             counts=(args.train, args.test), out_dir=args.out,
                             toolkit_version=__version__, config_hash=h)
    _write_run_log(Path(args.out) / "manifest.jsonl", resolved, h)
    n2 = len(manifest.by_class(CLASS_ONE_PASS))
    n3 = len(manifest.by_class(CLASS_TWO_PASS))
    print(f"built dataset: {n2} x {CLASS_ONE_PASS}, {n3} x {CLASS_TWO_PASS} -> {args.out}")
    return EXIT_OK


def _cmd_ssim(args) -> int:
    a, b = load_image(args.a), load_image(args.b)
    result = ssim(a, b)
    resolved = _resolved(args)
    h = _config_hash(resolved)
    if args.map_out:
        write_ssim_map_png(result, args.map_out)
    if args.json_out:
        doc = {"ssim": result.mean_score, "toolkit_version": __version__,
               "config_hash": h, "a": str(args.a), "b": str(args.b)}
        with open(args.json_out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        _write_run_log(args.json_out, resolved, h)
    print(f"SSIM: {result.mean_score:.6g}")
    return EXIT_OK


def _cmd_hist_compare(args) -> int:
    ha = rgb_histogram(load_image(args.a))
    hb = rgb_histogram(load_image(args.b))
    methods = (["correlation", "chi-square", "bhattacharyya"]
               if args.method == "all" else [args.method])
    labels = {"correlation": "Correlation", "chi-square": "Chi-Square",
              "bhattacharyya": "Bhattacharyya distance"}
    scores = {m: compare(ha, hb, m) for m in methods}
    for m in methods:
        print(f"{labels[m]}: {scores[m]:.6g}")
    if args.json_out:
        resolved = _resolved(args)
        h = _config_hash(resolved)
        doc = {"toolkit_version": __version__, "config_hash": h,
               "a": str(args.a), "b": str(args.b),
               "scores": {m: scores[m] for m in methods}}
        with open(args.json_out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
        _write_run_log(args.json_out, resolved, h)
    return EXIT_OK


def _cmd_properties(args) -> int:
    files = _image_files(args.images)
    if len(files) < 3:
        raise DataValidationError("properties runs need at least 3 images")
    op = _build_op(args)
    resolved = _resolved(args)
    h = _config_hash(resolved)

    reports = []
    if args.check in ("neutral", "all"):
        first = load_image(files[0])
        reports.extend(check_neutral(op, first, threshold=args.neutral_threshold,
                                     source_id=files[0].stem))
    if args.check in ("commutativity", "all"):
        pair_idx = sample_triples(len(files), args.triples, args.seed + 1)
        comm = [
            check_commutativity(op, load_image(files[i]), load_image(files[j]),
                                ids=(files[i].stem, files[j].stem))
            for i, j, _ in pair_idx
        ]
        reports.extend(comm)
        print("Commutativity aggregate:")
        print(format_aggregate(aggregate(comm)), end="")
    if args.check in ("associativity", "all"):
        items = [(f.stem, f) for f in files]
        assoc, stats = associativity_batch(op, items, args.triples, args.seed)
        reports.extend(assoc)
        print("Associativity aggregate:")
        print(format_aggregate(stats), end="")

    meta = {"record": "header", "toolkit_version": __version__, "config_hash": h,
            "operator_id": op.op_id, "seed": args.seed, "triples": args.triples}
    write_property_reports(reports, json_path=args.out_json, csv_path=args.out_csv,
                           header_comment=_artifact_comment(h), meta=meta)
    if args.out_json:
        _write_run_log(args.out_json, resolved, h)
    print(f"{len(reports)} property reports written")
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="styletrace",
        description="Count generative style-transfer passes on face images "
                    "and probe the transfer operation's algebra.",
    )
    p.add_argument("--version", action="version", version=f"styletrace {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("extract", help="extract 63-value DCT scale features per image")
    sp.add_argument("--images", required=True, help="directory scanned recursively")
    sp.add_argument("--out", required=True, help="feature CSV path")
    sp.set_defaults(func=_cmd_extract)

    sp = sub.add_parser("train", help="fit one classifier on a feature store")
    sp.add_argument("--features", required=True)
    sp.add_argument("--family", required=True,
                    choices=["knn", "svm", "lda", "tree", "forest", "gboost"])
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--kernel", default="rbf",
                    choices=["linear", "poly", "rbf", "sigmoid"])
    sp.add_argument("--split-manifest", default=None)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", required=True, help="model JSON path")
    sp.set_defaults(func=_cmd_train)

    sp = sub.add_parser("evaluate", help="score a saved model on a test split")
    sp.add_argument("--model", required=True)
    sp.add_argument("--features", required=True)
    sp.add_argument("--split-manifest", default=None)
    sp.add_argument("--out", required=True, help="report CSV path")
    sp.set_defaults(func=_cmd_evaluate)

    sp = sub.add_parser("grid", help="run the full classifier grid (table report)")
    sp.add_argument("--features", required=True)
    sp.add_argument("--split-manifest", required=True)
    sp.add_argument("--out", required=True, help="report CSV path")
    sp.add_argument("--text-out", default=None, help="also write the aligned text table")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--table-only", action="store_true",
                    help="drop the text-only k=1 row")
    sp.add_argument("--no-protocol-check", action="store_true",
                    help="allow splits other than 1200/200 per class")
    sp.set_defaults(func=_cmd_grid)

    sp = sub.add_parser("fig4", help="per-class mean curves of the 63 scale features")
    sp.add_argument("--features", required=True)
    sp.add_argument("--out", required=True, help="curve CSV path")
    sp.set_defaults(func=_cmd_fig4)

    sp = sub.add_parser("make-dataset", help="build the one-pass/two-pass corpus")
    sp.add_argument("--sources", required=True)
    sp.add_argument("--targets1", required=True)
    sp.add_argument("--targets2", required=True)
    sp.add_argument("--out", required=True, help="output dataset root")
    sp.add_argument("--train", type=int, default=1200, help="train rows per class")
    sp.add_argument("--test", type=int, default=200, help="test rows per class")
    sp.add_argument("--op-template", default=None,
                    help="external engine command with {source} {target} {output}")
    sp.add_argument("--op-id", default="external")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=_cmd_make_dataset)

    sp = sub.add_parser("ssim", help="structural similarity score (and map) of two images")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--map-out", default=None, help="grayscale PNG of the score map")
    sp.add_argument("--json-out", default=None)
    sp.set_defaults(func=_cmd_ssim)

    sp = sub.add_parser("hist-compare", help="RGB-histogram comparison of two images")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--method", default="all",
                    choices=["all", "correlation", "chi-square", "bhattacharyya"])
    sp.add_argument("--json-out", default=None)
    sp.set_defaults(func=_cmd_hist_compare)

    sp = sub.add_parser("properties", help="algebraic property checks of a transfer operator")
    sp.add_argument("--images", required=True)
    sp.add_argument("--op", default="proxy", choices=["proxy", "external"])
    sp.add_argument("--op-template", default=None)
    sp.add_argument("--op-id", default="external")
    sp.add_argument("--check", default="all",
                    choices=["neutral", "commutativity", "associativity", "all"])
    sp.add_argument("--triples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--neutral-threshold", type=float, default=0.99)
    sp.add_argument("--out-json", default=None)
    sp.add_argument("--out-csv", default=None)
    sp.set_defaults(func=_cmd_properties)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "op", None) == "external" and not args.op_template:
        parser.error("--op external needs --op-template")
    try:
        return args.func(args)
    except (FileNotFoundError, DecodeError, OperatorError, OSError) as exc:
        print(f"styletrace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataValidationError, StyletraceError, ValueError) as exc:
        print(f"styletrace: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
