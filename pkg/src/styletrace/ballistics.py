"""Style-transfer operator contract, dataset protocol, and the algebraic
property harness (neutral element, commutativity, associativity).

The deterministic proxy operator transfers per-channel pixel statistics
(mean and standard deviation) from target to source, standing in for a
generative engine so the whole protocol runs offline. Real engines plug
in through ExternalTransferOp, a command-template adapter.
"""

import json
import os
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DataValidationError,
    DisjointnessError,
    OperatorError,
)
from .imaging import RasterImage, load_image
from .similarity import (
    SsimResult,
    bhattacharyya,
    chi_square,
    correlation,
    rgb_histogram,
    ssim,
)

CLASS_ONE_PASS = "Deepfake-2"
CLASS_TWO_PASS = "Deepfake-3"
NEUTRAL_SSIM_THRESHOLD = 0.99


class StyleTransferOp:
    """Binary operation: apply(source, target) -> image sized like source."""

    op_id: str = "abstract"

    def apply(self, source: RasterImage, target: RasterImage) -> RasterImage:
        raise NotImplementedError


class ProxyTransferOp(StyleTransferOp):
    """Per-channel affine statistics transfer, rounded and clamped to 8 bits.

    out = clamp(round((src - mu_src) * (sigma_tgt / sigma_src) + mu_tgt));
    a zero-variance source channel becomes the constant target mean.
    Deterministic: identical inputs give bit-identical outputs.
    """

    op_id = "proxy-channel-stats"

    def apply(self, source: RasterImage, target: RasterImage) -> RasterImage:
        src = source.pixels.astype(np.float64)
        tgt = target.pixels.astype(np.float64)
        out = np.empty_like(src)
        for c in range(3):
            mu_s, sd_s = src[:, :, c].mean(), src[:, :, c].std()
            mu_t, sd_t = tgt[:, :, c].mean(), tgt[:, :, c].std()
            if sd_s == 0.0:
                out[:, :, c] = mu_t
            else:
                out[:, :, c] = (src[:, :, c] - mu_s) * (sd_t / sd_s) + mu_t
        return RasterImage(np.clip(np.round(out), 0, 255).astype(np.uint8))


class ExternalTransferOp(StyleTransferOp):
    """Adapter for a user-supplied engine command.

    The template must contain {source}, {target} and {output} placeholders;
    it runs through the shell, and a nonzero exit status (or a missing
    output file) raises OperatorError. Engine identifier and seed, when
    known, belong in op_id so manifests record provenance.
    """

    def __init__(self, command_template: str, op_id: str = "external", timeout: float | None = None):
        for ph in ("{source}", "{target}", "{output}"):
            if ph not in command_template:
                raise DataValidationError(f"command template lacks {ph}")
        self.command_template = command_template
        self.op_id = op_id
        self.timeout = timeout

    def apply(self, source: RasterImage, target: RasterImage) -> RasterImage:
        with tempfile.TemporaryDirectory(prefix="styletrace-op-") as tmp:
            tmp = Path(tmp)
            s_path, t_path, o_path = tmp / "source.png", tmp / "target.png", tmp / "output.png"
            write_png(source, s_path)
            write_png(target, t_path)
            cmd = self.command_template.format(source=s_path, target=t_path, output=o_path)
            try:
                proc = subprocess.run(cmd, shell=True, capture_output=True,
                                      timeout=self.timeout)
            except subprocess.TimeoutExpired as exc:
                raise OperatorError(f"engine timed out: {cmd}") from exc
            if proc.returncode != 0:
                raise OperatorError(
                    f"engine exited {proc.returncode}: {proc.stderr.decode(errors='replace')[:500]}"
                )
            if not o_path.exists():
                raise OperatorError("engine exited 0 but wrote no output file")
            return load_image(o_path)


def write_png(img: RasterImage, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(img.pixels), mode="RGB").save(path, format="PNG")


def white_like(img: RasterImage) -> RasterImage:
    return RasterImage(np.full_like(img.pixels, 255))


def black_like(img: RasterImage) -> RasterImage:
    return RasterImage(np.zeros_like(img.pixels))


# ---------------------------------------------------------------------------
# Dataset protocol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetEntry:
    id: str
    path: str
    label: str                 # CLASS_ONE_PASS or CLASS_TWO_PASS
    source_id: str
    target_ids: tuple[str, ...]  # application order
    operator_id: str
    split: str                 # train | test


@dataclass
class DatasetManifest:
    entries: list[DatasetEntry]
    operator_id: str
    toolkit_version: str = ""
    config_hash: str = ""

    def by_class(self, label: str) -> list[DatasetEntry]:
        return [e for e in self.entries if e.label == label]


def _resolve(item) -> tuple[str, RasterImage]:
    """Pool items are (id, RasterImage) pairs or file paths."""
    if isinstance(item, (str, Path)):
        return Path(item).stem, load_image(item)
    item_id, img = item
    if isinstance(img, (str, Path)):
        return str(item_id), load_image(img)
    return str(item_id), img


def _pool_ids(pool) -> list[str]:
    ids = []
    for item in pool:
        if isinstance(item, (str, Path)):
            ids.append(Path(item).stem)
        else:
            ids.append(str(item[0]))
    return ids


def build_dataset(sources, targets1, targets2, op: StyleTransferOp,
                  counts: tuple[int, int], out_dir,
                  toolkit_version: str = "", config_hash: str = "") -> DatasetManifest:
    """Build the one-pass / two-pass corpus and its manifest.

    Entry i pairs sources[i] with targets1[i] for the single-pass image and
    re-applies the operator with targets2[i] for the two-pass image. The
    first `counts[0]` entries per class are the train split, the next
    `counts[1]` the test split. The second-pass pool must be disjoint (by
    id) from both the sources and the first-pass pool. The manifest is
    written atomically once every entry committed, so a failing operator
    cannot leave a partial manifest behind.
    """
    n_train, n_test = counts
    n = n_train + n_test
    sources, targets1, targets2 = list(sources), list(targets1), list(targets2)
    if min(len(sources), len(targets1), len(targets2)) < n:
        raise DataValidationError(
            f"need {n} items per pool, got {len(sources)}/{len(targets1)}/{len(targets2)}"
        )
    s_ids, t1_ids, t2_ids = map(_pool_ids, (sources, targets1, targets2))
    clash = set(t2_ids[:n]) & (set(t1_ids[:n]) | set(s_ids[:n]))
    if clash:
        raise DisjointnessError(
            f"second-pass targets overlap sources/first-pass targets: {sorted(clash)[:5]}"
        )

    out_dir = Path(out_dir)
    entries: list[DatasetEntry] = []
    for i in range(n):
        split = "train" if i < n_train else "test"
        sid, src = _resolve(sources[i])
        t1_id, t1 = _resolve(targets1[i])
        t2_id, t2 = _resolve(targets2[i])
        once = op.apply(src, t1)
        twice = op.apply(once, t2)
        for label, img, tids, eid in (
            (CLASS_ONE_PASS, once, (t1_id,), f"d2_{sid}"),
            (CLASS_TWO_PASS, twice, (t1_id, t2_id), f"d3_{sid}"),
        ):
            rel = f"{label}/{eid}.png"
            write_png(img, out_dir / rel)
            entries.append(DatasetEntry(
                id=eid, path=rel, label=label, source_id=sid,
                target_ids=tids, operator_id=op.op_id, split=split,
            ))
    manifest = DatasetManifest(entries=entries, operator_id=op.op_id,
                               toolkit_version=toolkit_version, config_hash=config_hash)
    write_manifest(manifest, out_dir / "manifest.jsonl")
    return manifest


def write_manifest(manifest: DatasetManifest, path) -> None:
    """Atomic JSON-lines write: one header record, then one record per entry."""
    path = Path(path)
    lines = [json.dumps({
        "record": "header",
        "operator_id": manifest.operator_id,
        "toolkit_version": manifest.toolkit_version,
        "config_hash": manifest.config_hash,
        "entry_count": len(manifest.entries),
    }, sort_keys=True)]
    for e in manifest.entries:
        lines.append(json.dumps({
            "record": "entry", "id": e.id, "path": e.path, "class": e.label,
            "source_id": e.source_id, "target_ids": list(e.target_ids),
            "operator_id": e.operator_id, "split": e.split,
        }, sort_keys=True))
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_manifest(path) -> DatasetManifest:
    header = {}
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("record") == "header":
                header = rec
            elif rec.get("record") == "entry":
                entries.append(DatasetEntry(
                    id=rec["id"], path=rec["path"], label=rec["class"],
                    source_id=rec["source_id"], target_ids=tuple(rec["target_ids"]),
                    operator_id=rec["operator_id"], split=rec["split"],
                ))
    if not entries:
        raise DataValidationError(f"{path} holds no dataset entries")
    return DatasetManifest(
        entries=entries,
        operator_id=header.get("operator_id", entries[0].operator_id),
        toolkit_version=header.get("toolkit_version", ""),
        config_hash=header.get("config_hash", ""),
    )


def verify_dataset(manifest: DatasetManifest, root, op: StyleTransferOp,
                   targets2_by_id: dict) -> None:
    """Soundness check: files exist; two-pass images re-derive from their
    one-pass parent under the operator. Raises DataValidationError on drift."""
    root = Path(root)
    one_pass = {e.source_id: e for e in manifest.by_class(CLASS_ONE_PASS)}
    for e in manifest.entries:
        if not (root / e.path).exists():
            raise DataValidationError(f"manifest references missing file {e.path}")
    for e in manifest.by_class(CLASS_TWO_PASS):
        parent = one_pass.get(e.source_id)
        if parent is None or parent.target_ids != e.target_ids[:1]:
            raise DataValidationError(f"no matching one-pass parent for {e.id}")
        t2 = targets2_by_id[e.target_ids[1]]
        redone = op.apply(load_image(root / parent.path), t2)
        stored = load_image(root / e.path)
        if not np.array_equal(redone.pixels, stored.pixels):
            raise DataValidationError(f"{e.id} does not re-derive from {parent.id}")


# ---------------------------------------------------------------------------
# Algebraic property harness
# ---------------------------------------------------------------------------

@dataclass
class PropertyReport:
    """Scores for one property check on concrete operands.

    Neutral-element reports carry the SSIM comparison only; the
    commutativity/associativity checks add the three histogram metrics
    between the two candidate outputs.
    """

    property: str
    operand_ids: tuple[str, ...]
    ssim: SsimResult
    correlation: float | None = None
    chi_square: float | None = None
    bhattacharyya: float | None = None
    notes: str = ""

    def to_record(self) -> dict:
        return {
            "property": self.property,
            "operand_ids": list(self.operand_ids),
            "ssim": self.ssim.mean_score,
            "correlation": self.correlation,
            "chi_square": self.chi_square,
            "bhattacharyya": self.bhattacharyya,
            "notes": self.notes,
        }


def _dual_output_report(prop: str, ids, x: RasterImage, y: RasterImage) -> PropertyReport:
    hx, hy = rgb_histogram(x), rgb_histogram(y)
    return PropertyReport(
        property=prop,
        operand_ids=tuple(ids),
        ssim=ssim(x, y),
        correlation=correlation(hx, hy),
        chi_square=chi_square(hx, hy),
        bhattacharyya=bhattacharyya(hx, hy),
    )


def check_neutral(op: StyleTransferOp, a: RasterImage, candidates=None,
                  threshold: float = NEUTRAL_SSIM_THRESHOLD,
                  source_id: str = "A") -> list[PropertyReport]:
    """Try candidate targets as neutral elements: is op(a, t) still a?

    Default candidates are an all-white image, an all-black image, and
    the source itself. A candidate counts as neutral when SSIM(a, out)
    reaches the declared threshold.
    """
    if candidates is None:
        candidates = [("all-white", white_like(a)), ("all-black", black_like(a)),
                      ("self", a)]
    candidates = list(candidates)
    if not candidates:
        raise DataValidationError("need at least one neutral candidate")
    reports = []
    for cand_id, cand in candidates:
        out = op.apply(a, cand)
        res = ssim(a, out)
        verdict = "neutral" if res.mean_score >= threshold else "not neutral"
        reports.append(PropertyReport(
            property="Neutral",
            operand_ids=(source_id, str(cand_id)),
            ssim=res,
            notes=f"{verdict} (SSIM {res.mean_score:.5f} vs threshold {threshold})",
        ))
    return reports


def check_commutativity(op: StyleTransferOp, a: RasterImage, b: RasterImage,
                        ids=("A", "B")) -> PropertyReport:
    """Compare op(a, b) against op(b, a)."""
    x = op.apply(a, b)
    y = op.apply(b, a)
    return _dual_output_report("Commutativity", ids, x, y)


def check_associativity(op: StyleTransferOp, a: RasterImage, b: RasterImage,
                        c: RasterImage, ids=("A", "B", "C")) -> PropertyReport:
    """Compare op(op(a, b), c) against op(a, op(b, c))."""
    x = op.apply(op.apply(a, b), c)
    y = op.apply(a, op.apply(b, c))
    return _dual_output_report("Associativity", ids, x, y)


@dataclass
class AggregateStats:
    """Population mean/variance per metric over a batch of reports."""

    batch_size: int
    stats: dict[str, tuple[float, float]] = field(default_factory=dict)


_METRIC_LABELS = (
    ("ssim", "SSIM"),
    ("correlation", "Correlation"),
    ("chi_square", "Chi-Square"),
    ("bhattacharyya", "Bhattacharyya distance"),
)


def aggregate(reports: list[PropertyReport]) -> AggregateStats:
    if not reports:
        raise DataValidationError("cannot aggregate zero reports")
    stats = {}
    for key, _label in _METRIC_LABELS:
        vals = []
        for r in reports:
            v = r.ssim.mean_score if key == "ssim" else getattr(r, key)
            if v is not None:
                vals.append(v)
        if vals:
            arr = np.asarray(vals, dtype=np.float64)
            stats[key] = (float(arr.mean()), float(arr.var()))
    return AggregateStats(batch_size=len(reports), stats=stats)


def format_aggregate(agg: AggregateStats) -> str:
    """Render as `<Metric>: <mean> (with variance = <var>)`, one per line."""
    lines = []
    for key, label in _METRIC_LABELS:
        if key in agg.stats:
            mean, var = agg.stats[key]
            lines.append(f"{label}: {mean:.6g} (with variance = {var:.6g})")
    return "\n".join(lines) + "\n"


def sample_triples(item_count: int, n: int, seed: int) -> list[tuple[int, int, int]]:
    """Uniform seeded sampling of n distinct-index (A, B, C) triples."""
    if item_count < 3:
        raise DataValidationError("need at least 3 images to sample triples")
    rng = np.random.default_rng(seed)
    return [tuple(int(j) for j in rng.choice(item_count, size=3, replace=False))
            for _ in range(n)]


def associativity_batch(op: StyleTransferOp, items, n_triples: int,
                        seed: int) -> tuple[list[PropertyReport], AggregateStats]:
    """Associativity reports over seeded random triples plus their aggregate."""
    items = list(items)
    triples = sample_triples(len(items), n_triples, seed)
    reports = []
    for ia, ib, ic in triples:
        (aid, a), (bid, b), (cid, c) = _resolve(items[ia]), _resolve(items[ib]), _resolve(items[ic])
        reports.append(check_associativity(op, a, b, c, ids=(aid, bid, cid)))
    return reports, aggregate(reports)


def write_property_reports(reports: list[PropertyReport], json_path=None,
                           csv_path=None, header_comment: str | None = None,
                           meta: dict | None = None) -> None:
    """Batch output: JSON array of reports and/or a CSV summary.

    When meta is given it is prepended to the JSON array as a header
    record, mirroring the manifest convention.
    """
    if json_path is not None:
        doc = ([meta] if meta else []) + [r.to_record() for r in reports]
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")
    if csv_path is not None:
        lines = []
        if header_comment:
            lines.append(f"# {header_comment}")
        lines.append("property,operand_ids,ssim,correlation,chi_square,bhattacharyya,notes")
        for r in reports:
            rec = r.to_record()
            fields = [
                rec["property"], "|".join(rec["operand_ids"]),
                f"{rec['ssim']:.17g}",
                "" if rec["correlation"] is None else f"{rec['correlation']:.17g}",
                "" if rec["chi_square"] is None else f"{rec['chi_square']:.17g}",
                "" if rec["bhattacharyya"] is None else f"{rec['bhattacharyya']:.17g}",
                rec["notes"].replace(",", ";"),
            ]
            lines.append(",".join(fields))
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
