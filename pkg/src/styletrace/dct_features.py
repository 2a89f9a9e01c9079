"""Blockwise 8x8 DCT statistics and the 63-value Laplacian scale vector.

Per image: luminance -> non-overlapping 8x8 blocks -> orthonormal 2-D
DCT-II (after a level shift of 128) -> zigzag scan. For each of the 63 AC
positions, the coefficients pooled over all blocks are modeled as a
zero-centered Laplacian and summarized by its scale beta = sigma/sqrt(2).
The DC position is dropped: it only tracks the block mean.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataValidationError
from .imaging import Block8, LumaImage, RasterImage, block_grid, load_image, to_luminance

N_AC = 63
_LEVEL_SHIFT = 128.0
_SQRT2 = np.sqrt(2.0)


def _dct_basis() -> np.ndarray:
    """Orthonormal DCT-II basis: A[u, x] = a(u) cos((2x+1)u pi / 16)."""
    u = np.arange(8).reshape(8, 1).astype(np.float64)
    x = np.arange(8).reshape(1, 8).astype(np.float64)
    a = np.full((8, 1), 0.5)
    a[0, 0] = 1.0 / (2.0 * _SQRT2)
    return a * np.cos((2.0 * x + 1.0) * u * np.pi / 16.0)


_BASIS = _dct_basis()
_BASIS.setflags(write=False)


def _zigzag_positions() -> list[tuple[int, int]]:
    """JPEG scan order: (0,0), (0,1), (1,0), (2,0), ... down to (7,7)."""
    order = []
    for s in range(15):
        diag = [(s - j, j) for j in range(s + 1) if 0 <= s - j < 8 and 0 <= j < 8]
        if s % 2 == 1:
            diag.reverse()  # odd anti-diagonals run top-right -> bottom-left
        order.extend(diag)
    return order

ZIGZAG_POSITIONS: tuple[tuple[int, int], ...] = tuple(_zigzag_positions())
# flat row-major index of the k-th scanned coefficient
_ZIGZAG_FLAT = np.array([u * 8 + v for u, v in ZIGZAG_POSITIONS])


@dataclass(frozen=True)
class CoeffBlock:
    """8x8 frequency-domain coefficients (u = row freq, v = column freq)."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.coefficients, dtype=np.float64))
        if c.shape != (8, 8):
            raise DataValidationError(f"CoeffBlock needs 8x8 values, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


@dataclass(frozen=True)
class LaplacianModel:
    """Zero-centered Laplacian fit for one AC position: P(x) = exp(-|x|/beta)/(2 beta)."""

    beta: float
    position: int
    mu: float = 0.0


@dataclass(frozen=True)
class BetaVector:
    """The 63 ordered Laplacian scales of one image (index i <-> AC position i)."""

    values: np.ndarray
    source_id: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.shape != (N_AC,):
            raise DataValidationError(f"BetaVector needs {N_AC} values, got {v.shape}")
        if v.size and v.min() < 0.0:
            raise DataValidationError("beta values must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def dct2_8x8(block: Block8) -> CoeffBlock:
    """Orthonormal 2-D DCT-II of the level-shifted block."""
    shifted = block.samples - _LEVEL_SHIFT
    return CoeffBlock(_BASIS @ shifted @ _BASIS.T)


def idct2_8x8(coeffs: CoeffBlock) -> np.ndarray:
    """Inverse of dct2_8x8, returning spatial samples (level shift restored)."""
    return _BASIS.T @ coeffs.coefficients @ _BASIS + _LEVEL_SHIFT


def zigzag(coeffs: CoeffBlock) -> np.ndarray:
    """Scan an 8x8 coefficient block into the 64-vector JPEG order."""
    return coeffs.coefficients.reshape(64)[_ZIGZAG_FLAT].copy()


def inverse_zigzag(vec: np.ndarray) -> np.ndarray:
    """Place a 64-vector back on the 8x8 grid (zigzag's inverse)."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (64,):
        raise DataValidationError(f"expected a 64-vector, got {vec.shape}")
    out = np.empty(64)
    out[_ZIGZAG_FLAT] = vec
    return out.reshape(8, 8)


def estimate_beta(samples, position: int) -> LaplacianModel:
    """Fit the Laplacian scale at one AC position: beta = sigma/sqrt(2).

    sigma is the population standard deviation about the sample mean; mu
    is reported as 0 per the zero-centered model. Needs >= 2 samples.
    """
    if not 1 <= position <= N_AC:
        raise DataValidationError(f"AC position must be in 1..63, got {position}")
    s = np.asarray(samples, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise DataValidationError("beta estimation needs at least 2 samples")
    sigma = np.sqrt(np.mean((s - s.mean()) ** 2))
    return LaplacianModel(beta=float(sigma / _SQRT2), position=position)


def _zigzagged_block_coeffs(luma: LumaImage) -> np.ndarray:
    """All blocks' DCT coefficients in scan order, shape (n_blocks, 64)."""
    grid = block_grid(luma)
    blocks = grid.reshape(-1, 8, 8) - _LEVEL_SHIFT
    coeffs = np.einsum("ux,nxy,vy->nuv", _BASIS, blocks, _BASIS, optimize=True)
    return coeffs.reshape(-1, 64)[:, _ZIGZAG_FLAT]


def extract_features(img: RasterImage, source_id: str = "") -> BetaVector:
    """Full pipeline: image -> luminance -> blocks -> DCT -> per-position beta."""
    scanned = _zigzagged_block_coeffs(to_luminance(img))
    if scanned.shape[0] < 2:
        raise DataValidationError("need at least 2 blocks to estimate beta")
    centered = scanned - scanned.mean(axis=0)
    sigma = np.sqrt(np.mean(centered**2, axis=0))
    return BetaVector(values=sigma[1:] / _SQRT2, source_id=source_id)


def extract_from_file(path) -> BetaVector:
    """Load one image file and extract its BetaVector (id = file stem)."""
    return extract_features(load_image(path), source_id=Path(path).stem)


def extract_many(paths, workers: int | None = None) -> list[BetaVector]:
    """Extract features for many files, concurrently but in input order."""
    paths = list(paths)
    if workers is not None and workers <= 1:
        return [extract_from_file(p) for p in paths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(extract_from_file, paths))


def average_betas(features) -> np.ndarray:
    """Component-wise mean over a collection of BetaVectors."""
    feats = list(features)
    if not feats:
        raise DataValidationError("cannot average an empty feature set")
    return np.mean([f.values for f in feats], axis=0)


# ---------------------------------------------------------------------------
# Feature store (CSV interchange between extraction and training)
# ---------------------------------------------------------------------------

FEATURE_COLUMNS = ["source_id", "label"] + [f"beta_{i}" for i in range(1, N_AC + 1)]


@dataclass
class FeatureRecord:
    features: BetaVector
    label: str = ""


def format_feature_row(rec: FeatureRecord) -> str:
    vals = ",".join(f"{v:.17g}" for v in rec.features.values)
    return f"{rec.features.source_id},{rec.label},{vals}"


def write_feature_csv(records, path, header_comment: str | None = None) -> None:
    """One row per image: source_id, label, beta_1..beta_63 (17 sig. digits)."""
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(",".join(FEATURE_COLUMNS))
    lines.extend(format_feature_row(r) for r in records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_feature_csv(path) -> list[FeatureRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        rows = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if not rows or rows[0].split(",")[:2] != ["source_id", "label"]:
        raise DataValidationError(f"{path} is not a feature store CSV")
    for ln in rows[1:]:
        parts = ln.split(",")
        if len(parts) != 2 + N_AC:
            raise DataValidationError(
                f"feature row has {len(parts)} columns, expected {2 + N_AC}"
            )
        vec = BetaVector(
            values=np.array([float(x) for x in parts[2:]]), source_id=parts[0]
        )
        records.append(FeatureRecord(features=vec, label=parts[1]))
    return records


def write_class_mean_csv(features_by_class: dict, path, classes=("Deepfake-2", "Deepfake-3"),
                         header_comment: str | None = None) -> None:
    """Plot data for the per-class mean beta curves: ac_index, one column per class."""
    missing = [c for c in classes if not features_by_class.get(c)]
    if missing:
        raise DataValidationError(f"no feature vectors for class(es): {missing}")
    means = {c: average_betas(features_by_class[c]) for c in classes}
    lines = []
    if header_comment:
        lines.append(f"# {header_comment}")
    suffix = {"Deepfake-2": "class2", "Deepfake-3": "class3"}
    lines.append("ac_index," + ",".join(f"mean_beta_{suffix.get(c, c)}" for c in classes))
    for i in range(N_AC):
        lines.append(f"{i + 1}," + ",".join(f"{means[c][i]:.17g}" for c in classes))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
