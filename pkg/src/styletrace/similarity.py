"""SSIM (score + map) and RGB-histogram comparison metrics.

SSIM follows the original Wang et al. defaults: 11x11 Gaussian window with
sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 255, computed on luminance.
The histogram comparisons implement the OpenCV tutorial definitions of
Correlation, Chi-Square and Bhattacharyya distance.
"""

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.signal import convolve2d

from .errors import DataValidationError, DimensionMismatchError
from .imaging import LumaImage, RasterImage, to_luminance

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
_K1, _K2, _L = 0.01, 0.03, 255.0
_C1 = (_K1 * _L) ** 2
_C2 = (_K2 * _L) ** 2

COMPARE_METHODS = ("correlation", "chi-square", "bhattacharyya")


def _gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()

_WINDOW = _gaussian_window()
_WINDOW.setflags(write=False)


@dataclass(frozen=True)
class SsimResult:
    """Mean SSIM plus the per-window score map.

    map[i, j] scores the 11x11 window whose top-left corner sits at image
    pixel (i, j); only fully interior windows are evaluated, so the map is
    (h-10) x (w-10). mean_score is the arithmetic mean of the map.
    """

    mean_score: float
    map: np.ndarray


def _as_luma_plane(img) -> np.ndarray:
    if isinstance(img, RasterImage):
        return to_luminance(img).samples
    if isinstance(img, LumaImage):
        return img.samples
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise DataValidationError(f"expected an image or 2-d plane, got {arr.shape}")
    return arr


def ssim(a, b) -> SsimResult:
    """Structural similarity between two equally-sized images."""
    pa, pb = _as_luma_plane(a), _as_luma_plane(b)
    if pa.shape != pb.shape:
        raise DimensionMismatchError(f"shape mismatch: {pa.shape} vs {pb.shape}")
    if pa.shape[0] < SSIM_WINDOW or pa.shape[1] < SSIM_WINDOW:
        raise DataValidationError(f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW}")

    def f(x):
        return convolve2d(x, _WINDOW, mode="valid")

    mu1, mu2 = f(pa), f(pb)
    mu1_sq, mu2_sq, mu1_mu2 = mu1 * mu1, mu2 * mu2, mu1 * mu2
    var1 = f(pa * pa) - mu1_sq
    var2 = f(pb * pb) - mu2_sq
    cov = f(pa * pb) - mu1_mu2
    score_map = ((2.0 * mu1_mu2 + _C1) * (2.0 * cov + _C2)) / (
        (mu1_sq + mu2_sq + _C1) * (var1 + var2 + _C2)
    )
    return SsimResult(mean_score=float(score_map.mean()), map=score_map)


def write_ssim_map_png(result: SsimResult, path) -> None:
    """Render the score map as 8-bit grayscale: s -> round(255*(s+1)/2)."""
    gray = np.clip(np.round(255.0 * (result.map + 1.0) / 2.0), 0, 255).astype(np.uint8)
    Image.fromarray(gray, mode="L").save(path, format="PNG")


@dataclass(frozen=True)
class RgbHistogram:
    """Three 256-bin channel histograms, jointly normalized to total mass 1."""

    bins: np.ndarray  # (3, 256)
    pixel_count: int

    def __post_init__(self):
        b = np.ascontiguousarray(np.asarray(self.bins, dtype=np.float64))
        if b.shape != (3, 256):
            raise DataValidationError(f"RgbHistogram needs (3, 256) bins, got {b.shape}")
        if b.size and b.min() < 0.0:
            raise DataValidationError("histogram mass must be non-negative")
        b.setflags(write=False)
        object.__setattr__(self, "bins", b)

    def flat(self) -> np.ndarray:
        return self.bins.reshape(-1)


def rgb_histogram(img: RasterImage) -> RgbHistogram:
    """Per-channel 256-bin counts of an RGB image, normalized to sum 1."""
    n = img.width * img.height
    if n == 0:
        raise DataValidationError("cannot histogram an empty image")
    counts = np.stack(
        [np.bincount(img.pixels[:, :, c].reshape(-1), minlength=256) for c in range(3)]
    ).astype(np.float64)
    return RgbHistogram(bins=counts / (3.0 * n), pixel_count=n)


def correlation(h1, h2) -> float:
    """Pearson correlation of two histograms; NaN when either is constant."""
    a, b = _paired(h1, h2)
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(np.sum(da * da)) * float(np.sum(db * db)))
    if denom == 0.0:
        return math.nan
    return float(np.sum(da * db)) / denom


def chi_square(h1, h2) -> float:
    """Sum of (H1-H2)^2 / H1 over bins where H1 > 0 (not symmetric)."""
    a, b = _paired(h1, h2)
    mask = a > 0.0
    d = a[mask] - b[mask]
    return float(np.sum(d * d / a[mask]))


def bhattacharyya(h1, h2) -> float:
    """sqrt(1 - sum(sqrt(H1*H2)) / sqrt(mean(H1)*mean(H2)*N^2)), in [0, 1]."""
    a, b = _paired(h1, h2)
    n = a.size
    norm = math.sqrt(a.mean() * b.mean() * n * n)
    if norm == 0.0:
        return math.nan
    inner = 1.0 - float(np.sum(np.sqrt(a * b))) / norm
    return math.sqrt(max(inner, 0.0))


_METHOD_FUNCS = {
    "correlation": correlation,
    "chi-square": chi_square,
    "bhattacharyya": bhattacharyya,
}


def compare(h1: RgbHistogram, h2: RgbHistogram, method: str) -> float:
    """Compare two RGB histograms with one of the three tutorial metrics."""
    key = method.lower().replace("_", "-")
    if key not in _METHOD_FUNCS:
        raise DataValidationError(f"unknown method {method!r}, pick from {COMPARE_METHODS}")
    return _METHOD_FUNCS[key](h1, h2)


def _paired(h1, h2) -> tuple[np.ndarray, np.ndarray]:
    a = h1.flat() if isinstance(h1, RgbHistogram) else np.asarray(h1, dtype=np.float64).reshape(-1)
    b = h2.flat() if isinstance(h2, RgbHistogram) else np.asarray(h2, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"bin layout mismatch: {a.shape} vs {b.shape}")
    return a, b
