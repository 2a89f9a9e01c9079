"""Image ingestion, luminance conversion and 8x8 block partitioning.

Everything downstream (DCT statistics, SSIM, histograms, the dataset
builder) consumes the two immutable types defined here. Pixel data is
kept exactly as stored in the file: no gamma handling, no resampling.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DataValidationError, DecodeError, UnsupportedColorModelError

# Color models we can normalize to 8-bit RGB. Anything else (CMYK, YCbCr,
# Lab, HSV, float) is rejected rather than silently converted.
_ACCEPTED_MODES = {"1", "L", "LA", "P", "PA", "RGB", "RGBA", "I", "I;16"}

_BLOCK = 8


@dataclass(frozen=True)
class RasterImage:
    """8-bit RGB pixel grid, row-major, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise DataValidationError(
                f"RasterImage needs (h, w, 3) uint8 data, got shape {px.shape}"
            )
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return 3


@dataclass(frozen=True)
class LumaImage:
    """Single-channel real-valued luminance plane, samples in [0, 255]."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2:
            raise DataValidationError(f"LumaImage needs a 2-d plane, got {s.shape}")
        if s.size and (s.min() < 0.0 or s.max() > 255.0):
            raise DataValidationError("luminance samples out of [0, 255]")
        s = np.ascontiguousarray(s)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class Block8:
    """One non-overlapping 8x8 tile and its (block-row, block-col) origin."""

    samples: np.ndarray
    origin: tuple[int, int]

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.shape != (_BLOCK, _BLOCK):
            raise DataValidationError(f"Block8 needs 8x8 samples, got {s.shape}")
        s = np.ascontiguousarray(s)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def load_image(path) -> RasterImage:
    """Decode a PNG or JPEG file into an 8-bit RGB RasterImage.

    Grayscale sources are replicated onto all three channels; palette and
    alpha images are flattened to RGB; 16-bit grayscale is rescaled to
    8 bits. Unsupported color models raise UnsupportedColorModelError.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode not in _ACCEPTED_MODES:
                raise UnsupportedColorModelError(
                    f"unsupported color model {mode!r} in {path}"
                )
            if mode in ("I", "I;16"):
                # 16-bit gray: rescale 0..65535 -> 0..255 before replication.
                arr = np.asarray(im, dtype=np.float64)
                arr = np.clip(np.round(arr / 257.0), 0, 255).astype(np.uint8)
                px = np.stack([arr] * 3, axis=-1)
            else:
                px = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnsupportedColorModelError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return RasterImage(px)


def to_luminance(img: RasterImage) -> LumaImage:
    """BT.601 luma: Y = 0.299*R + 0.587*G + 0.114*B, unrounded.

    Evaluated as B + 0.299*(R-B) + 0.587*(G-B) so that R=G=B=v yields
    exactly v in floating point (the three weights do not sum to 1.0
    exactly in binary64).
    """
    r = img.pixels[:, :, 0].astype(np.float64)
    g = img.pixels[:, :, 1].astype(np.float64)
    b = img.pixels[:, :, 2].astype(np.float64)
    y = b + 0.299 * (r - b) + 0.587 * (g - b)
    return LumaImage(np.clip(y, 0.0, 255.0))


def partition_blocks(img: LumaImage) -> list[Block8]:
    """Split a luminance plane into non-overlapping 8x8 blocks.

    Blocks come back in row-major block order; right/bottom remainder
    pixels are discarded. Images smaller than 8x8 are rejected.
    """
    grid = block_grid(img)
    nbr, nbc = grid.shape[0], grid.shape[1]
    return [
        Block8(grid[i, j], (i, j)) for i in range(nbr) for j in range(nbc)
    ]


def block_grid(img: LumaImage) -> np.ndarray:
    """Vectorized form of partition_blocks: array (rows, cols, 8, 8)."""
    h, w = img.height, img.width
    if h < _BLOCK or w < _BLOCK:
        raise DataValidationError(f"image {w}x{h} is smaller than 8x8")
    nbr, nbc = h // _BLOCK, w // _BLOCK
    cropped = img.samples[: nbr * _BLOCK, : nbc * _BLOCK]
    return cropped.reshape(nbr, _BLOCK, nbc, _BLOCK).swapaxes(1, 2)
