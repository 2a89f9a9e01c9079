"""Seeded synthetic portrait-like fixtures for offline experiments.

Each image is a smooth elliptical blob over a low-frequency random field
with mild grain, then pushed to a per-channel target mean/contrast drawn
from the pool's ranges. Different pools (different mean/contrast ranges)
play the role of different reference datasets in the transfer protocol.
"""

import numpy as np

from .imaging import RasterImage


def synthetic_portrait(rng: np.random.Generator, size: int = 64,
                       mean_range=(100.0, 150.0),
                       contrast_range=(28.0, 48.0)) -> RasterImage:
    """One synthetic image; consumes a deterministic amount of rng stream."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64) / size
    cy, cx = rng.uniform(0.35, 0.65, size=2)
    ry, rx = rng.uniform(0.18, 0.38, size=2)
    blob = np.exp(-(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2))

    waves = np.zeros_like(blob)
    for _ in range(3):
        fy, fx = rng.uniform(0.5, 3.0, size=2)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.2, 0.6)
        waves += amp * np.cos(2.0 * np.pi * (fy * yy + fx * xx) + phase)

    grain = rng.normal(0.0, 0.08, size=blob.shape)
    base = blob + 0.35 * waves + grain
    base = (base - base.mean()) / max(base.std(), 1e-9)

    mean = rng.uniform(*mean_range)
    contrast = rng.uniform(*contrast_range)
    px = np.empty((size, size, 3))
    for c in range(3):
        ch_gain = rng.uniform(0.8, 1.2)
        ch_shift = rng.uniform(-12.0, 12.0)
        px[:, :, c] = base * contrast * ch_gain + mean + ch_shift
    return RasterImage(np.clip(np.round(px), 0, 255).astype(np.uint8))


def synthetic_pool(n: int, seed: int, size: int = 64, id_prefix: str = "img",
                   mean_range=(100.0, 150.0),
                   contrast_range=(28.0, 48.0)) -> list[tuple[str, RasterImage]]:
    """n seeded images as (id, image) pairs, ready for the dataset builder."""
    rng = np.random.default_rng(seed)
    return [
        (f"{id_prefix}{i:05d}",
         synthetic_portrait(rng, size=size, mean_range=mean_range,
                            contrast_range=contrast_range))
        for i in range(n)
    ]


# pool presets for the offline two-class protocol: the second-pass target
# pool is a visibly different "dataset" (higher contrast and brightness)
POOL_PRESETS = {
    "sources": {"mean_range": (100.0, 150.0), "contrast_range": (28.0, 48.0)},
    "targets1": {"mean_range": (95.0, 140.0), "contrast_range": (30.0, 50.0)},
    "targets2": {"mean_range": (115.0, 165.0), "contrast_range": (42.0, 68.0)},
}


def protocol_pools(n: int, seed: int, size: int = 64):
    """(sources, targets1, targets2) pools with disjoint ids and distinct looks."""
    return (
        synthetic_pool(n, seed, size=size, id_prefix="s", **POOL_PRESETS["sources"]),
        synthetic_pool(n, seed + 1, size=size, id_prefix="t1_", **POOL_PRESETS["targets1"]),
        synthetic_pool(n, seed + 2, size=size, id_prefix="t2_", **POOL_PRESETS["targets2"]),
    )
