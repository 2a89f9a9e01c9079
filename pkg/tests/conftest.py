import numpy as np
import pytest
from PIL import Image

from styletrace.imaging import RasterImage
from styletrace.synthetic import synthetic_pool


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def photo_image(rng) -> RasterImage:
    """One mid-range synthetic portrait fixture (no clamping headroom issues)."""
    return synthetic_pool(1, seed=42, size=64)[0][1]


@pytest.fixture
def photo_pair() -> tuple[RasterImage, RasterImage]:
    pool = synthetic_pool(2, seed=43, size=64)
    return pool[0][1], pool[1][1]


@pytest.fixture
def noise_image(rng) -> RasterImage:
    """High-variance fixture: i.i.d. uniform pixels."""
    return RasterImage(rng.integers(0, 256, size=(48, 48, 3)).astype(np.uint8))


@pytest.fixture
def png_file(tmp_path, photo_image):
    path = tmp_path / "fixture.png"
    Image.fromarray(np.asarray(photo_image.pixels), mode="RGB").save(path)
    return path


def make_blobs(n_per_class: int, seed: int, sigma: float = 0.1,
               dim: int = 63) -> tuple[np.ndarray, np.ndarray]:
    """Separable synthetic oracle: Gaussian blobs at -1 and +1 per feature."""
    rng = np.random.default_rng(seed)
    x0 = rng.normal(-1.0, sigma, size=(n_per_class, dim))
    x1 = rng.normal(+1.0, sigma, size=(n_per_class, dim))
    X = np.vstack([x0, x1])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    perm = rng.permutation(2 * n_per_class)
    return X[perm], y[perm]
