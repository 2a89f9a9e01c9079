import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from styletrace.errors import DataValidationError, DimensionMismatchError
from styletrace.imaging import RasterImage
from styletrace.similarity import (
    RgbHistogram,
    bhattacharyya,
    chi_square,
    compare,
    correlation,
    rgb_histogram,
    ssim,
    write_ssim_map_png,
)


# --- independent oracles ----------------------------------------------------

def exact_chi_square(h1, h2):
    from fractions import Fraction

    total = Fraction(0)
    for a, b in zip(h1, h2):
        fa, fb = Fraction(a), Fraction(b)
        if fa > 0:
            total += (fa - fb) ** 2 / fa
    return total


def exact_bhattacharyya(h1, h2, dps: int = 50):
    from mpmath import mp, mpf, sqrt

    mp.dps = dps
    a = [mpf(str(x)) for x in h1]
    b = [mpf(str(x)) for x in h2]
    n = len(a)
    s = sum(sqrt(x * y) for x, y in zip(a, b))
    norm = sqrt((sum(a) / n) * (sum(b) / n) * n * n)
    return sqrt(1 - s / norm)


def skimage_ssim(a: RasterImage, b: RasterImage):
    from skimage.metrics import structural_similarity

    from styletrace.imaging import to_luminance

    return structural_similarity(
        to_luminance(a).samples, to_luminance(b).samples,
        gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
        data_range=255.0, win_size=11,
    )


_HAND_H1 = [0.5, 0.3, 0.15, 0.05]
_HAND_H2 = [0.4, 0.4, 0.15, 0.05]


class TestSsim:
    def test_self_similarity_is_one(self, photo_image):
        res = ssim(photo_image, photo_image)
        assert abs(res.mean_score - 1.0) < 1e-12
        assert np.all(res.map == 1.0)

    def test_symmetry(self, photo_image, noise_image):
        small = RasterImage(noise_image.pixels[:48, :48])
        other = RasterImage(photo_image.pixels[:48, :48])
        assert abs(ssim(small, other).mean_score - ssim(other, small).mean_score) < 1e-12

    def test_mean_equals_map_mean(self, photo_pair):
        a, b = photo_pair
        res = ssim(a, b)
        assert res.mean_score == pytest.approx(res.map.mean(), abs=1e-15)
        assert res.map.shape == (a.height - 10, a.width - 10)

    def test_negated_high_variance_fixture_scores_negative(self, noise_image):
        inverted = RasterImage(255 - noise_image.pixels)
        assert ssim(noise_image, inverted).mean_score < 0.0

    def test_matches_reference_implementation(self, photo_pair, noise_image):
        a, b = photo_pair
        pairs = [(a, b), (a, RasterImage(255 - a.pixels))]
        for x, y in pairs:
            mine = ssim(x, y).mean_score
            ref = skimage_ssim(x, y)
            assert mine == pytest.approx(ref, abs=1e-7)

    def test_monotone_noise_degradation(self, photo_image, rng):
        base = photo_image.pixels.astype(np.float64)
        scores = []
        for amp in (5, 10, 20, 40):
            noisy = base + rng.normal(0.0, amp, size=base.shape)
            img = RasterImage(np.clip(np.round(noisy), 0, 255).astype(np.uint8))
            scores.append(ssim(photo_image, img).mean_score)
        assert all(s1 > s2 for s1, s2 in zip(scores, scores[1:]))

    def test_dimension_mismatch(self, photo_image):
        crop = RasterImage(photo_image.pixels[:32, :32])
        with pytest.raises(DimensionMismatchError):
            ssim(photo_image, crop)

    def test_map_png_encoding(self, tmp_path, photo_pair):
        from PIL import Image

        a, b = photo_pair
        res = ssim(a, b)
        path = tmp_path / "map.png"
        write_ssim_map_png(res, path)
        gray = np.asarray(Image.open(path))
        want = np.clip(np.round(255.0 * (res.map + 1.0) / 2.0), 0, 255).astype(np.uint8)
        assert np.array_equal(gray, want)


class TestRgbHistogram:
    def test_all_black(self):
        img = RasterImage(np.zeros((10, 10, 3), dtype=np.uint8))
        h = rgb_histogram(img)
        assert h.bins[0, 0] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert h.bins[1, 0] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert h.bins[2, 0] == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert h.bins.sum() == pytest.approx(1.0, abs=1e-12)

    def test_half_black_half_white(self):
        px = np.zeros((2, 10, 3), dtype=np.uint8)
        px[1, :, :] = 255
        h = rgb_histogram(RasterImage(px))
        for c in range(3):
            assert h.bins[c, 0] == pytest.approx(1.0 / 6.0, abs=1e-15)
            assert h.bins[c, 255] == pytest.approx(1.0 / 6.0, abs=1e-15)

    def test_fixture_mass_is_one(self, photo_image):
        assert rgb_histogram(photo_image).bins.sum() == pytest.approx(1.0, abs=1e-12)


class TestCompareHandCases:
    def test_chi_square_four_bin(self):
        want = float(exact_chi_square(_HAND_H1, _HAND_H2))
        assert want == pytest.approx(4.0 / 75.0, abs=1e-15)  # 0.05333...
        assert chi_square(_HAND_H1, _HAND_H2) == pytest.approx(want, abs=1e-12)

    def test_bhattacharyya_four_bin(self):
        want = float(exact_bhattacharyya(_HAND_H1, _HAND_H2))
        assert chi_square(_HAND_H1, _HAND_H2) != want  # distinct metrics, sanity
        assert bhattacharyya(_HAND_H1, _HAND_H2) == pytest.approx(want, abs=1e-12)

    def test_perfect_match_anchors(self, photo_image):
        h = rgb_histogram(photo_image)
        assert correlation(h, h) == pytest.approx(1.0, abs=1e-12)
        assert chi_square(h, h) == 0.0
        assert bhattacharyya(h, h) == pytest.approx(0.0, abs=1e-7)

    def test_chi_square_is_not_symmetric(self):
        a = [0.7, 0.2, 0.1, 0.0]
        b = [0.25, 0.25, 0.25, 0.25]
        assert chi_square(a, b) != chi_square(b, a)

    def test_correlation_degenerate_is_nan(self):
        flat = np.full(256 * 3, 1.0 / 768.0)
        assert math.isnan(correlation(flat, flat))

    def test_layout_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            chi_square([0.5, 0.5], [0.2, 0.3, 0.5])

    def test_compare_dispatch(self, photo_image, noise_image):
        h1 = rgb_histogram(photo_image)
        small = RasterImage(noise_image.pixels[:64, :64]) if noise_image.width >= 64 \
            else noise_image
        h2 = rgb_histogram(small)
        assert compare(h1, h2, "correlation") == pytest.approx(correlation(h1, h2))
        assert compare(h1, h2, "chi-square") == pytest.approx(chi_square(h1, h2))
        assert compare(h1, h2, "bhattacharyya") == pytest.approx(bhattacharyya(h1, h2))
        with pytest.raises(DataValidationError):
            compare(h1, h2, "cosine")

    def test_matches_opencv_reference(self, rng):
        import cv2

        for _ in range(20):
            a = rng.uniform(0.0, 1.0, size=256)
            b = rng.uniform(0.0, 1.0, size=256)
            a /= a.sum()
            b /= b.sum()
            af = a.astype(np.float32).reshape(-1, 1)
            bf = b.astype(np.float32).reshape(-1, 1)
            assert correlation(a, b) == pytest.approx(
                cv2.compareHist(af, bf, cv2.HISTCMP_CORREL), abs=1e-5)
            assert chi_square(a, b) == pytest.approx(
                cv2.compareHist(af, bf, cv2.HISTCMP_CHISQR), abs=1e-5)
            assert bhattacharyya(a, b) == pytest.approx(
                cv2.compareHist(af, bf, cv2.HISTCMP_BHATTACHARYYA), abs=1e-5)


@st.composite
def normalized_histogram(draw, size=16):
    vals = draw(st.lists(st.floats(0.0, 1.0), min_size=size, max_size=size))
    arr = np.asarray(vals) + 1e-9
    return arr / arr.sum()


class TestCompareProperties:
    @settings(max_examples=60, deadline=None)
    @given(a=normalized_histogram(), b=normalized_histogram())
    def test_ranges_and_symmetry(self, a, b):
        c = correlation(a, b)
        if math.isnan(c):
            # documented degenerate value: at least one constant histogram
            assert np.ptp(a) == 0.0 or np.ptp(b) == 0.0
        else:
            assert -1.0 - 1e-9 <= c <= 1.0 + 1e-9
            assert c == pytest.approx(correlation(b, a), abs=1e-12)
        x = chi_square(a, b)
        assert x >= 0.0
        d = bhattacharyya(a, b)
        assert 0.0 <= d <= 1.0
        assert d == pytest.approx(bhattacharyya(b, a), abs=1e-12)
