import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from styletrace.dct_features import (
    N_AC,
    ZIGZAG_POSITIONS,
    BetaVector,
    FeatureRecord,
    average_betas,
    dct2_8x8,
    estimate_beta,
    extract_features,
    extract_many,
    idct2_8x8,
    inverse_zigzag,
    read_feature_csv,
    write_class_mean_csv,
    write_feature_csv,
    zigzag,
)
from styletrace.errors import DataValidationError
from styletrace.imaging import Block8, RasterImage, partition_blocks, to_luminance


# --- independent oracles ----------------------------------------------------

def brute_force_dct(samples: np.ndarray) -> np.ndarray:
    """Direct evaluation of the forward definition (level shift included)."""
    out = np.zeros((8, 8))
    a = lambda u: 1.0 / (2.0 * np.sqrt(2.0)) if u == 0 else 0.5
    for u in range(8):
        for v in range(8):
            s = 0.0
            for x in range(8):
                for y in range(8):
                    s += (samples[x, y] - 128.0) * np.cos((2 * x + 1) * u * np.pi / 16) \
                         * np.cos((2 * y + 1) * v * np.pi / 16)
            out[u, v] = a(u) * a(v) * s
    return out


def brute_force_idct(coeffs: np.ndarray) -> np.ndarray:
    """Direct evaluation of the inverse sum, restoring the level shift."""
    out = np.zeros((8, 8))
    a = lambda u: 1.0 / (2.0 * np.sqrt(2.0)) if u == 0 else 0.5
    for x in range(8):
        for y in range(8):
            s = 0.0
            for u in range(8):
                for v in range(8):
                    s += a(u) * a(v) * coeffs[u, v] * np.cos((2 * x + 1) * u * np.pi / 16) \
                         * np.cos((2 * y + 1) * v * np.pi / 16)
            out[x, y] = s + 128.0
    return out


class TestDct:
    def test_constant_128_block_is_all_zero(self):
        c = dct2_8x8(Block8(np.full((8, 8), 128.0), (0, 0)))
        assert np.abs(c.coefficients).max() == 0.0

    def test_constant_255_block_dc_gain(self):
        c = dct2_8x8(Block8(np.full((8, 8), 255.0), (0, 0)))
        assert abs(c.coefficients[0, 0] - 8.0 * 127.0) < 1e-9
        ac = c.coefficients.copy()
        ac[0, 0] = 0.0
        assert np.abs(ac).max() < 1e-9

    def test_matches_brute_force_definition(self, rng):
        for _ in range(5):
            samples = rng.uniform(0, 255, size=(8, 8))
            mine = dct2_8x8(Block8(samples, (0, 0))).coefficients
            assert np.abs(mine - brute_force_dct(samples)).max() < 1e-9

    def test_round_trip_through_brute_force_inverse(self, rng):
        for _ in range(5):
            samples = rng.uniform(0, 255, size=(8, 8))
            coeffs = dct2_8x8(Block8(samples, (0, 0)))
            assert np.abs(brute_force_idct(coeffs.coefficients) - samples).max() < 1e-9

    def test_own_inverse_round_trip(self, rng):
        samples = rng.uniform(0, 255, size=(8, 8))
        coeffs = dct2_8x8(Block8(samples, (0, 0)))
        assert np.abs(idct2_8x8(coeffs) - samples).max() < 1e-9

    def test_parseval(self, rng):
        for _ in range(10):
            samples = rng.uniform(0, 255, size=(8, 8))
            coeffs = dct2_8x8(Block8(samples, (0, 0))).coefficients
            lhs = (coeffs**2).sum()
            rhs = ((samples - 128.0) ** 2).sum()
            assert abs(lhs - rhs) / rhs < 1e-6


class TestZigzag:
    def test_anchor_positions(self):
        assert ZIGZAG_POSITIONS[0] == (0, 0)
        assert ZIGZAG_POSITIONS[1] == (0, 1)
        assert ZIGZAG_POSITIONS[2] == (1, 0)
        assert ZIGZAG_POSITIONS[63] == (7, 7)

    def test_is_permutation(self):
        assert sorted(ZIGZAG_POSITIONS) == [(u, v) for u in range(8) for v in range(8)]

    def test_scan_picks_mapped_cells(self):
        grid = np.arange(64, dtype=np.float64).reshape(8, 8)
        from styletrace.dct_features import CoeffBlock

        scanned = zigzag(CoeffBlock(grid))
        want = np.array([u * 8 + v for u, v in ZIGZAG_POSITIONS], dtype=np.float64)
        assert np.array_equal(scanned, want)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=64, max_size=64))
    def test_inverse_round_trip(self, values):
        vec = np.array(values)
        assert np.array_equal(zigzag_of_grid(inverse_zigzag(vec)), vec)


def zigzag_of_grid(grid: np.ndarray) -> np.ndarray:
    from styletrace.dct_features import CoeffBlock

    return zigzag(CoeffBlock(grid))


class TestEstimateBeta:
    def test_all_zero_samples(self):
        assert estimate_beta(np.zeros(100), 1).beta == 0.0

    def test_two_point_hand_case(self):
        model = estimate_beta([-1.0, 1.0], 7)
        assert abs(model.beta - 1.0 / np.sqrt(2.0)) < 1e-15
        assert model.mu == 0.0
        assert model.position == 7

    def test_rejects_single_sample(self):
        with pytest.raises(DataValidationError):
            estimate_beta([1.0], 1)

    def test_rejects_bad_position(self):
        with pytest.raises(DataValidationError):
            estimate_beta([1.0, 2.0], 0)

    @pytest.mark.parametrize("beta_true", [0.5, 2.0, 10.0])
    def test_consistency_on_laplacian_samples(self, beta_true):
        rng = np.random.default_rng(1234)
        draws = rng.laplace(0.0, beta_true, size=1_000_000)
        est = estimate_beta(draws, 1).beta
        assert abs(est - beta_true) / beta_true < 0.01

    def test_million_draws_at_two(self):
        rng = np.random.default_rng(99)
        est = estimate_beta(rng.laplace(0.0, 2.0, size=1_000_000), 3).beta
        assert 1.98 <= est <= 2.02


def straight_line_features(img: RasterImage) -> np.ndarray:
    """Independent pipeline: explicit blocks, per-block scan, per-position fit."""
    blocks = partition_blocks(to_luminance(img))
    scans = np.stack([zigzag(dct2_8x8(b)) for b in blocks])
    return np.array([estimate_beta(scans[:, i], i).beta for i in range(1, 64)])


class TestExtractFeatures:
    def test_uniform_midgray_is_all_zero(self):
        img = RasterImage(np.full((256, 256, 3), 128, dtype=np.uint8))
        vec = extract_features(img)
        assert vec.values.shape == (63,)
        assert np.all(vec.values == 0.0)

    def test_shape_contract(self, photo_image):
        assert extract_features(photo_image).values.shape == (N_AC,)

    def test_matches_straight_line_oracle(self, rng):
        img = RasterImage(rng.integers(0, 256, size=(64, 64, 3)).astype(np.uint8))
        fast = extract_features(img).values
        assert np.abs(fast - straight_line_features(img)).max() < 1e-12

    def test_block_permutation_invariance(self, rng):
        px = rng.integers(0, 256, size=(64, 64, 3)).astype(np.uint8)
        tiles = px.reshape(8, 8, 8, 8, 3).swapaxes(1, 2).reshape(64, 8, 8, 3)
        perm = rng.permutation(64)
        shuffled = tiles[perm].reshape(8, 8, 8, 8, 3).swapaxes(1, 2).reshape(64, 64, 3)
        a = extract_features(RasterImage(px)).values
        b = extract_features(RasterImage(shuffled)).values
        assert np.abs(a - b).max() < 1e-10

    def test_rejects_tiny_image(self):
        img = RasterImage(np.zeros((7, 64, 3), dtype=np.uint8))
        with pytest.raises(DataValidationError):
            extract_features(img)

    def test_extract_many_is_order_preserving(self, tmp_path, rng):
        from PIL import Image

        paths = []
        for i in range(6):
            px = rng.integers(0, 256, size=(32, 32, 3)).astype(np.uint8)
            p = tmp_path / f"im{i}.png"
            Image.fromarray(px, mode="RGB").save(p)
            paths.append(p)
        seq = extract_many(paths, workers=1)
        par = extract_many(paths, workers=4)
        assert [v.source_id for v in par] == [f"im{i}" for i in range(6)]
        for a, b in zip(seq, par):
            assert np.array_equal(a.values, b.values)


class TestAverages:
    def test_single_vector_is_identity(self):
        v = BetaVector(np.linspace(0, 5, 63))
        assert np.array_equal(average_betas([v]), v.values)

    def test_zeros_and_twos(self):
        out = average_betas([BetaVector(np.zeros(63)), BetaVector(np.full(63, 2.0))])
        assert np.array_equal(out, np.ones(63))

    def test_empty_rejected(self):
        with pytest.raises(DataValidationError):
            average_betas([])


class TestFeatureStore:
    def test_round_trip_exact(self, tmp_path, rng):
        records = [
            FeatureRecord(BetaVector(rng.uniform(0, 50, 63), source_id=f"im{i}"),
                          label="Deepfake-2" if i % 2 == 0 else "Deepfake-3")
            for i in range(7)
        ]
        path = tmp_path / "features.csv"
        write_feature_csv(records, path, header_comment="v=1 config=abc")
        back = read_feature_csv(path)
        assert len(back) == 7
        for orig, got in zip(records, back):
            assert got.features.source_id == orig.features.source_id
            assert got.label == orig.label
            assert np.array_equal(got.features.values, orig.features.values)

    def test_row_has_65_columns(self, tmp_path):
        rec = FeatureRecord(BetaVector(np.zeros(63), source_id="x"), label="y")
        path = tmp_path / "f.csv"
        write_feature_csv([rec], path)
        header, row = path.read_text().strip().split("\n")
        assert len(header.split(",")) == 65
        assert len(row.split(",")) == 65

    def test_class_mean_csv(self, tmp_path):
        by_class = {
            "Deepfake-2": [BetaVector(np.full(63, 1.0)), BetaVector(np.full(63, 3.0))],
            "Deepfake-3": [BetaVector(np.full(63, 5.0))],
        }
        path = tmp_path / "curves.csv"
        write_class_mean_csv(by_class, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "ac_index,mean_beta_class2,mean_beta_class3"
        assert len(lines) == 64
        first = lines[1].split(",")
        assert first[0] == "1"
        assert float(first[1]) == 2.0
        assert float(first[2]) == 5.0

    def test_missing_class_rejected(self, tmp_path):
        with pytest.raises(DataValidationError):
            write_class_mean_csv({"Deepfake-2": [BetaVector(np.zeros(63))]},
                                 tmp_path / "c.csv")
