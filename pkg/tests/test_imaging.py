import io

import numpy as np
import pytest
from PIL import Image
from hypothesis import given, settings
from hypothesis import strategies as st

from styletrace.errors import DataValidationError, DecodeError, UnsupportedColorModelError
from styletrace.imaging import (
    LumaImage,
    RasterImage,
    block_grid,
    load_image,
    partition_blocks,
    to_luminance,
)


class TestLoadImage:
    def test_png_round_trip_dimensions(self, tmp_path, rng):
        px = rng.integers(0, 256, size=(256, 256, 3)).astype(np.uint8)
        path = tmp_path / "img.png"
        Image.fromarray(px, mode="RGB").save(path)
        img = load_image(path)
        assert (img.width, img.height) == (256, 256)
        assert np.array_equal(img.pixels, px)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "nope.png")

    def test_zero_byte_file(self, tmp_path):
        path = tmp_path / "empty.png"
        path.write_bytes(b"")
        with pytest.raises(DecodeError):
            load_image(path)

    def test_truncated_stream(self, tmp_path, rng):
        px = rng.integers(0, 256, size=(64, 64, 3)).astype(np.uint8)
        buf = io.BytesIO()
        Image.fromarray(px, mode="RGB").save(buf, format="PNG")
        path = tmp_path / "trunc.png"
        path.write_bytes(buf.getvalue()[:60])
        with pytest.raises(DecodeError):
            load_image(path)

    def test_grayscale_replicates_channels(self, tmp_path, rng):
        gray = rng.integers(0, 256, size=(32, 32)).astype(np.uint8)
        path = tmp_path / "gray.png"
        Image.fromarray(gray, mode="L").save(path)
        img = load_image(path)
        assert np.array_equal(img.pixels[:, :, 0], gray)
        assert np.array_equal(img.pixels[:, :, 0], img.pixels[:, :, 1])
        assert np.array_equal(img.pixels[:, :, 1], img.pixels[:, :, 2])

    def test_cmyk_rejected(self, tmp_path):
        cmyk = Image.new("CMYK", (16, 16), (10, 20, 30, 40))
        path = tmp_path / "cmyk.jpg"
        cmyk.save(path, format="JPEG")
        with pytest.raises(UnsupportedColorModelError):
            load_image(path)

    def test_jpeg_decodes(self, tmp_path):
        px = np.full((24, 24, 3), 128, dtype=np.uint8)
        path = tmp_path / "img.jpg"
        Image.fromarray(px, mode="RGB").save(path, format="JPEG", quality=95)
        img = load_image(path)
        assert (img.width, img.height) == (24, 24)


class TestToLuminance:
    def test_white_maps_to_255(self):
        img = RasterImage(np.full((8, 8, 3), 255, dtype=np.uint8))
        assert to_luminance(img).samples[0, 0] == 255.0

    def test_black_maps_to_0(self):
        img = RasterImage(np.zeros((8, 8, 3), dtype=np.uint8))
        assert to_luminance(img).samples[0, 0] == 0.0

    def test_pure_red(self):
        px = np.zeros((8, 8, 3), dtype=np.uint8)
        px[:, :, 0] = 255
        y = to_luminance(RasterImage(px)).samples[0, 0]
        assert abs(y - 76.245) < 1e-9  # 255 * 0.299

    def test_bt601_weights(self, rng):
        px = rng.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
        y = to_luminance(RasterImage(px)).samples
        want = (0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2])
        assert np.abs(y - want).max() < 1e-9

    def test_gray_is_exact_for_every_level(self):
        # R=G=B=v must give exactly v, all 256 levels
        v = np.arange(256, dtype=np.uint8).reshape(16, 16)
        img = RasterImage(np.stack([v, v, v], axis=-1))
        assert np.array_equal(to_luminance(img).samples, v.astype(np.float64))


class TestPartitionBlocks:
    def test_256_square_gives_1024_blocks(self):
        luma = LumaImage(np.zeros((256, 256)))
        assert len(partition_blocks(luma)) == 1024

    def test_remainders_dropped(self):
        luma = LumaImage(np.zeros((9, 17)))  # 17 wide, 9 tall
        assert len(partition_blocks(luma)) == 2

    def test_too_small_rejected(self):
        with pytest.raises(DataValidationError):
            partition_blocks(LumaImage(np.zeros((64, 7))))

    def test_blocks_copy_source_pixels(self, rng):
        data = rng.uniform(0, 255, size=(24, 40))
        blocks = partition_blocks(LumaImage(data))
        for blk in blocks:
            r, c = blk.origin
            assert np.array_equal(blk.samples, data[r * 8:(r + 1) * 8, c * 8:(c + 1) * 8])

    def test_row_major_order(self):
        data = np.zeros((16, 24))
        origins = [b.origin for b in partition_blocks(LumaImage(data))]
        assert origins == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]

    @settings(max_examples=60, deadline=None)
    @given(w=st.integers(8, 200), h=st.integers(8, 200))
    def test_block_count_formula(self, w, h):
        luma = LumaImage(np.zeros((h, w)))
        assert block_grid(luma).shape[:2] == (h // 8, w // 8)
        assert len(partition_blocks(luma)) == (w // 8) * (h // 8)
