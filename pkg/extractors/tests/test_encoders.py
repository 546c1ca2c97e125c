import numpy as np
import pytest

from evqa_extractors.encoders import GridColorEncoder, HashedBowTextEncoder, build_encoders


class TestGridColorEncoder:
    def test_unit_norm_and_dim(self):
        enc = GridColorEncoder(grid=4)
        img = np.random.default_rng(0).integers(0, 256, (30, 40, 3), dtype=np.uint8)
        vec = enc.encode_image(img)
        assert vec.shape == (enc.dim,) == (49,)
        assert vec.dtype == np.float32
        assert abs(np.linalg.norm(vec.astype(np.float64)) - 1) < 1e-6

    def test_black_image_is_pure_bias(self):
        enc = GridColorEncoder()
        vec = enc.encode_image(np.zeros((16, 16, 3), np.uint8))
        assert vec[-1] == 1.0 and np.all(vec[:-1] == 0.0)

    def test_deterministic_and_size_tolerant(self):
        enc = GridColorEncoder()
        rng = np.random.default_rng(1)
        small = rng.integers(0, 256, (3, 5, 3), dtype=np.uint8)
        assert np.array_equal(enc.encode_image(small), enc.encode_image(small))
        tiny = rng.integers(0, 256, (1, 1, 3), dtype=np.uint8)
        assert enc.encode_image(tiny).shape == (49,)

    def test_distinguishes_colors(self):
        enc = GridColorEncoder()
        red = np.zeros((8, 8, 3), np.uint8)
        red[..., 0] = 255
        blue = np.zeros((8, 8, 3), np.uint8)
        blue[..., 2] = 255
        sim = float(enc.encode_image(red) @ enc.encode_image(blue))
        assert sim < 0.99

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            GridColorEncoder().encode_image(np.zeros((8, 8), np.uint8))


class TestHashedBowTextEncoder:
    def test_unit_norm_and_determinism(self):
        enc = HashedBowTextEncoder(dim=49)
        a = enc.encode_text("a man plays the guitar")
        b = enc.encode_text("a man plays the guitar")
        assert np.array_equal(a, b)
        assert abs(np.linalg.norm(a.astype(np.float64)) - 1) < 1e-6

    def test_empty_text_is_bias_direction(self):
        vec = HashedBowTextEncoder().encode_text("")
        assert vec[-1] == 1.0

    def test_related_texts_more_similar_than_unrelated(self):
        enc = HashedBowTextEncoder()
        guitar1 = enc.encode_text("man playing guitar stage")
        guitar2 = enc.encode_text("guitar man stage")
        kitchen = enc.encode_text("slicing vegetables kitchen knife")
        assert float(guitar1 @ guitar2) > float(guitar1 @ kitchen)

    def test_dim_guard(self):
        with pytest.raises(ValueError):
            HashedBowTextEncoder(dim=1)


class TestBuildEncoders:
    def test_grid_pair_shares_dim(self):
        image, text = build_encoders("grid")
        assert image.dim == text.dim

    def test_clip_requires_checkpoint(self):
        with pytest.raises(ValueError, match="clip-checkpoint"):
            build_encoders("clip")

    def test_clip_with_missing_local_checkpoint_fails_cleanly(self, tmp_path):
        with pytest.raises(Exception):
            build_encoders("clip", str(tmp_path / "no-model-here"))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown encoder"):
            build_encoders("psychic")
