import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evqa.container import PatchMeta, VideoItem
from evqa.sampling import SamplerConfig, sample_indices, select_sampled


def oracle_indices(m: int, l: int) -> list[int]:
    """Literal set-comprehension of the sampling rule, clamped to [1, m]."""
    raw = {k * l + 1 for k in range(m + 1) if k * l <= m}
    return sorted(i for i in raw if 1 <= i <= m)


class TestSampleIndices:
    def test_interval_30_over_100_frames(self):
        assert sample_indices(100, SamplerConfig(30)) == [1, 31, 61, 91]

    def test_short_video_yields_first_frame_only(self):
        assert sample_indices(5, SamplerConfig(10)) == [1]

    def test_interval_one_is_identity(self):
        assert sample_indices(60, SamplerConfig(1)) == list(range(1, 61))

    def test_zero_frames_empty(self):
        assert sample_indices(0, SamplerConfig(30)) == []

    def test_exact_multiple_never_yields_phantom_frame(self):
        # k*l == m would give index m+1; it must be clamped away
        assert sample_indices(60, SamplerConfig(30)) == [1, 31]

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            SamplerConfig(0)

    def test_negative_frame_count(self):
        with pytest.raises(ValueError):
            sample_indices(-1, SamplerConfig(1))

    @given(m=st.integers(0, 800), l=st.integers(1, 100))
    def test_matches_oracle(self, m, l):
        assert sample_indices(m, SamplerConfig(l)) == oracle_indices(m, l)

    @given(m=st.integers(0, 800), l=st.integers(1, 100))
    def test_every_index_on_grid_and_in_range(self, m, l):
        got = sample_indices(m, SamplerConfig(l))
        assert all((i - 1) % l == 0 and 1 <= i <= m for i in got)
        assert got == sorted(set(got))
        if m >= 1:
            assert len(got) == (m - 1) // l + 1

    @given(m=st.integers(0, 500), l=st.integers(1, 60), factor=st.integers(1, 6))
    def test_divisor_nesting(self, m, l, factor):
        coarse = set(sample_indices(m, SamplerConfig(l * factor)))
        fine = set(sample_indices(m, SamplerConfig(l)))
        assert coarse <= fine


def make_video(frame_count, stored, patch_frames):
    return VideoItem(
        id="v",
        frame_count=frame_count,
        frame_block="v.frames",
        frame_indices=list(stored),
        patch_block="v.patches",
        patches=[PatchMeta(frame_index=f, region=(0, 0, 1, 1)) for f in patch_frames],
    )


def rows(n, dim=3):
    # distinct recognizable rows; norms irrelevant to selection
    return np.arange(n * dim, dtype=np.float32).reshape(n, dim)


class TestSelectSampled:
    def test_patch_filter_keeps_frame_then_detection_order(self):
        video = make_video(100, stored=[1, 31, 45], patch_frames=[1, 31, 45, 1])
        frames, patches = select_sampled(video, rows(3), rows(4), [1, 31, 61])
        assert np.array_equal(frames, rows(3)[[0, 1]])
        # frame-1 patches first (rows 0 and 3), then frame-31 (row 1)
        assert np.array_equal(patches, rows(4)[[0, 3, 1]])

    def test_full_sample_is_identity(self):
        video = make_video(4, stored=[1, 2, 3, 4], patch_frames=[1, 2, 3, 4])
        frames, patches = select_sampled(video, rows(4), rows(4), [1, 2, 3, 4])
        assert np.array_equal(frames, rows(4))
        assert np.array_equal(patches, rows(4))

    def test_zero_patches_yield_empty_matrix(self):
        video = make_video(10, stored=[1], patch_frames=[])
        _, patches = select_sampled(video, rows(1), rows(0), [1])
        assert patches.shape[0] == 0

    def test_out_of_range_sample_is_contract_violation(self):
        video = make_video(10, stored=[1], patch_frames=[])
        with pytest.raises(ValueError, match="out of range"):
            select_sampled(video, rows(1), rows(0), [1, 11])

    def test_deterministic_across_calls(self):
        video = make_video(50, stored=[1, 11, 21], patch_frames=[21, 1, 11, 1])
        out1 = select_sampled(video, rows(3), rows(4), [1, 11, 21, 31, 41])
        out2 = select_sampled(video, rows(3), rows(4), [1, 11, 21, 31, 41])
        assert np.array_equal(out1[0], out2[0]) and np.array_equal(out1[1], out2[1])
        # unsorted metadata still comes out grouped by frame
        assert np.array_equal(out1[1], rows(4)[[1, 3, 2, 0]])
