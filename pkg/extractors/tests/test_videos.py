import cv2
import numpy as np
import pytest

from evqa_extractors.videos import FrameSource, VideoReadError


class TestVideoFile:
    def test_frame_count_and_shapes(self, fixture_videos):
        src = FrameSource(fixture_videos / "clip-000.avi")
        assert src.frame_count == 75
        frames = list(src.frames([1, 31, 61]))
        assert [n for n, _ in frames] == [1, 31, 61]
        for _, img in frames:
            assert img.shape == (64, 96, 3) and img.dtype == np.uint8

    def test_sequential_decode_matches_full_read(self, fixture_videos):
        path = fixture_videos / "clip-001.avi"
        sampled = {n: img for n, img in FrameSource(path).frames([1, 41, 100])}
        everything = {n: img for n, img in FrameSource(path).frames(list(range(1, 101)))}
        for n, img in sampled.items():
            assert np.array_equal(img, everything[n])

    def test_out_of_range_index(self, fixture_videos):
        src = FrameSource(fixture_videos / "clip-000.avi")
        with pytest.raises(VideoReadError, match="outside"):
            list(src.frames([76]))

    def test_missing_file(self, tmp_path):
        with pytest.raises(VideoReadError, match="no such video"):
            FrameSource(tmp_path / "ghost.avi")

    def test_garbage_file(self, tmp_path):
        bogus = tmp_path / "garbage.avi"
        bogus.write_bytes(b"this is not a video")
        with pytest.raises(VideoReadError):
            FrameSource(bogus)


class TestFrameDirectory:
    def test_numbered_frames(self, tmp_path):
        for i in range(4):
            img = np.full((8, 8, 3), 40 * i, np.uint8)
            cv2.imwrite(str(tmp_path / f"frame-{i:03d}.png"), img)
        src = FrameSource(tmp_path)
        assert src.frame_count == 4
        got = list(src.frames([2, 4]))
        assert [n for n, _ in got] == [2, 4]
        assert got[0][1][0, 0, 0] == 40

    def test_empty_directory(self, tmp_path):
        with pytest.raises(VideoReadError, match="no image frames"):
            FrameSource(tmp_path)
