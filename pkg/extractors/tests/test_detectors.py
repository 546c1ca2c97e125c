import numpy as np
import pytest

from evqa_extractors.detectors import ThresholdDetector, build_detector, crop


def scene(*rects):
    img = np.full((64, 96, 3), 12, np.uint8)
    for x0, y0, x1, y1 in rects:
        img[y0:y1, x0:x1] = 220
    return img


class TestThresholdDetector:
    def test_finds_each_rectangle(self):
        det = ThresholdDetector()
        boxes = det.detect(scene((4, 4, 20, 16), (50, 30, 70, 50)))
        assert sorted(boxes) == [(4, 4, 20, 16), (50, 30, 70, 50)]

    def test_empty_scene(self):
        assert ThresholdDetector().detect(scene()) == []

    def test_min_area_filters_specks(self):
        det = ThresholdDetector(min_area=16)
        boxes = det.detect(scene((4, 4, 7, 7), (30, 30, 50, 50)))  # 9px vs 400px
        assert boxes == [(30, 30, 50, 50)]

    def test_largest_first_and_deterministic(self):
        det = ThresholdDetector()
        img = scene((4, 4, 14, 14), (30, 4, 60, 34), (70, 40, 90, 60))
        first = det.detect(img)
        assert first[0] == (30, 4, 60, 34)  # largest area leads
        assert first == det.detect(img)

    def test_max_regions_cap(self):
        det = ThresholdDetector(max_regions=2)
        img = scene((2, 2, 12, 12), (20, 2, 30, 12), (40, 2, 50, 12))
        assert len(det.detect(img)) == 2


class TestCrop:
    def test_exact_crop(self):
        img = scene((10, 20, 30, 40))
        region = crop(img, (10, 20, 30, 40))
        assert region.shape == (20, 20, 3)
        assert np.all(region == 220)

    def test_clamps_out_of_bounds(self):
        img = scene()
        region = crop(img, (-5, -5, 200, 200))
        assert region.shape == img.shape

    def test_degenerate_box_still_one_pixel(self):
        img = scene()
        assert crop(img, (10, 10, 10, 10)).shape == (1, 1, 3)


class TestBuildDetector:
    def test_threshold_default(self):
        assert isinstance(build_detector("threshold"), ThresholdDetector)

    def test_yolo_requires_checkpoint(self):
        with pytest.raises(ValueError, match="yolo-checkpoint"):
            build_detector("yolo")

    def test_yolo_missing_dependency_or_checkpoint_fails_cleanly(self, tmp_path):
        with pytest.raises(Exception):
            build_detector("yolo", str(tmp_path / "nothing.pt"))

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown detector"):
            build_detector("sonar")
