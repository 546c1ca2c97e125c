"""Object detectors producing (x0, y0, x1, y1) pixel boxes per frame.

The threshold detector finds bright connected regions — deterministic
and good enough to exercise crop/patch plumbing on synthetic footage.
The ultralytics adapter wraps a real detector checkpoint when installed.
"""
from __future__ import annotations

import cv2
import numpy as np

Box = tuple[int, int, int, int]


class ThresholdDetector:
    """Connected components of the bright-pixel mask, largest first."""

    def __init__(self, threshold: int = 60, min_area: int = 16, max_regions: int = 8):
        self.threshold = threshold
        self.min_area = min_area
        self.max_regions = max_regions
        self.tag = f"threshold-{threshold}-a{min_area}"

    def detect(self, image: np.ndarray) -> list[Box]:
        gray = cv2.cvtColor(image, cv2.COLOR_RGB2GRAY)
        mask = (gray > self.threshold).astype(np.uint8)
        count, _, stats, _ = cv2.connectedComponentsWithStats(mask, connectivity=8)
        boxes: list[tuple[int, Box]] = []
        for label in range(1, count):  # label 0 is background
            x, y, w, h, area = stats[label]
            if area < self.min_area:
                continue
            boxes.append((int(area), (int(x), int(y), int(x + w), int(y + h))))
        boxes.sort(key=lambda t: (-t[0], t[1]))
        return [box for _, box in boxes[: self.max_regions]]


class UltralyticsDetector:
    """Detection boxes from an ultralytics checkpoint (optional [yolo] extra)."""

    def __init__(self, checkpoint: str, confidence: float = 0.25):
        try:
            from ultralytics import YOLO
        except ImportError as exc:
            raise RuntimeError(
                "UltralyticsDetector needs the [yolo] extra (ultralytics)"
            ) from exc
        self.model = YOLO(checkpoint)
        self.confidence = confidence
        self.tag = f"ultralytics:{checkpoint}"

    def detect(self, image: np.ndarray) -> list[Box]:
        result = self.model.predict(image, conf=self.confidence, verbose=False)[0]
        boxes = []
        for row in result.boxes.xyxy.cpu().numpy():
            x0, y0, x1, y1 = (int(round(v)) for v in row[:4])
            boxes.append((x0, y0, x1, y1))
        return boxes


def crop(image: np.ndarray, box: Box) -> np.ndarray:
    """Clamped crop; always at least one pixel in each dimension."""
    h, w = image.shape[:2]
    x0 = min(max(box[0], 0), w - 1)
    y0 = min(max(box[1], 0), h - 1)
    x1 = min(max(box[2], x0 + 1), w)
    y1 = min(max(box[3], y0 + 1), h)
    return image[y0:y1, x0:x1]


def build_detector(kind: str, yolo_checkpoint: str | None = None):
    if kind == "threshold":
        return ThresholdDetector()
    if kind == "yolo":
        if not yolo_checkpoint:
            raise ValueError("--detector yolo requires --yolo-checkpoint")
        return UltralyticsDetector(yolo_checkpoint)
    raise ValueError(f"unknown detector {kind!r}")
