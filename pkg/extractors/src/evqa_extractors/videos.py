"""Frame access over video files or directories of numbered frames.

Frame numbers are 1-based. Video files are decoded sequentially (seeking
is codec-dependent and unreliable for some containers), which is cheap
because sampled indices are strictly increasing anyway.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterator

import cv2
import numpy as np

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}


class VideoReadError(Exception):
    """The video file or frame directory cannot be decoded."""


class FrameSource:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        if self.path.is_dir():
            self._files = sorted(
                p for p in self.path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
            )
            if not self._files:
                raise VideoReadError(f"no image frames in directory {self.path}")
            self.frame_count = len(self._files)
        elif self.path.is_file():
            self._files = None
            cap = cv2.VideoCapture(str(self.path))
            if not cap.isOpened():
                raise VideoReadError(f"cannot open video {self.path}")
            self.frame_count = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
            cap.release()
            if self.frame_count <= 0:
                raise VideoReadError(f"no frames reported for {self.path}")
        else:
            raise VideoReadError(f"no such video: {self.path}")

    def frames(self, indices: list[int]) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (frame_number, RGB uint8 array) for ascending 1-based indices."""
        wanted = sorted(set(indices))
        if not wanted:
            return
        if wanted[0] < 1 or wanted[-1] > self.frame_count:
            raise VideoReadError(
                f"frame index outside [1, {self.frame_count}] for {self.path}"
            )
        if self._files is not None:
            for i in wanted:
                img = cv2.imread(str(self._files[i - 1]), cv2.IMREAD_COLOR)
                if img is None:
                    raise VideoReadError(f"unreadable frame file {self._files[i - 1]}")
                yield i, cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
            return
        cap = cv2.VideoCapture(str(self.path))
        try:
            want = iter(wanted)
            target = next(want)
            for number in range(1, self.frame_count + 1):
                ok, frame = cap.read()
                if not ok:
                    raise VideoReadError(f"decode failed at frame {number} of {self.path}")
                if number == target:
                    yield number, cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)
                    target = next(want, None)
                    if target is None:
                        return
        finally:
            cap.release()
