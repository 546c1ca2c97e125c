"""Uniform frame sampling and row selection.

Frame numbers are 1-based throughout. The sampled index set for a video
of ``m`` frames at interval ``l`` is ``{k*l + 1 : k >= 0, k*l <= m}``
clamped to existing frames (so ``m % l == 0`` never yields frame
``m + 1``). Pure functions; freely shareable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .container import VideoItem

DEFAULT_INTERVAL = 30


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling stride in frames."""

    interval: int = DEFAULT_INTERVAL

    def __post_init__(self):
        if self.interval < 1:
            raise ValueError(f"interval must be >= 1, got {self.interval}")


def sample_indices(frame_count: int, cfg: SamplerConfig) -> list[int]:
    """1-based frame numbers selected at the configured interval.

    Equals ``{k*l + 1 : k >= 0, k*l <= m}`` intersected with ``[1, m]``,
    i.e. ``range(1, m + 1, l)``. Returns an empty list for ``m == 0``.
    """
    if frame_count < 0:
        raise ValueError(f"frame_count must be >= 0, got {frame_count}")
    return list(range(1, frame_count + 1, cfg.interval))


def select_sampled(
    item: VideoItem,
    frames: np.ndarray,
    patches: np.ndarray,
    sampled: list[int],
) -> tuple[np.ndarray, np.ndarray]:
    """Restrict stored frame and patch rows to the sampled frame set.

    Frame rows keep their stored (ascending) order; sampled indices with
    no stored row are skipped. Patch rows are returned in frame order,
    then detection order within a frame, realizing the concatenation of
    per-frame detections over the sample set.
    """
    for i in sampled:
        if not 1 <= i <= item.frame_count:
            raise ValueError(
                f"sampled index {i} out of range [1, {item.frame_count}] for video {item.id!r}"
            )
    wanted = set(sampled)
    frame_rows = [row for row, fi in enumerate(item.frame_indices) if fi in wanted]
    patch_rows = [row for row, pm in enumerate(item.patches) if pm.frame_index in wanted]
    patch_rows.sort(key=lambda row: (item.patches[row].frame_index, row))
    return frames[frame_rows], patches[patch_rows]
