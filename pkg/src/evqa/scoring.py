"""Coarse, fine, and combined quality scores.

The coarse score is the cosine between the pooled (mean, renormalized)
sampled-frame embedding and the full-text embedding. The fine score is
an F1 over greedy max-similarity matching between object-patch rows and
keyword rows. The combined score is their arithmetic mean.

All arithmetic runs in float64 regardless of the stored float32 payload;
raw cosines are reported without clamping or rescaling, so scores may be
negative.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .container import ContainerReader, ManifestItem
from .errors import (
    DegeneratePoolingError,
    EmptySideError,
    EmptyVideoError,
    ValidationError,
)
from .sampling import SamplerConfig, sample_indices, select_sampled


@dataclass(frozen=True)
class ScoreRecord:
    """Scores for one video/text pairing, plus provenance."""

    item_id: str
    coarse: float
    fine: float
    precision: float
    recall: float
    combined: float
    interval_used: int
    mode: str  # "caption" | "qa"
    degenerate: bool = False

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "item_id": self.item_id,
                "coarse": self.coarse,
                "fine": self.fine,
                "precision": self.precision,
                "recall": self.recall,
                "combined": self.combined,
                "interval_used": self.interval_used,
                "mode": self.mode,
                "degenerate": self.degenerate,
            }
        )

    @classmethod
    def from_json_line(cls, line: str) -> "ScoreRecord":
        d = json.loads(line)
        return cls(
            item_id=str(d["item_id"]),
            coarse=float(d["coarse"]),
            fine=float(d["fine"]),
            precision=float(d["precision"]),
            recall=float(d["recall"]),
            combined=float(d["combined"]),
            interval_used=int(d["interval_used"]),
            mode=str(d["mode"]),
            degenerate=bool(d.get("degenerate", False)),
        )


def coarse_score(frames: np.ndarray, text_vec: np.ndarray) -> float:
    """Cosine between the renormalized mean of frame rows and the text vector."""
    if frames.shape[0] == 0:
        raise EmptyVideoError("no frame rows to pool")
    pooled = frames.astype(np.float64).mean(axis=0)
    norm = float(np.linalg.norm(pooled))
    if norm == 0.0:
        raise DegeneratePoolingError("pooled frame embedding has zero norm")
    text64 = np.asarray(text_vec, dtype=np.float64).reshape(-1)
    if text64.shape[0] != pooled.shape[0]:
        raise ValueError(f"dim mismatch: frames dim {pooled.shape[0]}, text dim {text64.shape[0]}")
    return float((pooled / norm) @ text64)


def fine_score(patches: np.ndarray, keywords: np.ndarray) -> tuple[float, float, float]:
    """(precision, recall, f1) of greedy max matching between the two sides.

    Precision averages, over keywords, the best similarity to any patch;
    recall averages, over patches, the best similarity to any keyword.
    f1 is 0 when precision + recall <= 0.
    """
    if patches.shape[0] == 0 or keywords.shape[0] == 0:
        raise EmptySideError(
            f"fine score undefined: {patches.shape[0]} patches, {keywords.shape[0]} keywords"
        )
    if patches.shape[1] != keywords.shape[1]:
        raise ValueError(
            f"dim mismatch: patches dim {patches.shape[1]}, keywords dim {keywords.shape[1]}"
        )
    sim = patches.astype(np.float64) @ keywords.astype(np.float64).T
    # maxima are summed in sorted order so row permutations cannot shift the mean
    precision = float(np.sort(sim.max(axis=0)).mean())
    recall = float(np.sort(sim.max(axis=1)).mean())
    f1 = f1_score(precision, recall)
    return precision, recall, f1


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 for non-positive sums."""
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def combined_score(coarse: float, fine: float) -> float:
    """Arithmetic mean of the coarse and fine scores."""
    return (coarse + fine) / 2.0


def score_item(reader: ContainerReader, item: ManifestItem, cfg: SamplerConfig) -> ScoreRecord:
    """Score one pairing: sample frames, select rows, combine coarse and fine.

    An empty patch or keyword side yields fine = 0 with the record flagged
    degenerate (absent evidence should not reward the pair); an empty
    sampled frame set propagates as EmptyVideoError.
    """
    video, text = item.video, item.text
    sampled = sample_indices(video.frame_count, cfg)
    frames, patches = select_sampled(
        video, reader.block(video.frame_block), reader.block(video.patch_block), sampled
    )
    full_text_vec = reader.block(text.full_text_block)[0]
    try:
        coarse = coarse_score(frames, full_text_vec)
        degenerate = text.degenerate
        try:
            precision, recall, fine = fine_score(patches, reader.block(text.keyword_block))
        except EmptySideError:
            precision = recall = fine = 0.0
            degenerate = True
    except ValueError as exc:  # cross-block inconsistency is a container problem
        raise ValidationError(f"item {item.id!r}: {exc}") from exc
    return ScoreRecord(
        item_id=item.id,
        coarse=coarse,
        fine=fine,
        precision=precision,
        recall=recall,
        combined=combined_score(coarse, fine),
        interval_used=cfg.interval,
        mode=text.kind,
        degenerate=degenerate,
    )


def score_container(
    reader: ContainerReader,
    cfg: SamplerConfig,
    mode: Optional[str] = None,
    jobs: int = 1,
) -> list[ScoreRecord]:
    """Score every item (optionally restricted to one text kind).

    Items may be scored by a worker pool, but the result order is always
    manifest order, so output is deterministic regardless of ``jobs``.
    """
    items = [it for it in reader.items() if mode is None or it.text.kind == mode]
    if jobs <= 1:
        return [score_item(reader, it, cfg) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda it: score_item(reader, it, cfg), items))


def write_records(records: Iterable[ScoreRecord], fh) -> None:
    for rec in records:
        fh.write(rec.to_json_line() + "\n")


def read_records(fh) -> list[ScoreRecord]:
    return [ScoreRecord.from_json_line(line) for line in fh if line.strip()]
