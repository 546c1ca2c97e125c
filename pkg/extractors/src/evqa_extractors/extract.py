"""The extraction pipeline: videos + texts in, scoring container out.

For every sampled frame the image encoder emits one frame row; the
detector proposes regions whose crops become patch rows tagged with
(frame_index, region). The text side gets one full-text row plus one row
per extracted keyword. All rows are unit-normalized before writing.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import writer
from .detectors import crop
from .videos import FrameSource, VideoReadError

log = logging.getLogger("evqa-extract")


@dataclass
class ExtractionJob:
    texts_path: Path
    out_path: Path
    videos_root: Path = Path(".")
    interval: int = 30
    source_tag_default: str = "extracted"

    def __post_init__(self):
        self.texts_path = Path(self.texts_path)
        self.out_path = Path(self.out_path)
        self.videos_root = Path(self.videos_root)
        if self.interval < 1:
            raise ValueError(f"interval must be >= 1, got {self.interval}")


@dataclass
class ExtractionSummary:
    items: int = 0
    skipped: list[str] = field(default_factory=list)
    frame_rows: int = 0
    patch_rows: int = 0


def load_text_records(path: Path) -> list[dict]:
    """Input schema: JSONL of {id, video, question?, answer|caption[, source_tag]}."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            d = json.loads(line)
            if "id" not in d or "video" not in d:
                raise ValueError(f"{path}:{line_no}: need 'id' and 'video' fields")
            if "answer" in d and "question" in d:
                d["_kind"] = "qa"
                d["_text"] = f"{d['question']} {d['answer']}"
            elif "caption" in d:
                d["_kind"] = "caption"
                d["_text"] = d["caption"]
            else:
                raise ValueError(
                    f"{path}:{line_no}: need either question+answer or caption"
                )
            records.append(d)
    return records


def sampled_indices(frame_count: int, interval: int) -> list[int]:
    return list(range(1, frame_count + 1, interval))


def run_extraction(job: ExtractionJob, image_encoder, text_encoder, detector,
                   keyword_fn) -> ExtractionSummary:
    records = load_text_records(job.texts_path)
    summary = ExtractionSummary()
    items: list[dict] = []
    blocks: dict[str, np.ndarray] = {}

    for rec in records:
        item_id = str(rec["id"])
        video_path = job.videos_root / str(rec["video"])
        try:
            source = FrameSource(video_path)
        except VideoReadError as exc:
            log.warning("skipping %s: %s", item_id, exc)
            summary.skipped.append(item_id)
            continue

        indices = sampled_indices(source.frame_count, job.interval)
        frame_rows: list[np.ndarray] = []
        patch_rows: list[np.ndarray] = []
        patch_meta: list[tuple[int, tuple]] = []
        for frame_number, image in source.frames(indices):
            frame_rows.append(image_encoder.encode_image(image))
            for box in detector.detect(image):
                patch_rows.append(image_encoder.encode_image(crop(image, box)))
                patch_meta.append((frame_number, box))

        keywords = keyword_fn(rec["_text"])
        keyword_rows = [text_encoder.encode_text(kw) for kw in keywords]
        fulltext_row = text_encoder.encode_text(rec["_text"])

        dim_img = image_encoder.dim
        dim_txt = text_encoder.dim
        blocks[f"{item_id}.frames"] = writer.unit_normalize(
            np.stack(frame_rows) if frame_rows else np.zeros((0, dim_img))
        )
        blocks[f"{item_id}.patches"] = writer.unit_normalize(
            np.stack(patch_rows) if patch_rows else np.zeros((0, dim_img))
        )
        blocks[f"{item_id}.keywords"] = writer.unit_normalize(
            np.stack(keyword_rows) if keyword_rows else np.zeros((0, dim_txt))
        )
        blocks[f"{item_id}.fulltext"] = writer.unit_normalize(fulltext_row.reshape(1, -1))

        items.append(
            {
                "id": item_id,
                "source_tag": str(rec.get("source_tag", job.source_tag_default)),
                "video": writer.video_entry(
                    video_id=str(rec["video"]),
                    frame_count=source.frame_count,
                    frame_indices=indices,
                    patch_meta=patch_meta,
                    block_prefix=item_id,
                ),
                "text": writer.text_entry(
                    text_id=f"{item_id}.text",
                    kind=rec["_kind"],
                    question=rec.get("question"),
                    answer_or_caption=rec.get("answer", rec.get("caption", "")),
                    keywords=keywords,
                    block_prefix=item_id,
                ),
            }
        )
        summary.items += 1
        summary.frame_rows += len(frame_rows)
        summary.patch_rows += len(patch_rows)

    if not items:
        raise VideoReadError("no extractable items (all videos unreadable?)")
    model_tag = f"{image_encoder.tag}+{text_encoder.tag}+{detector.tag}|crops=native"
    writer.write_container(job.out_path, model_tag, items, blocks)
    return summary
