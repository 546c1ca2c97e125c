"""Container writer implemented against the published format spec.

Intentionally independent of the scoring engine's code: the on-disk
format (docs/container_format.md in the scoring repo) is the contract,
and `evqa validate` is the conformance check for what this writes.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"EVQB"
VERSION = 1


def unit_normalize(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.size == 0:
        return rows.astype(np.float32)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("cannot unit-normalize a zero row")
    return (rows / norms).astype(np.float32)


def write_evqb(path: Path, matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    rows, dim = matrix.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, rows, dim))
        fh.write(matrix.tobytes())


def video_entry(video_id, frame_count, frame_indices, patch_meta, block_prefix):
    return {
        "id": video_id,
        "frame_count": frame_count,
        "frame_block": f"{block_prefix}.frames",
        "frame_indices": list(frame_indices),
        "patch_block": f"{block_prefix}.patches",
        "patches": [
            {"frame_index": fi, "region": [float(v) for v in box]}
            for fi, box in patch_meta
        ],
    }


def text_entry(text_id, kind, question, answer_or_caption, keywords, block_prefix):
    return {
        "id": text_id,
        "kind": kind,
        "question": question,
        "answer_or_caption": answer_or_caption,
        "keywords": list(keywords),
        "keyword_block": f"{block_prefix}.keywords",
        "full_text_block": f"{block_prefix}.fulltext",
        "degenerate": False,
    }


def write_container(out_dir: Path, model_tag: str, items: list[dict],
                    blocks: dict[str, np.ndarray]) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, matrix in blocks.items():
        write_evqb(out_dir / f"{name}.evqb", matrix)
    manifest = {
        "format_version": VERSION,
        "model_tag": model_tag,
        "items": items,
        "human_scores": None,
    }
    text = json.dumps(manifest, indent=2, ensure_ascii=False)
    (out_dir / "manifest.json").write_text(text + "\n", encoding="utf-8")
