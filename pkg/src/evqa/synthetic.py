"""Synthetic container builders for tests, demos, and structural replications.

Real scoring needs encoder/detector toolchains; everything here fabricates
unit-normalized embeddings directly so the scoring, filtering, and format
machinery can be exercised at desk scale with known geometry.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .container import Manifest, ManifestItem, PatchMeta, TextUnit, VideoItem, write_container

STABILITY_INTERVALS = (10, 20, 30, 40, 50, 60)


def unit_rows(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    """Random unit-norm float32 rows."""
    if rows == 0:
        return np.zeros((0, dim), dtype=np.float32)
    m = rng.standard_normal((rows, dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return m.astype(np.float32)


def renormalize(rows: np.ndarray) -> np.ndarray:
    return (rows / np.linalg.norm(rows, axis=1, keepdims=True)).astype(np.float32)


def make_item(
    item_id: str,
    source_tag: str,
    frame_count: int,
    frame_indices: list[int],
    patch_frames: list[int],
    keywords: list[str],
    kind: str = "qa",
    question: str | None = "what is shown?",
    answer: str = "a synthetic scene",
) -> ManifestItem:
    if kind == "caption":
        question = None
    video = VideoItem(
        id=f"{item_id}.v",
        frame_count=frame_count,
        frame_block=f"{item_id}.frames",
        frame_indices=frame_indices,
        patch_block=f"{item_id}.patches",
        patches=[PatchMeta(frame_index=f, region=(0.0, 0.0, 1.0, 1.0)) for f in patch_frames],
    )
    text = TextUnit(
        id=f"{item_id}.t",
        kind=kind,
        question=question,
        answer_or_caption=answer,
        keywords=keywords,
        keyword_block=f"{item_id}.keywords",
        full_text_block=f"{item_id}.fulltext",
    )
    return ManifestItem(id=item_id, source_tag=source_tag, video=video, text=text)


def build_random_container(
    path: str | Path, rng: np.random.Generator, n_items: int = 3
) -> Manifest:
    """A small valid container with random geometry (round-trip tests)."""
    items: list[ManifestItem] = []
    blocks: dict[str, np.ndarray] = {}
    for i in range(n_items):
        item_id = f"item-{i:03d}"
        dim = int(rng.integers(2, 10))  # dim 1 invites antipodal-pooling degeneracy
        m = int(rng.integers(1, 12))
        stored = sorted({1, *rng.integers(1, m + 1, size=int(rng.integers(0, m))).tolist()})
        patch_frames = rng.integers(1, m + 1, size=int(rng.integers(0, 5))).tolist()
        n_kw = int(rng.integers(0, 4))
        keywords = [f"kw{i}{j}" for j in range(n_kw)]
        kind = "qa" if rng.integers(0, 2) else "caption"
        items.append(
            make_item(item_id, f"src{int(rng.integers(0, 2))}", m, stored, patch_frames, keywords, kind)
        )
        blocks[f"{item_id}.frames"] = unit_rows(rng, len(stored), dim)
        blocks[f"{item_id}.patches"] = unit_rows(rng, len(patch_frames), dim)
        blocks[f"{item_id}.keywords"] = unit_rows(rng, n_kw, dim)
        blocks[f"{item_id}.fulltext"] = unit_rows(rng, 1, dim)
    human = None
    if rng.integers(0, 2):
        human = {it.id: float(np.round(rng.uniform(1, 5), 3)) for it in items}
    manifest = Manifest(model_tag="synthetic", items=items, human_scores=human)
    write_container(manifest, blocks, path)
    return manifest


def build_stability_container(path: str | Path, n_videos: int = 50, dim: int = 64) -> Manifest:
    """Per-video constant embeddings built from exact basis geometry.

    Frame rows of a video are all one basis vector, patch rows another,
    so pooled means and per-row maxima are exact in float64 and scores
    cannot drift with the sampling interval. Frame counts vary per video,
    including exact multiples of the common intervals.
    """
    assert n_videos <= dim
    items: list[ManifestItem] = []
    blocks: dict[str, np.ndarray] = {}
    inv_sqrt2 = np.float32(1.0) / np.sqrt(np.float32(2.0))
    for v in range(n_videos):
        item_id = f"vid-{v:03d}"
        m = [37 + 11 * v, 60 + v, 120, 300, 50 * (1 + v % 6)][v % 5]
        e_frame = np.zeros(dim, dtype=np.float32)
        e_frame[v] = 1.0
        e_patch = np.zeros(dim, dtype=np.float32)
        e_patch[(v + 7) % dim] = 1.0
        e_miss = np.zeros(dim, dtype=np.float32)
        e_miss[(v + 13) % dim] = 1.0
        text_vec = np.zeros(dim, dtype=np.float32)
        text_vec[v] = inv_sqrt2
        text_vec[(v + 1) % dim] = inv_sqrt2

        stored = list(range(1, m + 1))
        items.append(
            make_item(item_id, "stability", m, stored, stored, ["hit", "miss"], kind="caption")
        )
        blocks[f"{item_id}.frames"] = np.tile(e_frame, (m, 1))
        blocks[f"{item_id}.patches"] = np.tile(e_patch, (m, 1))
        blocks[f"{item_id}.keywords"] = np.stack([e_patch, e_miss])
        blocks[f"{item_id}.fulltext"] = text_vec.reshape(1, dim)
    manifest = Manifest(model_tag="stability-synthetic", items=items)
    write_container(manifest, blocks, path)
    return manifest


def build_separation_container(
    path: str | Path,
    rng: np.random.Generator,
    n_clean: int = 500,
    n_noisy: int = 500,
    dim: int = 32,
    min_cosine: float = 0.8,
) -> Manifest:
    """Clean items whose keywords hug their patches, noisy items orthogonal.

    Clean keyword rows are built around the item's patch base with bounded
    perpendicular noise (pairwise cosine to every patch row >= min_cosine,
    asserted). Noisy keyword and text rows are orthogonalized against the
    item's patch and frame spans, so their fine and coarse scores sit near
    zero. Tags: srcA/srcB for clean, srcA-noisy/srcB-noisy for noisy.
    """
    items: list[ManifestItem] = []
    blocks: dict[str, np.ndarray] = {}

    def perturb(base: np.ndarray, scale: float, count: int) -> np.ndarray:
        noise = rng.standard_normal((count, dim))
        noise -= np.outer(noise @ base, base)  # keep noise perpendicular to base
        noise /= np.linalg.norm(noise, axis=1, keepdims=True)
        return renormalize(base + scale * noise)

    def orthogonalized(against: np.ndarray, count: int) -> np.ndarray:
        q, _ = np.linalg.qr(against.astype(np.float64).T)
        w = rng.standard_normal((count, dim))
        w -= (w @ q) @ q.T
        return renormalize(w)

    for i in range(n_clean + n_noisy):
        clean = i < n_clean
        item_id = f"{'clean' if clean else 'noisy'}-{i if clean else i - n_clean:04d}"
        tag = ("srcA" if i % 2 == 0 else "srcB") + ("" if clean else "-noisy")
        base = unit_rows(rng, 1, dim)[0].astype(np.float64)
        frames = perturb(base, 0.15, 3)
        patches = perturb(base, 0.15, 3)
        if clean:
            keywords = perturb(base, 0.25, 2)
            fulltext = perturb(base, 0.25, 1)
            cos = patches.astype(np.float64) @ keywords.astype(np.float64).T
            assert cos.min() >= min_cosine, f"clean construction too loose: {cos.min():.3f}"
        else:
            keywords = orthogonalized(patches, 2)
            fulltext = orthogonalized(frames, 1)
        items.append(
            make_item(
                item_id,
                tag,
                frame_count=3,
                frame_indices=[1, 2, 3],
                patch_frames=[1, 2, 3],
                keywords=["obj-a", "obj-b"],
            )
        )
        blocks[f"{item_id}.frames"] = frames
        blocks[f"{item_id}.patches"] = patches
        blocks[f"{item_id}.keywords"] = keywords
        blocks[f"{item_id}.fulltext"] = fulltext
    manifest = Manifest(model_tag="separation-synthetic", items=items)
    write_container(manifest, blocks, path)
    return manifest


def build_demo_container(path: str | Path, seed: int = 20240611) -> Manifest:
    """The checked-in 3-item QA fixture: distinct scores, human ratings."""
    rng = np.random.default_rng(seed)
    dim = 8
    items: list[ManifestItem] = []
    blocks: dict[str, np.ndarray] = {}
    qa_texts = [
        ("what instrument is played?", "a man is playing the guitar on stage"),
        ("what animal appears?", "a dog catches a ball in the park"),
        ("what is the person doing?", "someone is slicing vegetables in a kitchen"),
    ]
    alignment = [0.05, 0.6, 2.5]  # noise scale: item 0 aligned best
    for i, ((question, answer), scale) in enumerate(zip(qa_texts, alignment)):
        item_id = f"demo-{i}"
        keywords = [w for w in answer.split() if len(w) > 3][:3]
        base = unit_rows(rng, 1, dim)[0].astype(np.float64)
        jitter = rng.standard_normal((8 + len(keywords), dim)) * scale
        rows = renormalize(base + jitter)
        items.append(
            make_item(
                item_id,
                "demo",
                frame_count=90,
                frame_indices=[1, 31, 61],
                patch_frames=[1, 1, 31, 61],
                keywords=keywords,
                kind="qa",
                question=question,
                answer=answer,
            )
        )
        blocks[f"{item_id}.frames"] = rows[0:3]
        blocks[f"{item_id}.patches"] = rows[3:7]
        blocks[f"{item_id}.keywords"] = rows[7 : 7 + len(keywords)]
        blocks[f"{item_id}.fulltext"] = rows[-1:]
    human = {"demo-0": 4.6, "demo-1": 3.1, "demo-2": 1.2}
    manifest = Manifest(model_tag="demo-synthetic", items=items, human_scores=human)
    write_container(manifest, blocks, path)
    return manifest
