"""Image and text encoders producing unit-norm float32 rows.

The grid/bag-of-words pair is deterministic, dependency-free, and shares
one embedding dimension, so containers built with it exercise the full
scoring pipeline offline. The CLIP adapter plugs in a real
vision-language backbone from a local checkpoint when one is available.
"""
from __future__ import annotations

import hashlib
import re

import numpy as np

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _normalize(vec: np.ndarray) -> np.ndarray:
    return (vec / np.linalg.norm(vec)).astype(np.float32)


class GridColorEncoder:
    """Mean RGB over a grid of cells plus a bias cell, L2-normalized.

    The bias component keeps all-black crops away from the zero vector.
    Accepts any image size; cells are computed on the native pixels, so
    no resize step is involved.
    """

    def __init__(self, grid: int = 4):
        self.grid = grid
        self.dim = 3 * grid * grid + 1
        self.tag = f"grid-color-{grid}"

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        if image.ndim != 3 or image.shape[2] != 3:
            raise ValueError(f"expected HxWx3 image, got shape {image.shape}")
        h, w = image.shape[:2]
        ys = np.linspace(0, h, self.grid + 1, dtype=int)
        xs = np.linspace(0, w, self.grid + 1, dtype=int)
        feats = np.empty(self.dim, dtype=np.float64)
        pos = 0
        for gy in range(self.grid):
            for gx in range(self.grid):
                cell = image[ys[gy] : max(ys[gy + 1], ys[gy] + 1),
                             xs[gx] : max(xs[gx + 1], xs[gx] + 1)]
                feats[pos : pos + 3] = cell.reshape(-1, 3).mean(axis=0) / 255.0
                pos += 3
        feats[-1] = 1.0
        return _normalize(feats)


class HashedBowTextEncoder:
    """Hashed bag-of-words with sqrt term weighting and a bias cell.

    Tokens hash via md5 (stable across processes and platforms, unlike
    the builtin hash). Empty text maps to the pure bias direction.
    """

    def __init__(self, dim: int = 49):
        if dim < 2:
            raise ValueError("dim must leave room for the bias cell")
        self.dim = dim
        self.tag = f"hashed-bow-{dim}"

    def _bucket(self, token: str) -> int:
        digest = hashlib.md5(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little") % (self.dim - 1)

    def encode_text(self, text: str) -> np.ndarray:
        feats = np.zeros(self.dim, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            feats[self._bucket(token)] += 1.0
        np.sqrt(feats, out=feats)
        feats[-1] = 1.0
        return _normalize(feats)


class HFClipEncoder:
    """CLIP-style encoder loaded from a local transformers checkpoint.

    Covers both sides (frames/crops and text/keywords) with one shared
    embedding space. Requires the optional [clip] extra and a checkpoint
    directory on disk; nothing is downloaded.
    """

    def __init__(self, checkpoint: str):
        try:
            import torch  # noqa: F401
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise RuntimeError(
                "HFClipEncoder needs the [clip] extra (transformers + torch)"
            ) from exc
        self._torch = __import__("torch")
        self.model = CLIPModel.from_pretrained(checkpoint, local_files_only=True).eval()
        self.processor = CLIPProcessor.from_pretrained(checkpoint, local_files_only=True)
        self.dim = int(self.model.config.projection_dim)
        self.tag = f"hf-clip:{checkpoint}"

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        inputs = self.processor(images=image, return_tensors="pt")
        with self._torch.no_grad():
            feats = self.model.get_image_features(**inputs)[0].numpy().astype(np.float64)
        return _normalize(feats)

    def encode_text(self, text: str) -> np.ndarray:
        inputs = self.processor(text=[text], return_tensors="pt", truncation=True, padding=True)
        with self._torch.no_grad():
            feats = self.model.get_text_features(**inputs)[0].numpy().astype(np.float64)
        return _normalize(feats)


def build_encoders(kind: str, clip_checkpoint: str | None = None):
    """(image_encoder, text_encoder) pair for a CLI selection."""
    if kind == "grid":
        image = GridColorEncoder()
        return image, HashedBowTextEncoder(dim=image.dim)
    if kind == "clip":
        if not clip_checkpoint:
            raise ValueError("--encoder clip requires --clip-checkpoint")
        encoder = HFClipEncoder(clip_checkpoint)
        return encoder, encoder
    raise ValueError(f"unknown encoder {kind!r}")
