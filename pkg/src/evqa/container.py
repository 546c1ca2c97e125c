"""On-disk container for embeddings and metadata.

A container is a directory holding one ``manifest.json`` plus one ``.evqb``
file per embedding block. Block layout (bit-exact, cross-language):

    magic b"EVQB" | u32 version=1 | u32 rows | u32 dim | rows*dim f32

All integers and floats are little-endian; the payload is row-major.
Every row is unit L2 norm within ``NORM_TOL`` (validated at write and read).
The manifest is JSON for human auditability; binary payloads never pass
through the text parser.

Readers are safe to share across threads after open; writing a container
is a single-writer operation.
"""
from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import ContainerError, DanglingBlockError, FormatError, ValidationError

MAGIC = b"EVQB"
FORMAT_VERSION = 1
HEADER_BYTES = 16
NORM_TOL = 1e-3
MANIFEST_NAME = "manifest.json"
BLOCK_SUFFIX = ".evqb"

_BLOCK_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass(frozen=True)
class PatchMeta:
    """Provenance of one patch row: source frame and detector region.

    Scoring ignores ``region``; it is kept so extraction stays auditable.
    """

    frame_index: int
    region: tuple[float, float, float, float]

    def to_json(self) -> dict:
        return {"frame_index": self.frame_index, "region": list(self.region)}

    @classmethod
    def from_json(cls, d: dict) -> "PatchMeta":
        return cls(frame_index=int(d["frame_index"]), region=tuple(float(v) for v in d["region"]))


@dataclass
class VideoItem:
    """One video: identity, total frame count, and its embedding blocks.

    ``frame_indices[i]`` is the original 1-based frame number of row ``i``
    of the frame block; not all frames need a stored row. ``patches[i]``
    describes row ``i`` of the patch block.
    """

    id: str
    frame_count: int
    frame_block: str
    frame_indices: list[int]
    patch_block: str
    patches: list[PatchMeta]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "frame_count": self.frame_count,
            "frame_block": self.frame_block,
            "frame_indices": list(self.frame_indices),
            "patch_block": self.patch_block,
            "patches": [p.to_json() for p in self.patches],
        }

    @classmethod
    def from_json(cls, d: dict) -> "VideoItem":
        return cls(
            id=str(d["id"]),
            frame_count=int(d["frame_count"]),
            frame_block=str(d["frame_block"]),
            frame_indices=[int(i) for i in d["frame_indices"]],
            patch_block=str(d["patch_block"]),
            patches=[PatchMeta.from_json(p) for p in d["patches"]],
        )


@dataclass
class TextUnit:
    """A caption or question/answer pair with its extracted keywords.

    ``keyword_block`` has one row per keyword (same order); the full-text
    block has exactly one row. ``degenerate`` marks units whose keyword
    extraction came back empty (set by noisy synthesis).
    """

    id: str
    kind: str  # "caption" | "qa"
    question: Optional[str]
    answer_or_caption: str
    keywords: list[str]
    keyword_block: str
    full_text_block: str
    degenerate: bool = False

    def full_text(self) -> str:
        """The text the embeddings and keywords were derived from."""
        if self.kind == "qa":
            return f"{self.question} {self.answer_or_caption}"
        return self.answer_or_caption

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "question": self.question,
            "answer_or_caption": self.answer_or_caption,
            "keywords": list(self.keywords),
            "keyword_block": self.keyword_block,
            "full_text_block": self.full_text_block,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_json(cls, d: dict) -> "TextUnit":
        return cls(
            id=str(d["id"]),
            kind=str(d["kind"]),
            question=d.get("question"),
            answer_or_caption=str(d["answer_or_caption"]),
            keywords=[str(k) for k in d["keywords"]],
            keyword_block=str(d["keyword_block"]),
            full_text_block=str(d["full_text_block"]),
            degenerate=bool(d.get("degenerate", False)),
        )


@dataclass
class ManifestItem:
    """One scored unit: a video paired with a text, tagged by origin."""

    id: str
    source_tag: str
    video: VideoItem
    text: TextUnit

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source_tag": self.source_tag,
            "video": self.video.to_json(),
            "text": self.text.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ManifestItem":
        return cls(
            id=str(d["id"]),
            source_tag=str(d["source_tag"]),
            video=VideoItem.from_json(d["video"]),
            text=TextUnit.from_json(d["text"]),
        )


@dataclass
class Manifest:
    format_version: int = FORMAT_VERSION
    model_tag: str = ""
    items: list[ManifestItem] = field(default_factory=list)
    human_scores: Optional[dict[str, float]] = None

    def block_names(self) -> list[str]:
        """All block names referenced by any item, in first-reference order."""
        seen: dict[str, None] = {}
        for it in self.items:
            for name in (
                it.video.frame_block,
                it.video.patch_block,
                it.text.keyword_block,
                it.text.full_text_block,
            ):
                seen.setdefault(name, None)
        return list(seen)

    def to_json(self) -> dict:
        return {
            "format_version": self.format_version,
            "model_tag": self.model_tag,
            "items": [it.to_json() for it in self.items],
            "human_scores": self.human_scores,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Manifest":
        human = d.get("human_scores")
        return cls(
            format_version=int(d["format_version"]),
            model_tag=str(d.get("model_tag", "")),
            items=[ManifestItem.from_json(it) for it in d["items"]],
            human_scores=None if human is None else {str(k): float(v) for k, v in human.items()},
        )


def check_unit_rows(data: np.ndarray, block_name: str) -> None:
    """Raise ValidationError naming block and row if any row is not unit norm."""
    if data.shape[0] == 0:
        return
    norms = np.linalg.norm(data.astype(np.float64), axis=1)
    # negated <= so NaN/inf rows fail the check rather than slipping through
    bad = np.nonzero(~(np.abs(norms - 1.0) <= NORM_TOL))[0]
    if bad.size:
        row = int(bad[0])
        raise ValidationError(
            f"block {block_name!r} row {row}: L2 norm {norms[row]:.6f} outside "
            f"[{1 - NORM_TOL}, {1 + NORM_TOL}]"
        )


def _check_block_shape(data: np.ndarray, block_name: str) -> None:
    if data.ndim != 2:
        raise ValidationError(f"block {block_name!r}: expected a 2-D matrix, got ndim={data.ndim}")
    if data.shape[1] < 1:
        raise ValidationError(f"block {block_name!r}: dim must be >= 1, got {data.shape[1]}")
    if data.dtype != np.float32:
        raise ValidationError(f"block {block_name!r}: dtype must be float32, got {data.dtype}")


def write_block(path: Path, data: np.ndarray, block_name: str) -> None:
    """Write one embedding block; validates shape and row norms first."""
    _check_block_shape(data, block_name)
    check_unit_rows(data, block_name)
    rows, dim = data.shape
    header = MAGIC + np.array([FORMAT_VERSION, rows, dim], dtype="<u4").tobytes()
    payload = np.ascontiguousarray(data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_block(path: Path, block_name: str) -> np.ndarray:
    """Read one embedding block, re-validating header and row norms."""
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise DanglingBlockError(f"block {block_name!r}: file missing at {path}") from None
    if len(raw) < HEADER_BYTES:
        raise FormatError(f"block {block_name!r}: truncated header ({len(raw)} bytes)")
    if raw[:4] != MAGIC:
        raise FormatError(f"block {block_name!r}: bad magic {raw[:4]!r}")
    version, rows, dim = np.frombuffer(raw, dtype="<u4", count=3, offset=4)
    if version != FORMAT_VERSION:
        raise FormatError(f"block {block_name!r}: unsupported version {version}")
    if dim < 1:
        raise FormatError(f"block {block_name!r}: dim must be >= 1, got {dim}")
    expected = HEADER_BYTES + int(rows) * int(dim) * 4
    if len(raw) != expected:
        raise FormatError(
            f"block {block_name!r}: expected {expected} bytes for {rows}x{dim}, got {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_BYTES).reshape(int(rows), int(dim))
    data = data.astype(np.float32, copy=True)
    check_unit_rows(data, block_name)
    return data


def _manifest_issues(manifest: Manifest) -> list[str]:
    """Structural problems of the manifest alone (no block payloads)."""
    issues: list[str] = []
    if manifest.format_version != FORMAT_VERSION:
        issues.append(f"manifest: unsupported format_version {manifest.format_version}")
    seen_ids: set[str] = set()
    for it in manifest.items:
        if it.id in seen_ids:
            issues.append(f"item {it.id!r}: duplicate item id")
        seen_ids.add(it.id)
        v = it.video
        if v.frame_count < 0:
            issues.append(f"item {it.id!r}: negative frame_count {v.frame_count}")
        if len(v.frame_indices) > v.frame_count:
            issues.append(
                f"item {it.id!r}: frame block stores {len(v.frame_indices)} rows "
                f"but frame_count is {v.frame_count}"
            )
        for i, fi in enumerate(v.frame_indices):
            if not 1 <= fi <= v.frame_count:
                issues.append(f"item {it.id!r}: frame_indices[{i}]={fi} outside [1, {v.frame_count}]")
        if any(b >= a for a, b in zip(v.frame_indices[1:], v.frame_indices)):
            issues.append(f"item {it.id!r}: frame_indices not strictly increasing")
        for i, pm in enumerate(v.patches):
            if not 1 <= pm.frame_index <= v.frame_count:
                issues.append(
                    f"item {it.id!r}: patch {i} frame_index={pm.frame_index} outside [1, {v.frame_count}]"
                )
        t = it.text
        if t.kind not in ("caption", "qa"):
            issues.append(f"item {it.id!r}: unknown text kind {t.kind!r}")
        if t.kind == "qa" and t.question is None:
            issues.append(f"item {it.id!r}: qa text without a question")
        if t.kind == "caption" and t.question is not None:
            issues.append(f"item {it.id!r}: caption text carries a question")
        for name in (v.frame_block, v.patch_block, t.keyword_block, t.full_text_block):
            if not _BLOCK_NAME_RE.match(name):
                issues.append(f"item {it.id!r}: block name {name!r} is not filesystem-safe")
    if manifest.human_scores:
        for hid in manifest.human_scores:
            if hid not in seen_ids:
                issues.append(f"human_scores: unknown item id {hid!r}")
    return issues


def _cross_check_item(it: ManifestItem, blocks: Mapping[str, np.ndarray]) -> list[str]:
    """Consistency of an item's metadata against its block shapes."""
    issues: list[str] = []
    v, t = it.video, it.text
    fb = blocks[v.frame_block]
    if fb.shape[0] != len(v.frame_indices):
        issues.append(
            f"item {it.id!r}: frame block {v.frame_block!r} has {fb.shape[0]} rows "
            f"but {len(v.frame_indices)} frame_indices"
        )
    pb = blocks[v.patch_block]
    if pb.shape[0] != len(v.patches):
        issues.append(
            f"item {it.id!r}: patch block {v.patch_block!r} has {pb.shape[0]} rows "
            f"but {len(v.patches)} patch records"
        )
    kb = blocks[t.keyword_block]
    if kb.shape[0] != len(t.keywords):
        issues.append(
            f"item {it.id!r}: keyword block {t.keyword_block!r} has {kb.shape[0]} rows "
            f"but {len(t.keywords)} keywords"
        )
    ftb = blocks[t.full_text_block]
    if ftb.shape[0] != 1:
        issues.append(
            f"item {it.id!r}: full-text block {t.full_text_block!r} must have exactly 1 row, "
            f"got {ftb.shape[0]}"
        )
    return issues


def write_container(manifest: Manifest, blocks: Mapping[str, np.ndarray], path: str | Path) -> None:
    """Write a container directory: ``manifest.json`` plus one file per block.

    All invariants are validated before anything touches the disk.
    """
    issues = _manifest_issues(manifest)
    if issues:
        raise ValidationError("; ".join(issues))
    referenced = manifest.block_names()
    missing = [n for n in referenced if n not in blocks]
    if missing:
        raise DanglingBlockError(f"manifest references blocks not supplied: {missing}")
    for name in referenced:
        _check_block_shape(blocks[name], name)
        check_unit_rows(blocks[name], name)
    for it in manifest.items:
        problems = _cross_check_item(it, blocks)
        if problems:
            raise ValidationError("; ".join(problems))

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for name in referenced:
        write_block(root / f"{name}{BLOCK_SUFFIX}", blocks[name], name)
    manifest_json = json.dumps(manifest.to_json(), indent=2, ensure_ascii=False)
    (root / MANIFEST_NAME).write_text(manifest_json + "\n", encoding="utf-8")


class ContainerReader:
    """Lazy, thread-safe access to a written container.

    Blocks are loaded (and validated) on first access and cached; the
    reader may be shared across concurrent scoring workers.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.exists():
            raise FileNotFoundError(f"container directory not found: {self.path}")
        manifest_path = self.path / MANIFEST_NAME
        if not manifest_path.is_file():
            raise FormatError(f"no {MANIFEST_NAME} in {self.path}")
        try:
            raw = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"manifest is not valid JSON: {exc}") from exc
        self.manifest = Manifest.from_json(raw)
        issues = _manifest_issues(self.manifest)
        if issues:
            raise ValidationError("; ".join(issues))
        for name in self.manifest.block_names():
            if not (self.path / f"{name}{BLOCK_SUFFIX}").is_file():
                raise DanglingBlockError(f"manifest references missing block {name!r}")
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def block(self, name: str) -> np.ndarray:
        with self._lock:
            cached = self._cache.get(name)
        if cached is not None:
            return cached
        data = read_block(self.path / f"{name}{BLOCK_SUFFIX}", name)
        with self._lock:
            self._cache.setdefault(name, data)
            return self._cache[name]

    def items(self) -> Iterable[ManifestItem]:
        return iter(self.manifest.items)


def read_container(path: str | Path) -> ContainerReader:
    """Open a container; validates manifest structure and block existence."""
    return ContainerReader(path)


def validate_container(path: str | Path) -> list[str]:
    """Exhaustively check every container invariant.

    Returns a list of human-readable issues; an empty list means the
    container is valid. Unlike :func:`read_container`, this walks every
    block and never stops at the first problem.
    """
    root = Path(path)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        return [f"no {MANIFEST_NAME} in {root}"]
    try:
        manifest = Manifest.from_json(json.loads(manifest_path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        return [f"manifest unreadable: {exc}"]

    issues = _manifest_issues(manifest)
    blocks: dict[str, np.ndarray] = {}
    for name in manifest.block_names():
        try:
            blocks[name] = read_block(root / f"{name}{BLOCK_SUFFIX}", name)
        except ContainerError as exc:
            issues.append(str(exc))
    for it in manifest.items:
        names = (
            it.video.frame_block,
            it.video.patch_block,
            it.text.keyword_block,
            it.text.full_text_block,
        )
        if all(n in blocks for n in names):
            issues.extend(_cross_check_item(it, blocks))
    return issues
