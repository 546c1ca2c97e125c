"""Ranking, top-fraction selection, and noisy-negative synthesis.

Selection sorts by the chosen score descending with item-id ascending as
the tie break, so reports are stable under shuffled manifests, and takes
floor(p * n) items. Noisy negatives replace a QA answer with the
space-joined keywords extracted from that answer.
"""
from __future__ import annotations

import dataclasses
import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .container import (
    ContainerReader,
    Manifest,
    ManifestItem,
    TextUnit,
    write_container,
)
from .errors import ConfigError, EvqaError
from .scoring import ScoreRecord

SCORE_KEYS = ("combined", "coarse", "fine")


@dataclass
class FilterReport:
    """Ranked selection at fraction ``p`` with per-source composition counts."""

    fraction: float
    key: str
    selected_ids: list[str]
    composition: dict[str, int]
    total_selected: int

    def to_json(self) -> dict:
        return {
            "fraction": self.fraction,
            "key": self.key,
            "total_selected": self.total_selected,
            "selected_ids": list(self.selected_ids),
            "composition": dict(sorted(self.composition.items())),
        }


def selection_size(p: float, n: int) -> int:
    """floor(p * n), computed exactly from p's decimal form.

    Uses the shortest decimal repr of ``p`` so 0.1 * 30 selects 3 items,
    not 2 via binary rounding.
    """
    return int(math.floor(Fraction(repr(float(p))) * n))


def select_top(
    records: Sequence[ScoreRecord],
    p: float,
    key: str,
    source_tags: Mapping[str, str],
) -> FilterReport:
    """Deterministically select the top fraction of records by one score."""
    if not records:
        raise EvqaError("cannot filter an empty record set")
    if not 0.0 < p <= 1.0:
        raise ConfigError(f"fraction must be in (0, 1], got {p}")
    if key not in SCORE_KEYS:
        raise ConfigError(f"unknown score key {key!r}; choose from {SCORE_KEYS}")
    missing = [r.item_id for r in records if r.item_id not in source_tags]
    if missing:
        raise EvqaError(f"no source_tag for items: {missing[:5]}")
    shaky = [r.item_id for r in records if not math.isfinite(getattr(r, key))]
    if shaky:  # NaN keys would silently scramble the ranking
        raise EvqaError(f"non-finite {key} score for items: {shaky[:5]}")

    ranked = sorted(records, key=lambda r: (-getattr(r, key), r.item_id))
    take = selection_size(p, len(records))
    selected = ranked[:take]
    composition = Counter(source_tags[r.item_id] for r in selected)
    return FilterReport(
        fraction=float(p),
        key=key,
        selected_ids=[r.item_id for r in selected],
        composition=dict(composition),
        total_selected=take,
    )


def synthesize_noisy(text: TextUnit, source) -> TextUnit:
    """QA negative: the answer becomes the bag of its own keywords.

    The question is untouched. Empty extraction leaves an empty answer and
    flags the unit degenerate. Embedding block references are resolved by
    the container-level augmentation (:func:`make_noisy_container`).
    """
    if text.kind != "qa":
        raise EvqaError(f"noisy synthesis requires a qa text, got kind={text.kind!r}")
    extraction = source.extract(text.answer_or_caption)
    answer = " ".join(extraction.keywords)
    return dataclasses.replace(
        text,
        answer_or_caption=answer,
        degenerate=text.degenerate or extraction.degenerate or not extraction.keywords,
    )


def _fresh_block_name(base: str, taken) -> str:
    """A filesystem-safe block name derived from base, unique within taken."""
    name = re.sub(r"[^A-Za-z0-9._-]", "-", base).lstrip("._-") or "block"
    candidate = name
    bump = 1
    while candidate in taken:
        candidate = f"{name}-{bump}"
        bump += 1
    return candidate


def make_noisy_container(reader: ContainerReader, out_path, source) -> Manifest:
    """Write a copy of the container with a noisy twin per QA item appended.

    Twins share the original video blocks. Their keyword list is
    re-extracted from the degraded text; keyword rows are reused from the
    original keyword block by string match (keywords without a stored row
    are dropped). The full-text embedding is reused as-is: this primary
    engine cannot embed new text, so twins meant for faithful re-scoring
    should be re-embedded from the exported texts (see ``--texts-out``).
    """
    blocks = {name: reader.block(name) for name in reader.manifest.block_names()}
    items: list[ManifestItem] = list(reader.manifest.items)
    for item in reader.manifest.items:
        if item.text.kind != "qa":
            continue
        degraded = synthesize_noisy(item.text, source)
        new_keywords = source.extract(degraded.full_text()).keywords
        row_by_keyword = {kw: i for i, kw in enumerate(item.text.keywords)}
        kept = [kw for kw in new_keywords if kw in row_by_keyword]
        kw_block_name = _fresh_block_name(f"{item.id}.noisy.keywords", blocks)
        blocks[kw_block_name] = blocks[item.text.keyword_block][
            [row_by_keyword[kw] for kw in kept]
        ]
        noisy_text = dataclasses.replace(
            degraded,
            id=f"{item.text.id}-noisy",
            keywords=kept,
            keyword_block=kw_block_name,
            degenerate=degraded.degenerate or not kept,
        )
        items.append(
            ManifestItem(
                id=f"{item.id}-noisy",
                source_tag=f"{item.source_tag}-noisy",
                video=item.video,
                text=noisy_text,
            )
        )
    manifest = Manifest(
        format_version=reader.manifest.format_version,
        model_tag=reader.manifest.model_tag,
        items=items,
        human_scores=reader.manifest.human_scores,
    )
    write_container(manifest, blocks, out_path)
    return manifest


def export_texts_jsonl(manifest: Manifest, fh) -> None:
    """Dump items in the extraction toolkit's input schema.

    One line per item: {id, video, question?, answer|caption}; ``video``
    holds the source video id since the container stores no media paths.
    """
    for item in manifest.items:
        d: dict = {"id": item.id, "video": item.video.id}
        if item.text.kind == "qa":
            d["question"] = item.text.question
            d["answer"] = item.text.answer_or_caption
        else:
            d["caption"] = item.text.answer_or_caption
        fh.write(json.dumps(d, ensure_ascii=False) + "\n")


def write_selection(report: FilterReport, report_path, ids_path) -> None:
    """Write filter_report.json and selected_ids.txt (one id per line)."""
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
    with open(ids_path, "w", encoding="utf-8") as fh:
        for item_id in report.selected_ids:
            fh.write(item_id + "\n")
