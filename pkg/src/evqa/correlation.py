"""Rank correlation between metric scores and human ratings.

Kendall tau-b uses merge-sort discordance counting (O(n log n)) with the
tie-corrected denominator; pairs tied in both series are excluded from
every count. Spearman rho is the Pearson correlation of fractional
(average) ranks. Both depend only on order, never on score magnitudes.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateSeriesError
from .scoring import ScoreRecord


@dataclass
class RatedPairSeries:
    """Aligned metric and human scores for a set of items."""

    ids: list[str]
    metric_scores: list[float]
    human_scores: list[float]

    def __post_init__(self):
        n = len(self.ids)
        if len(self.metric_scores) != n or len(self.human_scores) != n:
            raise ValueError("ids, metric_scores, human_scores must have equal lengths")
        if n < 2:
            raise ValueError(f"need at least 2 rated pairs, got {n}")
        if len(set(self.ids)) != n:
            raise ValueError("ids must be unique")
        if not all(map(math.isfinite, self.metric_scores)) or not all(
            map(math.isfinite, self.human_scores)
        ):
            raise ValueError("scores must be finite")


def _tie_term(values: Sequence) -> int:
    """Sum of t*(t-1)/2 over groups of equal values (input must be sorted)."""
    total = 0
    run = 1
    for a, b in zip(values, values[1:]):
        if b == a:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    total += run * (run - 1) // 2
    return total


def _count_discordant(y_in_x_order: list[float]) -> int:
    """Strict inversions of y after sorting by (x, y): the discordant pairs."""
    n = len(y_in_x_order)
    src = list(y_in_x_order)
    buf = [0.0] * n
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[j] < src[i]:
                    inversions += mid - i
                    buf[k] = src[j]
                    j += 1
                else:
                    buf[k] = src[i]
                    i += 1
                k += 1
            buf[k:hi] = src[i:mid] if i < mid else src[j:hi]
        src, buf = buf, src
        width *= 2
    return inversions


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Kendall correlation.

    (C - D) / sqrt((C + D + Tx) * (C + D + Ty)) with C/D the concordant and
    discordant pair counts and Tx/Ty the pairs tied in exactly one series.
    """
    n = len(x)
    if len(y) != n:
        raise ValueError("series lengths differ")
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    pairs = sorted(zip(x, y))
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]

    n0 = n * (n - 1) // 2
    n1 = _tie_term(xs)  # pairs tied in x (including both-tied)
    n2 = _tie_term(sorted(y))  # pairs tied in y (including both-tied)
    n3 = _tie_term(pairs)  # pairs tied in both
    if n0 == n1 or n0 == n2:
        raise DegenerateSeriesError("a series is entirely tied; tau-b denominator is zero")

    discordant = _count_discordant(ys)
    numerator = n0 - n1 - n2 + n3 - 2 * discordant  # equals C - D
    return numerator / math.sqrt((n0 - n1) * (n0 - n2))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Fractional ranks: ties receive the mean of the ranks they span."""
    n = len(values)
    order = np.argsort(values, kind="stable")
    sv = values[order]
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0  # mean of 1-based ranks i+1..j+1
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of fractional ranks."""
    n = len(x)
    if len(y) != n:
        raise ValueError("series lengths differ")
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    rx = _average_ranks(np.asarray(x, dtype=np.float64))
    ry = _average_ranks(np.asarray(y, dtype=np.float64))
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        raise DegenerateSeriesError("a rank vector is constant; rho is undefined")
    return float(dx @ dy) / denom


def evaluate(series: RatedPairSeries) -> dict:
    """Correlation report for one rated series."""
    return {
        "kendall_b": kendall_tau_b(series.metric_scores, series.human_scores),
        "spearman": spearman_rho(series.metric_scores, series.human_scores),
        "n": len(series.ids),
    }


def series_from_pairs_jsonl(fh) -> RatedPairSeries:
    """Parse JSONL lines of {id, metric_score, human_score}."""
    ids: list[str] = []
    metric: list[float] = []
    human: list[float] = []
    for line in fh:
        if not line.strip():
            continue
        d = json.loads(line)
        ids.append(str(d["id"]))
        metric.append(float(d["metric_score"]))
        human.append(float(d["human_score"]))
    return RatedPairSeries(ids=ids, metric_scores=metric, human_scores=human)


def series_from_records(
    records: Sequence[ScoreRecord], key: str, human_scores: Mapping[str, float]
) -> RatedPairSeries:
    """Join score records with human ratings by item id (strict: sets must match)."""
    scored_ids = {r.item_id for r in records}
    missing = scored_ids - set(human_scores)
    if missing:
        raise ValueError(f"no human score for items: {sorted(missing)[:5]}")
    extra = set(human_scores) - scored_ids
    if extra:
        raise ValueError(f"human scores for unscored items: {sorted(extra)[:5]}")
    return RatedPairSeries(
        ids=[r.item_id for r in records],
        metric_scores=[getattr(r, key) for r in records],
        human_scores=[human_scores[r.item_id] for r in records],
    )
