"""Reference-free quality scoring for video-caption and video-QA data."""

from .container import (
    ContainerReader,
    Manifest,
    ManifestItem,
    PatchMeta,
    TextUnit,
    VideoItem,
    read_container,
    validate_container,
    write_container,
)
from .correlation import RatedPairSeries, evaluate, kendall_tau_b, spearman_rho
from .filtering import FilterReport, make_noisy_container, select_top, synthesize_noisy
from .keywords import (
    DEFAULT_PROMPT,
    DEFAULT_STOPWORDS,
    FallbackKeywordSource,
    KeywordCache,
    KeywordRequest,
    LLMKeywordSource,
    extract_fallback,
)
from .sampling import SamplerConfig, sample_indices, select_sampled
from .scoring import (
    ScoreRecord,
    coarse_score,
    combined_score,
    fine_score,
    score_container,
    score_item,
)

__version__ = "0.1.0"

__all__ = [
    "ContainerReader",
    "DEFAULT_PROMPT",
    "DEFAULT_STOPWORDS",
    "FallbackKeywordSource",
    "FilterReport",
    "KeywordCache",
    "KeywordRequest",
    "LLMKeywordSource",
    "Manifest",
    "ManifestItem",
    "PatchMeta",
    "RatedPairSeries",
    "SamplerConfig",
    "ScoreRecord",
    "TextUnit",
    "VideoItem",
    "coarse_score",
    "combined_score",
    "evaluate",
    "extract_fallback",
    "fine_score",
    "kendall_tau_b",
    "make_noisy_container",
    "read_container",
    "sample_indices",
    "score_container",
    "score_item",
    "select_sampled",
    "select_top",
    "spearman_rho",
    "synthesize_noisy",
    "validate_container",
    "write_container",
]
