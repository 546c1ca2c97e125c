"""Model-side toolkit that turns videos and texts into scoring containers."""

from .detectors import ThresholdDetector, UltralyticsDetector, crop
from .encoders import GridColorEncoder, HFClipEncoder, HashedBowTextEncoder
from .extract import ExtractionJob, ExtractionSummary, run_extraction
from .keywords import fallback_keywords, llm_keywords
from .videos import FrameSource, VideoReadError

__version__ = "0.1.0"

__all__ = [
    "ExtractionJob",
    "ExtractionSummary",
    "FrameSource",
    "GridColorEncoder",
    "HFClipEncoder",
    "HashedBowTextEncoder",
    "ThresholdDetector",
    "UltralyticsDetector",
    "VideoReadError",
    "crop",
    "fallback_keywords",
    "llm_keywords",
    "run_extraction",
]
