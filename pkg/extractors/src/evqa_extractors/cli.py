"""Command-line front end for container extraction."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .detectors import build_detector
from .encoders import build_encoders
from .extract import ExtractionJob, run_extraction
from .keywords import build_keyword_fn
from .videos import VideoReadError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evqa-extract",
        description="Extract frame, patch, keyword, and full-text embeddings from "
        "videos + texts into a scoring container.",
    )
    parser.add_argument("--texts", required=True,
                        help="JSONL of {id, video, question?, answer|caption}")
    parser.add_argument("--videos-root", default=".",
                        help="base directory for relative video paths")
    parser.add_argument("--out", required=True, help="container directory to write")
    parser.add_argument("--interval", type=int, default=30,
                        help="frame sampling interval for extraction (default 30)")
    parser.add_argument("--encoder", choices=["grid", "clip"], default="grid")
    parser.add_argument("--clip-checkpoint", default=None,
                        help="local transformers checkpoint for --encoder clip")
    parser.add_argument("--detector", choices=["threshold", "yolo"], default="threshold")
    parser.add_argument("--yolo-checkpoint", default=None,
                        help="local ultralytics checkpoint for --detector yolo")
    parser.add_argument("--keyword-source", choices=["fallback", "llm"], default="fallback")
    parser.add_argument("--model-tag", default="default",
                        help="model name sent to the LLM keyword service")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        image_encoder, text_encoder = build_encoders(args.encoder, args.clip_checkpoint)
        detector = build_detector(args.detector, args.yolo_checkpoint)
        keyword_fn = build_keyword_fn(args.keyword_source, args.model_tag)
        job = ExtractionJob(
            texts_path=Path(args.texts),
            out_path=Path(args.out),
            videos_root=Path(args.videos_root),
            interval=args.interval,
        )
        summary = run_extraction(job, image_encoder, text_encoder, detector, keyword_fn)
    except (ValueError, RuntimeError, VideoReadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.getLogger("evqa-extract").info(
        "wrote %d items (%d frame rows, %d patch rows) to %s; skipped %d",
        summary.items, summary.frame_rows, summary.patch_rows, args.out,
        len(summary.skipped),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
