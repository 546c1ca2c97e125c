#!/usr/bin/env python3
"""Regenerate the tiny fixture videos under extractors/fixtures/.

Each clip is a dark scene with bright moving rectangles, sized so the
threshold detector finds exactly the drawn shapes on every frame:
high foreground/background contrast keeps MJPG compression noise far
below the detection threshold, and shapes stay well separated.
"""
import argparse
import json
from pathlib import Path

import cv2
import numpy as np

ROOT = Path(__file__).resolve().parent.parent
WIDTH, HEIGHT = 96, 64

# Shapes oscillate inside disjoint cells so they never touch or merge;
# travel is a triangle wave over the cell's slack.
CLIPS = [
    # (name, frames, [(w, h, cell=(cx0, cy0, cx1, cy1), speed, bgr)])
    ("clip-000", 75, [(18, 12, (2, 2, 46, 30), 0.6, (60, 200, 255)),
                      (14, 14, (50, 34, 94, 62), 0.4, (255, 160, 80))]),
    ("clip-001", 100, [(22, 16, (8, 8, 88, 56), 0.3, (90, 255, 120))]),
    ("clip-002", 61, [(12, 10, (2, 2, 46, 30), 0.5, (255, 90, 90)),
                      (12, 10, (50, 2, 94, 30), 0.45, (90, 200, 255)),
                      (16, 12, (2, 34, 94, 62), 0.5, (240, 240, 120))]),
]


def _triangle(t: float, span: int) -> int:
    if span <= 0:
        return 0
    period = 2 * span
    phase = t % period
    return int(round(phase if phase <= span else period - phase))


def draw_frame(t, shapes):
    frame = np.full((HEIGHT, WIDTH, 3), 16, np.uint8)
    for w, h, (cx0, cy0, cx1, cy1), speed, color in shapes:
        x = cx0 + _triangle(speed * t, cx1 - cx0 - w)
        y = cy0 + _triangle(0.7 * speed * t, cy1 - cy0 - h)
        frame[y : y + h, x : x + w] = color
    return frame


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=ROOT / "fixtures" / "videos", type=Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, frames, shapes in CLIPS:
        path = args.out / f"{name}.avi"
        writer = cv2.VideoWriter(
            str(path), cv2.VideoWriter_fourcc(*"MJPG"), 15, (WIDTH, HEIGHT)
        )
        if not writer.isOpened():
            raise SystemExit(f"cannot open VideoWriter for {path}")
        for t in range(frames):
            writer.write(draw_frame(t, shapes))
        writer.release()
        print(f"wrote {path} ({frames} frames, {len(shapes)} shapes)")

    texts = [
        {"id": "fix-qa-0", "video": "clip-000.avi", "source_tag": "fixture",
         "question": "what moves across the scene?",
         "answer": "two bright rectangles drift across a dark field"},
        {"id": "fix-qa-1", "video": "clip-001.avi", "source_tag": "fixture",
         "question": "how many objects are visible?",
         "answer": "a single green block slides diagonally"},
        {"id": "fix-cap-2", "video": "clip-002.avi", "source_tag": "fixture",
         "caption": "three small colored tiles wander around a dark stage"},
    ]
    texts_path = ROOT / "fixtures" / "texts.jsonl"
    with open(texts_path, "w", encoding="utf-8") as fh:
        for rec in texts:
            fh.write(json.dumps(rec) + "\n")
    print(f"wrote {texts_path}")


if __name__ == "__main__":
    main()
