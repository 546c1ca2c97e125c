#!/usr/bin/env python3
"""Regenerate the checked-in demo container under tests/fixtures/.

Deterministic: rebuilding produces byte-identical fixtures.
"""
import argparse
import shutil
from pathlib import Path

from evqa.synthetic import build_demo_container

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=ROOT / "tests" / "fixtures" / "demo_qa", type=Path)
    args = parser.parse_args()
    if args.out.exists():
        shutil.rmtree(args.out)
    manifest = build_demo_container(args.out)
    print(f"wrote {len(manifest.items)} items to {args.out}")


if __name__ == "__main__":
    main()
