#!/usr/bin/env python3
"""Noisy-data filtering on a constructed clean/noisy corpus.

Builds 500 clean + 500 noisy synthetic items, scores them, selects the
top 25% and 12.5%, and prints the per-source composition of each cut —
the shape of a data-filtering audit table.
"""
import argparse
import tempfile
from pathlib import Path

import numpy as np

from evqa.container import read_container
from evqa.filtering import select_top
from evqa.sampling import SamplerConfig
from evqa.scoring import score_container
from evqa.synthetic import build_separation_container


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default=None)
    parser.add_argument("--per-class", type=int, default=500)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--key", default="combined", choices=["combined", "coarse", "fine"])
    args = parser.parse_args()

    workdir = Path(args.workdir) if args.workdir else Path(tempfile.mkdtemp(prefix="evqa-sep-"))
    path = workdir / "separation"
    build_separation_container(
        path, np.random.default_rng(args.seed), n_clean=args.per_class, n_noisy=args.per_class
    )
    reader = read_container(path)
    records = score_container(reader, SamplerConfig(1))
    tags = {it.id: it.source_tag for it in reader.manifest.items}

    print(f"{'cut':>6}  {'selected':>8}  composition")
    for fraction in (0.25, 0.125):
        report = select_top(records, fraction, args.key, tags)
        noisy = sum(n for tag, n in report.composition.items() if tag.endswith("-noisy"))
        comp = ", ".join(f"{tag}={n}" for tag, n in sorted(report.composition.items()))
        print(f"{fraction:>6}  {report.total_selected:>8}  {comp}  (noisy fraction "
              f"{noisy / report.total_selected:.4f})")


if __name__ == "__main__":
    main()
