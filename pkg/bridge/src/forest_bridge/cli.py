"""Command line exporter: pickle in, interchange JSON out."""

from __future__ import annotations

import argparse
import pickle
import sys
from pathlib import Path

from .export import ExportError, export_forest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="export-forest",
        description="Export a pickled scikit-learn forest to the ensemble "
                    "interchange format.")
    parser.add_argument("--model", required=True,
                        help="pickle file holding the fitted forest")
    parser.add_argument("--out", required=True,
                        help="output path for the JSON document")
    parser.add_argument("--feature-names",
                        help="text file with one feature name per line")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.model, "rb") as fh:
            model = pickle.load(fh)
    except (OSError, pickle.UnpicklingError) as exc:
        print(f"error: cannot load model: {exc}", file=sys.stderr)
        return 1
    names = None
    if args.feature_names:
        try:
            names = [line.strip()
                     for line in Path(args.feature_names).read_text().splitlines()
                     if line.strip()]
        except OSError as exc:
            print(f"error: cannot read feature names: {exc}", file=sys.stderr)
            return 1
    try:
        doc = export_forest(model, args.out, names)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    n_rules = sum(len(t["rules"]) for t in doc["trees"])
    print(f"wrote {args.out}: {len(doc['trees'])} trees, {n_rules} rules")
    return 0


if __name__ == "__main__":
    sys.exit(main())
