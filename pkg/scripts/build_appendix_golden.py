#!/usr/bin/env python3
"""Regenerate the committed golden OPE corpus files.

Writes wsub/golden/appendix_a{1,2,3}.json from the structured tables in
wsub.golden.appendix_source.  Output is deterministic (sorted keys, fixed
indentation), so a clean regeneration leaves the tree unchanged; any diff
means the table source and the committed corpus have drifted.

Usage:
    python scripts/build_appendix_golden.py [--check] [--out DIR]

With --check, compares against the committed files and exits 1 on drift
instead of writing.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from wsub.golden import APPENDIX_RANKS, corpus_text  # noqa: E402


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parents[1] / "src" / "wsub" / "golden",
        help="output directory (default: the package data directory)",
    )
    parser.add_argument(
        "--check",
        action="store_true",
        help="verify the committed files match the table source; write nothing",
    )
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    drift = []
    for n in APPENDIX_RANKS:
        path = args.out / f"appendix_a{n}.json"
        text = corpus_text(n)
        if args.check:
            if not path.exists() or path.read_text() != text:
                drift.append(path)
                print(f"DRIFT {path}")
            else:
                print(f"ok    {path}")
        else:
            path.write_text(text)
            print(f"wrote {path} ({len(text)} bytes)")
    return 1 if drift else 0


if __name__ == "__main__":
    raise SystemExit(main())
