#!/usr/bin/env python3
"""Fetch the Higgs Boson Machine Learning Challenge dataset and write the CSV
schema the loaders expect: the original columns (including a `Label` column
with values in {s, b}; -999.0 marks missing entries).

Uses the CERN Open Data copy of the challenge file. Needs outbound network
access.

Usage: python3 scripts/fetch_higgs.py [out_dir]   (default: ./data)
"""

import gzip
import io
import pathlib
import sys
import urllib.request

URL = "https://opendata.cern.ch/record/328/files/atlas-higgs-challenge-2014-v2.csv.gz"


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "higgs.csv"
    try:
        with urllib.request.urlopen(URL, timeout=120) as response:
            raw = response.read()
        text = gzip.decompress(raw).decode()
    except Exception as exc:  # noqa: BLE001
        print(f"download failed ({exc}).", file=sys.stderr)
        print(
            "Fallback: download the challenge CSV from Kaggle "
            "(higgs-boson) or https://opendata.cern.ch/record/328 and save it "
            f"as {out_path} (keep the Label column).",
            file=sys.stderr,
        )
        return 1
    out_path.write_text(text)
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
