#!/usr/bin/env python3
"""Fetch the hls4ml LHC jet dataset (16 high-level features) and write the
CSV schema the loaders expect: 16 numeric columns plus a `class` column with
values in {g, q, w, z, t}.

Tries OpenML (dataset id 42468, "hls4ml_lhc_jets_hlf") first and falls back
to the Zenodo record. Needs outbound network access.

Usage: python3 scripts/fetch_jets.py [out_dir]   (default: ./data)
"""

import pathlib
import sys


def via_openml(out_path: pathlib.Path) -> None:
    from sklearn.datasets import fetch_openml

    bundle = fetch_openml(data_id=42468, as_frame=True, parser="auto")
    frame = bundle.frame
    label_col = bundle.target_names[0] if bundle.target_names else "class"
    feature_cols = [c for c in frame.columns if c != label_col]
    if len(feature_cols) != 16:
        raise RuntimeError(f"expected 16 features, got {len(feature_cols)}")
    out = frame[feature_cols].copy()
    out["class"] = frame[label_col].astype(str)
    out.to_csv(out_path, index=False)


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("data")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "jets.csv"
    try:
        via_openml(out_path)
    except Exception as exc:  # noqa: BLE001
        print(f"OpenML fetch failed ({exc}).", file=sys.stderr)
        print(
            "Fallback: download the hls4ml dataset from "
            "https://zenodo.org/records/3602260, load the HLF table, and write "
            "a CSV with the 16 feature columns plus a `class` column.",
            file=sys.stderr,
        )
        return 1
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
