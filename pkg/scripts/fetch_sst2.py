#!/usr/bin/env python3
"""Download the SST2 binary sentence splits into data/sst2/ as TSV files.

The pipeline expects the classic sentence-level binary splits with
6920 / 1821 / 872 examples (train / test / validation) and columns
"sentence" and "label" (1 = positive).  Two sources are attempted:

1. the `datasets` library (dataset "SetFit/sst2"), if installed;
2. a plain-HTTP mirror of the widely used tab-separated distribution.

Needs network access; afterwards `pytest tests/test_acceptance.py` runs the
SST2-gated criteria.  Verify the printed row counts and a few sentences if
you plan to compare numbers against published results.
"""

import argparse
import csv
import sys
import urllib.request
from pathlib import Path

EXPECTED_ROWS = {"train": 6920, "test": 1821, "validation": 872}

# mirror of the classic "sentence \t label" files (dev == validation)
MIRROR_FILES = {
    "train": "train.tsv",
    "test": "test.tsv",
    "validation": "dev.tsv",
}
MIRROR_BASE = (
    "https://raw.githubusercontent.com/YJiangcm/SST-2-sentiment-analysis"
    "/master/data/"
)


def _write_tsv(path: Path, rows):
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", quoting=csv.QUOTE_NONE,
                            lineterminator="\n", escapechar=None)
        writer.writerow(["sentence", "label"])
        for sentence, label in rows:
            writer.writerow([sentence, label])


def _check(name: str, rows) -> None:
    expected = EXPECTED_ROWS[name]
    if len(rows) != expected:
        print(
            f"WARNING: {name} has {len(rows)} rows, expected {expected}; "
            "this is not the classic split", file=sys.stderr,
        )
    labels = {label for _, label in rows}
    if labels - {"0", "1"}:
        raise SystemExit(f"{name}: unexpected labels {sorted(labels)}")


def _from_datasets_lib(out_dir: Path) -> bool:
    try:
        from datasets import load_dataset
    except ImportError:
        return False
    print("fetching SetFit/sst2 via the datasets library ...")
    mapping = {"train": "train", "test": "test", "validation": "validation"}
    for name, split in mapping.items():
        ds = load_dataset("SetFit/sst2", split=split)
        rows = []
        for record in ds:
            text = record.get("text") or record.get("sentence")
            label = record["label"]
            if "label_text" in record:
                label = 1 if record["label_text"] == "positive" else 0
            rows.append((text.replace("\t", " ").strip(), str(int(label))))
        _check(name, rows)
        _write_tsv(out_dir / f"{name}.tsv", rows)
        print(f"  wrote {name}.tsv ({len(rows)} rows)")
    return True


def _from_mirror(out_dir: Path) -> bool:
    print(f"fetching TSV mirror from {MIRROR_BASE} ...")
    for name, filename in MIRROR_FILES.items():
        with urllib.request.urlopen(MIRROR_BASE + filename, timeout=60) as resp:
            body = resp.read().decode("utf-8")
        rows = []
        lines = body.splitlines()
        start = 1 if lines and lines[0].lower().startswith(("sentence", "text")) else 0
        for line in lines[start:]:
            if not line.strip():
                continue
            sentence, _, label = line.rpartition("\t")
            rows.append((sentence.strip(), label.strip()))
        _check(name, rows)
        _write_tsv(out_dir / f"{name}.tsv", rows)
        print(f"  wrote {name}.tsv ({len(rows)} rows)")
    return True


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out", default=Path(__file__).resolve().parent.parent / "data" / "sst2",
        type=Path, help="output directory (default data/sst2)",
    )
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    if _from_datasets_lib(args.out):
        return
    try:
        _from_mirror(args.out)
    except Exception as exc:
        raise SystemExit(
            f"download failed ({exc}); install the 'datasets' package or place "
            f"train.tsv/test.tsv/validation.tsv under {args.out} manually"
        )


if __name__ == "__main__":
    main()
