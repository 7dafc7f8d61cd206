#!/usr/bin/env python3
"""Fetch the vitamin D / multiple sclerosis summary statistics and convert
them to the mr-hetero TSV layout (snp, beta_x_1, se_x_1, beta_y, se_y).

Usage:
    scripts/fetch_vitd.py                      # download from GitHub
    scripts/fetch_vitd.py --input local.csv    # convert a file you already have
    scripts/fetch_vitd.py --out data/vitd_ms.tsv

The source is the public repository accompanying the GC-Q method
(github.com/mmax-code/MR_outliers). The archive is searched for a
delimited text file whose name mentions vitamin D; columns are matched by
the usual TwoSampleMR / MendelianRandomization names. Pass --columns to
override the mapping when the heuristics fail.
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

REPO = "https://github.com/mmax-code/MR_outliers/archive/refs/heads/{branch}.zip"
BRANCHES = ("main", "master")

ALIASES = {
    "snp": ["snp", "rsid", "rs_id", "variant", "snps"],
    "beta_x": ["beta.exposure", "beta_exposure", "bx", "betax", "beta_x", "beta_x_1"],
    "se_x": ["se.exposure", "se_exposure", "bxse", "sebetax", "se_x", "se_x_1"],
    "beta_y": ["beta.outcome", "beta_outcome", "by", "betay", "beta_y"],
    "se_y": ["se.outcome", "se_outcome", "byse", "sebetay", "se_y"],
}


def download() -> zipfile.ZipFile:
    last = None
    for branch in BRANCHES:
        try:
            with urllib.request.urlopen(REPO.format(branch=branch), timeout=60) as r:
                return zipfile.ZipFile(io.BytesIO(r.read()))
        except Exception as e:  # noqa: BLE001
            last = e
    sys.exit(f"download failed: {last}")


def candidates(zf: zipfile.ZipFile):
    for name in zf.namelist():
        low = name.lower()
        if low.endswith((".csv", ".tsv", ".txt")) and ("vit" in low or "vd" in low):
            yield name


def read_table(text: str):
    dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",\t; ")
    return list(csv.DictReader(io.StringIO(text), dialect=dialect))


def map_columns(header, overrides):
    lower = {h.strip().strip('"').lower(): h for h in header}
    out = {}
    for key, names in ALIASES.items():
        if key in overrides:
            out[key] = overrides[key]
            continue
        hit = next((lower[n] for n in names if n in lower), None)
        if hit is None:
            return None
        out[key] = hit
    return out


def convert(rows, cols, out: Path):
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as f:
        f.write("snp\tbeta_x_1\tse_x_1\tbeta_y\tse_y\n")
        for row in rows:
            f.write("\t".join(row[cols[k]].strip() for k in ("snp", "beta_x", "se_x", "beta_y", "se_y")) + "\n")
    print(f"wrote {len(rows)} SNPs to {out}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--input", type=Path, help="convert this local file instead of downloading")
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "vitd_ms.tsv")
    ap.add_argument("--columns", default="", help="overrides like snp=SNP,beta_x=bx,se_x=bxse,beta_y=by,se_y=byse")
    args = ap.parse_args()
    overrides = dict(kv.split("=", 1) for kv in args.columns.split(",") if kv)

    if args.input:
        sources = [(str(args.input), args.input.read_text())]
    else:
        zf = download()
        sources = [(n, zf.read(n).decode("utf-8", "replace")) for n in candidates(zf)]
    for name, text in sources:
        rows = read_table(text)
        cols = map_columns(rows[0].keys() if rows else [], overrides)
        if cols:
            print(f"using {name}")
            convert(rows, cols, args.out)
            return
    sys.exit("no file with recognisable exposure/outcome columns; try --input and --columns")


if __name__ == "__main__":
    main()
