#!/usr/bin/env python3
"""Convert the public Cora citation dump into this package's file layout.

Downloads https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz (or uses a
local copy via --archive), then writes edges.txt, features.csv, and
labels.txt under --out. Features stay binary word indicators; directed
citations collapse to undirected deduplicated edges; the seven subject
strings map to labels 0..6 in sorted order.

Usage:
    python3 scripts/fetch_cora.py --out data/cora
    python3 scripts/fetch_cora.py --archive /path/to/cora.tgz --out data/cora
"""

import argparse
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

URL = "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/cora", help="output directory")
    parser.add_argument("--archive", help="existing cora.tgz instead of downloading")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.archive:
        archive = Path(args.archive)
    else:
        tmp = Path(tempfile.mkdtemp())
        archive = tmp / "cora.tgz"
        print(f"downloading {URL}")
        urllib.request.urlretrieve(URL, archive)

    content_lines = []
    cite_lines = []
    with tarfile.open(archive) as tar:
        for member in tar.getmembers():
            if member.name.endswith("cora.content"):
                content_lines = tar.extractfile(member).read().decode().splitlines()
            elif member.name.endswith("cora.cites"):
                cite_lines = tar.extractfile(member).read().decode().splitlines()
    if not content_lines or not cite_lines:
        print("archive does not contain cora.content and cora.cites", file=sys.stderr)
        return 1

    ids = []
    rows = []
    subjects = []
    for line in content_lines:
        parts = line.split()
        ids.append(parts[0])
        rows.append(parts[1:-1])
        subjects.append(parts[-1])
    index = {paper: i for i, paper in enumerate(ids)}
    classes = {name: c for c, name in enumerate(sorted(set(subjects)))}

    edges = set()
    for line in cite_lines:
        a, b = line.split()
        u, v = index[a], index[b]
        if u != v:
            edges.add((min(u, v), max(u, v)))

    with open(out / "edges.txt", "w", encoding="utf-8") as fh:
        for u, v in sorted(edges):
            fh.write(f"{u} {v}\n")
    with open(out / "features.csv", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(",".join(row) + "\n")
    with open(out / "labels.txt", "w", encoding="utf-8") as fh:
        for name in subjects:
            fh.write(f"{classes[name]}\n")

    print(f"wrote {len(ids)} nodes, {len(edges)} edges, "
          f"{len(classes)} classes to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
