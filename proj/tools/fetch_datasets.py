#!/usr/bin/env python3
"""Fetch the public airline networks (and Cora) used by the experiments.

Downloads the struc2vec airport graphs and normalizes them into the loader's
format under data/:

    data/<name>.edgelist   one "u v" pair per line
    data/<name>.labels     one "node<TAB>label" pair per line (header stripped)

Run from the repository root:

    python3 tools/fetch_datasets.py [--data-dir data] [--datasets brazil euro usa cora]

The files are tiny (the largest is ~200 KB). Everything downstream (training,
evaluation, the acceptance suite) reads only the cached copies, so this script
needs to run once per checkout. Without these files the two airline acceptance
criteria report SKIP.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

STRUC2VEC = "https://raw.githubusercontent.com/leoribeiro/struc2vec/master/graph"
LINQS = "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz"

AIRPORTS = {
    "brazil": (
        f"{STRUC2VEC}/brazil-airports.edgelist",
        f"{STRUC2VEC}/labels-brazil-airports.txt",
    ),
    "euro": (
        f"{STRUC2VEC}/europe-airports.edgelist",
        f"{STRUC2VEC}/labels-europe-airports.txt",
    ),
    "usa": (
        f"{STRUC2VEC}/usa-airports.edgelist",
        f"{STRUC2VEC}/labels-usa-airports.txt",
    ),
}


def download(url: str) -> str:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        return response.read().decode("utf-8")


def normalize_labels(raw: str) -> str:
    """Strip the 'node label' header; emit node<TAB>label lines."""
    out = []
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not parts[0].isdigit():
            continue  # header row
        out.append(f"{parts[0]}\t{parts[1]}")
    return "\n".join(out) + "\n"


def fetch_airport(name: str, data_dir: Path) -> None:
    edge_url, label_url = AIRPORTS[name]
    edges = download(edge_url)
    labels = normalize_labels(download(label_url))
    (data_dir / f"{name}.edgelist").write_text(edges)
    (data_dir / f"{name}.labels").write_text(labels)
    print(f"  wrote {name}.edgelist / {name}.labels")


def fetch_cora(data_dir: Path) -> None:
    import io
    import tarfile

    print(f"  fetching {LINQS}")
    with urllib.request.urlopen(LINQS, timeout=120) as response:
        blob = response.read()
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        cites = tar.extractfile("cora/cora.cites").read().decode()
        content = tar.extractfile("cora/cora.content").read().decode()

    # paper ids are arbitrary strings; remap to dense ints in content order
    ids = {}
    labels = []
    label_names = {}
    for line in content.splitlines():
        parts = line.split()
        paper, label = parts[0], parts[-1]
        ids[paper] = len(ids)
        label_names.setdefault(label, len(label_names))
        labels.append((ids[paper], label_names[label]))
    edges = []
    for line in cites.splitlines():
        a, b = line.split()
        if a in ids and b in ids:
            edges.append((ids[a], ids[b]))
    with open(data_dir / "cora.edgelist", "w") as f:
        f.writelines(f"{u} {v}\n" for u, v in edges)
    with open(data_dir / "cora.labels", "w") as f:
        f.writelines(f"{n}\t{y}\n" for n, y in labels)
    print("  wrote cora.edgelist / cora.labels")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="data", type=Path)
    parser.add_argument(
        "--datasets",
        nargs="+",
        default=["brazil", "euro", "usa", "cora"],
        choices=[*AIRPORTS.keys(), "cora"],
    )
    args = parser.parse_args()
    args.data_dir.mkdir(parents=True, exist_ok=True)

    failed = []
    for name in args.datasets:
        print(f"[{name}]")
        try:
            if name == "cora":
                fetch_cora(args.data_dir)
            else:
                fetch_airport(name, args.data_dir)
        except Exception as exc:  # noqa: BLE001 - report and continue
            print(f"  failed: {exc}", file=sys.stderr)
            failed.append(name)
    if failed:
        print(f"could not fetch: {', '.join(failed)}", file=sys.stderr)
        return 1
    print("done")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
