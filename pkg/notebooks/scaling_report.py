"""
Oracle scaling on random planar graphs
======================================

Builds both oracles on random planar graphs of 1k, 4k and 16k vertices and
writes ``docs/scaling.csv`` plus a short markdown table in
``docs/scaling.md``. Timings depend on the machine; every other column is
fixed by the seed.

Cluster sizes follow the ``sqrt`` rule (r about sqrt(n)). The small-r presets
keep one boundary-distance row per boundary vertex, which at 16k vertices
would need a few GB. The directed sweep stops at 4k: its ball lists grow
faster than n^1.5, and the 16k build would not fit in a few GB of memory
either. Run from the repository root:

    python notebooks/scaling_report.py
"""

import csv
import sys
from pathlib import Path

import numpy as np

from minorvc.cli import BENCH_COLUMNS, bench_rows

root = Path(__file__).resolve().parent.parent
sizes = [1000, 4000, 16000]
directed_sizes = [1000, 4000]
if "--quick" in sys.argv:
    sizes = directed_sizes = [1000]

rows = bench_rows(sizes, kind="undirected", rule="sqrt", seed=0, queries=2000)
rows += bench_rows(directed_sizes, kind="directed", rule="sqrt", seed=0, queries=2000)

(root / "docs").mkdir(exist_ok=True)
with open(root / "docs" / "scaling.csv", "w", newline="") as fh:
    w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
    w.writeheader()
    w.writerows(rows)

# growth exponents between consecutive sizes: log(ratio of y) / log(ratio of n)
lines = ["| kind | n | r | build (s) | query (us) | space (MB) | patterns | sum of boundaries |",
         "|---|---|---|---|---|---|---|---|"]
for x in rows:
    lines.append(f"| {x['kind']} | {x['n']} | {x['r']} | {x['build_ms'] / 1000:.2f} | "
                 f"{x['query_ns'] / 1000:.1f} | {x['space_bytes'] / 2**20:.1f} | "
                 f"{x['pattern_count']} | {x['boundary_sum']} |")

slopes = []
for kind in ("undirected", "directed"):
    sub = [x for x in rows if x["kind"] == kind]
    n = np.array([x["n"] for x in sub], dtype=float)
    for col in ("build_ms", "boundary_sum", "space_bytes"):
        y = np.array([x[col] for x in sub], dtype=float)
        if len(n) > 1 and (y > 0).all():
            k = np.polyfit(np.log(n), np.log(y), 1)[0]
            slopes.append(f"- {kind} {col}: grows like n^{k:.2f}")

text = "# Oracle scaling\n\nGenerated by `notebooks/scaling_report.py` (seed 0, r = round(sqrt(n))).\n\n"
text += "\n".join(lines) + "\n\nFitted log-log slopes:\n\n" + "\n".join(slopes) + "\n"
(root / "docs" / "scaling.md").write_text(text)
print(text)
