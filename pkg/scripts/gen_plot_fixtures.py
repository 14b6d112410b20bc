#!/usr/bin/env python3
"""Regenerate the CSV + per-method-means fixtures shared with frontend tests.

Usage: python scripts/gen_plot_fixtures.py
"""
import json
import pathlib

from polygossip.bench import mean_curve, read_csv, reproduce

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    csv_path = FIXTURE_DIR / "grid2d.csv"
    reproduce("grid2d", seed=42, out=str(csv_path))
    records = read_csv(str(csv_path))
    methods = sorted({r.method for r in records})
    means = {}
    for method in methods:
        ts, mean = mean_curve(records, method)
        means[method] = {"t": [int(t) for t in ts], "mean": [f"{v:.17g}" for v in mean]}
    with open(FIXTURE_DIR / "grid2d_means.json", "w") as f:
        json.dump(means, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"wrote {csv_path} and grid2d_means.json ({len(records)} records)")


if __name__ == "__main__":
    main()
