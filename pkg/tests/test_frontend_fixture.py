"""The plotting frontend's fixtures must stay in sync with this package."""
import json
import pathlib

import pytest

from polygossip.bench import mean_curve, read_csv

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"

pytestmark = pytest.mark.skipif(
    not (FIXTURES / "grid2d.csv").exists(), reason="frontend fixtures not present"
)


def test_means_json_matches_bench_side_means():
    records = read_csv(str(FIXTURES / "grid2d.csv"))
    with open(FIXTURES / "grid2d_means.json") as f:
        frozen = json.load(f)
    assert set(frozen) == {r.method for r in records}
    for method, entry in frozen.items():
        ts, means = mean_curve(records, method)
        assert [int(t) for t in ts] == entry["t"]
        for ours, theirs in zip(means, entry["mean"]):
            assert abs(ours - float(theirs)) <= 1e-12
