import csv
import io
import json

import pytest

from bufinsert import bench
from bufinsert.bench import CSV_COLUMNS, BenchConfig, BenchMismatch, rows_to_csv, run_bench, speedup_by_b


def small_cfg(**kw):
    base = dict(m=[4], n=[30], b=[1, 2, 4], repetitions=2, seed=3)
    base.update(kw)
    return BenchConfig(**base)


def test_rows_and_header():
    rows = run_bench(small_cfg())
    text = rows_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == CSV_COLUMNS
    assert len(parsed) == 1 + 3 * 2
    assert [(r["b"], r["kernel"]) for r in rows] == [(1, "fast"), (1, "baseline"), (2, "fast"),
                                                      (2, "baseline"), (4, "fast"), (4, "baseline")]


def test_normalized_against_smallest_b():
    rows = run_bench(small_cfg())
    for r in rows:
        if r["b"] == 1:
            assert r["normalized"] == 1.0
        assert r["median_seconds"] > 0


def test_n_sweep_inferred():
    cfg = small_cfg(n=[10, 40], b=[2])
    assert cfg.sweep == "n"
    rows = run_bench(cfg)
    assert all(r["normalized"] == 1.0 for r in rows if r["n"] == 10)


def test_non_time_columns_deterministic():
    strip = lambda rows: [(r["m"], r["n"], r["b"], r["kernel"], r["candidates_peak"]) for r in rows]
    assert strip(run_bench(small_cfg())) == strip(run_bench(small_cfg()))


def test_degenerate_point():
    rows = run_bench(small_cfg(m=[1], n=[0], b=[1]))
    assert [r["candidates_peak"] for r in rows] == [1, 1]


def test_speedup_by_b():
    rows = [
        {"m": 1, "n": 1, "b": 8, "kernel": "fast", "median_seconds": 2.0},
        {"m": 1, "n": 1, "b": 8, "kernel": "baseline", "median_seconds": 3.0},
        {"m": 1, "n": 1, "b": 64, "kernel": "fast", "median_seconds": 4.0},
        {"m": 1, "n": 1, "b": 64, "kernel": "baseline", "median_seconds": 24.0},
    ]
    assert speedup_by_b(rows) == {8: 1.5, 64: 6.0}


@pytest.mark.parametrize("bad", [
    dict(m=[]), dict(b=[0]), dict(n=[-1]), dict(repetitions=0),
    dict(kernels=["slow"]), dict(mode="lazy"), dict(sweep="m"),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        small_cfg(**bad)


def test_config_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"m": [2], "n": [5], "b": [1, 2], "repetitions": 1}))
    cfg = BenchConfig.from_json(path)
    assert cfg.b == [1, 2] and cfg.kernels == ["fast", "baseline"]
    path.write_text(json.dumps({"m": [2], "reps": 1}))
    with pytest.raises(ValueError, match="reps"):
        BenchConfig.from_json(path)


def test_mismatch_writes_reproducer(tmp_path, monkeypatch):
    real = bench.solve

    def skewed(tree, lib, kernel, mode):
        res = real(tree, lib, kernel, mode)
        if kernel == "baseline":
            res.slack += 1e-12
        return res

    monkeypatch.setattr(bench, "solve", skewed)
    out = tmp_path / "run.csv"
    with pytest.raises(BenchMismatch) as info:
        run_bench(small_cfg(b=[2], output=str(out)))
    doc = json.loads(info.value.reproducer.read_text())
    assert info.value.reproducer == tmp_path / "run.mismatch.json"
    assert doc["seed"] == 3 and doc["b"] == 2 and set(doc["slacks"]) == {"fast", "baseline"}
