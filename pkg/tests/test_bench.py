"""Generators, baselines, dataset files, and benchmark driver tests."""

import json
import math

import numpy as np
import pytest

from plindex import ConfigError, MalformedInputError, shrinking_cone
from plindex.bench import (
    BenchReport,
    BinarySearchBaseline,
    Dataset,
    FixedPagingBaseline,
    FullIndexBaseline,
    SortedArrayOracle,
    adversarial_input,
    compare_segmenters,
    fill_factor_sweep,
    gen_linear,
    gen_lognormal,
    gen_periodic,
    gen_step,
    load_dataset,
    run_insert_bench,
    run_lookup_bench,
    save_dataset,
    verify_against_oracle,
)


class TestGenerators:
    def test_deterministic_under_seed(self):
        for gen, kwargs in (
            (gen_linear, dict(n=500, seed=9)),
            (gen_step, dict(n=500, step_size=50, key_gap=10_000, seed=9)),
            (gen_periodic, dict(n=500, period=64, amplitude=100, seed=9)),
            (gen_lognormal, dict(n=500, sigma=1.2, seed=9)),
        ):
            a, b = gen(**kwargs), gen(**kwargs)
            assert np.array_equal(a.keys, b.keys)
            assert a.keys.tobytes() == b.keys.tobytes()

    def test_all_sorted(self):
        for ds in (
            gen_linear(400, 1),
            gen_step(400, 40, 999, 1),
            gen_periodic(400, 32, 50, 1),
            gen_lognormal(400, 2.0, 1),
        ):
            assert np.all(np.diff(ds.keys) >= 0)
            assert np.all(np.diff(ds.payloads) == 1)

    def test_linear_always_one_segment(self):
        pts = gen_linear(2000, seed=3).points()
        for e in (0, 1, 10, 1000):
            assert len(shrinking_cone(pts, e)) == 1

    def test_step_segment_counts_around_threshold(self):
        ds = gen_step(1000, 100, 10**6, seed=7)
        assert len(shrinking_cone(ds.points(), 50)) == 10
        assert len(shrinking_cone(ds.points(), 200)) == 1

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            gen_step(100, 0, 10, 1)
        with pytest.raises(ConfigError):
            gen_step(100, 50, 50, 1)  # gap must exceed step
        with pytest.raises(ConfigError):
            gen_periodic(100, 1, 5, 1)
        with pytest.raises(ConfigError):
            gen_lognormal(0, 1.0, 1)


class TestAdversarialInput:
    def test_block_structure(self):
        E, N = 100, 1
        ds = adversarial_input(E, N)
        assert ds.n == E + 6 + N * (E + 2)
        keys = ds.keys
        assert keys[1] - keys[0] == E / 2
        assert keys[2] - keys[1] == E / 2
        assert keys[3] - keys[2] == pytest.approx(1 / E)
        assert np.all(np.diff(keys) >= 0)

    @pytest.mark.parametrize("N", [1, 10, 50])
    def test_greedy_needs_n_plus_two_segments(self, N):
        ds = adversarial_input(100, N)
        assert len(shrinking_cone(ds.points(), 100)) == N + 2

    def test_prelude_rejection_arithmetic(self):
        # extending the first segment to the lone key just past the repeats
        # would leave the repeated key 100.98.. locations off the line
        E = 100
        ds = adversarial_input(E, 1)
        keys = ds.keys
        x1, x4, x5 = keys[0], keys[3], keys[3 + E + 1]
        y1, y4, y5 = 0.0, 3.0, float(3 + E + 1)
        slope = (y5 - y1) / (x5 - x1)
        violation = y1 + slope * (x4 - x1) - y4
        assert violation > E
        assert math.floor(violation * 100) / 100 == 100.98

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            adversarial_input(1, 5)
        with pytest.raises(ConfigError):
            adversarial_input(100, 0)


class TestDatasetFiles:
    def test_binary_round_trips(self, tmp_path):
        ds = gen_step(300, 30, 1000, seed=2)
        for fmt in ("binary-le-u64", "binary-le-f64"):
            p = tmp_path / f"k.{fmt}"
            save_dataset(ds, p, fmt)
            back = load_dataset(p, fmt)
            assert np.array_equal(back.keys, ds.keys.astype(float))
        fds = gen_lognormal(300, 1.0, seed=2)
        p = tmp_path / "k.f64"
        save_dataset(fds, p, "binary-le-f64")
        assert np.array_equal(load_dataset(p, "binary-le-f64").keys, fds.keys)

    def test_csv_round_trip_and_format_equality(self, tmp_path):
        ds = gen_periodic(200, 32, 40, seed=3)
        pcsv, pbin = tmp_path / "k.csv", tmp_path / "k.bin"
        save_dataset(ds, pcsv, "csv")
        save_dataset(ds, pbin, "binary-le-f64")
        a = load_dataset(pcsv, "csv")
        b = load_dataset(pbin, "binary-le-f64")
        assert np.array_equal(a.keys, b.keys)
        assert np.array_equal(a.payloads, ds.payloads)

    def test_malformed_csv_row_reports_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1.0,0\n2.0,1\nnot-a-key,2\n")
        with pytest.raises(MalformedInputError, match="line 3"):
            load_dataset(p, "csv")

    def test_unsorted_strictness(self, tmp_path):
        p = tmp_path / "u.csv"
        p.write_text("5.0\n1.0\n3.0\n")
        with pytest.raises(MalformedInputError, match="not sorted"):
            load_dataset(p, "csv")
        ds = load_dataset(p, "csv", sort=True)
        assert ds.keys.tolist() == [1.0, 3.0, 5.0]


class TestBaselines:
    @pytest.fixture()
    def dataset(self):
        return gen_lognormal(4000, 2.0, seed=14)

    def test_all_agree_with_oracle(self, dataset):
        oracle = SortedArrayOracle(dataset)
        rng = np.random.default_rng(2)
        picks = dataset.keys[rng.integers(0, dataset.n, 2000)]
        probes = np.concatenate([picks, picks + 0.1]).tolist()
        for s in (
            FullIndexBaseline(dataset),
            FixedPagingBaseline(dataset, 64),
            BinarySearchBaseline(dataset),
        ):
            verify_against_oracle(s, oracle, probes)

    def test_fixed_paging_inserts_and_splits(self, dataset):
        paging = FixedPagingBaseline(dataset, 64)
        oracle = SortedArrayOracle(dataset)
        rng = np.random.default_rng(3)
        n_pages = len(paging.pages)
        for i in range(2000):
            k = float(rng.uniform(dataset.keys[0], dataset.keys[-1]))
            paging.insert(k, 10**7 + i)
            oracle.insert(k, 10**7 + i)
        assert len(paging.pages) > n_pages
        picks = [float(k) for k in dataset.keys[rng.integers(0, dataset.n, 500)]]
        for k in picks:
            assert paging.lookup(k) == oracle.lookup(k)
        lo = float(dataset.keys[0])
        assert paging.range(lo, lo + 1e6) == oracle.range(lo, lo + 1e6)

    def test_paging_page_size_n_degenerates_to_binary_search(self, dataset):
        paging = FixedPagingBaseline(dataset, dataset.n)
        flat = BinarySearchBaseline(dataset)
        assert len(paging.pages) == 1
        rng = np.random.default_rng(4)
        for k in dataset.keys[rng.integers(0, dataset.n, 500)]:
            assert paging.lookup(float(k)) == flat.lookup(float(k))

    def test_size_accounting(self, dataset):
        assert BinarySearchBaseline(dataset).index_bytes() == 0
        assert FullIndexBaseline(dataset).index_bytes() == 16 * dataset.n
        paging = FixedPagingBaseline(dataset, 100)
        assert paging.index_bytes() == len(paging.pages) * 40


class TestReports:
    def test_report_files(self, tmp_path):
        report = BenchReport(
            rows=[{"a": 1, "b": 2.5}, {"a": 3, "c": "x"}], meta={"suite": "t", "seed": 0}
        )
        report.to_json(tmp_path / "r.json")
        report.to_csv(tmp_path / "r.csv")
        data = json.loads((tmp_path / "r.json").read_text())
        assert data["meta"]["suite"] == "t"
        assert data["rows"][0]["a"] == 1
        lines = (tmp_path / "r.csv").read_text().strip().splitlines()
        assert lines[0] == "a,b,c"
        assert lines[1].startswith("1,2.5")

    def test_lookup_bench_rows_and_determinism(self):
        ds = gen_step(4000, 200, 10**6, seed=5)
        kwargs = dict(n_queries=200, rounds=1, warmup=0, seed=3)
        r1 = run_lookup_bench(ds, [16, 64], **kwargs)
        r2 = run_lookup_bench(ds, [16, 64], **kwargs)
        structures = {row["structure"] for row in r1.rows}
        assert structures == {"segment_index", "fixed_paging", "full_index", "binary_search"}
        fixed_cols = ("structure", "error_or_page_size", "segment_count", "index_bytes", "pair")
        a = [[row.get(c) for c in fixed_cols] for row in r1.rows]
        b = [[row.get(c) for c in fixed_cols] for row in r2.rows]
        assert a == b

    def test_lookup_bench_matches_index_bytes(self):
        ds = gen_step(4000, 200, 10**6, seed=5)
        report = run_lookup_bench(ds, [32], n_queries=50, rounds=1, warmup=0)
        by_structure = {r["structure"]: r for r in report.rows if r.get("pair") == "e32"}
        assert (
            by_structure["segment_index"]["index_bytes"]
            == by_structure["fixed_paging"]["index_bytes"]
        )

    def test_insert_bench_runs(self):
        ds = gen_step(3000, 100, 10**6, seed=6)
        report = run_insert_bench(ds, [64], insert_fraction=0.1, rounds=1, warmup=0)
        seg_rows = [r for r in report.rows if r["structure"] == "segment_index"]
        assert seg_rows and seg_rows[0]["insert_ops_s"] > 0

    def test_compare_segmenters_ratio_at_least_one(self):
        for ds in (
            gen_step(2000, 100, 10**6, seed=8),
            gen_periodic(2000, 128, 500, seed=8),
            gen_lognormal(2000, 2.0, seed=8),
        ):
            report = compare_segmenters(ds, [5, 20, 100])
            for row in report.rows:
                assert row["ratio"] >= 1.0
                assert row["optimal_count"] <= row["greedy_count"]

    def test_fill_factor_sweep_rows(self):
        ds = gen_step(2000, 100, 10**6, seed=9)
        report = fill_factor_sweep(ds, 64, [1, 8, 32], insert_fraction=0.1, rounds=1, warmup=0)
        assert [r["buffer_size"] for r in report.rows] == [1, 8, 32]
        assert all(r["insert_ops_s"] > 0 for r in report.rows)
        splits = [r["n_splits"] for r in report.rows]
        assert splits[0] > splits[-1]

    def test_step_bytes_collapse_but_paging_does_not(self):
        # the staircase collapses to one segment above the step size while a
        # fixed page size equal to the error keeps many pages
        ds = gen_step(5000, 100, 10**6, seed=10)
        cfg_bytes = {}
        from plindex import IndexConfig, SegmentIndex

        for e in (50, 200):
            tree = SegmentIndex.from_arrays(
                ds.keys, ds.payloads, IndexConfig(error=e, buffer_size=0)
            )
            cfg_bytes[e] = tree.stats().measured_bytes
        assert cfg_bytes[200] < cfg_bytes[50]
        paging_bytes = FixedPagingBaseline(ds, 200).index_bytes()
        assert cfg_bytes[200] < paging_bytes
