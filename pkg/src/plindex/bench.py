"""Synthetic datasets, exact baselines, and benchmark drivers.

Every benchmark validates the structure under test against a flat
sorted-array oracle before timing anything: correctness gates performance.
Reports carry the generator seeds and parameters, so all non-timing columns
are reproducible bit for bit.
"""

from __future__ import annotations

import bisect
import json
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, MalformedInputError
from .index import Entry, IndexConfig, SegmentIndex
from .segmentation import optimal_segmentation, shrinking_cone

_INNER_ENTRY_BYTES = 16
_PAGE_DESCRIPTOR_BYTES = 24


@dataclass
class Dataset:
    """A sorted key column plus opaque payloads and its generation recipe."""

    name: str
    keys: np.ndarray
    payloads: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.keys.size)

    def points(self) -> np.ndarray:
        """(n, 2) array of (key, location) rows for the segmenters."""
        return np.column_stack(
            [self.keys.astype(np.float64), np.arange(self.n, dtype=np.float64)]
        )

    def entries(self) -> list[Entry]:
        return [Entry(k, p) for k, p in zip(self.keys.tolist(), self.payloads.tolist())]


# -- generators -------------------------------------------------------------


def _finish(name, keys, provenance) -> Dataset:
    keys = np.asarray(keys)
    if keys.size == 0:
        raise ConfigError("generator produced no keys")
    return Dataset(
        name=name,
        keys=keys,
        payloads=np.arange(keys.size, dtype=np.int64),
        provenance=provenance,
    )


def gen_linear(n: int, seed: int = 0) -> Dataset:
    """Perfectly linear keys: one segment at any error threshold."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    base = int(rng.integers(0, 10_000))
    gap = int(rng.integers(1, 8))
    keys = base + gap * np.arange(n, dtype=np.int64)
    return _finish("linear", keys, {"gen": "linear", "n": n, "seed": seed})


def gen_step(n: int, step_size: int, key_gap: int, seed: int = 0) -> Dataset:
    """Plateaus of ``step_size`` consecutive locations, ``key_gap`` apart.

    Keys advance by one inside a plateau and jump by ``key_gap`` between
    plateau starts, producing the worst-case staircase shape: an error below
    the plateau span forces one segment per plateau, an error above it lets
    a single segment cover everything.
    """
    if n < 1 or step_size < 1 or key_gap <= step_size:
        raise ConfigError(
            f"need n >= 1, step_size >= 1, key_gap > step_size "
            f"(got n={n}, step_size={step_size}, key_gap={key_gap})"
        )
    rng = np.random.default_rng(seed)
    base = int(rng.integers(0, 10_000))
    idx = np.arange(n, dtype=np.int64)
    keys = base + (idx // step_size) * key_gap + (idx % step_size)
    return _finish(
        "step",
        keys,
        {"gen": "step", "n": n, "step_size": step_size, "key_gap": key_gap, "seed": seed},
    )


def gen_periodic(n: int, period: int, amplitude: int, seed: int = 0) -> Dataset:
    """Key gaps oscillating with the given period in location space."""
    if n < 1 or period < 2 or amplitude < 1:
        raise ConfigError(
            f"need n >= 1, period >= 2, amplitude >= 1 "
            f"(got n={n}, period={period}, amplitude={amplitude})"
        )
    rng = np.random.default_rng(seed)
    base = int(rng.integers(0, 10_000))
    phase = 2.0 * np.pi * np.arange(n, dtype=np.float64) / period
    gaps = 1 + np.floor(amplitude * (1.0 + np.sin(phase)) / 2.0).astype(np.int64)
    keys = base + np.cumsum(gaps)
    return _finish(
        "periodic",
        keys,
        {"gen": "periodic", "n": n, "period": period, "amplitude": amplitude, "seed": seed},
    )


def gen_lognormal(n: int, sigma: float = 1.0, seed: int = 0) -> Dataset:
    """Float keys with log-normally distributed gaps (bursts and voids)."""
    if n < 1 or sigma <= 0:
        raise ConfigError(f"need n >= 1 and sigma > 0 (got n={n}, sigma={sigma})")
    rng = np.random.default_rng(seed)
    gaps = rng.lognormal(mean=0.0, sigma=sigma, size=n)
    keys = np.cumsum(gaps) + 1000.0
    if np.any(np.diff(keys) <= 0):
        raise ConfigError("lognormal gaps collapsed below float resolution")
    return _finish(
        "lognormal", keys, {"gen": "lognormal", "n": n, "sigma": sigma, "seed": seed}
    )


def adversarial_input(E: int, N: int) -> Dataset:
    """Worst-case input for the greedy segmenter.

    A three-key prelude spaced E/2 apart, then N+1 blocks of one key repeated
    E+1 times followed by a lone key 1/E beyond it, then a closing key E/2
    further.  The greedy segmenter needs N+2 segments while two suffice: the
    lone keys keep breaking the cone even though a single line through
    everything after the first key stays within E.
    """
    if E < 2 or N < 1:
        raise ConfigError(f"need E >= 2 and N >= 1 (got E={E}, N={N})")
    E = int(E)
    step = 1.0 / E
    keys: list[float] = [0.0, E / 2.0, E]
    x = float(E)
    for _ in range(N + 1):
        x += step if len(keys) == 3 else float(E)
        keys.extend([x] * (E + 1))
        x += step
        keys.append(x)
    keys.append(x + E / 2.0)
    return _finish(
        "adversarial",
        np.asarray(keys, dtype=np.float64),
        {"gen": "adversarial", "E": E, "N": N},
    )


GENERATORS = {
    "linear": gen_linear,
    "step": gen_step,
    "periodic": gen_periodic,
    "lognormal": gen_lognormal,
    "adversarial": adversarial_input,
}


# -- dataset files ----------------------------------------------------------

_BINARY_DTYPES = {"binary-le-u64": "<u8", "binary-le-f64": "<f8"}


def save_dataset(dataset: Dataset, path, fmt: str) -> None:
    """Write keys (and payloads, for CSV) in the given on-disk format."""
    if fmt in _BINARY_DTYPES:
        dataset.keys.astype(_BINARY_DTYPES[fmt]).tofile(path)
    elif fmt == "csv":
        with open(path, "w") as fh:
            for k, p in zip(dataset.keys.tolist(), dataset.payloads.tolist()):
                fh.write(f"{k},{p}\n")
    else:
        raise ConfigError(f"unknown dataset format {fmt!r}")


def load_dataset(path, fmt: str, sort: bool = False) -> Dataset:
    """Load a key file; verifies sorted order (or sorts when ``sort=True``)."""
    explicit = False
    if fmt in _BINARY_DTYPES:
        keys = np.fromfile(path, dtype=_BINARY_DTYPES[fmt]).astype(np.float64)
        payloads = np.arange(keys.size, dtype=np.int64)
    elif fmt == "csv":
        key_list: list[float] = []
        payload_list: list[int] = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                try:
                    key_list.append(float(parts[0]))
                    if len(parts) > 1:
                        payload_list.append(int(parts[1]))
                        explicit = True
                    else:
                        payload_list.append(len(payload_list))
                except ValueError:
                    raise MalformedInputError(
                        f"{path}: bad row at line {lineno}: {line!r}"
                    ) from None
        keys = np.asarray(key_list, dtype=np.float64)
        payloads = np.asarray(payload_list, dtype=np.int64)
    else:
        raise ConfigError(f"unknown dataset format {fmt!r}")
    if keys.size == 0:
        raise MalformedInputError(f"{path}: no keys")
    if np.any(np.diff(keys) < 0):
        if not sort:
            raise MalformedInputError(f"{path}: keys are not sorted (pass sort to reorder)")
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        payloads = payloads[order]
    return Dataset(
        name=str(path),
        keys=keys,
        payloads=payloads,
        provenance={"path": str(path), "format": fmt, "explicit_payloads": explicit},
    )


# -- oracle and baselines ----------------------------------------------------


class SortedArrayOracle:
    """Ground truth: a flat sorted array with stable inserts."""

    name = "oracle"

    def __init__(self, dataset: Dataset | None = None):
        self.keys: list[float] = [] if dataset is None else dataset.keys.tolist()
        self.payloads: list[int] = [] if dataset is None else dataset.payloads.tolist()

    @property
    def count(self) -> int:
        return len(self.keys)

    def insert(self, key: float, payload: int) -> None:
        j = bisect.bisect_right(self.keys, key)
        self.keys.insert(j, float(key))
        self.payloads.insert(j, int(payload))

    def lookup(self, key: float):
        j = bisect.bisect_left(self.keys, key)
        if j < len(self.keys) and self.keys[j] == key:
            return self.payloads[j]
        return None

    def range(self, lo: float, hi: float) -> list[Entry]:
        a = bisect.bisect_left(self.keys, lo)
        b = bisect.bisect_right(self.keys, hi)
        return [Entry(self.keys[t], self.payloads[t]) for t in range(a, b)]

    def items(self) -> list[Entry]:
        return [Entry(k, p) for k, p in zip(self.keys, self.payloads)]

    def index_bytes(self) -> int:
        return 0


class BinarySearchBaseline(SortedArrayOracle):
    """One large segment searched with plain binary search; zero index bytes."""

    name = "binary_search"


class FullIndexBaseline:
    """Dense index: every entry gets an inner-map slot (key + pointer)."""

    name = "full_index"

    def __init__(self, dataset: Dataset):
        self.keys: list[float] = dataset.keys.tolist()
        self.payloads: list[int] = dataset.payloads.tolist()
        self._first: dict[float, int] = {}
        for k, p in zip(self.keys, self.payloads):
            self._first.setdefault(k, p)

    @property
    def count(self) -> int:
        return len(self.keys)

    def insert(self, key: float, payload: int) -> None:
        key = float(key)
        j = bisect.bisect_right(self.keys, key)
        self.keys.insert(j, key)
        self.payloads.insert(j, int(payload))
        self._first.setdefault(key, int(payload))

    def lookup(self, key: float):
        return self._first.get(key)

    def range(self, lo: float, hi: float) -> list[Entry]:
        a = bisect.bisect_left(self.keys, lo)
        b = bisect.bisect_right(self.keys, hi)
        return [Entry(self.keys[t], self.payloads[t]) for t in range(a, b)]

    def index_bytes(self) -> int:
        return _INNER_ENTRY_BYTES * len(self.keys)


class _Page:
    __slots__ = ("keys", "payloads", "buf_keys", "buf_payloads")

    def __init__(self, keys, payloads):
        self.keys = keys
        self.payloads = payloads
        self.buf_keys: list[float] = []
        self.buf_payloads: list[int] = []


class FixedPagingBaseline:
    """Sparse index over fixed-size pages: only first keys are indexed.

    Half of the page size serves as the per-page insert buffer; a full
    buffer merges into the page, which then splits into two equal halves.
    """

    name = "fixed_paging"

    def __init__(self, dataset: Dataset, page_size: int):
        if page_size < 1:
            raise ConfigError(f"page_size must be >= 1, got {page_size}")
        self.page_size = page_size
        self.buffer_cap = max(1, page_size // 2)
        keys = dataset.keys.tolist()
        payloads = dataset.payloads.tolist()
        self.pages: list[_Page] = [
            _Page(keys[a : a + page_size], payloads[a : a + page_size])
            for a in range(0, len(keys), page_size)
        ]
        self.firsts: list[float] = [p.keys[0] for p in self.pages]
        self.count = len(keys)

    def _owner(self, key: float) -> int:
        i = bisect.bisect_right(self.firsts, key) - 1
        return 0 if i < 0 else i

    def lookup(self, key: float):
        i = self._owner(key)
        page = self.pages[i]
        pos = bisect.bisect_left(page.keys, key)
        if pos < len(page.keys) and page.keys[pos] == key:
            while pos == 0 and i > 0:
                prev = self.pages[i - 1]
                j = bisect.bisect_left(prev.keys, key)
                if j == len(prev.keys):
                    break
                i, page, pos = i - 1, prev, j
            return page.payloads[pos]
        j = bisect.bisect_left(page.buf_keys, key)
        if j < len(page.buf_keys) and page.buf_keys[j] == key:
            return page.buf_payloads[j]
        return None

    def insert(self, key: float, payload: int) -> None:
        key = float(key)
        i = self._owner(key)
        page = self.pages[i]
        j = bisect.bisect_right(page.buf_keys, key)
        page.buf_keys.insert(j, key)
        page.buf_payloads.insert(j, int(payload))
        self.count += 1
        if len(page.buf_keys) >= self.buffer_cap:
            self._split(i)

    def _split(self, i: int) -> None:
        page = self.pages[i]
        keys = np.asarray(page.keys, dtype=np.float64)
        ins = np.searchsorted(keys, page.buf_keys, side="right")
        merged_k = np.insert(keys, ins, page.buf_keys).tolist()
        merged_p = np.insert(
            np.asarray(page.payloads, dtype=np.int64), ins, page.buf_payloads
        ).tolist()
        mid = max(1, len(merged_k) // 2)
        left = _Page(merged_k[:mid], merged_p[:mid])
        right = _Page(merged_k[mid:], merged_p[mid:])
        if right.keys:
            self.pages[i : i + 1] = [left, right]
            self.firsts[i : i + 1] = [left.keys[0], right.keys[0]]
        else:
            self.pages[i] = left
            self.firsts[i] = left.keys[0]

    def range(self, lo: float, hi: float) -> list[Entry]:
        if lo > hi:
            raise MalformedInputError(f"malformed range: {lo} > {hi}")
        out: list[Entry] = []
        i = self._owner(lo)
        while i > 0 and self.pages[i - 1].keys[-1] >= lo:
            i -= 1
        for j in range(i, len(self.pages)):
            page = self.pages[j]
            if j > i and page.keys[0] > hi:
                break
            keys, payloads = page.keys, page.payloads
            bkeys, bpayloads = page.buf_keys, page.buf_payloads
            di = bisect.bisect_left(keys, lo)
            bi = bisect.bisect_left(bkeys, lo)
            n, bn = len(keys), len(bkeys)
            while di < n or bi < bn:
                if di < n and (bi >= bn or keys[di] <= bkeys[bi]):
                    k = keys[di]
                    if k > hi:
                        return out
                    out.append(Entry(k, payloads[di]))
                    di += 1
                else:
                    k = bkeys[bi]
                    if k > hi:
                        return out
                    out.append(Entry(k, bpayloads[bi]))
                    bi += 1
        return out

    def index_bytes(self) -> int:
        return len(self.pages) * (_INNER_ENTRY_BYTES + _PAGE_DESCRIPTOR_BYTES)


def baseline_full_index(dataset: Dataset) -> FullIndexBaseline:
    return FullIndexBaseline(dataset)


def baseline_fixed_paging(dataset: Dataset, page_size: int) -> FixedPagingBaseline:
    return FixedPagingBaseline(dataset, page_size)


def baseline_binary_search(dataset: Dataset) -> BinarySearchBaseline:
    return BinarySearchBaseline(dataset)


# -- reports ------------------------------------------------------------------


@dataclass
class BenchReport:
    rows: list[dict]
    meta: dict = field(default_factory=dict)

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"meta": self.meta, "rows": self.rows}, fh, indent=2, default=str)
            fh.write("\n")

    def to_csv(self, path) -> None:
        cols: list[str] = []
        for row in self.rows:
            for k in row:
                if k not in cols:
                    cols.append(k)
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for row in self.rows:
                fh.write(",".join(str(row.get(c, "")) for c in cols) + "\n")


# -- measurement helpers -------------------------------------------------------


def verify_against_oracle(structure, oracle, probe_keys: Sequence[float]) -> None:
    """Raise if the structure disagrees with the oracle on probes or ranges."""
    for k in probe_keys:
        got = structure.lookup(k)
        want = oracle.lookup(k)
        if got != want:
            raise AssertionError(
                f"{structure.name}: lookup({k}) = {got!r}, oracle says {want!r}"
            )
    if len(oracle.keys) > 1:
        lo, hi = oracle.keys[0], oracle.keys[len(oracle.keys) // 3]
        if structure.range(lo, hi) != oracle.range(lo, hi):
            raise AssertionError(f"{structure.name}: range mismatch on [{lo}, {hi}]")


def time_lookups(
    structure, query_keys: Sequence[float], rounds: int = 5, warmup: int = 3
) -> np.ndarray:
    """Per-query latencies in nanoseconds over the measured rounds."""
    for _ in range(warmup):
        for k in query_keys:
            structure.lookup(k)
    samples = np.empty(rounds * len(query_keys), dtype=np.float64)
    clock = time.perf_counter_ns
    t = 0
    for _ in range(rounds):
        for k in query_keys:
            t0 = clock()
            structure.lookup(k)
            samples[t] = clock() - t0
            t += 1
    return samples


def _latency_row(samples: np.ndarray) -> dict:
    return {
        "mean_ns": float(np.mean(samples)),
        "median_ns": float(np.median(samples)),
        "p99_ns": float(np.percentile(samples, 99)),
    }


def make_queries(dataset: Dataset, n_queries: int, seed: int, absent_fraction: float = 0.25):
    """Fixed-seed query mix of present keys plus misses between them."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, dataset.n, size=n_queries)
    keys = dataset.keys[picks].astype(np.float64)
    absent = rng.random(n_queries) < absent_fraction
    keys = np.where(absent, keys + 0.5, keys)
    return keys.tolist()


def run_lookup_bench(
    dataset: Dataset,
    errors: Sequence[int],
    n_queries: int = 2000,
    rounds: int = 5,
    warmup: int = 3,
    seed: int = 7,
    include_baselines: bool = True,
    buffer_size: int = 0,
) -> BenchReport:
    """Measure lookup latency at matched index sizes.

    For every error threshold the fixed-paging baseline is instantiated with
    ``page_size = ceil(n / S_e)``, which makes both sparse indexes hold the
    same number of boundary keys and therefore the same accounted bytes.
    """
    queries = make_queries(dataset, n_queries, seed)
    probe = queries[: min(200, len(queries))]
    oracle = SortedArrayOracle(dataset)
    rows = []
    for e in errors:
        cfg = IndexConfig(error=e, buffer_size=buffer_size)
        tree = SegmentIndex.from_arrays(dataset.keys, dataset.payloads, cfg)
        verify_against_oracle(tree, oracle, probe)
        stats = tree.stats()
        row = {
            "structure": "segment_index",
            "dataset": dataset.name,
            "error_or_page_size": e,
            "segment_count": stats.n_segments,
            "index_bytes": stats.measured_bytes,
            "pair": f"e{e}",
        }
        row.update(_latency_row(time_lookups(tree, queries, rounds, warmup)))
        rows.append(row)
        if include_baselines:
            page_size = max(1, math.ceil(dataset.n / stats.n_segments))
            paging = FixedPagingBaseline(dataset, page_size)
            verify_against_oracle(paging, oracle, probe)
            row = {
                "structure": "fixed_paging",
                "dataset": dataset.name,
                "error_or_page_size": page_size,
                "segment_count": len(paging.pages),
                "index_bytes": paging.index_bytes(),
                "pair": f"e{e}",
            }
            row.update(_latency_row(time_lookups(paging, queries, rounds, warmup)))
            rows.append(row)
    if include_baselines:
        for structure in (FullIndexBaseline(dataset), BinarySearchBaseline(dataset)):
            verify_against_oracle(structure, oracle, probe)
            row = {
                "structure": structure.name,
                "dataset": dataset.name,
                "error_or_page_size": "",
                "segment_count": "",
                "index_bytes": structure.index_bytes(),
                "pair": "",
            }
            row.update(_latency_row(time_lookups(structure, queries, rounds, warmup)))
            rows.append(row)
    return BenchReport(
        rows,
        meta={
            "suite": "lookup",
            "dataset": dataset.provenance,
            "errors": list(errors),
            "n_queries": n_queries,
            "rounds": rounds,
            "warmup": warmup,
            "seed": seed,
        },
    )


def _insert_workload(dataset: Dataset, insert_fraction: float, seed: int):
    """Split a dataset into a bulk part and a stream of inserts."""
    if not 0 < insert_fraction < 1:
        raise ConfigError(f"insert_fraction must be in (0, 1), got {insert_fraction}")
    rng = np.random.default_rng(seed)
    n_ins = max(1, int(dataset.n * insert_fraction))
    pick = rng.choice(dataset.n, size=n_ins, replace=False)
    mask = np.zeros(dataset.n, dtype=bool)
    mask[pick] = True
    bulk = Dataset(
        name=dataset.name,
        keys=dataset.keys[~mask],
        payloads=dataset.payloads[~mask],
        provenance=dataset.provenance,
    )
    order = rng.permutation(n_ins)
    ins_keys = dataset.keys[mask][order].tolist()
    ins_payloads = dataset.payloads[mask][order].tolist()
    return bulk, list(zip(ins_keys, ins_payloads))


def _time_insert_phase(build, inserts, rounds: int, warmup: int) -> tuple[float, object]:
    best_rate = 0.0
    last = None
    for r in range(warmup + rounds):
        structure = build()
        t0 = time.perf_counter_ns()
        for k, p in inserts:
            structure.insert(k, p)
        dt = time.perf_counter_ns() - t0
        if r >= warmup:
            best_rate = max(best_rate, len(inserts) / (dt / 1e9))
        last = structure
    return best_rate, last


def run_insert_bench(
    dataset: Dataset,
    errors: Sequence[int],
    insert_fraction: float = 0.2,
    rounds: int = 3,
    warmup: int = 1,
    seed: int = 11,
    include_baselines: bool = True,
) -> BenchReport:
    """Bulk load most of the dataset, then time inserting the remainder."""
    bulk, inserts = _insert_workload(dataset, insert_fraction, seed)
    oracle = SortedArrayOracle(bulk)
    for k, p in inserts:
        oracle.insert(k, p)
    expected = oracle.items()
    rows = []
    for e in errors:
        cfg = IndexConfig(error=e)
        rate, tree = _time_insert_phase(
            lambda: SegmentIndex.from_arrays(bulk.keys, bulk.payloads, cfg),
            inserts,
            rounds,
            warmup,
        )
        if list(tree.items()) != expected:
            raise AssertionError(f"segment_index diverged from oracle at error {e}")
        rows.append(
            {
                "structure": "segment_index",
                "dataset": dataset.name,
                "error_or_page_size": e,
                "buffer_size": cfg.buffer_size,
                "insert_ops_s": rate,
                "segment_count": tree.stats().n_segments,
                "n_splits": tree.n_splits,
                "index_bytes": tree.stats().measured_bytes,
            }
        )
        if include_baselines:
            rate, paging = _time_insert_phase(
                lambda: FixedPagingBaseline(bulk, page_size=max(2, e)),
                inserts,
                rounds,
                warmup,
            )
            rows.append(
                {
                    "structure": "fixed_paging",
                    "dataset": dataset.name,
                    "error_or_page_size": e,
                    "buffer_size": max(1, e // 2),
                    "insert_ops_s": rate,
                    "segment_count": len(paging.pages),
                    "n_splits": "",
                    "index_bytes": paging.index_bytes(),
                }
            )
    if include_baselines:
        rate, _ = _time_insert_phase(lambda: FullIndexBaseline(bulk), inserts, rounds, warmup)
        rows.append(
            {
                "structure": "full_index",
                "dataset": dataset.name,
                "error_or_page_size": "",
                "buffer_size": "",
                "insert_ops_s": rate,
                "segment_count": "",
                "n_splits": "",
                "index_bytes": _INNER_ENTRY_BYTES * dataset.n,
            }
        )
    return BenchReport(
        rows,
        meta={
            "suite": "insert",
            "dataset": dataset.provenance,
            "errors": list(errors),
            "insert_fraction": insert_fraction,
            "rounds": rounds,
            "warmup": warmup,
            "seed": seed,
        },
    )


def compare_segmenters(
    dataset: Dataset, errors: Sequence[int], max_points: int = 100_000
) -> BenchReport:
    """Greedy versus optimal segment counts at each error threshold."""
    pts = dataset.points()
    rows = []
    for e in errors:
        greedy = len(shrinking_cone(pts, e))
        optimal = len(optimal_segmentation(pts, e, max_points=max_points))
        rows.append(
            {
                "dataset": dataset.name,
                "error": e,
                "greedy_count": greedy,
                "optimal_count": optimal,
                "ratio": greedy / optimal,
            }
        )
    return BenchReport(
        rows,
        meta={"suite": "segmenters", "dataset": dataset.provenance, "errors": list(errors)},
    )


def fill_factor_sweep(
    dataset: Dataset,
    error: int,
    buffer_sizes: Sequence[int],
    insert_fraction: float = 0.2,
    rounds: int = 3,
    warmup: int = 1,
    seed: int = 13,
) -> BenchReport:
    """Insert throughput as the per-segment buffer grows (fixed error)."""
    bulk, inserts = _insert_workload(dataset, insert_fraction, seed)
    rows = []
    for buf in buffer_sizes:
        cfg = IndexConfig(error=error, buffer_size=buf)
        rate, tree = _time_insert_phase(
            lambda: SegmentIndex.from_arrays(bulk.keys, bulk.payloads, cfg),
            inserts,
            rounds,
            warmup,
        )
        rows.append(
            {
                "dataset": dataset.name,
                "error": error,
                "buffer_size": buf,
                "insert_ops_s": rate,
                "n_splits": tree.n_splits,
                "segment_count": tree.stats().n_segments,
            }
        )
    return BenchReport(
        rows,
        meta={
            "suite": "fill_factor",
            "dataset": dataset.provenance,
            "error": error,
            "buffer_sizes": list(buffer_sizes),
            "insert_fraction": insert_fraction,
            "rounds": rounds,
            "warmup": warmup,
            "seed": seed,
        },
    )
