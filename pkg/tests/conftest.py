"""Shared fixtures: the fuzz corpus and vectorized segment checks."""

from __future__ import annotations

import numpy as np
import pytest

from plindex.segmentation import VALIDATION_TOL

FUZZ_ERRORS = (0, 1, 2, 10, 100)


def _unit_gaps(rng, n):
    gaps = rng.integers(1, 5, n)
    run = int(rng.integers(8, 32))
    at = int(rng.integers(0, max(1, n - run)))
    gaps[at : at + run] = int(rng.integers(1, 4))
    return gaps


def _mixed_jumps(rng, n):
    gaps = rng.integers(1, 6, n).astype(np.int64)
    jumps = rng.random(n) < 0.02
    gaps[jumps] = rng.integers(10_000, 1_000_000, int(jumps.sum()))
    gaps[:16] = 2  # guaranteed collinear run
    return gaps


def _blocks(rng, n):
    gaps = np.empty(n, dtype=np.int64)
    at = 0
    while at < n:
        blk = int(rng.integers(128, 600))
        gaps[at : at + blk] = int(rng.integers(1, 4))
        at += blk
        if at < n:
            gaps[at] = int(rng.integers(50_000, 500_000))
            at += 1
    return gaps


def _steppy(rng, n):
    gaps = np.empty(n, dtype=np.int64)
    at = 0
    while at < n:
        plateau = int(rng.integers(8, 300))
        gaps[at : at + plateau] = 1
        at += plateau
        if at < n:
            gaps[at] = int(rng.integers(10_000, 10_000_000))
            at += 1
    return gaps


_INT_PATTERNS = (_unit_gaps, _mixed_jumps, _blocks, _steppy)


def build_fuzz_corpus(seed: int = 20240817, n_datasets: int = 1000):
    """Deterministic monotone datasets: strictly increasing keys, even sizes.

    Returns a list of (name, points) where points is an (n, 2) float array.
    The mix embeds collinear runs and keeps duplicate keys out so the greedy
    count guarantee applies at every tested error (see the README note on
    the bound's validity regime).
    """
    rng = np.random.default_rng(seed)
    corpus = []
    n_large = 20
    n_float = 130
    n_int = n_datasets - n_large - n_float
    for i in range(n_int):
        n = int(rng.integers(256, 1500)) * 2
        pattern = _INT_PATTERNS[i % len(_INT_PATTERNS)]
        keys = np.cumsum(pattern(rng, n)).astype(np.float64)
        corpus.append((f"int-{pattern.__name__[1:]}-{i}", _pts(keys)))
    for i in range(n_float):
        n = int(rng.integers(512, 2048)) * 2
        sigma = rng.uniform(0.5, 3.0)
        keys = np.cumsum(rng.lognormal(0.0, sigma, n)) + 10.0
        corpus.append((f"float-lognormal-{i}", _pts(keys)))
    for i in range(n_large):
        n = int(rng.integers(15_000, 50_000)) * 2
        pattern = _INT_PATTERNS[i % len(_INT_PATTERNS)]
        keys = np.cumsum(pattern(rng, n)).astype(np.float64)
        corpus.append((f"large-{pattern.__name__[1:]}-{i}", _pts(keys)))
    return corpus


def _pts(keys):
    return np.column_stack([keys, np.arange(keys.size, dtype=np.float64)])


def deviations_ok(points: np.ndarray, segs, error: int) -> bool:
    """Vectorized form of validate_segment applied to every segment at once."""
    keys = points[:, 0]
    locs = points[:, 1]
    counts = np.fromiter((s.n_locs for s in segs), dtype=np.int64, count=len(segs))
    starts_k = np.repeat(np.fromiter((s.start_key for s in segs), dtype=np.float64), counts)
    starts_l = np.repeat(np.fromiter((s.start_loc for s in segs), dtype=np.float64), counts)
    slopes = np.repeat(np.fromiter((s.slope for s in segs), dtype=np.float64), counts)
    if starts_k.size != keys.size:
        return False
    pred = starts_l + (keys - starts_k) * slopes
    return bool(np.abs(pred - locs).max() <= error + VALIDATION_TOL)


@pytest.fixture(scope="session")
def small_fuzz_corpus():
    return build_fuzz_corpus(seed=987, n_datasets=60)
