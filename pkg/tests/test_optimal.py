"""DP segmenter tests, anchored by an exhaustive brute-force oracle."""

import numpy as np
import pytest

from plindex import (
    CapacityError,
    max_error,
    optimal_segmentation,
    points_from_keys,
    shrinking_cone,
    validate_segment,
)
from plindex.bench import adversarial_input, gen_step


def brute_force_min_segments(keys, error):
    """O(n^3) reference: full DP with a direct per-segment feasibility scan."""
    keys = [float(k) for k in keys]
    n = len(keys)

    def feasible(s, e):
        if keys[e] == keys[s]:
            return e - s <= error
        slope = (e - s) / (keys[e] - keys[s])
        return all(
            abs(s + (keys[i] - keys[s]) * slope - i) <= error + 1e-9
            for i in range(s + 1, e)
        )

    best = [0] + [n + 1] * n
    for e in range(n):
        for s in range(e + 1):
            if best[s] + 1 < best[e + 1] and feasible(s, e):
                best[e + 1] = best[s] + 1
    return best[n]


def test_trivial_linear():
    for e in (0, 1, 100):
        assert len(optimal_segmentation(points_from_keys(range(200)), e)) == 1


def test_output_is_valid_partition():
    rng = np.random.default_rng(2)
    keys = np.cumsum(rng.integers(1, 300, 300))
    pts = points_from_keys(keys)
    for e in (0, 3, 25):
        segs = optimal_segmentation(pts, e)
        loc = 0
        for s in segs:
            assert s.start_loc == loc
            window = pts[loc : loc + s.n_locs]
            assert validate_segment(window, s, e)
            loc += s.n_locs
        assert loc == 300
        assert max_error(pts, segs) <= e


@pytest.mark.parametrize("trial", range(30))
def test_matches_brute_force(trial):
    rng = np.random.default_rng(1000 + trial)
    n = int(rng.integers(3, 45))
    if trial % 3 == 0:
        keys = np.cumsum(rng.integers(1, 8, n))
    elif trial % 3 == 1:
        keys = np.cumsum(np.where(rng.random(n) < 0.2, rng.integers(50, 500, n), 1))
    else:
        keys = np.repeat(np.cumsum(rng.integers(1, 60, n)), rng.integers(1, 4, n))[:n]
        keys = np.sort(keys)
    e = int(rng.integers(0, 8))
    got = len(optimal_segmentation(points_from_keys(keys), e))
    want = brute_force_min_segments(keys, e)
    assert got == want, (trial, keys.tolist(), e)


def test_never_worse_than_greedy():
    rng = np.random.default_rng(9)
    for trial in range(15):
        keys = np.cumsum(
            np.where(rng.random(200) < 0.1, rng.integers(100, 10_000, 200), rng.integers(1, 6, 200))
        )
        pts = points_from_keys(keys)
        for e in (0, 5, 50):
            assert len(optimal_segmentation(pts, e)) <= len(shrinking_cone(pts, e))


def test_step_data_matches_greedy_plateau_count():
    ds = gen_step(1000, 100, 10**6, seed=4)
    greedy = shrinking_cone(ds.points(), 10)
    optimal = optimal_segmentation(ds.points(), 10)
    assert len(greedy) == len(optimal) == 10


def test_capacity_cap():
    pts = points_from_keys(range(100))
    with pytest.raises(CapacityError):
        optimal_segmentation(pts, 1, max_points=50)


def test_adversarial_input_single_segment_suffices():
    # The greedy segmenter needs N+2 segments here, yet even the full-span
    # line stays within the threshold (margin E - (E+2)/(E^2+1) < E), so the
    # true optimum is 1, not the 2 the published construction argues for.
    ds = adversarial_input(100, 10)
    pts = ds.points()
    assert len(shrinking_cone(pts, 100)) == 12
    segs = optimal_segmentation(pts, 100)
    assert len(segs) == 1
    assert validate_segment(pts, segs[0], 100)
    # the two-segment split (first key alone, one line for the rest) is also valid
    keys = ds.keys
    slope = (pts.shape[0] - 1 - 1) / (keys[-1] - keys[1])
    pred = 1 + (keys[1:] - keys[1]) * slope
    assert np.abs(pred - np.arange(1, pts.shape[0])).max() <= 100
