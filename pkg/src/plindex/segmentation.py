"""Error-bounded piecewise-linear segmentation of a monotone key -> location map.

A *segment* approximates a contiguous run of (key, location) points by the
straight line through its first and last point.  A segment is valid for an
error threshold ``e`` when every covered point's interpolated location is
within ``e`` of its true location.  Two segmenters are provided:

* :func:`shrinking_cone` -- the single-pass greedy segmenter.  It keeps a
  feasible-slope interval (the cone) anchored at the current segment origin
  and extends the segment while the slope through origin and candidate stays
  inside the interval.  O(n) time, O(1) working state.
* :func:`optimal_segmentation` -- a dynamic-programming oracle that returns a
  provably minimal segmentation.  O(n^2) time and O(n) memory, guarded by an
  input cap; intended for testing and desk-scale comparisons.

Locations are integers and must increase by exactly one per point; keys are
non-decreasing 64-bit ints or floats.  All functions are pure and safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, EmptyInputError, MalformedInputError

# Slack for comparing float-evaluated deviations against an integer error
# threshold.  Interpolation is defined over the reals; evaluating it in
# doubles can overshoot by a few ulps (~1e-9 at the magnitudes this library
# targets), never by anything close to 1e-6.
VALIDATION_TOL = 1e-6

# The DP oracle widens its feasibility test by this much (in location units)
# so that any segment the greedy algorithm emitted is also feasible for the
# oracle under float evaluation.  Must stay well below VALIDATION_TOL.
_DP_TOL = 1e-7

DEFAULT_OPTIMAL_CAP = 100_000

_INF = math.inf


class Point(NamedTuple):
    """One entry of the monotone key -> location function."""

    key: float
    loc: int


@dataclass(frozen=True, slots=True)
class Segment:
    """A linear approximation of a contiguous run of points.

    ``interpolate(k) = start_loc + (k - start_key) * slope`` predicts the
    location of key ``k``; for every covered point the prediction is within
    the error threshold the segment was built with.
    """

    start_key: float
    start_loc: int
    slope: float
    n_locs: int
    end_key: float

    def interpolate(self, key: float) -> float:
        return self.start_loc + (key - self.start_key) * self.slope


@dataclass(frozen=True, slots=True)
class Cone:
    """Greedy-segmenter state: origin point plus the feasible slope interval.

    While a segment is open, ``sl_low`` never decreases, ``sl_high`` never
    increases and the interval never empties.
    """

    origin: Point
    sl_high: float
    sl_low: float


def _coerce_points(points) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a point sequence into (keys, locs) float64/int64 arrays.

    Accepts a sequence of (key, loc) pairs (including Point tuples) or an
    (n, 2) array.  Raises on empty or structurally invalid input.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("point sequence is empty")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise MalformedInputError(
            f"expected a sequence of (key, loc) pairs, got shape {arr.shape}"
        )
    keys = np.ascontiguousarray(arr[:, 0])
    locs = np.ascontiguousarray(arr[:, 1])
    _check_monotone(keys, locs)
    return keys, locs.astype(np.int64)


def _check_monotone(keys: np.ndarray, locs: np.ndarray) -> None:
    if keys.size > 1:
        dk = np.diff(keys)
        if np.any(dk < 0):
            i = int(np.argmax(dk < 0))
            raise MalformedInputError(f"keys decrease at position {i + 1}")
        dl = np.diff(locs)
        if np.any(dl != 1):
            i = int(np.argmax(dl != 1))
            raise MalformedInputError(
                f"locations must increase by exactly 1 (violated at position {i + 1})"
            )
    if not np.isfinite(keys).all():
        raise MalformedInputError("keys must be finite")


def shrinking_cone(
    points,
    error: int,
    on_state: Callable[[Cone], None] | None = None,
) -> list[Segment]:
    """Greedily split ``points`` into maximal segments for ``error``.

    A candidate point joins the open segment iff the slope from the segment
    origin to the candidate lies inside the cone; accepted points then narrow
    the cone with their own slope bounds.  Points that repeat the origin key
    are absorbed while their location stays within ``error`` of the origin.
    On rejection the segment is closed with the slope through its first and
    last point (clamped into the final cone interval for float safety) and
    the candidate becomes the next origin.

    ``on_state``, when given, is invoked with the :class:`Cone` after every
    accepted point; it exists for property tests and costs nothing otherwise.
    """
    if error < 0:
        raise MalformedInputError(f"error threshold must be >= 0, got {error}")
    keys_arr, locs_arr = _coerce_points(points)
    keys = keys_arr.tolist()
    loc0 = int(locs_arr[0])
    n = len(keys)
    err = float(error)

    segments: list[Segment] = []
    ox = keys[0]
    oy = loc0
    oi = 0
    hi = _INF
    lo = 0.0
    last_i = 0

    def close(end_i: int) -> None:
        end_key = keys[end_i]
        if end_key == ox:
            slope = 0.0
        else:
            slope = ((loc0 + end_i) - oy) / (end_key - ox)
            if slope < lo:
                slope = lo
            elif slope > hi:
                slope = hi
        segments.append(
            Segment(
                start_key=ox,
                start_loc=oy,
                slope=slope,
                n_locs=end_i - oi + 1,
                end_key=end_key,
            )
        )

    for i in range(1, n):
        x = keys[i]
        y = loc0 + i
        if x == ox:
            # Same key as the origin: representable iff within the error.
            if y - oy <= err:
                last_i = i
                if on_state is not None:
                    on_state(Cone(Point(ox, oy), hi, lo))
                continue
        else:
            d = x - ox
            cand = (y - oy) / d
            if lo <= cand <= hi:
                nh = (y + err - oy) / d
                if nh < hi:
                    hi = nh
                nl = (y - err - oy) / d
                if nl > lo:
                    lo = nl
                last_i = i
                if on_state is not None:
                    on_state(Cone(Point(ox, oy), hi, lo))
                continue
        close(last_i)
        ox = x
        oy = y
        oi = i
        hi = _INF
        lo = 0.0
        last_i = i
    close(last_i)
    return segments


def optimal_segmentation(
    points, error: int, max_points: int = DEFAULT_OPTIMAL_CAP
) -> list[Segment]:
    """Return a segmentation with the provably minimal number of segments.

    A segment [s, e] is feasible iff every intermediate point lies within
    ``error`` of the straight line through points s and e.  ``T[e]`` is the
    minimal segment count covering the first e points; each endpoint scans
    its feasible starts with an incremental slope-interval intersection, so
    the oracle runs in O(n^2) time and O(n) memory.

    Inputs longer than ``max_points`` raise :class:`CapacityError`; the
    quadratic scan is meant for desk-scale oracle use, not production loads.
    """
    if error < 0:
        raise MalformedInputError(f"error threshold must be >= 0, got {error}")
    keys, locs = _coerce_points(points)
    n = keys.size
    if n > max_points:
        raise CapacityError(
            f"optimal segmentation capped at {max_points} points, got {n}"
        )
    err_lo = float(error) - _DP_TOL
    err_hi = float(error) + _DP_TOL

    idx = np.arange(n, dtype=np.float64)
    best = np.zeros(n + 1, dtype=np.int64)  # best[i]: min segments over first i points
    parent = np.zeros(n + 1, dtype=np.int64)
    big = np.iinfo(np.int64).max // 2

    for e in range(n):
        xe = keys[e]
        m = e + 1
        delta = xe - keys[:m]
        cover = float(e) - idx[:m]  # location distance to the endpoint
        dup = delta == 0.0
        safe = np.where(dup, 1.0, delta)
        cl = np.where(dup, -_INF, (cover - err_hi) / safe)
        ch = np.where(dup, _INF, (cover + err_hi) / safe)
        slope = np.where(dup, 0.0, cover / safe)

        feas = np.empty(m, dtype=bool)
        if e >= 2:
            inner_lo = np.maximum.accumulate(cl[1:e][::-1])[::-1]
            inner_hi = np.minimum.accumulate(ch[1:e][::-1])[::-1]
            feas[: e - 1] = (inner_lo <= slope[: e - 1]) & (slope[: e - 1] <= inner_hi)
        if e >= 1:
            feas[e - 1] = True  # two-point segment: the line passes through both
        feas[e] = True  # single-point segment
        # Start positions sharing the endpoint key are feasible iff the
        # covered location span fits in the error budget.
        if dup.any():
            feas[dup] = cover[dup] <= err_hi
            poison = dup & (cover > err_hi)
            if poison.any():
                feas[: int(np.nonzero(poison)[0].max())] = False

        cand = best[:m] + 1
        cand = np.where(feas, cand, big)
        s = int(np.argmin(cand))
        best[e + 1] = cand[s]
        parent[e + 1] = s

    loc_base = int(locs[0])
    segments: list[Segment] = []
    e = n - 1
    while e >= 0:
        s = int(parent[e + 1])
        if keys[e] == keys[s]:
            slope = 0.0
        else:
            slope = float(e - s) / float(keys[e] - keys[s])
        segments.append(
            Segment(
                start_key=float(keys[s]),
                start_loc=loc_base + s,
                slope=slope,
                n_locs=e - s + 1,
                end_key=float(keys[e]),
            )
        )
        e = s - 1
    segments.reverse()
    return segments


def validate_segment(points, seg: Segment, error: int, tol: float = VALIDATION_TOL) -> bool:
    """Check that every point lies within ``error`` of the segment's line.

    ``points`` must be exactly the points the segment covers.  The deviation
    is evaluated in doubles and compared against ``error + tol``.
    """
    keys, locs = _coerce_points(points)
    pred = seg.start_loc + (keys - seg.start_key) * seg.slope
    dev = np.abs(pred - locs)
    return bool(dev.max() <= error + tol)


def max_error(points, segs: Sequence[Segment]) -> int:
    """Realized maximum deviation of a segmentation, floored to an integer.

    ``segs`` must cover ``points`` contiguously and in order, otherwise a
    :class:`MalformedInputError` is raised.
    """
    keys, locs = _coerce_points(points)
    n = keys.size
    offset = 0
    worst = 0.0
    for seg in segs:
        end = offset + seg.n_locs
        if end > n or int(locs[offset]) != seg.start_loc or keys[offset] != seg.start_key:
            raise MalformedInputError("segments do not cover the points contiguously")
        k = keys[offset:end]
        pred = seg.start_loc + (k - seg.start_key) * seg.slope
        dev = np.abs(pred - locs[offset:end]).max()
        if dev > worst:
            worst = float(dev)
        offset = end
    if offset != n:
        raise MalformedInputError(
            f"segments cover {offset} locations but input has {n}"
        )
    return int(math.floor(worst))


def segment_count_bound(n_keys: int, n_locs: int, error: int) -> int:
    """Worst-case greedy segment count: floor(min(n_keys/2, n_locs/(error+1))).

    Clamped to at least 1; used as an assertion against greedy output.
    """
    if n_keys < 1 or n_locs < n_keys:
        raise MalformedInputError("need n_keys >= 1 and n_locs >= n_keys")
    bound = math.floor(min(n_keys / 2, n_locs / (error + 1)))
    return max(1, bound)


def non_linearity_ratio(points, error: int) -> float:
    """Segment count normalized by the worst case for a same-size dataset.

    The worst case for n locations is ceil(n / (error + 1)) segments (data
    whose periodicity equals the error); the ratio therefore lies in (0, 1],
    with linear data near 0 and maximally periodic data at 1.
    """
    keys, _locs = _coerce_points(points)
    n = keys.size
    count = len(shrinking_cone(points, error))
    worst = math.ceil(n / (error + 1))
    return count / worst


def points_from_keys(keys: Iterable[float], offset: int = 0) -> np.ndarray:
    """Build an (n, 2) point array from sorted keys with locations offset..offset+n-1."""
    k = np.asarray(keys, dtype=np.float64)
    locs = np.arange(offset, offset + k.size, dtype=np.float64)
    return np.column_stack([k, locs])
