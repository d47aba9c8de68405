"""Latency and size estimators driving error-threshold selection.

The estimators are driven by a measured profile mapping each candidate error
threshold ``e`` to the segment count ``S_e`` it produces.  Lookup latency is
modeled as ``c * (log_b(S_e) + log2(e) + log2(buff))`` nanoseconds: a tree
descent, a bounded in-segment binary search, and a buffer binary search,
each access costing one cache-miss constant ``c``.  Index size is modeled as
``f * S_e * log_b(S_e) * 16B`` for the inner tree plus ``24B`` per segment
descriptor; the tree term is deliberately pessimistic.

Two selectors pick a threshold from the profile: smallest index satisfying a
latency requirement, or fastest index within a storage budget.

The insert estimator is a model extension: the reference formulation names
the ingredients (tree descent, sorted buffer insertion, amortized split)
without giving a closed form, so the constants here are calibratable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ConfigError,
    InfeasibleConstraintError,
    MalformedInputError,
    MissingSampleError,
)
from .segmentation import shrinking_cone

_INNER_ENTRY_BYTES = 16.0
_SEGMENT_DESCRIPTOR_BYTES = 24.0


def _log_floor(x: float, base: float) -> float:
    """log_base(x), defined as 0 for x <= 1 (degenerate searches cost nothing)."""
    if x <= 1:
        return 0.0
    return math.log(x, base)


@dataclass(frozen=True)
class CostParams:
    """Hardware and layout constants for the estimators.

    ``c``: cache-miss latency in nanoseconds.  ``b``: inner-tree fanout.
    ``f``: tree fill ratio in (0, 1].  ``buff``: segment buffer capacity.
    ``shift_factor`` and ``split_factor`` scale the insert-model terms (in
    cache-miss units per shifted/merged element) and are extensions.
    """

    c: float = 50.0
    b: int = 16
    f: float = 0.5
    buff: int = 1
    shift_factor: float = 0.05
    split_factor: float = 20.0

    def __post_init__(self):
        if self.c <= 0:
            raise ConfigError(f"c must be > 0, got {self.c}")
        if self.b < 2:
            raise ConfigError(f"fanout b must be >= 2, got {self.b}")
        if not 0 < self.f <= 1:
            raise ConfigError(f"fill ratio f must be in (0, 1], got {self.f}")
        if self.buff < 1:
            raise ConfigError(f"buff must be >= 1 for latency modeling, got {self.buff}")


class SegmentCountProfile:
    """Measured map from error threshold to segment count.

    Segment counts must be >= 1 and non-increasing in the error threshold;
    both are enforced at construction.
    """

    def __init__(self, samples: Mapping[int, int]):
        items = sorted((int(e), int(s)) for e, s in samples.items())
        if not items:
            raise MalformedInputError("profile needs at least one sample")
        prev = None
        for e, s in items:
            if s < 1:
                raise MalformedInputError(f"segment count must be >= 1, got {s} at e={e}")
            if prev is not None and s > prev:
                raise MalformedInputError(
                    f"segment counts must be non-increasing in e (S_{e}={s} > {prev})"
                )
            prev = s
        self._samples = dict(items)

    @property
    def errors(self) -> list[int]:
        return list(self._samples)

    def segments_at(self, e: int) -> int:
        try:
            return self._samples[int(e)]
        except KeyError:
            raise MissingSampleError(f"error threshold {e} was not profiled") from None

    def __contains__(self, e) -> bool:
        return int(e) in self._samples

    def items(self):
        return self._samples.items()

    def __eq__(self, other):
        return isinstance(other, SegmentCountProfile) and self._samples == other._samples

    def __repr__(self):
        return f"SegmentCountProfile({self._samples!r})"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["error", "segment_count"])
            for e, s in self._samples.items():
                w.writerow([e, s])

    @classmethod
    def from_csv(cls, path) -> "SegmentCountProfile":
        samples = {}
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or (lineno == 1 and row[0].strip().lower() == "error"):
                    continue
                try:
                    samples[int(row[0])] = int(row[1])
                except (ValueError, IndexError):
                    raise MalformedInputError(
                        f"bad profile row at line {lineno}: {row!r}"
                    ) from None
        return cls(samples)


def profile_segments(points, candidate_errors: Iterable[int]) -> SegmentCountProfile:
    """Run the greedy segmenter at each candidate error and record the counts."""
    errors = sorted(set(int(e) for e in candidate_errors))
    if not errors:
        raise MalformedInputError("candidate error set is empty")
    return SegmentCountProfile(
        {e: len(shrinking_cone(points, e)) for e in errors}
    )


def latency_estimate(e: int, profile: SegmentCountProfile, params: CostParams) -> float:
    """Estimated lookup latency in nanoseconds for error threshold ``e``."""
    s = profile.segments_at(e)
    return params.c * (
        _log_floor(s, params.b) + _log_floor(e, 2.0) + _log_floor(params.buff, 2.0)
    )


def size_estimate(e: int, profile: SegmentCountProfile, params: CostParams) -> float:
    """Estimated index size in bytes for error threshold ``e``."""
    s = profile.segments_at(e)
    tree = params.f * s * _log_floor(s, params.b) * _INNER_ENTRY_BYTES
    return tree + s * _SEGMENT_DESCRIPTOR_BYTES


def pick_error_for_latency(
    l_req: float,
    candidate_errors: Iterable[int],
    profile: SegmentCountProfile,
    params: CostParams,
) -> int:
    """Smallest estimated index among candidates meeting the latency bound.

    Ties break toward the larger error (fewer segments to maintain).  Raises
    :class:`InfeasibleConstraintError` carrying the best achievable latency
    when no candidate qualifies.
    """
    candidates = sorted(set(int(e) for e in candidate_errors))
    if not candidates:
        raise MalformedInputError("candidate error set is empty")
    feasible = [e for e in candidates if latency_estimate(e, profile, params) <= l_req]
    if not feasible:
        best = min(latency_estimate(e, profile, params) for e in candidates)
        raise InfeasibleConstraintError(
            f"no candidate meets latency {l_req} ns (best achievable {best:.1f} ns)",
            best_value=best,
        )
    return max(feasible, key=lambda e: (-size_estimate(e, profile, params), e))


def pick_error_for_budget(
    s_req: float,
    candidate_errors: Iterable[int],
    profile: SegmentCountProfile,
    params: CostParams,
) -> int:
    """Fastest candidate whose estimated size fits the storage budget.

    Ties break toward the smaller error (tighter lookups for the same cost).
    Raises :class:`InfeasibleConstraintError` with the best achievable size
    when no candidate fits.
    """
    candidates = sorted(set(int(e) for e in candidate_errors))
    if not candidates:
        raise MalformedInputError("candidate error set is empty")
    feasible = [e for e in candidates if size_estimate(e, profile, params) <= s_req]
    if not feasible:
        best = min(size_estimate(e, profile, params) for e in candidates)
        raise InfeasibleConstraintError(
            f"no candidate fits budget {s_req} bytes (best achievable {best:.0f} B)",
            best_value=best,
        )
    return min(feasible, key=lambda e: (latency_estimate(e, profile, params), e))


@dataclass(frozen=True)
class InsertEstimate:
    """Insert-path latency split into its modeled components (nanoseconds)."""

    descent_ns: float
    buffer_ns: float
    amortized_split_ns: float | None

    @property
    def total_ns(self) -> float:
        return self.descent_ns + self.buffer_ns + (self.amortized_split_ns or 0.0)


def insert_latency_estimate(
    e: int,
    profile: SegmentCountProfile,
    params: CostParams,
    n_locs: int | None = None,
) -> InsertEstimate:
    """Modeled insert latency: tree descent plus sorted-buffer insertion.

    The amortized split term spreads one merge-and-resegment of ``d``
    elements (``d`` = dataset size / segment count) over the ``buff`` inserts
    that trigger it; it is only computed when ``n_locs`` is given.
    """
    s = profile.segments_at(e)
    descent = params.c * _log_floor(s, params.b)
    buffer_cost = params.c * (params.buff / 2.0) * params.shift_factor
    split = None
    if n_locs is not None:
        d = n_locs / s
        split = params.c * params.split_factor * d / params.buff
    return InsertEstimate(descent, buffer_cost, split)
