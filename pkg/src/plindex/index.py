"""An ordered map over error-bounded linear segments with buffered inserts.

The index keeps one node per segment: the node stores the segment's line
(start key, slope), the covered entries as sorted arrays, and a fixed-size
sorted insert buffer.  Lookups find the owning segment by predecessor search
over segment start keys, interpolate a predicted position, and binary-search
only the window the error bound allows.  Inserts land in the owning node's
buffer; a full buffer triggers a merge of data and buffer followed by
re-segmentation of just that node.

The user-facing error guarantee is split between the segment data and the
buffer: segmentation runs at ``error - buffer_size`` so that a lookup that
scans the window plus the buffer still honors ``error``.

Concurrency: lookups, range scans and stats may run concurrently with each
other.  Inserts require exclusive access (single writer, no readers during a
split); the structure itself takes no locks.
"""

from __future__ import annotations

import bisect
import math
import struct
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import (
    ConfigError,
    ConstraintError,
    EmptyInputError,
    MalformedInputError,
)
from .segmentation import Segment, shrinking_cone

CLUSTERED = "clustered"
NON_CLUSTERED = "non-clustered"

_MAGIC = b"PLSEGIDX"
_VERSION = 1
_HEADER = struct.Struct("<8sIBBHQQQQ")

# Bytes per inner-map entry (8-byte key + 8-byte reference) and per segment
# descriptor (start key, slope, data pointer), mirroring the size-model
# accounting so measured and estimated bytes compare like with like.
_INNER_ENTRY_BYTES = 16
_SEGMENT_DESCRIPTOR_BYTES = 24


class Entry(NamedTuple):
    key: float
    payload: int


@dataclass(frozen=True)
class IndexConfig:
    """Tuning knobs for the index.

    ``error`` is the user-facing lookup guarantee.  ``buffer_size`` defaults
    to ``error // 2``; it must stay below ``error`` when ``error > 0`` so the
    segmentation budget ``error - buffer_size`` remains non-negative.
    ``fanout_b`` only feeds cost accounting, not the runtime structure.
    """

    error: int
    buffer_size: int | None = None
    fanout_b: int = 16
    layout: str = CLUSTERED

    def __post_init__(self):
        if self.error < 0:
            raise ConfigError(f"error must be >= 0, got {self.error}")
        if self.buffer_size is None:
            object.__setattr__(self, "buffer_size", self.error // 2)
        if self.buffer_size < 0:
            raise ConfigError(f"buffer_size must be >= 0, got {self.buffer_size}")
        if self.error > 0 and self.buffer_size >= self.error:
            raise ConfigError(
                f"buffer_size ({self.buffer_size}) must be < error ({self.error})"
            )
        if self.error == 0 and self.buffer_size != 0:
            raise ConfigError("error 0 leaves no room for a buffer")
        if self.fanout_b < 2:
            raise ConfigError(f"fanout_b must be >= 2, got {self.fanout_b}")
        if self.layout not in (CLUSTERED, NON_CLUSTERED):
            raise ConfigError(f"layout must be clustered or non-clustered: {self.layout}")

    @property
    def seg_error(self) -> int:
        """Error budget handed to the segmentation process."""
        return self.error - self.buffer_size


def search_window(pred: float, half: int, n: int) -> tuple[int, int]:
    """Integer window [lo, hi] of candidate positions around a prediction.

    Covers at most ``2 * half + 1`` slots and is clamped to ``[0, n - 1]``.
    """
    lo = math.ceil(pred - half)
    hi = math.floor(pred + half)
    if lo < 0:
        lo = 0
    if hi > n - 1:
        hi = n - 1
    return lo, hi


class SegmentNode:
    """One segment plus its data arrays and insert buffer."""

    __slots__ = ("start_key", "slope", "keys", "payloads", "buf_keys", "buf_payloads")

    def __init__(self, start_key, slope, keys, payloads):
        self.start_key = start_key
        self.slope = slope
        self.keys = keys  # sorted list of floats
        self.payloads = payloads
        self.buf_keys: list[float] = []
        self.buf_payloads: list[int] = []

    @property
    def n_locs(self) -> int:
        return len(self.keys)

    def segment(self) -> Segment:
        return Segment(
            start_key=self.start_key,
            start_loc=0,
            slope=self.slope,
            n_locs=len(self.keys),
            end_key=self.keys[-1],
        )


@dataclass
class IndexStats:
    n_segments: int
    n_entries: int
    buffered_entries: int
    measured_bytes: int
    fill: float = 1.0


@dataclass
class SplitEvent:
    """Record of one buffer overflow, kept when ``track_splits`` is on."""

    start_key: float
    n_new_segments: int
    merged_entries: int
    node_index: int = 0
    new_nodes: list = field(default_factory=list)


class SegmentIndex:
    """Error-bounded approximate index over sorted entries.

    Build with :meth:`bulk_load` (sequence of ``(key, payload)`` pairs) or
    :meth:`from_arrays`.  The clustered layout stores positions as payloads
    and rejects duplicate keys; the non-clustered layout stores opaque row
    identifiers and permits duplicates.
    """

    def __init__(self, config: IndexConfig):
        self.config = config
        self._starts: list[float] = []
        self._nodes: list[SegmentNode] = []
        self._half = config.seg_error
        self.count = 0
        self.n_splits = 0
        self.track_splits = False
        self.split_log: list[SplitEvent] = []

    # -- construction -----------------------------------------------------

    @classmethod
    def bulk_load(cls, entries, config: IndexConfig) -> "SegmentIndex":
        arr = np.asarray(entries, dtype=np.float64)
        if arr.size == 0:
            raise EmptyInputError("cannot bulk load zero entries")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise MalformedInputError(
                f"expected (key, payload) pairs, got shape {arr.shape}"
            )
        return cls.from_arrays(arr[:, 0], arr[:, 1].astype(np.int64), config)

    @classmethod
    def from_arrays(cls, keys, payloads=None, config: IndexConfig | None = None) -> "SegmentIndex":
        if config is None:
            raise ConfigError("config is required")
        keys = np.asarray(keys, dtype=np.float64)
        if keys.size == 0:
            raise EmptyInputError("cannot bulk load zero entries")
        if payloads is None:
            payloads = np.arange(keys.size, dtype=np.int64)
        else:
            payloads = np.asarray(payloads, dtype=np.int64)
            if payloads.shape != keys.shape:
                raise MalformedInputError("keys and payloads must have equal length")
        if keys.size > 1:
            dk = np.diff(keys)
            if np.any(dk < 0):
                raise MalformedInputError("entries must be sorted by key")
            if config.layout == CLUSTERED and np.any(dk == 0):
                raise ConstraintError("duplicate keys are not allowed in a clustered index")

        tree = cls(config)
        pts = np.column_stack([keys, np.arange(keys.size, dtype=np.float64)])
        segs = shrinking_cone(pts, config.seg_error)
        key_list = keys.tolist()
        payload_list = payloads.tolist()
        for seg in segs:
            a = seg.start_loc
            b = a + seg.n_locs
            node = SegmentNode(seg.start_key, seg.slope, key_list[a:b], payload_list[a:b])
            tree._starts.append(seg.start_key)
            tree._nodes.append(node)
        tree.count = int(keys.size)
        return tree

    # -- lookups ----------------------------------------------------------

    def _owner(self, key: float) -> int:
        """Index of the segment whose key range contains ``key``.

        Keys below the first start key map to the first segment.
        """
        i = bisect.bisect_right(self._starts, key) - 1
        return 0 if i < 0 else i

    def _data_lower_bound(self, node: SegmentNode, key: float) -> int:
        """Position of the first data entry >= key.

        The error bound confines the answer to the interpolation window; one
        guard slot on each side absorbs float evaluation of the prediction.
        """
        n = len(node.keys)
        pred = (key - node.start_key) * node.slope
        lo, hi = search_window(pred, self.config.seg_error, n)
        a = lo - 1
        if a < 0:
            a = 0
        elif a > n:
            a = n
        b = hi + 2
        if b > n:
            b = n
        elif b < a:
            b = a
        return bisect.bisect_left(node.keys, key, a, b)

    def lookup(self, key: float):
        """Payload of the first entry with ``key``, or None when absent."""
        if not self._nodes:
            return None
        i = bisect.bisect_right(self._starts, key) - 1
        if i < 0:
            i = 0
        node = self._nodes[i]
        keys = node.keys
        n = len(keys)
        # Inlined window probe: int() truncation brackets the ceil/floor
        # window of search_window with at most one extra slot per side.
        pred = (key - node.start_key) * node.slope
        half = self._half
        a = int(pred) - half - 1
        if a < 0:
            a = 0
        elif a > n:
            a = n
        b = int(pred) + half + 2
        if b > n:
            b = n
        elif b < a:
            b = a
        pos = bisect.bisect_left(keys, key, a, b)
        if pos < n and keys[pos] == key:
            # Walk back over segments that continue a duplicate run so the
            # lowest-position match wins.
            while pos == 0 and i > 0:
                prev = self._nodes[i - 1]
                j = bisect.bisect_left(prev.keys, key)
                if j == len(prev.keys):
                    break
                i, node, pos = i - 1, prev, j
            return node.payloads[pos]
        bkeys = node.buf_keys
        if bkeys:
            j = bisect.bisect_left(bkeys, key)
            if j < len(bkeys) and bkeys[j] == key:
                return node.buf_payloads[j]
        return None

    def range(self, lo: float, hi: float) -> list[Entry]:
        """All entries with lo <= key <= hi in global key order."""
        if lo > hi:
            raise MalformedInputError(f"malformed range: {lo} > {hi}")
        out: list[Entry] = []
        if not self._nodes:
            return out
        i = self._owner(lo)
        # A duplicate run equal to lo may begin in an earlier segment.
        while i > 0 and self._nodes[i - 1].keys[-1] >= lo:
            i -= 1
        for j in range(i, len(self._nodes)):
            node = self._nodes[j]
            if j > i and node.start_key > hi:
                break
            if not self._emit_node_range(node, lo, hi, out):
                break
        return out

    def _emit_node_range(self, node, lo, hi, out) -> bool:
        """Merge-iterate one node's data and buffer; False once keys pass hi."""
        keys = node.keys
        payloads = node.payloads
        bkeys = node.buf_keys
        bpayloads = node.buf_payloads
        di = self._data_lower_bound(node, lo) if keys[0] < lo else 0
        bi = bisect.bisect_left(bkeys, lo)
        n, bn = len(keys), len(bkeys)
        while di < n or bi < bn:
            if di < n and (bi >= bn or keys[di] <= bkeys[bi]):
                k = keys[di]
                if k > hi:
                    return False
                out.append(Entry(k, payloads[di]))
                di += 1
            else:
                k = bkeys[bi]
                if k > hi:
                    return False
                out.append(Entry(k, bpayloads[bi]))
                bi += 1
        return True

    def items(self) -> Iterator[Entry]:
        """All live entries in global key order."""
        for node in self._nodes:
            di, bi = 0, 0
            keys, bkeys = node.keys, node.buf_keys
            n, bn = len(keys), len(bkeys)
            while di < n or bi < bn:
                if di < n and (bi >= bn or keys[di] <= bkeys[bi]):
                    yield Entry(keys[di], node.payloads[di])
                    di += 1
                else:
                    yield Entry(bkeys[bi], node.buf_payloads[bi])
                    bi += 1

    # -- inserts ----------------------------------------------------------

    def insert(self, key: float, payload: int) -> None:
        """Add an entry to its owning segment's buffer, splitting when full."""
        if not self._nodes:
            raise EmptyInputError("insert requires a bulk-loaded index")
        key = float(key)
        if self.config.layout == CLUSTERED and self.lookup(key) is not None:
            raise ConstraintError(f"duplicate key {key} in clustered index")
        i = self._owner(key)
        node = self._nodes[i]
        j = bisect.bisect_right(node.buf_keys, key)
        node.buf_keys.insert(j, key)
        node.buf_payloads.insert(j, int(payload))
        self.count += 1
        if len(node.buf_keys) >= max(self.config.buffer_size, 1):
            self._split(i)

    def _split(self, i: int) -> None:
        """Merge node i's buffer into its data and re-segment the result."""
        node = self._nodes[i]
        data_keys = np.asarray(node.keys, dtype=np.float64)
        ins = np.searchsorted(data_keys, node.buf_keys, side="right")
        merged_keys = np.insert(data_keys, ins, node.buf_keys)
        merged_payloads = np.insert(
            np.asarray(node.payloads, dtype=np.int64), ins, node.buf_payloads
        )
        pts = np.column_stack(
            [merged_keys, np.arange(merged_keys.size, dtype=np.float64)]
        )
        segs = shrinking_cone(pts, self.config.seg_error)
        key_list = merged_keys.tolist()
        payload_list = merged_payloads.tolist()
        new_nodes = []
        for seg in segs:
            a = seg.start_loc
            b = a + seg.n_locs
            new_nodes.append(
                SegmentNode(seg.start_key, seg.slope, key_list[a:b], payload_list[a:b])
            )
        self._nodes[i : i + 1] = new_nodes
        self._starts[i : i + 1] = [n.start_key for n in new_nodes]
        self.n_splits += 1
        if self.track_splits:
            self.split_log.append(
                SplitEvent(
                    start_key=new_nodes[0].start_key,
                    n_new_segments=len(new_nodes),
                    merged_entries=len(key_list),
                    node_index=i,
                    new_nodes=new_nodes,
                )
            )

    def flush(self) -> None:
        """Merge every non-empty buffer into its segment data."""
        i = 0
        while i < len(self._nodes):
            if self._nodes[i].buf_keys:
                self._split(i)
            i += 1

    # -- stats and serialization ------------------------------------------

    def stats(self) -> IndexStats:
        s = len(self._nodes)
        buffered = sum(len(n.buf_keys) for n in self._nodes)
        measured = s * (_INNER_ENTRY_BYTES + _SEGMENT_DESCRIPTOR_BYTES)
        return IndexStats(
            n_segments=s,
            n_entries=self.count,
            buffered_entries=buffered,
            measured_bytes=measured,
        )

    def save(self, path) -> None:
        """Serialize to a flat file; buffers are flushed first.

        Layout (all fields little-endian): header ``magic(8) version(u32)
        layout(u8) key_type(u8) reserved(u16) error(u64) buffer_size(u64)
        segment_count(u64) entry_count(u64)``, then one 32-byte record per
        segment ``start_key(f64) start_loc(u64) slope(f64) n_locs(u64)``,
        then the key array (f64) and the payload array (i64).
        """
        self.flush()
        cfg = self.config
        layout_code = 0 if cfg.layout == CLUSTERED else 1
        with open(path, "wb") as fh:
            fh.write(
                _HEADER.pack(
                    _MAGIC,
                    _VERSION,
                    layout_code,
                    0,  # key_type: f64
                    0,
                    cfg.error,
                    cfg.buffer_size,
                    len(self._nodes),
                    self.count,
                )
            )
            start_loc = 0
            for node in self._nodes:
                fh.write(
                    struct.pack(
                        "<dQdQ", node.start_key, start_loc, node.slope, len(node.keys)
                    )
                )
                start_loc += len(node.keys)
            all_keys = np.concatenate(
                [np.asarray(n.keys, dtype="<f8") for n in self._nodes]
            )
            all_payloads = np.concatenate(
                [np.asarray(n.payloads, dtype="<i8") for n in self._nodes]
            )
            fh.write(all_keys.tobytes())
            fh.write(all_payloads.tobytes())

    @classmethod
    def load(cls, path) -> "SegmentIndex":
        with open(path, "rb") as fh:
            raw = fh.read(_HEADER.size)
            if len(raw) < _HEADER.size:
                raise MalformedInputError("index file truncated")
            magic, version, layout_code, key_type, _r, error, buf, nseg, nent = (
                _HEADER.unpack(raw)
            )
            if magic != _MAGIC:
                raise MalformedInputError(f"bad magic {magic!r}")
            if version != _VERSION:
                raise MalformedInputError(f"unsupported index version {version}")
            if key_type != 0:
                raise MalformedInputError(f"unsupported key type {key_type}")
            layout = CLUSTERED if layout_code == 0 else NON_CLUSTERED
            config = IndexConfig(error=int(error), buffer_size=int(buf), layout=layout)
            tree = cls(config)
            seg_meta = [struct.unpack("<dQdQ", fh.read(32)) for _ in range(nseg)]
            keys = np.frombuffer(fh.read(8 * nent), dtype="<f8")
            payloads = np.frombuffer(fh.read(8 * nent), dtype="<i8")
        key_list = keys.tolist()
        payload_list = payloads.tolist()
        for start_key, start_loc, slope, n_locs in seg_meta:
            a = int(start_loc)
            b = a + int(n_locs)
            tree._starts.append(start_key)
            tree._nodes.append(
                SegmentNode(start_key, slope, key_list[a:b], payload_list[a:b])
            )
        tree.count = int(nent)
        return tree

    # -- integrity (test support) ------------------------------------------

    def check_integrity(self) -> None:
        """Assert structural invariants; raises AssertionError on violation."""
        from .segmentation import points_from_keys, validate_segment

        assert len(self._starts) == len(self._nodes)
        total = 0
        prev_key = None
        for start, node in zip(self._starts, self._nodes):
            assert start == node.start_key
            assert node.keys, "empty segment node"
            ks = node.keys
            assert all(ks[t] <= ks[t + 1] for t in range(len(ks) - 1))
            if prev_key is not None:
                assert prev_key <= node.keys[0]
            prev_key = node.keys[-1]
            assert validate_segment(
                points_from_keys(ks), node.segment(), self.config.seg_error
            )
            assert len(node.buf_keys) < max(self.config.buffer_size, 1)
            bk = node.buf_keys
            assert all(bk[t] <= bk[t + 1] for t in range(len(bk) - 1))
            total += len(ks) + len(bk)
        assert total == self.count, f"count mismatch: {total} != {self.count}"
