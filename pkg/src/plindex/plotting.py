"""Figure rendering for benchmark and cost reports.

All functions write a PNG next to the delimited report output and return the
path.  The Agg backend keeps everything headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = {
    "segment_index": dict(color="tab:blue", marker="o"),
    "fixed_paging": dict(color="tab:orange", marker="s"),
    "full_index": dict(color="tab:green", marker="^"),
    "binary_search": dict(color="tab:red", marker="x"),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def plot_lookup_latency(report, path):
    """Mean lookup latency against index bytes, one line per structure."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_structure: dict[str, list[tuple[float, float]]] = {}
    for row in report.rows:
        if row.get("mean_ns") in (None, ""):
            continue
        bytes_ = row.get("index_bytes")
        if bytes_ in ("", None):
            continue
        by_structure.setdefault(row["structure"], []).append(
            (float(bytes_), float(row["mean_ns"]))
        )
    for name, pts in by_structure.items():
        pts.sort()
        xs = [max(p[0], 1) for p in pts]
        ys = [p[1] for p in pts]
        style = _STYLE.get(name, {})
        if len(pts) == 1:
            ax.scatter(xs, ys, label=name, **style)
        else:
            ax.plot(xs, ys, label=name, **style)
    ax.set_xscale("log")
    ax.set_xlabel("index bytes")
    ax.set_ylabel("mean lookup latency (ns)")
    ax.set_title(f"lookup latency vs index size ({report.meta.get('suite', '')})")
    ax.legend()
    return _save(fig, path)


def plot_size_vs_error(rows, path, value_key="index_bytes"):
    """Index bytes per structure as the error threshold / page size grows."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_structure: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        e = row.get("error_or_page_size", row.get("error"))
        if e in ("", None) or row.get(value_key) in ("", None):
            continue
        by_structure.setdefault(row.get("structure", "segment_index"), []).append(
            (float(e), float(row[value_key]))
        )
    for name, pts in by_structure.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=name,
                **_STYLE.get(name, {}))
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("error threshold / page size")
    ax.set_ylabel(value_key)
    ax.set_title("index size vs error threshold")
    ax.legend()
    return _save(fig, path)


def plot_cost_validation(rows, path):
    """Estimated versus measured latency and size across error thresholds."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    es = [r["error"] for r in rows]
    ax1.plot(es, [r["estimated_latency_ns"] for r in rows], "o-", label="estimated")
    if any("measured_latency_ns" in r for r in rows):
        ax1.plot(es, [r.get("measured_latency_ns") for r in rows], "s--", label="measured")
    ax1.set_xscale("log")
    ax1.set_xlabel("error threshold")
    ax1.set_ylabel("lookup latency (ns)")
    ax1.set_title("latency model")
    ax1.legend()
    ax2.plot(es, [r["estimated_size_bytes"] for r in rows], "o-", label="estimated")
    if any("measured_size_bytes" in r for r in rows):
        ax2.plot(es, [r.get("measured_size_bytes") for r in rows], "s--", label="measured")
    ax2.set_xscale("log")
    ax2.set_yscale("log")
    ax2.set_xlabel("error threshold")
    ax2.set_ylabel("index bytes")
    ax2.set_title("size model")
    ax2.legend()
    return _save(fig, path)


def plot_fill_factor(rows, path):
    """Insert throughput as a function of the per-segment buffer size."""
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = sorted((int(r["buffer_size"]), float(r["insert_ops_s"])) for r in rows)
    ax.plot([p[0] for p in pts], [p[1] for p in pts], "o-")
    ax.set_xlabel("buffer size (entries)")
    ax.set_ylabel("insert throughput (ops/s)")
    ax.set_title(f"insert throughput vs buffer size (error={rows[0]['error']})")
    return _save(fig, path)


def plot_segmentation(keys, segments, path, max_points=20_000):
    """Key-to-location scatter with the fitted segment lines on top."""
    keys = np.asarray(keys, dtype=np.float64)
    locs = np.arange(keys.size)
    stride = max(1, keys.size // max_points)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(keys[::stride], locs[::stride], s=4, alpha=0.4, label="data")
    for seg in segments:
        x = [seg.start_key, seg.end_key]
        y = [seg.start_loc, seg.interpolate(seg.end_key)]
        ax.plot(x, y, color="tab:red", linewidth=1.2)
    ax.set_xlabel("key")
    ax.set_ylabel("location")
    ax.set_title(f"{len(segments)} segments")
    ax.legend(loc="best")
    return _save(fig, path)
