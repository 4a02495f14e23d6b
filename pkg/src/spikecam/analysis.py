"""Inter-spike-interval statistics over streams: histograms and cluster splits."""

from collections import namedtuple

import numpy as np

from .validation import check_coords

ClusterSplit = namedtuple(
    "ClusterSplit", "threshold lower_mean upper_mean lower_count upper_count"
)


def pixel_isis(stream, x, y):
    """All completed inter-spike intervals of one pixel, in firing order."""
    check_coords(stream, x, y)
    ticks = stream.spike_ticks(x, y)
    return np.diff(ticks)


def pooled_isis(stream, region=None):
    """Concatenated ISIs of every pixel in a region (default: whole frame).

    ``region`` is (x0, y0, x1, y1), half-open on the right/bottom.
    """
    if region is None:
        region = (0, 0, stream.width, stream.height)
    x0, y0, x1, y1 = region
    if not (0 <= x0 < x1 <= stream.width and 0 <= y0 < y1 <= stream.height):
        raise ValueError(f"region {region} out of range or empty")
    indptr, spike_ticks = stream.spike_index()
    if spike_ticks.size < 2:
        return np.empty(0, dtype=np.int64)
    diffs = np.diff(spike_ticks)
    # drop differences that span a pixel boundary in the CSR layout
    keep = np.ones(diffs.shape[0], dtype=bool)
    boundaries = indptr[1:-1] - 1
    keep[boundaries[(boundaries >= 0) & (boundaries < diffs.shape[0])]] = False
    if region != (0, 0, stream.width, stream.height):
        pixel_of = np.repeat(
            np.arange(stream.num_pixels, dtype=np.int64), np.diff(indptr)
        )[1:]
        xs = pixel_of % stream.width
        ys = pixel_of // stream.width
        keep &= (xs >= x0) & (xs < x1) & (ys >= y0) & (ys < y1)
    return diffs[keep]


def isi_histogram(isis, max_isi=None):
    """Histogram of integer ISIs; returns (values, counts) for 1..max_isi."""
    isis = np.asarray(isis)
    if isis.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if max_isi is None:
        max_isi = int(isis.max())
    counts = np.bincount(isis, minlength=max_isi + 1)[1 : max_isi + 1]
    return np.arange(1, max_isi + 1, dtype=np.int64), counts.astype(np.int64)


def two_cluster_split(isis):
    """Split a bimodal ISI population at the valley between its two modes.

    Scans every candidate cutoff and keeps the one minimizing the summed
    within-cluster variance (weighted), which lands in the valley for
    well-separated modes.  Intervals <= threshold form the fast (bright)
    cluster.  Returns None when fewer than two distinct values exist.
    """
    isis = np.asarray(isis, dtype=np.float64)
    if isis.size == 0 or np.unique(isis).size < 2:
        return None
    values = np.unique(isis)
    best = None
    for cut in values[:-1]:
        lower = isis[isis <= cut]
        upper = isis[isis > cut]
        score = lower.size * lower.var() + upper.size * upper.var()
        if best is None or score < best[0]:
            best = (
                score,
                ClusterSplit(
                    threshold=float(cut),
                    lower_mean=float(lower.mean()),
                    upper_mean=float(upper.mean()),
                    lower_count=int(lower.size),
                    upper_count=int(upper.size),
                ),
            )
    return best[1]
