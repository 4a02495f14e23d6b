"""Numba kernels for the packed-bitplane hot paths.

Planes are stored LSB-first: pixel p = y*width + x lives in byte p >> 3 at
bit p & 7.  All kernels operate on the packed (num_ticks, plane_bytes)
uint8 array directly so full frames never have to be unpacked.
"""

import numpy as np
from numba import config as _numba_config
from numba import njit, prange

# prefer OpenMP so numba never probes the (possibly too old) TBB runtime
_numba_config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# chunk count for prange work splitting; oversubscribe cores a little so
# uneven byte columns balance out
_N_CHUNKS = 16


@njit(parallel=True, cache=True)
def window_counts(cols, n_pixels):
    """Per-pixel spike counts over a window of planes.

    ``cols`` is the window block transposed to (plane_bytes, window_len) and
    contiguous, so each pixel-byte's history is a linear scan.
    """
    n_bytes, window_len = cols.shape
    counts = np.zeros(n_pixels, dtype=np.uint32)
    for b in prange(n_bytes):
        c0 = np.uint32(0); c1 = np.uint32(0); c2 = np.uint32(0); c3 = np.uint32(0)
        c4 = np.uint32(0); c5 = np.uint32(0); c6 = np.uint32(0); c7 = np.uint32(0)
        for i in range(window_len):
            v = cols[b, i]
            if v:
                c0 += v & 1
                c1 += (v >> 1) & 1
                c2 += (v >> 2) & 1
                c3 += (v >> 3) & 1
                c4 += (v >> 4) & 1
                c5 += (v >> 5) & 1
                c6 += (v >> 6) & 1
                c7 += (v >> 7) & 1
        p = b * 8
        if p + 8 <= n_pixels:
            counts[p] = c0
            counts[p + 1] = c1
            counts[p + 2] = c2
            counts[p + 3] = c3
            counts[p + 4] = c4
            counts[p + 5] = c5
            counts[p + 6] = c6
            counts[p + 7] = c7
        else:
            # tail byte whose high bits fall outside the pixel grid
            n = n_pixels - p
            if n > 0:
                counts[p] = c0
            if n > 1:
                counts[p + 1] = c1
            if n > 2:
                counts[p + 2] = c2
            if n > 3:
                counts[p + 3] = c3
            if n > 4:
                counts[p + 4] = c4
            if n > 5:
                counts[p + 5] = c5
            if n > 6:
                counts[p + 6] = c6
            if n > 7:
                counts[p + 7] = c7
    return counts


@njit(parallel=True, cache=True)
def last_two_spikes(planes, t, n_pixels):
    """Latest two spike ticks at or before t for every pixel.

    Returns (last, prev) int64 arrays, -1 where fewer spikes exist.  Scans
    backward from t and stops early once every pixel in a chunk has two.
    """
    n_bytes = planes.shape[1]
    last = np.full(n_pixels, -1, dtype=np.int64)
    prev = np.full(n_pixels, -1, dtype=np.int64)
    for chunk in prange(_N_CHUNKS):
        b_lo = n_bytes * chunk // _N_CHUNKS
        b_hi = n_bytes * (chunk + 1) // _N_CHUNKS
        p_lo = b_lo * 8
        p_hi = min(b_hi * 8, n_pixels)
        remaining = p_hi - p_lo  # pixels still missing their second spike
        tt = t
        while tt >= 0 and remaining > 0:
            for b in range(b_lo, b_hi):
                v = planes[tt, b]
                if v:
                    base = b * 8
                    for j in range(8):
                        if (v >> j) & 1:
                            p = base + j
                            if p < n_pixels:
                                if last[p] < 0:
                                    last[p] = tt
                                elif prev[p] < 0:
                                    prev[p] = tt
                                    remaining -= 1
            tt -= 1
    return last, prev


@njit(cache=True)
def collect_events(indptr, spike_ticks, log_threshold):
    """Walk each pixel's spike train and emit DVS-style change events.

    ``spike_ticks`` holds all pixels' spike ticks concatenated in pixel
    order, delimited by ``indptr`` (CSR layout).  The first completed
    interval sets the per-pixel reference; later intervals whose log ratio
    against the reference reaches ``log_threshold`` emit an event at the
    closing spike's tick and replace the reference.

    Returns (ticks, pixels, polarities) arrays; polarity is +1 when the
    interval shrank (intensity rose) and -1 when it grew.
    """
    n_pixels = indptr.shape[0] - 1
    max_events = spike_ticks.shape[0]
    out_ticks = np.empty(max_events, dtype=np.int64)
    out_pixels = np.empty(max_events, dtype=np.int64)
    out_pols = np.empty(max_events, dtype=np.int8)
    n_out = 0
    for p in range(n_pixels):
        lo = indptr[p]
        hi = indptr[p + 1]
        if hi - lo < 3:
            continue  # need two completed intervals for one comparison
        ref = np.log(float(spike_ticks[lo + 1] - spike_ticks[lo]))
        for i in range(lo + 2, hi):
            cur = np.log(float(spike_ticks[i] - spike_ticks[i - 1]))
            diff = ref - cur
            if diff >= log_threshold or -diff >= log_threshold:
                out_ticks[n_out] = spike_ticks[i]
                out_pixels[n_out] = p
                out_pols[n_out] = 1 if diff > 0 else -1
                n_out += 1
                ref = cur
    return out_ticks[:n_out], out_pixels[:n_out], out_pols[:n_out]
