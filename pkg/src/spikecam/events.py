"""Conversion of spike streams into DVS-style On/Off change events.

A pixel's intensity is inversely proportional to its inter-spike interval,
so a log-intensity change test reduces to comparing log intervals: an event
fires when ``|log(ref_isi) - log(new_isi)| >= threshold``.  Like a real
event camera, the reference is the level at the *last emitted event* (the
first completed interval seeds it), not the previous sample, so slow drifts
still accumulate into events.  The threshold is in natural-log units.
"""

import numpy as np

from . import _kernels
from .validation import check_positive, check_stream

EVENT_DTYPE = np.dtype(
    [("tick", "<i8"), ("x", "<i4"), ("y", "<i4"), ("polarity", "<i1")]
)

POLARITY_ON = 1
POLARITY_OFF = -1


def spikes_to_events(stream, threshold=0.3):
    """Convert a spike stream into an ordered array of change events.

    Per pixel, completed inter-spike intervals are walked in order; the
    first interval initializes the reference, and each later interval whose
    log differs from the reference by at least ``threshold`` emits an event
    at the closing spike's tick -- polarity On if the interval shrank
    (intensity rose), Off if it grew -- and becomes the new reference.

    Returns a structured array (EVENT_DTYPE) sorted by (tick, y, x).
    """
    check_stream(stream)
    check_positive("threshold", threshold)
    indptr, spike_ticks = stream.spike_index()
    ticks, pixels, pols = _kernels.collect_events(
        indptr, spike_ticks, float(threshold)
    )
    events = np.empty(ticks.shape[0], dtype=EVENT_DTYPE)
    events["tick"] = ticks
    events["x"] = (pixels % stream.width).astype(np.int32)
    events["y"] = (pixels // stream.width).astype(np.int32)
    events["polarity"] = pols
    order = np.lexsort((events["x"], events["y"], events["tick"]))
    return events[order]


def write_events_csv(events, sink):
    """Write events as CSV rows ``tick,x,y,polarity`` (polarity 1 or -1)."""
    sink.write("tick,x,y,polarity\n")
    for ev in events:
        sink.write(f"{ev['tick']},{ev['x']},{ev['y']},{ev['polarity']}\n")


def read_events_csv(source):
    """Read events written by :func:`write_events_csv`."""
    header = source.readline().strip()
    if header != "tick,x,y,polarity":
        raise ValueError(f"unexpected events CSV header: {header!r}")
    rows = [line.strip().split(",") for line in source if line.strip()]
    events = np.empty(len(rows), dtype=EVENT_DTYPE)
    for i, (tick, x, y, pol) in enumerate(rows):
        events[i] = (int(tick), int(x), int(y), int(pol))
    return events


def render_event_frame(events, width, height, background=128):
    """Draw events on a gray canvas: On pixels white, Off pixels black.

    Events are drawn in array order, so later events win at contested
    pixels.
    """
    frame = np.full((height, width), background, dtype=np.uint8)
    for ev in events:
        frame[ev["y"], ev["x"]] = 255 if ev["polarity"] > 0 else 0
    return frame


def render_event_frames(events, width, height, num_ticks, bin_size=1):
    """Yield (start_tick, frame) pairs binning events every bin_size ticks."""
    check_positive("bin_size", bin_size)
    events = np.sort(events, order=["tick", "y", "x"]) if events.size else events
    for start in range(0, num_ticks, bin_size):
        mask = (events["tick"] >= start) & (events["tick"] < start + bin_size)
        yield start, render_event_frame(events[mask], width, height)
