"""Independent reference implementations used to compute expected values.

Pure Python, step-by-step, no shared code with the package internals.
"""


def accumulate_spike_ticks(intensities, threshold=255.0, reset_mode="drain"):
    """Tick indices at which a single pixel fires, by direct accumulation."""
    acc = 0.0
    ticks = []
    for t, intensity in enumerate(intensities):
        acc += intensity
        if acc >= threshold:
            ticks.append(t)
            acc = 0.0 if reset_mode == "drain" else acc - threshold
    return ticks


def constant_spike_ticks(intensity, num_ticks, threshold=255.0, reset_mode="drain"):
    return accumulate_spike_ticks([intensity] * num_ticks, threshold, reset_mode)


def isis_of(ticks):
    return [b - a for a, b in zip(ticks, ticks[1:])]


def window_count(ticks, t, w):
    """Spikes with tick in (t - w, t]."""
    return sum(1 for s in ticks if t - w < s <= t)


def last_isi(ticks, t):
    """Interval between the last two spikes at or before t, or None."""
    upto = [s for s in ticks if s <= t]
    if len(upto) < 2:
        return None
    return upto[-1] - upto[-2]
