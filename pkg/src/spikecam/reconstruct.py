"""Texture decoders for spike streams.

Three reconstruction strategies, all pure functions of (stream, parameters):

* :func:`tfi_frame`  -- each pixel's latest inter-spike interval maps to
  intensity as range/interval; fastest response, two spikes suffice.
* :func:`tfp_frame`  -- spike counts over a trailing window map to intensity
  as range*count/window; smoother but lags by the window length.
* adaptive decoder -- per-pixel response-kernel neurons with a dynamic
  firing threshold; after convergence the threshold matrix itself encodes
  the texture (:func:`tfa_step`, :func:`tfa_texture`).
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_choice, check_positive, check_tick

# dynamic thresholds are clamped here to avoid the all-dark runaway under
# zero input
THRESHOLD_FLOOR = 1e-6

KERNEL_CUTOFF = 1e-4

COUNT_INPUT = "input"
COUNT_OUTPUT = "output"


def _quantize(values, dynamic_range):
    """Round half-up and clamp to [0, dynamic_range]; uint8 when it fits."""
    out = np.floor(np.asarray(values, dtype=np.float64) + 0.5)
    np.clip(out, 0, dynamic_range, out=out)
    return out.astype(np.uint8 if dynamic_range <= 255 else np.uint16)


def tfi_frame(stream, t, dynamic_range=255):
    """Reconstruct the frame at tick t from each pixel's latest interval.

    Pixel value is ``dynamic_range / isi`` using the interval between the
    two most recent spikes at or before t, rounded half-up.  Pixels without
    a completed interval yet are 0 (honest missing data, no extrapolation).
    """
    t = check_tick(stream, t)
    last, prev = stream.last_two_spikes(t)
    # intervals range over 1..t; quantize range/interval through a lookup
    # table, with entry 0 holding the no-interval fallback
    levels = np.zeros(t + 2, dtype=np.uint8 if dynamic_range <= 255 else np.uint16)
    intervals = np.arange(1, t + 2, dtype=np.float64)
    levels[1:] = _quantize(dynamic_range / intervals, dynamic_range)
    delta = np.where(prev >= 0, last - prev, 0)
    return levels[delta]


def tfp_frame(stream, t, window, dynamic_range=255):
    """Reconstruct the frame at tick t from spike counts in a trailing window.

    Pixel value is ``dynamic_range * count / window`` where count is the
    number of spikes in (t - window, t], clipped at tick 0.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    t = check_tick(stream, t)
    counts = stream.count_window_frame(t, window)
    # counts take at most window+1 values; quantize through a lookup table
    levels = _quantize(
        dynamic_range * np.arange(window + 1, dtype=np.float64) / window,
        dynamic_range,
    )
    return levels[counts]


def gamma_encode(frame, dynamic_range=255, gamma=2.2):
    """Display gamma mapping P -> range * (P/range)^(1/gamma); 0 disables."""
    if gamma == 0:
        return np.asarray(frame)
    check_positive("gamma", gamma)
    scaled = np.asarray(frame, dtype=np.float64) / dynamic_range
    return _quantize(dynamic_range * scaled ** (1.0 / gamma), dynamic_range)


# ---------------------------------------------------------------------------
# adaptive-threshold decoder
# ---------------------------------------------------------------------------


def default_kernel_horizon(tau, delay=0.0):
    """Ticks after which the response kernel drops below KERNEL_CUTOFF.

    Found numerically: the smallest lag past the kernel peak where the
    response stays below the cutoff forever after.
    """
    d = int(np.ceil(delay + tau))  # peak location
    while _kernel_value(float(d + 1), tau, delay) >= KERNEL_CUTOFF:
        d += 1
    return d


def _kernel_value(lag, tau, delay):
    x = (lag - delay) / tau
    return np.where(x < 0, 0.0, x * np.exp(1.0 - x))


@dataclass(frozen=True)
class TfaConfig:
    """Adaptive decoder parameters.

    Parameters
    ----------
    tau : float
        Response-kernel time constant in ticks; the kernel peaks at
        ``delay + tau`` with value 1.
    delay : float
        Kernel onset delay in ticks (0 by default).
    count_window : int
        Trailing window length, in ticks, for the spike counts that drive
        threshold adaptation.
    initial_threshold : float
        Starting value of every pixel's firing threshold.
    kernel_horizon : int, optional
        Truncation lag for the kernel sum; contributions older than this
        are dropped.  Defaults to the lag where the kernel falls below
        ``KERNEL_CUTOFF``.
    count_source : str
        Which train the adaptation counts: ``"output"`` (the model's own
        firings, default) or ``"input"`` (the stream's spikes).
    """

    tau: float = 8.0
    delay: float = 0.0
    count_window: int = 256
    initial_threshold: float = 1.0
    kernel_horizon: int = None
    count_source: str = COUNT_OUTPUT

    def __post_init__(self):
        check_positive("tau", self.tau)
        if self.delay < 0:
            raise ValueError(f"delay must be >= 0, got {self.delay}")
        if self.count_window < 1:
            raise ValueError(f"count_window must be >= 1, got {self.count_window}")
        check_positive("initial_threshold", self.initial_threshold)
        check_choice("count_source", self.count_source, (COUNT_INPUT, COUNT_OUTPUT))
        if self.kernel_horizon is None:
            object.__setattr__(
                self, "kernel_horizon", default_kernel_horizon(self.tau, self.delay)
            )
        elif self.kernel_horizon < 1:
            raise ValueError(f"kernel_horizon must be >= 1, got {self.kernel_horizon}")


def srm_kernel(t, s, config):
    """Voltage response at time t to a unit input spike at time s.

    ``((t-s-delay)/tau) * exp(1 - (t-s-delay)/tau)``; zero before the
    delayed onset and past the truncation horizon.  Peaks at lag
    ``delay + tau`` with value exactly 1.
    """
    lag = np.asarray(t, dtype=np.float64) - np.asarray(s, dtype=np.float64)
    value = _kernel_value(lag, config.tau, config.delay)
    value = np.where(lag > config.kernel_horizon, 0.0, value)
    return float(value) if value.ndim == 0 else value


class TfaState:
    """Per-pixel adaptive neuron state driven tick by tick.

    Holds the membrane potential, the dynamic threshold, a ring buffer of
    recent input spikes (for the kernel sum, restarted at each model
    firing), and the trailing spike-count window used for adaptation.
    """

    def __init__(self, width, height, config=None):
        if config is None:
            config = TfaConfig()
        self.width = int(width)
        self.height = int(height)
        self.config = config
        self.tick = 0
        n = self.width * self.height
        shape = (self.height, self.width)
        self.potential = np.zeros(shape, dtype=np.float64)
        self.threshold = np.full(shape, config.initial_threshold, dtype=np.float64)
        self.last_fire_tick = np.full(shape, -1, dtype=np.int64)
        k = config.kernel_horizon
        # _kappa[d] = kernel response at lag d, zero beyond the horizon
        self._kappa = _kernel_value(
            np.arange(k + 1, dtype=np.float64), config.tau, config.delay
        )
        self._ring = np.zeros((k + 1, n), dtype=np.float64)
        self._count_ring = np.zeros((config.count_window, n), dtype=np.uint8)
        self._count = np.zeros(n, dtype=np.int64)

    @property
    def ticks_processed(self):
        return self.tick


def tfa_step(state, plane, config=None):
    """Advance every pixel's adaptive neuron by one input bitplane.

    Per pixel and tick: the input spike enters the history; the membrane
    potential is the kernel-weighted sum of input spikes since the last
    model firing; if it reaches the dynamic threshold the model fires, the
    potential resets to rest and the threshold grows by ``exp(-n)``,
    otherwise the threshold decays by ``exp(-2n)`` -- n being the trailing
    spike count configured by ``count_source``.  Thresholds never drop
    below ``THRESHOLD_FLOOR``.  The kernel history restarts from the firing
    tick, so an input spike arriving at that tick still contributes later.

    Returns the state (mutated in place).
    """
    if config is not None and config != state.config:
        raise ValueError("config does not match the one this state was built with")
    config = state.config
    plane = np.asarray(plane)
    if plane.shape != (state.height, state.width):
        raise ValueError(
            f"plane shape {plane.shape} does not match state grid "
            f"{(state.height, state.width)}"
        )
    t = state.tick
    k = config.kernel_horizon
    flat = plane.reshape(-1).astype(np.float64)
    pos = t % (k + 1)
    state._ring[pos] = flat

    if config.count_source == COUNT_INPUT:
        _push_count(state, plane.reshape(-1).astype(np.uint8), t)

    # membrane potential: kernel sum over the ring (rows older than the
    # horizon were already overwritten; pre-start rows are zero)
    aligned = state._kappa[(pos - np.arange(k + 1)) % (k + 1)]
    h = aligned @ state._ring
    u = h.reshape(state.height, state.width)
    fired = u >= state.threshold

    if config.count_source == COUNT_OUTPUT:
        _push_count(state, fired.reshape(-1).astype(np.uint8), t)

    n = state._count.reshape(state.height, state.width).astype(np.float64)
    delta = np.where(fired, np.exp(-n), -np.exp(-2.0 * n))
    np.maximum(state.threshold + delta, THRESHOLD_FLOOR, out=state.threshold)

    fired_flat = fired.reshape(-1)
    if fired_flat.any():
        # restart the kernel history from the firing tick: drop everything
        # except the spike that just arrived
        keep = state._ring[pos, fired_flat]
        state._ring[:, fired_flat] = 0.0
        state._ring[pos, fired_flat] = keep
        u[fired] = 0.0
        state.last_fire_tick[fired] = t

    state.potential = u
    state.tick = t + 1
    return state


def _push_count(state, bits, t):
    slot = t % state.config.count_window
    state._count += bits.astype(np.int64) - state._count_ring[slot]
    state._count_ring[slot] = bits


def tfa_run(stream, config=None, num_ticks=None, trace_pixels=None):
    """Drive a fresh TfaState over a stream's bitplanes.

    Parameters
    ----------
    stream : SpikeStream
    config : TfaConfig, optional
    num_ticks : int, optional
        Process only the first num_ticks planes.
    trace_pixels : sequence of (x, y), optional
        Record these pixels' thresholds after every tick.

    Returns
    -------
    state : TfaState
    traces : ndarray of shape (num_ticks, len(trace_pixels)) or None
    """
    if config is None:
        config = TfaConfig()
    if num_ticks is None:
        num_ticks = stream.num_ticks
    state = TfaState(stream.width, stream.height, config)
    traces = None
    if trace_pixels is not None:
        traces = np.empty((num_ticks, len(trace_pixels)), dtype=np.float64)
    for t in range(num_ticks):
        tfa_step(state, stream.bits(t))
        if traces is not None:
            for i, (x, y) in enumerate(trace_pixels):
                traces[t, i] = state.threshold[y, x]
    return state, traces


def tfa_texture(state, dynamic_range=255):
    """Render the threshold matrix as a frame by min-max normalization.

    A uniform threshold matrix has no contrast to show and maps to the
    all-zero frame.
    """
    if state.tick < 1:
        raise ValueError("state has not processed any ticks yet")
    theta = state.threshold
    lo = theta.min()
    hi = theta.max()
    if hi == lo:
        return np.zeros(theta.shape, dtype=np.uint8 if dynamic_range <= 255 else np.uint16)
    return _quantize((theta - lo) / (hi - lo) * dynamic_range, dynamic_range)
