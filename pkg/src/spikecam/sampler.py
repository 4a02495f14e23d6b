"""Per-pixel integrate-and-fire sampling of luminance sequences.

Each pixel accumulates incoming intensity once per tick; when the running
sum reaches the dispatch threshold the pixel emits a binary spike and its
accumulator is reset.  Two reset flavors are supported:

* ``"drain"``   -- the accumulator is emptied to zero (charge is discarded),
* ``"subtract"`` -- the threshold is subtracted, carrying the residual charge
  into the next interval so the long-run spike rate equals intensity/threshold.

Intensity over one inter-spike interval can be recovered as
``threshold / isi``, which is what the reconstruction decoders build on.
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_choice, check_intensities, check_positive

RESET_DRAIN = "drain"
RESET_SUBTRACT = "subtract"
RESET_MODES = frozenset({RESET_DRAIN, RESET_SUBTRACT})


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling parameters.

    Parameters
    ----------
    threshold : float
        Dispatch threshold in intensity*ticks; a pixel fires when its
        accumulated intensity reaches this value.
    reset_mode : str
        Either ``"drain"`` (reset accumulator to zero) or ``"subtract"``
        (subtract the threshold, keeping the residual).
    max_intensity : int
        Largest admissible per-tick intensity (8-bit ingestion default 255).
        In subtract mode the threshold must be at least this large so the
        post-fire residual always stays below the threshold.
    """

    threshold: float = 255.0
    reset_mode: str = RESET_DRAIN
    max_intensity: int = 255

    def __post_init__(self):
        check_positive("threshold", self.threshold)
        check_choice("reset_mode", self.reset_mode, RESET_MODES)
        if self.max_intensity < 1:
            raise ValueError(f"max_intensity must be >= 1, got {self.max_intensity}")
        if self.reset_mode == RESET_SUBTRACT and self.threshold < self.max_intensity:
            raise ValueError(
                "subtract mode requires threshold >= max_intensity "
                f"({self.threshold} < {self.max_intensity})"
            )


class SamplerState:
    """Mutable per-pixel sampler state: charge accumulators and fire history.

    The accumulator is kept exact (float64, no rounding during integration);
    after every completed tick each accumulator is strictly below the
    threshold.  ``last_fire_tick`` is -1 for pixels that never fired.
    """

    def __init__(self, width, height):
        self.width = int(width)
        self.height = int(height)
        self.accumulator = np.zeros((self.height, self.width), dtype=np.float64)
        self.last_fire_tick = np.full((self.height, self.width), -1, dtype=np.int64)


def integrate_tick(state, plane, config, tick=0):
    """Advance the sampler by one tick of intensities.

    Parameters
    ----------
    state : SamplerState
        Updated in place.
    plane : ndarray, shape (height, width)
        Intensities for this tick, each in [0, config.max_intensity].
    config : SamplerConfig
    tick : int
        Index recorded in ``state.last_fire_tick`` for firing pixels.

    Returns
    -------
    ndarray of uint8, shape (height, width)
        1 where a spike was dispatched during this tick, else 0.
    """
    plane = np.asarray(plane)
    if plane.shape != state.accumulator.shape:
        raise ValueError(
            f"plane shape {plane.shape} does not match sampler grid "
            f"{state.accumulator.shape}"
        )
    check_intensities(plane, config.max_intensity)

    acc = state.accumulator
    acc += plane
    fired = acc >= config.threshold
    if config.reset_mode == RESET_DRAIN:
        acc[fired] = 0.0
    else:
        acc[fired] -= config.threshold
    state.last_fire_tick[fired] = tick
    return fired.astype(np.uint8)


def sample_sequence(scene, config=None):
    """Sample a whole luminance sequence into a spike stream.

    Folds :func:`integrate_tick` over the scene's ticks starting from zeroed
    accumulators.  The result is a pure function of (scene, config).

    Parameters
    ----------
    scene : SceneSequence
        Input luminance field of shape (num_ticks, height, width).
    config : SamplerConfig, optional
        Defaults to ``SamplerConfig()``.

    Returns
    -------
    SpikeStream
        Same geometry and tick count as the scene; the sampler settings are
        recorded in the stream header.
    """
    from .stream import SpikeStream, plane_byte_size

    if config is None:
        config = SamplerConfig()
    state = SamplerState(scene.width, scene.height)
    n_bytes = plane_byte_size(scene.width, scene.height)
    planes = np.empty((scene.num_ticks, n_bytes), dtype=np.uint8)
    values = scene.values
    for t in range(scene.num_ticks):
        bits = integrate_tick(state, values[t], config, tick=t)
        planes[t] = np.packbits(bits.ravel(), bitorder="little")
    return SpikeStream(
        width=scene.width,
        height=scene.height,
        tick_rate=scene.tick_rate,
        reset_mode=config.reset_mode,
        threshold=config.threshold,
        planes=planes,
    )


def estimate_intensity(isi, threshold):
    """Estimate mean intensity over one inter-spike interval.

    The accumulated charge over an interval of ``isi`` ticks equals the
    dispatch threshold, so the average intensity is ``threshold / isi``.

    Parameters
    ----------
    isi : int or ndarray
        Inter-spike interval in ticks, >= 1.
    threshold : float
        Dispatch threshold the stream was sampled with.

    Returns
    -------
    float or ndarray
    """
    isi = np.asarray(isi)
    if np.any(isi < 1):
        raise ValueError("isi must be >= 1 tick")
    result = threshold / isi
    return result if result.ndim else float(result)
