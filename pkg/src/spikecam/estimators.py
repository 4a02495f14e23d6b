"""Scikit-learn style estimators wrapping the sampling and decoding pipeline.

All estimators follow the fit/transform protocol with parameters exposed
through ``get_params``/``set_params``, so they compose with
``sklearn.pipeline.Pipeline`` and parameter search utilities:

    >>> from sklearn.pipeline import Pipeline
    >>> pipe = Pipeline([
    ...     ("sample", SpikeSampler(threshold=255.0, reset_mode="subtract")),
    ...     ("decode", TfpReconstructor(window=64)),
    ... ])
    >>> frame = pipe.fit_transform(scene)          # doctest: +SKIP

The samplers and window decoders are stateless (fit only validates);
``TfaReconstructor`` genuinely fits -- it runs the adaptive neuron dynamics
over the stream and exposes the learned threshold matrix as ``threshold_``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .events import spikes_to_events
from .reconstruct import TfaConfig, tfa_run, tfa_texture, tfi_frame, tfp_frame
from .sampler import SamplerConfig, sample_sequence
from .validation import as_scene, check_stream


class SpikeSampler(BaseEstimator, TransformerMixin):
    """Turn luminance sequences into spike streams.

    Accepts a SceneSequence or a raw (num_ticks, height, width) intensity
    array; raw arrays are stamped with ``tick_rate``.
    """

    def __init__(self, threshold=255.0, reset_mode="drain", max_intensity=255,
                 tick_rate=40000):
        self.threshold = threshold
        self.reset_mode = reset_mode
        self.max_intensity = max_intensity
        self.tick_rate = tick_rate

    def _config(self):
        return SamplerConfig(
            threshold=self.threshold,
            reset_mode=self.reset_mode,
            max_intensity=self.max_intensity,
        )

    def fit(self, X, y=None):
        self._config()
        as_scene(X, self.tick_rate)
        return self

    def transform(self, X):
        return sample_sequence(as_scene(X, self.tick_rate), self._config())


class TfiReconstructor(BaseEstimator, TransformerMixin):
    """Decode frames from each pixel's latest inter-spike interval.

    ``ticks=None`` decodes the final tick into one (height, width) frame;
    a sequence of ticks yields a (len(ticks), height, width) stack.
    """

    def __init__(self, dynamic_range=255, ticks=None):
        self.dynamic_range = dynamic_range
        self.ticks = ticks

    def fit(self, X, y=None):
        check_stream(X)
        return self

    def transform(self, X):
        check_stream(X)
        if self.ticks is None:
            return tfi_frame(X, X.num_ticks - 1, self.dynamic_range)
        return np.stack([tfi_frame(X, t, self.dynamic_range) for t in self.ticks])


class TfpReconstructor(BaseEstimator, TransformerMixin):
    """Decode frames from spike counts over a trailing window."""

    def __init__(self, window=512, dynamic_range=255, ticks=None):
        self.window = window
        self.dynamic_range = dynamic_range
        self.ticks = ticks

    def fit(self, X, y=None):
        check_stream(X)
        return self

    def transform(self, X):
        check_stream(X)
        if self.ticks is None:
            return tfp_frame(X, X.num_ticks - 1, self.window, self.dynamic_range)
        return np.stack(
            [tfp_frame(X, t, self.window, self.dynamic_range) for t in self.ticks]
        )


class TfaReconstructor(BaseEstimator, TransformerMixin):
    """Decode texture from adaptively learned firing thresholds.

    ``fit`` runs the per-pixel adaptive neurons over the whole stream and
    stores the converged threshold matrix (``threshold_``) plus the final
    state (``state_``); ``transform`` renders it as a frame.
    """

    def __init__(self, tau=8.0, delay=0.0, count_window=256,
                 initial_threshold=1.0, kernel_horizon=None,
                 count_source="output", dynamic_range=255):
        self.tau = tau
        self.delay = delay
        self.count_window = count_window
        self.initial_threshold = initial_threshold
        self.kernel_horizon = kernel_horizon
        self.count_source = count_source
        self.dynamic_range = dynamic_range

    def _config(self):
        return TfaConfig(
            tau=self.tau,
            delay=self.delay,
            count_window=self.count_window,
            initial_threshold=self.initial_threshold,
            kernel_horizon=self.kernel_horizon,
            count_source=self.count_source,
        )

    def fit(self, X, y=None):
        check_stream(X)
        state, _ = tfa_run(X, self._config())
        self.state_ = state
        self.threshold_ = state.threshold
        self.potential_ = state.potential
        return self

    def transform(self, X):
        if not hasattr(self, "state_"):
            self.fit(X)
        return tfa_texture(self.state_, self.dynamic_range)

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class EventConverter(BaseEstimator, TransformerMixin):
    """Convert spike streams into DVS-style On/Off event arrays."""

    def __init__(self, threshold=0.3):
        self.threshold = threshold

    def fit(self, X, y=None):
        check_stream(X)
        return self

    def transform(self, X):
        return spikes_to_events(check_stream(X), self.threshold)
