"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np


def check_positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def check_at_least(name, value, minimum):
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return value


def check_choice(name, value, choices):
    if value not in choices:
        raise ValueError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def check_intensities(plane, max_intensity):
    """Validate that all values of an intensity plane lie in [0, max_intensity]."""
    plane = np.asarray(plane)
    if plane.size and (plane.min() < 0 or plane.max() > max_intensity):
        raise ValueError(
            f"intensity values must lie in [0, {max_intensity}], "
            f"got range [{plane.min()}, {plane.max()}]"
        )
    return plane


def check_same_shape(name_a, a, name_b, b):
    if a.shape != b.shape:
        raise ValueError(
            f"{name_a} shape {a.shape} does not match {name_b} shape {b.shape}"
        )


def as_scene(X, tick_rate=40000):
    """Coerce input to a SceneSequence.

    Accepts an existing SceneSequence or a (num_ticks, height, width)
    array of intensities; raw arrays are wrapped with the given tick rate.
    """
    from .scenes import SceneSequence

    if isinstance(X, SceneSequence):
        return X
    values = np.asarray(X)
    if values.ndim != 3:
        raise ValueError(
            f"scene array must have shape (num_ticks, height, width), "
            f"got ndim={values.ndim}"
        )
    return SceneSequence(values=values, tick_rate=tick_rate)


def check_stream(X):
    """Require a SpikeStream input."""
    from .stream import SpikeStream

    if not isinstance(X, SpikeStream):
        raise TypeError(f"expected a SpikeStream, got {type(X).__name__}")
    return X


def check_tick(stream, t):
    if not 0 <= t < stream.num_ticks:
        raise ValueError(
            f"tick {t} out of range for stream with {stream.num_ticks} ticks"
        )
    return int(t)


def check_coords(stream, x, y):
    if not (0 <= x < stream.width and 0 <= y < stream.height):
        raise IndexError(
            f"pixel ({x}, {y}) out of range for {stream.width}x{stream.height} stream"
        )
    return int(x), int(y)
