"""Scene generation: synthetic luminance sequences and image ingestion.

A scene is a (num_ticks, height, width) intensity field sampled at a fixed
tick rate.  Generators are deterministic functions of their parameters.
Constant scenes use broadcast views so arbitrarily long sequences cost no
memory.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .pgm import read_pgm
from .validation import check_intensities, check_positive

VARIANTS = ("constant", "step", "moving_bar", "spinning_disc", "image_sequence")


@dataclass(frozen=True, eq=False)
class SceneSequence:
    """A time-varying luminance field.

    ``values`` has shape (num_ticks, height, width); entries are intensities
    in [0, max_intensity of the downstream sampler].  ``values`` may be a
    read-only broadcast view for scenes that repeat a frame.
    """

    values: np.ndarray = field(repr=False)
    tick_rate: int = 40000

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 3:
            raise ValueError(
                f"scene values must have shape (num_ticks, height, width), "
                f"got {values.shape}"
            )
        check_positive("tick_rate", self.tick_rate)
        object.__setattr__(self, "values", values)

    @property
    def num_ticks(self):
        return self.values.shape[0]

    @property
    def height(self):
        return self.values.shape[1]

    @property
    def width(self):
        return self.values.shape[2]

    def intensity(self, x, y, t):
        return self.values[t, y, x]


@dataclass(frozen=True, eq=False)
class DiscScene(SceneSequence):
    """A spinning-disc scene that also knows its ground-truth layout.

    ``disc_mask`` marks pixels inside the disc; ``pattern_mask(t)`` returns
    the instantaneous bright-pattern mask, rotated exactly like the rendered
    intensities.
    """

    rpm: float = 2000.0
    _pattern: np.ndarray = field(default=None, repr=False)
    disc_mask: np.ndarray = field(default=None, repr=False)

    def pattern_mask(self, t):
        angle = disc_angle(self.rpm, t, self.tick_rate)
        return _rotate_nearest(self._pattern, angle) & self.disc_mask


@dataclass(frozen=True)
class SceneSpec:
    """Declarative scene description used by the CLI and config files."""

    variant: str
    width: int = 64
    height: int = 64
    num_ticks: int = 1024
    tick_rate: int = 40000
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown scene variant {self.variant!r}, expected one of {VARIANTS}"
            )
        if min(self.width, self.height, self.num_ticks) < 1:
            raise ValueError("scene geometry must be at least 1x1x1")
        check_positive("tick_rate", self.tick_rate)


def generate(spec):
    """Build the SceneSequence described by a SceneSpec."""
    args = (spec.width, spec.height, spec.num_ticks, spec.tick_rate)
    builders = {
        "constant": constant_scene,
        "step": step_scene,
        "moving_bar": moving_bar_scene,
        "spinning_disc": spinning_disc_scene,
    }
    if spec.variant == "image_sequence":
        return ingest_images(tick_rate=spec.tick_rate, **spec.params)
    return builders[spec.variant](*args, **spec.params)


def constant_scene(width, height, num_ticks, tick_rate=40000, intensity=128):
    """Uniform intensity everywhere; zero-copy for any length."""
    frame = np.full((height, width), intensity, dtype=np.uint8)
    values = np.broadcast_to(frame, (num_ticks, height, width))
    return SceneSequence(values=values, tick_rate=tick_rate)


def step_scene(width, height, num_ticks, tick_rate=40000,
               before=64, after=192, step_tick=None):
    """Uniform intensity that jumps from `before` to `after` at step_tick."""
    if step_tick is None:
        step_tick = num_ticks // 2
    if not 0 <= step_tick <= num_ticks:
        raise ValueError(f"step_tick {step_tick} outside [0, {num_ticks}]")
    values = np.empty((num_ticks, height, width), dtype=np.uint8)
    values[:step_tick] = before
    values[step_tick:] = after
    return SceneSequence(values=values, tick_rate=tick_rate)


def moving_bar_scene(width, height, num_ticks, tick_rate=40000,
                     bar_width=8, speed=0.5, bar_intensity=200,
                     background=50, start_x=0):
    """A bright vertical bar sweeping horizontally with wraparound.

    ``speed`` is in pixels per tick; the bar's left edge at tick t sits at
    ``(start_x + speed * t) mod width``.
    """
    if not 1 <= bar_width <= width:
        raise ValueError(f"bar_width {bar_width} outside [1, {width}]")
    xs = np.arange(width)
    values = np.empty((num_ticks, height, width), dtype=np.uint8)
    for t in range(num_ticks):
        left = (start_x + speed * t) % width
        offset = (xs - left) % width
        row = np.where(offset < bar_width, bar_intensity, background)
        values[t] = row.astype(np.uint8)
    return SceneSequence(values=values, tick_rate=tick_rate)


def disc_angle(rpm, t, tick_rate):
    """Rotation angle in radians after t ticks at the given rpm."""
    return 2.0 * np.pi * rpm * t / (60.0 * tick_rate)


def _rotate_nearest(image, angle):
    """Rotate an image about its center by `angle`, nearest-neighbor sampling.

    Output pixel (x, y) takes the value at the source location obtained by
    rotating (x, y) by -angle, so the image content turns by +angle.
    Out-of-frame samples read as 0/False.
    """
    h, w = image.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - cx
    dy = ys - cy
    cos_a = np.cos(angle)
    sin_a = np.sin(angle)
    src_x = np.rint(cos_a * dx + sin_a * dy + cx).astype(np.int64)
    src_y = np.rint(-sin_a * dx + cos_a * dy + cy).astype(np.int64)
    inside = (src_x >= 0) & (src_x < w) & (src_y >= 0) & (src_y < h)
    out = np.zeros_like(image)
    out[inside] = image[src_y[inside], src_x[inside]]
    return out


def default_disc_pattern(width, height, radius):
    """Bright shapes for the spinning disc: three blobs and a wedge.

    Deliberately asymmetric so every rotation pose is distinct within a
    revolution.
    """
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    ys, xs = np.mgrid[0:height, 0:width]
    pattern = np.zeros((height, width), dtype=bool)
    for frac, ang, size in ((0.55, 0.0, 0.16), (0.55, 2.1, 0.12), (0.3, 4.0, 0.10)):
        bx = cx + frac * radius * np.cos(ang)
        by = cy + frac * radius * np.sin(ang)
        pattern |= (xs - bx) ** 2 + (ys - by) ** 2 <= (size * radius) ** 2
    # a 40-degree wedge between 60% and 90% of the radius
    r = np.hypot(xs - cx, ys - cy)
    theta = np.arctan2(ys - cy, xs - cx)
    pattern |= (r >= 0.6 * radius) & (r <= 0.9 * radius) & (theta > 2.6) & (theta < 3.3)
    return pattern


def spinning_disc_scene(width, height, num_ticks, tick_rate=20000,
                        rpm=2000, pattern=None, pattern_intensity=200,
                        disc_intensity=50, background=0, radius=None):
    """A dark disc with bright patterns spinning about the image center.

    The pattern mask (given or default) is rotated by
    ``2*pi*rpm*t / (60*tick_rate)`` radians at tick t with nearest-neighbor
    sampling, so pixel trajectories are periodic with period
    ``60*tick_rate/rpm`` ticks.
    """
    check_positive("rpm", rpm)
    if radius is None:
        radius = 0.48 * min(width, height)
    ys, xs = np.mgrid[0:height, 0:width]
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    disc_mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2
    if pattern is None:
        pattern = default_disc_pattern(width, height, radius)
    else:
        pattern = np.asarray(pattern, dtype=bool)
        if pattern.shape != (height, width):
            raise ValueError(
                f"pattern shape {pattern.shape} does not match {height}x{width}"
            )
    values = np.empty((num_ticks, height, width), dtype=np.uint8)
    for t in range(num_ticks):
        rotated = _rotate_nearest(pattern, disc_angle(rpm, t, tick_rate)) & disc_mask
        frame = np.where(disc_mask, disc_intensity, background)
        frame[rotated] = pattern_intensity
        values[t] = frame.astype(np.uint8)
    return DiscScene(
        values=values,
        tick_rate=tick_rate,
        rpm=rpm,
        _pattern=pattern,
        disc_mask=disc_mask,
    )


def ingest_images(paths, tick_rate=40000, interpolation="hold", ticks_per_frame=1):
    """Turn a grayscale PGM sequence into a scene.

    With ``hold`` each source frame is repeated for ``ticks_per_frame``
    ticks (total n*ticks_per_frame).  With ``linear`` intensities ramp
    between consecutive frames over ``ticks_per_frame`` ticks each, endpoints
    included (total (n-1)*ticks_per_frame + 1); single-image input falls back
    to hold.  Values are rounded half-up to integers.
    """
    if interpolation not in ("hold", "linear"):
        raise ValueError(f"interpolation must be 'hold' or 'linear', got {interpolation!r}")
    check_positive("ticks_per_frame", ticks_per_frame)
    if not paths:
        raise ValueError("at least one image path is required")
    frames = [read_pgm(p) for p in paths]
    shape = frames[0].shape
    for p, f in zip(paths, frames):
        if f.shape != shape:
            raise ValueError(
                f"image size mismatch: {p} is {f.shape[1]}x{f.shape[0]}, "
                f"expected {shape[1]}x{shape[0]}"
            )
        check_intensities(f, 255)
    if interpolation == "hold" or len(frames) == 1:
        values = np.repeat(np.stack(frames), ticks_per_frame, axis=0)
    else:
        segments = []
        for a, b in zip(frames[:-1], frames[1:]):
            alphas = np.arange(ticks_per_frame) / ticks_per_frame
            ramp = a[None] + alphas[:, None, None] * (b.astype(np.float64) - a)[None]
            segments.append(np.floor(ramp + 0.5).astype(np.uint8))
        segments.append(frames[-1][None])
        values = np.concatenate(segments, axis=0)
    return SceneSequence(values=values, tick_rate=tick_rate)
