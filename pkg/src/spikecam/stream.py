"""Bit-exact spike-stream container, file codec, and random-access queries.

On-disk layout (".spks", all little-endian):

=======  ======  =====================================================
offset   size    field
=======  ======  =====================================================
0        4       magic ``b"SPKS"``
4        2       format version (currently 1)
6        1       reset mode: 0 = drain, 1 = subtract
7        1       reserved, zero
8        4       width in pixels
12       4       height in pixels
16       4       tick rate in Hz
20       8       number of ticks
28       8       dispatch threshold (IEEE-754 double)
36       ...     ``num_ticks`` bit planes of ``ceil(width*height/8)`` bytes
=======  ======  =====================================================

Within a plane, pixel p = y*width + x occupies byte p >> 3, bit p & 7
(LSB-first); trailing pad bits are zero.  A loaded stream is immutable and
all queries are read-only, so concurrent readers are safe.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .validation import check_coords, check_tick

MAGIC = b"SPKS"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHBBIIIQd")

_RESET_CODES = {"drain": 0, "subtract": 1}
_RESET_NAMES = {code: name for name, code in _RESET_CODES.items()}

# sanity cap for reader allocations on malformed headers
_MAX_PIXELS = 1 << 28
_MAX_TICKS = 1 << 40


class StreamFormatError(ValueError):
    """Raised when bytes do not describe a well-formed spike stream."""


def plane_byte_size(width, height):
    """Packed byte length of one width x height bit plane."""
    return (width * height + 7) // 8


@dataclass(frozen=True, eq=False)
class SpikeStream:
    """An immutable stack of packed binary spike planes plus sampling metadata.

    ``planes`` has shape (num_ticks, plane_byte_size(width, height)) and
    dtype uint8.  ``threshold`` and ``reset_mode`` record how the stream was
    sampled; decoders use ``threshold`` only through the caller-supplied
    dynamic range, so the header is purely descriptive metadata for them.
    """

    width: int
    height: int
    tick_rate: int
    reset_mode: str
    threshold: float
    planes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("stream geometry must be at least 1x1")
        if self.tick_rate < 1:
            raise ValueError("tick_rate must be >= 1 Hz")
        if self.reset_mode not in _RESET_CODES:
            raise ValueError(f"unknown reset_mode {self.reset_mode!r}")
        planes = np.ascontiguousarray(np.asarray(self.planes, dtype=np.uint8))
        expected = plane_byte_size(self.width, self.height)
        if planes.ndim != 2 or planes.shape[1] != expected:
            raise ValueError(
                f"planes must have shape (num_ticks, {expected}), got {planes.shape}"
            )
        object.__setattr__(self, "planes", planes)

    # -- basic geometry -------------------------------------------------

    @property
    def num_ticks(self):
        return self.planes.shape[0]

    @property
    def num_pixels(self):
        return self.width * self.height

    @property
    def plane_bytes(self):
        return self.planes.shape[1]

    @classmethod
    def from_bits(cls, bits, tick_rate=40000, reset_mode="drain", threshold=255.0):
        """Pack a (num_ticks, height, width) array of 0/1 values into a stream."""
        bits = np.asarray(bits)
        if bits.ndim != 3:
            raise ValueError("bits must have shape (num_ticks, height, width)")
        num_ticks, height, width = bits.shape
        planes = np.packbits(
            bits.reshape(num_ticks, height * width), axis=1, bitorder="little"
        )
        if num_ticks == 0:
            planes = planes.reshape(0, plane_byte_size(width, height))
        return cls(
            width=width,
            height=height,
            tick_rate=tick_rate,
            reset_mode=reset_mode,
            threshold=threshold,
            planes=planes,
        )

    def __eq__(self, other):
        if not isinstance(other, SpikeStream):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.tick_rate == other.tick_rate
            and self.reset_mode == other.reset_mode
            and self.threshold == other.threshold
            and self.planes.shape == other.planes.shape
            and bool(np.array_equal(self.planes, other.planes))
        )

    # -- plane / pixel access --------------------------------------------

    def bits(self, t):
        """Unpack tick t into a (height, width) uint8 plane of 0/1."""
        t = check_tick(self, t)
        flat = np.unpackbits(self.planes[t], count=self.num_pixels, bitorder="little")
        return flat.reshape(self.height, self.width)

    def to_bits(self):
        """Unpack the whole stream to (num_ticks, height, width); small streams only."""
        flat = np.unpackbits(
            self.planes, axis=1, count=self.num_pixels, bitorder="little"
        )
        return flat.reshape(self.num_ticks, self.height, self.width)

    def pixel_train(self, x, y):
        """The 0/1 spike indicator of one pixel across all ticks."""
        x, y = check_coords(self, x, y)
        p = y * self.width + x
        return ((self.planes[:, p >> 3] >> (p & 7)) & 1).astype(np.uint8)

    def spike_ticks(self, x, y):
        """Strictly increasing tick indices at which pixel (x, y) spiked."""
        return np.nonzero(self.pixel_train(x, y))[0].astype(np.int64)

    def total_spikes(self):
        return int(np.bitwise_count(self.planes).sum())

    # -- decoder queries --------------------------------------------------

    def isi_before(self, x, y, t):
        """Interval between the latest spike at tick <= t and the one before it.

        Returns None while the pixel has fewer than two spikes up to t.
        """
        t = check_tick(self, t)
        train = self.pixel_train(x, y)[: t + 1]
        ticks = np.nonzero(train)[0]
        if ticks.size < 2:
            return None
        return int(ticks[-1] - ticks[-2])

    def count_window(self, x, y, t, w):
        """Number of spikes of pixel (x, y) with tick in (t - w, t].

        The window is clipped at tick 0; w = 1 asks whether the pixel spiked
        at t itself.
        """
        if w < 1:
            raise ValueError(f"window must be >= 1, got {w}")
        t = check_tick(self, t)
        train = self.pixel_train(x, y)
        return int(train[max(0, t - w + 1) : t + 1].sum())

    def count_window_frame(self, t, w):
        """count_window for every pixel at once; returns (height, width) uint32."""
        if w < 1:
            raise ValueError(f"window must be >= 1, got {w}")
        t = check_tick(self, t)
        # transpose the window block so the kernel scans contiguous memory
        block = np.ascontiguousarray(self.planes[max(0, t - w + 1) : t + 1].T)
        counts = _kernels.window_counts(block, self.num_pixels)
        return counts.reshape(self.height, self.width)

    def last_two_spikes(self, t):
        """Latest two spike ticks <= t per pixel; -1 entries mean not yet seen."""
        t = check_tick(self, t)
        last, prev = _kernels.last_two_spikes(self.planes, t, self.num_pixels)
        shape = (self.height, self.width)
        return last.reshape(shape), prev.reshape(shape)

    def spike_index(self):
        """All spike positions as CSR arrays (indptr, ticks) in pixel order.

        indptr has num_pixels + 1 entries; ticks[indptr[p]:indptr[p+1]] are
        pixel p's spike ticks, ascending.  Built once on demand and cached
        on the (immutable) stream; never serialized.
        """
        cached = getattr(self, "_spike_index_cache", None)
        if cached is not None:
            return cached
        ticks_idx, pixel_idx = np.nonzero(
            np.unpackbits(self.planes, axis=1, count=self.num_pixels, bitorder="little")
        )
        order = np.lexsort((ticks_idx, pixel_idx))
        pixel_idx = pixel_idx[order]
        ticks_idx = ticks_idx[order].astype(np.int64)
        counts = np.bincount(pixel_idx, minlength=self.num_pixels)
        indptr = np.zeros(self.num_pixels + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        object.__setattr__(self, "_spike_index_cache", (indptr, ticks_idx))
        return indptr, ticks_idx


def write_stream(stream, sink):
    """Serialize a stream to a binary sink; returns the byte count written."""
    header = HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        _RESET_CODES[stream.reset_mode],
        0,
        stream.width,
        stream.height,
        stream.tick_rate,
        stream.num_ticks,
        float(stream.threshold),
    )
    sink.write(header)
    body = stream.planes.tobytes()
    sink.write(body)
    return len(header) + len(body)


def read_stream(source):
    """Parse a spike stream from a binary source (inverse of write_stream)."""
    data = source.read()
    if len(data) < HEADER.size:
        raise StreamFormatError("not a spike stream: header truncated")
    magic, version, reset_code, _reserved, width, height, tick_rate, num_ticks, threshold = (
        HEADER.unpack_from(data)
    )
    if magic != MAGIC:
        raise StreamFormatError("not a spike stream: bad magic")
    if version != FORMAT_VERSION:
        raise StreamFormatError(f"unsupported format version {version}")
    if reset_code not in _RESET_NAMES:
        raise StreamFormatError(f"unknown reset mode code {reset_code}")
    if width < 1 or height < 1 or width * height > _MAX_PIXELS:
        raise StreamFormatError(f"dimension overflow: {width}x{height}")
    if num_ticks > _MAX_TICKS:
        raise StreamFormatError(f"dimension overflow: {num_ticks} ticks")
    n_bytes = plane_byte_size(width, height)
    expected = HEADER.size + num_ticks * n_bytes
    if len(data) < expected:
        raise StreamFormatError(
            f"truncated stream: expected {expected} bytes, got {len(data)}"
        )
    if len(data) > expected:
        raise StreamFormatError(
            f"trailing data: expected {expected} bytes, got {len(data)}"
        )
    # read-only view over the source bytes; SpikeStream never mutates planes
    planes = np.frombuffer(
        data, dtype=np.uint8, count=num_ticks * n_bytes, offset=HEADER.size
    ).reshape(num_ticks, n_bytes)
    return SpikeStream(
        width=width,
        height=height,
        tick_rate=tick_rate,
        reset_mode=_RESET_NAMES[reset_code],
        threshold=threshold,
        planes=planes,
    )


def save_stream(stream, path):
    with open(path, "wb") as fh:
        return write_stream(stream, fh)


def load_stream(path):
    with open(path, "rb") as fh:
        return read_stream(fh)
