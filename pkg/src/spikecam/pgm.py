"""Minimal binary PGM (P5, 8-bit) reader/writer.

Only the strict subset used for frame interchange is accepted: P5 magic,
maxval <= 255.  Color (P6) and ASCII (P2) inputs are rejected rather than
converted.
"""

import numpy as np


def _read_token(fh):
    # skip whitespace and '#' comment lines between header tokens
    token = b""
    while True:
        c = fh.read(1)
        if not c:
            raise ValueError("unexpected end of PGM header")
        if c == b"#":
            while c and c != b"\n":
                c = fh.read(1)
            continue
        if c.isspace():
            if token:
                return token
            continue
        token += c


def read_pgm(path):
    """Read an 8-bit binary PGM into a (height, width) uint8 array."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
        if magic == b"P6":
            raise ValueError(f"{path}: color PPM input is not supported, use 8-bit grayscale PGM")
        if magic != b"P5":
            raise ValueError(f"{path}: not a binary PGM (P5) file")
        width = int(_read_token(fh))
        height = int(_read_token(fh))
        maxval = int(_read_token(fh))
        if width < 1 or height < 1:
            raise ValueError(f"{path}: bad PGM dimensions {width}x{height}")
        if not 0 < maxval <= 255:
            raise ValueError(f"{path}: unsupported bit depth (maxval {maxval})")
        data = fh.read(width * height)
        if len(data) != width * height:
            raise ValueError(f"{path}: truncated PGM pixel data")
    return np.frombuffer(data, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(image, path, maxval=255):
    """Write a (height, width) array of values in [0, maxval] as binary PGM."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {image.shape}")
    if image.size and (image.min() < 0 or image.max() > maxval):
        raise ValueError(f"pixel values out of range [0, {maxval}]")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n%d\n" % (image.shape[1], image.shape[0], maxval))
        fh.write(image.astype(np.uint8).tobytes())
