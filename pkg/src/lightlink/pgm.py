"""Binary PGM (P5) reading and writing.

Frames move between the simulator, the decoder, and external tools as plain
binary PGM: magic "P5", whitespace-separated width/height/maxval header with
'#' comments allowed, then one byte per pixel, row major. Maxval must fit in
one byte; the writer always emits 255.
"""

import numpy as np


class PgmError(IOError):
    """Malformed or unsupported PGM data."""


def write_pgm(path, frame):
    """Write a 2-D uint8 array as binary PGM."""
    arr = np.asarray(frame)
    if arr.ndim != 2:
        raise ValueError("frame must be a 2-D array")
    arr = arr.astype(np.uint8, copy=False)
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(arr.tobytes())


def read_pgm(path):
    """Read a binary PGM file into a 2-D uint8 array."""
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise PgmError("not a binary PGM (missing P5 magic)")

    # Header tokens may be separated by any whitespace and '#' comments.
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise PgmError("truncated PGM header")
        try:
            fields.append(int(data[start:pos]))
        except ValueError:
            raise PgmError(f"bad header token {data[start:pos]!r}") from None
    pos += 1  # single whitespace byte after maxval

    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PgmError(f"bad dimensions {width}x{height}")
    if not 0 < maxval < 256:
        raise PgmError(f"unsupported maxval {maxval} (need 1..255)")
    pixels = data[pos:pos + width * height]
    if len(pixels) < width * height:
        raise PgmError("pixel data shorter than width*height")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).copy()
