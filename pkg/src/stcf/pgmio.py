"""Binary PGM (P5, maxval 255) image I/O mapped to floats in [0, 1]."""

from __future__ import annotations

import os

import numpy as np


def read_pgm(path) -> np.ndarray:
    """Read a binary P5 PGM as a float array scaled by 1/255.

    Accepts '#' comments in the header; requires maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file: %s" % path)
    fields = []
    pos = 2
    n = len(data)
    while len(fields) < 3:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header: %s" % path)
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise ValueError("non-integer PGM header field in %s" % path) from None
    if maxval != 255:
        raise ValueError("only maxval 255 supported, got %d" % maxval)
    if width <= 0 or height <= 0:
        raise ValueError("bad PGM dimensions %dx%d" % (width, height))
    need = width * height
    raw = data[pos:pos + need]
    if len(raw) != need:
        raise ValueError("PGM pixel data truncated: expected %d bytes, got %d"
                         % (need, len(raw)))
    img = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    return img.astype(float) / 255.0


def write_pgm(path, img) -> None:
    """Write floats in [0, 1] as binary P5; values are clipped, then
    mapped by floor(v * 255 + 0.5).  The write is atomic (tmp + rename)."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError("image must be 2-D")
    pixels = np.floor(np.clip(img, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    h, w = pixels.shape
    header = ("P5\n%d %d\n255\n" % (w, h)).encode("ascii")
    tmp = str(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(pixels.tobytes())
    os.replace(tmp, path)
