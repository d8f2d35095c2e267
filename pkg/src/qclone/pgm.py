"""Minimal reader/writer for 8-bit binary PGM (P5) images."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ImageParse


def _read_tokens(data: bytes, n: int) -> tuple[list[int], int]:
    """First n whitespace-separated numeric header tokens, skipping comments."""
    tokens: list[int] = []
    pos = 0
    while len(tokens) < n:
        if pos >= len(data):
            raise ImageParse("truncated header")
        c = data[pos : pos + 1]
        if c == b"#":
            eol = data.find(b"\n", pos)
            if eol == -1:
                raise ImageParse("unterminated comment")
            pos = eol + 1
        elif c.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tok = data[pos:end]
            if not tok.isdigit():
                raise ImageParse(f"bad header token {tok!r}")
            tokens.append(int(tok))
            pos = end
    return tokens, pos


def read_pgm(path: str | Path) -> np.ndarray:
    """Load a P5 PGM with maxval <= 255 as a (height, width) uint8 array."""
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ImageParse("missing P5 magic")
    (width, height, maxval), pos = _read_tokens(data[2:], 3)
    pos += 2
    if maxval <= 0 or maxval > 255:
        raise ImageParse(f"unsupported maxval {maxval}")
    if width < 1 or height < 1:
        raise ImageParse(f"bad dimensions {width}x{height}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height]
    if len(raster) != width * height:
        raise ImageParse(
            f"raster holds {len(raster)} bytes, expected {width * height}"
        )
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    """Write a (height, width) array of 0..255 values as binary PGM."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise ImageParse(f"expected 2-d image, got shape {img.shape}")
    if img.size and (img.min() < 0 or img.max() > 255):
        raise ImageParse("pixel values outside 0..255")
    height, width = img.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.astype(np.uint8).tobytes())
