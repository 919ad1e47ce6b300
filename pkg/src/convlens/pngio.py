"""Minimal PNG and PPM-P6 codecs.

Reads 8-bit RGB/RGBA PNG (non-interlaced) and 8-bit PPM P6; writes 8-bit RGB
PNG with filter 0 and a fixed zlib level, so output bytes are deterministic.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import ImageFormatError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def decode_png(data: bytes) -> np.ndarray:
    """PNG bytes -> (H, W, 3) uint8. Alpha, if present, is dropped."""
    if not data.startswith(PNG_SIGNATURE):
        raise ImageFormatError("not a PNG file")
    pos = 8
    ihdr = None
    idat = bytearray()
    while pos + 8 <= len(data):
        length, ctype = struct.unpack_from(">I4s", data, pos)
        pos += 8
        chunk = data[pos:pos + length]
        if len(chunk) != length:
            raise ImageFormatError("truncated PNG chunk")
        pos += length + 4  # skip CRC
        if ctype == b"IHDR":
            ihdr = chunk
        elif ctype == b"IDAT":
            idat.extend(chunk)
        elif ctype == b"IEND":
            break
    if ihdr is None or not idat:
        raise ImageFormatError("PNG is missing IHDR or IDAT")
    w, h, depth, color, _comp, _filt, interlace = struct.unpack(">IIBBBBB", ihdr)
    if depth != 8:
        raise ImageFormatError(f"unsupported PNG bit depth {depth} (only 8)")
    if color not in (2, 6):
        raise ImageFormatError(
            f"unsupported PNG color type {color} (only RGB/RGBA)"
        )
    if interlace != 0:
        raise ImageFormatError("interlaced PNG is not supported")
    channels = 3 if color == 2 else 4
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise ImageFormatError(f"corrupt PNG pixel data: {exc}") from None
    stride = w * channels
    if len(raw) != h * (stride + 1):
        raise ImageFormatError("PNG pixel data has the wrong length")
    img = np.empty((h, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(h):
        row_start = y * (stride + 1)
        ftype = raw[row_start]
        row = np.frombuffer(raw, dtype=np.uint8,
                            count=stride, offset=row_start + 1).copy()
        img[y] = _unfilter_row(ftype, row, prev, channels)
        prev = img[y]
    pixels = img.reshape(h, w, channels)
    return np.ascontiguousarray(pixels[:, :, :3])


def _unfilter_row(ftype, row, prev, bpp):
    if ftype == 0:
        return row
    if ftype == 2:
        return (row.astype(np.int32) + prev).astype(np.uint8)
    out = row.astype(np.int32)
    prev32 = prev.astype(np.int32)
    if ftype == 1:
        for i in range(bpp, len(out)):
            out[i] = (out[i] + out[i - bpp]) & 0xFF
    elif ftype == 3:
        for i in range(len(out)):
            left = out[i - bpp] if i >= bpp else 0
            out[i] = (out[i] + (left + prev32[i]) // 2) & 0xFF
    elif ftype == 4:
        for i in range(len(out)):
            a = out[i - bpp] if i >= bpp else 0
            b = prev32[i]
            c = prev32[i - bpp] if i >= bpp else 0
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            out[i] = (out[i] + pred) & 0xFF
    else:
        raise ImageFormatError(f"unknown PNG filter type {ftype}")
    return out.astype(np.uint8)


def encode_png(pixels: np.ndarray) -> bytes:
    """(H, W, 3) uint8 -> PNG bytes (filter 0 rows, deterministic)."""
    h, w, _ = pixels.shape
    raw = bytearray()
    for y in range(h):
        raw.append(0)
        raw.extend(pixels[y].tobytes())
    out = bytearray(PNG_SIGNATURE)
    _append_chunk(out, b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0))
    _append_chunk(out, b"IDAT", zlib.compress(bytes(raw), _ZLIB_LEVEL))
    _append_chunk(out, b"IEND", b"")
    return bytes(out)


def _append_chunk(out: bytearray, ctype: bytes, payload: bytes):
    out.extend(struct.pack(">I", len(payload)))
    out.extend(ctype)
    out.extend(payload)
    out.extend(struct.pack(">I", zlib.crc32(ctype + payload) & 0xFFFFFFFF))


def decode_ppm(data: bytes) -> np.ndarray:
    """Binary PPM (P6, maxval 255) -> (H, W, 3) uint8."""
    if not data.startswith(b"P6"):
        raise ImageFormatError("not a P6 PPM file")
    fields = []
    pos = 2
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
            raise ImageFormatError("truncated PPM header")
        fields.append(data[start:pos])
    pos += 1  # single whitespace byte after maxval
    try:
        w, h, maxval = (int(f) for f in fields)
    except ValueError:
        raise ImageFormatError("malformed PPM header") from None
    if maxval != 255:
        raise ImageFormatError(f"unsupported PPM maxval {maxval} (only 255)")
    need = w * h * 3
    body = data[pos:pos + need]
    if len(body) != need:
        raise ImageFormatError("truncated PPM pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).copy()
