"""Filter-set and statistics files.

Text format::

    n=<n> k=<k> count=<m>
    0:1,2:3,...          # one network per line

Binary format (little-endian): magic ``SNF1``, ``n`` (u8), ``k`` (u8),
``count`` (u32), then ``count * k`` comparator byte pairs ``low, high``, then
the CRC-32 of every preceding byte (u32).

Statistics are JSON Lines, one record per level.
"""

from __future__ import annotations

import json
import re
import struct
import zlib
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from sortnet.generate import FilterSet

MAGIC = b"SNF1"
_HEADER = struct.Struct("<4sBBI")
_CRC = struct.Struct("<I")
_TEXT_HEADER = re.compile(r"^n=(\d+) k=(\d+) count=(\d+)$")


class CorruptFileError(ValueError):
    pass


def dumps_text(fs: FilterSet) -> str:
    lines = [f"n={fs.n} k={fs.k} count={len(fs)}"]
    for row in fs.networks:
        lines.append(",".join(f"{int(lo)}:{int(hi)}" for lo, hi in row))
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> FilterSet:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptFileError("empty filter-set file")
    m = _TEXT_HEADER.match(lines[0])
    if not m:
        raise CorruptFileError(f"bad header line {lines[0]!r}")
    n, k, count = map(int, m.groups())
    body = lines[1:]
    if len(body) != count:
        raise CorruptFileError(f"header announces {count} networks, found {len(body)}")
    nets = np.zeros((count, k, 2), dtype=np.int8)
    for r, line in enumerate(body):
        toks = line.split(",") if line else []
        if len(toks) != k:
            raise CorruptFileError(f"line {r + 2}: expected {k} comparators, found {len(toks)}")
        for t, tok in enumerate(toks):
            lo, sep, hi = tok.partition(":")
            if not sep or not lo.isdigit() or not hi.isdigit():
                raise CorruptFileError(f"line {r + 2}: bad comparator {tok!r}")
            nets[r, t] = (int(lo), int(hi))
    try:
        return FilterSet(n, k, nets)
    except ValueError as exc:
        raise CorruptFileError(str(exc)) from None


def dumps_binary(fs: FilterSet) -> bytes:
    if fs.n > 255 or fs.k > 255:
        raise ValueError("binary format stores n and k in one byte each")
    payload = _HEADER.pack(MAGIC, fs.n, fs.k, len(fs)) + fs.networks.astype(np.uint8).tobytes()
    return payload + _CRC.pack(zlib.crc32(payload))


def loads_binary(data: bytes) -> FilterSet:
    if len(data) < _HEADER.size + _CRC.size:
        raise CorruptFileError("file too short")
    magic, n, k, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFileError("bad magic bytes")
    expected = _HEADER.size + count * k * 2 + _CRC.size
    if len(data) != expected:
        raise CorruptFileError(f"expected {expected} bytes, found {len(data)}")
    (crc,) = _CRC.unpack_from(data, expected - _CRC.size)
    if zlib.crc32(data[: expected - _CRC.size]) != crc:
        raise CorruptFileError("checksum mismatch")
    body = np.frombuffer(data, dtype=np.uint8, count=count * k * 2, offset=_HEADER.size)
    try:
        return FilterSet(n, k, body.astype(np.int8).reshape(count, k, 2))
    except ValueError as exc:
        raise CorruptFileError(str(exc)) from None


def write_filter_set(fs: FilterSet, path: str | Path, fmt: str = "text") -> None:
    path = Path(path)
    if fmt == "text":
        path.write_text(dumps_text(fs))
    elif fmt == "binary":
        path.write_bytes(dumps_binary(fs))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_filter_set(path: str | Path) -> FilterSet:
    """Read either format; binary files are recognised by their magic bytes."""
    data = Path(path).read_bytes()
    if data.startswith(MAGIC):
        return loads_binary(data)
    try:
        return loads_text(data.decode("ascii"))
    except UnicodeDecodeError:
        raise CorruptFileError("neither a binary nor a text filter-set file") from None


def level_filename(n: int, k: int, fmt: str) -> str:
    return f"n{n}_k{k}." + ("txt" if fmt == "text" else "snf")


def write_stats(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def append_stats(record: dict, path: str | Path) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_stats(path: str | Path) -> Iterator[dict]:
    with open(path) as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)
