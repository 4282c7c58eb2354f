"""Minimal standalone writer for the LMEC v1 container format.

The analyzer consumes this wire format, so the layout here must stay
bit-exact: magic "LMEC", u32 LE version 1, u64 LE manifest length, UTF-8
JSON manifest ``{"layers": [...], "graph": null}`` with per-layer name,
shape, dtype, offset (relative to the first data byte) and nbytes, then
the raw little-endian data region with no padding.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"LMEC"
VERSION = 1

_HEADER = struct.Struct("<4sIQ")
_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}


def write_lmec_bytes(tensors: list[tuple[str, np.ndarray]], graph: dict | None = None) -> bytes:
    """Serialize named arrays, preserving order. float32 arrays are stored
    as f32, everything else as f64."""
    if not tensors:
        raise ValueError("empty container")
    entries = []
    blobs = []
    offset = 0
    seen = set()
    for name, array in tensors:
        if name in seen:
            raise ValueError(f"duplicate layer name '{name}'")
        seen.add(name)
        arr = np.asarray(array)
        code = "f32" if arr.dtype == np.float32 else "f64"
        raw = np.ascontiguousarray(arr, dtype=_DTYPES[code]).tobytes()
        entries.append({
            "name": name,
            "shape": [int(d) for d in arr.shape],
            "dtype": code,
            "offset": offset,
            "nbytes": len(raw),
        })
        blobs.append(raw)
        offset += len(raw)
    manifest = json.dumps(
        {"layers": entries, "graph": graph},
        ensure_ascii=False,
        separators=(",", ":"),
    ).encode("utf-8")
    return b"".join([_HEADER.pack(MAGIC, VERSION, len(manifest)), manifest, *blobs])


def write_lmec_file(path, tensors, graph=None) -> None:
    with open(path, "wb") as fh:
        fh.write(write_lmec_bytes(tensors, graph))
