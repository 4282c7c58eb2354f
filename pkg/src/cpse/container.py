"""LMEC v1 weight-container format.

An LMEC stream carries the ordered weight tensors of a trained network
(and optionally an architecture graph) between a weight extractor and the
analyzer. Layout, bit-exact:

    bytes 0..3    magic ``4C 4D 45 43`` ("LMEC")
    bytes 4..7    u32 little-endian format version (currently 1)
    bytes 8..15   u64 little-endian manifest length in bytes
    manifest      UTF-8 JSON of exactly that length
    data region   raw little-endian scalars, offsets per the manifest

The manifest is ``{"layers": [...], "graph": <doc or null>}`` where each
layer entry holds ``name``, ``shape``, ``dtype`` ("f32" or "f64"),
``offset`` (relative to the first byte after the manifest) and ``nbytes``.
Layer order in the manifest is authoritative; the analysis cascade is
order-sensitive, so nothing here ever sorts by name.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContainerError

MAGIC = b"LMEC"
VERSION = 1

_HEADER = struct.Struct("<4sIQ")

# On-disk scalar encodings. Everything is little-endian regardless of host.
NUMPY_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}


@dataclass(eq=False)
class WeightTensor:
    """A named n-dimensional weight array stored row-major.

    ``data`` is the flat scalar buffer; its length must equal the product
    of ``shape``. ``dtype`` is the storage encoding, not necessarily the
    dtype used downstream (the analyzer promotes everything to float64).
    """

    name: str
    shape: tuple[int, ...]
    dtype: str
    data: np.ndarray

    @classmethod
    def from_array(cls, name: str, array: np.ndarray) -> "WeightTensor":
        arr = np.asarray(array)
        if arr.dtype == np.float32:
            code = "f32"
        else:
            code = "f64"
            arr = arr.astype(np.float64, copy=False)
        flat = np.ascontiguousarray(arr).reshape(-1)
        return cls(name=name, shape=tuple(int(d) for d in arr.shape),
                   dtype=code, data=flat)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    def element_count(self) -> int:
        return math.prod(self.shape)

    def nbytes(self) -> int:
        return self.element_count() * NUMPY_DTYPES[self.dtype].itemsize

    def as_ndarray(self) -> np.ndarray:
        """The tensor in its declared shape, promoted to float64."""
        return self.data.astype(np.float64, copy=False).reshape(self.shape)


@dataclass(eq=False)
class Container:
    """An ordered list of weight tensors plus an optional graph document."""

    version: int
    layers: list[WeightTensor]
    graph: dict | None = None

    def layer_names(self) -> list[str]:
        return [t.name for t in self.layers]


def _tensor_diagnostics(t: WeightTensor) -> list[str]:
    out = []
    label = f"layer '{t.name}'"
    if not isinstance(t.name, str) or not t.name:
        out.append("layer with empty name")
    if len(t.shape) < 1:
        out.append(f"{label}: empty shape")
    for d in t.shape:
        if int(d) < 1:
            out.append(f"{label}: zero-sized dimension")
            break
    if t.dtype not in NUMPY_DTYPES:
        out.append(f"{label}: unknown dtype '{t.dtype}'")
        return out
    if t.data.size != t.element_count():
        out.append(
            f"{label}: data length {t.data.size} does not match shape "
            f"{list(t.shape)}"
        )
    if t.data.dtype.kind != "f" or t.data.dtype.itemsize != NUMPY_DTYPES[t.dtype].itemsize:
        out.append(f"{label}: buffer dtype {t.data.dtype} does not match '{t.dtype}'")
    return out


def validate_container(c: Container) -> list[str]:
    """One human-readable diagnostic per invariant violation; [] if clean."""
    diags = []
    if c.version != VERSION:
        diags.append(f"unsupported version {c.version}")
    if not c.layers:
        diags.append("empty container")
    seen: set[str] = set()
    for t in c.layers:
        if t.name in seen:
            diags.append(f"duplicate layer name '{t.name}'")
        seen.add(t.name)
        diags.extend(_tensor_diagnostics(t))
    if c.graph is not None and not isinstance(c.graph, dict):
        diags.append("graph document is not a JSON object")
    return diags


def write_container(layers: list[WeightTensor], graph: dict | None = None) -> bytes:
    """Serialize tensors (in the given order) to an LMEC v1 byte stream."""
    c = Container(version=VERSION, layers=list(layers), graph=graph)
    diags = validate_container(c)
    if diags:
        raise ContainerError("invalid container: " + "; ".join(diags))

    entries = []
    blobs = []
    offset = 0
    for t in c.layers:
        raw = np.ascontiguousarray(t.data, dtype=NUMPY_DTYPES[t.dtype]).tobytes()
        entries.append(
            {
                "name": t.name,
                "shape": list(t.shape),
                "dtype": t.dtype,
                "offset": offset,
                "nbytes": len(raw),
            }
        )
        blobs.append(raw)
        offset += len(raw)

    manifest = json.dumps(
        {"layers": entries, "graph": graph},
        ensure_ascii=False,
        separators=(",", ":"),
    ).encode("utf-8")
    return b"".join([_HEADER.pack(MAGIC, VERSION, len(manifest)), manifest, *blobs])


def _manifest_entry(raw: dict, index: int) -> tuple[str, tuple[int, ...], str, int, int]:
    if not isinstance(raw, dict):
        raise ContainerError(f"bad manifest: layer entry {index} is not an object")
    try:
        name = raw["name"]
        shape = raw["shape"]
        dtype = raw["dtype"]
        offset = raw["offset"]
        nbytes = raw["nbytes"]
    except KeyError as exc:
        raise ContainerError(f"bad manifest: layer entry {index} missing {exc}") from None
    if not isinstance(name, str) or not name:
        raise ContainerError(f"bad manifest: layer entry {index} has no usable name")
    if (
        not isinstance(shape, list)
        or not shape
        or not all(isinstance(d, int) and d >= 1 for d in shape)
    ):
        raise ContainerError(f"layer '{name}': bad shape {shape!r}")
    if dtype not in NUMPY_DTYPES:
        raise ContainerError(f"layer '{name}': unknown dtype '{dtype}'")
    if not isinstance(offset, int) or offset < 0 or not isinstance(nbytes, int):
        raise ContainerError(f"layer '{name}': bad offset/nbytes")
    return name, tuple(shape), dtype, offset, nbytes


def read_container(blob: bytes) -> Container:
    """Parse and validate an LMEC v1 byte stream.

    Rejects malformed input outright; never returns a partial container.
    """
    if len(blob) < _HEADER.size:
        raise ContainerError("truncated header")
    magic, version, manifest_len = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ContainerError("not an LMEC file")
    if version != VERSION:
        raise ContainerError(f"unsupported LMEC version {version}")
    data_start = _HEADER.size + manifest_len
    if len(blob) < data_start:
        raise ContainerError("truncated manifest")
    try:
        manifest = json.loads(blob[_HEADER.size:data_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"bad manifest JSON: {exc}") from None
    if not isinstance(manifest, dict) or not isinstance(manifest.get("layers"), list):
        raise ContainerError("bad manifest: missing 'layers' list")
    graph = manifest.get("graph")
    if graph is not None and not isinstance(graph, dict):
        raise ContainerError("bad manifest: graph is not an object")

    data_len = len(blob) - data_start
    layers = []
    spans = []
    names: set[str] = set()
    for i, raw in enumerate(manifest["layers"]):
        name, shape, dtype, offset, nbytes = _manifest_entry(raw, i)
        if name in names:
            raise ContainerError(f"duplicate layer name '{name}'")
        names.add(name)
        np_dtype = NUMPY_DTYPES[dtype]
        expected = math.prod(shape) * np_dtype.itemsize
        if nbytes != expected:
            raise ContainerError(
                f"layer '{name}': manifest/data inconsistency, declares "
                f"{nbytes} bytes but shape implies {expected}"
            )
        if offset + nbytes > data_len:
            raise ContainerError(f"layer '{name}': truncated data region")
        spans.append((offset, offset + nbytes, name))
        data = np.frombuffer(
            blob, dtype=np_dtype, count=math.prod(shape), offset=data_start + offset
        )
        # Copy out of the input buffer and normalize to native byte order.
        data = data.astype(np_dtype.newbyteorder("="))
        layers.append(WeightTensor(name=name, shape=shape, dtype=dtype, data=data))

    spans.sort()
    for (_, end_a, name_a), (start_b, _, name_b) in zip(spans, spans[1:]):
        if start_b < end_a:
            raise ContainerError(
                f"overlapping data blobs for layers '{name_a}' and '{name_b}'"
            )

    if not layers:
        raise ContainerError("empty container")
    return Container(version=version, layers=layers, graph=graph)


def write_lmec(path: str | Path, layers: list[WeightTensor], graph: dict | None = None) -> None:
    Path(path).write_bytes(write_container(layers, graph))


def read_lmec(path: str | Path) -> Container:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ContainerError(f"cannot open '{path}': {exc.strerror or exc}") from None
    return read_container(blob)
