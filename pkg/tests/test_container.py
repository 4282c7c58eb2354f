"""LMEC container format: byte layout, round trips, rejection of bad input."""

import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings

from cpse.container import (
    Container,
    ContainerError,
    WeightTensor,
    read_container,
    read_lmec,
    validate_container,
    write_container,
    write_lmec,
)
from conftest import assert_containers_equal
from lmec_strategies import layer_lists


def identity_tensor(name="fc", dtype=np.float32):
    return WeightTensor.from_array(name, np.eye(2, dtype=dtype))


def raw_stream(entries, data, graph=None, version=1, magic=b"LMEC"):
    manifest = json.dumps({"layers": entries, "graph": graph}).encode()
    return magic + struct.pack("<IQ", version, len(manifest)) + manifest + data


# --- write_container ---

def test_write_single_f32_tensor_data_region_is_16_bytes():
    blob = write_container([identity_tensor()])
    _, _, mlen = struct.unpack_from("<4sIQ", blob, 0)
    assert len(blob) - 16 - mlen == 16  # 4 scalars x 4 bytes


def test_write_empty_layer_list_rejected():
    with pytest.raises(ContainerError, match="empty container"):
        write_container([])


def test_write_duplicate_names_rejected():
    with pytest.raises(ContainerError, match="duplicate layer name"):
        write_container([identity_tensor("a"), identity_tensor("a")])


def test_write_shape_data_mismatch_rejected():
    bad = WeightTensor(name="x", shape=(2, 3), dtype="f64", data=np.zeros(4))
    with pytest.raises(ContainerError, match="does not match shape"):
        write_container([bad])


def test_magic_and_version_bytes():
    blob = write_container([identity_tensor()])
    assert blob[:4] == b"\x4c\x4d\x45\x43"
    assert struct.unpack_from("<I", blob, 4)[0] == 1


# --- read_container ---

def test_round_trip_identity_tensor():
    t = identity_tensor()
    c = read_container(write_container([t]))
    assert len(c.layers) == 1
    assert c.layers[0].shape == (2, 2)
    assert c.layers[0].dtype == "f32"
    np.testing.assert_array_equal(
        c.layers[0].data, np.array([1, 0, 0, 1], dtype=np.float32)
    )


def test_wrong_magic_rejected():
    blob = bytearray(write_container([identity_tensor()]))
    blob[:4] = b"NOPE"
    with pytest.raises(ContainerError, match="not an LMEC file"):
        read_container(bytes(blob))


def test_unsupported_version_rejected():
    blob = bytearray(write_container([identity_tensor()]))
    struct.pack_into("<I", blob, 4, 9)
    with pytest.raises(ContainerError, match="unsupported LMEC version 9"):
        read_container(bytes(blob))


def test_truncated_header_rejected():
    with pytest.raises(ContainerError, match="truncated header"):
        read_container(b"LMEC\x01")


def test_truncated_manifest_rejected():
    blob = write_container([identity_tensor()])
    _, _, mlen = struct.unpack_from("<4sIQ", blob, 0)
    with pytest.raises(ContainerError, match="truncated manifest"):
        read_container(blob[: 16 + mlen - 2])


def test_truncated_data_region_rejected():
    # manifest declares 16 data bytes, stream holds 12
    blob = write_container([identity_tensor()])
    with pytest.raises(ContainerError, match="truncated"):
        read_container(blob[:-4])


def test_bad_manifest_json_rejected():
    stream = b"LMEC" + struct.pack("<IQ", 1, 3) + b"{{{"
    with pytest.raises(ContainerError, match="bad manifest JSON"):
        read_container(stream)


def test_nbytes_shape_inconsistency_rejected():
    entries = [{"name": "x", "shape": [2, 2], "dtype": "f32", "offset": 0, "nbytes": 12}]
    with pytest.raises(ContainerError, match="manifest/data inconsistency"):
        read_container(raw_stream(entries, b"\x00" * 12))


def test_overlapping_blobs_rejected():
    entries = [
        {"name": "a", "shape": [2], "dtype": "f32", "offset": 0, "nbytes": 8},
        {"name": "b", "shape": [2], "dtype": "f32", "offset": 4, "nbytes": 8},
    ]
    with pytest.raises(ContainerError, match="overlapping"):
        read_container(raw_stream(entries, b"\x00" * 12))


def test_gap_between_blobs_accepted():
    entries = [
        {"name": "a", "shape": [2], "dtype": "f32", "offset": 0, "nbytes": 8},
        {"name": "b", "shape": [2], "dtype": "f32", "offset": 12, "nbytes": 8},
    ]
    c = read_container(raw_stream(entries, b"\x00" * 20))
    assert c.layer_names() == ["a", "b"]


def test_zero_dimension_in_manifest_rejected():
    entries = [{"name": "x", "shape": [0, 3], "dtype": "f32", "offset": 0, "nbytes": 0}]
    with pytest.raises(ContainerError, match="bad shape"):
        read_container(raw_stream(entries, b""))


def test_duplicate_names_in_manifest_rejected():
    entries = [
        {"name": "conv1", "shape": [1], "dtype": "f32", "offset": 0, "nbytes": 4},
        {"name": "conv1", "shape": [1], "dtype": "f32", "offset": 4, "nbytes": 4},
    ]
    with pytest.raises(ContainerError, match="duplicate layer name 'conv1'"):
        read_container(raw_stream(entries, b"\x00" * 8))


def test_empty_manifest_layers_rejected():
    with pytest.raises(ContainerError, match="empty container"):
        read_container(raw_stream([], b""))


def test_graph_document_round_trips():
    graph = {"root": "a", "nodes": ["a", "b"], "edges": [["a", "b"]]}
    blob = write_container([identity_tensor("a"), identity_tensor("b")], graph=graph)
    assert read_container(blob).graph == graph


# --- validate_container ---

def test_validate_well_formed_is_clean(small_container):
    assert validate_container(small_container) == []


def test_validate_zero_sized_dimension():
    t = WeightTensor(name="x", shape=(0, 3), dtype="f32",
                     data=np.zeros(0, dtype=np.float32))
    diags = validate_container(Container(1, [t]))
    assert any("zero-sized dimension" in d for d in diags)
    assert any("layer 'x'" in d for d in diags)


def test_validate_duplicate_names():
    diags = validate_container(
        Container(1, [identity_tensor("conv1"), identity_tensor("conv1")])
    )
    assert "duplicate layer name 'conv1'" in diags


def test_validate_empty_shape():
    t = WeightTensor(name="x", shape=(), dtype="f32",
                     data=np.zeros(0, dtype=np.float32))
    assert any("empty shape" in d for d in validate_container(Container(1, [t])))


def test_validate_unknown_dtype():
    t = WeightTensor(name="x", shape=(2,), dtype="f16",
                     data=np.zeros(2, dtype=np.float32))
    assert any("unknown dtype" in d for d in validate_container(Container(1, [t])))


# --- ordering and file helpers ---

def test_layer_order_preserved(tmp_path):
    rng = np.random.default_rng(7)
    layers = [
        WeightTensor.from_array(name, rng.standard_normal((3, 3)))
        for name in ["zz", "aa", "mm", "bb"]
    ]
    path = tmp_path / "stack.lmec"
    write_lmec(path, layers)
    assert read_lmec(path).layer_names() == ["zz", "aa", "mm", "bb"]


def test_read_lmec_missing_file(tmp_path):
    with pytest.raises(ContainerError, match="cannot open"):
        read_lmec(tmp_path / "nope.lmec")


def test_f64_round_trip_bit_exact():
    data = np.array([1.1, -2.2, 3.0303, 4e-300, -0.0, 1e300], dtype=np.float64)
    t = WeightTensor.from_array("w", data.reshape(2, 3))
    c = read_container(write_container([t]))
    assert c.layers[0].data.tobytes() == data.tobytes()


@settings(max_examples=200, deadline=None)
@given(layers=layer_lists())
def test_round_trip_property(layers):
    graph = {"root": layers[0].name, "nodes": [t.name for t in layers], "edges": []}
    original = Container(version=1, layers=layers, graph=graph)
    restored = read_container(write_container(layers, graph=graph))
    assert_containers_equal(original, restored)
