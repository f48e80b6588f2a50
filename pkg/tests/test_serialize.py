"""Instance and dataset file formats."""

import json

import numpy as np
import numpy.testing as npt
import pytest

from qipm import generate, to_socp
from qipm.serialize import (
    read_dataset,
    read_instance,
    sniff_kind,
    write_dataset,
    write_instance,
)


def test_instance_round_trip(tmp_path):
    train, _ = generate(3, 6, 0.2, seed=9)
    inst = to_socp(train, 1.5)
    path = tmp_path / "inst.json"
    write_instance(inst, path)
    doc = json.loads(path.read_text())
    assert set(doc) >= {"m", "n", "cone_sizes", "A", "b", "c"}
    assert len(doc["A"]) == doc["m"] * doc["n"]  # dense row-major
    back = read_instance(path)
    npt.assert_array_equal(back.A, inst.A)
    npt.assert_array_equal(back.b, inst.b)
    npt.assert_array_equal(back.c.values, inst.c.values)
    assert back.cones.block_sizes == inst.cones.block_sizes
    assert back.meta == inst.meta


def test_instance_schema_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"m": 1, "n": 3, "cone_sizes": [2], "A": [1, 0], "b": [0], "c": [0, 0]}))
    with pytest.raises(ValueError):
        read_instance(path)


def test_dataset_round_trip(tmp_path):
    train, _ = generate(4, 7, 0.4, seed=3)
    path = tmp_path / "data.json"
    write_dataset(train, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"n", "m", "p", "seed", "labels", "X"}
    # column-major flattening
    npt.assert_allclose(np.asarray(doc["X"][:4]), train.X[:, 0])
    back = read_dataset(path)
    npt.assert_array_equal(back.X, train.X)
    npt.assert_array_equal(back.y, train.y)
    assert back.meta == train.meta


def test_write_is_deterministic(tmp_path):
    train, _ = generate(3, 5, 0.1, seed=1)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_dataset(train, p1)
    write_dataset(train, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_sniff_kind(tmp_path):
    train, _ = generate(3, 5, 0.1, seed=2)
    dpath = tmp_path / "d.json"
    write_dataset(train, dpath)
    assert sniff_kind(dpath) == "dataset"
    ipath = tmp_path / "i.json"
    write_instance(to_socp(train, 1.0), ipath)
    assert sniff_kind(ipath) == "instance"
    other = tmp_path / "o.json"
    other.write_text("{}")
    with pytest.raises(ValueError):
        sniff_kind(other)
