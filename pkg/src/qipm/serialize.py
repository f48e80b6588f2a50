"""File formats for problem data.

Both formats are JSON documents.

Cone-program instance::

    {"m": ..., "n": ..., "cone_sizes": [...],
     "A": [row-major flat entries], "b": [...], "c": [...],
     "meta": {...}}          # meta optional

SVM dataset::

    {"n": ..., "m": ..., "p": ..., "seed": ...,
     "labels": [...], "X": [column-major flat entries]}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .jordan import BlockVector, ConeStructure
from .socp import SocpInstance
from .svm import SvmDataset, SvmMeta

__all__ = [
    "write_instance",
    "read_instance",
    "write_dataset",
    "read_dataset",
]


def _dump(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def write_instance(inst: SocpInstance, path: str | Path) -> None:
    doc = {
        "m": inst.m,
        "n": inst.n,
        "cone_sizes": list(inst.cones.block_sizes),
        "A": inst.A.ravel().tolist(),
        "b": inst.b.tolist(),
        "c": inst.c.values.tolist(),
    }
    if inst.meta:
        doc["meta"] = inst.meta
    _dump(doc, path)


def read_instance(path: str | Path) -> SocpInstance:
    doc = json.loads(Path(path).read_text())
    m, n = int(doc["m"]), int(doc["n"])
    cones = ConeStructure(tuple(int(k) for k in doc["cone_sizes"]))
    if cones.n != n:
        raise ValueError(f"cone sizes sum to {cones.n}, expected n = {n}")
    A = np.asarray(doc["A"], dtype=float).reshape(m, n)
    b = np.asarray(doc["b"], dtype=float)
    c = BlockVector(cones, np.asarray(doc["c"], dtype=float))
    return SocpInstance(A=A, b=b, c=c, cones=cones, meta=doc.get("meta"))


def write_dataset(data: SvmDataset, path: str | Path) -> None:
    _dump(
        {
            "n": data.n,
            "m": data.m,
            "p": data.meta.p,
            "seed": data.meta.seed,
            "labels": data.y.tolist(),
            "X": data.X.ravel(order="F").tolist(),
        },
        path,
    )


def read_dataset(path: str | Path) -> SvmDataset:
    doc = json.loads(Path(path).read_text())
    n, m = int(doc["n"]), int(doc["m"])
    X = np.asarray(doc["X"], dtype=float).reshape((n, m), order="F")
    y = np.asarray(doc["labels"], dtype=float)
    return SvmDataset(X=X, y=y, meta=SvmMeta(n, m, float(doc["p"]), int(doc["seed"])))


def sniff_kind(path: str | Path) -> str:
    """'instance' or 'dataset', by the document's fields."""
    doc = json.loads(Path(path).read_text())
    if "cone_sizes" in doc:
        return "instance"
    if "labels" in doc:
        return "dataset"
    raise ValueError(f"{path}: neither a cone-program instance nor an SVM dataset")
