"""Soft-margin linear SVM: random instances, cone-program reduction, scoring.

The training problem

    min |w|^2 + C * sum_i xi_i
    s.t. y_i (w.x_i + b) = 1 - xi_i,   xi_i >= 0

is turned into a cone program by introducing t with the block
(t+1; t; w) constrained to a Lorentz cone, which is equivalent to
2t + 1 >= |w|^2, so minimising t stands in for minimising |w|^2.  In the
default (bias-folded) variant the bias joins the weight block,
(t+1; t; w; b) in one cone of dimension n+3, giving a layout with a simple
constructive interior starting point; the textbook variant with a separate
nonnegative bias block is available behind a flag.

Random instances come from a planted-hyperplane family: a uniformly random
unit normal, standard normal points rescaled so the smallest planted
margin is one, and labels flipped independently with probability p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .jordan import BlockVector, ConeStructure
from .socp import Iterate, SocpInstance

__all__ = [
    "SvmMeta",
    "SvmDataset",
    "Classifier",
    "generate",
    "to_socp",
    "extract_classifier",
    "accuracy",
]


class SvmMeta(NamedTuple):
    n: int
    m: int
    p: float
    seed: int


@dataclass(frozen=True, eq=False)
class SvmDataset:
    """Training examples as columns of X with labels in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray
    meta: SvmMeta

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[1],):
            raise ValueError("X must be n-by-m with one label per column")
        if not np.isfinite(X).all():
            raise ValueError("X must be finite")
        if y.size and not np.isin(y, (-1.0, 1.0)).all():
            raise ValueError("labels must be -1 or +1")
        X = X.copy()
        X.setflags(write=False)
        y = y.copy()
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Classifier:
    """Linear decision rule x -> sign(w.x + b)."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if not (np.isfinite(w).all() and np.isfinite(self.b)):
            raise ValueError("classifier parameters must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def scores(self, X: np.ndarray) -> np.ndarray:
        return self.w @ X + self.b


def _planted_sample(rng, w_star: np.ndarray, m: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    n = w_star.shape[0]
    X = rng.standard_normal((n, m))
    if m == 0:
        return X, np.zeros(0)
    scores = w_star @ X
    while np.abs(scores).min() == 0.0:  # measure-zero guard
        X = rng.standard_normal((n, m))
        scores = w_star @ X
    X = X / np.abs(scores).min()
    labels = np.sign(w_star @ X)
    flip = rng.random(m) < p
    return X, np.where(flip, -labels, labels)


def generate(n: int, m: int, p: float, seed: int) -> tuple[SvmDataset, SvmDataset]:
    """Sample a training set of size m and a test set of size m // 3.

    Both sets share the planted hyperplane; each is independently rescaled
    so its smallest planted margin is one.  Fully deterministic in the
    seed (draw order: normal, train points, train flips, test points,
    test flips).
    """
    if n < 2 or m < 2:
        raise ValueError("need n >= 2 features and m >= 2 points")
    if not 0.0 <= p <= 1.0:
        raise ValueError("flip probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    w_star = rng.standard_normal(n)
    while np.linalg.norm(w_star) == 0.0:
        w_star = rng.standard_normal(n)
    w_star = w_star / np.linalg.norm(w_star)
    X_tr, y_tr = _planted_sample(rng, w_star, m, p)
    X_te, y_te = _planted_sample(rng, w_star, m // 3, p)
    return (
        SvmDataset(X_tr, y_tr, SvmMeta(n, m, p, seed)),
        SvmDataset(X_te, y_te, SvmMeta(n, m // 3, p, seed)),
    )


def to_socp(data: SvmDataset, C: float, folded: bool = True) -> SocpInstance:
    """Reduce the training problem to a cone program.

    Variable layout is (t+1, t, w_1..w_n, b, xi_1..xi_m) in both variants;
    only the cone structure differs: folded uses one block (t+1; t; w; b)
    of size n+3, unfolded keeps (t+1; t; w) of size n+2 plus a nonnegative
    bias block.  The m constraint rows encode w.x_i + b + y_i xi_i = y_i,
    i.e. y_i (w.x_i + b) = 1 - xi_i, and one extra row pins (t+1) - t = 1.
    The objective selects t + C * sum_i xi_i.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    n, m = data.n, data.m
    if m == 0:
        raise ValueError("cannot train on an empty dataset")
    nv = n + m + 3
    A = np.zeros((m + 1, nv))
    A[:m, 2 : n + 2] = data.X.T
    A[:m, n + 2] = 1.0
    A[np.arange(m), n + 3 + np.arange(m)] = data.y
    A[m, 0] = 1.0
    A[m, 1] = -1.0
    b = np.concatenate([data.y, [1.0]])
    c = np.zeros(nv)
    c[1] = 1.0
    c[n + 3 :] = C
    if folded:
        cones = ConeStructure((n + 3,) + (1,) * m)
    else:
        cones = ConeStructure((n + 2, 1) + (1,) * m)
    meta = {
        "kind": "svm",
        "folded": folded,
        "n_features": n,
        "m_points": m,
        "C": float(C),
    }
    return SocpInstance(A=A, b=b, c=BlockVector(cones, c), cones=cones, meta=meta)


def extract_classifier(inst: SocpInstance, solution: Iterate) -> Classifier:
    """Read (w, b) off the fixed coordinate layout of the reduction.

    A pure projection: slack and norm-surrogate coordinates are ignored.
    """
    meta = inst.meta or {}
    if meta.get("kind") != "svm":
        raise ValueError("instance does not carry the SVM reduction layout")
    n = int(meta["n_features"])
    if solution.x.structure != inst.cones or inst.cones.n != n + int(meta["m_points"]) + 3:
        raise ValueError("solution layout does not match the reduction")
    vals = solution.x.values
    return Classifier(w=vals[2 : n + 2], b=float(vals[n + 2]))


def accuracy(clf: Classifier, data: SvmDataset) -> float:
    """Fraction of points with y * (w.x + b) > 0; zero scores count as errors."""
    if data.m == 0:
        raise ValueError("accuracy is undefined on an empty dataset")
    if clf.w.shape != (data.n,):
        raise ValueError("classifier dimension does not match the dataset")
    return float(np.mean(data.y * clf.scores(data.X) > 0.0))
