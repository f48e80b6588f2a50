"""Problem data, duality gap, central-path distance and scaling identities."""

import numpy as np
import numpy.testing as npt
import pytest

from helpers import near_path_pair, random_interior, random_structure, random_vector
from qipm import (
    BlockVector,
    ConeDomainError,
    ConeStructure,
    Iterate,
    RankDeficientError,
    SocpInstance,
    StructureMismatchError,
    central_path_distance,
    duality_gap,
    identity,
    in_neighborhood,
    linear_residuals,
    norms_and_extremes,
    scale_to_frame,
)
from qipm.jordan import power


def toy_instance():
    st = ConeStructure((2, 1))
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, -1.0]])
    x = BlockVector(st, [2.0, 0.5, 1.0])
    c = BlockVector(st, [1.0, 0.0, 2.0])
    return SocpInstance(A=A, b=A @ x.values, c=c, cones=st), x


def test_instance_validation():
    st = ConeStructure((2, 1))
    c = BlockVector(st, np.zeros(3))
    with pytest.raises(RankDeficientError):
        SocpInstance(
            A=np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0]]),
            b=np.zeros(2),
            c=c,
            cones=st,
        )
    with pytest.raises(RankDeficientError):
        # more rows than columns
        SocpInstance(A=np.eye(4)[:, :3] + np.eye(4, 3), b=np.zeros(4), c=c, cones=st)
    with pytest.raises(ValueError):
        SocpInstance(A=np.ones((1, 2)), b=np.zeros(1), c=c, cones=st)


def test_duality_gap_examples():
    st = ConeStructure((2, 3, 1))
    e = identity(st)
    assert duality_gap(e, e) == pytest.approx(1.0)
    assert duality_gap(2.0 * e, 3.0 * e) == pytest.approx(6.0)
    with pytest.raises(StructureMismatchError):
        duality_gap(e, identity(ConeStructure((6,))))


def test_iterate_recomputes_gap():
    _, x = toy_instance()
    s = BlockVector(x.structure, [1.0, 0.1, 0.5])
    it = Iterate(x, np.zeros(2), s)
    assert it.mu == pytest.approx(x.dot(s) / x.structure.r)
    assert np.isfinite(it.d)
    # non-interior primal leaves the distance undefined
    outside = BlockVector(x.structure, [0.0, 1.0, 1.0])
    assert np.isnan(Iterate(outside, np.zeros(2), s).d)


def test_distance_on_central_point():
    st = ConeStructure((4, 2))
    e = identity(st)
    for nu in (0.5, 1.0, 7.0):
        assert central_path_distance(e, nu * e, nu) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        central_path_distance(e, e, 0.0)
    with pytest.raises(ConeDomainError):
        central_path_distance(BlockVector(st, -e.values), e, 1.0)


def test_distance_symmetry():
    rng = np.random.default_rng(21)
    for _ in range(100):
        st = random_structure(rng)
        x = random_interior(rng, st)
        s = random_interior(rng, st)
        for nu in (0.3, 1.0, 2.5):
            npt.assert_allclose(
                central_path_distance(x, s, nu),
                central_path_distance(s, x, nu),
                rtol=1e-9,
                atol=1e-9,
            )


def test_gap_distance_inequality():
    # |x.s - r nu| <= sqrt(r/2) d(x, s, nu)
    rng = np.random.default_rng(22)
    for _ in range(200):
        st = random_structure(rng)
        x = random_interior(rng, st)
        s = random_interior(rng, st)
        nu = float(np.exp(rng.standard_normal()))
        gap = x.dot(s)
        d = central_path_distance(x, s, nu)
        assert abs(gap - st.r * nu) <= np.sqrt(st.r / 2.0) * d + 1e-8 * (1 + abs(gap))


def test_inverse_norm_inequality_near_path():
    # d(x, s, mu) <= eta mu implies (1+eta) |s^{-1}|_2 >= |x/mu|_2
    rng = np.random.default_rng(23)
    eta = 0.01
    checked = 0
    for _ in range(200):
        st = random_structure(rng)
        x, s = near_path_pair(rng, st, eta)
        mu = duality_gap(x, s)
        if not (mu > 0 and central_path_distance(x, s, mu) <= eta * mu):
            continue
        checked += 1
        lhs = (1 + eta) * norms_and_extremes(power(s, -1.0)).spec
        rhs = norms_and_extremes((1.0 / mu) * x).spec
        assert lhs >= rhs - 1e-9
    assert checked > 150  # the construction should satisfy the premise almost always


def test_in_neighborhood():
    st = ConeStructure((2,))
    e = identity(st)
    mu = 1.17
    assert in_neighborhood(Iterate(e, np.zeros(0), mu * e), eta=1e-6)
    # s = e + 2 eta tail-perturbation: d(e, s, mu=1) = 2 sqrt(2) eta > eta
    eta = 0.01
    s = BlockVector(st, [1.0, 2 * eta])
    it = Iterate(e, np.zeros(0), s)
    assert it.mu == pytest.approx(1.0)
    assert it.d == pytest.approx(2 * np.sqrt(2) * eta)
    assert not in_neighborhood(it, eta)
    # any point with s outside the cone fails regardless of distance
    outside = BlockVector(st, [-1.0, 0.0])
    assert not in_neighborhood(Iterate(e, np.zeros(0), outside), eta=100.0)
    with pytest.raises(ValueError):
        in_neighborhood(it, eta=0.0)


def test_linear_residuals():
    inst, x = toy_instance()
    y = np.array([0.3, -0.2])
    s = BlockVector(x.structure, inst.c.values - inst.A.T @ y)
    primal, dual = linear_residuals(inst, Iterate(x, y, s))
    assert primal == pytest.approx(0.0, abs=1e-12)
    assert dual == pytest.approx(0.0, abs=1e-12)
    # perturbing x moves the primal residual by exactly |A v|
    rng = np.random.default_rng(24)
    v = rng.standard_normal(3)
    xp = BlockVector(x.structure, x.values + v)
    primal, _ = linear_residuals(inst, Iterate(xp, y, s))
    assert primal == pytest.approx(np.linalg.norm(inst.A @ v), rel=1e-12)


def test_scale_to_frame_identity():
    st = ConeStructure((3,))
    e = identity(st)
    xhat, shat = scale_to_frame(e, e, 1.0)
    npt.assert_allclose(xhat.values, e.values)
    npt.assert_allclose(shat.values, e.values)


def test_scaling_invariants_random():
    rng = np.random.default_rng(25)
    for _ in range(100):
        st = random_structure(rng)
        x = random_interior(rng, st)
        s = random_interior(rng, st)
        mu = duality_gap(x, s)
        if mu <= 0:
            continue
        xhat, shat = scale_to_frame(x, s, mu)
        npt.assert_allclose(xhat.values, identity(st).values)
        # scaled gap is exactly 1
        assert duality_gap(xhat, shat) == pytest.approx(1.0, rel=1e-9)
        # d(x, s, mu sigma) = mu * d(e, shat, sigma)
        for sigma in (0.5, 1.0, 2.0):
            npt.assert_allclose(
                central_path_distance(x, s, mu * sigma),
                mu * central_path_distance(xhat, shat, sigma),
                rtol=1e-8,
                atol=1e-10,
            )


def test_scaled_distance_equals_deviation_norm():
    # d(x, s, mu) = mu * |shat - e|_F
    rng = np.random.default_rng(26)
    for _ in range(50):
        st = random_structure(rng)
        x = random_interior(rng, st)
        s = random_interior(rng, st)
        mu = duality_gap(x, s)
        if mu <= 0:
            continue
        _, shat = scale_to_frame(x, s, mu)
        dev = norms_and_extremes(shat - identity(st)).fro
        npt.assert_allclose(
            central_path_distance(x, s, mu), mu * dev, rtol=1e-9, atol=1e-12
        )
