from fractions import Fraction

import numpy as np
import pytest

from cartheta.cyclotomic import ExactMatrix
from cartheta.errors import IndexOutOfRange, InsufficientBound
from cartheta.graded import SkewMatrix
from cartheta.numerics import Phase, residual, scale
from cartheta.torus import (
    TorusSpec,
    clock_shift,
    commutation_residual,
    crossed_product_generators,
    distinguish_lemma85,
    doubled_theta,
    doubled_torus_check,
    irreducible_torus_generators,
    skew_normal_form,
    torus_generators,
    trace_range,
    unitarity_residual,
)

F = Fraction


def commutant_dimension(gens):
    """dim{X : X g = g X for all g}, by an SVD nullspace."""
    d = gens[0].shape[0]
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in (np.asarray(g.to_dense()) for g in gens)]
    s = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(np.sum(s < 1e-9)) + (d * d - len(s))


def test_clock_shift_examples():
    c, s = clock_shift(1)
    assert c.to_dense().tolist() == [[1]] and s.to_dense().tolist() == [[1]]
    c, s = clock_shift(2)
    assert np.array_equal(c.to_dense(), np.diag([1, -1]))
    assert np.array_equal(s.to_dense(), [[0, 1], [1, 0]])
    assert (c @ s + s @ c).is_zero()
    for q in (3, 5, 7):
        c, s = clock_shift(q)
        assert residual(c @ s, scale(Phase(F(1, q)), s @ c)) == 0.0


def test_clock_shift_float_path():
    c, s = clock_shift(3, exact=False)
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(c @ s, w * s @ c, atol=1e-15)


def test_torus_generators_examples():
    rep = torus_generators(TorusSpec(SkewMatrix(1)))
    assert rep.dim == 1 and residual(rep.generators[0], clock_shift(1)[1]) == 0.0
    theta = SkewMatrix.from_value(F(1, 3))
    rep = torus_generators(TorusSpec(theta))
    u1, u2 = rep.generators
    assert residual(u1 @ u2, scale(Phase(F(-1, 3)), u2 @ u1)) == 0.0
    theta3 = SkewMatrix(3, {(0, 1): F(1, 4), (0, 2): F(3, 4), (1, 2): F(1, 2)})
    rep3 = torus_generators(TorusSpec(theta3))
    assert commutation_residual(rep3.generators, theta3) == 0.0
    assert unitarity_residual(rep3.generators) == 0.0
    assert rep3.space.modulus == 4 and rep3.space.dim == rep3.dim == 64


def test_zero_theta_commutes():
    rep = torus_generators(TorusSpec(SkewMatrix.zeros(3)))
    assert commutation_residual(rep.generators, SkewMatrix.zeros(3)) == 0.0


def test_torus_rejects_float():
    with pytest.raises(TypeError):
        TorusSpec(SkewMatrix.from_value(0.3))


def test_crossed_product():
    theta = SkewMatrix.from_value(F(1, 3))
    rep = torus_generators(TorusSpec(theta))
    us, vs = crossed_product_generators(rep, [])
    assert vs == {} and all(residual(a, b) == 0.0 for a, b in zip(us, rep.generators))
    us, vs = crossed_product_generators(rep, [0, 1])
    assert commutation_residual(us, theta) == 0.0
    for i, v in vs.items():
        assert residual(v @ v, ExactMatrix.identity(v.shape[0])) == 0.0
        assert residual(v.adjoint(), v) == 0.0
        assert residual(v.adjoint() @ us[i] @ v, scale(-1, us[i])) == 0.0
        for j, u in enumerate(us):
            if j != i:
                assert residual(v @ u, u @ v) == 0.0
    assert residual(vs[0] @ vs[1], vs[1] @ vs[0]) == 0.0
    with pytest.raises(IndexOutOfRange):
        crossed_product_generators(rep, [2])


def test_doubled_theta():
    th = SkewMatrix(3, {(0, 1): F(1, 3), (0, 2): F(1, 4), (1, 2): F(1, 5)})
    d = doubled_theta(th)
    assert d[0, 1] == F(2, 3) and d[0, 2] == F(1, 2) and d[1, 2] == F(1, 5)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 5), (3, 3), (3, 4)])
def test_doubled_torus_check(n, q):
    rng = np.random.default_rng(q)
    upper = {(i, j): F(int(rng.integers(0, q)), q) for i in range(n) for j in range(i + 1, n)}
    rep = torus_generators(TorusSpec(SkewMatrix(n, upper)))
    assert doubled_torus_check(rep).residual == 0.0


def test_skew_normal_form_properties():
    rng = np.random.default_rng(5)
    for _ in range(30):
        t = int(rng.integers(2, 6))
        a = np.zeros((t, t), dtype=int)
        for i in range(t):
            for j in range(i + 1, t):
                a[i, j] = int(rng.integers(-6, 7))
                a[j, i] = -a[i, j]
        P, Pinv, blocks = skew_normal_form(a.tolist())
        P, Pinv = np.array(P), np.array(Pinv)
        assert np.array_equal(P @ Pinv, np.eye(t, dtype=int))
        normal = P.T @ a @ P
        target = np.zeros((t, t), dtype=int)
        for k, d in enumerate(blocks):
            target[2 * k, 2 * k + 1], target[2 * k + 1, 2 * k] = d, -d
        assert np.array_equal(normal, target)


@pytest.mark.parametrize("upper", [
    {(0, 1): F(1, 3)},
    {(0, 1): F(1, 3), (0, 2): F(1, 6), (1, 2): F(1, 2)},
    {(0, 1): F(1, 2), (2, 3): F(1, 3)},
    {(0, 1): F(1, 2), (0, 2): F(1, 2), (1, 2): F(1, 2)},
])
def test_irreducible_torus(upper):
    n = max(j for _, j in upper) + 1
    theta = SkewMatrix(n, upper)
    gens = irreducible_torus_generators(theta)
    assert commutation_residual(gens, theta) == 0.0
    assert unitarity_residual(gens) == 0.0
    assert commutant_dimension(gens) == 1


def test_irreducible_torus_mixed_denominators():
    theta = SkewMatrix(3, {(0, 1): F(1, 4), (0, 2): F(2, 7), (1, 2): F(1, 3)})
    gens = irreducible_torus_generators(theta)
    assert gens[0].shape == (84, 84)
    assert commutation_residual(gens, theta) == 0.0
    assert unitarity_residual(gens) == 0.0


def test_trace_range_examples():
    assert trace_range(F(1, 3), 0).values == (0, F(1, 3), F(2, 3), 1)
    assert trace_range(F(1, 3), 1).values == tuple(F(k, 6) for k in range(7))
    assert trace_range(F(0), 0).values == (0, 1)
    # reduction mod 1 leaves the set unchanged
    assert trace_range(F(7, 3), 1).values == trace_range(F(1, 3), 1).values


def test_trace_range_stabilizes():
    for theta, k in [(F(1, 5), 0), (F(2, 5), 1), (F(3, 7), 2)]:
        base = trace_range(theta, k)
        assert base.values == trace_range(theta, k, 2 * base.bound).values


def test_trace_range_bound_check():
    with pytest.raises(InsufficientBound):
        trace_range(F(1, 5), 2, bound=10)


def test_distinguisher():
    rep = distinguish_lemma85(F(1, 5), 2, bound=40)
    assert rep.pairwise_distinct
    zero = distinguish_lemma85(F(0), 2)
    assert [s.values for s in zero.sets] == [(0, 1), (0, F(1, 2), 1), tuple(F(k, 4) for k in range(5))]
    assert zero.pairwise_distinct
    assert distinguish_lemma85(F(1, 3), 3).pairwise_distinct
