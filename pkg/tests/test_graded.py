import itertools
from fractions import Fraction

import numpy as np
import pytest

from cartheta import graded
from cartheta.cyclotomic import ExactMatrix
from cartheta.errors import IncompatibleCyclicGrading, NonHomogeneousInput, ParseError
from cartheta.graded import (
    GradedSpace,
    SkewMatrix,
    build_omega,
    check_double_deformation,
    decompose_homogeneous,
    homogeneous_phase,
    rieffel_twist,
    twist_matrix,
    verify_thm42,
)
from cartheta.numerics import Phase, residual
from cartheta.torus import clock_shift

E = ExactMatrix.from_rows([[0, 1], [0, 0]])
FLIP = ExactMatrix.from_rows([[0, 1], [1, 0]])
CLIFF_SPACE = GradedSpace(((0,), (-1,)))


def twist_oracle(m, degrees, theta):
    """Entry (i, j) times exp(2 pi i deg_j^T Theta (deg_i - deg_j)), straight from the definition."""
    t = theta.to_array()
    out = np.array(m, dtype=complex)
    for i, j in itertools.product(range(len(degrees)), repeat=2):
        p = np.subtract(degrees[i], degrees[j])
        out[i, j] *= np.exp(2j * np.pi * (np.array(degrees[j]) @ t @ p))
    return out


def test_skew_matrix_basics():
    th = SkewMatrix.from_rows([[0, Fraction(1, 3)], [Fraction(-1, 3), 0]])
    assert th[1, 0] == Fraction(-1, 3) and th.denominator() == 3
    assert SkewMatrix.from_json(th.to_json()) == th
    assert th.to_json()["upper"][0]["value"] == "1/3"
    assert (-th)[0, 1] == Fraction(-1, 3)
    with pytest.raises(ValueError):
        SkewMatrix.from_rows([[0, 1], [1, 0]])
    with pytest.raises(ParseError):
        SkewMatrix.from_json({"n": 2, "upper": [{"i": 1, "j": 0, "value": "1/2"}]})


def test_restrict_and_block():
    th = SkewMatrix(3, {(0, 1): Fraction(1, 2), (0, 2): Fraction(1, 3), (1, 2): Fraction(1, 5)})
    sub = th.restrict([0, 2])
    assert sub.n == 2 and sub[0, 1] == Fraction(1, 3)
    assert th.block([2], [0, 1]) == [[Fraction(-1, 3), Fraction(-1, 5)]]


def test_decompose_examples():
    ident = decompose_homogeneous(ExactMatrix.identity(2), CLIFF_SPACE)
    assert list(ident.components) == [(0,)]
    assert list(decompose_homogeneous(E, CLIFF_SPACE).components) == [(1,)]
    generic = decompose_homogeneous(np.arange(1, 5).reshape(2, 2), CLIFF_SPACE)
    assert set(generic.components) == {(-1,), (0,), (1,)}
    assert np.allclose(generic.matrix, np.arange(1, 5).reshape(2, 2))


def test_homogeneous_phase_examples():
    zero = SkewMatrix.zeros(2)
    assert homogeneous_phase(zero, (3, -1), (2, 5)) == Phase(Fraction(0))
    theta = Fraction(1, 5)
    half = SkewMatrix.from_value(theta / 2)
    assert homogeneous_phase(half, (1, 0), (0, 1)) == Phase(-theta / 2)
    assert homogeneous_phase(half, (0, 1), (1, 0)) == Phase(theta / 2)


def test_twist_trivial_cases():
    assert residual(twist_matrix(E, CLIFF_SPACE, SkewMatrix.zeros(1)), E) == 0.0
    space = GradedSpace(((0, 0), (1, 0), (0, 1), (1, 1)))
    m = ExactMatrix.from_rows(np.arange(16).reshape(4, 4).tolist())
    assert residual(twist_matrix(m, space, SkewMatrix.zeros(2)), m) == 0.0


def test_twist_matches_definition():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        theta = SkewMatrix(n, {(i, j): float(rng.uniform(-1, 1)) for i in range(n) for j in range(i + 1, n)})
        space = graded.random_graded_space(n, 5, rng)
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        assert np.allclose(twist_matrix(m, space, theta), twist_oracle(m, space.degrees, theta), atol=1e-13)


def test_fock_two_mode_twist():
    # degree delta_2 acting on a column of degree (1, 0): phase exp(2 pi i Theta_12 / 2)
    theta = Fraction(1, 3)
    space = GradedSpace(tuple(itertools.product((0, 1), repeat=2)))
    a = ExactMatrix.from_rows([[0, 0], [1, 0]])
    a2 = ExactMatrix.identity(2).kron(a)
    tw = twist_matrix(a2, space, SkewMatrix.from_value(theta / 2)).to_dense()
    expected = np.zeros((4, 4), complex)
    expected[1, 0] = 1
    expected[3, 2] = np.exp(1j * np.pi * theta)
    assert np.allclose(tw, expected, atol=1e-15)


def test_double_deformation():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        space = graded.random_graded_space(n, 4, rng)
        m = ExactMatrix.from_rows(rng.integers(-2, 3, size=(4, 4)).tolist())
        op = decompose_homogeneous(m, space)
        assert check_double_deformation(op, SkewMatrix.zeros(n)) == 0.0
        assert check_double_deformation(op, graded.random_skew(n, rng)) == 0.0
        ftheta = SkewMatrix(n, {(i, j): float(rng.uniform(-3, 3)) for i in range(n) for j in range(i + 1, n)})
        assert check_double_deformation(decompose_homogeneous(m.to_dense(), space), ftheta) < 1e-13


def test_twist_is_star_compatible():
    rng = np.random.default_rng(12)
    for _ in range(20):
        theta = graded.random_skew(2, rng)
        space = graded.random_graded_space(2, 4, rng)
        m = ExactMatrix.from_rows(rng.integers(-2, 3, size=(4, 4)).tolist())
        lhs = twist_matrix(m, space, theta).adjoint()
        rhs = twist_matrix(m.adjoint(), space, theta)
        assert residual(lhs, rhs) == 0.0


def test_cyclic_grading_rejects_bad_theta():
    space = GradedSpace(((0, 0), (1, 1)), 2)
    op = decompose_homogeneous(ExactMatrix.identity(2), space)
    with pytest.raises(IncompatibleCyclicGrading):
        rieffel_twist(op, SkewMatrix.from_value(Fraction(1, 3)))
    assert rieffel_twist(op, SkewMatrix.from_value(Fraction(1, 2))).matrix is not None


def test_build_omega():
    om = build_omega([[Fraction(0)]], (0,))
    assert om.entries == (Phase(Fraction(0)),)
    assert build_omega([[Fraction(7, 5)]], (1,)).entries == (Phase(Fraction(2, 5)),)
    t21 = [[Fraction(1, 3), Fraction(1, 4)], [Fraction(1, 6), Fraction(-1, 2)]]
    for p, q in [((1, 0), (0, 1)), ((2, -1), (1, 3))]:
        lhs = build_omega(t21, p) * build_omega(t21, q)
        assert lhs == build_omega(t21, tuple(a + b for a, b in zip(p, q)))


def test_thm42_examples():
    c, s = clock_shift(2)
    ts = GradedSpace(((0,), (1,)), 2)
    zero = verify_thm42(SkewMatrix.zeros(2), CLIFF_SPACE, ts, [(FLIP, c)])
    assert zero.residual == 0.0 and zero.unitarity == 0.0
    half = verify_thm42(SkewMatrix.from_value(Fraction(1, 2)), CLIFF_SPACE, ts, [(FLIP, c), (FLIP, s), (E, s)])
    assert half.residual == 0.0 and half.unitarity == 0.0 and half.decomposed_inputs
    fhalf = verify_thm42(SkewMatrix.from_value(0.5), CLIFF_SPACE, ts, [(FLIP.to_dense(), c.to_dense())])
    assert fhalf.residual < 1e-10


def test_thm42_rejects():
    c, _ = clock_shift(2)
    ts = GradedSpace(((0,), (1,)), 2)
    with pytest.raises(IncompatibleCyclicGrading):
        verify_thm42(SkewMatrix.from_value(Fraction(1, 3)), CLIFF_SPACE, ts, [(FLIP, c)])
    with pytest.raises(NonHomogeneousInput):
        verify_thm42(SkewMatrix.from_value(Fraction(1, 2)), CLIFF_SPACE, ts, [(FLIP, c)], strict=True)
