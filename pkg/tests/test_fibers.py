from fractions import Fraction

import pytest

from cartheta.errors import DomainError, NotApplicable
from cartheta.fibers import (
    face_signature,
    fiber_descriptor,
    grid_points,
    k0_rank,
    sigma_matrix,
    theta_restrict,
)
from cartheta.graded import SkewMatrix

F = Fraction
THETA3 = SkewMatrix(3, {(0, 1): F(1, 3), (0, 2): F(1, 5), (1, 2): F(2, 7)})


def test_face_signature_examples():
    p = face_signature((0, 0, 0, 0))
    assert p.L == (0, 1, 2, 3) and p.signature == (4, 0, 0)
    p = face_signature((0, F(1, 4), F(1, 2)))
    assert (p.L, p.M, p.R) == ((0,), (1,), (2,))
    n = 4
    for i in range(n):
        for j in range(i + 1, n):
            x = [F(1, 2) if k in (i, j) else 0 for k in range(n)]
            assert face_signature(x).signature == (n - 2, 0, 2)


def test_face_signature_floats_and_domain():
    p = face_signature((1e-14, 0.5 - 1e-14, 0.2))
    assert p.signature == (1, 1, 1) and p.x[:2] == (0.0, 0.5) and not p.exact
    assert face_signature(("1/4", "1/2")).exact
    for bad in [(0.6,), (-0.1,), (F(3, 4),), ()]:
        with pytest.raises(DomainError):
            face_signature(bad)


def test_theta_restrict():
    assert theta_restrict(THETA3, [0, 1, 2]) == THETA3
    sub = theta_restrict(THETA3, [0, 2])
    assert sub.n == 2 and sub[0, 1] == F(1, 5)


def test_sigma_matrix_scalings():
    theta = SkewMatrix.from_value(F(1, 7))
    assert sigma_matrix(theta, [0], [1])[0, 1] == F(2, 7)
    assert sigma_matrix(theta, [0, 1], [])[0, 1] == F(4, 7)
    assert sigma_matrix(theta, [], [0, 1])[0, 1] == F(1, 7)
    # mixed order: R index below M index still gets the factor 2, indices sorted
    s = sigma_matrix(THETA3, [2], [0, 1])
    assert s[0, 1] == F(1, 3) and s[0, 2] == F(2, 5) and s[1, 2] == F(4, 7)


def test_k0_rank():
    assert k0_rank((3, 0, 2)) == 2
    assert k0_rank((0, 2, 1)) == 4
    with pytest.raises(NotApplicable):
        k0_rank((4, 1, 0))


def test_fiber_descriptor_cases():
    theta = SkewMatrix.from_value(F(1, 3))
    corner = fiber_descriptor(theta, (0, 0))
    assert corner.case_tag == 4 and corner.algebra == "Cl_4" and corner.k0_rank is None
    mixed = fiber_descriptor(theta, (F(1, 4), F(1, 2)))
    assert mixed.case_tag == 1 and mixed.clifford_rank == 2 and mixed.k0_rank == 2
    assert mixed.sigma[0, 1] == F(2, 3)
    assert fiber_descriptor(theta, (0, F(1, 4))).case_tag == 2
    face = fiber_descriptor(theta, (0, F(1, 2)))
    assert face.case_tag == 3 and face.clifford_rank == 2


def test_fiber_descriptor_json_is_one_based():
    doc = fiber_descriptor(THETA3, (0, F(1, 4), F(1, 2))).to_json()
    assert doc["L"] == [1] and doc["M"] == [2] and doc["R"] == [3]
    assert doc["sigmaIndices"] == [2, 3] and doc["x"] == ["0/1", "1/4", "1/2"]
    assert doc["algebra"] == "Cl_4 (x) C(T^2_Sigma)"


def test_descriptor_dimension_check():
    with pytest.raises(DomainError):
        fiber_descriptor(THETA3, (0, 0))


def test_grid_points():
    pts = grid_points(2, F(1, 4))
    assert len(pts) == 9 and (F(1, 2), F(1, 4)) in pts
    assert len(grid_points(1, F(1, 3))) == 3
    assert len(grid_points(2, 0.25)) == 9
    with pytest.raises(DomainError):
        grid_points(2, 0)
