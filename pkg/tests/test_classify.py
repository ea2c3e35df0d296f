import itertools
from fractions import Fraction

import numpy as np
import pytest

from cartheta import classify
from cartheta.classify import (
    ISOMORPHIC,
    NOT_ISOMORPHIC,
    UNDECIDED,
    SignedPermutation,
    canonical_residue,
    certify,
    classification_report,
    classify_n2,
    is_irrational_check,
    necessary_condition,
    signed_perm_search,
)
from cartheta.errors import DimensionMismatch, SizeLimit
from cartheta.graded import SkewMatrix, random_skew

F = Fraction


def skew3(a, b, c):
    return SkewMatrix(3, {(0, 1): a, (0, 2): b, (1, 2): c})


def brute_force_related(t1, t2):
    """Any signed permutation matrix P with P t2 P^T = t1 mod 1, by dense enumeration."""
    n = len(t1)
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            p = np.zeros((n, n))
            for i, j in enumerate(perm):
                p[i, j] = signs[i]
            d = p @ t2 @ p.T - t1
            if np.allclose(d, np.round(d), atol=1e-12):
                return True
    return False


def test_signed_permutation_matrix_and_conjugate():
    p = SignedPermutation((1, 2, 0), (1, 0, 0))
    assert np.array_equal(p.matrix(), [[0, -1, 0], [0, 0, 1], [1, 0, 0]])
    theta = skew3(F(1, 3), F(1, 5), F(1, 7))
    conj = p.conjugate(theta)
    assert np.allclose(conj.to_array(), p.matrix() @ theta.to_array() @ p.matrix().T)
    assert p.generator_map() == ["a1 -> A2", "a2 -> a3", "a3 -> a1"]
    with pytest.raises(ValueError):
        SignedPermutation((0, 0), (0, 0))


def test_canonical_residue():
    assert canonical_residue(F(2, 3)) == F(1, 3)
    assert canonical_residue(F(-7, 4)) == F(1, 4)
    assert canonical_residue(0.9) == pytest.approx(0.1)


def test_is_irrational_examples():
    rep = is_irrational_check(SkewMatrix.from_value(F(1, 3)))
    assert rep.status == "DEGENERATE" and rep.witness == (3, 0)
    assert is_irrational_check(SkewMatrix.zeros(4)).witness == (1, 0, 0, 0)
    fl = is_irrational_check(SkewMatrix.from_value(0.333333333))
    assert fl.status == "UNDECIDABLE" and fl.margin < 1e-8


def test_classify_n2_examples():
    assert classify_n2(F(1, 3), F(1, 3)).status == ISOMORPHIC
    v = classify_n2(F(1, 3), F(2, 3))
    assert v.status == ISOMORPHIC and v.witness["sigma"] == [2, 1]
    v = classify_n2(F(1, 3), F(1, 4))
    assert v.status == NOT_ISOMORPHIC and classify.RATIONAL_CAVEAT in v.caveats
    assert classify_n2(0.3, 1.3).status == ISOMORPHIC
    assert classify.FLOAT_CAVEAT in classify_n2(0.3, 0.7).caveats


def test_classify_n2_never_undecided():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b = F(int(rng.integers(-9, 9)), int(rng.integers(1, 7))), F(int(rng.integers(-9, 9)), 6)
        assert classify_n2(a, b).status in (ISOMORPHIC, NOT_ISOMORPHIC)
        assert classification_report(SkewMatrix.from_value(a), SkewMatrix.from_value(b)).status != UNDECIDED


def test_necessary_condition():
    t1 = skew3(0.1, 0.2, 0.3)
    assert necessary_condition(t1, t1) is not None
    assert necessary_condition(t1, skew3(0.1, 0.2, 0.35)) is None
    m = necessary_condition(t1, skew3(0.1, 0.2, -0.3))
    assert {tuple(e["pair1"]): e["sign"] for e in m}[(2, 3)] == -1
    with pytest.raises(DimensionMismatch):
        necessary_condition(t1, SkewMatrix.zeros(2))


def test_signed_perm_search_examples():
    theta = skew3(F(1, 3), F(1, 5), F(1, 7))
    p = signed_perm_search(theta, theta)
    assert p.sigma == (0, 1, 2) and p.signs == (0, 0, 0)
    p = signed_perm_search(SkewMatrix.from_value(F(1, 3)), SkewMatrix.from_value(F(-1, 3)))
    assert p.sigma == (1, 0) and p.signs == (0, 0)
    permuted = SignedPermutation((2, 0, 1), (0, 0, 0)).conjugate(theta)
    found = signed_perm_search(theta, permuted)
    assert found is not None and certify(found, theta, permuted)
    assert found.conjugate(permuted) == theta


def test_signed_perm_search_exact_vs_mod1():
    t1, t2 = SkewMatrix.from_value(F(1, 3)), SkewMatrix.from_value(F(4, 3))
    assert signed_perm_search(t1, t2) is None
    assert signed_perm_search(t1, t2, modulo_integers=True) is not None


def test_signed_perm_search_size_limit():
    with pytest.raises(SizeLimit):
        signed_perm_search(SkewMatrix.zeros(9), SkewMatrix.zeros(9))


def test_report_isomorphic_with_witness():
    rng = np.random.default_rng(6)
    theta = random_skew(3, rng)
    p = SignedPermutation((1, 2, 0), (0, 1, 0))
    v = classification_report(theta, p.conjugate(theta))
    assert v.status == ISOMORPHIC and v.witness is not None


def test_report_not_isomorphic_multiset():
    v = classification_report(skew3(0.1, 0.2, 0.3), skew3(0.1, 0.2, 0.35))
    assert v.status == NOT_ISOMORPHIC and v.witness["violatedInvariant"] == "multiset"


def test_report_undecided():
    t1 = skew3(F(1, 10), F(1, 5), F(3, 10))
    t2 = skew3(F(1, 10), F(1, 5), F(-3, 10))
    assert not brute_force_related(t1.to_array(), t2.to_array())
    v = classification_report(t1, t2)
    assert v.status == UNDECIDED and v.witness is None and "matching" in v.details


def test_search_agrees_with_brute_force():
    rng = np.random.default_rng(9)
    vals = [F(1, 10), F(1, 5), F(3, 10)]
    for _ in range(20):
        signs = rng.choice([-1, 1], size=3)
        order = rng.permutation(3)
        t2 = skew3(*(vals[k] * int(s) for k, s in zip(order, signs)))
        t1 = skew3(*vals)
        found = signed_perm_search(t1, t2, modulo_integers=True)
        assert (found is not None) == brute_force_related(t1.to_array(), t2.to_array())
