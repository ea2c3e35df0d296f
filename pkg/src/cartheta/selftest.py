"""Seeded invariant suites over every module; output depends only on (seed, iters)."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict

import numpy as np

from . import car, classify, fibers, graded, torus
from .numerics import Phase, matmul, phase_to_complex, residual, scale


def _phase_suite(rng) -> bool:
    a = Fraction(int(rng.integers(0, 60)), int(rng.integers(1, 13)))
    b = Fraction(int(rng.integers(0, 60)), int(rng.integers(1, 13)))
    lhs = phase_to_complex(Phase(a)) * phase_to_complex(Phase(b))
    return abs(lhs - phase_to_complex(Phase(a + b))) < 1e-14


def _graded_suite(rng) -> bool:
    n = int(rng.integers(1, 4))
    theta = graded.random_skew(n, rng)
    space = graded.random_graded_space(n, int(rng.integers(2, 7)), rng)
    i, j, k = (int(v) for v in rng.integers(0, space.dim, size=3))
    p, q = space.difference(i, j), space.difference(j, k)
    a = graded.random_homogeneous(space, p, rng)
    b = graded.random_homogeneous(space, q, rng)
    tw = lambda m: graded.twist_matrix(m, space, theta)  # noqa: E731
    law = residual(matmul(tw(a), tw(b)), scale(graded.homogeneous_phase(theta, p, q), tw(matmul(a, b))))
    back = graded.check_double_deformation(graded.decompose_homogeneous(a, space), theta)
    return law == 0.0 and back == 0.0


def _torus_suite(rng) -> bool:
    n = int(rng.integers(2, 4))
    theta = graded.random_skew(n, rng, max_den=4)
    rep = torus.torus_generators(torus.TorusSpec(theta))
    ok = torus.commutation_residual(rep.generators, theta) == 0.0
    ok &= torus.unitarity_residual(rep.generators) == 0.0
    ok &= torus.doubled_torus_check(rep).residual == 0.0
    irr = torus.irreducible_torus_generators(theta)
    return ok and torus.commutation_residual(irr, theta) == 0.0


def _fock_suite(rng) -> bool:
    theta = graded.random_skew(int(rng.integers(1, 5)), rng)
    return car.verify_car_relations(car.fock_car_theta(theta), tol=0.0).passed


def _tau_suite(rng) -> bool:
    n = int(rng.integers(1, 4))
    theta = graded.random_skew(n, rng)
    x = [Fraction(int(v), 8) for v in rng.integers(0, 5, size=n)]
    rep = car.build_tau_x(theta, x)
    return car.verify_car_relations(rep, tol=0.0).passed and car.number_operator_spectra(rep).passed


def _fiber_suite(rng) -> bool:
    n = int(rng.integers(1, 5))
    x = [Fraction(int(v), 4) for v in rng.integers(0, 3, size=n)]
    desc = fibers.fiber_descriptor(graded.random_skew(n, rng), x)
    l, m, r = desc.signature
    ok = l + m + r == n
    if m + r > 1:
        ok &= desc.k0_rank == 2 ** (m + r - 1) and desc.case_tag == 1
    return ok


def _classify_suite(rng) -> bool:
    t1 = Fraction(int(rng.integers(-20, 20)), int(rng.integers(1, 9)))
    t2 = Fraction(int(rng.integers(-20, 20)), int(rng.integers(1, 9)))
    v12 = classify.classify_n2(t1, t2).status
    ok = v12 == classify.classify_n2(t2, t1).status == classify.classify_n2(-t1, t2 + 3).status
    n = int(rng.integers(2, 5))
    theta = graded.random_skew(n, rng)
    p = classify.SignedPermutation(tuple(int(v) for v in rng.permutation(n)),
                                   tuple(int(v) for v in rng.integers(0, 2, size=n)))
    theta2 = p.conjugate(theta)
    # theta2 = P theta P^T, so theta = P^T theta2 P; the search looks for Q with Q theta2 Q^T = theta
    found = classify.signed_perm_search(theta, theta2)
    return ok and found is not None and classify.certify(found, theta, theta2)


SUITES: Dict[str, Callable] = {
    "numerics.phase": _phase_suite,
    "graded.twist": _graded_suite,
    "torus.relations": _torus_suite,
    "car.fock": _fock_suite,
    "car.tau_x": _tau_suite,
    "fibers.descriptor": _fiber_suite,
    "classify.search": _classify_suite,
}


def convention_check() -> dict:
    """Pin the cocycle orientation <Theta p, q> = q^T Theta p.

    With Theta/2, p = delta_1, q = delta_2 the chosen orientation gives -theta/2,
    the phase exp(-pi i theta) carried by a single Fock factor; the transposed
    orientation p^T Theta q would give +theta/2.
    """
    theta = Fraction(1, 5)
    half = graded.SkewMatrix.from_value(theta / 2)
    chosen = graded.homogeneous_phase(half, (1, 0), (0, 1))
    alternative = graded.homogeneous_phase(half, (0, 1), (1, 0))
    return {
        "orientation": "q^T Theta p",
        "chosen": chosen.to_json(),
        "alternative": alternative.to_json(),
        "matchesFockPhase": chosen == Phase(-theta / 2),
    }


def run_selftest(seed: int = 0, iters: int = 10) -> dict:
    rng = np.random.default_rng(seed)
    results = {}
    for name, suite in SUITES.items():
        passed = sum(bool(suite(rng)) for _ in range(iters))
        results[name] = {"passed": passed, "total": iters}
    conv = convention_check()
    return {
        "seed": seed,
        "iters": iters,
        "suites": results,
        "convention": conv,
        "passed": all(r["passed"] == r["total"] for r in results.values()) and conv["matchesFockPhase"],
    }
