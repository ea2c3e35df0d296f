"""Points of the hypercube [0, 1/2]^n, their face signatures and fiber metadata."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DomainError, NotApplicable
from .graded import SkewMatrix
from .numerics import Real, is_exact, parse_real, real_to_json

X_SNAP = 1e-12
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class FiberPoint:
    """A point x with its partition into L (x_i = 0), M (interior) and R (x_i = 1/2).

    Index sets are 0-based and sorted.
    """

    x: Tuple[Real, ...]
    L: Tuple[int, ...]
    M: Tuple[int, ...]
    R: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def signature(self) -> Tuple[int, int, int]:
        return len(self.L), len(self.M), len(self.R)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.x)


def _coerce_coord(v) -> Real:
    if isinstance(v, str):
        return parse_real(v)
    if is_exact(v):
        return Fraction(v)
    return float(v)


def face_signature(x: Sequence, eps: float = X_SNAP) -> FiberPoint:
    """Classify the coordinates of ``x``; floats within ``eps`` of 0 or 1/2 snap to the boundary."""
    coords = tuple(_coerce_coord(v) for v in x)
    if not coords:
        raise DomainError("empty point")
    L, M, R = [], [], []
    snapped = []
    for i, v in enumerate(coords):
        if isinstance(v, Fraction):
            if v < 0 or v > _HALF:
                raise DomainError(f"x_{i + 1} = {v} outside [0, 1/2]")
            at0, at_half = v == 0, v == _HALF
        else:
            if v < -eps or v > 0.5 + eps or v != v:
                raise DomainError(f"x_{i + 1} = {v} outside [0, 1/2]")
            at0, at_half = abs(v) <= eps, abs(v - 0.5) <= eps
            if at0:
                v = 0.0
            elif at_half:
                v = 0.5
        snapped.append(v)
        (L if at0 else R if at_half else M).append(i)
    return FiberPoint(tuple(snapped), tuple(L), tuple(M), tuple(R))


def theta_restrict(theta: SkewMatrix, indices: Sequence[int]) -> SkewMatrix:
    """Principal submatrix in the given order."""
    return theta.restrict(indices)


def sigma_matrix(theta: SkewMatrix, M: Sequence[int], R: Sequence[int]) -> SkewMatrix:
    """Rescaled restriction to M u R, indexed in increasing index order.

    Entries are 4*Theta on M x M, 2*Theta on mixed pairs and Theta on R x R.
    """
    Ms, Rs = set(M), set(R)
    if Ms & Rs:
        raise ValueError("M and R must be disjoint")
    idx = sorted(Ms | Rs)
    if not idx:
        raise ValueError("M u R is empty")
    upper = {}
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            i, j = idx[a], idx[b]
            factor = (2 if i in Ms else 1) * (2 if j in Ms else 1)
            upper[(a, b)] = theta[i, j] * factor
    return SkewMatrix(len(idx), upper)


def k0_rank(signature: Sequence[int]) -> int:
    l, m, r = signature
    if m + r <= 1:
        raise NotApplicable("rank formula needs m + r > 1")
    return 2 ** (m + r - 1)


@dataclass
class FiberDescriptor:
    point: FiberPoint
    case_tag: int
    clifford_rank: int
    sigma: Optional[SkewMatrix]
    sigma_indices: Tuple[int, ...]
    k0_rank: Optional[int]
    algebra: str

    @property
    def signature(self) -> Tuple[int, int, int]:
        return self.point.signature

    def to_json(self) -> dict:
        return {
            "x": [real_to_json(v) for v in self.point.x],
            "L": [i + 1 for i in self.point.L],
            "M": [i + 1 for i in self.point.M],
            "R": [i + 1 for i in self.point.R],
            "signature": list(self.signature),
            "caseTag": self.case_tag,
            "cliffordRank": self.clifford_rank,
            "sigma": self.sigma.to_json() if self.sigma is not None else None,
            "sigmaIndices": [i + 1 for i in self.sigma_indices],
            "k0Rank": self.k0_rank,
            "algebra": self.algebra,
        }


def fiber_descriptor(theta: SkewMatrix, x) -> FiberDescriptor:
    """Which of the four fiber families the point falls into."""
    point = x if isinstance(x, FiberPoint) else face_signature(x)
    n = point.n
    if theta.n != n:
        raise DomainError(f"point has {n} coordinates, Theta is {theta.n}x{theta.n}")
    l, m, r = point.signature
    idx = tuple(sorted(point.M + point.R))
    sigma = sigma_matrix(theta, point.M, point.R) if idx else None
    k0 = None
    if m + r >= 2:
        tag, rank = 1, 2 * (l + m)
        algebra = f"Cl_{rank} (x) C(T^{m + r}_Sigma)"
        k0 = k0_rank((l, m, r))
    elif m == 1:
        tag, rank = 2, 2 * n
        algebra = f"Cl_{rank} (x) C(T)"
    elif r == 1:
        tag, rank = 3, 2 * n - 2
        algebra = f"Cl_{rank} (x) C(T)"
    else:
        tag, rank = 4, 2 * n
        algebra = f"Cl_{rank}"
    return FiberDescriptor(point, tag, rank, sigma, idx, k0, algebra)


def grid_points(n: int, step) -> List[Tuple[Real, ...]]:
    """All points of [0, 1/2]^n on the lattice step*Z (step must divide 1/2 when exact)."""
    import itertools

    step = _coerce_coord(step)
    if step <= 0:
        raise DomainError("grid step must be positive")
    if isinstance(step, Fraction):
        count = int(_HALF / step)
        axis = [k * step for k in range(count + 1)]
        if axis[-1] != _HALF:
            axis.append(_HALF)
    else:
        count = int(0.5 / step + 1e-9)
        axis = [k * step for k in range(count + 1)]
        if abs(axis[-1] - 0.5) > X_SNAP:
            axis.append(0.5)
    return list(itertools.product(axis, repeat=n))
