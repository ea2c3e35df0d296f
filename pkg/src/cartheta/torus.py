"""Finite models of rational noncommutative tori.

Generators satisfy ``u_i u_j = exp(-2 pi i Theta_ij) u_j u_i``.  Two models are
provided: the q^n-dimensional clock/shift tensor model (:func:`torus_generators`,
graded mod q) and an irreducible model (:func:`irreducible_torus_generators`)
obtained from a skew normal form of ``q * Theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cyclotomic import Cyclo, ExactMatrix
from .errors import IndexOutOfRange, InsufficientBound
from .graded import GradedSpace, SkewMatrix
from .numerics import (
    Matrix,
    Phase,
    adjoint,
    format_rational,
    identity,
    kron,
    kron_all,
    matmul,
    residual,
    scale,
)


@dataclass(frozen=True)
class TorusSpec:
    theta: SkewMatrix

    def __post_init__(self):
        if not self.theta.exact:
            raise TypeError("finite torus models need a rational Theta")

    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def q(self) -> int:
        return self.theta.denominator()


@dataclass
class TorusRep:
    spec: TorusSpec
    generators: List[Matrix]
    space: Optional[GradedSpace] = None

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]


def clock_shift(q: int, exact: bool = True) -> Tuple[Matrix, Matrix]:
    """Clock C = diag(w^j) and shift S: e_j -> e_{j+1 mod q}, so that CS = wSC."""
    if q < 1:
        raise ValueError("q must be positive")
    if exact:
        c = ExactMatrix.diagonal([Cyclo.root(Fraction(j, q)) for j in range(q)])
        s = ExactMatrix((q, q), {((j + 1) % q, j): Cyclo.rational(1) for j in range(q)})
        return c, s
    w = np.exp(2j * np.pi * np.arange(q) / q)
    return np.diag(w), np.roll(np.eye(q, dtype=complex), 1, axis=0)


def _power(m: Matrix, k: int, exact: bool) -> Matrix:
    n = m.shape[0]
    if k < 0:
        m, k = adjoint(m), -k
    out = identity(n, exact)
    for _ in range(k):
        out = matmul(out, m)
    return out


def commutation_residual(gens: Sequence[Matrix], theta: SkewMatrix) -> float:
    """max over i<j of |u_i u_j - exp(-2 pi i Theta_ij) u_j u_i|."""
    worst = 0.0
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            lhs = matmul(gens[i], gens[j])
            rhs = scale(Phase(-theta[i, j]), matmul(gens[j], gens[i]))
            worst = max(worst, residual(lhs, rhs))
    return worst


def unitarity_residual(gens: Sequence[Matrix]) -> float:
    worst = 0.0
    for u in gens:
        n = u.shape[0]
        exact = isinstance(u, ExactMatrix)
        worst = max(worst, residual(matmul(adjoint(u), u), identity(n, exact)),
                    residual(matmul(u, adjoint(u)), identity(n, exact)))
    return worst


def torus_generators(spec: TorusSpec) -> TorusRep:
    """Clock/shift model on (C^q)^{(x) n}; u_i carries S in slot i and C^{q Theta_ki} in slots k < i."""
    n, q = spec.n, spec.q
    c, s = clock_shift(q)
    eye = ExactMatrix.identity(q)
    gens = []
    for i in range(n):
        factors = []
        for k in range(n):
            if k < i:
                a = int(spec.theta[k, i] * q) % q
                factors.append(_power(c, a, True))
            elif k == i:
                factors.append(s)
            else:
                factors.append(eye)
        gens.append(kron_all(factors))
    degrees = tuple(np.ndindex(*([q] * n)))
    return TorusRep(spec, gens, GradedSpace(degrees, q))


# ---------------------------------------------------------------------------
# irreducible model


def skew_normal_form(a: Sequence[Sequence[int]]):
    """Unimodular P with P^T A P block diagonal ``[[0, d], [-d, 0]] + ... + 0``.

    Returns ``(P, P_inv, blocks)`` where ``blocks`` lists the ``d`` values, one
    per 2x2 block starting at index 0; trailing indices span the radical.
    """
    t = len(a)
    A = [list(map(int, row)) for row in a]
    P = [[int(i == j) for j in range(t)] for i in range(t)]
    Pinv = [[int(i == j) for j in range(t)] for i in range(t)]

    def swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in P:
            row[i], row[j] = row[j], row[i]
        Pinv[i], Pinv[j] = Pinv[j], Pinv[i]

    def add(l, j, c):
        # basis change e_l <- e_l + c e_j
        if not c:
            return
        for col in range(t):
            A[l][col] += c * A[j][col]
        for row in range(t):
            A[row][l] += c * A[row][j]
        for row in P:
            row[l] += c * row[j]
        for col in range(t):
            Pinv[j][col] -= c * Pinv[l][col]

    blocks = []
    k = 0
    while k + 1 < t:
        while True:
            best = None
            for i in range(k, t):
                for j in range(i + 1, t):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return P, Pinv, blocks
            i, j = best
            swap(k, i)
            swap(k + 1, j if j != k else i)
            d = A[k][k + 1]
            done = True
            for l in range(k + 2, t):
                add(l, k + 1, -(A[k][l] // d))
                add(l, k, A[k + 1][l] // d)
                if A[k][l] or A[k + 1][l]:
                    done = False
            if done:
                break
        blocks.append(A[k][k + 1])
        k += 2
    return P, Pinv, blocks


def irreducible_torus_generators(theta: SkewMatrix) -> List[ExactMatrix]:
    """An irreducible exact representation of the rational torus with parameter ``theta``.

    Central directions act by 1; each symplectic block with parameter a/b acts
    by the b-dimensional pair (S, C^a).
    """
    t = theta.n
    d = theta.denominator()
    ints = [[int(theta[i, j] * d) for j in range(t)] for i in range(t)]
    P, Pinv, blocks = skew_normal_form(ints)

    # base unitaries w_1..w_t in the new basis
    block_dims = []
    pair_gens = []
    for blk in blocks:
        frac = Fraction(blk, d) % 1
        b = frac.denominator
        a = frac.numerator
        c, s = clock_shift(b)
        pair_gens.append((s, _power(c, a, True)))
        block_dims.append(b)
    total = int(np.prod(block_dims)) if block_dims else 1

    base: List[ExactMatrix] = []
    for idx, (w1, w2) in enumerate(pair_gens):
        for w in (w1, w2):
            factors = [w if k == idx else ExactMatrix.identity(block_dims[k])
                       for k in range(len(block_dims))]
            base.append(kron_all(factors))
    while len(base) < t:
        base.append(ExactMatrix.identity(total))
    orders = []
    for b in block_dims:
        orders += [b, b]
    orders += [1] * (t - len(orders))

    gens = []
    for i in range(t):
        # u_i = prod_j w_j^{(P^{-1})_{j i}} in index order
        u = ExactMatrix.identity(total)
        for j in range(t):
            e = Pinv[j][i] % orders[j]
            if e:
                u = u @ _power(base[j], e, True)
        gens.append(u)
    return gens


def crossed_product_generators(rep: TorusRep, M: Sequence[int]):
    """Extend by self-adjoint unitaries v_i (i in M) with v_i* u_i v_i = -u_i.

    Works on the regular representation of Z_2^{|M|}: u_i becomes u_i (x) D_i with
    D_i the sign character in slot i, and v_i is the flip in slot i.
    """
    M = list(M)
    for i in M:
        if not 0 <= i < rep.spec.n:
            raise IndexOutOfRange(f"index {i} outside 0..{rep.spec.n - 1}")
    if len(set(M)) != len(M):
        raise ValueError("repeated index in M")
    if not M:
        return list(rep.generators), {}
    exact = isinstance(rep.generators[0], ExactMatrix)
    sign = ExactMatrix.diagonal([1, -1]) if exact else np.diag([1.0 + 0j, -1.0])
    flip = ExactMatrix.from_rows([[0, 1], [1, 0]]) if exact else np.array([[0, 1], [1, 0]], complex)
    eye2 = identity(2, exact)
    slots = {i: pos for pos, i in enumerate(M)}

    def ext(i, op):
        return kron_all([op if slots.get(i) == pos else eye2 for pos in range(len(M))])

    us = []
    for i, u in enumerate(rep.generators):
        if i in slots:
            us.append(kron(u, ext(i, sign)))
        else:
            us.append(kron(u, identity(2 ** len(M), exact)))
    vs = {i: kron(identity(rep.dim, exact), ext(i, flip)) for i in M}
    return us, vs


def doubled_theta(theta: SkewMatrix) -> SkewMatrix:
    """Theta^(1): row and column of the first index doubled."""
    return SkewMatrix(theta.n, {(0, j): 2 * theta[0, j] for j in range(1, theta.n)}
                      | {(i, j): theta[i, j] for i in range(1, theta.n) for j in range(i + 1, theta.n)})


@dataclass
class DoubledTorusReport:
    theta_doubled: SkewMatrix
    residual: float

    def to_json(self):
        return {"theta_doubled": self.theta_doubled.to_json(), "residual": self.residual}


def doubled_torus_check(rep: TorusRep) -> DoubledTorusReport:
    """Check that u_1^2, u_2, ..., u_n satisfy the Theta^(1) relations."""
    if rep.spec.n < 2:
        raise ValueError("need n >= 2")
    gens = list(rep.generators)
    gens[0] = matmul(gens[0], gens[0])
    th1 = doubled_theta(rep.spec.theta)
    return DoubledTorusReport(th1, commutation_residual(gens, th1))


# ---------------------------------------------------------------------------
# trace ranges


@dataclass(frozen=True)
class TraceRangeSet:
    theta: Fraction
    halvings: int
    bound: int
    values: Tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {
            "theta": format_rational(self.theta),
            "halvings": self.halvings,
            "bound": self.bound,
            "values": [format_rational(v) for v in self.values],
        }


def default_bound(theta: Fraction, halvings: int) -> int:
    return 4 * Fraction(theta).denominator * 2 ** halvings


def trace_range(theta, halvings: int, bound: Optional[int] = None) -> TraceRangeSet:
    """2^-k (Z + theta Z) intersected with [0, 1], coefficients bounded by B.

    ``theta`` is reduced mod 1 first; this leaves the infinite set unchanged and
    makes B >= denominator * 2^k sufficient for completeness.
    """
    theta = Fraction(theta)
    if halvings < 0:
        raise ValueError("halvings must be nonnegative")
    if bound is None:
        bound = default_bound(theta, halvings)
    need = theta.denominator * 2 ** halvings
    if bound < need:
        raise InsufficientBound(f"bound {bound} < denominator*2^k = {need}")
    t = theta % 1
    scale_ = Fraction(1, 2 ** halvings)
    vals = set()
    for mp in range(-bound, bound + 1):
        base = mp * t
        # m ranges over integers with 0 <= (m + base) * scale <= 1
        lo = max(-bound, -int(base) - 1)
        hi = min(bound, 2 ** halvings - int(base) + 1)
        for m in range(lo, hi + 1):
            v = (m + base) * scale_
            if 0 <= v <= 1:
                vals.add(v)
    return TraceRangeSet(theta, halvings, bound, tuple(sorted(vals)))


@dataclass
class DistinguishReport:
    theta: Fraction
    n: int
    sets: List[TraceRangeSet]
    equal_pairs: Dict[str, bool]
    pairwise_distinct: bool
    caveats: List[str]

    def to_json(self) -> dict:
        return {
            "theta": format_rational(self.theta),
            "n": self.n,
            "sets": [s.to_json() for s in self.sets],
            "equal_pairs": self.equal_pairs,
            "pairwise_distinct": self.pairwise_distinct,
            "caveats": self.caveats,
        }


def distinguish_lemma85(theta, n: int, bound: Optional[int] = None) -> DistinguishReport:
    """Compare the trace ranges of the (0,2), (1,1) and (2,0) face fibers."""
    if n < 2:
        raise ValueError("need n >= 2")
    theta = Fraction(theta)
    triples = [(theta, n - 2), (2 * theta, n - 1), (4 * theta, n)]
    if bound is None:
        bound = max(default_bound(t, k) for t, k in triples)
    sets = [trace_range(t, k, bound) for t, k in triples]
    eq = {
        f"{a}-{b}": sets[a].values == sets[b].values
        for a, b in ((0, 1), (0, 2), (1, 2))
    }
    return DistinguishReport(
        theta, n, sets, eq, not any(eq.values()),
        ["rational theta: only finite-set equality is reported, no algebra-level conclusion"],
    )
