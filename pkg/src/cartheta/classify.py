"""Deciding (or failing to decide) whether CAR_Theta1 and CAR_Theta2 are isomorphic."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, SizeLimit
from .graded import SkewMatrix
from .numerics import PHASE_TOL, Real, format_rational, is_exact, real_to_json

ISOMORPHIC = "ISOMORPHIC"
NOT_ISOMORPHIC = "NOT_ISOMORPHIC"
UNDECIDED = "UNDECIDED"

RATIONAL_CAVEAT = "rational-input: the criterion is proven for irrational parameters; computed as stated"
FLOAT_CAVEAT = "float-input: irrationality cannot be certified at finite precision"

MAX_SEARCH_N = 8


@dataclass(frozen=True)
class SignedPermutation:
    """P with p_ij = (-1)^{b_i} delta_{j, sigma(i)}; 0-based sigma."""

    sigma: Tuple[int, ...]
    signs: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ValueError("sigma is not a permutation")
        if len(self.signs) != len(self.sigma) or any(b not in (0, 1) for b in self.signs):
            raise ValueError("signs must be a 0/1 vector of length n")

    @property
    def n(self) -> int:
        return len(self.sigma)

    def matrix(self) -> np.ndarray:
        p = np.zeros((self.n, self.n), dtype=int)
        for i, j in enumerate(self.sigma):
            p[i, j] = -1 if self.signs[i] else 1
        return p

    def conjugate(self, theta: SkewMatrix) -> SkewMatrix:
        """P Theta P^T, entry (i, j) = (-1)^{b_i + b_j} Theta_{sigma(i) sigma(j)}."""
        if theta.n != self.n:
            raise DimensionMismatch("size mismatch")
        upper = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                sign = -1 if (self.signs[i] + self.signs[j]) % 2 else 1
                upper[(i, j)] = theta[self.sigma[i], self.sigma[j]] * sign
        return SkewMatrix(self.n, upper)

    def generator_map(self) -> List[str]:
        """psi_P(a_i) = a_{sigma(i)} or its adjoint when b_i = 1."""
        return [f"a{i + 1} -> {'A' if b else 'a'}{s + 1}" for i, (s, b) in enumerate(zip(self.sigma, self.signs))]

    def to_json(self) -> dict:
        return {"sigma": [s + 1 for s in self.sigma], "signs": list(self.signs),
                "generatorMap": self.generator_map()}


@dataclass
class Verdict:
    status: str
    witness: Optional[dict] = None
    caveats: List[str] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness, "caveats": self.caveats, **self.details}


# ---------------------------------------------------------------------------


def canonical_residue(t: Real) -> Real:
    """min(t mod 1, 1 - t mod 1): the class of t under t -> -t and integer shifts."""
    if is_exact(t):
        r = Fraction(t) % 1
    else:
        r = float(t) % 1.0
    return min(r, 1 - r)


def _same_mod1(a: Real, b: Real, tol: float) -> bool:
    d = a - b
    if is_exact(d):
        return Fraction(d) % 1 == 0
    d = float(d) % 1.0
    return min(d, 1.0 - d) <= tol


@dataclass
class IrrationalityReport:
    status: str  # DEGENERATE | NONE_FOUND | UNDECIDABLE
    witness: Optional[Tuple[int, ...]]
    bound: int
    margin: Optional[float] = None

    def to_json(self) -> dict:
        return {"status": self.status, "witness": list(self.witness) if self.witness else None,
                "bound": self.bound, "margin": self.margin}


def _box(n: int, bound: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return pts[np.any(pts != 0, axis=1)]


def _pick_smallest(cands: np.ndarray) -> Tuple[int, ...]:
    linf = np.abs(cands).max(axis=1)
    cands = cands[linf == linf.min()]
    l1 = np.abs(cands).sum(axis=1)
    cands = cands[l1 == l1.min()]
    return max(tuple(int(v) for v in row) for row in cands)


def is_irrational_check(theta: SkewMatrix, bound: Optional[int] = None,
                        max_points: int = 3_000_000) -> IrrationalityReport:
    """Search for a nonzero integer p with Theta^T p integral.

    Exact input: the smallest such p (by max-norm, then 1-norm, then the
    lexicographically largest) certifies degeneracy.  Float input is always
    UNDECIDABLE; the report carries the smallest distance to a violation.
    """
    n = theta.n
    if theta.exact:
        d = theta.denominator()
        bound = d if bound is None else bound
    else:
        bound = 4 if bound is None else bound
    while bound > 1 and (2 * bound + 1) ** n > max_points:
        bound -= 1
    pts = _box(n, bound)
    if theta.exact:
        d = theta.denominator()
        ints = np.array([[int(theta[i, j] * d) for j in range(n)] for i in range(n)], dtype=np.int64)
        vals = pts @ ints  # row p -> p^T (d Theta) = (d Theta^T p)^T
        hits = pts[np.all(vals % d == 0, axis=1)]
        if len(hits):
            return IrrationalityReport("DEGENERATE", _pick_smallest(hits), bound)
        return IrrationalityReport("NONE_FOUND", None, bound)
    vals = pts @ theta.to_array()
    dist = np.abs(vals - np.round(vals)).max(axis=1)
    k = int(np.argmin(dist))
    return IrrationalityReport("UNDECIDABLE", tuple(int(v) for v in pts[k]), bound, float(dist[k]))


def classify_n2(theta1, theta2, tol: float = PHASE_TOL) -> Verdict:
    """Two-generator case: isomorphic exactly when theta1 = +-theta2 mod 1."""
    c1, c2 = canonical_residue(theta1), canonical_residue(theta2)
    both_exact = is_exact(theta1) and is_exact(theta2)
    if both_exact:
        same = c1 == c2
    else:
        same = abs(float(c1) - float(c2)) <= tol
    caveats = [RATIONAL_CAVEAT] if both_exact else [FLOAT_CAVEAT]
    details = {"canonical": [real_to_json(c1), real_to_json(c2)]}
    if not same:
        return Verdict(NOT_ISOMORPHIC, {"violatedInvariant": "residue",
                                        "details": details["canonical"]}, caveats, details)
    # +theta2 first: identity; otherwise the swap realizes -theta2
    if _same_mod1(theta1, theta2, tol):
        w = SignedPermutation((0, 1), (0, 0))
    else:
        w = SignedPermutation((1, 0), (0, 0))
    return Verdict(ISOMORPHIC, w.to_json(), caveats, details)


def necessary_condition(theta1: SkewMatrix, theta2: SkewMatrix,
                        tol: float = PHASE_TOL) -> Optional[List[dict]]:
    """Match upper entries by canonical residue; a matching exists iff the multisets agree."""
    if theta1.n != theta2.n:
        raise DimensionMismatch("matrices of different size")
    e1 = sorted(((canonical_residue(v), ij, v) for ij, v in theta1.upper_items()), key=lambda t: float(t[0]))
    e2 = sorted(((canonical_residue(v), ij, v) for ij, v in theta2.upper_items()), key=lambda t: float(t[0]))
    exact = theta1.exact and theta2.exact
    out = []
    for (c1, ij1, v1), (c2, ij2, v2) in zip(e1, e2):
        if exact:
            if c1 != c2:
                return None
        elif abs(float(c1) - float(c2)) > tol:
            return None
        sign = 1 if _same_mod1(v2, v1, tol) else -1
        out.append({"pair2": [ij2[0] + 1, ij2[1] + 1], "pair1": [ij1[0] + 1, ij1[1] + 1], "sign": sign})
    return out


def _entries_match(a: Real, b: Real, tol: float, modulo_integers: bool) -> bool:
    if modulo_integers:
        return _same_mod1(a, b, tol)
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol


def signed_perm_search(theta1: SkewMatrix, theta2: SkewMatrix, tol: float = PHASE_TOL,
                       modulo_integers: bool = False) -> Optional[SignedPermutation]:
    """First signed permutation P with P Theta2 P^T = Theta1.

    Candidates are scanned with unsigned permutations first: sign vectors in
    lexicographic order, and for each of them permutations in lexicographic
    order.  With ``modulo_integers`` entries are compared mod 1.
    """
    n = theta1.n
    if theta2.n != n:
        raise DimensionMismatch("matrices of different size")
    if n > MAX_SEARCH_N:
        raise SizeLimit(f"exhaustive search limited to n <= {MAX_SEARCH_N}")
    t1 = theta1.rows()
    t2 = theta2.rows()
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for signs in itertools.product((0, 1), repeat=n):
        for sigma in itertools.permutations(range(n)):
            ok = True
            for i, j in pairs:
                v = t2[sigma[i]][sigma[j]]
                if (signs[i] + signs[j]) % 2:
                    v = -v
                if not _entries_match(v, t1[i][j], tol, modulo_integers):
                    ok = False
                    break
            if ok:
                return SignedPermutation(tuple(sigma), tuple(signs))
    return None


def certify(p: SignedPermutation, theta1: SkewMatrix, theta2: SkewMatrix,
            tol: float = PHASE_TOL, modulo_integers: bool = False) -> bool:
    """Recheck P Theta2 P^T = Theta1 (mod 1 if requested), exactly on rational input."""
    conj = p.conjugate(theta2)
    return all(_entries_match(conj[i, j], theta1[i, j], tol, modulo_integers)
               for i in range(p.n) for j in range(i + 1, p.n))


def classification_report(theta1: SkewMatrix, theta2: SkewMatrix, tol: float = PHASE_TOL) -> Verdict:
    if theta1.n != theta2.n:
        raise DimensionMismatch("matrices of different size")
    n = theta1.n
    if n == 2:
        return classify_n2(theta1[0, 1], theta2[0, 1], tol)

    caveats = []
    irr = [is_irrational_check(t) for t in (theta1, theta2)]
    details = {"irrationality": [r.to_json() for r in irr]}
    if any(r.status == "DEGENERATE" for r in irr):
        caveats.append(RATIONAL_CAVEAT)
    if any(r.status == "UNDECIDABLE" for r in irr):
        caveats.append(FLOAT_CAVEAT)
    if n < 2:
        w = SignedPermutation(tuple(range(n)), (0,) * n)
        return Verdict(ISOMORPHIC, w.to_json(), caveats, details)

    matching = necessary_condition(theta1, theta2, tol)
    if matching is None:
        r1 = sorted(real_to_json(canonical_residue(v)) if is_exact(v) else float(canonical_residue(v))
                    for _, v in theta1.upper_items())
        r2 = sorted(real_to_json(canonical_residue(v)) if is_exact(v) else float(canonical_residue(v))
                    for _, v in theta2.upper_items())
        return Verdict(NOT_ISOMORPHIC, {"violatedInvariant": "multiset", "details": [r1, r2]},
                       caveats, details)
    try:
        p = signed_perm_search(theta1, theta2, tol, modulo_integers=True)
    except SizeLimit:
        caveats.append(f"signed permutation search skipped for n > {MAX_SEARCH_N}")
        p = None
    if p is not None and certify(p, theta1, theta2, tol, modulo_integers=True):
        return Verdict(ISOMORPHIC, p.to_json(), caveats, details)
    details["matching"] = matching
    caveats.append("entry multisets agree but no signed permutation relates the matrices; "
                   "no complete criterion is available")
    return Verdict(UNDECIDED, None, caveats, details)
