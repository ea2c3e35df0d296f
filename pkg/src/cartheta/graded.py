"""Z^n-graded operators and the phase twist that deforms them.

Conventions
-----------
* ``<x, y> = sum_i x_i y_i`` and the cocycle is ``<Theta p, q> = q^T Theta p``.
* An operator entry ``(i, j)`` has degree ``deg[i] - deg[j]``.
* Twisting a degree-``p`` component multiplies column ``j`` by
  ``exp(2 pi i <Theta p, deg[j]>)``.  With these choices a product of two
  twisted homogeneous operators picks up ``exp(2 pi i <Theta p, q>)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cyclotomic import ExactMatrix
from .errors import (
    DimensionMismatch,
    IncompatibleCyclicGrading,
    IndexOutOfRange,
    NonHomogeneousInput,
    ParseError,
)
from .numerics import (
    Matrix,
    Phase,
    Real,
    adjoint,
    as_dense,
    identity,
    is_exact,
    kron,
    lcm_denominator,
    matmul,
    max_abs,
    parse_real,
    real_to_json,
    residual,
)

Degree = Tuple[int, ...]


class SkewMatrix:
    """Real skew-symmetric matrix stored through its strictly upper triangle."""

    __slots__ = ("n", "_upper")

    def __init__(self, n: int, upper: Optional[Mapping[Tuple[int, int], Real]] = None):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self._upper: Dict[Tuple[int, int], Real] = {}
        for (i, j), v in (upper or {}).items():
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise IndexOutOfRange(f"bad upper index {(i, j)} for n={n}")
            if i > j:
                i, j, v = j, i, -v
            v = Fraction(v) if is_exact(v) else float(v)
            if v:
                self._upper[(i, j)] = v

    # constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, n: int) -> "SkewMatrix":
        return cls(n)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Real]], tol: float = 0.0) -> "SkewMatrix":
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("square matrix required")
        upper = {}
        for i in range(n):
            if rows[i][i] != 0:
                raise ValueError("diagonal of a skew matrix must vanish")
            for j in range(i + 1, n):
                a, b = rows[i][j], rows[j][i]
                if abs(a + b) > tol:
                    raise ValueError(f"entries ({i},{j}) and ({j},{i}) are not opposite")
                upper[(i, j)] = a
        return cls(n, upper)

    @classmethod
    def from_value(cls, theta: Real) -> "SkewMatrix":
        """The 2x2 matrix with Theta_12 = theta."""
        return cls(2, {(0, 1): theta})

    @classmethod
    def from_json(cls, doc: Mapping) -> "SkewMatrix":
        try:
            n = int(doc["n"])
            upper = {}
            for item in doc.get("upper", []):
                i, j = int(item["i"]), int(item["j"])
                if not i < j:
                    raise ParseError("upper entries need i < j")
                upper[(i, j)] = parse_real(item["value"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed skew matrix: {exc}") from None
        return cls(n, upper)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "upper": [
                {"i": i, "j": j, "value": real_to_json(v)}
                for (i, j), v in sorted(self._upper.items())
            ],
        }

    # access ------------------------------------------------------------
    def __getitem__(self, ij: Tuple[int, int]) -> Real:
        i, j = ij
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexOutOfRange(f"{ij} outside {self.n}x{self.n}")
        if i == j:
            return Fraction(0) if self.exact else 0.0
        if i < j:
            return self._upper.get((i, j), Fraction(0) if self.exact else 0.0)
        return -self._upper.get((j, i), Fraction(0) if self.exact else 0.0)

    def upper_items(self) -> List[Tuple[Tuple[int, int], Real]]:
        """All strictly upper entries, zeros included, in row-major order."""
        return [((i, j), self[i, j]) for i in range(self.n) for j in range(i + 1, self.n)]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self._upper.values())

    def rows(self) -> List[List[Real]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def to_array(self) -> np.ndarray:
        return np.array([[float(self[i, j]) for j in range(self.n)] for i in range(self.n)])

    def denominator(self) -> int:
        """Least q with q*Theta integral (exact matrices only)."""
        if not self.exact:
            raise TypeError("denominator of a float matrix is undefined")
        return lcm_denominator(self._upper.values())

    # algebra -----------------------------------------------------------
    def scaled(self, c: Real) -> "SkewMatrix":
        if not is_exact(c):
            c = float(c)
        elif not self.exact:
            c = float(c)
        return SkewMatrix(self.n, {k: v * c for k, v in self._upper.items()})

    def __neg__(self) -> "SkewMatrix":
        return self.scaled(-1)

    def restrict(self, indices: Sequence[int]) -> "SkewMatrix":
        """Principal submatrix in the given order (0-based indices)."""
        indices = list(indices)
        for i in indices:
            if not 0 <= i < self.n:
                raise IndexOutOfRange(f"index {i} outside 0..{self.n - 1}")
        if len(set(indices)) != len(indices):
            raise ValueError("repeated index")
        k = len(indices)
        if k == 0:
            raise ValueError("empty index set")
        return SkewMatrix(k, {(a, b): self[indices[a], indices[b]]
                              for a in range(k) for b in range(a + 1, k)})

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> List[List[Real]]:
        return [[self[i, j] for j in cols] for i in rows]

    def integral_after_scaling(self, q: int, tol: float = 1e-9) -> bool:
        for v in self._upper.values():
            x = v * q
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    return False
            elif abs(x - round(x)) > tol:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return self.n == other.n and self._upper == other._upper

    def __hash__(self):
        return hash((self.n, tuple(sorted(self._upper.items()))))

    def __repr__(self):
        body = ", ".join(f"{i},{j}: {v}" for (i, j), v in sorted(self._upper.items()))
        return f"SkewMatrix(n={self.n}, {{{body}}})"


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional space with one Z^n (or Z_q^n) degree per basis vector."""

    degrees: Tuple[Degree, ...]
    modulus: Optional[int] = None

    def __post_init__(self):
        degs = tuple(tuple(int(c) for c in d) for d in self.degrees)
        if not degs:
            raise ValueError("a graded space needs at least one basis vector")
        n = len(degs[0])
        if any(len(d) != n for d in degs):
            raise DimensionMismatch("all degrees need the same length")
        if self.modulus is not None:
            if self.modulus < 1:
                raise ValueError("modulus must be positive")
            if any(not 0 <= c < self.modulus for d in degs for c in d):
                raise ValueError("cyclic degrees must lie in [0, q)")
        object.__setattr__(self, "degrees", degs)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def grade_dim(self) -> int:
        return len(self.degrees[0])

    def difference(self, i: int, j: int) -> Degree:
        d = tuple(a - b for a, b in zip(self.degrees[i], self.degrees[j]))
        if self.modulus is not None:
            d = tuple(c % self.modulus for c in d)
        return d

    def tensor(self, other: "GradedSpace") -> "GradedSpace":
        """Degrees of a Kronecker product basis: concatenated, first factor slowest."""
        if self.modulus != other.modulus:
            raise IncompatibleCyclicGrading("tensor factors carry different moduli")
        return GradedSpace(tuple(a + b for a in self.degrees for b in other.degrees),
                           self.modulus)


@dataclass
class GradedOperator:
    space: GradedSpace
    components: Dict[Degree, Matrix] = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return all(isinstance(m, ExactMatrix) for m in self.components.values())

    @property
    def matrix(self) -> Matrix:
        n = self.space.dim
        if not self.components:
            return identity(n, exact=True) * 0
        mats = list(self.components.values())
        if all(isinstance(m, ExactMatrix) for m in mats):
            out = ExactMatrix.zeros(n, n)
            for m in mats:
                out = out + m
            return out
        return sum((as_dense(m) for m in mats), np.zeros((n, n), dtype=complex))

    @property
    def degrees(self) -> List[Degree]:
        return sorted(self.components)

    def is_homogeneous(self) -> bool:
        return len(self.components) <= 1

    def adjoint(self) -> "GradedOperator":
        out = {}
        for p, m in self.components.items():
            q = tuple(-c for c in p)
            if self.space.modulus is not None:
                q = tuple(c % self.space.modulus for c in q)
            out[q] = adjoint(m)
        return GradedOperator(self.space, out)


@dataclass(frozen=True)
class OmegaVector:
    entries: Tuple[Phase, ...]

    @property
    def k(self) -> int:
        return len(self.entries)

    def __mul__(self, other: "OmegaVector") -> "OmegaVector":
        return OmegaVector(tuple(a + b for a, b in zip(self.entries, other.entries)))


# ---------------------------------------------------------------------------


def decompose_homogeneous(matrix: Matrix, space: GradedSpace) -> GradedOperator:
    """Split ``matrix`` into homogeneous components by degree difference."""
    if matrix.shape != (space.dim, space.dim):
        raise DimensionMismatch(f"matrix {matrix.shape} on a space of dimension {space.dim}")
    comps: Dict[Degree, Matrix] = {}
    if isinstance(matrix, ExactMatrix):
        buckets: Dict[Degree, dict] = {}
        for (i, j), v in matrix.items():
            buckets.setdefault(space.difference(i, j), {})[(i, j)] = v
        for p, data in buckets.items():
            comps[p] = ExactMatrix(matrix.shape, data)
    else:
        matrix = np.asarray(matrix, dtype=complex)
        rows, cols = np.nonzero(matrix)
        for i, j in zip(rows.tolist(), cols.tolist()):
            p = space.difference(i, j)
            if p not in comps:
                comps[p] = np.zeros_like(matrix)
            comps[p][i, j] = matrix[i, j]
    return GradedOperator(space, comps)


def homogeneous_phase(theta: SkewMatrix, p: Sequence[int], q: Sequence[int]) -> Phase:
    """exp(2 pi i <Theta p, q>) with <Theta p, q> = q^T Theta p."""
    n = theta.n
    if len(p) != n or len(q) != n:
        raise DimensionMismatch(f"degree vectors must have length {n}")
    total = Fraction(0) if theta.exact else 0.0
    for i in range(n):
        if not q[i]:
            continue
        row = Fraction(0) if theta.exact else 0.0
        for j in range(n):
            if p[j]:
                row += theta[i, j] * p[j]
        total += q[i] * row
    return Phase(total)


def _check_cyclic(space: GradedSpace, theta: SkewMatrix):
    if theta.n != space.grade_dim:
        raise DimensionMismatch(f"Theta is {theta.n}x{theta.n}, grading has length {space.grade_dim}")
    q = space.modulus
    if q is not None and not theta.integral_after_scaling(q):
        raise IncompatibleCyclicGrading(f"{q}*Theta is not integral; the twist is ill defined mod {q}")


def _twist_component(m: Matrix, factors: Sequence[Phase]) -> Matrix:
    if isinstance(m, ExactMatrix) and all(f.exact for f in factors):
        cols = {j for (_, j) in m.data}
        return m.scale_columns({j: factors[j].to_cyclo() for j in cols})
    d = as_dense(m)
    return d * np.array([f.to_complex() for f in factors])[None, :]


def rieffel_twist(op: GradedOperator, theta: SkewMatrix) -> GradedOperator:
    """Deform a graded operator: column j of the degree-p part gets phase(Theta, p, deg[j])."""
    space = op.space
    _check_cyclic(space, theta)
    out = {}
    for p, m in op.components.items():
        factors = [homogeneous_phase(theta, p, space.degrees[j]) for j in range(space.dim)]
        out[p] = _twist_component(m, factors)
    return GradedOperator(space, out)


def twist_matrix(matrix: Matrix, space: GradedSpace, theta: SkewMatrix) -> Matrix:
    """Convenience: decompose, twist and reassemble."""
    return rieffel_twist(decompose_homogeneous(matrix, space), theta).matrix


def check_double_deformation(op: GradedOperator, theta: SkewMatrix) -> float:
    """Max-entry distance between op and its Theta-then-minus-Theta twist."""
    back = rieffel_twist(rieffel_twist(op, theta), -theta)
    return residual(back.matrix, op.matrix)


def build_omega(theta21: Sequence[Sequence[Real]], p: Sequence[int]) -> OmegaVector:
    """omega_l(p) = exp(2 pi i <Theta21 eps_l, p>) for the m x k lower-left block."""
    m = len(theta21)
    if len(p) != m:
        raise DimensionMismatch(f"p must have length {m}")
    k = len(theta21[0]) if m else 0
    entries = []
    for l in range(k):
        acc = Fraction(0)
        for s in range(m):
            acc = acc + theta21[s][l] * p[s]
        entries.append(Phase(acc))
    return OmegaVector(tuple(entries))


# ---------------------------------------------------------------------------
# matrix-algebra deformation isomorphism


@dataclass
class Thm42Report:
    residual: float
    unitarity: float
    pair_residuals: List[float]
    decomposed_inputs: bool
    exact: bool

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "unitarity": self.unitarity,
            "pair_residuals": self.pair_residuals,
            "decomposed_inputs": self.decomposed_inputs,
            "exact": self.exact,
        }


def _diag(phases: Sequence[Phase], exact: bool) -> Matrix:
    if exact:
        return ExactMatrix.diagonal([ph.to_cyclo() for ph in phases])
    return np.diag([ph.to_complex() for ph in phases])


def _u_omega(space: GradedSpace, omega: OmegaVector, exact: bool) -> Matrix:
    """U_w acting on a basis vector of degree r by prod_l w_l ** r_l."""
    phases = []
    for r in space.degrees:
        acc = Phase(Fraction(0)) if exact else Phase(0.0)
        for l, w in enumerate(omega.entries):
            acc = acc + w * r[l]
        phases.append(acc)
    return _diag(phases, exact)


def verify_thm42(
    theta: SkewMatrix,
    matrix_space: GradedSpace,
    torus_space: GradedSpace,
    pairs: Iterable[Tuple[Matrix, Matrix]],
    strict: bool = False,
) -> Thm42Report:
    """Check W* (id x pi)^Theta(X x a) W = id x pi^{Theta22}(Phi(X x a)).

    ``matrix_space`` carries a true Z^k grading; ``torus_space`` a Z_q^m grading.
    Non-homogeneous inputs are split into components and handled by linearity
    unless ``strict`` is set.
    """
    k, m = matrix_space.grade_dim, torus_space.grade_dim
    if theta.n != k + m:
        raise DimensionMismatch(f"Theta must be {(k + m)}x{(k + m)}")
    if matrix_space.modulus is not None:
        raise ValueError("matrix side must carry a true Z^k grading")
    q = torus_space.modulus
    if q is None:
        raise ValueError("torus side must carry a cyclic grading")
    if not theta.integral_after_scaling(q):
        raise IncompatibleCyclicGrading(f"{q}*Theta is not integral")

    exact = theta.exact
    t11 = theta.restrict(range(k)) if k else None
    t22 = theta.restrict(range(k, k + m))
    t21 = theta.block(range(k, k + m), range(k))

    # product basis, matrix factor slowest; matrix degrees read mod q
    reduced = GradedSpace(tuple(tuple(c % q for c in d) for d in matrix_space.degrees), q)
    product = reduced.tensor(torus_space)

    w_phases = []
    for r in matrix_space.degrees:
        for s in torus_space.degrees:
            om = build_omega(t21, s)
            acc = Phase(Fraction(0)) if exact else Phase(0.0)
            for l, w in enumerate(om.entries):
                acc = acc + w * r[l]
            w_phases.append(acc)
    w = _diag(w_phases, exact)
    w_adj = adjoint(w)
    n_total = product.dim
    unitarity = residual(matmul(w_adj, w), identity(n_total, exact))

    decomposed = False
    worst = 0.0
    per_pair = []
    for x_mat, a_mat in pairs:
        x_op = decompose_homogeneous(x_mat, matrix_space)
        a_op = decompose_homogeneous(a_mat, torus_space)
        if not (x_op.is_homogeneous() and a_op.is_homogeneous()):
            if strict:
                raise NonHomogeneousInput("X and a must be homogeneous")
            decomposed = True
        pair_res = 0.0
        for x_part in x_op.components.values():
            for s_deg, a_part in a_op.components.items():
                lhs_mat = kron(x_part, a_part)
                lhs = twist_matrix(lhs_mat, product, theta)
                lhs = matmul(w_adj, matmul(lhs, w))

                psi = twist_matrix(x_part, matrix_space, t11) if t11 is not None else x_part
                neg_s = tuple(-c for c in s_deg)
                om_neg = build_omega(t21, neg_s)
                u1 = _u_omega(matrix_space, om_neg, exact)
                u2 = _u_omega(matrix_space, om_neg * om_neg, exact)
                y = matmul(matmul(u1, matmul(psi, adjoint(u1))), u2)
                a_def = twist_matrix(a_part, torus_space, t22)
                rhs = kron(y, a_def)
                pair_res = max(pair_res, residual(lhs, rhs))
        per_pair.append(pair_res)
        worst = max(worst, pair_res)
    return Thm42Report(worst, unitarity, per_pair, decomposed, exact)


# ---------------------------------------------------------------------------
# random instances (self-test and CLI checks)


def random_skew(n: int, rng: np.random.Generator, max_den: int = 8) -> SkewMatrix:
    """Random rational skew matrix with entries k/d, d <= max_den."""
    upper = {}
    for i in range(n):
        for j in range(i + 1, n):
            d = int(rng.integers(1, max_den + 1))
            upper[(i, j)] = Fraction(int(rng.integers(0, d)), d)
    return SkewMatrix(n, upper)


def random_graded_space(n: int, dim: int, rng: np.random.Generator, spread: int = 2) -> GradedSpace:
    degs = tuple(tuple(int(c) for c in rng.integers(-spread, spread + 1, size=n)) for _ in range(dim))
    return GradedSpace(degs)


def random_homogeneous(space: GradedSpace, p: Sequence[int], rng: np.random.Generator,
                       exact: bool = True) -> Matrix:
    """Random operator supported on entries (i, j) with deg[i] - deg[j] = p."""
    p = tuple(p)
    data = {}
    for i in range(space.dim):
        for j in range(space.dim):
            if space.difference(i, j) == p and rng.random() < 0.7:
                data[(i, j)] = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
    m = ExactMatrix((space.dim, space.dim), data)
    return m if exact else m.to_dense()
