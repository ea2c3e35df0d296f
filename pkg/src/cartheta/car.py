"""Finite-dimensional representations of CAR_Theta and tools to check them.

Relations, for all i != j::

    a_i* a_i + a_i a_i* = 1
    a_i* a_j = exp(2 pi i Theta_ij) a_j a_i*
    a_i a_j  = exp(-2 pi i Theta_ij) a_j a_i
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cyclotomic import Cyclo, ExactMatrix
from .errors import DimensionMismatch, DomainError, IncompatibleDenominator, IndexOutOfRange, ParseError
from .fibers import FiberPoint, face_signature, sigma_matrix
from .graded import GradedSpace, SkewMatrix, decompose_homogeneous, rieffel_twist
from .numerics import (
    Matrix,
    Phase,
    Real,
    adjoint,
    add,
    as_dense,
    hermitian_spectrum,
    identity,
    is_exact,
    kron,
    kron_all,
    matmul,
    real_to_json,
    residual,
    scale,
    sub,
)
from .torus import TorusRep, TorusSpec, clock_shift, crossed_product_generators, irreducible_torus_generators

_HALF = Fraction(1, 2)


@dataclass
class CarRep:
    n: int
    theta: SkewMatrix
    generators: List[Matrix]
    provenance: str = "custom"
    x: Optional[FiberPoint] = None
    torus_denominator: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.generators) != self.n:
            raise DimensionMismatch(f"{len(self.generators)} generators for n={self.n}")
        shapes = {g.shape for g in self.generators}
        if len(shapes) != 1:
            raise DimensionMismatch("generators have different shapes")
        (shape,) = shapes
        if shape[0] != shape[1]:
            raise DimensionMismatch("generators must be square")

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def exact(self) -> bool:
        return all(isinstance(g, ExactMatrix) for g in self.generators)

    def dense(self) -> List[np.ndarray]:
        return [as_dense(g) for g in self.generators]

    def conjugated(self, u: np.ndarray) -> "CarRep":
        """The representation U a U* (dense)."""
        u = np.asarray(u, dtype=complex)
        gens = [u @ g @ u.conj().T for g in self.dense()]
        return CarRep(self.n, self.theta, gens, self.provenance, self.x, self.torus_denominator)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "theta": self.theta.to_json(),
            "provenance": self.provenance,
            "x": [real_to_json(v) for v in self.x.x] if self.x is not None else None,
            "torusDenominator": self.torus_denominator,
            "dim": self.dim,
            "generators": [
                [[[float(z.real), float(z.imag)] for z in row] for row in g] for g in self.dense()
            ],
        }


# ---------------------------------------------------------------------------
# words


_TOKEN = re.compile(r"([aA])(\d+)")


@dataclass(frozen=True)
class Word:
    """A *-monomial; letters are (0-based index, starred)."""

    letters: Tuple[Tuple[int, bool], ...]

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse tokens like ``"A1 a1"`` (``A`` = adjoint, 1-based indices)."""
        stripped = re.sub(r"\s+", "", text)
        pos, letters = 0, []
        for m in _TOKEN.finditer(stripped):
            if m.start() != pos:
                raise ParseError(f"unexpected text in word {text!r}")
            idx = int(m.group(2))
            if idx < 1:
                raise ParseError("generator indices start at 1")
            letters.append((idx - 1, m.group(1) == "A"))
            pos = m.end()
        if pos != len(stripped):
            raise ParseError(f"unexpected text in word {text!r}")
        return cls(tuple(letters))

    def __str__(self):
        return " ".join(("A" if s else "a") + str(i + 1) for i, s in self.letters)

    def evaluate(self, generators: Sequence[Matrix]) -> Matrix:
        dim = generators[0].shape[0]
        exact = all(isinstance(g, ExactMatrix) for g in generators)
        out = identity(dim, exact)
        for i, star in self.letters:
            if not 0 <= i < len(generators):
                raise IndexOutOfRange(f"generator a{i + 1} does not exist")
            g = generators[i]
            out = matmul(out, adjoint(g) if star else g)
        return out


# ---------------------------------------------------------------------------
# CAR_1


def _check_x(x) -> Real:
    x = Fraction(x) if is_exact(x) else float(x)
    if x < 0 or x > _HALF:
        raise DomainError(f"x = {x} outside [0, 1/2]")
    return x


def car1_irrep(x, phi: float = 0.0, one_dimensional: bool = False):
    """pi_{x,phi}(a) = e^{i phi} [[0, sqrt x], [sqrt(1-x), 0]], or the scalar rho_phi(a) = e^{i phi}/sqrt 2."""
    x = _check_x(x)
    ph = cmath.exp(1j * phi)
    if one_dimensional:
        if x != _HALF:
            raise DomainError("the one-dimensional representation exists only at x = 1/2")
        return ph / math.sqrt(2)
    return ph * np.array([[0, math.sqrt(x)], [math.sqrt(1 - x), 0]], dtype=complex)


def spatial_h(word: Word, x, z: complex) -> np.ndarray:
    """Evaluate a word in the single generator a at (x, z): h(a)(x)(z) = z [[0, sqrt x], [sqrt(1-x), 0]]."""
    x = _check_x(x)
    if abs(abs(z) - 1) > 1e-12:
        raise DomainError("z must lie on the unit circle")
    a = z * np.array([[0, math.sqrt(x)], [math.sqrt(1 - x), 0]], dtype=complex)
    for i, _ in word.letters:
        if i != 0:
            raise IndexOutOfRange("CAR_1 has the single generator a1")
    return as_dense(word.evaluate([a]))


_W = np.diag([1.0, -1.0]).astype(complex)
_V = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _W_of(z: complex) -> np.ndarray:
    return np.diag([1.0, z]).astype(complex)


@dataclass
class MembershipReport:
    conditions: Dict[str, float]
    tol: float

    @property
    def max_violation(self) -> float:
        return max(self.conditions.values())

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    @property
    def flagged(self) -> List[str]:
        return [k for k, v in self.conditions.items() if v > self.tol]

    def to_json(self) -> dict:
        return {"conditions": self.conditions, "tol": self.tol,
                "maxViolation": self.max_violation, "passed": self.passed, "flagged": self.flagged}


def default_grid(nx: int = 20, nz: int = 40) -> Tuple[List[float], List[complex]]:
    xs = list(np.linspace(0.0, 0.5, nx))
    xs[0], xs[-1] = 0.0, 0.5
    zs = [cmath.exp(2j * math.pi * k / nz) for k in range(nz)]
    return xs, zs


def check_B_membership(f, xs=None, zs=None, tol: float = 1e-10) -> MembershipReport:
    """Evaluate the four conditions cutting the image of h out of C([0,1/2], M_2(C(T))).

    ``f`` is a Word or a callable ``(x, z) -> 2x2``.  Violations use the max-entry norm.
    """
    if isinstance(f, Word):
        word = f
        f = lambda x, z: spatial_h(word, x, z)  # noqa: E731
    if xs is None or zs is None:
        dx, dz = default_grid()
        xs = dx if xs is None else xs
        zs = dz if zs is None else zs
    for z in zs:
        if min(abs(-z - w) for w in zs) > 1e-12:
            raise DomainError("z grid must be closed under negation")
    if not any(x == 0 for x in xs) or not any(x == 0.5 for x in xs):
        raise DomainError("x grid must contain 0 and 1/2")

    c = {"interior_symmetry": 0.0, "zero_fiber": 0.0, "half_diagonal": 0.0, "half_symmetry": 0.0}
    for x in xs:
        if x == 0:
            base = f(0.0, 1.0)
            for z in zs:
                wz = _W_of(z)
                c["zero_fiber"] = max(c["zero_fiber"], np.abs(f(0.0, z) - wz @ base @ wz.conj().T).max())
            continue
        for z in zs:
            val = f(x, z)
            sym = np.abs(val - _W @ f(x, -z) @ _W).max()
            if x == 0.5:
                c["half_symmetry"] = max(c["half_symmetry"], sym)
                rot = _V.conj().T @ val @ _V
                c["half_diagonal"] = max(c["half_diagonal"], abs(rot[0, 1]), abs(rot[1, 0]))
            else:
                c["interior_symmetry"] = max(c["interior_symmetry"], sym)
    return MembershipReport({k: float(v) for k, v in c.items()}, tol)


def fiber_generator_psi(x, q: int = 2) -> Matrix:
    """Image of h(a)(x) in the fiber models: Clifford e, crossed product, or (1/sqrt 2) times a unitary."""
    x = _check_x(x)
    exact = isinstance(x, Fraction)
    if x == 0:
        e = ExactMatrix.from_rows([[0, 0], [1, 0]])
        return e if exact else e.to_dense()
    _, s = clock_shift(q, exact=True)
    if x == _HALF:
        out = s * Cyclo.sqrt(_HALF)
        return out if exact else out.to_dense()
    rep = TorusRep(TorusSpec(SkewMatrix(1)), [s])
    (u,), vs = crossed_product_generators(rep, [0])
    v = vs[0]
    if exact:
        r1, r0 = Cyclo.sqrt(1 - x), Cyclo.sqrt(x)
        alpha, beta = r1 + r0, r1 - r0
        half = Fraction(1, 2)
    else:
        alpha = math.sqrt(1 - x) + math.sqrt(x)
        beta = math.sqrt(1 - x) - math.sqrt(x)
        u, v, half = u.to_dense(), v.to_dense(), 0.5
    inner = add(scale(alpha, identity(2 * q, exact)), scale(beta, v))
    return scale(half, matmul(u, inner))


# ---------------------------------------------------------------------------
# CAR_Theta


def fock_car_theta(theta: SkewMatrix) -> CarRep:
    """Deform the commuting tensor-product CAR generators by Theta/2.

    Basis vector eps in {0,1}^n carries degree +eps, so each untwisted
    generator (slot i equal to [[0,0],[1,0]]) is homogeneous of degree delta_i.
    """
    n = theta.n
    a = ExactMatrix.from_rows([[0, 0], [1, 0]])
    eye = ExactMatrix.identity(2)
    plain = [kron_all([a if k == i else eye for k in range(n)]) for i in range(n)]
    degrees = tuple(tuple(int(b) for b in format(idx, f"0{n}b")) for idx in range(2 ** n))
    space = GradedSpace(degrees)
    half = theta.scaled(Fraction(1, 2))
    gens = [rieffel_twist(decompose_homogeneous(g, space), half).matrix for g in plain]
    return CarRep(n, theta, gens, "fock")


def _sqrt(v: Real):
    return Cyclo.sqrt(v) if isinstance(v, Fraction) else math.sqrt(v)


def _rationalize_sigma(sigma: SkewMatrix, q: Optional[int]) -> SkewMatrix:
    if sigma.exact:
        return sigma
    limit = q if q is not None else 10 ** 6
    upper = {}
    for (i, j), v in sigma.upper_items():
        r = Fraction(v).limit_denominator(limit)
        if abs(float(r) - v) > 1e-9:
            raise IncompatibleDenominator(f"Sigma entry {v} has no denominator dividing {limit}")
        upper[(i, j)] = r
    return SkewMatrix(sigma.n, upper)


def build_tau_x(theta: SkewMatrix, x, q: Optional[int] = None) -> CarRep:
    """The irreducible representation attached to the point x of [0, 1/2]^n.

    Space: (C^2)^{L} (x) (C^2)^{M} (x) H with H an irreducible representation of
    the rational torus with parameter Sigma on M u R.  With e_k = [[0,1],[0,0]]
    in slot k::

        i in L: prod_{k in L} (e_k e_k* + e^{pi i Theta_ik} e_k* e_k) e_i (x) 1
        i in M: P_L (x) [(prod_{k in M, k<i} (e_k* e_k + e^{2 pi i Theta_ik} e_k e_k*) (x) 1)
                 (sqrt(x_i) prod_{k in M, k>=i} (e_k* e_k + e^{4 pi i Theta_ik} e_k e_k*) e_i (x) v_i
                  + sqrt(1-x_i) e_i* (x) 1)]
        i in R: P_L (x) prod_{k in M} (e_k* e_k + e^{2 pi i Theta_ik} e_k e_k*) (x) v_i / sqrt 2

    where P_L = prod_{k in L} (e_k e_k* + e^{2 pi i Theta_ik} e_k* e_k).
    """
    point = x if isinstance(x, FiberPoint) else face_signature(x)
    n = point.n
    if theta.n != n:
        raise DomainError(f"point has {n} coordinates, Theta is {theta.n}x{theta.n}")
    L, M, R = point.L, point.M, point.R
    exact = theta.exact and point.exact

    mr = sorted(M + R)
    if mr:
        sigma = _rationalize_sigma(sigma_matrix(theta, M, R), q)
        if q is None:
            q = sigma.denominator()
        elif q < 1 or not sigma.integral_after_scaling(q):
            raise IncompatibleDenominator(f"q = {q} does not clear the denominators of Sigma")
        torus = irreducible_torus_generators(sigma)
        dim_h = torus[0].shape[0]
    else:
        torus, dim_h = [], 1
        q = q if q is not None else 1
    if not exact:
        torus = [t.to_dense() for t in torus]
    v_of = {i: torus[pos] for pos, i in enumerate(mr)}

    slots = {i: pos for pos, i in enumerate(list(L) + list(M))}
    n_slots = len(slots)
    eye2 = identity(2, exact)
    e_up = ExactMatrix.from_rows([[0, 1], [0, 0]]) if exact else np.array([[0, 1], [0, 0]], complex)
    one_h = identity(dim_h, exact)

    def on_slots(ops: Dict[int, Matrix]) -> Matrix:
        if not n_slots:
            return identity(1, exact)
        return kron_all([ops.get(p, eye2) for p in range(n_slots)])

    def phase_diag(i: int, ks, mult: int, star_first: bool) -> Matrix:
        # prod_k (e_k e_k* + ph e_k* e_k) = diag(1, ph) in slot k; star_first swaps the roles
        ops = {}
        for k in ks:
            ph = Phase(theta[i, k] * mult / 2 if exact else float(theta[i, k]) * mult / 2)
            c = ph.to_cyclo() if exact else ph.to_complex()
            ops[slots[k]] = _diag2(c, 1, exact) if star_first else _diag2(1, c, exact)
        return on_slots(ops)

    gens = []
    for i in range(n):
        if i in L:
            g = kron(matmul(phase_diag(i, L, 1, False), on_slots({slots[i]: e_up})), one_h)
        elif i in M:
            e_i = on_slots({slots[i]: e_up})
            first = kron(matmul(phase_diag(i, L, 2, False),
                                phase_diag(i, [k for k in M if k < i], 2, True)), one_h)
            tail = matmul(phase_diag(i, [k for k in M if k >= i], 4, True), e_i)
            second = add(scale(_sqrt(point.x[i]), kron(tail, v_of[i])),
                         scale(_sqrt(1 - point.x[i]), kron(adjoint(e_i), one_h)))
            g = matmul(first, second)
        else:
            pref = matmul(phase_diag(i, L, 2, False), phase_diag(i, M, 2, True))
            g = scale(_sqrt(_HALF) if exact else math.sqrt(0.5), kron(pref, v_of[i]))
        gens.append(g)
    return CarRep(n, theta, gens, "tau_x", point, q)


def _diag2(a, b, exact: bool) -> Matrix:
    if exact:
        return ExactMatrix.diagonal([a, b])
    return np.diag([complex(a), complex(b)])


# ---------------------------------------------------------------------------
# checks


@dataclass
class RelationReport:
    anticommutator: List[float]
    star_relation: Dict[Tuple[int, int], float]
    plain_relation: Dict[Tuple[int, int], float]
    tol: float
    exact: bool

    @property
    def max_residual(self) -> float:
        vals = self.anticommutator + list(self.star_relation.values()) + list(self.plain_relation.values())
        return max(vals) if vals else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        def pairs(d):
            return [{"i": i + 1, "j": j + 1, "residual": v} for (i, j), v in sorted(d.items())]

        return {
            "anticommutator": self.anticommutator,
            "starRelation": pairs(self.star_relation),
            "plainRelation": pairs(self.plain_relation),
            "maxResidual": self.max_residual,
            "tol": self.tol,
            "exact": self.exact,
            "passed": self.passed,
        }


def verify_car_relations(rep: CarRep, tol: float = 1e-9) -> RelationReport:
    gens = rep.generators
    exact = rep.exact and rep.theta.exact
    if not exact:
        gens = rep.dense()
    stars = [adjoint(g) for g in gens]
    one = identity(rep.dim, exact)
    anti = [residual(add(matmul(stars[i], gens[i]), matmul(gens[i], stars[i])), one)
            for i in range(rep.n)]
    star_rel, plain_rel = {}, {}
    for i in range(rep.n):
        for j in range(rep.n):
            if i == j:
                continue
            ph = Phase(rep.theta[i, j])
            star_rel[(i, j)] = residual(matmul(stars[i], gens[j]), scale(ph, matmul(gens[j], stars[i])))
            plain_rel[(i, j)] = residual(matmul(gens[i], gens[j]), scale(-ph, matmul(gens[j], gens[i])))
    return RelationReport(anti, star_rel, plain_rel, tol, exact)


@dataclass
class SpectrumEntry:
    index: int
    kind: str
    spectrum: List[float]
    expected: List[float]
    ok: bool

    def to_json(self) -> dict:
        return {"index": self.index + 1, "kind": self.kind, "spectrum": self.spectrum,
                "expected": self.expected, "ok": self.ok}


@dataclass
class SpectraReport:
    entries: List[SpectrumEntry]
    notes: List[str]

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries], "passed": self.passed, "notes": self.notes}


def _distinct(values, tol: float) -> List[float]:
    out: List[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


def number_operator_spectra(rep: CarRep, tol: float = 1e-10) -> SpectraReport:
    """Distinct eigenvalues of a_i* a_i compared with {0,1}, {x_i, 1-x_i} or {1/2}."""
    if rep.x is None:
        raise ValueError("representation carries no hypercube point")
    entries = []
    for i, g in enumerate(rep.dense()):
        spec = _distinct(hermitian_spectrum(g.conj().T @ g), tol)
        if i in rep.x.L:
            kind, expected = "L", [0.0, 1.0]
        elif i in rep.x.M:
            xi = float(rep.x.x[i])
            kind, expected = "M", sorted({xi, 1.0 - xi})
        else:
            kind, expected = "R", [0.5]
        ok = len(spec) == len(expected) and all(abs(a - b) <= tol for a, b in zip(spec, expected))
        entries.append(SpectrumEntry(i, kind, spec, expected, ok))
    notes = []
    if rep.x.R:
        notes.append("R indices: a_i is a unitary over sqrt 2, so a_i* a_i = I/2 rather than the identity")
    return SpectraReport(entries, notes)


@dataclass
class HomSpace:
    dimension: int
    basis: List[np.ndarray]
    singular_values: np.ndarray

    def to_json(self) -> dict:
        return {"dimension": self.dimension}


def hom_space(rep1: CarRep, rep2: CarRep, tol: float = 1e-8) -> HomSpace:
    """Intertwiners C: H2 -> H1 with rep1(a_i) C = C rep2(a_i) and the same for adjoints."""
    if rep1.n != rep2.n:
        raise DimensionMismatch("representations of different algebras")
    d1, d2 = rep1.dim, rep2.dim
    blocks = []
    for a1, a2 in zip(rep1.dense(), rep2.dense()):
        for b1, b2 in ((a1, a2), (a1.conj().T, a2.conj().T)):
            # row-major vec: vec(B1 C) = (B1 (x) I) vec C, vec(C B2) = (I (x) B2^T) vec C
            blocks.append(np.kron(b1, np.eye(d2)) - np.kron(np.eye(d1), b2.T))
    system = np.vstack(blocks)
    _, s, vh = np.linalg.svd(system)
    s_full = np.zeros(d1 * d2)
    s_full[: len(s)] = s
    null = np.nonzero(s_full <= tol)[0]
    basis = [vh[k].conj().reshape(d1, d2) for k in null]
    return HomSpace(len(basis), basis, s_full)
