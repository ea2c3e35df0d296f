"""Phases, rational parsing and the matrix helpers shared by all modules.

Matrices come in two flavours: dense ``numpy`` complex arrays (the float path)
and :class:`~cartheta.cyclotomic.ExactMatrix` (the exact path, used whenever
every input is rational).  The helpers here accept either.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .cyclotomic import Cyclo, ExactMatrix
from .errors import DimensionMismatch, NonHermitian, ParseError

Real = Union[Fraction, float]
Matrix = Union[np.ndarray, ExactMatrix]

PHASE_TOL = 1e-9

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_real(text) -> Real:
    """Parse ``"p/q"`` or an integer as an exact Fraction, anything else as float."""
    if isinstance(text, bool):
        raise ParseError(f"not a number: {text!r}")
    if isinstance(text, (Fraction, int)):
        return Fraction(text)
    if isinstance(text, float):
        return text
    m = _RATIONAL_RE.match(str(text))
    if m:
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"not a number: {text!r}") from None


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def real_to_json(v: Real):
    return format_rational(v) if isinstance(v, Fraction) else float(v)


def is_exact(v) -> bool:
    return isinstance(v, (Fraction, int)) and not isinstance(v, bool)


def lcm_denominator(values) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // math.gcd(out, d)
    return out


@dataclass(frozen=True)
class Phase:
    """The unimodular number exp(2 pi i * value), value kept in [0, 1)."""

    value: Real

    def __post_init__(self):
        v = self.value
        if is_exact(v):
            v = Fraction(v) % 1
        else:
            v = float(v) % 1.0
            if v >= 1.0:  # -tiny % 1.0 can round up to 1.0
                v = 0.0
        object.__setattr__(self, "value", v)

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def __add__(self, other: "Phase") -> "Phase":
        if self.exact and other.exact:
            return Phase(self.value + other.value)
        return Phase(float(self.value) + float(other.value))

    def __neg__(self) -> "Phase":
        return Phase(-self.value)

    def __sub__(self, other: "Phase") -> "Phase":
        return self + (-other)

    def __mul__(self, k: int) -> "Phase":
        return Phase(self.value * k)

    __rmul__ = __mul__

    def distance(self, other: "Phase") -> float:
        """Arc distance in turns, in [0, 1/2]."""
        d = float((self - other).value)
        return min(d, 1.0 - d)

    def close_to(self, other: "Phase", tol: float = PHASE_TOL) -> bool:
        if self.exact and other.exact:
            return self.value == other.value
        return self.distance(other) <= tol

    def to_complex(self) -> complex:
        return phase_to_complex(self)

    def to_cyclo(self) -> Cyclo:
        if not self.exact:
            raise TypeError("approximate phase has no exact form")
        return Cyclo.root(self.value)

    def to_json(self):
        return real_to_json(self.value)


_EXACT_UNITS = {
    Fraction(0): 1 + 0j,
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1 + 0j,
    Fraction(3, 4): -1j,
}


def phase_to_complex(p: Phase) -> complex:
    if p.exact and p.value in _EXACT_UNITS:
        return _EXACT_UNITS[p.value]
    t = 2 * math.pi * float(p.value)
    return complex(math.cos(t), math.sin(t))


# ---------------------------------------------------------------------------
# matrix helpers working on both representations


def as_dense(a: Matrix) -> np.ndarray:
    if isinstance(a, ExactMatrix):
        return a.to_dense()
    return np.asarray(a, dtype=complex)


def adjoint(a: Matrix) -> Matrix:
    if isinstance(a, ExactMatrix):
        return a.adjoint()
    return np.conj(a).T


def kron(a: Matrix, b: Matrix) -> Matrix:
    if isinstance(a, ExactMatrix) and isinstance(b, ExactMatrix):
        return a.kron(b)
    return np.kron(as_dense(a), as_dense(b))


def kron_all(factors: Sequence[Matrix]) -> Matrix:
    out = factors[0]
    for f in factors[1:]:
        out = kron(out, f)
    return out


def identity(n: int, exact: bool = False) -> Matrix:
    return ExactMatrix.identity(n) if exact else np.eye(n, dtype=complex)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if isinstance(a, ExactMatrix) and isinstance(b, ExactMatrix):
        return a @ b
    return as_dense(a) @ as_dense(b)


def add(a: Matrix, b: Matrix) -> Matrix:
    if isinstance(a, ExactMatrix) and isinstance(b, ExactMatrix):
        return a + b
    return as_dense(a) + as_dense(b)


def sub(a: Matrix, b: Matrix) -> Matrix:
    if isinstance(a, ExactMatrix) and isinstance(b, ExactMatrix):
        return a - b
    return as_dense(a) - as_dense(b)


def scale(c, a: Matrix) -> Matrix:
    """Multiply by a scalar: Phase, Cyclo, rational or complex."""
    if isinstance(a, ExactMatrix):
        if isinstance(c, Phase) and c.exact:
            return a * c.to_cyclo()
        if isinstance(c, (Cyclo, Fraction, int)):
            return a * c
        a = a.to_dense()
    if isinstance(c, Phase):
        c = phase_to_complex(c)
    elif isinstance(c, Cyclo):
        c = complex(c)
    elif isinstance(c, Fraction):
        c = float(c)
    return c * a


def shape(a: Matrix):
    return a.shape


def max_abs(a: Matrix) -> float:
    """Max-entry norm; exactly 0.0 for an exact matrix that vanishes exactly."""
    if isinstance(a, ExactMatrix):
        if a.is_zero():
            return 0.0
        return float(np.abs(a.to_dense()).max())
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def residual(a: Matrix, b: Matrix) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return max_abs(sub(a, b))


def hermitian_spectrum(a: Matrix, tol: float = 1e-10) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix, with multiplicity."""
    d = as_dense(a)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {d.shape}")
    if d.size and np.abs(d - d.conj().T).max() > tol:
        raise NonHermitian("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(d)
