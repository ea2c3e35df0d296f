"""Exact scalars and sparse exact matrices.

A :class:`Cyclo` is a finite sum ``sum c * sqrt(s) * exp(2*pi*i*r)`` with rational
``c``, squarefree positive integer ``s`` and rational turn ``r``.  This is the
smallest ring that holds every entry produced by the constructions in this
package when the deformation matrix and the hypercube point are rational.

:class:`ExactMatrix` stores such entries sparsely.  Every generator we build is
a short sum of generalized permutation matrices, so the sparse form stays small.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Tuple

import numpy as np

from .errors import DimensionMismatch

_HALF = Fraction(1, 2)

Key = Tuple[Fraction, int]


def _fold(r: Fraction, c: Fraction) -> Tuple[Fraction, Fraction]:
    # exp(2 pi i r) with r in [1/2, 1) equals -exp(2 pi i (r - 1/2))
    r = r % 1
    if r >= _HALF:
        return r - _HALF, -c
    return r, c


def _squarefree_split(n: int) -> Tuple[int, int]:
    """Return (f, s) with n = f*f*s and s squarefree."""
    f, s, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return f, s * n


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> Tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    # x^n - 1 = prod_{d | n} Phi_d(x)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_exact_div(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        coef = num[k + len(den) - 1] // lead
        out[k] = coef
        for j, d in enumerate(den):
            num[k + j] -= coef * d
    return out


def _reduces_to_zero(coeffs: Dict[int, Fraction], n: int) -> bool:
    """Whether sum coeffs[k] * zeta_n**k vanishes, via reduction mod Phi_n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    top = max(coeffs) if coeffs else 0
    poly = [Fraction(0)] * (max(top, deg) + 1)
    for k, c in coeffs.items():
        poly[k] += c
    # phi is monic
    for k in range(len(poly) - 1, deg - 1, -1):
        c = poly[k]
        if c:
            for j, p in enumerate(phi):
                poly[k - deg + j] -= c * p
    return not any(poly[:deg])


def _roots_vanish(group: Mapping[Fraction, Fraction]) -> bool:
    """Whether sum c * exp(2 pi i r) over the group is zero."""
    n = 2
    for r in group:
        n = n * r.denominator // math.gcd(n, r.denominator)
    coeffs: Dict[int, Fraction] = {}
    for r, c in group.items():
        k = int((r % 1) * n)
        coeffs[k] = coeffs.get(k, 0) + c
    return _reduces_to_zero(coeffs, n)


def _prime_factors(n: int):
    p = 2
    while p * p <= n:
        while n % p == 0:
            yield p
            n //= p
        p += 1
    if n > 1:
        yield n


@lru_cache(maxsize=None)
def _radical_as_roots(s: int) -> Dict[Fraction, Fraction]:
    """sqrt(s) for squarefree s as a combination of roots of unity (Gauss sums)."""
    out = {Fraction(0): Fraction(1)}
    for p in _prime_factors(s):
        if p == 2:
            piece = {Fraction(1, 8): Fraction(1), Fraction(7, 8): Fraction(1)}
        else:
            # g = sum (k/p) z_p^k equals sqrt(p) or i sqrt(p)
            shift = Fraction(0) if p % 4 == 1 else Fraction(3, 4)
            piece = {}
            for k in range(1, p):
                leg = 1 if pow(k, (p - 1) // 2, p) == 1 else -1
                key = (Fraction(k, p) + shift) % 1
                piece[key] = piece.get(key, 0) + leg
        merged: Dict[Fraction, Fraction] = {}
        for r1, c1 in out.items():
            for r2, c2 in piece.items():
                key = (r1 + r2) % 1
                merged[key] = merged.get(key, 0) + c1 * c2
        out = merged
    return out


class Cyclo:
    """Exact element of Q(roots of unity, square roots of rationals)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Key, Fraction] | None = None):
        clean: Dict[Key, Fraction] = {}
        if terms:
            for (r, s), c in terms.items():
                if not c:
                    continue
                r, c = _fold(Fraction(r), Fraction(c))
                key = (r, s)
                v = clean.get(key, 0) + c
                if v:
                    clean[key] = v
                else:
                    clean.pop(key, None)
        self.terms = clean

    # constructors ------------------------------------------------------
    @classmethod
    def rational(cls, c) -> "Cyclo":
        return cls({(Fraction(0), 1): Fraction(c)})

    @classmethod
    def root(cls, turn) -> "Cyclo":
        """exp(2 pi i * turn) for rational ``turn``."""
        return cls({(Fraction(turn), 1): Fraction(1)})

    @classmethod
    def sqrt(cls, q) -> "Cyclo":
        """Square root of a nonnegative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("sqrt of a negative rational")
        if q == 0:
            return cls()
        f, s = _squarefree_split(q.numerator * q.denominator)
        return cls({(Fraction(0), s): Fraction(f, q.denominator)})

    @classmethod
    def coerce(cls, value) -> "Cyclo":
        if isinstance(value, Cyclo):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"cannot make an exact scalar from {type(value).__name__}")

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        merged = dict(self.terms)
        for k, c in other.terms.items():
            merged[k] = merged.get(k, 0) + c
        return Cyclo(merged)

    __radd__ = __add__

    def __neg__(self):
        out = Cyclo()
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Cyclo.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Cyclo.coerce(other)
        except TypeError:
            return NotImplemented
        acc: Dict[Key, Fraction] = {}
        for (r1, s1), c1 in self.terms.items():
            for (r2, s2), c2 in other.terms.items():
                g = math.gcd(s1, s2)
                r, c = _fold(r1 + r2, c1 * c2 * g)
                key = (r, (s1 // g) * (s2 // g))
                acc[key] = acc.get(key, 0) + c
        return Cyclo(acc)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclo":
        return Cyclo({(-r, s): c for (r, s), c in self.terms.items()})

    # queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        if not self.terms:
            return True
        by_radical: Dict[int, Dict[Fraction, Fraction]] = {}
        for (r, s), c in self.terms.items():
            by_radical.setdefault(s, {})[r] = c
        if all(_roots_vanish(group) for group in by_radical.values()):
            return True
        if abs(complex(self)) > 1e-6:
            return False
        # radicals of different s can still cancel (sqrt 2 = z8 + z8^-1):
        # rewrite every sqrt(s) as a sum of roots of unity and test once
        flat: Dict[Fraction, Fraction] = {}
        for (r, s), c in self.terms.items():
            for r2, c2 in _radical_as_roots(s).items():
                key = (r + r2) % 1
                flat[key] = flat.get(key, 0) + c * c2
        return _roots_vanish(flat)

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        total = 0j
        for (r, s), c in self.terms.items():
            total += float(c) * math.sqrt(s) * cmath.exp(2j * math.pi * float(r))
        return total

    def __repr__(self):
        if not self.terms:
            return "Cyclo(0)"
        parts = []
        for (r, s), c in sorted(self.terms.items()):
            piece = str(c)
            if s != 1:
                piece += f"*sqrt({s})"
            if r:
                piece += f"*e({r})"
            parts.append(piece)
        return "Cyclo(" + " + ".join(parts) + ")"


ONE = Cyclo.rational(1)


class ExactMatrix:
    """Sparse matrix with :class:`Cyclo` entries."""

    __slots__ = ("shape", "data")

    def __init__(self, shape: Tuple[int, int], data: Mapping[Tuple[int, int], Cyclo] | None = None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.data: Dict[Tuple[int, int], Cyclo] = {}
        if data:
            for ij, v in data.items():
                v = Cyclo.coerce(v)
                if v.terms:
                    self.data[ij] = v

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls((n, n), {(i, i): ONE for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls((rows, cols))

    @classmethod
    def from_rows(cls, rows) -> "ExactMatrix":
        """Build from nested sequences of ints, Fractions or Cyclo values."""
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        data = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionMismatch("ragged rows")
            for j, v in enumerate(row):
                data[(i, j)] = Cyclo.coerce(v)
        return cls((len(rows), ncols), data)

    @classmethod
    def diagonal(cls, values: Iterable) -> "ExactMatrix":
        values = [Cyclo.coerce(v) for v in values]
        return cls((len(values), len(values)), {(i, i): v for i, v in enumerate(values)})

    # structure ---------------------------------------------------------
    @property
    def nnz(self) -> int:
        return len(self.data)

    def items(self) -> Iterator[Tuple[Tuple[int, int], Cyclo]]:
        return iter(self.data.items())

    def __getitem__(self, ij) -> Cyclo:
        return self.data.get(ij, Cyclo())

    def adjoint(self) -> "ExactMatrix":
        return ExactMatrix((self.shape[1], self.shape[0]),
                           {(j, i): v.conjugate() for (i, j), v in self.data.items()})

    @property
    def H(self) -> "ExactMatrix":
        return self.adjoint()

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for (i, j), v in self.data.items():
            out[i, j] = complex(v)
        return out

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.data.values())

    # arithmetic --------------------------------------------------------
    def _check_same(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        self._check_same(other)
        out = dict(self.data)
        for ij, v in other.data.items():
            out[ij] = out[ij] + v if ij in out else v
        return ExactMatrix(self.shape, out)

    def __neg__(self):
        return ExactMatrix(self.shape, {ij: -v for ij, v in self.data.items()})

    def __sub__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        try:
            scalar = Cyclo.coerce(scalar)
        except TypeError:
            return NotImplemented
        return ExactMatrix(self.shape, {ij: v * scalar for ij, v in self.data.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        rows_of_other: Dict[int, list] = {}
        for (k, j), v in other.data.items():
            rows_of_other.setdefault(k, []).append((j, v))
        acc: Dict[Tuple[int, int], Cyclo] = {}
        for (i, k), a in self.data.items():
            for j, b in rows_of_other.get(k, ()):
                prod = a * b
                key = (i, j)
                acc[key] = acc[key] + prod if key in acc else prod
        return ExactMatrix((self.shape[0], other.shape[1]), acc)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        r2, c2 = other.shape
        out = {}
        for (i, j), a in self.data.items():
            for (k, l), b in other.data.items():
                out[(i * r2 + k, j * c2 + l)] = a * b
        return ExactMatrix((self.shape[0] * r2, self.shape[1] * c2), out)

    def scale_columns(self, factors: Mapping[int, Cyclo]) -> "ExactMatrix":
        return ExactMatrix(self.shape, {(i, j): v * factors[j] for (i, j), v in self.data.items()})

    def __repr__(self):
        return f"ExactMatrix(shape={self.shape}, nnz={self.nnz})"
