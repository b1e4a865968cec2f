"""Exact arithmetic for the lattice Z^n, the quadratic form, and its cocycle.

The single input datum of the whole package is an even positive-definite
integer quadratic form; the quadratic potential it generates takes integer
values on the lattice, which every downstream module relies on.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatchError
from .exactgeom import frac_det, frac_inv


def _as_fracs(vec):
    return tuple(Fraction(x) for x in vec)


@dataclass(frozen=True)
class QForm:
    """Symmetric positive-definite integer matrix with even diagonal."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("quadratic form matrix must be square and nonempty")
        for i in range(n):
            if rows[i][i] % 2 != 0:
                raise ValueError(
                    f"diagonal entry Z[{i}][{i}]={rows[i][i]} is odd; the lattice "
                    "potential must be integer-valued (even diagonal required)"
                )
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("quadratic form matrix must be symmetric")
        for m in range(1, n + 1):
            minor = [row[:m] for row in rows[:m]]
            if frac_det(minor) <= 0:
                raise ValueError(
                    f"leading {m}x{m} minor is not positive: form is not positive definite"
                )

    @classmethod
    def from_flat(cls, values):
        """Build from a row-major flat integer list (n inferred)."""
        values = [int(v) for v in values]
        n = round(len(values) ** 0.5)
        if n * n != len(values):
            raise ValueError(f"flat form list of length {len(values)} is not a square")
        return cls(tuple(tuple(values[i * n + j] for j in range(n)) for i in range(n)))

    @property
    def n(self):
        return len(self.entries)

    def check_dim(self, vec):
        if len(vec) != self.n:
            raise DimensionMismatchError(
                f"vector of length {len(vec)} against rank-{self.n} form"
            )

    def apply(self, x, y):
        """Exact bilinear value x^T Z y."""
        self.check_dim(x)
        self.check_dim(y)
        return sum(
            Fraction(x[i]) * self.entries[i][j] * Fraction(y[j])
            for i in range(self.n)
            for j in range(self.n)
        )

    def matvec(self, y):
        """Exact Z y as a tuple of Fractions."""
        self.check_dim(y)
        return tuple(
            sum(self.entries[i][j] * Fraction(y[j]) for j in range(self.n))
            for i in range(self.n)
        )

    def det(self):
        d = frac_det(self.entries)
        return int(d)

    def inverse(self):
        """Exact inverse matrix, rows of Fractions."""
        return frac_inv(self.entries)


@dataclass(frozen=True)
class AffineLinear:
    """Affine function <slope, y> + constant with exact rational data."""

    slope: tuple
    constant: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", _as_fracs(self.slope))
        object.__setattr__(self, "constant", Fraction(self.constant))

    def __call__(self, y):
        if len(y) != len(self.slope):
            raise DimensionMismatchError(
                f"vector of length {len(y)} against slope of length {len(self.slope)}"
            )
        return sum(s * Fraction(v) for s, v in zip(self.slope, y)) + self.constant


def phi_bar(q, y):
    """The quadratic potential (1/2) y^T Z y, exact."""
    return q.apply(y, y) / 2

def alpha(q, gamma):
    """Affine cocycle of a lattice translation: slope Z(gamma, .), constant phi_bar(gamma)."""
    q.check_dim(gamma)
    return AffineLinear(q.matvec(gamma), phi_bar(q, gamma))

def cocycle_defect(q, y, gamma):
    """phi_bar(y+gamma) - phi_bar(y) - alpha_gamma(y); identically zero."""
    shifted = tuple(Fraction(a) + Fraction(b) for a, b in zip(y, gamma))
    return phi_bar(q, shifted) - phi_bar(q, y) - alpha(q, gamma)(y)

def reduce_mod(k, m):
    """Canonical representative of m in (Z/kZ)^n, coordinates in {0,...,k-1}."""
    k = int(k)
    if k < 1:
        raise ValueError(f"modulus k must be >= 1, got {k}")
    return tuple(int(x) % k for x in m)
