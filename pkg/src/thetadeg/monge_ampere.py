"""Discrete Monge-Ampere measures of the periodic PL potential.

The measure of a convex PL function assigns to each vertex the Euclidean
volume of its subdifferential (the dual polytope spanned by the slopes of
the incident top cells).  Everything here is exact rational; the
convergence helpers at the end are the only floating-point code.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactgeom import polytope_volume
from .lattice import phi_bar, reduce_mod
from .subdivision import touching_slopes


@dataclass(frozen=True)
class DualCell:
    """Dual polytope of a lattice point: vertices are incident cell slopes."""

    base_point: tuple
    vertices: tuple

    def volume(self):
        return polytope_volume(self.vertices)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic measure on the quotient lattice."""

    atoms: tuple  # ((point, mass), ...) with exact Fraction masses

    def __post_init__(self):
        for _, mass in self.atoms:
            if mass < 0:
                raise ValueError("atomic measure with a negative mass")
        pts = [p for p, _ in self.atoms]
        if len(set(pts)) != len(pts):
            raise ValueError("atomic measure with duplicate support points")

    @property
    def total(self):
        return sum(m for _, m in self.atoms)

    def mass_at(self, point):
        for p, m in self.atoms:
            if p == point:
                return m
        return Fraction(0)


def subdifferential(s, y0):
    """Vertices of the subdifferential of the PL potential at y0.

    A single slope inside a top cell, the full dual polytope at a lattice
    point, an intermediate face on lower-dimensional strata.
    """
    return [tuple(x) for x in touching_slopes(s, y0)]

def dual_cell(s, m):
    """Dual polytope of the lattice point m with respect to the potential."""
    m = tuple(int(x) for x in m)
    return DualCell(base_point=m, vertices=tuple(touching_slopes(s, m)))

def ma_measure(s):
    """Monge-Ampere measure of the periodic potential: one atom per quotient point.

    Masses are dual-cell volumes computed independently by exact simplicial
    decomposition; their predicted common value det(Z) is asserted by the
    test suite, not assumed here.
    """
    k, n = s.k, s.n
    atoms = []
    for m in itertools.product(range(k), repeat=n):
        atoms.append((m, dual_cell(s, m).volume()))
    return AtomicMeasure(atoms=tuple(atoms))

def ma_measure_shifted(s, affine_slope):
    """Monge-Ampere atoms of (potential + affine function with given slope).

    Adding an affine function translates every subdifferential by the same
    covector, so the masses must match ma_measure exactly; exposed so the
    invariance is checkable rather than true by construction.
    """
    k, n = s.k, s.n
    shift = tuple(Fraction(x) for x in affine_slope)
    atoms = []
    for m in itertools.product(range(k), repeat=n):
        verts = [tuple(c + d for c, d in zip(v, shift)) for v in touching_slopes(s, m)]
        atoms.append((m, polytope_volume(verts)))
    return AtomicMeasure(atoms=tuple(atoms))


def _max_concave_on_polytope(vertices, A, b, c0):
    """Exact maximum of -1/2 u^T A u + b^T u + c0 over conv(vertices).

    A positive definite on the span; recursion over faces when the
    unconstrained stationary point falls outside.
    """
    from .exactgeom import (
        affine_coordinates,
        contains_point,
        frac_solve,
        polytope_facets,
        affine_rank,
    )

    verts = [tuple(Fraction(x) for x in v) for v in vertices]
    d = len(verts[0])
    if d == 0 or affine_rank(verts) == 0:
        u = verts[0]
        quad = sum(u[i] * A[i][j] * u[j] for i in range(d) for j in range(d)) / 2
        lin = sum(bi * ui for bi, ui in zip(b, u))
        return -quad + lin + c0
    if affine_rank(verts) < d:
        coords, p0, basis = affine_coordinates(verts)
        return _max_concave_on_polytope(coords, *_restrict_quadratic(A, b, c0, p0, basis))
    ustar = frac_solve(A, b)
    if contains_point(verts, ustar):
        val = sum(bi * ui for bi, ui in zip(b, ustar)) / 2 + c0
        return val
    best = None
    for _, _, eq in polytope_facets(verts):
        face = [verts[i] for i in eq]
        coords, p0, basis = affine_coordinates(face)
        val = _max_concave_on_polytope(coords, *_restrict_quadratic(A, b, c0, p0, basis))
        if best is None or val > best:
            best = val
    return best

def _restrict_quadratic(A, b, c0, p0, basis):
    """Pull the quadratic back along u = p0 + B v."""
    d = len(p0)
    r = len(basis)
    Ap0 = [sum(A[i][j] * p0[j] for j in range(d)) for i in range(d)]
    A2 = [
        [
            sum(basis[a][i] * A[i][j] * basis[c][j] for i in range(d) for j in range(d))
            for c in range(r)
        ]
        for a in range(r)
    ]
    b2 = [sum(basis[a][i] * (b[i] - Ap0[i]) for i in range(d)) for a in range(r)]
    quad0 = sum(p0[i] * Ap0[i] for i in range(d)) / 2
    lin0 = sum(b[i] * p0[i] for i in range(d))
    return A2, b2, -quad0 + lin0 + c0

def sup_gap(s):
    """Exact sup over the torus of (PL potential - quadratic potential).

    The gap is nonnegative, lattice-periodic, and attained per cell at the
    stationary point of a concave quadratic (or on the cell boundary).
    """
    A = [[Fraction(x) for x in row] for row in s.q.entries]
    best = Fraction(0)
    for cell in s.cells:
        val = _max_concave_on_polytope(
            [tuple(Fraction(x) for x in v) for v in cell.vertices],
            A,
            list(cell.slope),
            cell.constant,
        )
        if val > best:
            best = val
    return best

def rescaled_sup_gap(q, k, s=None):
    """Sup-norm of the dilation-rescaled potential gap: sup|phi - phi_bar| / k^2."""
    from .subdivision import build_subdivision

    if s is None:
        s = build_subdivision(q, k)
    return sup_gap(s) / (Fraction(k) ** 2)


def weak_convergence_pairing(q, k, f, reference_samples=10**6):
    """Pair the rescaled atomic measure and the limit density against a test function.

    Returns (lhs, rhs): lhs sums f over the k^n rational points of the unit
    torus weighted by det(Z)/k^n; rhs is det(Z) times a midpoint-rule
    reference integral over [0,1)^n (10^6 samples by default, documented for
    n <= 2).
    """
    n = q.n
    det = float(q.det())
    grids = [np.arange(k) / k for _ in range(n)]
    mesh = np.meshgrid(*grids, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    lhs = det * float(np.mean(_eval_many(f, pts)))
    per_axis = max(2, round(reference_samples ** (1.0 / n)))
    mid = [(np.arange(per_axis) + 0.5) / per_axis for _ in range(n)]
    mesh_r = np.meshgrid(*mid, indexing="ij")
    pts_r = np.stack([m.ravel() for m in mesh_r], axis=-1)
    rhs = det * float(np.mean(_eval_many(f, pts_r)))
    return lhs, rhs

def _eval_many(f, pts):
    """Evaluate f on rows of pts, using a vectorized call when f supports it."""
    try:
        vals = np.asarray(f(*(pts[:, i] for i in range(pts.shape[1]))), dtype=float)
        if vals.shape == (pts.shape[0],):
            return vals
    except Exception:
        pass
    return np.array([float(f(*p)) for p in pts])
