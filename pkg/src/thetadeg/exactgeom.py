"""Exact rational linear algebra and small-polytope machinery.

Everything works over ``fractions.Fraction``; no floats enter any predicate.
Polytopes are given by their vertex sets (points in convex position) in
ambient dimension <= 3, which covers the documented rank range.
"""

import itertools
from fractions import Fraction


def frac_det(rows):
    """Determinant of a square matrix with Fraction/int entries."""
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1) / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det

def frac_solve(rows, rhs):
    """Solve A x = b exactly; A square nonsingular."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[r][n] for r in range(n))

def frac_inv(rows):
    """Exact inverse of a square nonsingular matrix, as tuple of tuples."""
    n = len(rows)
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(frac_solve(rows, e))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

def row_space_basis(vectors):
    """Basis (as echelonized rows) of the span of the given vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    basis = []
    lead_cols = []
    for row in rows:
        r = list(row)
        for b, lc in zip(basis, lead_cols):
            if r[lc] != 0:
                f = r[lc] / b[lc]
                r = [x - f * y for x, y in zip(r, b)]
        lc = next((i for i, x in enumerate(r) if x != 0), None)
        if lc is not None:
            basis.append(r)
            lead_cols.append(lc)
    return basis

def affine_rank(points):
    """Dimension of the affine hull of the points."""
    if len(points) <= 1:
        return 0
    p0 = points[0]
    diffs = [tuple(Fraction(a) - Fraction(b) for a, b in zip(p, p0)) for p in points[1:]]
    return len(row_space_basis(diffs))

def affine_coordinates(points):
    """Coordinates of the points in a basis of their affine hull.

    Returns (coords, base_point, basis_vectors); coords[i] has length equal
    to the affine rank.  Exact, so incidence structure is preserved.
    """
    p0 = tuple(Fraction(x) for x in points[0])
    diffs = [tuple(Fraction(a) - b for a, b in zip(p, p0)) for p in points]
    basis = row_space_basis(diffs[1:])
    r = len(basis)
    if r == 0:
        return [() for _ in points], p0, []
    # independent coordinate columns of the echelonized basis
    lead = []
    for b in basis:
        lead.append(next(i for i, x in enumerate(b) if x != 0))
    sq = [[basis[i][c] for i in range(r)] for c in lead]
    coords = []
    for d in diffs:
        rhs = [d[c] for c in lead]
        coords.append(frac_solve(sq, rhs))
    return coords, p0, basis


def _facets_full_dim(points):
    """Facets of a full-dimensional polytope given by vertices in R^d.

    Returns a list of (normal, offset, index_tuple) with normal . x <= offset
    for every vertex and equality exactly on the facet's vertices.  Brute
    force over candidate hyperplanes; fine for the handful of vertices the
    subdivision cells have.
    """
    d = len(points[0])
    m = len(points)
    if d == 0:
        return []
    if d == 1:
        vals = [p[0] for p in points]
        i_min = min(range(m), key=lambda i: vals[i])
        i_max = max(range(m), key=lambda i: vals[i])
        return [
            ((Fraction(-1),), -vals[i_min], (i_min,)),
            ((Fraction(1),), vals[i_max], (i_max,)),
        ]
    facets = {}
    for combo in itertools.combinations(range(m), d):
        pts = [points[i] for i in combo]
        if affine_rank(pts) != d - 1:
            continue
        normal = _hyperplane_normal(pts)
        if normal is None:
            continue
        offset = sum(n * x for n, x in zip(normal, pts[0]))
        side = [sum(n * x for n, x in zip(normal, p)) - offset for p in points]
        if all(s >= 0 for s in side):
            normal = tuple(-x for x in normal)
            offset = -offset
            side = [-s for s in side]
        if not all(s <= 0 for s in side):
            continue
        eq = tuple(i for i, s in enumerate(side) if s == 0)
        facets[eq] = (normal, offset, eq)
    return list(facets.values())

def _hyperplane_normal(pts):
    """Normal of the hyperplane through d affinely independent points in R^d."""
    d = len(pts[0])
    diffs = [tuple(Fraction(a) - Fraction(b) for a, b in zip(p, pts[0])) for p in pts[1:]]
    # cofactor expansion: normal_i = (-1)^i det(minor_i)
    normal = []
    for i in range(d):
        minor = [[row[j] for j in range(d) if j != i] for row in diffs]
        normal.append((-1) ** i * frac_det(minor))
    if all(x == 0 for x in normal):
        return None
    return tuple(normal)

def polytope_facets(points):
    """Facets of conv(points); points must affinely span their ambient space."""
    return _facets_full_dim([tuple(Fraction(x) for x in p) for p in points])

def contains_point(points, y, facets=None):
    """Exact membership of y in conv(points) (full-dimensional)."""
    y = tuple(Fraction(x) for x in y)
    if facets is None:
        facets = polytope_facets(points)
    for normal, offset, _ in facets:
        if sum(n * x for n, x in zip(normal, y)) > offset:
            return False
    return True

def all_faces(points):
    """All faces of conv(points), as frozensets of vertex indices.

    Includes the polytope itself and the vertices; excludes the empty face.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]

    def rec(idx):
        sub = [pts[i] for i in idx]
        out = {frozenset(idx)}
        r = affine_rank(sub)
        if r == 0:
            return out
        coords, _, _ = affine_coordinates(sub)
        for _, _, eq in _facets_full_dim(coords):
            face_idx = tuple(idx[i] for i in eq)
            out |= rec(face_idx)
        return out

    return rec(tuple(range(len(pts))))

def triangulate(points):
    """Triangulation of a full-dimensional conv(points) into index simplices."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    d = len(pts[0])

    def rec(idx, coords, dim):
        if len(idx) == dim + 1:
            return [tuple(idx)]
        simplices = []
        apex = idx[0]
        for _, _, eq in _facets_full_dim(coords):
            face_idx = [idx[i] for i in eq]
            if apex in face_idx:
                continue
            face_pts = [coords[i] for i in eq]
            face_coords, _, _ = affine_coordinates(face_pts)
            for s in rec(face_idx, face_coords, dim - 1):
                simplices.append((apex,) + s)
        return simplices

    if d == 0:
        return [tuple(range(len(pts)))]
    return rec(list(range(len(pts))), pts, d)

def polytope_volume(points):
    """Exact Euclidean volume of conv(points), full-dimensional in R^d."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if not pts:
        return Fraction(0)
    d = len(pts[0])
    if d == 0:
        return Fraction(1)
    if affine_rank(pts) < d:
        return Fraction(0)
    total = Fraction(0)
    fact = 1
    for i in range(2, d + 1):
        fact *= i
    for simplex in triangulate(pts):
        v0 = pts[simplex[0]]
        rows = [tuple(a - b for a, b in zip(pts[i], v0)) for i in simplex[1:]]
        total += abs(frac_det(rows))
    return total / fact

def ceil_frac(x):
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)

def floor_frac(x):
    x = Fraction(x)
    return x.numerator // x.denominator

def isqrt_ceil(x):
    """Smallest integer b >= 0 with b*b >= x, for rational x >= 0."""
    import math

    x = Fraction(x)
    if x <= 0:
        return 0
    b = math.isqrt(ceil_frac(x))
    while b * b < x:
        b += 1
    return b
