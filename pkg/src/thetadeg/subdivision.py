"""Canonical periodic subdivision induced by the lattice potential.

The piecewise-linear convex function is the lower boundary of the convex
hull of the lattice points on the graph of the quadratic potential.  Cells
are recovered from a floating-point hull of a finite window and then each
accepted face is certified exactly: its supporting affine function must
minorize the potential on the whole lattice, which reduces to an
empty-ellipsoid check on a finite box.  Correctness therefore never rests
on floating point.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import ConvexHull

from .errors import WindowExhaustionError
from .exactgeom import (
    affine_rank,
    ceil_frac,
    floor_frac,
    frac_solve,
    isqrt_ceil,
    polytope_volume,
)
from .lattice import AffineLinear, alpha, phi_bar


def phi_int(q, m):
    """Integer value of the potential at a lattice point (even diagonal)."""
    n = q.n
    acc = 0
    for i in range(n):
        acc += q.entries[i][i] * m[i] * m[i]
        for j in range(i + 1, n):
            acc += 2 * q.entries[i][j] * m[i] * m[j]
    return acc // 2


@dataclass(frozen=True)
class Cell:
    """Top cell of the subdivision: lattice vertices plus exact affine data."""

    vertices: tuple
    slope: tuple
    constant: Fraction

    def __post_init__(self):
        object.__setattr__(
            self, "vertices", tuple(sorted(tuple(int(x) for x in v) for v in self.vertices))
        )
        object.__setattr__(self, "slope", tuple(Fraction(s) for s in self.slope))
        object.__setattr__(self, "constant", Fraction(self.constant))

    @property
    def dim(self):
        return affine_rank(self.vertices)

    def support(self, y):
        """Value of the affine function carried by this cell."""
        return sum(s * Fraction(v) for s, v in zip(self.slope, y)) + self.constant


@dataclass(frozen=True)
class PeriodicSubdivision:
    """Canonical top cells covering one fundamental domain, plus evaluator data."""

    q: object
    k: int
    cells: tuple
    window: int = 0
    translated: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not self.translated:
            object.__setattr__(self, "translated", _translated_supports(self))

    @property
    def n(self):
        return self.q.n


def _translated_supports(s):
    """Supports of all cell translates that can touch the box [0,k)^n.

    Entries are (slope, constant, cell_index, shift); the shift is the lattice
    translation k*gamma applied to the canonical cell.
    """
    n, k = s.n, s.k
    g = max(s.window, 1) // k + (1 if max(s.window, 1) % k else 0) + 1  # ceil(w/k) + 1
    out = []
    for idx, cell in enumerate(s.cells):
        for gamma in itertools.product(range(-g, g + 1), repeat=n):
            shift = tuple(k * x for x in gamma)
            zshift = s.q.matvec(shift)
            slope = tuple(c + z for c, z in zip(cell.slope, zshift))
            out.append((slope, _shifted_constant(s.q, cell, shift), idx, shift))
    return tuple(out)

def _shifted_constant(q, cell, shift):
    """Constant of the support of (cell + shift).

    From l'(y) = l(y - shift) + alpha_shift(y - shift), the slope gains
    Z*shift and the constant becomes d - <slope, shift> - phi_bar(shift).
    """
    c_dot = sum(cs * Fraction(sh) for cs, sh in zip(cell.slope, shift))
    return cell.constant - c_dot - phi_bar(q, shift)


def window_margin(q):
    """Lattice window margin guaranteeing every relevant face is seen.

    Combines the covering-radius style bound with an exact bound on the cell
    diameter from the circumscribed-ellipsoid box.
    """
    zinv = q.inverse()
    n = q.n
    spec_bound = ceil_frac(
        2 * max(sum(abs(x) for x in row) for row in zinv) * max(q.entries[i][i] for i in range(n))
    )
    rho_max = max(
        Fraction(q.apply(eps, eps), 4) for eps in itertools.product((-1, 1), repeat=n)
    )
    diam_bound = max(isqrt_ceil(4 * rho_max * zinv[i][i]) for i in range(n))
    return max(2, spec_bound, diam_bound)


def _certify_support(q, slope, const):
    """Exact empty-ellipsoid certificate for a candidate supporting function.

    Returns (ok, vertices): ok is False when some lattice point lies strictly
    below the candidate (not a face of the hull); on success the vertices are
    the full equality set, i.e. the cell of the subdivision.
    """
    n = q.n
    zinv = q.inverse()
    center = tuple(
        sum(zinv[i][j] * slope[j] for j in range(n)) for i in range(n)
    )
    rho = sum(Fraction(s) * c for s, c in zip(slope, center)) + 2 * Fraction(const)
    if rho < 0:
        return False, None
    ranges = []
    for i in range(n):
        b = isqrt_ceil(rho * zinv[i][i])
        lo = ceil_frac(center[i] - b)
        hi = floor_frac(center[i] + b)
        ranges.append(range(lo, hi + 1))
    verts = []
    for u in itertools.product(*ranges):
        gap = phi_int(q, u) - (
            sum(Fraction(s) * x for s, x in zip(slope, u)) + Fraction(const)
        )
        if gap < 0:
            return False, None
        if gap == 0:
            verts.append(u)
    return True, tuple(sorted(verts))


def _candidate_supports(q, k, w):
    """Candidate supporting functions harvested from a floating-point hull.

    Every lifted coordinate is an integer exactly representable in float64;
    candidates are still only hints, to be certified exactly afterwards.
    """
    n = q.n
    rng = range(-w, k + w + 1)
    pts = list(itertools.product(rng, repeat=n))
    lifted = np.array([list(p) + [phi_int(q, p)] for p in pts], dtype=float)
    hull = ConvexHull(lifted)
    supports = set()
    for simplex, eq in zip(hull.simplices, hull.equations):
        if eq[n] >= -1e-9:  # keep downward-facing facets only
            continue
        verts = [pts[i] for i in simplex]
        rows = [list(v) + [1] for v in verts]
        rhs = [phi_int(q, v) for v in verts]
        try:
            sol = frac_solve(rows, rhs)
        except ZeroDivisionError:  # degenerate sliver from facet merging
            continue
        supports.add((tuple(sol[:n]), sol[n]))
    return supports


def _canonicalize(q, k, verts, slope, const):
    """Translate a cell so its lex-smallest vertex lies in [0,k)^n."""
    lexmin = min(verts)
    gamma = tuple(x // k for x in lexmin)
    if all(g == 0 for g in gamma):
        return verts, tuple(Fraction(s) for s in slope), Fraction(const)
    shift = tuple(-k * g for g in gamma)
    new_verts = tuple(sorted(tuple(v + s for v, s in zip(vt, shift)) for vt in verts))
    zshift = q.matvec(shift)
    new_slope = tuple(Fraction(c) + z for c, z in zip(slope, zshift))
    new_const = _shifted_constant(
        q, Cell(vertices=verts, slope=slope, constant=const), shift
    )
    for v in new_verts:
        lv = sum(s * Fraction(x) for s, x in zip(new_slope, v)) + new_const
        assert lv == phi_bar(q, v), "translated support does not interpolate the potential"
    return new_verts, new_slope, new_const


def build_subdivision(q, k):
    """Canonical subdivision for level k, certified cell by cell.

    Raises WindowExhaustionError when the certified cells fail to tile a
    fundamental domain (a bug in the window sizing, not a user error).
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"level k must be >= 1, got {k}")
    n = q.n
    w = window_margin(q)
    cells = {}
    for slope, const in _candidate_supports(q, k, w):
        ok, verts = _certify_support(q, slope, const)
        if not ok or verts is None:
            continue
        if affine_rank(verts) < n:
            continue
        cverts, cslope, cconst = _canonicalize(q, k, verts, slope, const)
        if cverts not in cells:
            cells[cverts] = Cell(vertices=cverts, slope=cslope, constant=cconst)
    ordered = tuple(cells[key] for key in sorted(cells))
    total = sum(polytope_volume(c.vertices) for c in ordered)
    if total != Fraction(k) ** n:
        raise WindowExhaustionError(
            f"certified cells cover volume {total} of a fundamental domain of "
            f"volume {Fraction(k) ** n}; lattice window (margin {w}) missed faces"
        )
    for c in ordered:
        if any(s.denominator != 1 for s in c.slope):
            raise WindowExhaustionError(
                f"canonical hull produced a non-integral slope {c.slope}; "
                "this contradicts the integrality assumption for even forms"
            )
    return PeriodicSubdivision(q=q, k=k, cells=ordered, window=w)


def _reduce_point(s, y):
    """Split y = y0 + k*delta with y0 in [0,k)^n; exact."""
    yf = tuple(Fraction(x) for x in y)
    delta = tuple(floor_frac(x / s.k) for x in yf)
    y0 = tuple(x - s.k * d for x, d in zip(yf, delta))
    return y0, delta

def _max_supports(s, y0):
    """Value of phi at y0 in [0,k)^n and the supports achieving it."""
    best = None
    argmax = []
    for slope, const, idx, shift in s.translated:
        val = sum(sl * x for sl, x in zip(slope, y0)) + const
        if best is None or val > best:
            best = val
            argmax = [(slope, const, idx, shift)]
        elif val == best:
            argmax.append((slope, const, idx, shift))
    return best, argmax

def eval_phi(s, y):
    """Exact value of the periodic piecewise-linear function at a rational point."""
    y0, delta = _reduce_point(s, y)
    base, _ = _max_supports(s, y0)
    if all(d == 0 for d in delta):
        return base
    kdelta = tuple(s.k * d for d in delta)
    return base + alpha(s.q, kdelta)(y0)

def touching_slopes(s, y):
    """Slopes of all top cells whose closure contains y (exact)."""
    y0, delta = _reduce_point(s, y)
    _, argmax = _max_supports(s, y0)
    kdelta = tuple(s.k * d for d in delta)
    zshift = s.q.matvec(kdelta)
    return sorted({tuple(sl + z for sl, z in zip(slope, zshift)) for slope, _, _, _ in argmax})

def slope_integrality(s):
    """True iff every top-cell slope is an integer covector."""
    return all(all(x.denominator == 1 for x in c.slope) for c in s.cells)


@dataclass(frozen=True)
class QuotientComplex:
    """Cell complex on the torus: canonical faces per dimension plus face maps."""

    k: int
    n: int
    cells_by_dim: tuple  # tuple over dim of tuples of canonical vertex tuples
    top_components: tuple  # per top cell: index into cells_by_dim[n]
    face_maps: tuple  # per top cell: tuple of (local face verts, dim, index, shift)

    @property
    def vertex_count(self):
        return len(self.cells_by_dim[0])

    def euler_characteristic(self):
        return sum(
            (-1) ** d * len(faces) for d, faces in enumerate(self.cells_by_dim)
        )


def _canonical_face(k, verts):
    lexmin = min(verts)
    gamma = tuple(x // k for x in lexmin)
    shift = tuple(-k * g for g in gamma)
    return tuple(sorted(tuple(v + s for v, s in zip(vt, shift)) for vt in verts)), shift

def quotient_complex(s):
    """Quotient intersection complex: cells of all dimensions with identifications."""
    from .exactgeom import all_faces

    n, k = s.n, s.k
    canon = [dict() for _ in range(n + 1)]
    face_maps = []
    top_components = []
    for cell in s.cells:
        local = []
        for face in sorted(all_faces(cell.vertices), key=lambda f: tuple(sorted(f))):
            fverts = tuple(sorted(cell.vertices[i] for i in face))
            d = affine_rank(fverts)
            cverts, shift = _canonical_face(k, fverts)
            if cverts not in canon[d]:
                canon[d][cverts] = len(canon[d])
            local.append((fverts, d, canon[d][cverts], shift))
        face_maps.append(tuple(local))
        top_key, _ = _canonical_face(k, cell.vertices)
        top_components.append(canon[n][top_key])
    cells_by_dim = tuple(
        tuple(v for v, _ in sorted(canon[d].items(), key=lambda kv: kv[1]))
        for d in range(n + 1)
    )
    return QuotientComplex(
        k=k,
        n=n,
        cells_by_dim=cells_by_dim,
        top_components=tuple(top_components),
        face_maps=tuple(face_maps),
    )
