"""Theta functions of the degeneration, with certified truncation.

Each theta function is a lattice sum over one residue class: the term at a
lattice point v carries the integer exponent phi(v) of the base parameter
and the Fourier phase exp(2 pi i <w, v>).  Exponents are exact integers and
are multiplied into the complex phase afterwards, so the branch ambiguity of
log t (an integer multiple of 2 pi i times an integer) drops out exactly;
monodromy invariance is by construction, not by cancellation.
"""

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import TruncationBandError
from .exactgeom import frac_det
from .lattice import QForm, phi_bar, reduce_mod
from .subdivision import phi_int


def _lambda_min_lower_bound(q):
    """Certified positive rational lower bound for the smallest eigenvalue.

    Gershgorin when it is already positive, otherwise exact bisection on
    positive-definiteness of Z - lambda I via leading minors.
    """
    n = q.n
    gersh = min(
        q.entries[i][i] - sum(abs(q.entries[i][j]) for j in range(n) if j != i)
        for i in range(n)
    )
    if gersh > 0:
        return Fraction(gersh)
    lam = Fraction(min(q.entries[i][i] for i in range(n)))
    for _ in range(64):
        lam /= 2
        shifted = [
            [Fraction(q.entries[i][j]) - (lam if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        minors_pos = all(
            frac_det([row[:m] for row in shifted[:m]]) > 0 for m in range(1, n + 1)
        )
        if minors_pos:
            return lam
    raise ValueError("failed to certify a positive eigenvalue lower bound")


@dataclass(frozen=True)
class ThetaContext:
    """Evaluation context: form, level, base parameter, truncation policy."""

    q: QForm
    k: int
    t: complex
    branch: int = 0
    truncation_eps: float = 1e-12
    im_w_bound: float = 1.0

    def __post_init__(self):
        t = complex(self.t)
        if not 0 < abs(t) < 1:
            raise ValueError(f"base parameter must satisfy 0 < |t| < 1, got |t|={abs(t)}")
        if self.truncation_eps <= 0:
            raise ValueError("truncation_eps must be positive")
        if self.im_w_bound < 0:
            raise ValueError("im_w_bound must be nonnegative")
        if int(self.k) < 1:
            raise ValueError(f"level k must be >= 1, got {self.k}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "radius", truncation_radius(self))
        object.__setattr__(self, "_terms", {})

    @property
    def n(self):
        return self.q.n

    @property
    def arg_t(self):
        """Argument of t in [0, 2 pi), the branch-0 convention."""
        a = math.atan2(self.t.imag, self.t.real)
        return a if a >= 0 else a + 2 * math.pi

    @property
    def log_t(self):
        """Chosen logarithm of t: Im part is arg(t) + 2 pi branch."""
        return complex(math.log(abs(self.t)), self.arg_t + 2 * math.pi * self.branch)

    def with_branch(self, branch):
        return replace(self, branch=branch)

    def reps(self):
        """Residue representatives in lexicographic order."""
        return list(itertools.product(range(self.k), repeat=self.n))

    def index_of(self, m):
        red = reduce_mod(self.k, m)
        idx = 0
        for c in red:
            idx = idx * self.k + c
        return idx

    def terms_for(self, m):
        """(lattice points, integer exponents) of the residue class of m within the radius."""
        key = reduce_mod(self.k, m)
        cached = self._terms.get(key)
        if cached is not None:
            return cached
        R, k, n = self.radius, self.k, self.n
        ranges = []
        for c in key:
            lo = -((R + c) // k)
            hi = (R - c) // k
            ranges.append(range(lo, hi + 1))
        pts = [
            tuple(c + k * g for c, g in zip(key, gam))
            for gam in itertools.product(*ranges)
        ]
        pts.sort()
        V = np.array(pts, dtype=np.int64)
        phi = np.array([phi_int(self.q, v) for v in pts], dtype=np.int64)
        self._terms[key] = (V, phi)
        return V, phi


def truncation_radius(ctx):
    """Smallest certified cutoff radius for the lattice sums.

    The tail over sup-norm radius r is dominated by
    count(r) * exp(-a r^2 + b n r) with a = (lambda_min/2) log(1/|t|) and
    b = 2 pi im_w_bound, summed with an explicit geometric comparison.
    """
    lam = float(_lambda_min_lower_bound(ctx.q))
    a = 0.5 * lam * (-math.log(abs(ctx.t)))
    b = 2 * math.pi * ctx.im_w_bound
    n = ctx.q.n

    def tail(R):
        total = 0.0
        r = R + 1
        while True:
            count = (2 * r + 1) ** n - (2 * r - 1) ** n
            term = count * math.exp(min(700.0, -a * r * r + b * n * r))
            total += term
            ratio_exp = -a * (2 * r + 1) + b * n
            if ratio_exp < math.log(0.5):
                growth = ((2 * r + 3) / (2 * r + 1)) ** max(n - 1, 0)
                ratio = growth * math.exp(ratio_exp)
                if ratio < 0.5:
                    total += term * ratio / (1 - ratio)
                    return total
            r += 1
            if r > 100000:
                return math.inf

    R = max(ctx.k, int(b * n / (2 * a)) + 1)
    while tail(R) >= ctx.truncation_eps:
        R += 1
        if R > 100000:
            raise ValueError("truncation radius certification failed; |t| too close to 1")
    return R


def _check_band(ctx, w):
    for wi in w:
        if abs(complex(wi).imag) > ctx.im_w_bound + 1e-12:
            raise TruncationBandError(
                f"Im(w) component {complex(wi).imag} exceeds the certified band "
                f"{ctx.im_w_bound}; rebuild the ThetaContext with a larger im_w_bound"
            )

def _term_values(ctx, m, w):
    """Complex summands of the lattice sum at w, in the fixed lexicographic order."""
    V, phi = ctx.terms_for(m)
    w = np.asarray(w, dtype=complex)
    ln_abs = math.log(abs(ctx.t))
    arg = ctx.arg_t
    expo = V @ (2j * math.pi * w) + phi * complex(ln_abs, arg)
    return V, np.exp(expo)

def theta_eval(ctx, m, w):
    """Value of the theta function of the residue class m at w (certified truncation)."""
    _check_band(ctx, w)
    _, vals = _term_values(ctx, m, w)
    return complex(np.sum(vals))

def theta_grad(ctx, m, w):
    """Gradient in w: each term picks up 2 pi i times its lattice point."""
    _check_band(ctx, w)
    V, vals = _term_values(ctx, m, w)
    return 2j * math.pi * (vals @ V.astype(float))

def theta_vector(ctx, w):
    """All theta values at w, indexed lexicographically by residue."""
    return np.array([theta_eval(ctx, m, w) for m in ctx.reps()])


def quasi_periodicity_defect(ctx, m, w, mu, p):
    """Absolute defect of the quasi-periodicity identity.

    Shifting w by a dual-lattice vector mu and the period-lattice vector
    attached to p multiplies the theta value by an m-independent automorphy
    factor; both sides are evaluated and compared.
    """
    n = ctx.n
    w = np.asarray(w, dtype=complex)
    mu = np.asarray(mu, dtype=float)
    log_s = ctx.k * ctx.log_t
    tau_s = log_s / (2j * math.pi)
    zp = np.array([float(x) for x in ctx.q.matvec(p)])
    shifted = w + mu + tau_s * zp
    lhs = theta_eval(ctx, m, shifted)
    zpp = int(ctx.q.apply(p, p))
    factor = cmath.exp(
        ctx.k * 1j * math.pi * (-2 * complex(np.dot(w, np.asarray(p, dtype=float))))
        - ctx.k * log_s * zpp / 2
    )
    rhs = theta_eval(ctx, m, w) * factor
    return abs(lhs - rhs)


def theta_translate_identity_defect(ctx, a, m, w):
    """Defect of the index-translation identity through actual theta values.

    The translated theta equals an explicit automorphy factor times the
    original evaluated at w shifted by the period vector of a.
    """
    w = np.asarray(w, dtype=complex)
    tau_t = ctx.log_t / (2j * math.pi)
    za = np.array([float(x) for x in ctx.q.matvec(a)])
    pa = phi_int(ctx.q, tuple(int(x) for x in a))
    factor = cmath.exp(
        2j * math.pi * complex(np.dot(w, np.asarray(a, dtype=float))) + pa * ctx.log_t
    )
    lhs = factor * theta_eval(ctx, m, w + tau_t * za)
    rhs = theta_eval(ctx, tuple(mi + ai for mi, ai in zip(reduce_mod(ctx.k, m), a)), w)
    return abs(lhs - rhs)

def theta_phase_identity_defect(ctx, b, m, w):
    """Defect of the torus-phase identity: shifting w by b/k multiplies by a root of unity."""
    w = np.asarray(w, dtype=complex)
    lhs = theta_eval(ctx, m, w + np.asarray(b, dtype=float) / ctx.k)
    phase = cmath.exp(
        2j * math.pi * sum(int(bi) * int(mi) for bi, mi in zip(b, reduce_mod(ctx.k, m))) / ctx.k
    )
    rhs = phase * theta_eval(ctx, m, w)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class HeisenbergElement:
    """Element (zeta^e, a, b) of the finite Heisenberg group at level k."""

    k: int
    zeta_exp: int
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "zeta_exp", int(self.zeta_exp) % self.k)
        object.__setattr__(self, "a", reduce_mod(self.k, self.a))
        object.__setattr__(self, "b", reduce_mod(self.k, self.b))

    @property
    def n(self):
        return len(self.a)

    def __mul__(self, other):
        if self.k != other.k:
            raise ValueError("Heisenberg elements at different levels")
        pairing = sum(x * y for x, y in zip(self.b, other.a))
        return HeisenbergElement(
            k=self.k,
            zeta_exp=self.zeta_exp + other.zeta_exp + pairing,
            a=tuple(x + y for x, y in zip(self.a, other.a)),
            b=tuple(x + y for x, y in zip(self.b, other.b)),
        )

    def exponent_data(self):
        """Exact matrix data: target index per column and phase exponent mod k.

        The matrix of the element has a single nonzero per column m, at row
        m + a, with value zeta^(zeta_exp + <b, m>).
        """
        k, n = self.k, self.n
        reps = list(itertools.product(range(k), repeat=n))
        index = {m: i for i, m in enumerate(reps)}
        targets = []
        exps = []
        for m in reps:
            targets.append(index[tuple((x + y) % k for x, y in zip(m, self.a))])
            exps.append((self.zeta_exp + sum(x * y for x, y in zip(self.b, m))) % k)
        return tuple(targets), tuple(exps)

    def matrix(self):
        """Dense unitary matrix in the theta basis."""
        k, n = self.k, self.n
        d = k**n
        targets, exps = self.exponent_data()
        out = np.zeros((d, d), dtype=complex)
        zeta = cmath.exp(2j * math.pi / k)
        for col, (row, e) in enumerate(zip(targets, exps)):
            out[row, col] = zeta**e
        return out


def heisenberg_translate(k, a):
    """Index permutation of the residue classes induced by translation by a."""
    n = len(a)
    elem = HeisenbergElement(k=k, zeta_exp=0, a=tuple(a), b=(0,) * n)
    targets, _ = elem.exponent_data()
    return np.array(targets, dtype=int)

def heisenberg_phase(k, b):
    """Diagonal phase vector exp(2 pi i <b, m> / k) over the residue classes."""
    n = len(b)
    reps = itertools.product(range(k), repeat=n)
    return np.array(
        [cmath.exp(2j * math.pi * sum(x * y for x, y in zip(b, m)) / k) for m in reps]
    )

def heisenberg_matrix(k, a=None, b=None, zeta_exp=0):
    """Dense matrix of the group element acting as translate-then-phase."""
    n = len(a) if a is not None else len(b)
    a = tuple(a) if a is not None else (0,) * n
    b = tuple(b) if b is not None else (0,) * n
    return HeisenbergElement(k=k, zeta_exp=zeta_exp, a=a, b=b).matrix()


@dataclass(frozen=True)
class ExpansionTerm:
    """One monomial of a theta function in a vertex chart (rank 1)."""

    point: int  # lattice point contributing the term
    height: int  # integer exponent of the potential at the point
    z_exps: tuple  # exponents of the two chart coordinates
    t_exp: int  # exponent of the base coordinate


def monomial_expansion(q, k, vertex, m, order, s=None):
    """Chart expansion of a theta function at a vertex of the subdivision.

    Supported for rank 1, where the tangent-cone monoid at any vertex is
    generated by the two edge monomials and the vertical one, so each term
    has a canonical expression z1^i t^c or z2^i t^c with exact integer
    exponents.  Higher rank charts need general Hilbert bases and are out of
    the supported range.
    """
    from .subdivision import build_subdivision

    if q.n != 1:
        raise ValueError("monomial expansion charts are implemented for rank 1 only")
    if s is None:
        s = build_subdivision(q, k)
    v0 = int(vertex[0]) if isinstance(vertex, (tuple, list)) else int(vertex)
    zero_cells = {v for c in s.cells for v in c.vertices}
    if (v0 % k,) not in {tuple(x % k for x in v) for v in zero_cells}:
        raise ValueError(f"vertex {v0} is not a 0-cell of the subdivision")
    slopes = sorted(set(sl[0] for sl in _vertex_slopes(s, v0)))
    if len(slopes) != 2:
        raise ValueError(f"vertex {v0} is not a 0-cell with exactly two incident cells")
    c_left, c_right = slopes
    m0 = int(m[0]) if isinstance(m, (tuple, list)) else int(m)
    phi_v0 = phi_int(q, (v0,))
    terms = []
    span = order + 3
    for j in range(-span, span + 1):
        v = (m0 - v0) % k + v0 + k * j
        x = v - v0
        h = phi_int(q, (v,)) - phi_v0
        slope = c_right if x >= 0 else c_left
        t_exp = h - slope * x
        z_exps = (x, 0) if x >= 0 else (0, -x)
        terms.append(
            ExpansionTerm(point=v, height=phi_int(q, (v,)), z_exps=z_exps, t_exp=int(t_exp))
        )
    terms.sort(key=lambda t: (t.t_exp, -t.z_exps[0], t.z_exps[1]))
    return terms[:order]

def _vertex_slopes(s, v0):
    from .subdivision import touching_slopes

    return touching_slopes(s, (v0,))

def restriction_support(s, m, cell):
    """Whether the theta function of residue m restricts nonzero to the component of the cell.

    The restriction to a top-dimensional toric component keeps exactly the
    terms whose lattice point lies in the cell, and the cell meets the
    lattice only at its vertices.
    """
    k = s.k
    red = reduce_mod(k, m)
    return any(reduce_mod(k, v) == red for v in cell.vertices)
