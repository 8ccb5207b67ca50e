"""Sparse multivariate polynomial algebra and the symbolic decomposition
checks for polynomial drifts.

A polynomial is a map from exponent tuples to coefficients; vector fields
are d-tuples of polynomials and antisymmetric matrices of polynomials feed
the divergence-free drift constructions.  Coefficient arithmetic runs in
IEEE doubles with a relative zero threshold, so the identities asserted
here hold to roughly 1e-12 for rational inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import PreconditionError

EPS_COEFF = 1e-12
EPS_SPHERE = 1e-8

GROWTH_CONCLUSIVE = "conclusive_true"
GROWTH_INCONCLUSIVE = "inconclusive"

_SPHERE_SEED = 20260810


def _normalize(terms):
    if not terms:
        return {}
    top = max(abs(c) for c in terms.values())
    if top == 0.0:
        return {}
    cut = EPS_COEFF * top
    return {e: c for e, c in terms.items() if abs(c) > cut}


class Polynomial:
    """Sparse real polynomial on R^d.

    ``terms`` maps exponent tuples (i1, ..., id) to nonzero coefficients,
    e.g. ``{(2, 1): -3.0}`` is -3 x1^2 x2.  Instances are immutable in
    practice: every operation returns a fresh polynomial.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise PreconditionError("polynomial dimension must be positive")
        self.dim = int(dim)
        cleaned = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dim or any(e < 0 for e in exps):
                raise PreconditionError(f"bad exponent tuple {exps} for dimension {self.dim}")
            c = float(coeff)
            if c != 0.0:
                cleaned[exps] = cleaned.get(exps, 0.0) + c
        self.terms = _normalize(cleaned)

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, dim):
        return cls(dim, {})

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim, axis):
        if not 0 <= axis < dim:
            raise PreconditionError(f"axis {axis} out of range for dimension {dim}")
        e = [0] * dim
        e[axis] = 1
        return cls(dim, {tuple(e): 1.0})

    @classmethod
    def monomial(cls, dim, exps, coeff=1.0):
        return cls(dim, {tuple(exps): coeff})

    # -- queries ---------------------------------------------------------
    @property
    def degree(self):
        """Largest total degree; the zero polynomial has degree 0."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def max_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_zero(self, tol=0.0):
        return self.max_coeff() <= tol

    def sorted_terms(self):
        """Terms in graded-lexicographic order (deterministic iteration)."""
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    # -- arithmetic --------------------------------------------------------
    def _check_dim(self, other):
        if self.dim != other.dim:
            raise PreconditionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            c = float(other)
            return Polynomial(self.dim, {e: c * v for e, v in self.terms.items()})
        self._check_dim(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise PreconditionError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.dim, 1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, axis):
        """Partial derivative along ``axis`` (0-based)."""
        if not 0 <= axis < self.dim:
            raise PreconditionError(f"axis {axis} out of range for dimension {self.dim}")
        out = {}
        for e, c in self.terms.items():
            k = e[axis]
            if k == 0:
                continue
            ne = list(e)
            ne[axis] = k - 1
            out[tuple(ne)] = out.get(tuple(ne), 0.0) + c * k
        return Polynomial(self.dim, out)

    def homogeneous_parts(self):
        """Map total degree -> homogeneous part; empty for the zero polynomial."""
        parts = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {k: Polynomial(self.dim, t) for k, t in sorted(parts.items())}

    def homogeneous_part(self, degree):
        return self.homogeneous_parts().get(degree, Polynomial.zero(self.dim))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise PreconditionError("point dimension mismatch")
        total = 0.0
        for e, c in self.terms.items():
            total += c * math.prod(x[i] ** k for i, k in enumerate(e) if k)
        return total

    def eval_batch(self, pts):
        """Evaluate at an (n, d) array of points, returning shape (n,)."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[0])
        for e, c in self.terms.items():
            term = np.full(pts.shape[0], c)
            for i, k in enumerate(e):
                if k:
                    term = term * pts[:, i] ** k
            out += term
        return out

    def __repr__(self):
        return f"Polynomial({self.dim}, {dict(self.sorted_terms())!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e) if k
            )
            if mono:
                pieces.append(f"{c:g}*{mono}")
            else:
                pieces.append(f"{c:g}")
        return " + ".join(pieces).replace("+ -", "- ")


class PolyVectorField:
    """A d-tuple of polynomials on R^d."""

    __slots__ = ("dim", "components")

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise PreconditionError("vector field needs at least one component")
        dim = comps[0].dim
        if any(p.dim != dim for p in comps):
            raise PreconditionError("vector field components disagree on dimension")
        if len(comps) != dim:
            raise PreconditionError(
                f"vector field on R^{dim} needs {dim} components, got {len(comps)}"
            )
        self.dim = dim
        self.components = comps

    @classmethod
    def zero(cls, dim):
        return cls([Polynomial.zero(dim) for _ in range(dim)])

    @classmethod
    def linear(cls, m):
        """The field x -> Mx."""
        m = matcore.as_square(m, "M")
        d = m.shape[0]
        comps = []
        for i in range(d):
            terms = {}
            for j in range(d):
                if m[i, j] != 0.0:
                    e = [0] * d
                    e[j] = 1
                    terms[tuple(e)] = m[i, j]
            comps.append(Polynomial(d, terms))
        return cls(comps)

    @classmethod
    def constant(cls, vec):
        v = np.asarray(vec, dtype=float).reshape(-1)
        d = v.size
        return cls([Polynomial.constant(d, v[i]) for i in range(d)])

    def __add__(self, other):
        if self.dim != other.dim:
            raise PreconditionError("vector field dimension mismatch")
        return PolyVectorField([p + q for p, q in zip(self.components, other.components)])

    def __sub__(self, other):
        if self.dim != other.dim:
            raise PreconditionError("vector field dimension mismatch")
        return PolyVectorField([p - q for p, q in zip(self.components, other.components)])

    def __mul__(self, scalar):
        return PolyVectorField([p * scalar for p in self.components])

    __rmul__ = __mul__

    @property
    def degree(self):
        return max(p.degree for p in self.components)

    def max_coeff(self):
        return max(p.max_coeff() for p in self.components)

    def is_zero(self, tol=0.0):
        return all(p.is_zero(tol) for p in self.components)

    def homogeneous_part(self, degree):
        return PolyVectorField([p.homogeneous_part(degree) for p in self.components])

    def eval_batch(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.column_stack([p.eval_batch(pts) for p in self.components])

    def __call__(self, x):
        return np.array([p(x) for p in self.components])


class PolyMatrix:
    """A d x d grid of polynomials on R^d."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(row) for row in entries)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise PreconditionError("polynomial matrix must be square")
        dim = rows[0][0].dim
        if any(p.dim != dim for r in rows for p in r):
            raise PreconditionError("polynomial matrix entries disagree on dimension")
        if dim != d:
            raise PreconditionError(f"{d}x{d} polynomial matrix must live on R^{d}")
        self.dim = dim
        self.entries = rows

    @classmethod
    def zero(cls, dim):
        z = Polynomial.zero(dim)
        return cls([[z] * dim for _ in range(dim)])

    def max_coeff(self):
        return max(p.max_coeff() for row in self.entries for p in row)

    def is_antisymmetric(self, tol=None):
        """c_ij + c_ji == 0 as polynomials, coefficient-wise."""
        if tol is None:
            tol = EPS_COEFF * max(1.0, self.max_coeff())
        for i in range(self.dim):
            for j in range(i, self.dim):
                if not (self.entries[i][j] + self.entries[j][i]).is_zero(tol):
                    return False
        return True


@dataclass(frozen=True)
class DecompositionReport:
    whhd: bool
    ohhd: bool
    sohhd: bool
    residual: Polynomial
    div_b: Polynomial
    orth: Polynomial
    notes: str


@dataclass(frozen=True)
class LeadingNegativity:
    min_value: float
    holds: bool
    witness: np.ndarray


def _require_antisymmetric(c):
    if not isinstance(c, PolyMatrix):
        raise PreconditionError("expected a polynomial matrix")
    if not c.is_antisymmetric():
        raise PreconditionError("polynomial matrix must be antisymmetric")
    return c


# -- vector calculus -------------------------------------------------------

def gradient(phi):
    return PolyVectorField([phi.partial(i) for i in range(phi.dim)])


def divergence(field):
    out = Polynomial.zero(field.dim)
    for i, p in enumerate(field.components):
        out = out + p.partial(i)
    return out


def dot(u, v):
    if u.dim != v.dim:
        raise PreconditionError("vector field dimension mismatch")
    out = Polynomial.zero(u.dim)
    for p, q in zip(u.components, v.components):
        out = out + p * q
    return out


def matrix_divergence(c):
    """div C with component i = sum_j d_j c_ji (column-wise divergence)."""
    d = c.dim
    comps = []
    for i in range(d):
        p = Polynomial.zero(d)
        for j in range(d):
            p = p + c.entries[j][i].partial(j)
        comps.append(p)
    return PolyVectorField(comps)


def transpose_apply(c, field):
    """C^T applied to a vector field: component i = sum_j c_ji * field_j."""
    if c.dim != field.dim:
        raise PreconditionError("dimension mismatch")
    comps = []
    for i in range(c.dim):
        p = Polynomial.zero(c.dim)
        for j in range(c.dim):
            p = p + c.entries[j][i] * field.components[j]
        comps.append(p)
    return PolyVectorField(comps)


def matrix_apply(m, field):
    """Constant matrix applied to a vector field: component i = sum_j m_ij field_j."""
    m = matcore.as_square(m, "M")
    if m.shape[0] != field.dim:
        raise PreconditionError("dimension mismatch")
    comps = []
    for i in range(field.dim):
        p = Polynomial.zero(field.dim)
        for j in range(field.dim):
            if m[i, j] != 0.0:
                p = p + m[i, j] * field.components[j]
        comps.append(p)
    return PolyVectorField(comps)


def quadratic_form(s):
    """<Sx, x> as a polynomial."""
    s = matcore.as_square(s, "S")
    d = s.shape[0]
    terms = {}
    for i in range(d):
        for j in range(d):
            if s[i, j] != 0.0:
                e = [0] * d
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0.0) + s[i, j]
    return Polynomial(d, terms)


def homogeneous_parts(p):
    """Homogeneous decomposition of a polynomial as a degree-indexed map."""
    return p.homogeneous_parts()


# -- decomposition checks ---------------------------------------------------

def fluctuation_field(phi, drift, a):
    """B = drift - A grad(phi), the candidate divergence-free part."""
    a = matcore.require_spd(a, "A")
    if phi.dim != drift.dim or a.shape[0] != phi.dim:
        raise PreconditionError("potential, drift and diffusion dimensions disagree")
    return drift - matrix_apply(a, gradient(phi))


def whhd_residual(phi, drift, a):
    """r = <grad phi, B> + div(B)/2 with B = drift - A grad(phi).

    The drift admits the weighted decomposition with potential phi exactly
    when r vanishes identically.
    """
    b = fluctuation_field(phi, drift, a)
    return dot(gradient(phi), b) + 0.5 * divergence(b)


def _zero_tol(*scales):
    base = 1.0
    for s in scales:
        base = max(base, float(s))
    return 1e-10 * base * base


def classify_poly(phi, drift, a, tol=None):
    """Full weighted/orthogonal/strict classification of a polynomial drift.

    Returns the residual, Lebesgue divergence and orthogonality witnesses
    together with the implied flags: whhd iff the residual vanishes, ohhd
    additionally needs one of div(B) or <grad phi, B> to vanish (and then
    both do), sohhd needs both.
    """
    grad = gradient(phi)
    b = fluctuation_field(phi, drift, a)
    residual = dot(grad, b) + 0.5 * divergence(b)
    div_b = divergence(b)
    orth = dot(grad, b)
    if tol is None:
        tol = _zero_tol(phi.max_coeff(), drift.max_coeff(), abs(np.asarray(a)).max())
    whhd = residual.is_zero(tol)
    div_zero = div_b.is_zero(tol)
    orth_zero = orth.is_zero(tol)
    ohhd = whhd and (div_zero or orth_zero)
    sohhd = whhd and div_zero and orth_zero
    notes = []
    if not whhd:
        notes.append(f"no WHHD with this potential: residual = {residual}")
    elif sohhd:
        notes.append("SOHHD: residual, div(B) and <grad phi, B> all vanish")
    elif ohhd:
        # A WHHD with one vanishing witness forces the other to vanish too.
        which = "div(B)" if div_zero else "<grad phi, B>"
        notes.append(f"OHHD: WHHD with {which} = 0 forces the remaining witness to vanish")
    else:
        notes.append(
            f"WHHD only: div(B) = {div_b} and <grad phi, B> = {orth} are both nonzero, "
            "so no orthogonal decomposition with this potential exists"
        )
    return DecompositionReport(
        whhd=whhd, ohhd=ohhd, sohhd=sohhd,
        residual=residual, div_b=div_b, orth=orth,
        notes="; ".join(notes),
    )


def quadratic_r2_residuals(s, alpha, beta):
    """Invariance system for a planar quadratic-plus-constant perturbation.

    ``alpha`` and ``beta`` are the coefficient quadruples
    (a00, a20, a21, a22) and (b00, b20, b21, b22) of the two components
    H1 = a00 + a20 x^2 + a21 xy + a22 y^2 (and likewise H2).  Returns the
    six left-hand sides that vanish exactly when e^{<Sz,z>}dz stays
    infinitesimally invariant, plus the divergence pair
    (a20 + b21/2, b22 + a21/2) whose vanishing upgrades the decomposition
    to a strict one.
    """
    s = matcore.as_square(s, "S")
    if s.shape != (2, 2) or not matcore.is_symmetric(s):
        raise PreconditionError("S must be a symmetric 2x2 matrix")
    a00, a20, a21, a22 = (float(v) for v in alpha)
    b00, b20, b21, b22 = (float(v) for v in beta)
    s11, s12, s22 = s[0, 0], s[0, 1], s[1, 1]
    residuals = (
        s11 * a20 + s12 * b20,
        s12 * a22 + s22 * b22,
        s11 * a22 + s12 * a21 + s12 * b22 + s22 * b21,
        s11 * a21 + s12 * a20 + s12 * b21 + s22 * b20,
        s11 * a00 + s12 * b00 + a20 + 0.5 * b21,
        s12 * a00 + s22 * b00 + b22 + 0.5 * a21,
    )
    div_pair = (a20 + 0.5 * b21, b22 + 0.5 * a21)
    return residuals, div_pair


def degree_homogeneous_conditions(phi, b):
    """Per-degree residuals r_s of the invariance identity.

    r_s = sum_k <grad phi_k, B_{s+1-k}> + div(B_{s+1})/2 for
    s = 0 .. m+q-1; their sum equals the full residual
    <grad phi, B> + div(B)/2.
    """
    if phi.dim != b.dim:
        raise PreconditionError("potential and field dimensions disagree")
    m = phi.degree
    q = b.degree
    phi_parts = phi.homogeneous_parts()
    out = []
    for s in range(m + q):
        r = Polynomial.zero(phi.dim)
        for k in range(1, min(m, s + 1) + 1):
            if k in phi_parts:
                r = r + dot(gradient(phi_parts[k]), b.homogeneous_part(s + 1 - k))
        r = r + 0.5 * divergence(b.homogeneous_part(s + 1))
        out.append(r)
    return out


# -- sphere minimization -----------------------------------------------------

def _sphere_samples(dim, n_planar=10_000, n_random=100_000):
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, n_planar, endpoint=False)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if dim == 3:
        # Fibonacci lattice: near-uniform deterministic covering.
        i = np.arange(n_planar, dtype=float)
        z = 1.0 - (2.0 * i + 1.0) / n_planar
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        return np.column_stack([r * np.cos(golden * i), r * np.sin(golden * i), z])
    rng = np.random.default_rng(_SPHERE_SEED)
    pts = rng.standard_normal((n_random, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def _sphere_minimize(poly):
    """Minimize a homogeneous polynomial over the unit sphere.

    Deterministic dense sampling followed by projected-gradient descent
    from the best candidates.
    """
    dim = poly.dim
    pts = _sphere_samples(dim)
    vals = poly.eval_batch(pts)
    order = np.argsort(vals)
    grads = [poly.partial(i) for i in range(dim)]

    best_val = float(vals[order[0]])
    best_pt = pts[order[0]]
    for idx in order[:10]:
        x = pts[idx].copy()
        v = float(vals[idx])
        step = 0.1
        for _ in range(50):
            g = np.array([gp(x) for gp in grads])
            g_tan = g - (g @ x) * x
            norm = np.linalg.norm(g_tan)
            if norm < 1e-15:
                break
            moved = False
            for _ in range(20):
                y = x - step * g_tan / max(norm, 1e-300)
                y /= np.linalg.norm(y)
                vy = poly(y)
                if vy < v:
                    x, v = y, vy
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
            step *= 1.5
        if v < best_val:
            best_val, best_pt = v, x
    return best_val, best_pt


def leading_negativity(phi):
    """Check -phi_m > 0 on the unit sphere for the top homogeneous part.

    Requires a non-constant potential of even top degree.  Returns the
    estimated sphere minimum of -phi_m, whether it clears the strictness
    threshold, and the witness point realizing the minimum.
    """
    m = phi.degree
    if m == 0:
        raise PreconditionError("potential must be non-constant")
    if m % 2 != 0:
        raise PreconditionError(f"potential must have even top degree, got {m}")
    top = phi.homogeneous_part(m)
    min_value, witness = _sphere_minimize(-1.0 * top)
    return LeadingNegativity(min_value=min_value, holds=min_value > EPS_SPHERE, witness=witness)


def lyapunov_generator_poly(phi, drift, a, tol=None):
    """L^{A,P} V for the Lyapunov candidate V = -phi + C0, simplified under
    the invariance identity to
    -trace(A hess(phi))/2 - <A grad phi, grad phi> + div(B)/2.

    The simplification is only valid when the invariance residual vanishes;
    a nonzero residual is a precondition violation and is attached to the
    raised error.
    """
    a = matcore.require_spd(a, "A")
    residual = whhd_residual(phi, drift, a)
    if tol is None:
        tol = _zero_tol(phi.max_coeff(), drift.max_coeff(), abs(np.asarray(a)).max())
    if not residual.is_zero(tol):
        err = PreconditionError(
            f"invariance residual does not vanish (max coefficient {residual.max_coeff():.3g})"
        )
        err.residual = residual
        raise err
    grad = gradient(phi)
    b = fluctuation_field(phi, drift, a)
    trace_term = Polynomial.zero(phi.dim)
    for i in range(phi.dim):
        for j in range(phi.dim):
            if a[i, j] != 0.0:
                trace_term = trace_term + a[i, j] * phi.partial(i).partial(j)
    return (-0.5) * trace_term - dot(matrix_apply(a, grad), grad) + 0.5 * divergence(b)


def growth_check(drift, t_mat):
    """Conservativeness test: is <drift(x), Tx> bounded by M ||x||^2?

    Certifies only the two decidable sufficient cases: deg <= 2, or a
    strictly negative sphere-maximum of the leading part.  Never claims
    failure.
    """
    t_mat = matcore.require_spd(t_mat, "T")
    q = dot(drift, PolyVectorField.linear(t_mat))
    if q.degree <= 2:
        return GROWTH_CONCLUSIVE
    if q.degree % 2 != 0:
        # Odd leading parts change sign under x -> -x, so their sphere
        # maximum is never strictly negative.
        return GROWTH_INCONCLUSIVE
    top = q.homogeneous_part(q.degree)
    # max(q_top) on the sphere equals -min(-q_top); require it < 0 strictly.
    min_of_neg, _ = _sphere_minimize(-1.0 * top)
    if min_of_neg > EPS_SPHERE:
        return GROWTH_CONCLUSIVE
    return GROWTH_INCONCLUSIVE


# -- antisymmetric-matrix drift constructions --------------------------------

def build_antisym_drift(phi, c, k1, k2):
    """grad(phi) + k1 C^T grad(phi) + k2 div C for antisymmetric C."""
    c = _require_antisymmetric(c)
    if c.dim != phi.dim:
        raise PreconditionError("dimension mismatch")
    grad = gradient(phi)
    return grad + float(k1) * transpose_apply(c, grad) + float(k2) * matrix_divergence(c)


def build_levelset_antisym(s, phi_scalar, k):
    """C(x) = phi(<Sx, x>) K for a univariate phi and constant antisymmetric K.

    The resulting matrix satisfies <div C(x), Sx> = 0 by construction.
    """
    s = matcore.as_square(s, "S")
    if not matcore.is_symmetric(s):
        raise PreconditionError("S must be symmetric")
    k = matcore.as_square(k, "K")
    if k.shape[0] != s.shape[0]:
        raise PreconditionError("S and K dimensions disagree")
    if matcore.fro(k + k.T) > matcore.EPS_SYM * max(1.0, matcore.fro(k)):
        raise PreconditionError("K must be antisymmetric")
    if phi_scalar.dim != 1:
        raise PreconditionError("phi must be a univariate polynomial")
    d = s.shape[0]
    u = quadratic_form(s)
    composed = Polynomial.zero(d)
    for (j,), cj in phi_scalar.terms.items():
        composed = composed + cj * u ** j
    entries = [[composed * k[i, jj] for jj in range(d)] for i in range(d)]
    return PolyMatrix(entries)


def check_divC_orthogonality(c, s, tol=None):
    """Symbolic test of <div C(x), Sx> == 0."""
    c = _require_antisymmetric(c)
    s = matcore.as_square(s, "S")
    if s.shape[0] != c.dim:
        raise PreconditionError("dimension mismatch")
    p = dot(matrix_divergence(c), PolyVectorField.linear(s))
    if tol is None:
        tol = _zero_tol(c.max_coeff(), np.abs(s).max())
    return p.is_zero(tol)


def mainthm_drift(g, a, s, c, k0, k1, k2, tol=None):
    """The orthogonally-decomposable field
    grad(phi) + k0 (G - S)x + k1 C(x)^T S x + k2 div C(x)
    with phi = <x, Sx>/2.

    S must solve the Riccati system for G with identity diffusion (the
    normal form the construction lives in; conjugate by sqrt(A) first for
    general diffusions).  ``a`` is validated SPD for interface parity with
    the classification entry points.
    """
    g = matcore.as_square(g, "G")
    matcore.require_spd(a, "A")
    s = matcore.as_square(s, "S")
    if not matcore.is_symmetric(s):
        raise PreconditionError("S must be symmetric")
    c = _require_antisymmetric(c)
    if not (g.shape[0] == s.shape[0] == c.dim):
        raise PreconditionError("dimension mismatch")
    eq = matcore.fro(s @ g + g.T @ s - 2.0 * s @ s)
    tr = abs(float(np.trace(g - s)))
    if tol is None:
        tol = 1e-8 * max(1.0, matcore.fro(g), matcore.fro(s) ** 2)
    if eq > tol or tr > tol:
        raise PreconditionError(
            f"S does not solve the identity-diffusion Riccati system "
            f"(residuals {eq:.3g}, {tr:.3g})"
        )
    grad = PolyVectorField.linear(s)
    return (
        grad
        + float(k0) * PolyVectorField.linear(g - s)
        + float(k1) * transpose_apply(c, grad)
        + float(k2) * matrix_divergence(c)
    )
