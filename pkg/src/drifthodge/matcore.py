"""Dense real matrix kernel.

Kronecker products, vectorization, eigenvalues with deterministic ordering,
real Schur form with block reordering, matrix exponential, and the SPD
square root.  Everything operates on plain ``numpy.float64`` arrays; the
eigenvalue, Schur and exponential kernels are LAPACK-backed through
numpy/scipy.  All functions are pure and values are safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, PreconditionError

# Tolerances (double-precision headroom at desk dimensions, d <= 64).
EPS_SYM = 1e-10
EPS_ORTH = 1e-10
EPS_SCHUR = 1e-9
EPS_PAIR_REL = 1e-8
EPS_PD = 1e-12

DIM_CAP = 64


def as_matrix(m, name="matrix"):
    """Coerce to a 2-D float64 array, rejecting anything else."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise PreconditionError(f"{name} must be two-dimensional, got shape {a.shape}")
    if max(a.shape) > DIM_CAP:
        raise PreconditionError(f"{name} exceeds the dimension cap of {DIM_CAP}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError(f"{name} contains non-finite entries")
    return a


def as_square(m, name="matrix"):
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise PreconditionError(f"{name} must be square, got shape {a.shape}")
    return a


def fro(m):
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(m, dtype=float)))


def is_symmetric(m, eps=EPS_SYM):
    a = as_square(m)
    return float(np.abs(a - a.T).max(initial=0.0)) <= eps * max(1.0, fro(a))


def symmetric_eigenvalues(m):
    """Eigenvalues of a (numerically) symmetric matrix, ascending."""
    a = as_square(m)
    return np.linalg.eigvalsh(0.5 * (a + a.T))


def is_spd(m, eps=EPS_PD):
    """Symmetric positive definite test: all eigenvalues > eps * ||M||_F."""
    a = as_square(m)
    if not is_symmetric(a):
        return False
    return bool(symmetric_eigenvalues(a).min() > eps * fro(a))


def require_spd(m, name="matrix"):
    a = as_square(m, name)
    if not is_spd(a):
        raise PreconditionError(f"{name} must be symmetric positive definite")
    return a


def kron(a, b):
    """Kronecker product: block (i, j) of the result is a_ij * B."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def vec(x):
    """Column-stacking vectorization: columns of X stacked top to bottom."""
    return as_matrix(x, "x").reshape(-1, order="F").copy()


def unvec(v, rows, cols):
    """Inverse of :func:`vec`."""
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size != rows * cols:
        raise PreconditionError(f"vector of length {a.size} cannot fill a {rows}x{cols} matrix")
    return a.reshape(rows, cols, order="F").copy()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicity, sorted by (Re, Im) for determinism."""

    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def pair_tolerance(self):
        """Tolerance under which two floating eigenvalues count as a +/- pair."""
        return EPS_PAIR_REL * max(1.0, float(np.abs(self.values).sum()))

    def is_conjugation_closed(self, tol=None):
        vals = self.values
        tol = self.pair_tolerance() if tol is None else tol
        taken = np.zeros(len(vals), dtype=bool)
        for i, lam in enumerate(vals):
            if taken[i]:
                continue
            if abs(lam.imag) <= tol:
                taken[i] = True
                continue
            best, dist = -1, np.inf
            for j in range(len(vals)):
                if j == i or taken[j]:
                    continue
                d = abs(vals[j] - lam.conjugate())
                if d < dist:
                    best, dist = j, d
            if best < 0 or dist > tol:
                return False
            taken[i] = taken[best] = True
        return True


def _sorted_spectrum(vals):
    vals = np.asarray(vals, dtype=complex)
    order = np.lexsort((vals.imag, vals.real))
    return Spectrum(values=vals[order])


def eigenvalues(g):
    """Spectrum of a square matrix, deterministic (Re, Im)-lexicographic order."""
    a = as_square(g, "G")
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # iteration cap exceeded in LAPACK
        raise ConvergenceFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    return _sorted_spectrum(vals)


def spectral_abscissa(g):
    """Maximum real part over the spectrum of G."""
    return float(eigenvalues(g).values.real.max())


def is_hurwitz(g):
    return spectral_abscissa(g) < 0.0


@dataclass(frozen=True)
class SchurForm:
    """Real Schur factorization G = U R U^T.

    ``r`` is quasi-upper-triangular with 1x1 blocks (real eigenvalues) and
    2x2 blocks (complex conjugate pairs) on the diagonal; ``block_sizes``
    lists them top-left to bottom-right.
    """

    u: np.ndarray
    r: np.ndarray
    block_sizes: tuple

    @property
    def dim(self):
        return self.r.shape[0]


def _detect_blocks(r):
    d = r.shape[0]
    sizes = []
    i = 0
    while i < d:
        if i + 1 < d and r[i + 1, i] != 0.0:
            sizes.append(2)
            i += 2
        else:
            sizes.append(1)
            i += 1
    return tuple(sizes)


def real_schur(g):
    """Real Schur form via LAPACK (orthogonal U, quasi-triangular R)."""
    a = as_square(g, "G")
    try:
        r, u = scipy.linalg.schur(a, output="real")
    except Exception as exc:
        raise ConvergenceFailure(f"Schur iteration did not converge: {exc}") from exc
    return SchurForm(u=u, r=r, block_sizes=_detect_blocks(r))


def schur_eigenvalues(sf):
    """Eigenvalues read off the diagonal blocks, in block order."""
    vals = []
    i = 0
    r = sf.r
    for size in sf.block_sizes:
        if size == 1:
            vals.append(complex(r[i, i]))
        else:
            a, b = r[i, i], r[i, i + 1]
            c, d = r[i + 1, i], r[i + 1, i + 1]
            re = 0.5 * (a + d)
            disc = 0.25 * (a - d) ** 2 + b * c
            im = np.sqrt(max(-disc, 0.0))
            vals.extend([complex(re, im), complex(re, -im)])
        i += size
    return np.asarray(vals, dtype=complex)


def _reorder_by_flags(sf, flags):
    """Move flagged eigenvalue positions to the leading block via LAPACK trsen."""
    select = np.asarray(flags, dtype=np.int32)
    if select.shape != (sf.dim,):
        raise PreconditionError("selection flags must have one entry per eigenvalue")
    if not select.any():
        return sf, 0
    t = np.array(sf.r, order="F", copy=True)
    q = np.array(sf.u, order="F", copy=True)
    ts, qs, wr, wi, m, s, sep, info = scipy.linalg.lapack.dtrsen(select, t, q, job="N", wantq=1)
    if info < 0:
        raise PreconditionError(f"trsen rejected argument {-info}")
    if info > 0:
        raise ConvergenceFailure("Schur block swap is too ill-conditioned to perform")
    new = SchurForm(u=np.ascontiguousarray(qs), r=np.triu(ts, -1), block_sizes=_detect_blocks(ts))
    return new, int(m)


def reorder_schur(sf, select):
    """Reorder a real Schur form so the eigenvalues satisfying ``select`` lead.

    ``select`` is a predicate on complex eigenvalues and must treat each
    2x2 block as a unit (it sees both members of a conjugate pair).
    Returns ``(reordered_form, k)`` where ``k`` is the dimension of the
    leading invariant block.
    """
    vals = schur_eigenvalues(sf)
    flags = np.zeros(sf.dim, dtype=np.int32)
    i = 0
    for size in sf.block_sizes:
        picks = [bool(select(vals[i + j])) for j in range(size)]
        if size == 2 and picks[0] != picks[1]:
            raise PreconditionError("selector splits a complex conjugate pair")
        flags[i:i + size] = 1 if picks[0] else 0
        i += size
    return _reorder_by_flags(sf, flags)


def expm(m):
    """Matrix exponential (scaling-and-squaring, Pade core)."""
    a = as_square(m, "M")
    out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise ConvergenceFailure("matrix exponential overflowed")
    return out


def sqrtm_spd(a):
    """Symmetric positive definite square root of an SPD matrix."""
    m = as_square(a, "A")
    if not is_symmetric(m):
        raise PreconditionError("matrix square root requires a symmetric input")
    sym = 0.5 * (m + m.T)
    w, v = np.linalg.eigh(sym)
    if w.min() <= EPS_PD * fro(sym):
        raise PreconditionError("matrix square root requires a positive definite input")
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)
