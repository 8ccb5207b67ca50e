"""Solvers for the algebraic Riccati system  S G + G^T S = 2 S A S,
trace(G - A S) = 0.

Four routes are provided: the closed 2x2 formula, the Kronecker
vectorization of the Lyapunov equation, the stationary-covariance
integral, and the general Schur-reduction pipeline that works for every
square G.  Every returned solution carries residuals recomputed from
(S, G, A), never copied from solver internals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import (
    DivergentIntegral,
    NoUniqueLyapunovSolution,
    NumericsWarning,
    PreconditionError,
    SingularBlock,
)

METHOD_CLOSED_2X2 = "closed2x2"
METHOD_KRON = "kron"
METHOD_INTEGRAL = "integral"
METHOD_SCHUR = "schur_general"

INTEGRAL_NODES = 64
INTEGRAL_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class SpectrumSplit:
    """Partition of eigenvalue indices: sigma0 holds the +/- pairs and zeros,
    sigma1 the complement in which no two members sum to zero."""

    sigma0: tuple
    sigma1: tuple


@dataclass(frozen=True)
class RiccatiSolution:
    s: np.ndarray
    method: str
    eq_residual: float
    trace_residual: float
    hurwitz: bool
    s_negative_definite: bool


def riccati_residual(s, g, a):
    """Frobenius norm of SG + G^T S - 2SAS and |trace(G - AS)|."""
    s = matcore.as_square(s, "S")
    g = matcore.as_square(g, "G")
    a = matcore.as_square(a, "A")
    if not (s.shape == g.shape == a.shape):
        raise PreconditionError("S, G, A must share the same square shape")
    eq = matcore.fro(s @ g + g.T @ s - 2.0 * s @ a @ s)
    tr = abs(float(np.trace(g - a @ s)))
    return eq, tr


def _is_negative_definite(s):
    w = matcore.symmetric_eigenvalues(s)
    return bool(w.max(initial=-np.inf) < -matcore.EPS_PD * matcore.fro(s))


def _solution(s, method, g, a):
    s = 0.5 * (s + s.T)
    eq, tr = riccati_residual(s, g, a)
    return RiccatiSolution(
        s=s,
        method=method,
        eq_residual=eq,
        trace_residual=tr,
        hurwitz=matcore.is_hurwitz(g),
        s_negative_definite=_is_negative_definite(s),
    )


def _sigma0_mask(vals, tol):
    """Boolean mask of the +/- pair (and zero) part of a value list.

    Greedy nearest-partner pairing, deterministic for a fixed input order.
    """
    n = len(vals)
    mask = np.zeros(n, dtype=bool)
    for i in range(n):
        if abs(vals[i]) <= tol:
            mask[i] = True
    paired = mask.copy()
    for i in range(n):
        if paired[i]:
            continue
        best, dist = -1, np.inf
        for j in range(i + 1, n):
            if paired[j]:
                continue
            d = abs(vals[i] + vals[j])
            if d < dist:
                best, dist = j, d
        if best >= 0 and dist <= tol:
            mask[i] = mask[best] = True
            paired[i] = paired[best] = True
    # Conjugation closure: degenerate tolerance cases may select one member
    # of a conjugate pair only; pull the partner in until stable.
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if not mask[i] or abs(vals[i].imag) <= tol:
                continue
            best, dist = -1, np.inf
            for j in range(n):
                if j == i:
                    continue
                d = abs(vals[j] - vals[i].conjugate())
                if d < dist:
                    best, dist = j, d
            if best >= 0 and dist <= tol and not mask[best]:
                mask[best] = True
                changed = True
    return mask


def spectrum_split(spectrum, tol=None):
    """Split a conjugation-closed spectrum into the sigma0/sigma1 parts."""
    vals = spectrum.values
    tol = spectrum.pair_tolerance() if tol is None else float(tol)
    mask = _sigma0_mask(vals, tol)
    sigma0 = tuple(int(i) for i in np.flatnonzero(mask))
    sigma1 = tuple(int(i) for i in np.flatnonzero(~mask))
    return SpectrumSplit(sigma0=sigma0, sigma1=sigma1)


def _offending_pair(vals, sigma0, tol):
    idx = list(sigma0)
    for i in idx:
        if abs(vals[i]) <= tol:
            return (vals[i], vals[i])
    for i in idx:
        for j in idx:
            if j > i and abs(vals[i] + vals[j]) <= tol:
                return (vals[i], vals[j])
    return (vals[idx[0]], vals[idx[0]]) if idx else None


def _lyap_kron_solve(g, a):
    """Solve GP + PG^T = -2A through the d^2 x d^2 Kronecker system."""
    d = g.shape[0]
    eye = np.eye(d)
    k = matcore.kron(eye, g) + matcore.kron(g, eye)
    rhs = -matcore.vec(2.0 * a)
    try:
        p = np.linalg.solve(k, rhs)
    except np.linalg.LinAlgError as exc:
        raise NoUniqueLyapunovSolution(f"Kronecker system is singular: {exc}") from exc
    p = matcore.unvec(p, d, d)
    return 0.5 * (p + p.T)


def solve_lyapunov_kron(g, a):
    """Unique solution P of GP + PG^T = -2A via vectorization.

    Requires that no two eigenvalues of G sum to zero; otherwise the
    Lyapunov operator is singular and ``NoUniqueLyapunovSolution`` is
    raised carrying an offending pair.
    """
    g = matcore.as_square(g, "G")
    a = matcore.require_spd(a, "A")
    if g.shape != a.shape:
        raise PreconditionError("G and A must have the same shape")
    spec = matcore.eigenvalues(g)
    tol = spec.pair_tolerance()
    split = spectrum_split(spec, tol)
    if split.sigma0:
        pair = _offending_pair(spec.values, split.sigma0, tol)
        raise NoUniqueLyapunovSolution(
            f"eigenvalue pair {pair[0]:.6g} and {pair[1]:.6g} sums to zero; "
            "the Lyapunov equation has no unique solution",
            pair=pair,
        )
    vals = spec.values
    min_pair_sum = min(
        abs(vals[i] + vals[j]) for i in range(len(vals)) for j in range(i, len(vals))
    )
    if min_pair_sum < 1e-6 * max(1.0, matcore.fro(g)):
        warnings.warn(
            f"Lyapunov system is near-singular (closest eigenvalue pair sum {min_pair_sum:.3g})",
            NumericsWarning,
            stacklevel=2,
        )
    return _lyap_kron_solve(g, a)


def solve_lyapunov_integral(g, a, tol=1e-12):
    """P = integral_0^inf e^{Gt} (2A) e^{G^T t} dt for Hurwitz G.

    A 64-point Gauss-Legendre rule covers [0, T0] with T0 = 1/|abscissa|;
    the tail is folded in through the doubling recurrence
    P(2T) = P(T) + e^{GT} P(T) e^{G^T T}.
    """
    g = matcore.as_square(g, "G")
    a = matcore.require_spd(a, "A")
    if g.shape != a.shape:
        raise PreconditionError("G and A must have the same shape")
    abscissa = matcore.spectral_abscissa(g)
    if abscissa >= 0.0:
        raise DivergentIntegral(
            f"integral representation does not converge: spectral abscissa {abscissa:.6g} >= 0"
        )
    t0 = 1.0 / abs(abscissa)
    xs, ws = np.polynomial.legendre.leggauss(INTEGRAL_NODES)
    ts = 0.5 * t0 * (xs + 1.0)
    wts = 0.5 * t0 * ws
    p = np.zeros_like(a)
    for t, w in zip(ts, wts):
        e = matcore.expm(g * t)
        p += w * (e @ (2.0 * a) @ e.T)
    e = matcore.expm(g * t0)
    for _ in range(INTEGRAL_MAX_DOUBLINGS):
        inc = e @ p @ e.T
        p = p + inc
        if matcore.fro(inc) <= tol * max(matcore.fro(p), 1e-300):
            break
        e = e @ e
    else:
        raise DivergentIntegral("doubling recurrence failed to converge")
    return 0.5 * (p + p.T)


def solve_riccati_2x2(g, a):
    """Closed-form 2x2 solution, dispatched on trace(G) and det(G)."""
    g = matcore.as_square(g, "G")
    a = matcore.require_spd(a, "A")
    if g.shape != (2, 2) or a.shape != (2, 2):
        raise PreconditionError("closed-form solver requires 2x2 matrices")
    ga, gb, gc, gd = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    al, be, gam = a[0, 0], a[0, 1], a[1, 1]
    scale = max(1.0, matcore.fro(g))
    tr = ga + gd
    det = ga * gd - gb * gc
    if abs(tr) <= 1e-13 * scale:
        s = np.zeros((2, 2))
    elif abs(det) <= 1e-13 * scale * scale:
        # Rank-one drift G = u v^T: ansatz S = kappa_v v v^T.
        if abs(gb) > 1e-13 * scale:
            v = np.array([ga, gb])
        elif abs(gc) > 1e-13 * scale:
            v = np.array([gc, gd])
        elif abs(ga) >= abs(gd):
            v = np.array([ga, 0.0])
        else:
            v = np.array([0.0, gd])
        vav = float(v @ a @ v)
        if vav <= matcore.EPS_PD * scale * scale:
            raise PreconditionError("degenerate rank-one ansatz: <v, Av> is not positive")
        s = (tr / vav) * np.outer(v, v)
    else:
        pterm = gam * gb - al * gc + be * (ga - gd)
        kappa = tr / ((al * gam - be * be) * tr * tr + pterm * pterm)
        s11 = kappa * (gam * ga * tr + al * gc * gc - gam * gb * gc - 2.0 * be * ga * gc)
        s12 = kappa * (al * gc * gd + gam * ga * gb - 2.0 * be * ga * gd)
        s22 = kappa * (al * gd * tr + gam * gb * gb - al * gb * gc - 2.0 * be * gb * gd)
        s = np.array([[s11, s12], [s12, s22]])
    return _solution(s, METHOD_CLOSED_2X2, g, a)


def solve_riccati_general(g, a):
    """Schur-reduction solver valid for every square G and SPD A.

    Pipeline: conjugate G by the SPD root of A, reorder the real Schur form
    so the +/- pair part sigma0 leads, solve the sigma1 sub-problem through
    the Kronecker Lyapunov route, and map the block solution back.  The
    sigma0 directions deterministically carry the zero block.
    """
    g = matcore.as_square(g, "G")
    a = matcore.require_spd(a, "A")
    if g.shape != a.shape:
        raise PreconditionError("G and A must have the same shape")
    d = g.shape[0]
    root = matcore.sqrtm_spd(a)
    root_inv = np.linalg.inv(root)
    root_inv = 0.5 * (root_inv + root_inv.T)
    ghat = root_inv @ g @ root

    sf = matcore.real_schur(ghat)
    vals = matcore.schur_eigenvalues(sf)
    tol = matcore.EPS_PAIR_REL * max(1.0, float(np.abs(vals).sum()))
    mask = _sigma0_mask(vals, tol)
    # trsen flags must cover 2x2 blocks as units; pairing already guarantees it.
    sf, k = matcore._reorder_by_flags(sf, mask.astype(np.int32))

    shat = np.zeros((d, d))
    if k < d:
        r22 = sf.r[k:, k:]
        p2 = _lyap_kron_solve(r22, np.eye(d - k))
        try:
            s2 = np.linalg.inv(-p2)
        except np.linalg.LinAlgError as exc:
            raise SingularBlock(f"reduced Lyapunov solution is singular: {exc}") from exc
        if not np.all(np.isfinite(s2)):
            raise SingularBlock("reduced Lyapunov solution is singular")
        shat[k:, k:] = 0.5 * (s2 + s2.T)
    s = root_inv @ (sf.u @ shat @ sf.u.T) @ root_inv
    return _solution(s, METHOD_SCHUR, g, a)


def solve_riccati(g, a, method="auto"):
    """Solve the Riccati system by the requested method.

    ``auto`` picks the closed form for d = 2, the Kronecker route when no
    two eigenvalues of G sum to zero, and the Schur pipeline otherwise.
    The integral route runs only on explicit request (it requires Hurwitz
    G and is the slowest).
    """
    g = matcore.as_square(g, "G")
    a = matcore.require_spd(a, "A")
    if method == "auto":
        if g.shape == (2, 2):
            return solve_riccati_2x2(g, a)
        spec = matcore.eigenvalues(g)
        if spectrum_split(spec).sigma0:
            return solve_riccati_general(g, a)
        method = METHOD_KRON
    if method in ("2x2", METHOD_CLOSED_2X2):
        return solve_riccati_2x2(g, a)
    if method == METHOD_KRON:
        p = solve_lyapunov_kron(g, a)
        return _solution(np.linalg.inv(-p), METHOD_KRON, g, a)
    if method == METHOD_INTEGRAL:
        p = solve_lyapunov_integral(g, a)
        return _solution(np.linalg.inv(-p), METHOD_INTEGRAL, g, a)
    if method in ("schur", METHOD_SCHUR):
        return solve_riccati_general(g, a)
    raise PreconditionError(f"unknown method {method!r}")
