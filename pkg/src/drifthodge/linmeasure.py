"""Classification of linear drift decompositions and the Gaussian candidate
measure mu = e^{<x,Sx>} dx.

For linear fields the weighted and strictly orthogonal decompositions
coincide, so a single invariance test (Riccati residual plus trace) decides
both.  Uniqueness is only ever certified in the Hurwitz-plus-finite-measure
case; everything else reports ``not_determined``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import MeasureNotFinite, PreconditionError

UNIQUENESS_HURWITZ = "guaranteed_hurwitz"
UNIQUENESS_UNKNOWN = "not_determined"


@dataclass(frozen=True)
class GaussianMeasure:
    """Candidate measure with density e^{<x,Sx>}; finite iff S is negative
    definite, in which case ``log_normalizer`` holds log of
    Z = pi^{d/2} det(-S)^{-1/2}."""

    s: np.ndarray
    finite: bool
    log_normalizer: float | None


@dataclass(frozen=True)
class LinearReport:
    h: np.ndarray
    invariant: bool
    sohhd: bool
    hurwitz: bool
    measure_finite: bool
    uniqueness: str
    g_tilde: np.ndarray
    note: str


def _require_symmetric(s, name="S"):
    s = matcore.as_square(s, name)
    if not matcore.is_symmetric(s):
        raise PreconditionError(f"{name} must be symmetric")
    return 0.5 * (s + s.T)


def _negative_definite(s):
    w = matcore.symmetric_eigenvalues(s)
    return bool(w.max(initial=-np.inf) < -matcore.EPS_PD * matcore.fro(s))


def gaussian_measure(s):
    """Wrap a symmetric S as a GaussianMeasure, computing the normalizer
    in log space when the measure is finite."""
    s = _require_symmetric(s)
    finite = _negative_definite(s)
    log_z = log_normalizer(s) if finite else None
    return GaussianMeasure(s=s, finite=finite, log_normalizer=log_z)


def remainder_matrix(g, a, s):
    """H = G - AS, the non-gradient part of the drift in matrix form."""
    g = matcore.as_square(g, "G")
    a = matcore.as_square(a, "A")
    s = matcore.as_square(s, "S")
    if not (g.shape == a.shape == s.shape):
        raise PreconditionError("G, A, S must share the same square shape")
    return g - a @ s


def log_normalizer(s):
    """log Z with Z = pi^{d/2} det(-S)^{-1/2}; requires S negative definite."""
    s = _require_symmetric(s)
    if not _negative_definite(s):
        raise MeasureNotFinite("measure e^{<x,Sx>}dx is not finite: S is not negative definite")
    w = matcore.symmetric_eigenvalues(s)
    d = s.shape[0]
    return 0.5 * d * np.log(np.pi) - 0.5 * float(np.log(-w).sum())


def gaussian_normalizer(s):
    """Z = pi^{d/2} det(-S)^{-1/2}; raises MeasureNotFinite otherwise."""
    return float(np.exp(log_normalizer(s)))


def stationary_covariance(s):
    """Covariance (-2S)^{-1} of the normalized Gaussian measure."""
    s = _require_symmetric(s)
    if not _negative_definite(s):
        raise MeasureNotFinite("no stationary covariance: S is not negative definite")
    cov = np.linalg.inv(-2.0 * s)
    return 0.5 * (cov + cov.T)


def log_density(s, x):
    """Normalized log density <x,Sx> - log Z of mu/Z at x."""
    s = _require_symmetric(s)
    log_z = log_normalizer(s)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != s.shape[0]:
        raise PreconditionError("point dimension does not match S")
    return float(x @ s @ x) - log_z


def classify_linear(g, a, s, tol=None):
    """Decide invariance/SOHHD of the linear decomposition Sx + (G - AS)x.

    ``invariant`` holds iff the Riccati residual SH + H^T S and trace(H)
    both vanish within ``tol``; for linear fields this is also the SOHHD
    test.  Uniqueness is certified only when the decomposition is invariant,
    G is Hurwitz, and the measure is finite.
    """
    s = _require_symmetric(s)
    a = matcore.require_spd(a, "A")
    g = matcore.as_square(g, "G")
    h = remainder_matrix(g, a, s)
    if tol is None:
        tol = 1e-9 * max(1.0, matcore.fro(g), matcore.fro(a) * matcore.fro(s),
                         matcore.fro(s) * matcore.fro(h))
    eq = matcore.fro(s @ h + h.T @ s)
    tr = abs(float(np.trace(h)))
    invariant = eq <= tol and tr <= tol
    hurwitz = matcore.is_hurwitz(g)
    finite = _negative_definite(s)
    if invariant and hurwitz and finite:
        uniqueness = UNIQUENESS_HURWITZ
        note = "unique invariant measure: drift is Hurwitz and the Gaussian measure is finite"
    else:
        uniqueness = UNIQUENESS_UNKNOWN
        reasons = []
        if not invariant:
            reasons.append("measure is not invariant")
        if not hurwitz:
            reasons.append("drift is not Hurwitz")
        if not finite:
            reasons.append("measure is not finite")
        note = "uniqueness not determined: " + ", ".join(reasons) + \
               " (only the Hurwitz + finite-measure criterion is certified)"
    return LinearReport(
        h=h,
        invariant=invariant,
        sohhd=invariant,
        hurwitz=hurwitz,
        measure_finite=finite,
        uniqueness=uniqueness,
        g_tilde=s + h,
        note=note,
    )
