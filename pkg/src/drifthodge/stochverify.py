"""Numerical validation of candidate invariant measures.

Applies the diffusion generator to polynomial test functions, checks
infinitesimal invariance by tensor Gauss-Hermite quadrature (exact for
polynomial integrands), and estimates the stationary covariance by
Euler-Maruyama simulation with counter-based, per-path random streams.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DivergedTrajectory, MeasureNotFinite, NumericsWarning, PreconditionError
from .polyfield import Polynomial, PolyVectorField

QUADRATURE_ORDER_CAP = 30
DIVERGENCE_BOUND = 1e8
_STEP_CHUNK = 512


@dataclass(frozen=True)
class SimConfig:
    """Euler-Maruyama discretization parameters.

    The defaults (dt = 1e-3, burn_in = 10^4 steps, 64 paths) are desk-scale
    choices; the scheme itself is first order and the step is entirely
    user-controlled.
    """

    dt: float = 1e-3
    n_steps: int = 20_000
    n_paths: int = 64
    burn_in: int = 10_000
    seed: int = 0
    x0: np.ndarray | None = None


@dataclass(frozen=True)
class InvarianceResult:
    max_abs: float
    per_function: dict
    quadrature_order: int


@dataclass(frozen=True)
class SimResult:
    mean: np.ndarray
    covariance: np.ndarray
    n_effective: int
    diffusion_factor: str = "spd_sqrt"


def generator_apply(a, drift, f):
    """L f = trace(A hess f)/2 + <drift, grad f>, exactly in coefficients."""
    a = matcore.require_spd(a, "A")
    if drift.dim != f.dim or a.shape[0] != f.dim:
        raise PreconditionError("diffusion, drift and test function dimensions disagree")
    out = Polynomial.zero(f.dim)
    for i in range(f.dim):
        for j in range(f.dim):
            if a[i, j] != 0.0:
                out = out + 0.5 * a[i, j] * f.partial(i).partial(j)
    for i, comp in enumerate(drift.components):
        out = out + comp * f.partial(i)
    return out


def _monomials_up_to(dim, max_degree):
    for total in range(max_degree + 1):
        for exps in itertools.product(range(total + 1), repeat=dim):
            if sum(exps) == total:
                yield exps


def _monomial_name(exps):
    if not any(exps):
        return "1"
    return "*".join(
        f"x{i + 1}" + (f"^{k}" if k > 1 else "")
        for i, k in enumerate(exps) if k
    )


def quadrature_invariance(s, a, drift, max_degree):
    """Test  integral of L f dmu / Z = 0  over all monomials f of total
    degree <= max_degree.

    The Gaussian measure is diagonalized by an affine change of variables
    and integrated with a tensor Gauss-Hermite rule of order at least
    (deg(Lf) + max_degree)/2 + 1, which is exact for every integrand here.
    Each reported value is normalized by integral of |L f| dmu / Z + 1.
    """
    s = matcore.as_square(s, "S")
    if not matcore.is_symmetric(s):
        raise PreconditionError("S must be symmetric")
    a = matcore.require_spd(a, "A")
    d = s.shape[0]
    if drift.dim != d or a.shape[0] != d:
        raise PreconditionError("dimension mismatch")
    w = matcore.symmetric_eigenvalues(s)
    if w.max(initial=-np.inf) >= -matcore.EPS_PD * matcore.fro(s):
        raise MeasureNotFinite("quadrature requires a finite measure (S negative definite)")

    basis = list(_monomials_up_to(d, max_degree))
    applied = [generator_apply(a, drift, Polynomial.monomial(d, e)) for e in basis]
    deg_l = max((p.degree for p in applied), default=0)
    order = int(np.ceil(0.5 * (deg_l + max_degree))) + 1
    order = max(order, 2)
    if order > QUADRATURE_ORDER_CAP:
        warnings.warn(
            f"quadrature order {order} capped at {QUADRATURE_ORDER_CAP}; "
            "results may lose exactness for this degree",
            NumericsWarning,
            stacklevel=2,
        )
        order = QUADRATURE_ORDER_CAP

    lam, vecs = np.linalg.eigh(-2.0 * 0.5 * (s + s.T))
    transform = vecs @ np.diag(1.0 / np.sqrt(lam))
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    weights = weights / np.sqrt(2.0 * np.pi)
    grids = np.meshgrid(*([nodes] * d), indexing="ij")
    y = np.column_stack([g.reshape(-1) for g in grids])
    wgrids = np.meshgrid(*([weights] * d), indexing="ij")
    wt = np.prod(np.column_stack([g.reshape(-1) for g in wgrids]), axis=1)
    x = y @ transform.T

    per_function = {}
    for exps, lf in zip(basis, applied):
        vals = lf.eval_batch(x)
        integral = float(wt @ vals)
        abs_integral = float(wt @ np.abs(vals))
        per_function[_monomial_name(exps)] = abs(integral) / (abs_integral + 1.0)
    max_abs = max(per_function.values(), default=0.0)
    return InvarianceResult(max_abs=max_abs, per_function=per_function, quadrature_order=order)


def _linear_part_norm(drift):
    d = drift.dim
    jac = np.zeros((d, d))
    for i, comp in enumerate(drift.components):
        for exps, coeff in comp.terms.items():
            if sum(exps) == 1:
                jac[i, exps.index(1)] = coeff
    return matcore.fro(jac)


def _path_rng(seed, path):
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _simulate_range(a_sqrt, drift, cfg, p_lo, p_hi, collect_states):
    """Advance paths [p_lo, p_hi); per-path accumulators keep the reduction
    independent of how paths are sharded across workers."""
    d = a_sqrt.shape[0]
    n_local = p_hi - p_lo
    x0 = np.zeros(d) if cfg.x0 is None else np.asarray(cfg.x0, dtype=float).reshape(-1)
    x = np.tile(x0, (n_local, 1))
    rngs = [_path_rng(cfg.seed, p) for p in range(p_lo, p_hi)]
    sums = np.zeros((n_local, d))
    outers = np.zeros((n_local, d, d))
    states = [[] for _ in range(n_local)] if collect_states else None
    sq_dt = np.sqrt(cfg.dt)
    step = 0
    while step < cfg.n_steps:
        chunk = min(_STEP_CHUNK, cfg.n_steps - step)
        noise = np.stack([rng.standard_normal((chunk, d)) for rng in rngs])
        for k in range(chunk):
            x = x + drift.eval_batch(x) * cfg.dt + (noise[:, k, :] @ a_sqrt.T) * sq_dt
            step += 1
            if not np.all(np.isfinite(x)) or np.abs(x).max() > DIVERGENCE_BOUND:
                raise DivergedTrajectory(
                    f"trajectory left ||x|| <= {DIVERGENCE_BOUND:g} at step {step}",
                    step=step,
                )
            if step > cfg.burn_in:
                sums += x
                outers += x[:, :, None] * x[:, None, :]
                if collect_states:
                    for i in range(n_local):
                        states[i].append(x[i].copy())
    return sums, outers, states


def euler_maruyama(a, drift, cfg, workers=1, dump_path=None):
    """Pooled stationary moments of dX = drift(X) dt + sqrt(A) dW.

    The diffusion factor is the SPD square root of A (so sigma sigma^T = A).
    Noise streams are keyed by (seed, path index); pooling and the final
    reduction run in fixed path order, so the moments are bit-identical for
    any worker count, and fully reproducible for a fixed seed.
    """
    a = matcore.require_spd(a, "A")
    if not isinstance(drift, PolyVectorField) or drift.dim != a.shape[0]:
        raise PreconditionError("drift must be a polynomial vector field matching A")
    if cfg.dt <= 0 or cfg.n_steps <= 0 or cfg.n_paths <= 0 or cfg.burn_in < 0:
        raise PreconditionError("dt, n_steps, n_paths must be positive and burn_in >= 0")
    if cfg.burn_in >= cfg.n_steps:
        raise PreconditionError("burn_in must be smaller than n_steps")
    lin_norm = _linear_part_norm(drift)
    if cfg.dt * lin_norm > 0.5:
        warnings.warn(
            f"stability hint: dt * ||linear part|| = {cfg.dt * lin_norm:.3g} > 0.5; "
            "the explicit scheme may be unstable",
            NumericsWarning,
            stacklevel=2,
        )
    a_sqrt = matcore.sqrtm_spd(a)
    workers = max(1, int(workers))
    workers = min(workers, cfg.n_paths)
    bounds = np.linspace(0, cfg.n_paths, workers + 1, dtype=int)
    ranges = [(int(bounds[i]), int(bounds[i + 1])) for i in range(workers) if bounds[i] < bounds[i + 1]]
    collect = dump_path is not None

    if len(ranges) == 1:
        results = [_simulate_range(a_sqrt, drift, cfg, *ranges[0], collect)]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            futures = [
                pool.submit(_simulate_range, a_sqrt, drift, cfg, lo, hi, collect)
                for lo, hi in ranges
            ]
            results = [f.result() for f in futures]

    d = a.shape[0]
    path_sums = np.concatenate([r[0] for r in results], axis=0)
    path_outers = np.concatenate([r[1] for r in results], axis=0)
    per_path = cfg.n_steps - cfg.burn_in
    n_eff = per_path * cfg.n_paths
    total_sum = np.add.reduce(path_sums, axis=0)
    total_outer = np.add.reduce(path_outers, axis=0)
    mean = total_sum / n_eff
    cov = total_outer / n_eff - np.outer(mean, mean)
    cov = 0.5 * (cov + cov.T)

    if collect:
        with open(dump_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(f"x{i + 1}" for i in range(d)) + "\n")
            for r in results:
                for path_states in r[2]:
                    for state in path_states:
                        fh.write(",".join(format(v, ".17g") for v in state) + "\n")

    return SimResult(mean=mean, covariance=cov, n_effective=int(n_eff))
