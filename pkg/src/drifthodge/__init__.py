"""drifthodge: weighted/orthogonal Helmholtz-Hodge decompositions of
diffusion drifts, algebraic Riccati and Lyapunov solvers, Gaussian
infinitesimally invariant measures, symbolic polynomial drift checks, and
numerical validation by quadrature and simulation."""

__version__ = "0.1.0"

from .errors import (
    ConvergenceFailure,
    DivergedTrajectory,
    DivergentIntegral,
    MeasureNotFinite,
    NoUniqueLyapunovSolution,
    NumericalError,
    NumericsWarning,
    PreconditionError,
    SingularBlock,
)
from .matcore import (
    SchurForm,
    Spectrum,
    eigenvalues,
    expm,
    is_hurwitz,
    kron,
    real_schur,
    reorder_schur,
    spectral_abscissa,
    sqrtm_spd,
    vec,
)
from .riccati import (
    RiccatiSolution,
    SpectrumSplit,
    riccati_residual,
    solve_lyapunov_integral,
    solve_lyapunov_kron,
    solve_riccati,
    solve_riccati_2x2,
    solve_riccati_general,
    spectrum_split,
)
from .linmeasure import (
    GaussianMeasure,
    LinearReport,
    classify_linear,
    gaussian_measure,
    gaussian_normalizer,
    log_density,
    remainder_matrix,
    stationary_covariance,
)
from .polyfield import (
    DecompositionReport,
    LeadingNegativity,
    PolyMatrix,
    Polynomial,
    PolyVectorField,
    build_antisym_drift,
    build_levelset_antisym,
    check_divC_orthogonality,
    classify_poly,
    degree_homogeneous_conditions,
    divergence,
    dot,
    gradient,
    growth_check,
    homogeneous_parts,
    leading_negativity,
    lyapunov_generator_poly,
    mainthm_drift,
    matrix_divergence,
    quadratic_r2_residuals,
    whhd_residual,
)
from .stochverify import (
    InvarianceResult,
    SimConfig,
    SimResult,
    euler_maruyama,
    generator_apply,
    quadrature_invariance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
