"""
MNNTS Configuration - Numerical tolerances, algorithm limits, exit statuses
"""

# Parameter sphere: | ||c||^2 - 1/(2pi)^n | must stay below this.
NORM_TOL = 1e-12
# Below this |c[0]| the phase of c is left as is.
PHASE_EPS = 1e-14
# Density values in [-DENSITY_CLIP, 0) are rounding noise and clip to 0.
DENSITY_CLIP = 1e-14
# Log-likelihood floor for (near) zero densities.
LOGLIK_FLOOR = 1e-300

HERMITIAN_TOL = 1e-12

JACOBI = {
    "max_sweeps": 100,
    "off_tol": 1e-13,
    # Above this dimension the LAPACK driver is used instead of Jacobi sweeps.
    "max_dim": 128,
}

MARGINAL = {
    "prob_clip": 1e-12,
    "truncate_eps": 1e-12,
}

CONDITIONING = {
    "min_density": 1e-12,
}

ESTIMATORS = ("md", "ml")

MD = {
    "min_resultant": 1e-14,
}

ML = {
    "max_iter": 1000,
    "tol": 1e-8,
    "armijo": 1e-4,
    "shrink": 0.5,
    "initial_step": 1.0,
    "min_step": 1e-20,
    "max_step": 1e6,
    # Moment matrices up to this size are kept in memory across iterations.
    "cache_bytes": 256 * 1024**2,
}

SAMPLING = {
    "bisection_iters": 60,
    "max_retries": 100,
}

LRT = {
    "md_clip": 1e-6,
}

UNITS = ("degrees", "radians")

# Bytes of complex moment-matrix rows held in memory per evaluation chunk.
CHUNK_BUDGET_BYTES = 64 * 1024**2

MODEL_FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
