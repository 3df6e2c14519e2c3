"""
Parameter estimation: the mean-resultant (MD) estimator and maximum
likelihood by projected gradient ascent on the parameter sphere.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .config import LOGLIK_FLOOR, MD, ML
from .config_default import load_settings
from .core import DimVector, MnntsParams, sphere_norm2
from .density import as_angle_rows, log_likelihood, moment_matrix
from .errors import ArgumentError, DataError, DegenerateDataError, NumericError
from .parallel import chunked_sum, default_workers, ordered_map, row_chunks

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitReport:
    params: MnntsParams
    method: str
    loglik: float
    iterations: int
    converged: bool
    n_obs: int
    grad_norm: Optional[float] = None
    underflows: int = 0
    trace: Tuple[float, ...] = field(default_factory=tuple)

    def summary(self) -> str:
        text = (
            f"method={self.method} loglik={self.loglik:.6f} n_obs={self.n_obs} "
            f"iterations={self.iterations} converged={self.converged}"
        )
        if self.grad_norm is not None:
            text += f" grad_norm={self.grad_norm:.3e}"
        return text


def _dims(dims) -> DimVector:
    return dims if isinstance(dims, DimVector) else DimVector(tuple(dims))


def _rows(data, dims: DimVector) -> np.ndarray:
    rows = as_angle_rows(data, dims.n_vars)
    if rows.shape[0] < 1:
        raise DataError("estimation needs at least one observation")
    return rows


def mean_resultant(data, dims) -> np.ndarray:
    """(1/n) sum_k e_1(theta_k1) x ... x e_n(theta_kn), unnormalized."""
    dims = _dims(dims)
    rows = _rows(data, dims)

    def resultant(chunk: slice) -> np.ndarray:
        return moment_matrix(rows[chunk], dims).sum(axis=0)

    return chunked_sum(resultant, rows.shape[0], 16 * dims.total_length) / rows.shape[0]


def fit_md(data, dims) -> FitReport:
    """Normalized mean resultant of the observed trigonometric moment vectors."""
    dims = _dims(dims)
    rows = _rows(data, dims)
    resultant = mean_resultant(rows, dims)

    norm = float(np.linalg.norm(resultant))
    if norm < MD["min_resultant"]:
        raise DegenerateDataError(
            f"mean resultant norm {norm:.3e} is zero; the MD estimate is undefined"
        )

    params = MnntsParams.from_vector(dims, resultant)
    ll = log_likelihood(params, rows)
    logger.debug("MD fit on %d rows, dims %s: loglik %.6f", rows.shape[0], dims, ll.value)
    return FitReport(
        params=params,
        method="md",
        loglik=ll.value,
        iterations=1,
        converged=True,
        n_obs=rows.shape[0],
        underflows=ll.underflows,
    )


class _Design:
    """Moment matrices of a dataset, cached when they fit the memory budget."""

    def __init__(self, rows: np.ndarray, dims: DimVector):
        self.rows = rows
        self.dims = dims
        self.n_obs = rows.shape[0]
        self.workers = default_workers()
        row_bytes = 16 * dims.total_length
        self.chunks = row_chunks(self.n_obs, row_bytes, self.workers)
        self._cache: Optional[List[np.ndarray]] = None
        if self.n_obs * row_bytes <= ML["cache_bytes"]:
            self._cache = [moment_matrix(rows[ch], dims) for ch in self.chunks]

    def _matrix(self, i: int) -> np.ndarray:
        if self._cache is not None:
            return self._cache[i]
        return moment_matrix(self.rows[self.chunks[i]], self.dims)

    def evaluate(self, c: np.ndarray, gradient: bool = True):
        """Sum of floored log densities and its Euclidean gradient."""

        def part(i: int):
            e = self._matrix(i)
            inner = np.conj(e) @ c
            f = np.abs(inner) ** 2
            low = f <= LOGLIK_FLOOR
            value = float(np.sum(np.log(np.where(low, LOGLIK_FLOOR, f))))
            if not gradient:
                return value, None
            weights = np.where(low, 0.0, inner / np.where(low, 1.0, f))
            return value, 2.0 * (e.T @ weights)

        parts = ordered_map(part, list(range(len(self.chunks))), self.workers)
        value = 0.0
        grad = np.zeros_like(c) if gradient else None
        for v, g in parts:
            value += v
            if gradient:
                grad = grad + g
        return value, grad


def loglik_and_gradient(c, data, dims) -> Tuple[float, np.ndarray]:
    """
    Sum of log |c^H e_k|^2 over the data and its gradient for an arbitrary
    (not necessarily normalized) c.

    The gradient is returned as the complex vector dL/dRe(c) + i dL/dIm(c),
    which equals 2 sum_k e_k (e_k^H c) / |c^H e_k|^2.
    """
    dims = _dims(dims)
    rows = _rows(data, dims)
    c = np.asarray(c, dtype=np.complex128).reshape(-1)
    if c.size != dims.total_length:
        raise ArgumentError(f"c has {c.size} entries, dims {dims} need {dims.total_length}")
    return _Design(rows, dims).evaluate(c)


def loglik_gradient(c, data, dims) -> np.ndarray:
    """Euclidean gradient of the log-likelihood, see loglik_and_gradient."""
    return loglik_and_gradient(c, data, dims)[1]


def _retract(x: np.ndarray, radius: float) -> np.ndarray:
    return x * (radius / np.linalg.norm(x))


def fit_ml(
    data,
    dims,
    init: Optional[MnntsParams] = None,
    max_iter: Optional[int] = None,
    tol: Optional[float] = None,
) -> FitReport:
    """
    Maximum likelihood by projected gradient ascent on ||c||^2 = 1/(2pi)^n.

    Each iteration projects the gradient of the mean log-likelihood onto the
    tangent space, steps along it, renormalizes, and backtracks (Armijo)
    until the log-likelihood increases. Stops when the Riemannian gradient
    norm drops below tol or after max_iter iterations. The MD estimate is
    the default starting point.
    """
    dims = _dims(dims)
    rows = _rows(data, dims)
    settings = load_settings()
    max_iter = settings.ml_max_iter if max_iter is None else int(max_iter)
    tol = settings.ml_tol if tol is None else float(tol)
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    if max_iter < 0:
        raise ArgumentError("max_iter must be nonnegative")

    if init is None:
        try:
            init = fit_md(rows, dims).params
        except DegenerateDataError:
            logger.warning("MD initializer undefined, starting from the uniform model")
            init = MnntsParams.uniform(dims)
    elif init.dims != dims:
        raise ArgumentError(f"init has dims {init.dims}, expected {dims}")

    design = _Design(rows, dims)
    n_obs = design.n_obs
    radius2 = sphere_norm2(dims.n_vars)
    radius = math.sqrt(radius2)

    c = np.array(init.c, dtype=np.complex128)
    total, grad = design.evaluate(c)
    value, grad = total / n_obs, grad / n_obs
    trace = [total]
    step = ML["initial_step"]
    converged = False
    grad_norm = float("nan")
    iterations = 0

    for iteration in range(1, max_iter + 2):
        rgrad = grad - (np.vdot(c, grad).real / radius2) * c
        grad_norm = float(np.linalg.norm(rgrad))
        if not np.all(np.isfinite(rgrad)):
            raise NumericError(f"non-finite gradient at iteration {iteration - 1}")
        if grad_norm < tol:
            converged = True
            break
        if iteration > max_iter:
            break

        threshold = ML["armijo"] * grad_norm**2
        t = step
        accepted = None
        while t >= ML["min_step"]:
            candidate = _retract(c + t * rgrad, radius)
            cand_total, _ = design.evaluate(candidate, gradient=False)
            if cand_total / n_obs >= value + t * threshold:
                accepted = candidate
                break
            t *= ML["shrink"]

        if accepted is None:
            logger.debug("line search stalled at iteration %d (grad %.3e)", iteration, grad_norm)
            break

        iterations = iteration
        c = accepted
        total, grad = design.evaluate(c)
        value, grad = total / n_obs, grad / n_obs
        trace.append(total)
        step = min(2.0 * t, ML["max_step"])
        logger.debug("ML iteration %d: loglik %.10f step %.3e", iteration, total, t)

    params = MnntsParams.from_vector(dims, c)
    ll = log_likelihood(params, rows)
    if not converged:
        logger.info("ML stopped after %d iterations with gradient norm %.3e", iterations, grad_norm)
    return FitReport(
        params=params,
        method="ml",
        loglik=ll.value,
        iterations=iterations,
        converged=converged,
        n_obs=n_obs,
        grad_norm=grad_norm,
        underflows=ll.underflows,
        trace=tuple(trace),
    )


def fit(data, dims, method: str = "md", **kwargs) -> FitReport:
    """Dispatch to fit_md or fit_ml."""
    method = method.lower()
    if method == "md":
        return fit_md(data, dims)
    if method == "ml":
        return fit_ml(data, dims, **kwargs)
    raise ArgumentError(f"unknown estimator {method!r}, expected md or ml")
