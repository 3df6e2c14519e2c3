"""
MNNTS density evaluation: trigonometric moments, the Kronecker form
||c^H (e_1 x ... x e_n)||^2, its explicit sum form, log-likelihood and the
univariate CDF.

Moment vectors use the e^{+ik theta} convention: e = (1, e^{i theta}, ...,
e^{iM theta}) and f(theta) = |c^H e|^2 = sum_{k,m} conj(c_k) c_m
e^{i(k-m) theta}.
"""

import logging
from typing import NamedTuple, Union

import numpy as np

from .config import DENSITY_CLIP, LOGLIK_FLOOR
from .core import DimVector, MnntsParams, TWO_PI, wrap_angles
from .errors import ArgumentError
from .parallel import chunked_concat

logger = logging.getLogger(__name__)


class LogLikelihood(NamedTuple):
    value: float
    underflows: int


def as_angle_point(x, n_vars: int) -> np.ndarray:
    """Validate one point on the n-torus and reduce it to [0, 2pi)^n."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != n_vars:
        raise ArgumentError(f"point has {x.size} components, model has {n_vars} variables")
    if not np.all(np.isfinite(x)):
        raise ArgumentError("point contains non-finite angles")
    return wrap_angles(x)


def as_angle_rows(thetas, n_vars: int) -> np.ndarray:
    """Validate an (n_obs, n_vars) matrix of angles and reduce it to [0, 2pi)."""
    rows = getattr(thetas, "rows", thetas)
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1 and n_vars == 1:
        rows = rows.reshape(-1, 1)
    if rows.ndim != 2 or rows.shape[1] != n_vars:
        raise ArgumentError(
            f"expected angles of shape (n, {n_vars}), got {rows.shape}"
        )
    if not np.all(np.isfinite(rows)):
        raise ArgumentError("angles contain non-finite values")
    return wrap_angles(rows)


def trig_moments(theta: Union[float, np.ndarray], M: int) -> np.ndarray:
    """
    (1, e^{i theta}, ..., e^{iM theta}) by repeated multiplication.

    A scalar theta gives shape (M+1,); an array of shape S gives S + (M+1,).
    """
    if M < 0:
        raise ArgumentError(f"M must be nonnegative, got {M}")
    theta = np.asarray(theta, dtype=np.float64)
    z = np.exp(1j * theta)[..., None]
    powers = np.broadcast_to(z, theta.shape + (M + 1,)).copy()
    powers[..., 0] = 1.0
    return np.cumprod(powers, axis=-1)


def moment_vector(x, dims: DimVector) -> np.ndarray:
    """Kronecker product e_1 x ... x e_n at one point."""
    x = as_angle_point(x, dims.n_vars)
    out = np.ones(1, dtype=np.complex128)
    for theta, m in zip(x, dims.dims):
        out = np.kron(out, trig_moments(theta, m))
    return out


def moment_matrix(thetas, dims: DimVector) -> np.ndarray:
    """Rows are the Kronecker moment vectors of the rows of thetas, shape (N, P)."""
    rows = as_angle_rows(thetas, dims.n_vars)
    out = np.ones((rows.shape[0], 1), dtype=np.complex128)
    for s, m in enumerate(dims.dims):
        e_s = trig_moments(rows[:, s], m)
        out = (out[:, :, None] * e_s[:, None, :]).reshape(rows.shape[0], -1)
    return out


def _clip(values):
    values = np.where((values < 0.0) & (values >= -DENSITY_CLIP), 0.0, values)
    return values


def density(p: MnntsParams, x) -> float:
    """
    f(x) = |c^H (e_1 x ... x e_n)|^2 without materializing e e^H.

    The contraction runs variable by variable over the tensor view of c,
    innermost variable first, so the cost stays O(prod(M_s + 1)).
    """
    x = as_angle_point(x, p.n_vars)
    t = np.conj(p.tensor())
    for s in range(p.n_vars - 1, -1, -1):
        t = t @ trig_moments(x[s], p.dims.dims[s])
    value = float(abs(complex(t)) ** 2)
    return float(_clip(value))


def density_batch(p: MnntsParams, thetas) -> np.ndarray:
    """Density at every row of an (N, n) angle matrix."""
    rows = as_angle_rows(thetas, p.n_vars)
    if rows.shape[0] == 0:
        return np.zeros(0)
    conj_c = np.conj(p.c)

    def evaluate(chunk: slice) -> np.ndarray:
        inner = moment_matrix(rows[chunk], p.dims) @ conj_c
        return np.abs(inner) ** 2

    return chunked_concat(evaluate, rows.shape[0], 16 * p.c.size)


def sum_form_density(p: MnntsParams, x) -> float:
    """
    Explicit double sum over multi-indices k, m of
    conj(c_k) c_m exp(i sum_s (k_s - m_s) theta_s); O(prod(M_s + 1)^2).
    """
    x = as_angle_point(x, p.n_vars)
    index = np.indices(p.dims.shape).reshape(p.n_vars, -1).T
    phase = index @ x
    diff = phase[:, None] - phase[None, :]
    terms = np.conj(p.c)[:, None] * p.c[None, :] * np.exp(1j * diff)
    return float(_clip(float(np.sum(terms).real)))


def log_likelihood(p: MnntsParams, data) -> LogLikelihood:
    """
    Sum of log densities over the rows of data.

    Rows with density <= LOGLIK_FLOOR contribute log(LOGLIK_FLOOR) and are
    counted in `underflows`.
    """
    rows = as_angle_rows(data, p.n_vars)
    if rows.shape[0] < 1:
        raise ArgumentError("log-likelihood needs at least one observation")

    values = density_batch(p, rows)
    low = values <= LOGLIK_FLOOR
    underflows = int(np.count_nonzero(low))
    if underflows:
        logger.warning("%d observations with density <= %g floored", underflows, LOGLIK_FLOOR)
    return LogLikelihood(float(np.sum(np.log(np.where(low, LOGLIK_FLOOR, values)))), underflows)


def lag_sums(gram: np.ndarray) -> np.ndarray:
    """s_d = sum_k G[k, k+d] for d = 0..K-1 over the last two axes."""
    k = gram.shape[-1]
    return np.stack(
        [np.trace(gram, offset=d, axis1=-2, axis2=-1) for d in range(k)], axis=-1
    )


def cdf_from_lags(lags: np.ndarray, theta) -> np.ndarray:
    """
    Integral over [0, theta] of sum_{k,m} G_km e^{i(m-k)t}, from the lag sums.

    F(theta) = s_0 theta + 2 Re sum_{d>=1} s_d (e^{id theta} - 1) / (i d).
    lags has shape (..., K); theta broadcasts against lags[..., 0].
    """
    theta = np.asarray(theta, dtype=np.float64)
    out = lags[..., 0].real * theta
    for d in range(1, lags.shape[-1]):
        term = lags[..., d] * (np.exp(1j * d * theta) - 1.0) / (1j * d)
        out = out + 2.0 * term.real
    return np.clip(out, 0.0, 1.0)


def cdf_gram(gram, theta) -> np.ndarray:
    """
    CDF of the univariate density e^H G e for a Hermitian PSD G with
    trace(G) = 1/(2pi); G may carry leading batch axes.
    """
    gram = np.asarray(gram, dtype=np.complex128)
    return cdf_from_lags(lag_sums(gram), theta)


def _check_cdf_args(p: MnntsParams, theta) -> np.ndarray:
    if p.n_vars != 1:
        raise ArgumentError(f"univariate CDF needs a 1-variable model, got {p.n_vars}")
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta < -1e-12) or np.any(theta > TWO_PI + 1e-12):
        raise ArgumentError("CDF arguments must lie in [0, 2pi]")
    return np.clip(theta, 0.0, TWO_PI)


def cdf_univariate(p: MnntsParams, theta) -> Union[float, np.ndarray]:
    """F(theta) = integral of the univariate density over [0, theta]."""
    theta = _check_cdf_args(p, theta)
    c = p.c
    lags = np.array([np.sum(c[: c.size - d] * np.conj(c[d:])) for d in range(c.size)])
    out = cdf_from_lags(lags, theta)
    return float(out) if out.ndim == 0 else out


def torus_grid(dims: DimVector, points=None) -> np.ndarray:
    """
    Uniform grid theta_j = 2pi j / N per axis, with N_s >= 2 M_s + 2 by
    default, as an (prod N_s, n) matrix. The grid mean of any density is its
    integral divided by (2pi)^n exactly.
    """
    if points is None:
        points = [2 * m + 2 for m in dims.dims]
    elif np.isscalar(points):
        points = [int(points)] * dims.n_vars
    axes = [TWO_PI * np.arange(n) / n for n in points]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in mesh], axis=1)


def quadrature_integral(p: MnntsParams, points=None) -> float:
    """Integral of the density over the torus by exact trigonometric quadrature."""
    grid = torus_grid(p.dims, points)
    return float(np.mean(density_batch(p, grid)) * TWO_PI**p.n_vars)
