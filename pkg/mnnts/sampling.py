"""
Random sampling from MNNTS models.

Univariate draws invert the CDF by bisection. Multivariate draws follow the
chain rule: theta_1 from its marginal mixture, then each theta_j from the
distribution of theta_j given theta_1..theta_{j-1} with the later variables
integrated out.

Streams come from SplitMix64 (64-bit state, golden-ratio increment
0x9E3779B97F4A7C15, output mix z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31). A uniform is the top
53 bits of an output times 2^-53, so streams are reproducible bit for bit
on any platform or language.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .config import CONDITIONING, SAMPLING
from .core import MnntsParams, TWO_PI
from .dataset import AngularDataset
from .density import cdf_from_lags, lag_sums, moment_matrix
from .errors import ArgumentError, NumericError
from .marginal import MarginalMixture, marginal
from .parallel import chunked_concat

logger = logging.getLogger(__name__)

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)
# Odd increment used to derive child seeds in RngState.split.
SPLIT_INCREMENT = np.uint64(0xD1B54A32D192ED03)
MASK_64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * MIX_1
    z = (z ^ (z >> np.uint64(27))) * MIX_2
    return z ^ (z >> np.uint64(31))


class RngState:
    """
    SplitMix64 stream: output k (k = 1, 2, ...) is mix64(seed + k * golden).

    One RngState per stream; give concurrent workers their own sub-streams
    via split().
    """

    algorithm = "splitmix64"

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK_64
        self.counter = 0

    def next_uint64(self, count: int) -> np.ndarray:
        if count < 0:
            raise ArgumentError("count must be nonnegative")
        steps = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        self.counter += count
        return _mix64(np.uint64(self.seed) + steps * GOLDEN)

    def uniform(self, count: int) -> np.ndarray:
        """count uniforms in [0, 1) with 53 random bits each."""
        bits = self.next_uint64(count) >> np.uint64(11)
        return bits.astype(np.float64) * 2.0**-53

    def split(self, index: int) -> "RngState":
        """Independent sub-stream: seed_i = mix64(seed + (i + 1) * 0xD1B54A32D192ED03)."""
        if index < 0:
            raise ArgumentError("split index must be nonnegative")
        step = np.array([(index + 1) & MASK_64], dtype=np.uint64)
        child = _mix64(np.uint64(self.seed) + step * SPLIT_INCREMENT)
        return RngState(int(child[0]))

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, counter={self.counter})"


def _as_rng(rng) -> RngState:
    return rng if isinstance(rng, RngState) else RngState(int(rng))


def invert_cdf(lags: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    Solve F(theta) = u by bisection on [0, 2pi], F given by its lag sums
    (shape (K,) shared or (N, K) per row). Returns angles in [0, 2pi).
    """
    u = np.asarray(u, dtype=np.float64)
    lo = np.zeros_like(u)
    hi = np.full_like(u, TWO_PI)
    for _ in range(SAMPLING["bisection_iters"]):
        mid = 0.5 * (lo + hi)
        below = cdf_from_lags(lags, mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    theta = 0.5 * (lo + hi)
    return np.where(theta >= TWO_PI, 0.0, theta)


def _check_count(count: int) -> int:
    count = int(count)
    if count < 1:
        raise ArgumentError("count must be >= 1")
    return count


def _univariate_lags(c: np.ndarray) -> np.ndarray:
    return lag_sums(np.outer(c, np.conj(c)))


def sample_univariate(p: MnntsParams, rng, count: int) -> np.ndarray:
    """count inverse-transform draws from a univariate model."""
    if p.n_vars != 1:
        raise ArgumentError(f"expected a univariate model, got {p.n_vars} variables")
    count = _check_count(count)
    rng = _as_rng(rng)
    return invert_cdf(_univariate_lags(p.c), rng.uniform(count))


def sample_mixture(
    m: MarginalMixture, rng, count: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draws from a univariate mixture: pick a component by its probability,
    then invert that component's CDF. Returns (angles, component indices).
    """
    if m.keep_dims.n_vars != 1:
        raise ArgumentError("mixture sampling is univariate")
    count = _check_count(count)
    rng = _as_rng(rng)

    if m.n_components == 1:
        return sample_univariate(m.components[0], rng, count), np.zeros(count, dtype=int)

    cumulative = np.cumsum(m.probs)
    picks = np.searchsorted(cumulative, rng.uniform(count) * cumulative[-1], side="right")
    picks = np.minimum(picks, m.n_components - 1)
    lags = np.stack([_univariate_lags(comp.c) for comp in m.components])
    return invert_cdf(lags[picks], rng.uniform(count)), picks


def _draw_chain(p: MnntsParams, rng: RngState, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """One pass of the chain rule; also returns rows hitting degenerate conditionals."""
    n = p.n_vars
    out = np.zeros((count, n))
    degenerate = np.zeros(count, dtype=bool)
    out[:, 0], _ = sample_mixture(marginal(p, [1]), rng, count)

    for j in range(1, n):
        given_dims = p.dims.select(range(j))
        rest_dims = p.dims.select(range(j, n))
        k_j = rest_dims.shape[0]
        n_rest = n - j
        cmat = p.c.reshape(given_dims.total_length, rest_dims.total_length)
        u = rng.uniform(count)

        def lags_for(chunk: slice) -> np.ndarray:
            e = moment_matrix(out[chunk, :j], given_dims)
            c_rest = np.conj(e) @ cmat
            norm2 = np.sum(np.abs(c_rest) ** 2, axis=1)
            f_given = TWO_PI**n_rest * norm2
            ok = f_given >= CONDITIONING["min_density"]
            scale = np.where(ok, 1.0 / np.sqrt(np.where(ok, norm2, 1.0) * TWO_PI**n_rest), 0.0)
            b = (c_rest * scale[:, None]).reshape(-1, k_j, rest_dims.total_length // k_j)
            gram = TWO_PI ** (n_rest - 1) * np.einsum("nkl,nml->nkm", b, np.conj(b))
            lags = lag_sums(gram)
            # Degenerate rows get the uniform lags and are flagged through column 0.
            lags[~ok] = 0.0
            lags[~ok, 0] = -1.0
            return lags

        lags = chunked_concat(lags_for, count, 16 * (given_dims.total_length + k_j * rest_dims.total_length))
        bad = lags[:, 0].real < 0.0
        lags[bad] = 0.0
        lags[bad, 0] = 1.0 / TWO_PI
        degenerate |= bad
        out[:, j] = invert_cdf(lags, u)

    return out, degenerate


def sample(p: MnntsParams, rng, count: int, var_names: Optional[Tuple[str, ...]] = None) -> AngularDataset:
    """
    count draws from p as an AngularDataset.

    Rows whose chain meets a conditioning density below the degeneracy
    threshold are redrawn, at most SAMPLING['max_retries'] times.
    """
    count = _check_count(count)
    rng = _as_rng(rng)
    names = tuple(var_names) if var_names else tuple(f"theta{i}" for i in range(1, p.n_vars + 1))
    if len(names) != p.n_vars:
        raise ArgumentError(f"{len(names)} names for {p.n_vars} variables")

    if p.n_vars == 1:
        return AngularDataset(names, sample_univariate(p, rng, count).reshape(-1, 1))

    rows, bad = _draw_chain(p, rng, count)
    retries = 0
    while np.any(bad):
        if retries >= SAMPLING["max_retries"]:
            raise NumericError(
                f"{int(bad.sum())} draws still hit degenerate conditionals after {retries} retries"
            )
        retries += 1
        logger.debug("redrawing %d rows (retry %d)", int(bad.sum()), retries)
        redo, redo_bad = _draw_chain(p, rng, int(bad.sum()))
        index = np.flatnonzero(bad)
        rows[index] = redo
        bad[index] = redo_bad

    return AngularDataset(names, rows)
