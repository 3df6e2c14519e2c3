"""
Independence between blocks of variables.

A block split A | B is independent exactly when c = c_A x c_B, i.e. when
the marginal of A is a one-component mixture. The likelihood-ratio test
compares a joint fit against separate block fits.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Tuple

from scipy.stats import chi2

from .config import LRT
from .core import DimVector, MnntsParams, check_variables, kronecker
from .density import as_angle_rows
from .errors import ArgumentError, DataError
from .estimation import fit
from .marginal import marginal

logger = logging.getLogger(__name__)

Split = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class IndependenceTestResult:
    lr_statistic: float
    df: int
    p_value: float
    loglik_full: float
    loglik_indep: float
    estimator: str
    split: Split
    approximate: bool = False
    clipped: bool = False

    def report(self) -> str:
        label = "approximate LRT" if self.approximate else "LRT"
        left = ",".join(map(str, self.split[0]))
        right = ",".join(map(str, self.split[1]))
        text = (
            f"{label} {left}|{right} ({self.estimator}): statistic={self.lr_statistic:.4f} "
            f"df={self.df} p-value={self.p_value:.4g}"
        )
        if self.clipped:
            text += " (negative statistic clipped to 0)"
        return text


def parse_split(text: str) -> Split:
    """Parse 'i,j|k,l' into ((i, j), (k, l))."""
    try:
        left, right = text.split("|")
        return (
            tuple(int(i) for i in left.split(",") if i.strip()),
            tuple(int(i) for i in right.split(",") if i.strip()),
        )
    except ValueError as e:
        raise ArgumentError(f"invalid split {text!r}, expected i,j|k,l") from e


def check_split(split: Sequence[Iterable[int]], n_vars: int) -> Split:
    """Validate that the two sets partition 1..n."""
    if len(split) != 2:
        raise ArgumentError("a split has exactly two sets")
    a = check_variables(split[0], n_vars, "split")
    b = check_variables(split[1], n_vars, "split")
    if not a or not b:
        raise ArgumentError("both sides of a split must be nonempty")
    if set(a) & set(b) or len(a) + len(b) != n_vars:
        raise ArgumentError(f"{a} | {b} is not a partition of 1..{n_vars}")
    return a, b


def product_model(blocks: Sequence[MnntsParams]) -> MnntsParams:
    """Joint model of independent blocks: c = c_1 x c_2 x ... (dims concatenated)."""
    if len(blocks) < 2:
        raise ArgumentError("a product model needs at least two blocks")
    dims = DimVector(tuple(m for block in blocks for m in block.dims.dims))
    c = reduce(kronecker, (block.c for block in blocks))
    return MnntsParams(dims, c, phase_fixed=all(block.phase_fixed for block in blocks))


def independence_score(p: MnntsParams, split: Sequence[Iterable[int]]) -> float:
    """
    Leading mixing probability of the marginal of the first set.

    1 exactly when c factorizes across the split. The score is symmetric
    because B B^H and B^H B share their nonzero eigenvalues.
    """
    a, _ = check_split(split, p.n_vars)
    return float(marginal(p, a).probs[0])


def free_parameters(dims: DimVector) -> int:
    """Real free parameters of one model: 2 prod(M_s + 1) minus norm and phase."""
    return 2 * dims.total_length - 2


def lr_test(data, dims, split: Sequence[Iterable[int]], estimator: str = "ml", **fit_kwargs) -> IndependenceTestResult:
    """
    Likelihood-ratio test of independence between the two sets of a split.

    The joint model and each block are fitted with the same estimator; the
    statistic 2 (loglik_full - loglik_indep) is referred to a chi-squared
    distribution with df = free(full) - free(A) - free(B).
    """
    dims = dims if isinstance(dims, DimVector) else DimVector(tuple(dims))
    estimator = estimator.lower()
    a, b = check_split(split, dims.n_vars)
    rows = as_angle_rows(data, dims.n_vars)
    if rows.shape[0] < 2:
        raise DataError("independence test needs at least two observations")

    dims_a = dims.select([i - 1 for i in a])
    dims_b = dims.select([i - 1 for i in b])
    df = free_parameters(dims) - free_parameters(dims_a) - free_parameters(dims_b)
    if df < 1:
        raise ArgumentError(f"no parameters to test for dims {dims} and split {a}|{b}")

    jobs = [
        (rows, dims),
        (rows[:, [i - 1 for i in a]], dims_a),
        (rows[:, [i - 1 for i in b]], dims_b),
    ]
    with ThreadPoolExecutor(max_workers=len(jobs)) as executor:
        futures = [executor.submit(fit, x, d, estimator, **fit_kwargs) for x, d in jobs]
        full, fit_a, fit_b = [future.result() for future in futures]

    loglik_full = full.loglik
    loglik_indep = fit_a.loglik + fit_b.loglik
    statistic = 2.0 * (loglik_full - loglik_indep)
    clipped = statistic < 0.0
    if clipped:
        if statistic < -LRT["md_clip"]:
            logger.warning("negative LR statistic %.3e clipped to 0 (%s fits)", statistic, estimator)
        statistic = 0.0

    return IndependenceTestResult(
        lr_statistic=statistic,
        df=df,
        p_value=float(chi2.sf(statistic, df)),
        loglik_full=loglik_full,
        loglik_indep=loglik_indep,
        estimator=estimator,
        split=(a, b),
        approximate=estimator != "ml",
        clipped=clipped,
    )


def lr_calibration(
    p: MnntsParams,
    split: Sequence[Iterable[int]],
    n_obs: int,
    replications: int,
    seed: int,
    estimator: str = "ml",
    alpha: float = 0.05,
    **fit_kwargs,
) -> float:
    """
    Monte Carlo rejection rate of lr_test at level alpha for data drawn from p.

    Replication r uses the sub-stream RngState(seed).split(r).
    """
    from .sampling import RngState, sample

    root = RngState(seed)
    rejections = 0
    for r in range(replications):
        data = sample(p, root.split(r), n_obs)
        result = lr_test(data, p.dims, split, estimator, **fit_kwargs)
        rejections += result.p_value < alpha
        logger.debug("replication %d: p-value %.4f", r, result.p_value)
    return rejections / replications
