"""
Marginal distributions of MNNTS models as finite mixtures of
lower-dimensional MNNTS densities.

For keep block R and marginalized block R^c, reshape c (R leading) into the
K x L matrix B. Integrating out R^c gives f_R(x) = e_R^H C e_R with
C = (2pi)^{|R^c|} B B^H. Writing C = sum_m lambda_m v_m v_m^H, the mixing
probabilities are p_m = (2pi)^{|R|} lambda_m and the components are the
eigenvectors moved onto the parameter sphere; trace(C) = 1/(2pi)^{|R|}
makes the probabilities sum to one.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .config import MARGINAL
from .config_default import load_settings
from .core import DimVector, MnntsParams, TWO_PI, check_variables, permute_vars
from .density import as_angle_point, as_angle_rows, cdf_gram, density, density_batch
from .errors import ArgumentError
from .linalg import hermitian_eig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarginalMixture:
    """Mixture sum_m probs[m] * f(.; components[m]) over the kept variables."""

    keep: Tuple[int, ...]
    keep_dims: DimVector
    probs: np.ndarray
    components: Tuple[MnntsParams, ...]

    def __post_init__(self):
        if len(self.probs) != len(self.components):
            raise ArgumentError("one probability per component required")

    @property
    def n_components(self) -> int:
        return len(self.components)

    def truncate(self, eps: float = MARGINAL["truncate_eps"]) -> "MarginalMixture":
        """Drop components whose probability is below eps."""
        mask = self.probs >= eps
        if not np.any(mask):
            mask[int(np.argmax(self.probs))] = True
        probs = self.probs[mask]
        components = tuple(c for c, m in zip(self.components, mask) if m)
        return MarginalMixture(self.keep, self.keep_dims, probs, components)

    def gram(self) -> np.ndarray:
        """C = sum_m p_m c_m c_m^H, the marginal density is e^H C e."""
        size = self.keep_dims.total_length
        out = np.zeros((size, size), dtype=np.complex128)
        for prob, comp in zip(self.probs, self.components):
            out += prob * np.outer(comp.c, np.conj(comp.c))
        return out


def _split(p: MnntsParams, keep: Iterable[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    keep = check_variables(keep, p.n_vars, "keep")
    if not keep:
        raise ArgumentError("keep set must be nonempty")
    out = tuple(i for i in range(1, p.n_vars + 1) if i not in keep)
    return keep, out


def marginal_gram(p: MnntsParams, keep: Iterable[int]) -> np.ndarray:
    """C = (2pi)^{|out|} B B^H for the keep block (ascending variable order)."""
    keep, out = _split(p, keep)
    q = permute_vars(p, keep + out)
    k = p.dims.select([i - 1 for i in keep]).total_length
    b = q.c.reshape(k, -1)
    gram = TWO_PI ** len(out) * (b @ b.conj().T)
    return 0.5 * (gram + gram.conj().T)


def marginal(p: MnntsParams, keep: Iterable[int], truncate: bool = False) -> MarginalMixture:
    """
    Marginal distribution of the variables in keep (1-based) as a mixture.

    Keeping every variable returns p itself with probability one.
    """
    keep, out = _split(p, keep)
    keep_dims = p.dims.select([i - 1 for i in keep])

    if not out:
        return MarginalMixture(keep, keep_dims, np.ones(1), (p,))

    eig = hermitian_eig(marginal_gram(p, keep), max_dim=load_settings().jacobi_max_dim)
    probs = TWO_PI ** len(keep) * eig.eigenvalues
    if probs.min() < -MARGINAL["prob_clip"]:
        logger.warning("mixing probability %.3e below zero clipped", probs.min())
    probs = np.clip(probs, 0.0, None)

    components = tuple(
        MnntsParams.from_vector(keep_dims, eig.eigenvectors[:, j])
        for j in range(eig.eigenvectors.shape[1])
    )
    logger.debug("marginal over %s: leading probability %.6f", keep, probs[0])

    mixture = MarginalMixture(keep, keep_dims, probs, components)
    return mixture.truncate() if truncate else mixture


def mixture_density(m: MarginalMixture, x) -> float:
    """sum_m probs[m] * density(components[m], x)."""
    x = as_angle_point(x, m.keep_dims.n_vars)
    return float(sum(prob * density(comp, x) for prob, comp in zip(m.probs, m.components)))


def mixture_density_batch(m: MarginalMixture, thetas) -> np.ndarray:
    """Mixture density at every row of an (N, |keep|) angle matrix."""
    rows = as_angle_rows(thetas, m.keep_dims.n_vars)
    out = np.zeros(rows.shape[0])
    for prob, comp in zip(m.probs, m.components):
        if prob > 0.0:
            out += prob * density_batch(comp, rows)
    return out


def mixture_cdf(m: MarginalMixture, theta):
    """CDF of a univariate mixture on [0, 2pi]."""
    if m.keep_dims.n_vars != 1:
        raise ArgumentError("mixture CDF is defined for univariate mixtures only")
    out = cdf_gram(m.gram(), theta)
    return float(out) if np.ndim(out) == 0 else out
