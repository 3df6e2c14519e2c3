"""
Conditional distributions: MNNTS models are closed under conditioning.

With the free block leading, reshape c into the K_free x K_given matrix B.
Fixing the given block at theta* leaves c* = B conj(e*), where e* is the
Kronecker moment vector of the given angles; c* moved back onto the
parameter sphere is the conditional parameter vector. The conditioning
block's marginal density at theta* is (2pi)^{|free|} ||c*||^2.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from .config import CONDITIONING
from .core import MnntsParams, TWO_PI, check_variables, permute_vars, wrap_angles
from .dataset import check_unit
from .density import moment_vector
from .errors import ArgumentError, DegenerateConditioningError
from .marginal import MarginalMixture, marginal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConditionalSpec:
    """Fixed angles for a strict, nonempty subset of the variables (1-based)."""

    given: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.given:
            raise ArgumentError("conditioning set must be nonempty")
        if not all(np.isfinite(float(v)) for v in self.given.values()):
            raise ArgumentError("conditioning angles must be finite")
        given = {int(k): float(wrap_angles(float(v))) for k, v in self.given.items()}
        object.__setattr__(self, "given", dict(sorted(given.items())))

    @classmethod
    def parse(cls, text: str, unit: Optional[str] = "radians") -> "ConditionalSpec":
        """Parse 'k=VAL,...'; degree values are reduced mod 360 and converted first."""
        degrees = check_unit(unit) == "degrees"
        given: Dict[int, float] = {}
        for part in text.split(","):
            if not part.strip():
                continue
            try:
                key, value = part.split("=")
                index = int(key)
                angle = float(value)
            except ValueError as e:
                raise ArgumentError(f"invalid conditioning term {part!r}, expected k=VAL") from e
            if index in given:
                raise ArgumentError(f"variable {index} given twice")
            if degrees:
                angle = float(np.deg2rad(np.mod(angle, 360.0)))
            given[index] = angle
        return cls(given)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(self.given)

    def validate(self, n_vars: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Return (free, given) index tuples for an n-variate model."""
        given = check_variables(self.indices, n_vars, "conditioning")
        if len(given) >= n_vars:
            raise ArgumentError("at least one variable must remain free")
        free = tuple(i for i in range(1, n_vars + 1) if i not in given)
        return free, given


def _contract(p: MnntsParams, spec: ConditionalSpec):
    free, given = spec.validate(p.n_vars)
    q = permute_vars(p, free + given)
    free_dims = p.dims.select([i - 1 for i in free])
    given_dims = p.dims.select([i - 1 for i in given])

    e_star = moment_vector([spec.given[i] for i in given], given_dims)
    b = q.c.reshape(free_dims.total_length, given_dims.total_length)
    c_star = b @ np.conj(e_star)
    f_given = TWO_PI ** len(free) * float(np.vdot(c_star, c_star).real)
    return free_dims, c_star, f_given


def conditioning_density(p: MnntsParams, spec: ConditionalSpec) -> float:
    """Marginal density of the conditioning block at the conditioning point."""
    if not isinstance(spec, ConditionalSpec):
        spec = ConditionalSpec(spec)
    return _contract(p, spec)[2]


def conditional(p: MnntsParams, spec: ConditionalSpec) -> MnntsParams:
    """
    Parameters of the free variables (ascending order) given spec.

    Raises DegenerateConditioningError when the conditioning block's
    marginal density at the point is below the degeneracy threshold.
    """
    if not isinstance(spec, ConditionalSpec):
        spec = ConditionalSpec(spec)
    free_dims, c_star, f_given = _contract(p, spec)
    if f_given < CONDITIONING["min_density"]:
        raise DegenerateConditioningError(
            f"conditioning density {f_given:.3e} at {spec.given} is below "
            f"{CONDITIONING['min_density']:g}",
            f_given,
        )
    logger.debug("conditioning on %s: f_C = %.6e", spec.given, f_given)
    return MnntsParams.from_vector(free_dims, c_star)


def conditional_marginal(
    p: MnntsParams, spec: ConditionalSpec, keep: Iterable[int]
) -> MarginalMixture:
    """
    Distribution of the keep variables given spec, with the remaining free
    variables integrated out. keep uses the original 1-based numbering.
    """
    if not isinstance(spec, ConditionalSpec):
        spec = ConditionalSpec(spec)
    free, _ = spec.validate(p.n_vars)
    keep = check_variables(keep, p.n_vars, "keep")
    missing = [i for i in keep if i not in free]
    if missing:
        raise ArgumentError(f"variables {missing} are both kept and conditioned on")

    cond = conditional(p, spec)
    positions = [free.index(i) + 1 for i in keep]
    mixture = marginal(cond, positions)
    return MarginalMixture(keep, mixture.keep_dims, mixture.probs, mixture.components)
