"""
Parameter vectors of MNNTS models and the Kronecker index algebra.

The parameter vector c of an n-variate model with dimension vector
M = (M_1, ..., M_n) has prod(M_s + 1) complex entries indexed by the
multi-index (k_1, ..., k_n), ordered as the Kronecker product
(0..M_1) x (0..M_2) x ... x (0..M_n): row-major with k_1 varying slowest.
Every module goes through `linear_index` / `DimVector.shape` for this
ordering; `shape` is exactly the C-order reshape that `linear_index` ranks.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .config import NORM_TOL, PHASE_EPS
from .errors import ArgumentError, DegenerateInputError, MultiIndexError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def as_complex_vec(values, name: str = "c") -> np.ndarray:
    """Validate and copy a non-empty, finite, one-dimensional complex vector."""
    vec = np.array(values, dtype=np.complex128).reshape(-1)
    if vec.size < 1:
        raise ArgumentError(f"{name} must have at least one element")
    if not np.all(np.isfinite(vec)):
        raise ArgumentError(f"{name} contains non-finite values")
    return vec


def sphere_norm2(n_vars: int) -> float:
    """Squared norm 1/(2pi)^n of every valid parameter vector."""
    return TWO_PI ** (-n_vars)


@dataclass(frozen=True)
class DimVector:
    """Number of terms (M_1, ..., M_n) of each variable's trigonometric sum."""

    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(m) for m in self.dims)
        if len(dims) < 1:
            raise ArgumentError("a dimension vector needs at least one variable")
        if any(m < 0 for m in dims):
            raise ArgumentError(f"dimensions must be nonnegative, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def parse(cls, text: str) -> "DimVector":
        """Parse '3,3,2' into DimVector((3, 3, 2))."""
        try:
            return cls(tuple(int(part) for part in text.split(",") if part.strip()))
        except ValueError as e:
            raise ArgumentError(f"invalid dimension vector {text!r}") from e

    @property
    def n_vars(self) -> int:
        return len(self.dims)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(m + 1 for m in self.dims)

    @property
    def total_length(self) -> int:
        return math.prod(self.shape)

    def select(self, indices: Iterable[int]) -> "DimVector":
        """Dimension vector of the variables at the given 0-based positions."""
        return DimVector(tuple(self.dims[i] for i in indices))

    def __len__(self) -> int:
        return self.n_vars

    def __str__(self) -> str:
        return ",".join(str(m) for m in self.dims)


@dataclass(frozen=True, eq=False)
class MnntsParams:
    """
    An MNNTS distribution: dimension vector plus parameter vector c.

    Invariants (checked on construction):
    ||c||^2 = 1/(2pi)^n within NORM_TOL, and c[0] real nonnegative unless
    `phase_fixed` is False (|c[0]| too small to fix the phase).
    """

    dims: DimVector
    c: np.ndarray
    phase_fixed: bool = True

    def __post_init__(self):
        dims = self.dims if isinstance(self.dims, DimVector) else DimVector(tuple(self.dims))
        object.__setattr__(self, "dims", dims)
        c = as_complex_vec(self.c)
        if c.size != dims.total_length:
            raise ArgumentError(
                f"parameter vector has {c.size} entries, dims {dims} need {dims.total_length}"
            )

        norm_err = abs(float(np.vdot(c, c).real) - sphere_norm2(dims.n_vars))
        if norm_err > NORM_TOL:
            raise ArgumentError(
                f"||c||^2 differs from 1/(2pi)^{dims.n_vars} by {norm_err:.3e}"
            )
        if self.phase_fixed and (abs(c[0].imag) > NORM_TOL or c[0].real < -NORM_TOL):
            raise ArgumentError(f"c[0] must be real and nonnegative, got {c[0]}")

        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_vector(cls, dims, c) -> "MnntsParams":
        """Build valid parameters from any nonzero vector by normalizing it."""
        dims = dims if isinstance(dims, DimVector) else DimVector(tuple(dims))
        normalized, fixed = _normalize(as_complex_vec(c), dims.n_vars)
        return cls(dims, normalized, phase_fixed=fixed)

    @classmethod
    def uniform(cls, dims) -> "MnntsParams":
        """Uniform distribution on the hypertorus (only c[0] nonzero)."""
        dims = dims if isinstance(dims, DimVector) else DimVector(tuple(dims))
        c = np.zeros(dims.total_length, dtype=np.complex128)
        c[0] = 1.0
        return cls.from_vector(dims, c)

    @property
    def n_vars(self) -> int:
        return self.dims.n_vars

    def tensor(self) -> np.ndarray:
        """c viewed as an array of shape (M_1+1, ..., M_n+1)."""
        return self.c.reshape(self.dims.shape)

    def __repr__(self) -> str:
        return f"MnntsParams(dims=({self.dims}), length={self.c.size})"


def linear_index(multi_index: Sequence[int], dims: DimVector) -> int:
    """
    Rank of a multi-index in Kronecker order.

    idx = sum_s k_s * prod_{t>s}(M_t + 1)
    """
    multi_index = tuple(int(k) for k in multi_index)
    if len(multi_index) != dims.n_vars:
        raise MultiIndexError(
            f"multi-index has {len(multi_index)} components, dims have {dims.n_vars}"
        )
    for s, (k, m) in enumerate(zip(multi_index, dims.dims)):
        if not 0 <= k <= m:
            raise MultiIndexError(f"component {s + 1} is {k}, must be in 0..{m}")

    idx = 0
    for k, size in zip(multi_index, dims.shape):
        idx = idx * size + k
    return idx


def multi_index(idx: int, dims: DimVector) -> Tuple[int, ...]:
    """Inverse of linear_index."""
    if not 0 <= idx < dims.total_length:
        raise MultiIndexError(f"linear index {idx} outside 0..{dims.total_length - 1}")
    return tuple(int(k) for k in np.unravel_index(idx, dims.shape))


def kronecker(a, b) -> np.ndarray:
    """(a x b)[i * len(b) + j] = a[i] * b[j]."""
    a = as_complex_vec(a, "a")
    b = as_complex_vec(b, "b")
    return np.kron(a, b)


def _normalize(c: np.ndarray, n_vars: int) -> Tuple[np.ndarray, bool]:
    norm = float(np.linalg.norm(c))
    if norm == 0.0 or not math.isfinite(norm):
        raise DegenerateInputError("cannot normalize a zero parameter vector")

    out = c / (norm * TWO_PI ** (n_vars / 2.0))
    lead = abs(out[0])
    if lead < PHASE_EPS:
        logger.debug("|c[0]| = %.2e too small to fix the phase; left unchanged", lead)
        return out, False

    out = out * (np.conj(out[0]) / lead)
    out[0] = lead
    return out, True


def normalize(c, n_vars: int) -> np.ndarray:
    """
    Project a nonzero vector onto the parameter sphere.

    Scales to ||c||^2 = 1/(2pi)^n and rotates by -arg(c[0]) so that c[0] is
    real nonnegative. The global phase does not change the density.
    """
    if n_vars < 1:
        raise ArgumentError("n_vars must be >= 1")
    out, _ = _normalize(as_complex_vec(c), n_vars)
    return out


def _check_permutation(perm: Sequence[int], n_vars: int) -> Tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(1, n_vars + 1)):
        raise ArgumentError(f"{perm} is not a permutation of 1..{n_vars}")
    return perm


def permute_vars(p: MnntsParams, perm: Sequence[int]) -> MnntsParams:
    """
    Parameters of the reordered vector (theta_perm(1), ..., theta_perm(n)).

    perm is 1-based: new variable j is old variable perm[j].
    """
    perm = _check_permutation(perm, p.n_vars)
    axes = [q - 1 for q in perm]
    new_dims = p.dims.select(axes)
    c = np.ascontiguousarray(p.tensor().transpose(axes)).reshape(-1)
    return MnntsParams(new_dims, c, phase_fixed=p.phase_fixed)


def inverse_permutation(perm: Sequence[int]) -> Tuple[int, ...]:
    """1-based inverse permutation."""
    perm = _check_permutation(perm, len(perm))
    inverse = [0] * len(perm)
    for new_pos, old in enumerate(perm, start=1):
        inverse[old - 1] = new_pos
    return tuple(inverse)


def check_variables(indices: Iterable[int], n_vars: int, what: str = "variable") -> Tuple[int, ...]:
    """Validate sorted unique 1-based variable indices."""
    indices = tuple(sorted(int(i) for i in indices))
    if len(set(indices)) != len(indices):
        raise ArgumentError(f"duplicate {what} indices {indices}")
    for i in indices:
        if not 1 <= i <= n_vars:
            raise ArgumentError(f"{what} index {i} outside 1..{n_vars}")
    return indices


def wrap_angles(theta) -> np.ndarray:
    """Reduce angles (radians) to [0, 2pi)."""
    wrapped = np.mod(np.asarray(theta, dtype=np.float64), TWO_PI)
    # np.mod can round tiny negative inputs up to exactly 2pi.
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)
