"""
Dense Hermitian eigendecomposition by cyclic complex Jacobi rotations.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import HERMITIAN_TOL, JACOBI
from .errors import ArgumentError, NumericError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a square Hermitian matrix and return a complex copy."""
    a = np.array(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ArgumentError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError("matrix contains non-finite values")

    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol:
        raise ArgumentError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3e})")
    return a


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p, q] in place with a unitary 2x2 rotation."""
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return

    w = apq / mag
    app = a[p, p].real
    aqq = a[q, q].real
    theta = (aqq - app) / (2.0 * mag)
    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c

    # U = diag(1, conj(w)) @ [[c, s], [-s, c]] acting on (p, q)
    u_pp, u_pq = c, s
    u_qp, u_qq = -s * np.conj(w), c * np.conj(w)

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = col_p * u_pp + col_q * u_qp
    a[:, q] = col_p * u_pq + col_q * u_qq

    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = np.conj(u_pp) * row_p + np.conj(u_qp) * row_q
    a[q, :] = np.conj(u_pq) * row_p + np.conj(u_qq) * row_q

    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = vec_p * u_pp + vec_q * u_qp
    v[:, q] = vec_p * u_pq + vec_q * u_qq


def _jacobi(a: np.ndarray, max_sweeps: int, off_tol: float):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(a))
    threshold = off_tol * scale
    off = _off_norm(a)

    for sweep in range(1, max_sweeps + 1):
        if off <= threshold:
            return np.diag(a).real.copy(), v, sweep - 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
        off = _off_norm(a)
        logger.debug("jacobi sweep %d: off-diagonal norm %.3e", sweep, off)

    if off <= threshold:
        return np.diag(a).real.copy(), v, max_sweeps
    raise NumericError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps "
        f"(off-diagonal residual {off:.3e}, threshold {threshold:.3e})"
    )


def _fix_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        j = int(np.argmax(np.abs(col)))
        lead = col[j]
        if abs(lead) > 0.0:
            col *= np.conj(lead) / abs(lead)
            col[j] = abs(col[j])
    return v


def hermitian_eig(a, max_dim: Optional[int] = None) -> HermitianEig:
    """
    Full decomposition A = V diag(lambda) V^H, eigenvalues descending.

    Cyclic Jacobi with a fixed (p, q) sweep order; matrices larger than
    `max_dim` go to LAPACK's Hermitian driver instead. Ties keep the order
    in which the sweeps left them.
    """
    a = as_hermitian(a)
    n = a.shape[0]
    max_dim = JACOBI["max_dim"] if max_dim is None else max_dim

    if n == 1:
        return HermitianEig(np.array([a[0, 0].real]), np.ones((1, 1), dtype=np.complex128))

    # Work on the exactly Hermitian part.
    a = 0.5 * (a + a.conj().T)

    if n > max_dim:
        logger.debug("dimension %d > %d, using LAPACK eigh", n, max_dim)
        values, vectors = np.linalg.eigh(a)
        sweeps = 0
    else:
        values, vectors, sweeps = _jacobi(a.copy(), JACOBI["max_sweeps"], JACOBI["off_tol"])

    order = np.argsort(-values, kind="stable")
    return HermitianEig(values[order], _fix_phases(vectors[:, order]), sweeps)
