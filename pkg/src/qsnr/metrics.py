"""Quantum and classical fidelities, Bures distances and related scalars."""

from __future__ import annotations

import numpy as np

from . import qcore
from .errors import DimensionMismatchError, ValidationError

_DIST_TOL = 1e-10


def _pair(rho1, rho2) -> tuple[np.ndarray, np.ndarray]:
    rho1 = qcore.as_density(rho1)
    rho2 = qcore.as_density(rho2)
    if rho1.shape != rho2.shape:
        raise DimensionMismatchError(f"states have shapes {rho1.shape} and {rho2.shape}")
    return rho1, rho2


def quantum_fidelity(rho1, rho2) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` (not squared).

    Evaluated as the trace norm of ``sqrt(rho1) sqrt(rho2)``: its singular
    values are the square roots of the eigenvalues of the inner operator, so
    no square root of a noisy near-zero eigenvalue is ever taken.
    """
    rho1, rho2 = _pair(rho1, rho2)
    x = qcore.psd_sqrt(rho1) @ qcore.psd_sqrt(rho2)
    f = float(np.sum(np.linalg.svd(x, compute_uv=False)))
    if f > 1 + _DIST_TOL:
        raise ValidationError(f"fidelity {f!r} exceeds 1")
    return min(max(f, 0.0), 1.0)


def bures_distance(rho1, rho2) -> float:
    return float(np.sqrt(1.0 - quantum_fidelity(rho1, rho2)))


def as_distribution(p) -> np.ndarray:
    """Validate a probability vector, clamping tiny negatives to zero."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValidationError("empty distribution")
    if np.any(p < -qcore.VALIDATION_TOL):
        raise ValidationError(f"negative probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > _DIST_TOL:
        raise ValidationError(f"probabilities sum to {total!r}")
    return p / total


def born_distribution(rho, observable) -> np.ndarray:
    """Outcome probabilities ``<a_i|rho|a_i>`` in ascending-eigenvalue order.

    ``observable`` is anything exposing ``eigenvectors`` (an
    :class:`~qsnr.bounds.Observable` or a
    :class:`~qsnr.qcore.SpectralDecomposition`).
    """
    rho = qcore.as_density(rho)
    v = observable.eigenvectors
    if v.shape != rho.shape:
        raise DimensionMismatchError(f"state {rho.shape} vs observable {v.shape}")
    p = np.real(np.einsum("ji,jk,ki->i", v.conj(), rho, v))
    return as_distribution(p)


def _dist_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = as_distribution(p)
    q = as_distribution(q)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"distributions of length {p.size} and {q.size}")
    return p, q


def classical_fidelity(p, q) -> float:
    """Bhattacharyya coefficient ``sum_i sqrt(p_i q_i)``."""
    p, q = _dist_pair(p, q)
    return min(float(np.sum(np.sqrt(p * q))), 1.0)


def classical_bures(p, q) -> float:
    return float(np.sqrt(1.0 - classical_fidelity(p, q)))


def purity(rho) -> float:
    rho = qcore.as_density(rho)
    return float(np.real(np.sum(rho * rho.T)))


def superfidelity_bound(rho1, rho2) -> float:
    """``Tr[rho1 rho2] + sqrt((1 - Tr rho1^2)(1 - Tr rho2^2))``, an upper bound on F^2."""
    rho1, rho2 = _pair(rho1, rho2)
    overlap = float(np.real(np.sum(rho1 * rho2.T)))
    mixedness = max(1.0 - purity(rho1), 0.0) * max(1.0 - purity(rho2), 0.0)
    return overlap + float(np.sqrt(mixedness))
