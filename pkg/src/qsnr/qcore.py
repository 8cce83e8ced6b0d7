"""Dense complex linear algebra for small quantum systems.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Validating
constructors (:func:`as_hermitian`, :func:`as_density`, :func:`as_unitary`)
return read-only copies so that validated values can be shared freely.

Tensor products use the row-major (first factor major) index convention,
i.e. ``tensor(A, B)[i*dB + k, j*dB + l] == A[i, j] * B[k, l]``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatchError, NotAStateError, ValidationError

VALIDATION_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
# eigenvalues closer than this (relative to the spectral radius) share a subspace
_DEGENERACY_RTOL = 1e-11
_EPS = np.finfo(float).eps


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex, copy=True)
    m.setflags(write=False)
    return m


def _square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatchError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    return m


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def as_hermitian(m, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Validate ``m`` as a Hermitian operator and return a read-only copy."""
    m = _square(m)
    res = hermiticity_residual(m)
    if res > tol:
        raise ValidationError(f"operator is not Hermitian (residual {res:.3g} > {tol:g})")
    return _frozen((m + m.conj().T) / 2)


def as_density(m, tol: float = VALIDATION_TOL) -> np.ndarray:
    """Validate ``m`` as a density matrix: Hermitian, PSD and unit trace."""
    try:
        h = as_hermitian(m, tol)
    except ValidationError as exc:
        raise NotAStateError(str(exc)) from None
    tr = np.trace(h)
    if abs(tr.real - 1.0) > tol or abs(tr.imag) > tol:
        raise NotAStateError(f"trace is {tr:.6g}, expected 1")
    lo = float(np.linalg.eigvalsh(h)[0])
    if lo < -tol:
        raise NotAStateError(f"negative eigenvalue {lo:.3g}")
    return h


def as_unitary(m, tol: float = RECONSTRUCTION_TOL) -> np.ndarray:
    m = _square(m)
    res = float(np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0])))
    if res > tol:
        raise ValidationError(f"matrix is not unitary (residual {res:.3g})")
    return _frozen(m)


def _fix_degenerate_block(vecs: np.ndarray) -> np.ndarray:
    """Canonical orthonormal basis of span(vecs).

    Coordinate vectors are projected onto the subspace in index order and
    Gram-Schmidt orthonormalized; the first ``k`` independent ones win.
    """
    d, k = vecs.shape
    proj = vecs @ vecs.conj().T
    basis: list[np.ndarray] = []
    for j in range(d):
        v = proj[:, j].copy()
        for b in basis:
            v -= (b.conj() @ v) * b
        # second pass keeps the basis orthonormal to working precision
        for b in basis:
            v -= (b.conj() @ v) * b
        n = np.linalg.norm(v)
        if n > 1e-6:
            basis.append(v / n)
            if len(basis) == k:
                break
    return np.column_stack(basis)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first entry of non-negligible magnitude is made real positive
    idx = int(np.argmax(np.abs(v) > 1e-8))
    ph = v[idx] / abs(v[idx])
    return v / ph


def eig_hermitian(h) -> SpectralDecomposition:
    """Deterministic spectral decomposition of a Hermitian operator.

    Degenerate eigenspaces get the basis obtained by orthonormalizing the
    projected coordinate vectors in index order; every other eigenvector
    has its first significant component real and positive.
    """
    h = as_hermitian(h)
    w, v = np.linalg.eigh(h)
    v = np.array(v)
    scale = max(1.0, float(np.max(np.abs(w))))
    start = 0
    d = len(w)
    while start < d:
        stop = start + 1
        while stop < d and w[stop] - w[stop - 1] <= _DEGENERACY_RTOL * scale:
            stop += 1
        if stop - start > 1:
            v[:, start:stop] = _fix_degenerate_block(v[:, start:stop])
        else:
            v[:, start] = _fix_phase(v[:, start])
        start = stop
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def _clamped_spectrum(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(rho)
    if w[0] < -VALIDATION_TOL:
        raise NotAStateError(f"negative eigenvalue {w[0]:.3g}")
    # rounding noise in the null space would be amplified by the square root
    floor = 10 * len(w) * _EPS * max(1.0, float(w[-1]))
    w = np.where(w < floor, 0.0, np.minimum(w, 1.0))
    return w, v


def psd_sqrt(rho) -> np.ndarray:
    """Principal square root of a density matrix."""
    rho = as_density(rho)
    w, v = _clamped_spectrum(rho)
    return _frozen((v * np.sqrt(w)) @ v.conj().T)


def tensor(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one factor of a ``dim_a * dim_b`` bipartite operator."""
    m = _square(m)
    if m.shape[0] != dim_a * dim_b:
        raise DimensionMismatchError(
            f"matrix of size {m.shape[0]} is not {dim_a} x {dim_b} bipartite"
        )
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ikjk->ij", t)
    if keep == "B":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _check_same_dim(*ms: np.ndarray) -> None:
    dims = {m.shape for m in ms}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")


def expectation(a, rho) -> float:
    """``Tr[A rho]``, checked to be real."""
    a = _square(a, "observable")
    rho = _square(rho, "state")
    _check_same_dim(a, rho)
    val = np.sum(a * rho.T)
    if abs(val.imag) > RECONSTRUCTION_TOL * max(1.0, abs(val.real)):
        raise ValidationError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def commutator(a, b) -> np.ndarray:
    a = _square(a)
    b = _square(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def random_density(dim: int, rank: int | None = None, seed: int = 0) -> np.ndarray:
    """Random state of the given rank (Hilbert-Schmidt measure when full rank).

    Obtained as the partial trace of a Gaussian pure state on ``dim x rank``.
    """
    if rank is None:
        rank = dim
    if dim < 1 or not 1 <= rank <= dim:
        raise ValidationError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return _frozen(rho / np.trace(rho).real)


def random_unitary(dim: int, seed: int = 0) -> np.ndarray:
    """Haar-distributed unitary from the phase-corrected QR of a Ginibre matrix."""
    if dim < 1:
        raise ValidationError("dim must be positive")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return _frozen(q * (d / np.abs(d)))


def random_hermitian(dim: int, seed: int = 0) -> np.ndarray:
    """GUE-style random Hermitian matrix."""
    if dim < 1:
        raise ValidationError("dim must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return _frozen((g + g.conj().T) / 2)


def ket_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return _frozen(np.outer(psi, psi.conj()))


SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Y = _frozen([[0, -1j], [1j, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
