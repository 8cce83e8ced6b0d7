"""Detection channels, equality-attaining examples and SNR-maximizing observables."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds, qcore
from .bounds import Observable
from .errors import DimensionMismatchError, NoSignalError, ValidationError


@dataclass(frozen=True)
class DetectionModel:
    """Unitary coupling of a system S to a detector D prepared in ``rho_d0``.

    The joint space is ordered S-major: ``U`` acts on ``rho_s (x) rho_d0``.
    """

    U: np.ndarray
    rho_d0: np.ndarray
    dim_s: int
    dim_d: int

    def __post_init__(self):
        if self.dim_s < 1 or self.dim_d < 1:
            raise ValidationError("subsystem dimensions must be positive")
        u = qcore.as_unitary(self.U)
        if u.shape[0] != self.dim_s * self.dim_d:
            raise DimensionMismatchError(
                f"U has size {u.shape[0]}, expected {self.dim_s} * {self.dim_d}"
            )
        rho = qcore.as_density(self.rho_d0)
        if rho.shape[0] != self.dim_d:
            raise DimensionMismatchError(f"detector state has size {rho.shape[0]}, expected {self.dim_d}")
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "rho_d0", rho)


def swap_operator(dim: int) -> np.ndarray:
    """SWAP on ``dim x dim``: ``|i>|j> -> |j>|i>``."""
    s = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            s[j * dim + i, i * dim + j] = 1.0
    return s


def random_detection_model(dim_s: int, dim_d: int, seed: int) -> DetectionModel:
    rng = np.random.default_rng(seed)
    s_u, s_rho, s_rank = (int(x) for x in rng.integers(0, 2**63 - 1, size=3))
    rank = 1 + s_rank % dim_d
    return DetectionModel(
        U=qcore.random_unitary(dim_s * dim_d, s_u),
        rho_d0=qcore.random_density(dim_d, rank, s_rho),
        dim_s=dim_s,
        dim_d=dim_d,
    )


def apply_detection(model: DetectionModel, rho_s) -> np.ndarray:
    """Detector state ``Tr_S[U (rho_s (x) rho_d0) U^dagger]``."""
    rho_s = qcore.as_density(rho_s)
    if rho_s.shape[0] != model.dim_s:
        raise DimensionMismatchError(f"system state has size {rho_s.shape[0]}, expected {model.dim_s}")
    joint = model.U @ qcore.tensor(rho_s, model.rho_d0) @ model.U.conj().T
    out = qcore.partial_trace(joint, model.dim_s, model.dim_d, keep="B")
    return qcore.as_density((out + out.conj().T) / 2)


def oscillator_example(theta: float, omega: float = 1.0):
    """Two-level truncation of the oscillator pair, with ``A = omega (n - 1/2)``.

    Returns ``(rho1, rho2, A)`` for which the lemma bound holds with equality.
    """
    if not omega > 0:
        raise ValidationError(f"omega must be positive, got {omega}")
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    rho1 = np.diag([c2, s2]).astype(complex)
    rho2 = np.diag([s2, c2]).astype(complex)
    a = Observable(omega * np.diag([-0.5, 0.5]))
    return qcore.as_density(rho1), qcore.as_density(rho2), a


def qubit_example(p: float, sign: int = 1):
    """Non-commuting pair ``p|0><0| + (1-p)|1><1|`` and ``|+><+|`` with ``A = +-(sigma_x - 1)``."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    rho1 = np.diag([p, 1.0 - p]).astype(complex)
    rho2 = qcore.ket_to_density([1.0, 1.0])
    a = Observable(sign * (qcore.SIGMA_X - np.eye(2)))
    return qcore.as_density(rho1), rho2, a


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    iterations: int = 600
    seed: int = 0
    step_scale: float = 0.5
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1 or self.iterations < 1:
            raise ValidationError("restarts and iterations must be positive")
        if not (self.step_scale > 0 and self.tolerance > 0):
            raise ValidationError("step_scale and tolerance must be positive")


# search-time thresholds for declaring a noiseless signal
_INF_NOISE = 1e-12
_INF_SIGNAL = 1e-6


def _score(v: np.ndarray, lam: np.ndarray, rho1: np.ndarray, rho2: np.ndarray) -> float:
    p = np.real(np.sum(v.conj() * (rho1 @ v), axis=0))
    q = np.real(np.sum(v.conj() * (rho2 @ v), axis=0))
    m1, m2 = lam @ p, lam @ q
    s = abs(m1 - m2)
    n = math.sqrt(max((lam - m1) ** 2 @ p, 0.0)) + math.sqrt(max((lam - m2) ** 2 @ q, 0.0))
    if n < _INF_NOISE:
        return math.inf if s > _INF_SIGNAL else 0.0
    return s / n


def _normalize(lam: np.ndarray) -> np.ndarray:
    r = np.max(np.abs(lam))
    return lam / r if r > 0 else lam


def _rotate(v: np.ndarray, step: float, rng: np.random.Generator) -> np.ndarray:
    d = v.shape[0]
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2
    h /= np.linalg.norm(h)
    w, e = np.linalg.eigh(h)
    return v @ ((e * np.exp(1j * step * w)) @ e.conj().T)


def _local_search(v, lam, rho1, rho2, cfg: OptimizerConfig, rng) -> tuple[float, np.ndarray, np.ndarray]:
    d = v.shape[0]
    best = _score(v, lam, rho1, rho2)
    step = cfg.step_scale
    for it in range(cfg.iterations):
        if math.isinf(best) or step < cfg.tolerance:
            break
        if d > 2 and it % 2:
            cand_v, cand_lam = v, lam.copy()
            k = int(rng.integers(d))
            cand_lam[k] = np.clip(cand_lam[k] + step * rng.standard_normal(), -1.0, 1.0)
            cand_lam = _normalize(cand_lam)
        else:
            cand_v, cand_lam = _rotate(v, step, rng), lam
        score = _score(cand_v, cand_lam, rho1, rho2)
        if score > best:
            best, v, lam = score, cand_v, cand_lam
            step = min(step * 1.5, cfg.step_scale)
        else:
            step *= 0.9
    return best, v, lam


def _support_candidate(rho1: np.ndarray, rho2: np.ndarray) -> np.ndarray | None:
    """``2 P1 - I`` with ``P1`` the support projector of rho1, if rho2 lives outside it."""
    w, v = qcore._clamped_spectrum(rho1)
    sup = v[:, w > 0]
    proj = sup @ sup.conj().T
    if qcore.expectation(proj, rho2) < _INF_NOISE:
        return 2 * proj - np.eye(rho1.shape[0])
    return None


def optimize_observable(rho1, rho2, cfg: OptimizerConfig | None = None) -> tuple[Observable, float]:
    """Random-restart local search for the observable maximizing the SNR.

    Observables are parametrized as ``V diag(lam) V^dagger`` with spectral
    radius pinned to 1 (the SNR is invariant under affine maps of the
    observable).  Restart 0 starts from the eigenbasis of ``rho1 - rho2``;
    the others from seeded random unitaries and spectra.  The winner is
    returned shifted by its optimal shift and rescaled to unit spectral
    radius, together with its SNR.
    """
    cfg = cfg or OptimizerConfig()
    rho1 = qcore.as_density(rho1)
    rho2 = qcore.as_density(rho2)
    if rho1.shape != rho2.shape:
        raise DimensionMismatchError(f"states have shapes {rho1.shape} and {rho2.shape}")
    if np.linalg.norm(rho1 - rho2) <= 1e-10:
        raise NoSignalError("identical states carry no signal")
    d = rho1.shape[0]

    exact = _support_candidate(rho1, rho2)
    if exact is not None:
        return Observable(exact), math.inf

    best = (-math.inf, None, None)
    for k in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        if k == 0:
            w, v = np.linalg.eigh(rho1 - rho2)
            lam = _normalize(np.sign(np.where(np.abs(w) > 1e-12, w, 0.0)))
        else:
            v = np.array(qcore.random_unitary(d, int(rng.integers(0, 2**63 - 1))))
            lam = _normalize(rng.uniform(-1.0, 1.0, d))
        result = _local_search(v, lam, rho1, rho2, cfg, rng)
        if result[0] > best[0]:
            best = result
        if math.isinf(best[0]):
            break

    score, v, lam = best
    if not math.isinf(score):
        p = np.real(np.sum(v.conj() * (rho1 @ v), axis=0))
        q = np.real(np.sum(v.conj() * (rho2 @ v), axis=0))
        m1, m2 = lam @ p, lam @ q
        d1 = math.sqrt(max((lam - m1) ** 2 @ p, 0.0))
        d2 = math.sqrt(max((lam - m2) ** 2 @ q, 0.0))
        lam = _normalize(lam - (m1 * d2 + m2 * d1) / (d1 + d2))
    a = Observable((v * lam) @ v.conj().T)
    if math.isinf(score):
        return a, math.inf
    return a, bounds.snr(a, rho1, rho2)


def bloch_vector(rho) -> np.ndarray:
    rho = qcore.as_density(rho)
    if rho.shape != (2, 2):
        raise DimensionMismatchError("Bloch vectors are defined for qubits only")
    return np.array([qcore.expectation(s, rho) for s in (qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z)])


def brute_force_best_snr_dim2(rho1, rho2, resolution: int = 400) -> float:
    """Grid maximum of the SNR over qubit observables ``n . sigma``.

    Up to affine maps every qubit observable with distinct eigenvalues has
    this form, so the spherical grid (polar angle including both poles)
    covers the whole search space.  Indeterminate points count as 0.
    """
    if resolution < 2:
        raise ValidationError("resolution must be at least 2")
    r1, r2 = bloch_vector(rho1), bloch_vector(rho2)
    theta = np.linspace(0.0, math.pi, resolution)
    phi = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    n = np.stack([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t)], axis=-1)
    e1, e2 = n @ r1, n @ r2
    sig = np.abs(e1 - e2)
    nse = np.sqrt(np.clip(1 - e1**2, 0, None)) + np.sqrt(np.clip(1 - e2**2, 0, None))
    if np.any((nse < _INF_NOISE) & (sig > _INF_SIGNAL)):
        return math.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(nse < _INF_NOISE, 0.0, sig / nse)
    return float(np.max(ratio))
