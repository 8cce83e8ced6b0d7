"""Coherent-state bounds, switching power bounds and fidelity estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln
from scipy.stats import poisson

from . import bounds, metrics, qcore
from .errors import DegenerateError, DimensionMismatchError, TruncationError, ValidationError

TAIL_TOL = 1e-6
DEFAULT_TAIL = 1e-10


def default_truncation(nbar: float, tail: float = DEFAULT_TAIL) -> int:
    """Smallest Fock dimension whose Poisson(nbar) tail mass is below ``tail``."""
    # poisson.sf(n - 1) is the mass at photon numbers >= n
    n = 2
    while poisson.sf(n - 1, nbar) >= tail:
        n += 1
    return n


@dataclass(frozen=True)
class CoherentSpec:
    """Single-mode stand-in for a coherent field: mean photon number and Fock cutoff."""

    nbar: float
    truncation_dim: int | None = None

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValidationError(f"nbar must be non-negative, got {self.nbar}")
        if self.truncation_dim is None:
            object.__setattr__(self, "truncation_dim", default_truncation(self.nbar))
        elif self.truncation_dim < 2:
            raise ValidationError("truncation_dim must be at least 2")


def coherent_fidelity(spec: CoherentSpec) -> float:
    """Closed-form overlap ``|<0|alpha>| = exp(-nbar / 2)``."""
    return math.exp(-spec.nbar / 2)


def coherent_amplitudes(spec: CoherentSpec) -> np.ndarray:
    """Un-renormalized Fock amplitudes ``exp(-nbar/2) nbar^(n/2) / sqrt(n!)``, phase 0."""
    n = np.arange(spec.truncation_dim)
    if spec.nbar == 0:
        return (n == 0).astype(float)
    log_amp = -spec.nbar / 2 + n * math.log(spec.nbar) / 2 - gammaln(n + 1) / 2
    return np.exp(log_amp)


def truncated_coherent_state(spec: CoherentSpec) -> np.ndarray:
    amp = coherent_amplitudes(spec)
    tail = 1.0 - float(amp @ amp)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"truncation {spec.truncation_dim} drops probability {tail:.3g} for nbar={spec.nbar}"
        )
    return qcore.ket_to_density(amp)


def truncated_vacuum_fidelity(spec: CoherentSpec) -> float:
    """Fidelity between the truncated coherent state and vacuum, computed numerically."""
    vac = np.zeros((spec.truncation_dim, spec.truncation_dim), dtype=complex)
    vac[0, 0] = 1.0
    return metrics.quantum_fidelity(vac, truncated_coherent_state(spec))


def coherent_snr_bound(spec: CoherentSpec, variant: str = "eq3") -> float:
    """SNR bound for vacuum versus a coherent state of mean photon number ``nbar``.

    ``eq3`` is the general bound evaluated at ``F = exp(-nbar/2)``, i.e.
    ``x / (1 - x)`` with ``x = sqrt(1 - exp(-nbar))``.  ``as_printed`` keeps
    the extra factor 2 of the published closed form, ``2x / (1 - x)``.
    """
    if variant not in ("eq3", "as_printed"):
        raise ValueError(f"unknown variant {variant!r}")
    x = math.sqrt(-math.expm1(-spec.nbar))
    num = 2 * x if variant == "as_printed" else x
    if x >= 1.0:
        return math.inf
    return num / (1.0 - x)


@dataclass(frozen=True)
class SwitchingSystem:
    """Target T and control C; joint operators are ordered T-major (``H_T (x) I_C``)."""

    h_t: np.ndarray
    h_c: np.ndarray
    v_ct: np.ndarray
    rho_t0: np.ndarray
    rho_c_on: np.ndarray
    rho_c_off: np.ndarray
    tau: float = 1e-4

    def __post_init__(self):
        for name in ("h_t", "h_c", "v_ct"):
            object.__setattr__(self, name, qcore.as_hermitian(getattr(self, name)))
        for name in ("rho_t0", "rho_c_on", "rho_c_off"):
            object.__setattr__(self, name, qcore.as_density(getattr(self, name)))
        dt, dc = self.dim_t, self.dim_c
        if self.rho_t0.shape[0] != dt:
            raise DimensionMismatchError(f"rho_t0 has size {self.rho_t0.shape[0]}, H_T has {dt}")
        if self.rho_c_on.shape[0] != dc or self.rho_c_off.shape[0] != dc:
            raise DimensionMismatchError("control states do not match H_C")
        if self.v_ct.shape[0] != dt * dc:
            raise DimensionMismatchError(f"V_CT has size {self.v_ct.shape[0]}, expected {dt * dc}")
        if not self.tau > 0:
            raise ValidationError("tau must be positive")

    @property
    def dim_t(self) -> int:
        return self.h_t.shape[0]

    @property
    def dim_c(self) -> int:
        return self.h_c.shape[0]

    def joint_state(self, which: str) -> np.ndarray:
        rho_c = {"on": self.rho_c_on, "off": self.rho_c_off}[which]
        return qcore.tensor(self.rho_t0, rho_c)

    def hamiltonian(self) -> np.ndarray:
        return (
            qcore.tensor(self.h_t, np.eye(self.dim_c))
            + qcore.tensor(np.eye(self.dim_t), self.h_c)
            + self.v_ct
        )


def switching_observable(sys: SwitchingSystem) -> bounds.Observable:
    """``-i [H_T (x) I_C, V_CT]``, the rate of change of the target energy."""
    ht = qcore.tensor(sys.h_t, np.eye(sys.dim_c))
    return bounds.Observable(-1j * qcore.commutator(ht, sys.v_ct))


def switching_power(sys: SwitchingSystem) -> float:
    """First-order power ``-i Tr([H_T (x) I_C, V_CT] rho_T(0) (x) (rho_on - rho_off))``."""
    a = switching_observable(sys)
    return qcore.expectation(a.op, sys.joint_state("on")) - qcore.expectation(
        a.op, sys.joint_state("off")
    )


def switching_power_bound(sys: SwitchingSystem) -> float:
    """Fidelity bound on ``|P|`` from the control-state fidelity and the observable's spreads.

    Infinite whenever the control states are orthogonal.
    """
    a = switching_observable(sys)
    prefactor = bounds.snr_bound_from_fidelity(metrics.quantum_fidelity(sys.rho_c_on, sys.rho_c_off))
    if math.isinf(prefactor):
        return math.inf
    return prefactor * bounds.noise(a, sys.joint_state("on"), sys.joint_state("off"))


def finite_difference_power(sys: SwitchingSystem, tau: float | None = None) -> float:
    """Energy change of T per unit time from exact evolution, on minus off.

    ``(Tr[H_T (rho_T(tau) - rho_T(0))]_on - (same)_off) / tau`` with the full
    Hamiltonian; it converges to :func:`switching_power` as ``tau -> 0``.
    """
    tau = sys.tau if tau is None else tau
    u = expm(-1j * tau * sys.hamiltonian())
    ht = qcore.tensor(sys.h_t, np.eye(sys.dim_c))
    delta = 0.0
    for which, sgn in (("on", 1.0), ("off", -1.0)):
        rho = sys.joint_state(which)
        evolved = u @ rho @ u.conj().T
        delta += sgn * float(np.real(np.sum(ht * (evolved - rho).T)))
    return delta / tau


def random_switching_system(dim_t: int, dim_c: int, seed: int, tau: float = 1e-4) -> SwitchingSystem:
    rng = np.random.default_rng(seed)
    s = [int(x) for x in rng.integers(0, 2**63 - 1, size=6)]
    return SwitchingSystem(
        h_t=qcore.random_hermitian(dim_t, s[0]),
        h_c=qcore.random_hermitian(dim_c, s[1]),
        v_ct=qcore.random_hermitian(dim_t * dim_c, s[2]),
        rho_t0=qcore.random_density(dim_t, dim_t, s[3]),
        rho_c_on=qcore.random_density(dim_c, dim_c, s[4]),
        rho_c_off=qcore.random_density(dim_c, dim_c, s[5]),
        tau=tau,
    )


def fidelity_upper_bound_from_snr(a, rho1, rho2) -> float:
    """``1 - (S / (sqrt(Tr[A^2 rho1]) + sqrt(Tr[A^2 rho2])))^2``, an upper bound on F^2."""
    a, rho1, rho2 = bounds._triple(a, rho1, rho2)
    den = bounds.second_moment_sum(a, rho1, rho2)
    if den <= bounds.ZERO_NOISE:
        raise DegenerateError("both second moments vanish")
    ratio = bounds.signal(a, rho1, rho2) / den
    return min(max(1.0 - ratio * ratio, 0.0), 1.0)


@dataclass(frozen=True)
class FidelityComparison:
    snr_based: float
    superfidelity: float
    true_f2: float
    tighter: str

    def to_dict(self) -> dict:
        return {
            "snr_based": self.snr_based,
            "superfidelity": self.superfidelity,
            "true_f2": self.true_f2,
            "tighter": self.tighter,
        }


TIE_TOL = 1e-12


def compare_fidelity_bounds(a, rho1, rho2) -> FidelityComparison:
    snr_based = fidelity_upper_bound_from_snr(a, rho1, rho2)
    sf = metrics.superfidelity_bound(rho1, rho2)
    f = metrics.quantum_fidelity(rho1, rho2)
    if abs(snr_based - sf) <= TIE_TOL:
        tighter = "tie"
    elif snr_based < sf:
        tighter = "snr_based"
    else:
        tighter = "superfidelity"
    return FidelityComparison(snr_based, sf, f * f, tighter)
