"""Signal, noise and the fidelity-based upper bounds on detector SNR.

Extended reals (values that may be infinite or undefined) are ordinary
Python floats here: ``math.inf`` for an unbounded ratio and ``math.nan``
for the indeterminate 0/0 case.  :func:`extended_to_json` maps them to the
strings ``"inf"`` and ``"nan"`` for serialization.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import metrics, qcore
from .errors import (
    BoundaryCaseError,
    DegenerateError,
    DimensionMismatchError,
    SingularPointError,
    ValidationError,
)

ZERO_NOISE = 1e-14


class Observable:
    """Hermitian operator together with its cached spectral decomposition."""

    __slots__ = ("op", "spectrum")

    def __init__(self, op):
        if isinstance(op, Observable):
            op = op.op
        self.op = qcore.as_hermitian(op)
        self.spectrum = qcore.eig_hermitian(self.op)

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    def __repr__(self) -> str:
        return f"Observable(eigenvalues={np.array2string(self.eigenvalues, precision=6)})"


def as_observable(a) -> Observable:
    return a if isinstance(a, Observable) else Observable(a)


def _triple(a, rho1, rho2) -> tuple[Observable, np.ndarray, np.ndarray]:
    a = as_observable(a)
    rho1 = qcore.as_density(rho1)
    rho2 = qcore.as_density(rho2)
    if not (a.op.shape == rho1.shape == rho2.shape):
        raise DimensionMismatchError(
            f"observable {a.op.shape}, states {rho1.shape} and {rho2.shape}"
        )
    return a, rho1, rho2


def _centered_moment(op: np.ndarray, rho: np.ndarray, alpha: float) -> float:
    b = op - alpha * np.eye(op.shape[0])
    return max(qcore.expectation(b @ b, rho), 0.0)


def signal(a, rho1, rho2) -> float:
    """Absolute difference of the expectation values under the two states."""
    a, rho1, rho2 = _triple(a, rho1, rho2)
    return abs(qcore.expectation(a.op, rho1) - qcore.expectation(a.op, rho2))


def stddev(a, rho) -> float:
    a = as_observable(a)
    rho = qcore.as_density(rho)
    if a.op.shape != rho.shape:
        raise DimensionMismatchError(f"observable {a.op.shape} vs state {rho.shape}")
    mean = qcore.expectation(a.op, rho)
    return math.sqrt(_centered_moment(a.op, rho, mean))


def noise(a, rho1, rho2) -> float:
    a, rho1, rho2 = _triple(a, rho1, rho2)
    return stddev(a, rho1) + stddev(a, rho2)


def _ratio(s: float, n: float) -> float:
    if n < ZERO_NOISE:
        return math.inf if s > ZERO_NOISE else math.nan
    return s / n


def snr(a, rho1, rho2) -> float:
    """Signal over noise; ``inf`` for noiseless signal and ``nan`` for 0/0."""
    a, rho1, rho2 = _triple(a, rho1, rho2)
    return _ratio(signal(a, rho1, rho2), noise(a, rho1, rho2))


def snr_bound_from_fidelity(f: float) -> float:
    """``x / (1 - x)`` with ``x = sqrt(1 - F^2)``; decreasing in F, infinite at F = 0."""
    if not -1e-10 <= f <= 1 + 1e-10:
        raise ValidationError(f"fidelity {f!r} outside [0, 1]")
    f = min(max(f, 0.0), 1.0)
    x = math.sqrt((1.0 - f) * (1.0 + f))
    if x >= 1.0:
        return math.inf
    return x / (1.0 - x)


def second_moment_sum(a, rho1, rho2, alpha: float = 0.0) -> float:
    """``sqrt(Tr[(A - alpha)^2 rho1]) + sqrt(Tr[(A - alpha)^2 rho2])``.

    As a function of ``alpha`` this is the quantity minimized by
    :func:`optimal_shift`; at ``alpha = 0`` it is the bracket of the lemma.
    """
    a, rho1, rho2 = _triple(a, rho1, rho2)
    return math.sqrt(_centered_moment(a.op, rho1, alpha)) + math.sqrt(
        _centered_moment(a.op, rho2, alpha)
    )


def lemma_signal_bound(rho1, rho2, a) -> float:
    """Right-hand side of the signal bound, ``sqrt(1 - F^2) * second_moment_sum``.

    ``sqrt(2 - L_B^2) * L_B`` with the Bures distance ``L_B`` is evaluated in
    the equivalent form ``sqrt(1 - F^2)``.
    """
    a, rho1, rho2 = _triple(a, rho1, rho2)
    f = metrics.quantum_fidelity(rho1, rho2)
    return math.sqrt((1.0 - f) * (1.0 + f)) * second_moment_sum(a, rho1, rho2)


def optimal_shift(a, rho1, rho2) -> float:
    a, rho1, rho2 = _triple(a, rho1, rho2)
    d1, d2 = stddev(a, rho1), stddev(a, rho2)
    if d1 + d2 <= ZERO_NOISE:
        raise DegenerateError("both standard deviations vanish; the optimal shift is undefined")
    m1, m2 = qcore.expectation(a.op, rho1), qcore.expectation(a.op, rho2)
    return (m1 * d2 + m2 * d1) / (d1 + d2)


def shift_observable(a, alpha: float) -> Observable:
    """``A - alpha * I``; the eigenbasis is reused, not recomputed."""
    a = as_observable(a)
    shifted = Observable.__new__(Observable)
    shifted.op = qcore._frozen(a.op - alpha * np.eye(a.dim))
    w = np.array(a.eigenvalues - alpha)
    w.setflags(write=False)
    shifted.spectrum = qcore.SpectralDecomposition(w, a.eigenvectors)
    return shifted


def classical_signal_ratio(p, q, spectrum) -> float:
    """``(sum a_i (p_i - q_i))^2 / (sqrt(sum a_i^2 p_i) + sqrt(sum a_i^2 q_i))^2``.

    Returns 0 when both second moments vanish (the trivial case in which
    both amplitude vectors lie in the zero eigenspace).
    """
    p = metrics.as_distribution(p)
    q = metrics.as_distribution(q)
    a = np.asarray(spectrum, dtype=float).ravel()
    if not (p.shape == q.shape == a.shape):
        raise DimensionMismatchError("distributions and spectrum differ in length")
    den = math.sqrt(float(np.sum(a * a * p))) + math.sqrt(float(np.sum(a * a * q)))
    if den <= ZERO_NOISE:
        return 0.0
    return (float(np.sum(a * (p - q))) / den) ** 2


@dataclass(frozen=True)
class ReductionPoint:
    """Scalars ``(P, Q, b)`` of the two-dimensional reduction."""

    P: float
    Q: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.P <= 1.0 and 0.0 <= self.Q <= 1.0):
            raise ValidationError(f"P and Q must lie in [0, 1], got {self.P}, {self.Q}")
        if not -1.0 <= self.b <= 1.0:
            raise ValidationError(f"b must lie in [-1, 1], got {self.b}")


def g_function(rp: ReductionPoint) -> float:
    P, Q, b = rp.P, rp.Q, rp.b
    den = math.sqrt(P + b * b * (1 - P)) + math.sqrt(Q + b * b * (1 - Q))
    if den <= ZERO_NOISE:
        raise SingularPointError(f"g is singular at P={P}, Q={Q}, b={b}")
    return (1 - b) ** 2 * (P - Q) ** 2 / den**2


def b_star(P: float, Q: float) -> float:
    """Non-trivial stationary point of ``g`` in ``b`` for fixed ``P, Q < 1``."""
    if P >= 1.0 or Q >= 1.0:
        raise BoundaryCaseError("b* is undefined for P = 1 or Q = 1; evaluate g at b = -1 instead")
    if P < 0.0 or Q < 0.0:
        raise ValidationError(f"P and Q must be non-negative, got {P}, {Q}")
    b = -math.sqrt(P * Q / ((1 - P) * (1 - Q)))
    # |b*| <= 1 exactly when P + Q <= 1; keep rounding on that edge inside [-1, 1]
    return max(b, -1.0) if P + Q <= 1.0 else b


def g_maximum(P: float, Q: float) -> float:
    """Closed-form maximum of ``g`` over ``b`` in [-1, 1].

    ``1 - (sqrt(PQ) + sqrt((1-P)(1-Q)))^2`` at ``b*`` when ``P + Q <= 1``,
    otherwise ``(P - Q)^2`` at ``b = -1``.
    """
    if P + Q <= 1.0:
        return 1.0 - (math.sqrt(P * Q) + math.sqrt((1 - P) * (1 - Q))) ** 2
    return (P - Q) ** 2


@dataclass(frozen=True)
class BoundReport:
    signal: float
    noise: float
    snr: float
    fidelity_states: float
    bures_states: float
    lemma_rhs: float
    snr_bound: float
    slack_lemma: float
    slack_snr: float
    stddev1: float
    stddev2: float

    def to_dict(self) -> dict:
        return {k: extended_to_json(v) for k, v in asdict(self).items()}


def extended_to_json(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def extended_from_json(x) -> float:
    # float() already accepts "inf", "-inf" and "nan"
    return float(x)


def _snr_slack(bound: float, ratio: float) -> float:
    if math.isnan(ratio):
        return math.nan
    if math.isinf(ratio):
        return math.nan if math.isinf(bound) else -math.inf
    return bound - ratio


def analyze(a, rho1, rho2) -> BoundReport:
    """Every scalar diagnostic for one (observable, state, state) triple.

    ``slack_snr`` is ``nan`` when the SNR itself is indeterminate or both
    the SNR and its bound are infinite, and ``-inf`` if a noiseless signal
    meets a finite bound (a violation).
    """
    a, rho1, rho2 = _triple(a, rho1, rho2)
    s = signal(a, rho1, rho2)
    d1, d2 = stddev(a, rho1), stddev(a, rho2)
    ratio = _ratio(s, d1 + d2)
    f = metrics.quantum_fidelity(rho1, rho2)
    lemma = math.sqrt((1.0 - f) * (1.0 + f)) * second_moment_sum(a, rho1, rho2)
    bound = snr_bound_from_fidelity(f)
    return BoundReport(
        signal=s,
        noise=d1 + d2,
        snr=ratio,
        fidelity_states=f,
        bures_states=math.sqrt(1.0 - f),
        lemma_rhs=lemma,
        snr_bound=bound,
        slack_lemma=lemma - s,
        slack_snr=_snr_slack(bound, ratio),
        stddev1=d1,
        stddev2=d2,
    )
