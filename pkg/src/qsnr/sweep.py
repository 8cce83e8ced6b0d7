"""Seeded randomized verification of the inequality family.

Each instance ``i`` at dimension ``d`` draws its randomness from
``default_rng([base_seed + i, d])``.  Every fifth instance is an
*equality* instance: a rotated, zero-padded copy of the non-commuting
qubit example (which meets the signal bound with equality), paired with
product states and SWAP channels that leave fidelity exactly unchanged.
Those keep the sweep honest near the boundary where float noise can
decide the sign of a slack.

For each relation the report records the largest excess ``lhs - rhs``
seen; a violation is an excess above the tolerance.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import applications, attainment, bounds, metrics, qcore
from .errors import DegenerateError, ValidationError

ALL_CHECKS = ("lemma", "snr", "monotonicity", "classical", "fidelity_bounds")
EQUALITY_PERIOD = 5


@dataclass(frozen=True)
class SweepConfig:
    dims: tuple[int, ...] = (2, 3, 4)
    instances_per_dim: int = 100
    base_seed: int = 0
    tolerance: float = 1e-9
    checks: tuple[str, ...] = ALL_CHECKS

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "checks", tuple(self.checks))
        if not self.dims or any(d < 2 for d in self.dims):
            raise ValidationError("dims must be a non-empty list of integers >= 2")
        if self.instances_per_dim < 1:
            raise ValidationError("instances_per_dim must be positive")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        unknown = set(self.checks) - set(ALL_CHECKS)
        if not self.checks or unknown:
            raise ValidationError(f"checks must be a non-empty subset of {ALL_CHECKS}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        d["checks"] = list(self.checks)
        return d


@dataclass
class RelationStats:
    instances: int = 0
    violations: int = 0
    max_excess: float = -math.inf
    worst_seed: int | None = None
    worst_dim: int | None = None
    excluded: int = 0

    def record(self, excess: float, tol: float, seed: int, dim: int) -> None:
        if math.isnan(excess):
            self.excluded += 1
            return
        self.instances += 1
        if excess > tol:
            self.violations += 1
        if excess > self.max_excess:
            self.max_excess, self.worst_seed, self.worst_dim = excess, seed, dim

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "violations": self.violations,
            "max_violation": bounds.extended_to_json(max(self.max_excess, 0.0)),
            "max_excess": bounds.extended_to_json(self.max_excess),
            "worst_seed": self.worst_seed,
            "worst_dim": self.worst_dim,
            "excluded": self.excluded,
        }


@dataclass
class Instance:
    seed: int
    dim: int
    equality: bool
    rho1: np.ndarray
    rho2: np.ndarray
    observable: bounds.Observable
    rng: np.random.Generator = field(repr=False)

    def subseed(self) -> int:
        return int(self.rng.integers(0, 2**63 - 1))


def _embed(m: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    out[: m.shape[0], : m.shape[1]] = m
    return out


def make_instance(dim: int, index: int, base_seed: int = 0) -> Instance:
    seed = base_seed + index
    rng = np.random.default_rng([seed, dim])
    equality = index % EQUALITY_PERIOD == EQUALITY_PERIOD - 1
    if equality:
        p = float(rng.uniform())
        sign = 1 if rng.uniform() < 0.5 else -1
        r1, r2, a = attainment.qubit_example(p, sign)
        u = qcore.random_unitary(dim, int(rng.integers(0, 2**63 - 1)))
        pad = np.diag(np.concatenate([[0.0, 0.0], rng.uniform(-2, 2, dim - 2)]))
        a_full = _embed(a.op, dim) + pad
        rot = lambda m: u @ m @ u.conj().T  # noqa: E731
        rho1 = qcore.as_density(rot(_embed(r1, dim)))
        rho2 = qcore.as_density(rot(_embed(r2, dim)))
        obs = bounds.Observable(rot(a_full))
    else:
        s = [int(x) for x in rng.integers(0, 2**63 - 1, size=3)]
        rank1, rank2 = (int(r) for r in rng.integers(1, dim + 1, size=2))
        rho1 = qcore.random_density(dim, rank1, s[0])
        rho2 = qcore.random_density(dim, rank2, s[1])
        obs = bounds.Observable(qcore.random_hermitian(dim, s[2]))
    return Instance(seed, dim, equality, rho1, rho2, obs, rng)


def _lemma(inst: Instance, f: float) -> dict[str, float]:
    s = bounds.signal(inst.observable, inst.rho1, inst.rho2)
    rhs = math.sqrt((1 - f) * (1 + f)) * bounds.second_moment_sum(inst.observable, inst.rho1, inst.rho2)
    return {"signal_bound": s - rhs}


def _snr_excess(ratio: float, bound: float) -> float:
    if math.isnan(ratio):
        return math.nan
    if math.isinf(ratio):
        return math.nan if math.isinf(bound) else math.inf
    if math.isinf(bound):
        return -math.inf
    return ratio - bound


def _snr(inst: Instance, f: float, model: attainment.DetectionModel, src) -> dict[str, float]:
    out = {"snr_bound": _snr_excess(bounds.snr(inst.observable, inst.rho1, inst.rho2),
                                    bounds.snr_bound_from_fidelity(f))}
    d1, d2 = (attainment.apply_detection(model, r) for r in src)
    f_src = metrics.quantum_fidelity(*src)
    out["composition"] = _snr_excess(bounds.snr(inst.observable, d1, d2),
                                     bounds.snr_bound_from_fidelity(f_src))
    return out


def _sources(inst: Instance) -> tuple[attainment.DetectionModel, tuple[np.ndarray, np.ndarray]]:
    """Detection model onto dimension ``inst.dim`` and a pair of source states."""
    if inst.equality:
        d = inst.dim
        model = attainment.DetectionModel(
            attainment.swap_operator(d), qcore.random_density(d, 1, inst.subseed()), d, d
        )
        return model, (inst.rho1, inst.rho2)
    model = attainment.random_detection_model(2, inst.dim, inst.subseed())
    src = tuple(qcore.random_density(2, 1 + inst.subseed() % 2, inst.subseed()) for _ in range(2))
    return model, src


def _monotonicity(inst: Instance, model, src) -> dict[str, float]:
    d = inst.dim
    if inst.equality:
        tau = qcore.random_density(2, 1 + inst.subseed() % 2, inst.subseed())
        s1, s2 = qcore.tensor(inst.rho1, tau), qcore.tensor(inst.rho2, tau)
    else:
        s1, s2 = (qcore.random_density(2 * d, 1 + inst.subseed() % (2 * d), inst.subseed()) for _ in range(2))
    f_joint = metrics.quantum_fidelity(s1, s2)
    f_red = metrics.quantum_fidelity(
        qcore.partial_trace(s1, d, 2, "A"), qcore.partial_trace(s2, d, 2, "A")
    )
    f_src = metrics.quantum_fidelity(*src)
    f_det = metrics.quantum_fidelity(*(attainment.apply_detection(model, r) for r in src))
    return {"partial_trace": f_joint - f_red, "detection_channel": f_src - f_det}


def _classical(inst: Instance, f: float) -> dict[str, float]:
    p = metrics.born_distribution(inst.rho1, inst.observable)
    q = metrics.born_distribution(inst.rho2, inst.observable)
    fc = metrics.classical_fidelity(p, q)
    ratio = bounds.classical_signal_ratio(p, q, inst.observable.eigenvalues)
    return {"distribution": ratio - (1 - fc * fc), "quantum_domination": f - fc}


def _fidelity_bounds(inst: Instance, tally: dict[str, int]) -> dict[str, float]:
    try:
        cmp = applications.compare_fidelity_bounds(inst.observable, inst.rho1, inst.rho2)
    except DegenerateError:
        return {"snr_based": math.nan, "superfidelity": math.nan}
    tally[cmp.tighter] += 1
    return {"snr_based": cmp.true_f2 - cmp.snr_based, "superfidelity": cmp.true_f2 - cmp.superfidelity}


def run_sweep(cfg: SweepConfig, timestamp: bool = True) -> dict:
    t0 = time.perf_counter()
    stats: dict[str, dict[str, RelationStats]] = {c: {} for c in cfg.checks}
    tally = {"snr_based": 0, "superfidelity": 0, "tie": 0}
    for dim in cfg.dims:
        for i in range(cfg.instances_per_dim):
            inst = make_instance(dim, i, cfg.base_seed)
            f = metrics.quantum_fidelity(inst.rho1, inst.rho2)
            results: dict[str, dict[str, float]] = {}
            model = src = None
            if "snr" in cfg.checks or "monotonicity" in cfg.checks:
                model, src = _sources(inst)
            if "lemma" in cfg.checks:
                results["lemma"] = _lemma(inst, f)
            if "snr" in cfg.checks:
                results["snr"] = _snr(inst, f, model, src)
            if "monotonicity" in cfg.checks:
                results["monotonicity"] = _monotonicity(inst, model, src)
            if "classical" in cfg.checks:
                results["classical"] = _classical(inst, f)
            if "fidelity_bounds" in cfg.checks:
                results["fidelity_bounds"] = _fidelity_bounds(inst, tally)
            for check, rel in results.items():
                for name, excess in rel.items():
                    stats[check].setdefault(name, RelationStats()).record(
                        excess, cfg.tolerance, inst.seed, dim
                    )
    checks = {c: {name: st.to_dict() for name, st in rels.items()} for c, rels in stats.items()}
    if "fidelity_bounds" in checks:
        checks["fidelity_bounds"]["tighter_counts"] = tally
    report = {
        "config": cfg.to_dict(),
        "checks": checks,
        "total_violations": sum(st.violations for rels in stats.values() for st in rels.values()),
    }
    if timestamp:
        report["wall_time_s"] = time.perf_counter() - t0
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return report
