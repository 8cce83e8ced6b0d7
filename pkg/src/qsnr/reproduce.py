"""Named reproductions of the worked examples, reported line by line."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import applications, attainment, bounds, metrics, qcore
from .errors import QSNRError

EXAMPLES = ("oscillator", "qubit", "fidelity3x3", "coherent", "switching")


class UnknownExampleError(QSNRError, KeyError):
    pass


def _line(quantity: str, computed, expected, tol: float | None = None, ok: bool | None = None) -> dict:
    if ok is None:
        ok = abs(computed - expected) <= tol
    return {
        "quantity": quantity,
        "computed": bounds.extended_to_json(computed) if isinstance(computed, float) else computed,
        "expected": bounds.extended_to_json(expected) if isinstance(expected, float) else expected,
        "tolerance": tol,
        "pass": bool(ok),
    }


def _equality_lines(rho1, rho2, a) -> list[dict]:
    s = bounds.signal(a, rho1, rho2)
    rhs = bounds.lemma_signal_bound(rho1, rho2, a)
    return [
        _line("signal", s, rhs, 1e-10),
        _line("equality_slack", abs(rhs - s), 0.0, 1e-10),
    ]


def oscillator(theta: float = math.pi / 6, omega: float = 1.0) -> dict:
    rho1, rho2, a = attainment.oscillator_example(theta, omega)
    lines = _equality_lines(rho1, rho2, a)
    lines.append(_line("signal_closed_form", bounds.signal(a, rho1, rho2), omega * abs(math.cos(2 * theta)), 1e-12))
    lines.append(_line("fidelity_closed_form", metrics.quantum_fidelity(rho1, rho2), abs(math.sin(2 * theta)), 1e-10))
    identical = bool(np.linalg.norm(rho1 - rho2) <= 1e-12)
    notes = ["identical states: signal and bound both vanish"] if identical else []
    return {"params": {"theta": theta, "omega": omega}, "degenerate": identical, "lines": lines, "notes": notes}


def qubit(p: float = 0.3, sign: int = 1) -> dict:
    rho1, rho2, a = attainment.qubit_example(p, sign)
    lines = _equality_lines(rho1, rho2, a)
    lines.append(_line("signal_closed_form", bounds.signal(a, rho1, rho2), 1.0, 1e-12))
    lines.append(_line("fidelity_closed_form", metrics.quantum_fidelity(rho1, rho2), math.sqrt(0.5), 1e-10))
    return {"params": {"p": p, "sign": sign}, "lines": lines, "notes": []}


def fidelity3x3_triple():
    rho1 = np.diag([1 / 2, 1 / 6, 1 / 3]).astype(complex)
    rho2 = np.diag([1 / 3, 1 / 6, 1 / 2]).astype(complex)
    a = bounds.Observable(np.diag([-1.0, 0.0, 1.0]))
    return qcore.as_density(rho1), qcore.as_density(rho2), a


def fidelity3x3() -> dict:
    rho1, rho2, a = fidelity3x3_triple()
    cmp = applications.compare_fidelity_bounds(a, rho1, rho2)
    lines = [
        _line("signal", bounds.signal(a, rho1, rho2), 1 / 3, 1e-12),
        _line("snr_based_bound", cmp.snr_based, float(Fraction(29, 30)), 1e-12),
        _line("superfidelity_bound", cmp.superfidelity, float(Fraction(35, 36)), 1e-12),
        _line("true_f2_below_both", cmp.true_f2, min(cmp.snr_based, cmp.superfidelity), None,
              ok=cmp.true_f2 <= min(cmp.snr_based, cmp.superfidelity) + 1e-9),
        _line("tighter", cmp.tighter, "snr_based", None, ok=cmp.tighter == "snr_based"),
    ]
    return {"params": {}, "comparison": cmp.to_dict(), "lines": lines,
            "notes": [f"{cmp.tighter} tighter"]}


def coherent(nbar: float = 1e-4, truncation_dim: int | None = None) -> dict:
    spec = applications.CoherentSpec(nbar, truncation_dim)
    x = math.sqrt(-math.expm1(-nbar))
    eq3 = applications.coherent_snr_bound(spec, "eq3")
    printed = applications.coherent_snr_bound(spec, "as_printed")
    lines = [
        _line("fidelity_vs_truncated", applications.coherent_fidelity(spec),
              applications.truncated_vacuum_fidelity(spec), 1e-8),
        _line("eq3_vs_general_bound", eq3,
              bounds.snr_bound_from_fidelity(applications.coherent_fidelity(spec)), 1e-12),
    ]
    if not math.isinf(eq3):
        lines.append(_line("eq3_identity", eq3 * (1 - x), x, 1e-12))
        lines.append(_line("as_printed_identity", printed * (1 - x), 2 * x, 1e-12))
    if 0 < nbar <= 1e-3:
        lines.append(_line("small_amplitude_ratio", printed / (2 * math.sqrt(nbar)), 1.0, 0.02))
    return {
        "params": {"nbar": nbar, "truncation_dim": spec.truncation_dim},
        "bounds": {"eq3": bounds.extended_to_json(eq3), "as_printed": bounds.extended_to_json(printed)},
        "lines": lines,
        "notes": ["as_printed keeps the published factor 2; eq3 is the general bound at F = exp(-nbar/2)"],
    }


def fixed_switching_system(tau: float = 1e-5) -> applications.SwitchingSystem:
    return applications.SwitchingSystem(
        h_t=qcore.SIGMA_Z,
        h_c=np.zeros((2, 2)),
        v_ct=qcore.tensor(qcore.SIGMA_X, qcore.SIGMA_X),
        rho_t0=np.diag([1.0, 0.0]),
        rho_c_on=np.diag([1.0, 0.0]),
        rho_c_off=np.eye(2) / 2,
        tau=tau,
    )


def switching_lines(sys: applications.SwitchingSystem, tau: float = 1e-4) -> list[dict]:
    p = applications.switching_power(sys)
    bound = applications.switching_power_bound(sys)
    e1 = abs(p - applications.finite_difference_power(sys, tau))
    e2 = abs(p - applications.finite_difference_power(sys, tau / 2))
    ratio = e1 / e2 if e2 > 0 else math.nan
    return [
        _line("power_within_bound", abs(p), bound, None, ok=abs(p) <= bound + 1e-9),
        _line("first_order_error_ratio", ratio, 2.0, 0.5),
    ]


def switching(seed: int = 0) -> dict:
    sys = applications.random_switching_system(2, 2, seed)
    lines = switching_lines(sys)
    fixed = fixed_switching_system()
    p0 = applications.switching_power(fixed)
    fd = applications.finite_difference_power(fixed)
    lines.append(_line("fixed_system_power_vs_finite_difference", p0, fd, 1e-3 * max(abs(p0), 1.0)))
    return {
        "params": {"seed": seed},
        "power": applications.switching_power(sys),
        "bound": bounds.extended_to_json(applications.switching_power_bound(sys)),
        "lines": lines,
        "notes": [],
    }


def run_example(name: str, **params) -> dict:
    table = {
        "oscillator": oscillator,
        "qubit": qubit,
        "fidelity3x3": fidelity3x3,
        "coherent": coherent,
        "switching": switching,
    }
    if name not in table:
        raise UnknownExampleError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    out = table[name](**params)
    out = {"example": name, **out}
    out["pass"] = all(line["pass"] for line in out["lines"])
    return out
