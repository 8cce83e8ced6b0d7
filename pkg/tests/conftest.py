import numpy as np
import pytest

from qsnr import qcore

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a pass/fail line for an acceptance criterion."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        _CRITERIA[name] = (bool(ok), detail)
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split()[0])):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}  {detail}")


@pytest.fixture
def three_level_triple():
    rho1 = np.diag([1 / 2, 1 / 6, 1 / 3]).astype(complex)
    rho2 = np.diag([1 / 3, 1 / 6, 1 / 2]).astype(complex)
    a = np.diag([-1.0, 0.0, 1.0])
    return rho1, rho2, a


def random_triple(dim, seed):
    rng = np.random.default_rng(seed)
    s = rng.integers(0, 2**63 - 1, size=3)
    r1, r2 = (int(r) for r in rng.integers(1, dim + 1, size=2))
    return (
        qcore.random_density(dim, r1, int(s[0])),
        qcore.random_density(dim, r2, int(s[1])),
        qcore.random_hermitian(dim, int(s[2])),
    )
