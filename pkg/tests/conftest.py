import numpy as np
import pytest

from lindblad_skin.model import HamiltonianSpec, JumpOperatorSpec, ModelSpec, SshParams


def random_model(rng, n_modes: int, n_jumps: int = 2, number_conserving: bool = False) -> ModelSpec:
    h = rng.normal(size=(n_modes, n_modes)) + 1j * rng.normal(size=(n_modes, n_modes))
    h = (h + h.conj().T) / 2
    jumps = []
    for i in range(n_jumps):
        cm = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
        cp = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
        if number_conserving:
            if i % 2:
                cm = np.zeros(n_modes)
            else:
                cp = np.zeros(n_modes)
        jumps.append(JumpOperatorSpec(0.5 * cm, 0.5 * cp))
    return ModelSpec(HamiltonianSpec(h), tuple(jumps))


def random_ssh_params(rng, n_cells: int = 2) -> SshParams:
    return SshParams(n_cells=n_cells, t1=rng.uniform(-1.5, 1.5), t2=rng.uniform(0.5, 1.5),
                     gamma_l=rng.uniform(0, 0.6), gamma_g=rng.uniform(0, 0.6),
                     theta=rng.uniform(0, np.pi), phi=rng.uniform(-np.pi, np.pi),
                     theta_p=rng.uniform(0, np.pi), phi_p=rng.uniform(-np.pi, np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def standard_params():
    """Chain of the chiral-damping runs: t1 = 0.8, gamma_l = gamma_g = 0.2."""
    return SshParams(n_cells=20, t1=0.8, gamma_l=0.2, gamma_g=0.2)


_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert on it."""

    def record(label: str, ok: bool, detail: str):
        line = f"{label} {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE[label] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for label in sorted(_ACCEPTANCE, key=lambda s: (int(s[1:].rstrip("ab")), s)):
            terminalreporter.write_line(_ACCEPTANCE[label])
