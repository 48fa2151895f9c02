import numpy as np
import pytest

from qchaos import core, spectral


class SpectrumStore:
    """Diagonalizations shared across the session, keyed by (nmax, eps)."""

    def __init__(self):
        self._bases = {}
        self._results = {}

    def basis(self, nmax):
        if nmax not in self._bases:
            self._bases[nmax] = core.enumerate_basis(nmax)
        return self._bases[nmax]

    def __call__(self, nmax, eps):
        key = (nmax, eps)
        if key not in self._results:
            basis = self.basis(nmax)
            H = core.assemble_hamiltonian(basis, core.ModelParams(eps))
            self._results[key] = spectral.diagonalize(H, eps, nmax)
        return self._results[key], self.basis(nmax)


@pytest.fixture(scope="session")
def spectra():
    return SpectrumStore()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
