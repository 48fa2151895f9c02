"""Quantum and classical dynamics of two hard-core particles with unequal masses in a 1D box."""

from .atlas import Resonance, enumerate_resonances, m_max, post_select, resonance_line, thresholds
from .core import ModelParams, UnperturbedState, assemble_hamiltonian, enumerate_basis, matrix_element_exact
from .errors import QChaosError
from .spectral import SpectralResult, diagonalize, ipr_map, level_statistics, overlap_map

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "QChaosError",
    "Resonance",
    "SpectralResult",
    "UnperturbedState",
    "assemble_hamiltonian",
    "diagonalize",
    "enumerate_basis",
    "enumerate_resonances",
    "ipr_map",
    "level_statistics",
    "m_max",
    "matrix_element_exact",
    "overlap_map",
    "post_select",
    "resonance_line",
    "thresholds",
]
