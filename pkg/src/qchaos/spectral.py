"""Exact diagonalization and spectral diagnostics.

Eigenvectors are stored as columns in the unperturbed basis order, so
``vectors[i, lam] = <lam|(n1, n2)_i>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import atlas
from .core import Basis, as_state
from .errors import BandError, InvalidArgumentError, SolverError


@dataclass(frozen=True)
class SpectralResult:
    eps: float
    nmax: int | None
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    def __len__(self):
        return len(self.eigenvalues)

    def diagnostics(self, H: np.ndarray) -> dict[str, float]:
        """Worst residual (relative to ||H||_F), orthonormality and trace errors."""
        E, U = self.eigenvalues, self.eigenvectors
        fro = np.linalg.norm(H)
        resid = np.linalg.norm(H @ U - U * E, axis=0).max()
        ortho = np.abs(U.T @ U - np.eye(len(E))).max()
        tr = np.trace(H)
        return {
            "residual": float(resid / fro) if fro else float(resid),
            "orthonormality": float(ortho),
            "trace": float(abs(E.sum() - tr) / max(abs(tr), 1.0)),
        }


def fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip columns so that each one's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(U), axis=0)
    sign = np.sign(U[idx, np.arange(U.shape[1])])
    sign[sign == 0] = 1.0
    return U * sign


def diagonalize(H: np.ndarray, eps: float = math.nan, nmax: int | None = None) -> SpectralResult:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidArgumentError("matrix has non-finite entries")
    if not np.array_equal(H, H.T):
        raise InvalidArgumentError("matrix is not symmetric")
    try:
        E, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"dense symmetric eigensolver failed for n={H.shape[0]}: {exc}") from exc
    return SpectralResult(eps, nmax, E, fix_signs(U))


@dataclass(frozen=True)
class IprMap:
    n1: np.ndarray
    n2: np.ndarray
    inverse_purity: np.ndarray

    def grid(self, nmax: int) -> np.ndarray:
        """(nmax+1, nmax+1) array indexed [n1, n2], NaN off the basis."""
        g = np.full((nmax + 1, nmax + 1), np.nan)
        g[self.n1, self.n2] = self.inverse_purity
        return g


def inverse_purity(overlaps: np.ndarray) -> np.ndarray:
    """(sum_lam |c_lam|^4)^-1 along the last axis."""
    c2 = np.abs(overlaps) ** 2
    return 1.0 / np.sum(c2 * c2, axis=-1)


def ipr_map(result: SpectralResult, basis: Basis) -> IprMap:
    if not result.eps > 0:
        raise InvalidArgumentError("inverse purity is undefined at eps = 0 (degenerate levels)")
    return IprMap(basis.n1, basis.n2, inverse_purity(result.eigenvectors))


@dataclass(frozen=True)
class OverlapMap:
    n1: np.ndarray
    n2: np.ndarray
    overlap: np.ndarray
    eigen_index: int
    energy: float

    @property
    def max_value(self) -> float:
        return float(self.overlap.max())


def overlap_map(result: SpectralResult, basis: Basis, anchor) -> OverlapMap:
    """Weights of every unperturbed state in the eigenstate that best contains ``anchor``."""
    anchor = as_state(anchor)
    if anchor not in basis:
        raise InvalidArgumentError(f"anchor {anchor} not in basis (nmax={basis.nmax})")
    row = result.eigenvectors[basis.position(anchor)]
    lam = int(np.argmax(np.abs(row)))
    w = result.eigenvectors[:, lam] ** 2
    return OverlapMap(basis.n1, basis.n2, w, lam, float(result.eigenvalues[lam]))


def poisson_cdf(s):
    return 1.0 - np.exp(-np.asarray(s))


def wigner_cdf(s):
    s = np.asarray(s)
    return 1.0 - np.exp(-math.pi * s * s / 4.0)


def poisson_pdf(s):
    return np.exp(-np.asarray(s))


def wigner_pdf(s):
    s = np.asarray(s)
    return 0.5 * math.pi * s * np.exp(-math.pi * s * s / 4.0)


def ks_distance(s: np.ndarray, cdf) -> float:
    return float(stats.kstest(np.asarray(s), cdf).statistic)


@dataclass(frozen=True)
class SpacingHistogram:
    band: tuple[float, float]
    n_levels: int
    spacings: np.ndarray
    edges: np.ndarray
    counts: np.ndarray
    ks_poisson: float
    ks_wigner: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def density(self) -> np.ndarray:
        width = np.diff(self.edges)
        return self.counts / (self.counts.sum() * width)

    @property
    def verdict(self) -> str:
        return "poisson" if self.ks_poisson < self.ks_wigner else "wigner-dyson"


def unfold_levels(levels: np.ndarray, degree: int = 3) -> np.ndarray:
    """Smooth the staircase N(E) by a least-squares polynomial and map levels through it."""
    levels = np.sort(np.asarray(levels, dtype=float))
    staircase = np.arange(1, len(levels) + 1, dtype=float)
    fit = np.polynomial.Polynomial.fit(levels, staircase, degree)
    return fit(levels)


def spacing_statistics(unfolded_spacings, band=(math.nan, math.nan), n_levels=None, bins=None) -> SpacingHistogram:
    s = np.asarray(unfolded_spacings, dtype=float)
    if bins is None:
        bins = np.linspace(0.0, 4.0, 41)
    counts, edges = np.histogram(s, bins=bins)
    return SpacingHistogram(
        band=tuple(band),
        n_levels=len(s) + 1 if n_levels is None else n_levels,
        spacings=s,
        edges=edges,
        counts=counts,
        ks_poisson=ks_distance(s, poisson_cdf),
        ks_wigner=ks_distance(s, wigner_cdf),
    )


def level_statistics(result: SpectralResult, nbar_min: float, nbar_max: float, min_levels: int = 100) -> SpacingHistogram:
    """Nearest-neighbour spacings of levels with nbar_min < sqrt(E/T0) < nbar_max."""
    if not nbar_max > nbar_min:
        raise InvalidArgumentError("empty band")
    E = result.eigenvalues
    nb = np.sqrt(np.clip(E, 0.0, None))
    levels = E[(nb > nbar_min) & (nb < nbar_max)]
    if len(levels) < min_levels:
        raise BandError(f"band ({nbar_min}, {nbar_max}) holds {len(levels)} levels, need {min_levels}")
    s = np.diff(unfold_levels(levels))
    return spacing_statistics(s, (nbar_min, nbar_max), len(levels))


def resonance_proximity(basis: Basis, eps: float, mmax_min: float = atlas.DEFAULT_MMAX_MIN):
    """Distance of every state to the nearest post-selected resonance line, in units of its m_max.

    Returns an array; ``inf`` marks states away from every surviving
    resonance.  A value <= 1 places the state inside a resonance.
    """
    n1 = basis.n1.astype(float)
    n2 = basis.n2.astype(float)
    best = np.full(len(basis), np.inf)
    if eps <= 0:
        return best
    bound = math.floor(math.sqrt(2.0 * eps) * math.sqrt(2.0) * basis.nmax / mmax_min)
    for r in atlas.enumerate_resonances(max(bound, 1)):
        k = r.q * n1 + r.p * n2
        t = (n1 - r.q * k / r.norm2) / r.p
        w = math.sqrt(2.0 * eps) * (k / math.sqrt(r.norm2)) / r.norm2
        keep = w >= mmax_min
        ratio = np.where(keep, np.abs(t) / np.where(keep, w, 1.0), np.inf)
        best = np.minimum(best, ratio)
    return best
