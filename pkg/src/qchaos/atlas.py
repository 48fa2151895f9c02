"""p:q resonances, resonance lines and the effective pendulum-like Hamiltonians.

A resonance p:q (coprime, opposite parity, p > q >= 0) is the ray
``(n1, n2) ~ (q, p)`` in quantum-number space.  Every state lies on exactly
one line ``k = q*n1 + p*n2`` perpendicular to that ray; along the line the
states are indexed by an integer ``m`` measured from the lattice point
nearest the ray, with fractional offset ``delta``.  All energies are in T0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, NamedTuple

import numpy as np

from .core import FOUR_OVER_PI2, Basis, ModelParams, UnperturbedState, as_state, matrix_element_exact
from .errors import InvalidArgumentError, LineRangeError

# value quoted in the text for the refined no-gaps threshold at nbar=44.5,
# (m_max)_min=0.5; direct evaluation of the formula gives ~0.0332
QUOTED_REFINED_THRESHOLD = 0.7
DEFAULT_MMAX_MIN = 0.5


@dataclass(frozen=True, order=True)
class Resonance:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if q < 0 or p <= q:
            raise InvalidArgumentError(f"need p > q >= 0, got {p}:{q}")
        if math.gcd(p, q) != 1:
            raise InvalidArgumentError(f"{p}:{q} is not coprime")
        if (p + q) % 2 == 0:
            raise InvalidArgumentError(f"{p}:{q} must have opposite parity")

    @property
    def norm2(self) -> int:
        return self.p * self.p + self.q * self.q

    @property
    def angle(self) -> float:
        """Polar angle of the resonance direction (q, p) measured from the n2 axis."""
        return math.atan2(self.q, self.p)

    def __str__(self):
        return f"{self.p}:{self.q}"

    @classmethod
    def parse(cls, text: str) -> "Resonance":
        try:
            p, q = text.split(":")
            return cls(int(p), int(q))
        except ValueError as exc:
            if isinstance(exc, InvalidArgumentError):
                raise
            raise InvalidArgumentError(f"expected P:Q, got {text!r}") from exc


def enumerate_resonances(norm2_max: int) -> list[Resonance]:
    """All admissible p:q with p^2 + q^2 <= norm2_max, by (p^2+q^2, p)."""
    if norm2_max < 1:
        raise InvalidArgumentError("norm2_max must be >= 1")
    out = []
    pmax = math.isqrt(int(norm2_max))
    for p in range(1, pmax + 1):
        for q in range(0, p):
            if p * p + q * q <= norm2_max and math.gcd(p, q) == 1 and (p + q) % 2 == 1:
                out.append(Resonance(p, q))
    out.sort(key=lambda r: (r.norm2, r.p))
    return out


def _centered(t: Fraction) -> Fraction:
    # representative of t mod 1 in (-1/2, 1/2]
    return t - math.ceil(t - Fraction(1, 2))


def _egcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class ResonanceLine:
    res: Resonance
    k: int
    nbar1: Fraction
    nbar2: Fraction
    delta: Fraction

    @property
    def nbar_sq(self) -> Fraction:
        """Ebar / T0 = k^2 / (p^2 + q^2)."""
        return Fraction(self.k * self.k, self.res.norm2)

    @property
    def nbar(self) -> float:
        return self.k / math.sqrt(self.res.norm2)

    def coords(self, m: int) -> tuple[Fraction, Fraction]:
        t = m + self.delta
        return self.nbar1 + t * self.res.p, self.nbar2 - t * self.res.q

    def m_range(self) -> tuple[int, int]:
        """Inclusive window of m with 0 < n1 < n2 (may be empty: lo > hi)."""
        p, q = self.res.p, self.res.q
        lo = math.floor(-self.nbar1 / p - self.delta) + 1
        hi = math.ceil((self.nbar2 - self.nbar1) / (p + q) - self.delta) - 1
        return lo, hi

    def admissible(self, m: int) -> bool:
        lo, hi = self.m_range()
        return lo <= m <= hi

    def state_of(self, m: int) -> UnperturbedState:
        if not self.admissible(m):
            raise LineRangeError(f"m={m} is outside {self.m_range()} on {self.res} line k={self.k}")
        n1, n2 = self.coords(m)
        return UnperturbedState(int(n1), int(n2))

    def m_of(self, state) -> int:
        s = as_state(state)
        if self.res.q * s.n1 + self.res.p * s.n2 != self.k:
            raise InvalidArgumentError(f"{s} is not on {self.res} line k={self.k}")
        t = Fraction(s.n1) - self.nbar1
        return int(t / self.res.p - self.delta)


def resonance_line(res: Resonance, k: int) -> ResonanceLine:
    """The line q*n1 + p*n2 = k with its offset delta in (-1/2, 1/2]."""
    p, q = res.p, res.q
    nb1 = Fraction(q * k, res.norm2)
    nb2 = Fraction(p * k, res.norm2)
    _, x, y = _egcd(q, p)  # q*x + p*y == 1
    n1 = x * k
    t = (Fraction(n1) - nb1) / p
    return ResonanceLine(res, int(k), nb1, nb2, _centered(t))


def resonance_line_through(state, res: Resonance) -> ResonanceLine:
    s = as_state(state)
    return resonance_line(res, res.q * s.n1 + res.p * s.n2)


def line_offset(state, res: Resonance) -> Fraction:
    """Signed distance m + delta of a state from the p:q ray, in line-index units."""
    s = as_state(state)
    k = res.q * s.n1 + res.p * s.n2
    return (Fraction(s.n1) - Fraction(res.q * k, res.norm2)) / res.p


def line_energy(line: ResonanceLine, m: int) -> Fraction:
    """Exact Ebar + (p^2+q^2)(m+delta)^2 in units of T0."""
    if not line.admissible(m):
        raise LineRangeError(f"m={m} is outside {line.m_range()} on {line.res} line k={line.k}")
    t = m + line.delta
    return line.nbar_sq + line.res.norm2 * t * t


def m_max(res: Resonance, nbar: float, eps: float) -> float:
    """Resonance half-width in line index m."""
    if eps < 0:
        raise InvalidArgumentError("eps must be non-negative")
    return math.sqrt(eps) * math.sqrt(2.0) * nbar / res.norm2


class ResonanceStatus(NamedTuple):
    res: Resonance
    m_max: float
    selected: bool
    # False once m_max reaches nbar/sqrt(p^2+q^2), where the sawtooth form breaks down
    approximation_valid: bool


def resonance_status(res, nbar, eps, mmax_min=DEFAULT_MMAX_MIN) -> ResonanceStatus:
    if mmax_min <= 0:
        raise InvalidArgumentError("mmax_min must be positive")
    w = m_max(res, nbar, eps)
    return ResonanceStatus(res, w, w >= mmax_min and eps > 0, w < nbar / math.sqrt(res.norm2))


def post_select(res, nbar, eps, mmax_min=DEFAULT_MMAX_MIN) -> bool:
    """Keep a resonance only if it spans at least ``mmax_min`` line states."""
    return resonance_status(res, nbar, eps, mmax_min).selected


def surviving_resonances(nbar, eps, mmax_min=DEFAULT_MMAX_MIN) -> list[Resonance]:
    if eps <= 0:
        return []
    bound = math.floor(math.sqrt(2.0 * eps) * nbar / mmax_min)
    if bound < 1:
        return []
    return [r for r in enumerate_resonances(bound) if post_select(r, nbar, eps, mmax_min)]


BasisKind = Literal["plane-wave", "sine"]


@dataclass(frozen=True)
class EffectiveHamiltonian:
    res: Resonance
    nbar_sq: float
    kinetic_prefactor: float
    V0: float
    delta: float
    basis_kind: BasisKind

    @property
    def nbar(self) -> float:
        return math.sqrt(self.nbar_sq)

    def m_values(self, mcut: int) -> np.ndarray:
        if self.basis_kind == "sine":
            return np.arange(1, mcut + 1)
        return np.arange(-mcut, mcut + 1)


def effective_hamiltonian(line: ResonanceLine) -> EffectiveHamiltonian:
    r = line.res
    nb2 = float(line.nbar_sq)
    kind: BasisKind = "sine" if (r.p, r.q) == (1, 0) else "plane-wave"
    return EffectiveHamiltonian(r, nb2, float(r.norm2), nb2 / r.norm2, float(line.delta), kind)


def effective_potential_element(ham: EffectiveHamiltonian, m: int, mp: int) -> float:
    """Sawtooth potential matrix element in the ring (or odd sine) basis, in T0."""
    if ham.basis_kind == "sine" and (m < 1 or mp < 1):
        raise LineRangeError("sine basis indices start at 1")
    d = m - mp
    if d % 2 == 0:
        return 0.0
    if ham.basis_kind == "sine":
        s = m + mp
        return -FOUR_OVER_PI2 * ham.V0 * (1.0 / (d * d) - 1.0 / (s * s))
    return -FOUR_OVER_PI2 * ham.V0 / (d * d)


def _potential_matrix(ham: EffectiveHamiltonian, ms: np.ndarray) -> np.ndarray:
    d = ms[:, None] - ms[None, :]
    odd = d % 2 != 0
    out = np.zeros(d.shape)
    df = d[odd].astype(float)
    val = 1.0 / df**2
    if ham.basis_kind == "sine":
        s = (ms[:, None] + ms[None, :])[odd].astype(float)
        val = val - 1.0 / s**2
    out[odd] = -FOUR_OVER_PI2 * ham.V0 * val
    return out


@dataclass(frozen=True)
class EffectiveSpectrum:
    m_values: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n_bound: int
    m_max: float
    truncated: bool


def default_mcut(ham: EffectiveHamiltonian, eps: float) -> int:
    return 2 * math.ceil(m_max(ham.res, ham.nbar, eps)) + 8


def solve_effective(ham: EffectiveHamiltonian, eps: float, mcut: int | None = None) -> EffectiveSpectrum:
    """Diagonalize the truncated resonant Hamiltonian.

    Bound states are eigenvalues below ``eps * V0``, the top of the zero-mean
    sawtooth.  ``truncated`` is set when ``mcut`` leaves less than the
    required margin ``2*ceil(m_max) + 4`` around the resonance.
    """
    w = m_max(ham.res, ham.nbar, eps)
    if mcut is None:
        mcut = default_mcut(ham, eps)
    truncated = mcut < 2 * math.ceil(w) + 4
    ms = ham.m_values(mcut)
    H = eps * _potential_matrix(ham, ms)
    H[np.diag_indices_from(H)] += ham.kinetic_prefactor * (ms + ham.delta) ** 2
    vals, vecs = np.linalg.eigh(H)
    n_bound = int(np.sum(vals < eps * ham.V0))
    return EffectiveSpectrum(ms, vals, vecs, n_bound, w, truncated)


def restricted_exact_elements(line: ResonanceLine, ms) -> np.ndarray:
    """Exact v between line states, the object the sawtooth elements approximate."""
    states = [line.state_of(int(m)) for m in ms]
    return np.array([[matrix_element_exact(a, b) for b in states] for a in states])


def sawtooth(theta) -> np.ndarray:
    """Reference potential shape -(1 - 2|theta|/pi) on [-pi, pi), unit amplitude."""
    th = np.mod(np.asarray(theta, dtype=float) + math.pi, 2 * math.pi) - math.pi
    return -(1.0 - 2.0 * np.abs(th) / math.pi)


def sawtooth_fourier_sum(theta, V0: float = 1.0, jmax: int = 99) -> np.ndarray:
    """Resum the plane-wave elements V_{m,m'} as a Fourier series in theta."""
    theta = np.asarray(theta, dtype=float)
    j = np.arange(1, jmax + 1, 2)
    coef = -FOUR_OVER_PI2 * V0 / j**2
    return 2.0 * np.cos(np.multiply.outer(theta, j)) @ coef


@dataclass(frozen=True)
class Thresholds:
    nbar: float
    mmax_min: float
    eps_first: float
    eps_no_gaps_rough: float
    eps_no_gaps_refined: float
    dimensional_form: float
    quoted_refined: float = QUOTED_REFINED_THRESHOLD

    @property
    def note(self) -> str:
        return (
            f"refined no-gaps threshold evaluates to {self.eps_no_gaps_refined:.4g}; "
            f"the value {self.quoted_refined} quoted for nbar=44.5, (m_max)_min=0.5 "
            "does not follow from the formula and is not used"
        )


def thresholds(nbar: float, mmax_min: float = DEFAULT_MMAX_MIN, params: ModelParams | None = None) -> Thresholds:
    if nbar <= 0:
        raise InvalidArgumentError("nbar must be positive")
    params = params or ModelParams()
    e_bar = params.T0 * nbar * nbar
    dim = params.hbar ** (2 / 3) / (params.M0 ** (1 / 3) * e_bar ** (1 / 3) * params.L ** (2 / 3))
    return Thresholds(
        nbar=nbar,
        mmax_min=mmax_min,
        eps_first=mmax_min**2 / (2.0 * nbar**2),
        eps_no_gaps_rough=nbar ** (-2 / 3),
        eps_no_gaps_refined=math.pi ** (8 / 3) / 32.0 * mmax_min ** (2 / 3) / nbar ** (2 / 3),
        dimensional_form=dim,
    )


def manybody_threshold(n1d: float, M: float, kBT: float, params: ModelParams | None = None) -> float:
    if n1d <= 0 or M <= 0 or kBT <= 0:
        raise InvalidArgumentError("density, mass and temperature must be positive")
    hbar = (params or ModelParams()).hbar
    return (hbar**2 * n1d**2 / (kBT * M)) ** (1 / 3)


class OverlaySegment(NamedTuple):
    p: int
    q: int
    k: int
    n1_start: float
    n2_start: float
    n1_end: float
    n2_end: float
    m_max: float


def resonance_overlay(
    basis: Basis,
    eps: float,
    mmax_min: float = DEFAULT_MMAX_MIN,
    nbar_range: tuple[float, float] | None = None,
) -> list[OverlaySegment]:
    """One segment per post-selected resonance line whose ray crossing lies in the basis.

    The segment spans +-m_max line steps about the crossing point; the 1:0
    segment is clipped at n1 = 0.  ``nbar_range`` restricts crossings to an
    energy band.
    """
    if eps <= 0:
        return []
    lo, hi = nbar_range if nbar_range is not None else (0.0, math.inf)
    top = min(hi, math.sqrt(2.0) * basis.nmax)
    bound = math.floor(math.sqrt(2.0 * eps) * top / mmax_min)
    if bound < 1:
        return []
    out = []
    for r in enumerate_resonances(bound):
        p, q = r.p, r.q
        kmax = basis.nmax * r.norm2 // p  # keeps the crossing n2 <= nmax
        for k in range(1, kmax + 1):
            nbar = k / math.sqrt(r.norm2)
            if not lo <= nbar <= hi:
                continue
            w = m_max(r, nbar, eps)
            if w < mmax_min:
                continue
            c1, c2 = q * k / r.norm2, p * k / r.norm2
            s1, s2 = c1 - w * p, c2 + w * q
            if s1 < 0:
                s1, s2 = 0.0, c2 + (c1 / p) * q
            out.append(OverlaySegment(p, q, k, s1, s2, c1 + w * p, c2 - w * q, w))
    return out
