"""Unperturbed two-particle box basis and perturbation matrix elements.

Energies are dimensionless, measured in the box energy unit
``T0 = hbar**2 * pi**2 / (2 * M0 * L**2)``. The perturbation is the
mass-defect operator ``V = -(p2**2 - p1**2) / (2 M0)`` acting on the
antisymmetric sine-product states of two equal-mass hard-core particles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AccuracyError, DegenerateDenominatorError, InvalidArgumentError

log = logging.getLogger(__name__)

FOUR_OVER_PI2 = 4.0 / math.pi**2


@dataclass(frozen=True)
class ModelParams:
    eps: float = 0.0
    L: float = 1.0
    M0: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise InvalidArgumentError(f"eps must lie in [0, 1), got {self.eps}")
        if self.L <= 0 or self.M0 <= 0 or self.hbar <= 0:
            raise InvalidArgumentError("L, M0 and hbar must be positive")

    @property
    def T0(self) -> float:
        return self.hbar**2 * math.pi**2 / (2.0 * self.M0 * self.L**2)


@dataclass(frozen=True, order=True)
class UnperturbedState:
    n1: int
    n2: int

    def __post_init__(self):
        if not (isinstance(self.n1, (int, np.integer)) and isinstance(self.n2, (int, np.integer))):
            raise InvalidArgumentError(f"quantum numbers must be integers, got {(self.n1, self.n2)}")
        if not 1 <= self.n1 < self.n2:
            raise InvalidArgumentError(f"need 1 <= n1 < n2, got {(self.n1, self.n2)}")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))

    @property
    def energy(self) -> int:
        return self.n1 * self.n1 + self.n2 * self.n2

    def __iter__(self):
        yield self.n1
        yield self.n2


def as_state(s) -> UnperturbedState:
    if isinstance(s, UnperturbedState):
        return s
    n1, n2 = s
    return UnperturbedState(int(n1), int(n2))


@dataclass(frozen=True)
class Basis:
    """All states 1 <= n1 < n2 <= nmax, ordered by energy then n1."""

    nmax: int
    states: tuple[UnperturbedState, ...]
    index: dict = field(repr=False, compare=False, hash=False)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __contains__(self, s):
        return as_state(s) in self.index

    def position(self, s) -> int:
        return self.index[as_state(s)]

    @cached_property
    def n1(self) -> np.ndarray:
        return np.array([s.n1 for s in self.states], dtype=np.int64)

    @cached_property
    def n2(self) -> np.ndarray:
        return np.array([s.n2 for s in self.states], dtype=np.int64)

    @cached_property
    def energies(self) -> np.ndarray:
        return (self.n1**2 + self.n2**2).astype(float)


def enumerate_basis(nmax: int) -> Basis:
    if int(nmax) != nmax or nmax < 2:
        raise InvalidArgumentError(f"nmax must be an integer >= 2, got {nmax}")
    nmax = int(nmax)
    pairs = [(a, b) for a in range(1, nmax) for b in range(a + 1, nmax + 1)]
    pairs.sort(key=lambda ab: (ab[0] ** 2 + ab[1] ** 2, ab[0]))
    states = tuple(UnperturbedState(a, b) for a, b in pairs)
    return Basis(nmax, states, {s: i for i, s in enumerate(states)})


def _denominator_factors(n1, n2, m1, m2):
    return (
        n1 + m1 + n2 + m2,
        n1 + m1 - n2 - m2,
        n1 - m1 + n2 - m2,
        n1 - m1 - n2 + m2,
        n1 + m1 + n2 - m2,
        n1 + m1 - n2 + m2,
        n1 - m1 + n2 + m2,
        -n1 + m1 + n2 + m2,
    )


def matrix_element_exact(a, b) -> float:
    """Closed-form ``<a|V|b> / T0``; zero unless n1+n2+n1'+n2' is odd."""
    a, b = as_state(a), as_state(b)
    n1, n2 = a
    m1, m2 = b
    if (n1 + n2 + m1 + m2) % 2 == 0:
        return 0.0
    den = math.prod(_denominator_factors(n1, n2, m1, m2))
    if den == 0:
        log.warning("vanishing denominator factor for %s, %s; returning 0", a, b)
        return 0.0
    num = n1 * m1 * n2 * m2 * (n1 * n1 - n2 * n2) * (m1 * m1 - m2 * m2)
    # integer numerator and denominator keep the ratio exact until this division
    return 256.0 * (num / den) / math.pi**2


def matrix_element_approx(a, b) -> float:
    """Large-quantum-number limit (4/pi^2) (N1^2 - N2^2) / (dn1^2 - dn2^2)."""
    a, b = as_state(a), as_state(b)
    if (a.n1 + a.n2 + b.n1 + b.n2) % 2 == 0:
        return 0.0
    dn1, dn2 = a.n1 - b.n1, a.n2 - b.n2
    den = dn1 * dn1 - dn2 * dn2
    if den == 0:
        raise DegenerateDenominatorError(f"dn1^2 == dn2^2 for {a}, {b}")
    N1 = (a.n1 + b.n1) / 2.0
    N2 = (a.n2 + b.n2) / 2.0
    return FOUR_OVER_PI2 * (N1 * N1 - N2 * N2) / den


def _wedge_rule(order: int):
    # Gauss-Legendre on the unit square pulled back to 0 <= x1 <= x2 <= 1 by x1 = x2 * u.
    x, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    x2, u = np.meshgrid(t, t, indexing="ij")
    return x2 * u, x2, np.outer(wt, wt) * x2


def _sine(n, x):
    return math.sqrt(2.0) * np.sin(math.pi * n * x)


def _wedge_integral(a, b, order):
    x1, x2, w = _wedge_rule(order)
    bra = _sine(a.n1, x1) * _sine(a.n2, x2) - _sine(a.n2, x1) * _sine(a.n1, x2)
    # (d2^2 - d1^2) applied to the antisymmetric product gives the symmetric product
    # scaled by k_{n1}^2 - k_{n2}^2; dividing by T0 leaves n1^2 - n2^2.
    ket = (b.n1**2 - b.n2**2) * (_sine(b.n1, x1) * _sine(b.n2, x2) + _sine(b.n2, x1) * _sine(b.n1, x2))
    return float(np.sum(w * bra * ket))


def matrix_element_oracle(a, b, tol: float = 1e-8, max_order: int = 1024) -> float:
    """Brute-force quadrature of ``<a|V|b> / T0`` over the wedge 0 <= x1 <= x2 <= L.

    The rule order doubles until two successive estimates agree to ``tol``.
    Independent of the closed form; used to validate it.
    """
    if tol <= 0:
        raise InvalidArgumentError("tol must be positive")
    a, b = as_state(a), as_state(b)
    order = max(16, 2 * (a.n2 + b.n2))
    prev = _wedge_integral(a, b, order)
    while order < max_order:
        order *= 2
        cur = _wedge_integral(a, b, order)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise AccuracyError(f"quadrature for {a}, {b} did not reach tol={tol} by order {order}")


def perturbation_matrix(basis: Basis) -> np.ndarray:
    """Dense ``v`` over the basis, exactly symmetric, zero diagonal."""
    n1 = basis.n1.astype(float)
    n2 = basis.n2.astype(float)
    a1, b1 = n1[:, None], n1[None, :]
    a2, b2 = n2[:, None], n2[None, :]
    odd = ((basis.n1 + basis.n2)[:, None] + (basis.n1 + basis.n2)[None, :]) % 2 == 1
    den = np.ones_like(a1 * b1)
    for f in _denominator_factors(a1, a2, b1, b2):
        den = den * f
    num = a1 * b1 * a2 * b2 * (a1**2 - a2**2) * (b1**2 - b2**2)
    bad = odd & (den == 0)
    if bad.any():
        log.warning("%d vanishing denominators in perturbation matrix; set to 0", int(bad.sum()))
    ok = odd & ~bad
    v = np.zeros(den.shape)
    v[ok] = 256.0 * (num[ok] / den[ok]) / math.pi**2
    upper = np.triu(v, 1)
    return upper + upper.T


def assemble_hamiltonian(basis: Basis, params: ModelParams) -> np.ndarray:
    if len(basis) == 0:
        raise InvalidArgumentError("empty basis")
    H = params.eps * perturbation_matrix(basis)
    H[np.diag_indices_from(H)] = basis.energies
    return H
