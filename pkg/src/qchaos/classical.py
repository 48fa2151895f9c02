"""Classical two-particle billiard: event-driven dynamics, unfolding, resonance geometry.

The configuration triangle 0 <= x1 <= x2 <= L is unfolded to the square
[-L, L]^2 with the eight-element symmetry group of the square, and the
square to the plane by 2L translations.  In the plane the equal-mass
motion is a straight line; ``fold`` maps any plane point back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import atlas
from .errors import InvalidArgumentError, StallError

CONTACT, WALL_LEFT, WALL_RIGHT, END = 0, 1, 2, 3
EVENT_NAMES = {CONTACT: "contact", WALL_LEFT: "wall-left", WALL_RIGHT: "wall-right", END: "end"}

SWAP = np.array([[0, 1], [1, 0]])
FLIP1 = np.array([[-1, 0], [0, 1]])
FLIP2 = np.array([[1, 0], [0, -1]])


@dataclass(frozen=True)
class ClassicalState:
    x1: float
    x2: float
    v1: float
    v2: float
    M1: float = 1.0
    M2: float = 1.0
    L: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x1 <= self.x2 <= self.L:
            raise InvalidArgumentError(f"need 0 <= x1 <= x2 <= L, got {self.x1}, {self.x2}, L={self.L}")
        if self.M1 <= 0 or self.M2 <= 0:
            raise InvalidArgumentError("masses must be positive")

    @property
    def energy(self) -> float:
        return 0.5 * self.M1 * self.v1**2 + 0.5 * self.M2 * self.v2**2

    @property
    def eps(self) -> float:
        return (self.M2 - self.M1) / (self.M1 + self.M2)

    @classmethod
    def from_mass_defect(cls, x1, x2, v1, v2, eps, L=1.0, M0=1.0):
        """Masses with (M2-M1)/(M1+M2) = eps and 1/M0 = 1/(2 M1) + 1/(2 M2)."""
        M1 = M0 / (1.0 + eps)
        M2 = M0 / (1.0 - eps)
        return cls(x1, x2, v1, v2, M1, M2, L)


@dataclass(frozen=True)
class Trajectory:
    """Post-event states; row 0 is the initial state."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    kind: np.ndarray
    M1: float
    M2: float
    L: float

    def __len__(self):
        return len(self.t)

    @property
    def energy(self) -> np.ndarray:
        return 0.5 * self.M1 * self.v1**2 + 0.5 * self.M2 * self.v2**2

    def state(self, i: int) -> ClassicalState:
        return ClassicalState(self.x1[i], self.x2[i], self.v1[i], self.v2[i], self.M1, self.M2, self.L, self.t[i])


def collide(v1, v2, M1, M2):
    M = M1 + M2
    return ((M1 - M2) * v1 + 2.0 * M2 * v2) / M, ((M2 - M1) * v2 + 2.0 * M1 * v1) / M


def evolve(state: ClassicalState, t_end: float = math.inf, max_events: int | None = None) -> Trajectory:
    """Exact event-driven propagation until ``t_end`` or ``max_events`` events.

    At equal event times the particle contact is processed before a wall.
    """
    if not t_end > state.t:
        raise InvalidArgumentError("t_end must exceed the initial time")
    if math.isinf(t_end) and max_events is None:
        raise InvalidArgumentError("give a finite t_end or max_events")
    x1, x2, v1, v2, t = state.x1, state.x2, state.v1, state.v2, state.t
    M1, M2, L = state.M1, state.M2, state.L
    T, X1, X2, V1, V2, K = [t], [x1], [x2], [v1], [v2], [END]
    inf = math.inf
    n = 0
    while max_events is None or n < max_events:
        if v1 == 0.0 and v2 == 0.0:
            raise StallError(f"both particles at rest at t={t}")
        dc = (x2 - x1) / (v1 - v2) if v1 > v2 else inf
        dl = -x1 / v1 if v1 < 0.0 else inf
        dr = (L - x2) / v2 if v2 > 0.0 else inf
        if dc <= dl and dc <= dr:
            dt, kind = dc, CONTACT
        elif dl <= dr:
            dt, kind = dl, WALL_LEFT
        else:
            dt, kind = dr, WALL_RIGHT
        if dt == inf:
            raise StallError(f"no future event from {(x1, x2, v1, v2)}")
        if t + dt >= t_end:
            x1 += v1 * (t_end - t)
            x2 += v2 * (t_end - t)
            t = t_end
            x1, x2 = min(max(x1, 0.0), L), min(max(x2, 0.0), L)
            if x1 > x2:
                x1 = x2 = 0.5 * (x1 + x2)
            T.append(t), X1.append(x1), X2.append(x2), V1.append(v1), V2.append(v2), K.append(END)
            break
        t += dt
        if kind == CONTACT:
            x1 = x2 = x1 + v1 * dt
            v1, v2 = collide(v1, v2, M1, M2)
        elif kind == WALL_LEFT:
            x1 = 0.0
            x2 = min(x2 + v2 * dt, L)
            v1 = -v1
        else:
            x2 = L
            x1 = max(x1 + v1 * dt, 0.0)
            v2 = -v2
        if x1 > x2:
            x1 = x2
        n += 1
        T.append(t), X1.append(x1), X2.append(x2), V1.append(v1), V2.append(v2), K.append(kind)
    arr = np.asarray
    return Trajectory(arr(T), arr(X1), arr(X2), arr(V1), arr(V2), arr(K, dtype=np.int8), M1, M2, L)


def _sorting_element(p) -> np.ndarray:
    """Signed permutation h with h @ p = (min|p|, max|p|)."""
    s = np.where(np.asarray(p) < 0, -1, 1)
    h = np.diag(s)
    if abs(p[0]) > abs(p[1]):
        h = SWAP @ h
    return h


@dataclass(frozen=True)
class Unfolded:
    """Plane coordinates and momenta at every trajectory row.

    ``element[i]`` maps the physical triangle frame to the unfolded square
    frame; ``shift[i]`` counts 2L translations of the square image.
    """

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    element: np.ndarray
    shift: np.ndarray
    L: float


def unfold(traj: Trajectory) -> Unfolded:
    n = len(traj)
    L = traj.L
    r = np.column_stack([traj.x1, traj.x2])
    mom = np.column_stack([traj.M1 * traj.v1, traj.M2 * traj.v2])
    el = np.empty((n, 2, 2), dtype=np.int64)
    sh = np.zeros((n, 2), dtype=np.int64)
    h = _sorting_element(mom[0])
    el[0] = h
    for i in range(1, n):
        kind = traj.kind[i]
        if kind == CONTACT:
            h_new = h @ SWAP
        elif kind == WALL_LEFT:
            h_new = h @ FLIP1
        elif kind == WALL_RIGHT:
            h_new = h @ FLIP2
        else:
            h_new = h
        # continuity of the plane position across the event
        jump = (h @ r[i] - h_new @ r[i]) / (2.0 * L)
        sh[i] = sh[i - 1] + np.rint(jump).astype(np.int64)
        el[i] = h = h_new
    x = np.einsum("nij,nj->ni", el, r) + 2.0 * L * sh
    p = np.einsum("nij,nj->ni", el, mom)
    return Unfolded(traj.t.copy(), x, p, el, sh, L)


def mod_offset(a, b, d):
    """a mod_d b = a - b*floor((a - d)/b), the representative in [d, d + b)."""
    a = np.asarray(a, dtype=float)
    return a - b * np.floor((a - d) / b)


def fold(x, L: float = 1.0) -> np.ndarray:
    """Map plane points (..., 2) back to the triangle 0 <= x1 <= x2 <= L."""
    rho = np.abs(mod_offset(x, 2.0 * L, -L))
    return np.sort(rho, axis=-1)


def grey_sign(x, L: float = 1.0) -> np.ndarray:
    """sign(|x2 mod| - |x1 mod|) of the unfolded perturbation."""
    rho = np.abs(mod_offset(x, 2.0 * L, -L))
    return np.sign(rho[..., 1] - rho[..., 0])


def saw(xi) -> np.ndarray:
    """Period-2 triangle wave equal to 1 - 2|xi| on (-1, 1)."""
    u = mod_offset(xi, 2.0, -1.0)
    return 1.0 - 2.0 * np.abs(u)


def anchor_length(p: int, q: int, L: float = 1.0) -> float:
    """(p+q) L / sqrt(p^2+q^2): offsets at even (odd) multiples give the max (min) grey fraction."""
    return (p + q) * L / math.hypot(p, q)


def half_period(p: int, q: int, L: float = 1.0) -> float:
    """Half-period of the grey fraction as a function of the line offset."""
    return L / math.hypot(p, q)


def _admissible(p, q) -> bool:
    if not (float(p).is_integer() and float(q).is_integer()):
        return False
    p, q = int(p), int(q)
    return (p, q) != (0, 0) and math.gcd(p, q) == 1 and (p + q) % 2 == 1


def prob_grey(p, q, offset: float, L: float = 1.0) -> float:
    """Fraction of the line with direction (q, p) through ``offset * e1`` lying in grey squares.

    ``e1 = (p, -q)/sqrt(p^2+q^2)``.  Opposite-parity coprime directions give
    1/2 +- 1/(2(p^2-q^2)) at the anchors with linear interpolation between;
    every other direction gives 1/2.
    """
    if not _admissible(p, q):
        return 0.5
    p, q = int(p), int(q)
    return 0.5 + float(saw(offset / half_period(p, q, L))) / (2.0 * (p * p - q * q))


def prob_grey_mc(p, q, offset: float, n_samples: int = 10**6, L: float = 1.0, seed=None, periods: int = 64):
    """Monte Carlo estimate of ``prob_grey`` with its binomial standard error."""
    if n_samples < 10**4:
        raise InvalidArgumentError("n_samples must be >= 1e4")
    rng = np.random.default_rng(seed)
    r = math.hypot(p, q)
    e1 = np.array([p, -q]) / r
    e2 = np.array([q, p]) / r
    # a rational direction closes after 2L*sqrt(p^2+q^2); others get a long window
    rational = float(p).is_integer() and float(q).is_integer()
    span = periods * 2.0 * L * r if rational else 1e5 * L
    s = rng.uniform(0.0, span, n_samples)
    pts = offset * e1 + s[:, None] * e2
    hit = grey_sign(pts, L) > 0
    est = float(hit.mean())
    return est, math.sqrt(est * (1.0 - est) / n_samples)


def averaged_potential(p: int, q: int, offset: float, e_bar: float, L: float = 1.0) -> float:
    """Time average of the perturbation along a resonant line: sawtooth of amplitude Ebar/(p^2+q^2)."""
    return -e_bar / (p * p + q * q) * float(saw(offset / half_period(p, q, L)))


def averaged_potential_from_probability(p, q, offset, e_bar, prob=None, L=1.0) -> float:
    """-(eta (P2^2 - P1^2)) (2 Prob - 1) with the momentum along (q, p) at energy Ebar."""
    if prob is None:
        prob = prob_grey(p, q, offset, L)
    n2 = p * p + q * q
    return -e_bar * (p * p - q * q) / n2 * (2.0 * prob - 1.0)


def separatrix_momentum(eps: float, e_bar: float, p: int, q: int, M0: float = 1.0) -> float:
    """|p1'| below which motion across a p:q resonance is phase-locked."""
    return 2.0 * math.sqrt(eps) * math.sqrt(M0 * e_bar) / math.hypot(p, q)


@dataclass(frozen=True)
class ChirikovGeometry:
    eps: float
    nbar: float
    mmax_min: float
    stripe_width: float
    r_quant: float

    def d_theta_res(self, p, q) -> float:
        return math.sqrt(2.0) * math.sqrt(self.eps) / math.hypot(p, q)

    def allowed(self) -> list[atlas.Resonance]:
        if not math.isfinite(self.r_quant) or self.r_quant < 1:
            return []
        return atlas.enumerate_resonances(math.floor(self.r_quant**2))


def chirikov_geometry(eps: float, nbar: float, mmax_min: float = atlas.DEFAULT_MMAX_MIN) -> ChirikovGeometry:
    if eps <= 0:
        raise InvalidArgumentError("eps must be positive")
    return ChirikovGeometry(
        eps,
        nbar,
        mmax_min,
        stripe_width=2.0**1.5 * math.sqrt(eps),
        r_quant=2.0**0.25 * eps**0.25 * math.sqrt(nbar) / math.sqrt(mmax_min),
    )


@dataclass(frozen=True)
class CoverageScan:
    eps: float
    angles: np.ndarray
    counts: np.ndarray

    @property
    def covered(self) -> float:
        return float(np.mean(self.counts >= 1))

    @property
    def doubly_covered(self) -> float:
        return float(np.mean(self.counts >= 2))


def _convergents(x: float, limit: int):
    """Continued-fraction convergents q/p of x >= 0 (numerator q, denominator p)."""
    frac = Fraction(x).limit_denominator(10**15)
    q0, p0, q1, p1 = 1, 0, 0, 1
    while True:
        a = math.floor(frac)
        q0, p0, q1, p1 = a * q0 + q1, a * p0 + p1, q0, p0
        if p0 > limit:
            return
        yield q0, p0
        rest = frac - a
        if rest == 0:
            return
        frac = 1 / rest


def _classical_count(theta: float, eps: float, limit: int) -> int:
    x = math.tan(theta)
    count = 0
    for q, p in _convergents(x, limit):
        if _admissible(p, q) and p > q:
            if abs(math.atan2(q, p) - theta) <= math.sqrt(2.0 * eps) / math.hypot(p, q):
                count += 1
    return count


def coverage_scan(
    eps: float,
    nbar: float,
    mmax_min: float = atlas.DEFAULT_MMAX_MIN,
    n_angles: int = 1000,
    classical: bool = False,
    classical_limit: int = 10**7,
) -> CoverageScan:
    """How many post-selected resonances contain each probe direction.

    Probe angles are midpoints of ``n_angles`` cells tiling (0, pi/4],
    measured from the n2 axis, so resonance p:q sits at atan(q/p).
    ``classical=True`` lifts the quantum radius cap; candidates are then
    the continued-fraction convergents of each direction.
    """
    if n_angles < 100:
        raise InvalidArgumentError("n_angles must be >= 100")
    angles = (np.arange(n_angles) + 0.5) * (math.pi / 4) / n_angles
    if eps <= 0:
        return CoverageScan(eps, angles, np.zeros(n_angles, dtype=int))
    if classical:
        counts = np.array([_classical_count(th, eps, classical_limit) for th in angles])
        return CoverageScan(eps, angles, counts)
    geo = chirikov_geometry(eps, nbar, mmax_min)
    res = geo.allowed()
    if not res:
        return CoverageScan(eps, angles, np.zeros(n_angles, dtype=int))
    th = np.array([r.angle for r in res])
    half = np.array([geo.d_theta_res(r.p, r.q) for r in res])
    counts = (np.abs(angles[:, None] - th[None, :]) <= half[None, :]).sum(axis=1)
    return CoverageScan(eps, angles, counts)
