import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchaos import atlas, classical
from qchaos.errors import InvalidArgumentError, StallError

GOLDEN = (1 + math.sqrt(5)) / 2


# -- collisions and evolution ------------------------------------------------------


def test_collision_examples():
    assert classical.collide(1.0, -1.0, 1.0, 1.0) == (-1.0, 1.0)
    v1, v2 = classical.collide(1.0, 0.0, 1.0, 3.0)
    assert (v1, v2) == pytest.approx((-0.5, 0.5))
    assert 1.0 * v1 + 3.0 * v2 == pytest.approx(1.0)
    assert 0.5 * v1**2 + 1.5 * v2**2 == pytest.approx(0.5)


def test_single_contact_event():
    s = classical.ClassicalState(0.4, 0.6, 1.0, -1.0)
    tr = classical.evolve(s, max_events=1)
    assert tr.kind[1] == classical.CONTACT
    assert tr.t[1] == pytest.approx(0.1)
    assert (tr.v1[1], tr.v2[1]) == (-1.0, 1.0)


def test_contact_before_wall_on_tie():
    # both particles reach x = 1 at t = 0.5
    s = classical.ClassicalState(0.5, 0.75, 1.0, 0.5)
    tr = classical.evolve(s, max_events=2)
    assert list(tr.kind[1:3]) == [classical.CONTACT, classical.WALL_RIGHT]
    assert np.all(tr.x1 <= tr.x2)


def test_state_validation():
    with pytest.raises(InvalidArgumentError):
        classical.ClassicalState(0.6, 0.4, 1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        classical.ClassicalState(0.1, 0.4, 1.0, 1.0, M1=0.0)


def test_stall():
    with pytest.raises(StallError):
        classical.evolve(classical.ClassicalState(0.2, 0.4, 0.0, 0.0), max_events=5)


def test_mass_defect():
    s = classical.ClassicalState.from_mass_defect(0.1, 0.2, 1.0, 1.0, 0.2)
    assert s.eps == pytest.approx(0.2)
    assert 1 / s.M1 + 1 / s.M2 == pytest.approx(2.0)


def test_end_time_respected():
    tr = classical.evolve(classical.ClassicalState(0.1, 0.7, 0.3, -0.9), t_end=5.0)
    assert tr.t[-1] == pytest.approx(5.0)
    assert np.all(np.diff(tr.t) >= 0)


states = st.builds(
    lambda a, b, v1, v2, ratio: classical.ClassicalState(min(a, b), max(a, b), v1, v2, 1.0, ratio),
    st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(-3, 3).filter(lambda v: abs(v) > 1e-2),
    st.floats(-3, 3).filter(lambda v: abs(v) > 1e-2), st.floats(0.05, 20.0),
)


@settings(max_examples=40, deadline=None)
@given(states)
def test_evolution_invariants(s):
    tr = classical.evolve(s, max_events=2000)
    E = tr.energy
    assert np.abs(E / E[0] - 1).max() < 1e-10
    assert np.all(tr.x1 <= tr.x2)
    assert np.all((tr.x1 >= 0) & (tr.x2 <= s.L))


def test_equal_mass_speeds_invariant():
    tr = classical.evolve(classical.ClassicalState(0.13, 0.71, 0.37, -1.19), max_events=5000)
    speeds = np.sort(np.abs(np.column_stack([tr.v1, tr.v2])), axis=1)
    assert np.all(speeds == speeds[0])


def test_energy_drift_long_run():
    s = classical.ClassicalState(0.2, 0.5, 0.731, -1.113, 1.0, 3.0)
    tr = classical.evolve(s, max_events=10**6)
    assert len(tr) == 10**6 + 1
    assert np.abs(tr.energy / tr.energy[0] - 1).max() < 1e-10


# -- unfolding ------------------------------------------------------------------------


def _linear_deviation(u):
    dev = 0.0
    for j in range(2):
        coef = np.polyfit(u.t, u.x[:, j], 1)
        dev = max(dev, np.abs(np.polyval(coef, u.t) - u.x[:, j]).max())
    return dev


def test_equal_mass_unfolding_is_linear():
    tr = classical.evolve(classical.ClassicalState(0.2, 0.3, 1.0, GOLDEN), max_events=10**4)
    u = classical.unfold(tr)
    assert _linear_deviation(u) < 1e-9 * tr.L
    assert np.all((0 < u.p[:, 0]) & (u.p[:, 0] < u.p[:, 1]))
    assert np.allclose(u.p, u.p[0])


def test_unequal_masses_bend_the_unfolded_line():
    s = classical.ClassicalState.from_mass_defect(0.2, 0.3, 1.0, GOLDEN, 0.3)
    u = classical.unfold(classical.evolve(s, max_events=2000))
    assert _linear_deviation(u) > 1e-3


@settings(max_examples=25, deadline=None)
@given(states)
def test_fold_round_trip(s):
    tr = classical.evolve(s, max_events=500)
    u = classical.unfold(tr)
    back = classical.fold(u.x, tr.L)
    assert np.abs(back - np.column_stack([tr.x1, tr.x2])).max() < 1e-12 * max(1.0, np.abs(u.x).max())


def test_unfolded_elements_are_signed_permutations():
    tr = classical.evolve(classical.ClassicalState(0.1, 0.9, -0.4, 0.8, 1.0, 2.0), max_events=300)
    u = classical.unfold(tr)
    for h in u.element:
        assert np.array_equal(np.abs(h).sum(axis=0), [1, 1]) and np.array_equal(h @ h.T, np.eye(2))


# -- grey probability --------------------------------------------------------------------


def test_prob_grey_examples():
    assert classical.prob_grey(2, 1, 0.0) == pytest.approx(2 / 3)
    assert classical.prob_grey(2, 1, classical.anchor_length(2, 1)) == pytest.approx(1 / 3)
    assert classical.prob_grey(1, 0, 0.0) == 1.0
    assert classical.prob_grey(GOLDEN, 1, 0.3) == 0.5
    assert classical.prob_grey(3, 1, 0.0) == 0.5


@given(st.sampled_from(atlas.enumerate_resonances(100)), st.integers(-5, 5))
def test_prob_grey_anchors(r, j):
    ell = classical.anchor_length(r.p, r.q)
    top = 0.5 + 1 / (2 * (r.p**2 - r.q**2))
    bottom = 0.5 - 1 / (2 * (r.p**2 - r.q**2))
    assert classical.prob_grey(r.p, r.q, 2 * j * ell) == pytest.approx(top)
    assert classical.prob_grey(r.p, r.q, (2 * j + 1) * ell) == pytest.approx(bottom)


def _mc_agrees(p, q, offset, n=10**5, seed=0):
    est, se = classical.prob_grey_mc(p, q, offset, n, seed=seed)
    exact = classical.prob_grey(p, q, offset)
    return abs(est - exact) <= 3 * se + 1e-12, est, se, exact


@pytest.mark.parametrize("res", atlas.enumerate_resonances(41), ids=str)
def test_prob_grey_mc_agrees(res):
    ell = classical.anchor_length(res.p, res.q)
    h = classical.half_period(res.p, res.q)
    for i, off in enumerate([0.0, ell / 4, ell / 2, 3 * ell / 4, ell, h / 4, h / 2, 3 * h / 4]):
        ok, est, se, exact = _mc_agrees(res.p, res.q, off, seed=(res.p, res.q, i))
        assert ok, (str(res), off, est, se, exact)


def test_grey_fraction_period():
    # between the anchors the fraction oscillates with half-period L/sqrt(p^2+q^2), not (p+q)L/sqrt(p^2+q^2)
    ell = classical.anchor_length(2, 1)
    est, se = classical.prob_grey_mc(2, 1, ell / 4, 10**5, seed=11)
    literal = 2 / 3 - (2 / 3 - 1 / 3) / 4
    assert abs(est - literal) > 10 * se
    assert abs(est - classical.prob_grey(2, 1, ell / 4)) < 3 * se


def test_prob_grey_mc_examples():
    est, se = classical.prob_grey_mc(2, 1, 0.0, 10**6, seed=1)
    assert abs(est - 2 / 3) < 3 * se
    assert se == pytest.approx(0.00047, abs=2e-5)
    assert classical.prob_grey_mc(1, 0, 0.0, 10**4, seed=2)[0] == 1.0
    est, se = classical.prob_grey_mc(GOLDEN, 1, 0.17, 10**5, seed=3)
    assert abs(est - 0.5) < 3 * se
    with pytest.raises(InvalidArgumentError):
        classical.prob_grey_mc(2, 1, 0.0, 100)


# -- averaged potential -------------------------------------------------------------------


def test_averaged_potential_examples():
    ell = classical.anchor_length(2, 1)
    assert classical.averaged_potential(2, 1, 0.0, 1.0) == pytest.approx(-0.2)
    assert classical.averaged_potential(2, 1, ell, 1.0) == pytest.approx(0.2)
    assert classical.averaged_potential(2, 1, ell / 2, 1.0) == pytest.approx(0.0, abs=1e-15)


@given(st.sampled_from(atlas.enumerate_resonances(200)), st.floats(-10, 10), st.floats(0.1, 1e4))
def test_averaged_potential_amplitude_identity(r, off, ebar):
    saw_form = classical.averaged_potential(r.p, r.q, off, ebar)
    prob_form = classical.averaged_potential_from_probability(r.p, r.q, off, ebar)
    assert saw_form == pytest.approx(prob_form, rel=1e-12, abs=1e-12 * ebar)
    amplitude = abs(classical.averaged_potential(r.p, r.q, 0.0, ebar))
    assert abs(amplitude - ebar / r.norm2) <= 1e-12 * ebar


def test_separatrix_momentum_scaling():
    a = classical.separatrix_momentum(0.01, 1.0, 2, 1)
    assert classical.separatrix_momentum(0.04, 1.0, 2, 1) == pytest.approx(2 * a)
    assert classical.separatrix_momentum(0.01, 4.0, 2, 1) == pytest.approx(2 * a)


# -- Chirikov geometry and coverage ----------------------------------------------------------


def test_geometry_examples():
    g = classical.chirikov_geometry(0.02, 44.5, 0.5)
    assert g.d_theta_res(2, 1) == pytest.approx(0.0894, abs=1e-4)
    assert g.stripe_width == pytest.approx(0.4)
    assert g.r_quant == pytest.approx(4.22, abs=0.01)
    assert [str(r) for r in g.allowed()] == ["1:0", "2:1", "3:2", "4:1"]
    with pytest.raises(InvalidArgumentError):
        classical.chirikov_geometry(0.0, 44.5)


@settings(max_examples=30)
@given(st.floats(1e-5, 0.3), st.floats(10, 200))
def test_r_quant_matches_post_selection(eps, nbar):
    g = classical.chirikov_geometry(eps, nbar, 0.5)
    quantum = {(r.p, r.q) for r in atlas.surviving_resonances(nbar, eps, 0.5)}
    geometric = {(r.p, r.q) for r in g.allowed()}
    assert quantum == geometric


def test_coverage_below_first_threshold():
    ef = atlas.thresholds(44.5, 0.5).eps_first
    assert classical.coverage_scan(0.99 * ef, 44.5).covered == 0.0
    assert classical.coverage_scan(0.0, 44.5).covered == 0.0


def test_coverage_monotone():
    eps = np.logspace(-5, -0.5, 25)
    cov = [classical.coverage_scan(e, 44.5).covered for e in eps]
    dbl = [classical.coverage_scan(e, 44.5).doubly_covered for e in eps]
    assert all(b >= a for a, b in zip(cov, cov[1:]))
    assert all(b >= a for a, b in zip(dbl, dbl[1:]))


@pytest.mark.parametrize("eps", [1e-6, 1e-4, 1e-2])
def test_classical_coverage_complete(eps):
    sc = classical.coverage_scan(eps, 44.5, n_angles=200, classical=True)
    assert sc.covered == 1.0


def test_coverage_rejects_coarse_scan():
    with pytest.raises(InvalidArgumentError):
        classical.coverage_scan(0.02, 44.5, n_angles=50)
