import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchaos import core
from qchaos.errors import InvalidArgumentError


def states_upto(nmax):
    return [core.UnperturbedState(a, b) for a in range(1, nmax) for b in range(a + 1, nmax + 1)]


state_strategy = st.tuples(st.integers(1, 40), st.integers(1, 40)).filter(lambda t: t[0] != t[1]).map(
    lambda t: core.UnperturbedState(min(t), max(t))
)


# -- parameters and states ---------------------------------------------------


def test_model_params_energy_unit():
    p = core.ModelParams(0.1)
    assert p.T0 == pytest.approx(math.pi**2 / 2)
    assert core.ModelParams(0.1, L=2.0, M0=3.0, hbar=0.5).T0 == pytest.approx(0.25 * math.pi**2 / 24)


@pytest.mark.parametrize("eps", [-0.1, 1.0, 1.5])
def test_model_params_rejects_eps(eps):
    with pytest.raises(InvalidArgumentError):
        core.ModelParams(eps)


@pytest.mark.parametrize("n1,n2", [(0, 3), (2, 2), (5, 3)])
def test_state_rejects_bad_order(n1, n2):
    with pytest.raises(InvalidArgumentError):
        core.UnperturbedState(n1, n2)


def test_state_energy():
    assert core.UnperturbedState(3, 4).energy == 25


# -- basis -------------------------------------------------------------------


def test_basis_sizes():
    assert len(core.enumerate_basis(100)) == 4950
    assert [tuple(s) for s in core.enumerate_basis(2).states] == [(1, 2)]
    b = core.enumerate_basis(4)
    assert len(b) == 6
    assert tuple(b[0]) == (1, 2) and b[0].energy == 5


def test_basis_rejects_small_nmax():
    with pytest.raises(InvalidArgumentError):
        core.enumerate_basis(1)


@given(st.integers(2, 40))
def test_basis_bijection_and_order(nmax):
    b = core.enumerate_basis(nmax)
    assert len(b) == nmax * (nmax - 1) // 2
    assert set(b.states) == set(states_upto(nmax))
    for i, s in enumerate(b.states):
        assert b.position(s) == i
    keys = [(s.energy, s.n1) for s in b.states]
    assert keys == sorted(keys)


def test_degenerate_energies_ordered_by_n1():
    b = core.enumerate_basis(8)
    # 1^2 + 8^2 == 4^2 + 7^2 == 65
    i, j = b.position((1, 8)), b.position((4, 7))
    assert j == i + 1


# -- matrix elements ---------------------------------------------------------


def test_exact_examples():
    assert core.matrix_element_exact((1, 2), (1, 2)) == 0.0
    v = core.matrix_element_exact((1, 2), (1, 3))
    assert v == pytest.approx(36864 / (1575 * math.pi**2), rel=1e-14)
    assert v == pytest.approx(2.3715, abs=1e-4)
    assert core.matrix_element_exact((1, 3), (1, 2)) == v


def test_approx_examples():
    assert core.matrix_element_approx((20, 40), (20, 41)) == pytest.approx(4 / math.pi**2 * 1240.25, rel=1e-12)
    assert core.matrix_element_approx((20, 40), (20, 41)) == pytest.approx(502.7, abs=0.05)
    assert core.matrix_element_approx((1, 2), (1, 3)) == pytest.approx(4 / math.pi**2 * 5.25, rel=1e-12)
    assert core.matrix_element_approx((1, 2), (2, 3)) == 0.0


@given(state_strategy, state_strategy)
def test_approx_degenerate_denominator_has_even_total(a, b):
    # dn1^2 == dn2^2 forces an even total, so the selection rule answers first
    dn1, dn2 = a.n1 - b.n1, a.n2 - b.n2
    if dn1 * dn1 == dn2 * dn2:
        assert (a.n1 + a.n2 + b.n1 + b.n2) % 2 == 0
        assert core.matrix_element_approx(a, b) == 0.0


def test_oracle_examples():
    assert abs(core.matrix_element_oracle((1, 2), (1, 2), 1e-8)) < 1e-8
    assert core.matrix_element_oracle((1, 2), (1, 3), 1e-8) == pytest.approx(2.3715, abs=1e-4)
    assert abs(core.matrix_element_oracle((1, 2), (1, 3), 1e-8) - core.matrix_element_exact((1, 2), (1, 3))) < 1e-6
    assert abs(core.matrix_element_oracle((2, 3), (2, 4), 1e-8) - core.matrix_element_exact((2, 3), (2, 4))) < 1e-6


def test_oracle_rejects_tol():
    with pytest.raises(InvalidArgumentError):
        core.matrix_element_oracle((1, 2), (1, 3), 0.0)


def test_oracle_matches_exact_on_sample(rng):
    pool = states_upto(12)
    for _ in range(60):
        a, b = (pool[i] for i in rng.integers(len(pool), size=2))
        assert abs(core.matrix_element_exact(a, b) - core.matrix_element_oracle(a, b)) < 1e-6


@given(state_strategy, state_strategy)
def test_selection_rule_and_symmetry(a, b):
    v = core.matrix_element_exact(a, b)
    assert v == core.matrix_element_exact(b, a)
    if (a.n1 + a.n2 + b.n1 + b.n2) % 2 == 0:
        assert v == 0.0


def test_approximation_converges_along_ray():
    devs = []
    for s in (1, 2, 4):
        a, b = (20 * s, 40 * s), (20 * s, 40 * s + 1)
        ex = core.matrix_element_exact(a, b)
        devs.append(abs(ex - core.matrix_element_approx(a, b)) / abs(ex))
    assert devs[0] >= devs[1] >= devs[2]


# -- Hamiltonian -------------------------------------------------------------


def test_hamiltonian_unperturbed_is_diagonal():
    b = core.enumerate_basis(10)
    H = core.assemble_hamiltonian(b, core.ModelParams(0.0))
    assert np.array_equal(H, np.diag(b.energies))


def test_hamiltonian_small():
    b = core.enumerate_basis(3)
    H = core.assemble_hamiltonian(b, core.ModelParams(0.1))
    assert H.shape == (3, 3)
    assert H[b.position((1, 2)), b.position((1, 2))] == 5
    assert H[b.position((1, 2)), b.position((1, 3))] == pytest.approx(0.1 * core.matrix_element_exact((1, 2), (1, 3)))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 25), st.floats(0.0, 0.9))
def test_hamiltonian_matches_elementwise(nmax, eps):
    b = core.enumerate_basis(nmax)
    H = core.assemble_hamiltonian(b, core.ModelParams(eps))
    assert np.array_equal(H, H.T)
    assert np.all(np.diag(H) == b.energies)
    for i, j in itertools.islice(itertools.combinations(range(len(b)), 2), 200):
        assert H[i, j] == pytest.approx(eps * core.matrix_element_exact(b[i], b[j]), rel=1e-12, abs=1e-14)
