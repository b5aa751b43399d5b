import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_skin.model import (BoundaryCondition, HamiltonianSpec, JumpOperatorSpec, ModelSpec,
                                 SshParams, build_general_jumps, build_ssh_hamiltonian,
                                 build_standard_jumps, ssh_model)

finite = st.floats(-3, 3, allow_nan=False)
rate = st.floats(0, 2, allow_nan=False)


def test_open_chain_hoppings():
    h = build_ssh_hamiltonian(SshParams(n_cells=2, t1=0.8)).h
    assert h.shape == (4, 4)
    assert h[0, 1] == 0.8 and h[1, 2] == 1.0 and h[2, 3] == 0.8 and h[0, 3] == 0
    assert np.all(np.diag(h) == 0)


def test_periodic_wrap_term():
    h = build_ssh_hamiltonian(SshParams(n_cells=2, t1=0.8), BoundaryCondition.PERIODIC).h
    assert h[3, 0] == 1.0 and h[0, 3] == 1.0


def test_zero_intercell_hopping_gives_dimers():
    h = build_ssh_hamiltonian(SshParams(n_cells=3, t1=0.7, t2=0.0)).h
    for c in range(3):
        block = np.zeros_like(h)
        block[2 * c:2 * c + 2, 2 * c:2 * c + 2] = h[2 * c:2 * c + 2, 2 * c:2 * c + 2]
        h = h - block
    assert np.all(h == 0)


def test_rejects_empty_chain():
    with pytest.raises(ValueError):
        SshParams(n_cells=0, t1=1.0)


def test_rejects_negative_rate():
    with pytest.raises(ValueError):
        SshParams(n_cells=1, t1=1.0, gamma_l=-0.1)


def test_rejects_non_hermitian_h():
    with pytest.raises(ValueError):
        HamiltonianSpec(np.array([[0, 1], [2, 0]]))


def test_model_rejects_mismatched_jump():
    with pytest.raises(ValueError):
        ModelSpec(HamiltonianSpec(np.zeros((2, 2))), (JumpOperatorSpec([1, 0, 0], [0, 0, 0]),))


def test_standard_loss_vector():
    jumps = build_standard_jumps(1, 0.4, 0.0)
    np.testing.assert_allclose(jumps[0].c_minus, [np.sqrt(0.2), -1j * np.sqrt(0.2)], atol=1e-15)
    assert not np.any(jumps[0].c_plus) and not np.any(jumps[1].c_plus)


def test_balanced_rates_populate_both_families():
    loss, gain = build_standard_jumps(1, 0.2, 0.2)
    np.testing.assert_allclose(np.abs(loss.c_minus), np.sqrt(0.1))
    np.testing.assert_allclose(np.abs(gain.c_plus), np.sqrt(0.1))
    np.testing.assert_allclose(gain.c_plus, [np.sqrt(0.1), 1j * np.sqrt(0.1)], atol=1e-15)


def test_general_jump_special_cases():
    p = SshParams(n_cells=3, t1=1.0, gamma_l=0.5, theta=0.0, phi=1.234)
    jumps = build_general_jumps(p)
    assert len(jumps) == 6
    np.testing.assert_allclose(jumps[2].c_minus, [0, 0, np.sqrt(0.5), 0, 0, 0])
    closed = build_general_jumps(SshParams(n_cells=2, t1=1.0))
    assert all(not np.any(j.c_minus) and not np.any(j.c_plus) for j in closed)


def test_number_conservation_flag():
    assert ssh_model(SshParams(n_cells=2, t1=1.0, gamma_l=0.1, gamma_g=0.3)).conserves_particle_number
    mixed = ModelSpec(HamiltonianSpec(np.zeros((1, 1))), (JumpOperatorSpec([1], [1]),))
    assert not mixed.conserves_particle_number


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 6), gl=rate, gg=rate)
def test_standard_equals_general_at_standard_angles(n, gl, gg):
    a = build_standard_jumps(n, gl, gg)
    b = build_general_jumps(SshParams(n_cells=n, t1=0.3, gamma_l=gl, gamma_g=gg))
    assert len(a) == 2 * n
    for x, y in zip(a, b):
        np.testing.assert_allclose(x.c_minus, y.c_minus, atol=1e-15)
        np.testing.assert_allclose(x.c_plus, y.c_plus, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 8), t1=finite, t2=finite)
def test_hamiltonian_hermitian_and_boundaries_differ_by_wrap_pair(n, t1, t2):
    p = SshParams(n_cells=n, t1=t1, t2=t2)
    ho = build_ssh_hamiltonian(p).h
    hp = build_ssh_hamiltonian(p, BoundaryCondition.PERIODIC).h
    assert np.array_equal(ho, ho.conj().T)
    diff = np.argwhere(ho != hp)
    if t2 != 0:
        assert sorted(map(tuple, diff)) == [(0, 2 * n - 1), (2 * n - 1, 0)]
