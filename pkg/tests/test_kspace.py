import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindblad_skin import damping, oracle
from lindblad_skin.errors import NormalizationFailure, UnsupportedRegime
from lindblad_skin.kspace import (TildeCorrelation, adjoint_k_occupations, calibrate_eom_gamma,
                                  closed_form_eigenvalues, closed_form_rapidities, eom_evolve,
                                  eom_matrix, eom_steady_state, g_k_from_tilde, k_block, k_grid,
                                  k_model, k_occupations, multiset_distance, numeric_rapidities,
                                  numeric_structure_eigenvalues, real_space_occupations_pbc)
from lindblad_skin.majorana import majorana_form
from lindblad_skin.model import BoundaryCondition, SshParams, ssh_model
from lindblad_skin.thirdq import build_drift_matrix

GRID = np.linspace(0, 2 * np.pi, 100, endpoint=False)


def _params(t1=1.0, gl=0.2, gg=0.2, **kw):
    return SshParams(n_cells=1, t1=t1, gamma_l=gl, gamma_g=gg, **kw)


def test_block_at_k_pi_has_no_hamiltonian():
    b = k_block(_params(), np.pi)
    assert abs(b.R) < 1e-15 and abs(b.I) < 1e-15
    # only the bath part survives
    assert np.all(np.abs(b.drift - b.drift.T) < 1e-15)


def test_block_trivial_cases():
    b = k_block(SshParams(n_cells=1, t1=0.7), 0.0)
    assert b.R == pytest.approx(1.7) and b.I == 0
    assert not np.any(b.pump)
    np.testing.assert_allclose(b.drift, -4j * majorana_form(k_model(SshParams(n_cells=1, t1=0.7),
                                                                    0.0)).H)


@pytest.mark.parametrize("gl,gg", [(0.2, 0.2), (0.4, 0.0), (0.1, 0.45)])
def test_kernels_match_majorana_route(gl, gg):
    p = _params(0.8, gl, gg)
    for k in GRID[::7]:
        b = k_block(p, k)
        F = majorana_form(k_model(p, k))
        np.testing.assert_allclose(b.drift, -2 * build_drift_matrix(F), atol=1e-15)
        np.testing.assert_allclose(b.pump, 2 * (F.M - F.M.T), atol=1e-15)


def test_k_blocks_reproduce_ring_spectrum():
    p = SshParams(n_cells=7, t1=0.8, gamma_l=0.25, gamma_g=0.15)
    ring = np.linalg.eigvals(build_drift_matrix(majorana_form(ssh_model(p, BoundaryCondition.PERIODIC))))
    blocks = np.concatenate([numeric_rapidities(p, k) for k in k_grid(7)])
    assert multiset_distance(ring, blocks) < 1e-10


@pytest.mark.parametrize("t1,g", [(1.0, 0.4), (0.8, 0.4), (1.2, 0.6)])
def test_closed_form_matches_numeric(t1, g):
    p = _params(t1, g / 2, g / 2)
    for k in GRID:
        assert multiset_distance(closed_form_rapidities(p, k), numeric_rapidities(p, k)) < 1e-9
        ev = closed_form_eigenvalues(p, k)
        assert multiset_distance(np.concatenate([ev, ev.conj()]),
                                 numeric_structure_eigenvalues(p, k)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(t1=st.floats(-2, 2), g=st.floats(0, 1), k=st.floats(0, 2 * np.pi))
def test_closed_form_pairing(t1, g, k):
    l1, l2, l3, l4 = closed_form_eigenvalues(_params(t1, g / 2, g / 2), k)
    assert l2 == -l1 and l4 == -l3
    assert l1.real >= -1e-12 and l3.real >= -1e-12
    assert l1.real + l3.real == pytest.approx(g / 2, abs=1e-12)


def test_rates_near_the_zero_mode():
    p = _params()
    ev = closed_form_eigenvalues(p, np.pi)
    assert np.sum(np.abs(ev) < 1e-10) == 2
    re = np.sort(np.abs(closed_form_eigenvalues(p, 11 * np.pi / 10).real))
    assert re[0] == pytest.approx(8.8e-4, abs=5e-5) and re[2] == pytest.approx(0.20, abs=5e-3)


def test_tilde_basis_round_trip(rng):
    G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    G = (G @ G.conj().T)
    G = G / (np.linalg.eigvalsh(G).max() + 0.1)
    t = TildeCorrelation.from_k_correlation(G)
    np.testing.assert_allclose(t.k_correlation(), G, atol=1e-14)
    assert g_k_from_tilde(t) == pytest.approx((G[0, 0].real, G[1, 1].real))


def test_tilde_examples():
    assert g_k_from_tilde(TildeCorrelation.unit_filling()) == (1.0, 1.0)
    assert g_k_from_tilde(TildeCorrelation([0.5, 0, 0, 0.5])) == (0.5, 0.5)
    with pytest.raises(ValueError):
        TildeCorrelation([1.5, 0, 0, 1])
    with pytest.raises(ValueError):
        TildeCorrelation([0.5, 0.1j, 0.1j, 0.5])


def test_eom_steady_state():
    p = _params(0.8)
    for k in (0.0, 1.0, 4.0):
        np.testing.assert_allclose(eom_steady_state(p, k), [0.5, 0, 0, 0.5], atol=1e-12)
        K, src = eom_matrix(p, k, 0.2)
        np.testing.assert_allclose(K @ [0.5, 0, 0, 0.5] + src, 0, atol=1e-15)


@pytest.mark.parametrize("k", [0.0, 6 * np.pi / 13, 11 * np.pi / 10, 10 * np.pi / 7, np.pi])
def test_eom_matches_normal_modes(k):
    p = _params()
    times = np.linspace(0, 30, 60)
    eom = np.array([g_k_from_tilde(s) for s in eom_evolve(p, k, TildeCorrelation.unit_filling(),
                                                          times)])
    np.testing.assert_allclose(eom, adjoint_k_occupations(p, k, times), atol=1e-8)


def test_eom_relaxes_to_half():
    p = _params()
    for k in (0.0, 2.0):
        late = eom_evolve(p, k, TildeCorrelation.unit_filling(), [400.0])[0]
        assert g_k_from_tilde(late) == pytest.approx((0.5, 0.5), abs=1e-8)
    # k = pi keeps a memory of the initial state
    stuck = eom_evolve(p, np.pi, TildeCorrelation.unit_filling(), [400.0])[0]
    assert g_k_from_tilde(stuck)[0] == pytest.approx(0.75, abs=1e-6)


def test_eom_needs_balanced_rates():
    with pytest.raises(UnsupportedRegime):
        eom_evolve(_params(1.0, 0.3, 0.1), 0.0, TildeCorrelation.unit_filling(), [1.0])


def test_calibration_finds_half_rate():
    cal = calibrate_eom_gamma(_params(0.9, 0.25, 0.25))
    assert cal.ratio == pytest.approx(0.5, abs=1e-6)
    assert cal.residual < 1e-8


def test_k_occupations_match_dense_ring():
    p = SshParams(n_cells=2, t1=1.0, gamma_l=0.2, gamma_g=0.2)
    model = ssh_model(p, BoundaryCondition.PERIODIC)
    rho = oracle.dense_evolve(model, oracle.fock_state([1, 1, 1, 1]), 2.5)
    d = oracle.dirac_operators(4)
    for k in k_grid(2):
        # d_kA = sum_j exp(-ikj) d_jA / sqrt(n_cells)
        dk = [sum(np.exp(-1j * k * j) * d[2 * j + s] for j in range(2)) / np.sqrt(2) for s in (0, 1)]
        expected = [np.trace(x.conj().T @ x @ rho).real for x in dk]
        np.testing.assert_allclose(k_occupations(p, k, [2.5])[0], expected, atol=1e-8)


def test_unbalanced_rates_use_normal_modes():
    p = _params(0.9, 0.3, 0.1)
    ring = SshParams(n_cells=4, t1=0.9, gamma_l=0.3, gamma_g=0.1)
    G = damping.correlation_timeseries(ssh_model(ring, BoundaryCondition.PERIODIC), np.eye(8), [3.0])[0]
    per_k = np.array([k_occupations(p, k, [3.0])[0] for k in k_grid(4)])
    np.testing.assert_allclose(np.diag(G).real[0::2], per_k[:, 0].mean(), atol=1e-10)


def test_real_space_profile():
    p = SshParams(n_cells=13, t1=0.8, gamma_l=0.2, gamma_g=0.2)
    start = real_space_occupations_pbc(p, 0.0)
    np.testing.assert_allclose(start.values, 1.0, atol=1e-12)
    prof = real_space_occupations_pbc(p, 5.0)
    assert prof.spread < 1e-10 and prof.values.shape == (26,)
    G = damping.correlation_timeseries(ssh_model(p, BoundaryCondition.PERIODIC), np.eye(26), [5.0])[0]
    np.testing.assert_allclose(prof.values, np.diag(G).real, atol=1e-10)


def test_exceptional_point_is_rejected():
    # |t1 - t2| = gamma_+/2 makes the k = pi block defective
    with pytest.raises(NormalizationFailure):
        k_occupations(_params(0.8, 0.3, 0.1), np.pi, [1.0])


def test_grid():
    np.testing.assert_allclose(k_grid(4), [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    with pytest.raises(ValueError):
        k_grid(0)
