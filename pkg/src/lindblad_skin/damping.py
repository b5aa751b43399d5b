"""Damping-matrix route for number-conserving models.

With ``G_mn = <d_m^dag d_n>`` the Lindblad equation closes on ``G``:

    dG/dt = X G + G X^dag + S,
    X = i h^* - sum_loss c c^dag - sum_gain (c c^dag)^*,
    S = 2 sum_gain (c c^dag)^*,

so the deviation from the steady state evolves as ``e^{Xt} dG(0) e^{X^dag t}``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import NumericalFailure, UnstableDrift, UnsupportedRegime
from .model import BoundaryCondition, ModelSpec, SshParams

SKIN_TOL = 1e-12
SKIN_CHECK_TOL = 1e-10
MAX_AFFINE_MODES = 40


def _require_number_conserving(model: ModelSpec):
    if not model.conserves_particle_number:
        raise UnsupportedRegime("jumps mixing d and d^dag do not close on G", module="damping")


def damping_matrix(model: ModelSpec) -> np.ndarray:
    _require_number_conserving(model)
    X = 1j * model.hamiltonian.h.conj()
    for j in model.jumps:
        if j.is_gain:
            X = X - np.outer(j.c_plus, j.c_plus.conj()).conj()
        else:
            X = X - np.outer(j.c_minus, j.c_minus.conj())
    return X


def gain_source(model: ModelSpec) -> np.ndarray:
    _require_number_conserving(model)
    S = np.zeros((model.n_modes,) * 2, dtype=complex)
    for j in model.jumps:
        if j.is_gain:
            S += 2 * np.outer(j.c_plus, j.c_plus.conj()).conj()
    return S


def build_damping_matrix(params: SshParams, bc: BoundaryCondition = BoundaryCondition.OPEN) -> np.ndarray:
    """Closed-form ``X`` for the SSH chain with the cellular jumps of ``params``."""
    gl, gg = params.gamma_l, params.gamma_g
    th, ph, thp, php = params.theta, params.phi, params.theta_p, params.phi_p
    sc, scp = np.sin(th) * np.cos(th), np.sin(thp) * np.cos(thp)
    block = np.array([
        [-gl * np.cos(th) ** 2 - gg * np.cos(thp) ** 2,
         1j * params.t1 - gl * np.exp(-1j * ph) * sc - gg * np.exp(1j * php) * scp],
        [1j * params.t1 - gl * np.exp(1j * ph) * sc - gg * np.exp(-1j * php) * scp,
         -gl * np.sin(th) ** 2 - gg * np.sin(thp) ** 2],
    ])
    n = params.n_modes
    X = np.kron(np.eye(params.n_cells), block)
    for cell in range(params.n_cells - 1):
        b = 2 * cell + 1
        X[b, b + 1] += 1j * params.t2
        X[b + 1, b] += 1j * params.t2
    if bc is BoundaryCondition.PERIODIC:
        X[n - 1, 0] += 1j * params.t2
        X[0, n - 1] += 1j * params.t2
    return X


def propagate_deviation(X: np.ndarray, dG0: np.ndarray, t: float, method: str = "pade") -> np.ndarray:
    """``e^{Xt} dG0 e^{X^dag t}`` by Pade scaling and squaring or by eigendecomposition."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if method == "pade":
        U = sla.expm(X * t)
    elif method == "eig":
        w, R = np.linalg.eig(X)
        if np.linalg.cond(R) > 1e6:
            raise UnsupportedRegime("eigenvector matrix too ill-conditioned for the eigen route",
                                    module="damping", tolerance=1e6)
        U = (R * np.exp(w * t)) @ np.linalg.inv(R)
    else:
        raise ValueError(f"unknown method {method!r}")
    return U @ dG0 @ U.conj().T


def steady_state_correlation(model: ModelSpec) -> np.ndarray:
    X = damping_matrix(model)
    top = np.linalg.eigvals(X).real.max()
    if top >= -1e-10:
        raise UnstableDrift(f"damping matrix has an eigenvalue with real part {top:.3g}",
                            module="damping", tolerance=1e-10)
    return sla.solve_continuous_lyapunov(X, -gain_source(model))


def _affine_propagation(X: np.ndarray, S: np.ndarray, G0: np.ndarray, times) -> np.ndarray:
    # vec(G)' = (I kron X + conj(X) kron I) vec(G) + vec(S), solved with one augmented exponential
    n = X.shape[0]
    eye = np.eye(n)
    gen = np.zeros((n * n + 1, n * n + 1), dtype=complex)
    gen[:-1, :-1] = np.kron(eye, X) + np.kron(X.conj(), eye)
    gen[:-1, -1] = S.reshape(-1, order="F")
    x0 = np.append(G0.reshape(-1, order="F"), 1.0)
    return np.array([(sla.expm(gen * t) @ x0)[:-1].reshape((n, n), order="F") for t in times])


def correlation_timeseries(model: ModelSpec, G0: np.ndarray, times) -> np.ndarray:
    """``G(t)`` for each time.

    Strictly damped models propagate the deviation from the Lyapunov steady
    state; models with undamped modes integrate the source term exactly.
    """
    X = damping_matrix(model)
    G0 = np.asarray(G0, dtype=complex)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    try:
        Ginf = steady_state_correlation(model)
    except UnstableDrift:
        if model.n_modes > MAX_AFFINE_MODES:
            raise
        return _affine_propagation(X, gain_source(model), G0, times)
    dG0 = G0 - Ginf
    return np.array([Ginf + propagate_deviation(X, dG0, t) for t in times])


def skin_residual(params: SshParams) -> float:
    """``|X_12| - |X_21|`` of the closed-form damping matrix."""
    X = build_damping_matrix(params)
    return float(abs(X[0, 1]) - abs(X[1, 0]))


def skin_asymmetry(params: SshParams) -> float:
    """``gamma_l sin(phi) s c - gamma_g sin(phi') s' c'``; zero (or ``t1 = 0``) removes the skin effect.

    ``|X_12|^2 - |X_21|^2 = 4 t1`` times this quantity.
    """
    return (params.gamma_l * np.sin(params.phi) * np.sin(params.theta) * np.cos(params.theta)
            - params.gamma_g * np.sin(params.phi_p) * np.sin(params.theta_p) * np.cos(params.theta_p))


def skin_absent(params: SshParams, tol: float = SKIN_TOL) -> bool:
    """Closed-form predicate, cross-checked against ``|X_12| = |X_21|`` on the built matrix."""
    absent = abs(params.t1) <= tol or abs(skin_asymmetry(params)) <= tol
    residual = skin_residual(params)
    if absent and abs(residual) > SKIN_CHECK_TOL:
        raise NumericalFailure(f"predicate holds but |X12| - |X21| = {residual:.3e}",
                               module="damping", tolerance=SKIN_CHECK_TOL)
    return absent


def localization_scores(vectors: np.ndarray) -> np.ndarray:
    """Mean signed position of ``|v|^2`` per column, in ``[-1, 1]`` (left end is -1)."""
    w = np.abs(vectors) ** 2
    w = w / w.sum(axis=0, keepdims=True)
    n = vectors.shape[0]
    pos = (2 * np.arange(n) - (n - 1)) / max(n - 1, 1)
    return pos @ w


def obc_pbc_spectra(params: SshParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues of ``X`` under open and periodic boundaries, plus OBC localization scores."""
    w_obc, v_obc = np.linalg.eig(build_damping_matrix(params, BoundaryCondition.OPEN))
    w_pbc = np.linalg.eigvals(build_damping_matrix(params, BoundaryCondition.PERIODIC))
    return w_obc, w_pbc, localization_scores(v_obc)

