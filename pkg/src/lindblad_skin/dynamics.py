"""Time evolution of Gaussian states through normal-mode interference.

For an even Gaussian initial state the two-point functions evolve as

    (1|A_a A_b e^{Lt}|rho0) = sum_jl V[2j+1,a] V[2l+1,b] e^{-2(beta_j+beta_l)t} F_jl
                              + sum_j V[2j+1,a] V[2j,b]

with ``F_jl = (1|B_j B_l|rho0)``. Site occupations follow from
``d_m^dag d_m = 1/2 - i A_{4m} A_{4m+2}``, giving

    Delta G_m(t) = sum_{j<k} D_jkm exp(omega_jk t),   omega_jk = -2(beta_j + beta_k),
    D_jkm = -i (V[2j+1,4m] V[2k+1,4m+2] - V[2k+1,4m] V[2j+1,4m+2]) F_jk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CARViolation, ResidueTooLarge
from .model import ModelSpec
from .ness import site_adjoint_indices
from .thirdq import RapidityDecomposition

CAR_TOL = 1e-10
RESIDUE_TOL = 1e-6


def covariance_from_correlation(G: np.ndarray) -> np.ndarray:
    """Majorana covariance ``<w_m w_n>`` of a number-conserving state with ``<d_m^dag d_n> = G``."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    eye = np.eye(n)
    C = np.empty((2 * n, 2 * n), dtype=complex)
    C[0::2, 0::2] = eye + G - G.T
    C[1::2, 1::2] = eye + G - G.T
    C[0::2, 1::2] = 1j * (G + G.T - eye)
    C[1::2, 0::2] = 1j * (eye - G - G.T)
    return C


def correlation_from_covariance(C: np.ndarray) -> np.ndarray:
    """``G_mn = <d_m^dag d_n>`` with ``d^dag = (w_odd + i w_even) / 2``."""
    C = np.asarray(C)
    return (C[..., 0::2, 0::2] - 1j * C[..., 0::2, 1::2]
            + 1j * C[..., 1::2, 0::2] + C[..., 1::2, 1::2]) / 4


@dataclass(frozen=True)
class InitialGaussianState:
    majorana_covariance: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.majorana_covariance, dtype=complex)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] % 2:
            raise CARViolation("covariance must be a square matrix of even size", module="dynamics")
        car = np.abs(C + C.T - 2 * np.eye(C.shape[0])).max()
        herm = np.abs(C - C.conj().T).max()
        if car > CAR_TOL or herm > CAR_TOL:
            raise CARViolation(f"covariance violates C + C^T = 2I or hermiticity ({max(car, herm):.2e})",
                               module="dynamics", tolerance=CAR_TOL)
        object.__setattr__(self, "majorana_covariance", C)

    @property
    def n_modes(self) -> int:
        return self.majorana_covariance.shape[0] // 2

    @classmethod
    def from_correlation(cls, G) -> "InitialGaussianState":
        return cls(covariance_from_correlation(G))

    @classmethod
    def unit_filling(cls, n_modes: int) -> "InitialGaussianState":
        return cls.from_correlation(np.eye(n_modes))

    @classmethod
    def vacuum(cls, n_modes: int) -> "InitialGaussianState":
        return cls.from_correlation(np.zeros((n_modes, n_modes)))

    @classmethod
    def maximally_mixed(cls, n_modes: int) -> "InitialGaussianState":
        """The identity state, which is the steady state of pump-free models."""
        return cls(np.eye(2 * n_modes, dtype=complex))

    def correlation(self) -> np.ndarray:
        return correlation_from_covariance(self.majorana_covariance)


@dataclass(frozen=True)
class SpectralAmplitudes:
    """``Delta G_m(t) = sum_p D[p, s] exp(omegas[p] t)`` for ``m = sites[s]``."""

    pairs: np.ndarray
    omegas: np.ndarray
    D: np.ndarray
    sites: np.ndarray

    def sorted_by_frequency(self) -> "SpectralAmplitudes":
        """Pairs ordered by decreasing imaginary frequency."""
        order = np.lexsort((self.pairs[:, 1], self.pairs[:, 0], -self.omegas.imag))
        return SpectralAmplitudes(self.pairs[order], self.omegas[order], self.D[order], self.sites)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)


def adjoint_two_point_table(state: InitialGaussianState) -> np.ndarray:
    """``Q_ab = (1|A_a A_b|rho0)`` for an even state with covariance ``C``.

    Odd adjoint Majoranas act as left multiplication by ``w / sqrt2`` and even
    ones as parity-signed right multiplication, which gives the four blocks
    below (``m, n`` are Majorana indices).
    """
    C = state.majorana_covariance
    k = C.shape[0]
    Q = np.empty((2 * k, 2 * k), dtype=complex)
    Q[0::2, 0::2] = C / 2
    Q[1::2, 0::2] = 0.5j * C
    Q[0::2, 1::2] = -0.5j * C.T
    Q[1::2, 1::2] = C.T / 2
    return Q


def f2_coefficients(dec: RapidityDecomposition, Q: np.ndarray) -> np.ndarray:
    """``F_jl = (1|B_j B_l|rho0)``, antisymmetrized."""
    B = dec.b_rows
    F = B @ Q @ B.T
    return (F - F.T) / 2


def interference_amplitudes(dec: RapidityDecomposition, F2: np.ndarray, sites=None) -> SpectralAmplitudes:
    n = dec.n_modes
    sites = np.arange(n) if sites is None else np.asarray(sites, dtype=int)
    a, b = site_adjoint_indices(n)
    a, b = a[sites], b[sites]
    j, k = np.triu_indices(dec.betas.size, 1)
    Bt = dec.bt_rows
    D = -1j * (Bt[j][:, a] * Bt[k][:, b] - Bt[k][:, a] * Bt[j][:, b]) * F2[j, k][:, None]
    omegas = -2 * (dec.betas[j] + dec.betas[k])
    return SpectralAmplitudes(np.column_stack([j, k]), omegas, D, sites)


def delta_g_timeseries(spec: SpectralAmplitudes, times) -> TimeSeries:
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ValueError("times must be finite and non-negative")
    values = np.exp(np.outer(times, spec.omegas)) @ spec.D
    residue = np.abs(values.imag).max() if values.size else 0.0
    if residue > RESIDUE_TOL:
        raise ResidueTooLarge(f"imaginary residue {residue:.2e} in Delta G", module="dynamics",
                              tolerance=RESIDUE_TOL)
    return TimeSeries(times, values.real)


def evolve_covariance(dec: RapidityDecomposition, state: InitialGaussianState, times) -> np.ndarray:
    """Majorana covariance ``<w_m w_n>(t)`` for each time, shape ``(T, 2N, 2N)``."""
    F = f2_coefficients(dec, adjoint_two_point_table(state))
    Wt = dec.bt_rows[:, 0::2]
    Wb = dec.b_rows[:, 0::2]
    steady = Wt.T @ Wb
    out = []
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        decay = np.exp(-2 * t * dec.betas)
        out.append(2 * (Wt.T @ (decay[:, None] * F * decay[None, :]) @ Wt + steady))
    return np.array(out)


def evolve_correlation(dec: RapidityDecomposition, state: InitialGaussianState, times) -> np.ndarray:
    """``G_mn(t) = <d_m^dag d_n>(t)``, shape ``(T, N, N)``."""
    return correlation_from_covariance(evolve_covariance(dec, state, times))


def short_time_expansion(model: ModelSpec, m: int, order: int = 2, initial=None) -> np.ndarray:
    """Taylor coefficients of ``G_mm(t)`` about ``t = 0``.

    Uses ``dG/dt = X G + G X^dag + S`` from the damping generator; ``initial``
    is a correlation matrix (unit filling by default).
    """
    from .damping import damping_matrix, gain_source

    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    X, S = damping_matrix(model), gain_source(model)
    G = np.eye(model.n_modes, dtype=complex) if initial is None else np.asarray(initial, dtype=complex)
    coeffs = [G[m, m]]
    dG = X @ G + G @ X.conj().T + S
    coeffs.append(dG[m, m])
    coeffs.append((X @ dG + dG @ X.conj().T)[m, m] / 2)
    return np.real_if_close(np.array(coeffs[: order + 1]), tol=1e6)


def spectral_taylor_coefficients(spec: SpectralAmplitudes, order: int = 2) -> np.ndarray:
    """``sum_p D[p, s] omega_p^k / k!`` for ``k = 0..order``; shape ``(order+1, sites)``."""
    rows = []
    fact = 1.0
    for k in range(order + 1):
        fact *= max(k, 1)
        rows.append((spec.omegas ** k / fact) @ spec.D)
    return np.array(rows)


def decay_onset_time(times, values, slope_threshold: float) -> float:
    """First time at which ``d log|values| / dt`` drops below ``slope_threshold``."""
    times = np.asarray(times, dtype=float)
    slope = np.gradient(np.log(np.abs(values)), times)
    hit = np.flatnonzero(slope < slope_threshold)
    return float(times[hit[0]]) if hit.size else float("inf")


def three_mode_demo(D0: float, omega0: float, times, out_of_phase: bool = False) -> TimeSeries:
    """Envelope-free trace ``D0 + 2 D_pm cos(omega0 t)`` with ``D_pm = 1/4 - D0/2``.

    The amplitudes always add up to 1/2. In-phase traces need ``0 < D0 <= 1/2``;
    ``out_of_phase=True`` requires ``D0 > 1/2`` so that ``D_pm < 0``.
    """
    if out_of_phase:
        if not D0 > 0.5:
            raise ValueError("an out-of-phase trace needs D0 > 1/2")
    elif not 0 < D0 <= 0.5:
        raise ValueError("D0 must lie in (0, 1/2]")
    d_pm = 0.25 - D0 / 2
    times = np.asarray(times, dtype=float)
    return TimeSeries(times, (D0 + 2 * d_pm * np.cos(omega0 * times))[:, None])
