"""Momentum-space solver for the periodic SSH chain.

With translation invariance every momentum ``k`` decouples into a two-mode
problem with ``h_k = [[0, A], [A^*, 0]]``, ``A = t1 + t2 exp(-ik) = R + iI``,
and the cellular jumps of the chain acting on ``(d_kA, d_kB)``.

The tilde basis used by the equation of motion is the normalized pair
``e1 = (d_kA - i d_kB)/sqrt2`` and ``e2 = (d_kA + i d_kB)/sqrt2``. In that
basis the loss only touches ``e1`` and the gain only ``e2`` for the standard
jumps, and the equation of motion closes with ``gamma = gamma_+/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .dynamics import InitialGaussianState, evolve_correlation
from .errors import UnsupportedRegime
from .majorana import majorana_form
from .model import HamiltonianSpec, ModelSpec, SshParams, build_general_jumps
from .thirdq import build_drift_matrix, build_structure_matrix, decompose

TILDE_TOL = 1e-8
TILDE_HERMITICITY_TOL = 1e-10
# rows map (d_A, d_B) onto (e1, e2)
_TILDE = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)


def k_grid(n_cells: int) -> np.ndarray:
    """Allowed momenta ``2 pi n / n_cells`` of a ring with ``n_cells`` unit cells."""
    if n_cells < 1:
        raise ValueError("n_cells must be positive")
    return 2 * np.pi * np.arange(n_cells) / n_cells


def hopping_amplitude(params: SshParams, k: float) -> complex:
    return params.t1 + params.t2 * np.exp(-1j * k)


@dataclass(frozen=True)
class KBlock:
    """Kernels of ``L+_k = C^dag drift C + C^dag pump (C^dag)^T`` at one momentum."""

    k: float
    R: float
    I: float
    drift: np.ndarray
    pump: np.ndarray


def k_block(params: SshParams, k: float) -> KBlock:
    A = hopping_amplitude(params, k)
    R, I = A.real, A.imag
    g, gm = params.gamma_plus, params.gamma_minus
    drift = np.array([
        [-g / 2, 0, I, -R + g / 2],
        [0, -g / 2, R - g / 2, I],
        [-I, -R - g / 2, -g / 2, 0],
        [R + g / 2, -I, 0, -g / 2],
    ], dtype=complex)
    pump = 0.5j * gm * np.array([
        [0, 1, 1, 0],
        [-1, 0, 0, 1],
        [-1, 0, 0, 1],
        [0, -1, -1, 0],
    ], dtype=complex)
    return KBlock(float(k), float(R), float(I), drift, pump)


def k_model(params: SshParams, k: float) -> ModelSpec:
    """Two-mode model of momentum ``k``; the jumps are those of a single cell."""
    A = hopping_amplitude(params, k)
    h = np.array([[0, A], [np.conj(A), 0]])
    cell = SshParams(n_cells=1, t1=params.t1, t2=params.t2, gamma_l=params.gamma_l,
                     gamma_g=params.gamma_g, theta=params.theta, phi=params.phi,
                     theta_p=params.theta_p, phi_p=params.phi_p)
    return ModelSpec(HamiltonianSpec(h), tuple(build_general_jumps(cell)))


def closed_form_eigenvalues(params: SshParams, k: float) -> np.ndarray:
    """``(l1, -l1, l3, -l3)`` for the standard jumps.

    ``l1 = (g - i s)/4`` with ``s`` the principal root of
    ``z = -g^2 + 4I^2 + 4R^2 + 4igI``, and ``l3 = (g - i conj(s))/4``. The
    second root is taken as ``conj(s)`` rather than the principal root of
    ``conj(z)``: the latter equals ``conj(s)`` too and would make ``l3`` the
    conjugate of ``l1`` instead of its partner with ``Re l1 + Re l3 = g/2``.
    """
    A = hopping_amplitude(params, k)
    R, I = A.real, A.imag
    g = params.gamma_plus
    s = np.sqrt(complex(-g * g + 4 * I * I + 4 * R * R + 4j * g * I))
    l1 = (g - 1j * s) / 4
    l3 = (g - 1j * np.conj(s)) / 4
    return np.array([l1, -l1, l3, -l3])


def closed_form_rapidities(params: SshParams, k: float) -> np.ndarray:
    """Rapidities of the block, ``{l1, l3}`` and their conjugates."""
    l1, _, l3, _ = closed_form_eigenvalues(params, k)
    return np.array([l1, l3, np.conj(l1), np.conj(l3)])


def zero_mode_momentum(params: SshParams) -> float | None:
    """Momentum ``k0`` with a purely imaginary rapidity (standard jumps, ``gamma_+ > 0``).

    ``Re l3 = 0`` requires ``Im s = gamma_+``, i.e. ``R = 0`` with ``I >= 0``, so
    ``cos k0 = -t1/t2`` and ``sin k0 <= 0``; none exists for ``|t1| > |t2|``.
    """
    if params.t2 == 0 or abs(params.t1) > abs(params.t2):
        return None
    return float(2 * np.pi - np.arccos(-params.t1 / params.t2))


def numeric_rapidities(params: SshParams, k: float) -> np.ndarray:
    """Eigenvalues of the drift matrix ``2iH + M + M^T`` of the k block."""
    return np.linalg.eigvals(build_drift_matrix(majorana_form(k_model(params, k))))


def numeric_structure_eigenvalues(params: SshParams, k: float) -> np.ndarray:
    """The eight eigenvalues ``{+beta, -beta}`` of the k-block structure matrix."""
    return np.linalg.eigvals(build_structure_matrix(majorana_form(k_model(params, k))).T)


def multiset_distance(a, b) -> float:
    """Largest deviation under the optimal one-to-one matching of two value sets."""
    a, b = np.asarray(a, dtype=complex).ravel(), np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError("multisets must have equal size")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


@dataclass(frozen=True)
class TildeCorrelation:
    """``(G~11, G~12, G~21, G~22)`` with ``G~_ss' = <e_s^dag e_s'>``."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=complex).ravel()
        if g.shape != (4,):
            raise ValueError("a tilde correlation has four entries")
        for x in (g[0], g[3]):
            if abs(x.imag) > TILDE_HERMITICITY_TOL or not -TILDE_TOL <= x.real <= 1 + TILDE_TOL:
                raise ValueError(f"diagonal entry {x} is not an occupation")
        if abs(g[2] - np.conj(g[1])) > TILDE_HERMITICITY_TOL:
            raise ValueError("G~21 must be the conjugate of G~12")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def from_k_correlation(cls, G) -> "TildeCorrelation":
        """From the 2x2 matrix ``<d_a^dag d_b>`` over ``a, b in (A, B)``."""
        return cls((_TILDE.conj() @ np.asarray(G) @ _TILDE.T).ravel())

    @classmethod
    def unit_filling(cls) -> "TildeCorrelation":
        return cls([1, 0, 0, 1])

    def k_correlation(self) -> np.ndarray:
        return _TILDE.T @ self.g.reshape(2, 2) @ _TILDE.conj()


def g_k_from_tilde(g: TildeCorrelation) -> tuple[float, float]:
    """``(G_kA, G_kB)`` from the tilde correlations."""
    x = g.g
    return (float(((x[0] + x[1] + x[2] + x[3]) / 2).real),
            float(((x[0] - x[1] - x[2] + x[3]) / 2).real))


def default_eom_gamma(params: SshParams) -> float:
    return params.gamma_plus / 2


def eom_matrix(params: SshParams, k: float, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix and constant source of ``d(G~)/dt``."""
    A = hopping_amplitude(params, k)
    ar, ai = A.real, A.imag
    K = np.array([
        [-4 * gamma, -ar, -ar, 0],
        [ar, 2 * (-1j * ai - gamma), 0, -ar],
        [ar, 0, 2 * (1j * ai - gamma), -ar],
        [0, ar, ar, 0],
    ], dtype=complex)
    return K, np.array([2 * gamma, 0, 0, 0], dtype=complex)


def _eom_values(params, k, g0, times, gamma):
    K, src = eom_matrix(params, k, gamma)
    aug = np.zeros((5, 5), dtype=complex)
    aug[:4, :4] = K
    aug[:4, 4] = src
    x0 = np.append(np.asarray(g0, dtype=complex), 1.0)
    return np.array([(sla.expm(aug * t) @ x0)[:4] for t in np.atleast_1d(times)])


def eom_evolve(params: SshParams, k: float, g0: TildeCorrelation, times,
               gamma: float | None = None) -> list[TildeCorrelation]:
    """Exact solution of the tilde-basis equation of motion at each time."""
    if params.gamma_minus != 0:
        raise UnsupportedRegime("the tilde equation of motion needs gamma_l = gamma_g",
                                module="kspace")
    gamma = default_eom_gamma(params) if gamma is None else gamma
    return [TildeCorrelation(v) for v in _eom_values(params, k, g0.g, times, gamma)]


def eom_steady_state(params: SshParams, k: float, gamma: float | None = None) -> np.ndarray:
    """Fixed point of the equation of motion, ``K g = -source``."""
    gamma = default_eom_gamma(params) if gamma is None else gamma
    K, src = eom_matrix(params, k, gamma)
    return np.linalg.solve(K, -src)


def adjoint_k_occupations(params: SshParams, k: float, times, initial=None,
                          method: str = "drift") -> np.ndarray:
    """``(G_kA, G_kB)`` per time from the normal modes of the k block, shape ``(T, 2)``."""
    model = k_model(params, k)
    G0 = np.eye(2) if initial is None else np.asarray(initial)
    dec = decompose(majorana_form(model), method)
    G = evolve_correlation(dec, InitialGaussianState.from_correlation(G0), times)
    return np.stack([G[:, 0, 0].real, G[:, 1, 1].real], axis=1)


@dataclass(frozen=True)
class GammaCalibration:
    gamma: float
    ratio: float
    probe_k: float
    probe_t: float
    residual: float


def calibrate_eom_gamma(params: SshParams, probe_k: float = 0.3, probe_t: float = 1.5) -> GammaCalibration:
    """Fit the equation-of-motion rate to the normal-mode evolution at one probe."""
    if params.gamma_plus <= 0:
        raise UnsupportedRegime("calibration needs a positive total rate", module="kspace")
    target = adjoint_k_occupations(params, probe_k, [probe_t])[0]

    def mismatch(gamma):
        v = _eom_values(params, probe_k, [1, 0, 0, 1], [probe_t], gamma)[0]
        return float(np.sum((np.array(g_k_from_tilde(TildeCorrelation(v))) - target) ** 2))

    res = minimize_scalar(mismatch, bounds=(0.0, 2 * params.gamma_plus), method="bounded",
                          options={"xatol": 1e-12})
    return GammaCalibration(float(res.x), float(res.x / params.gamma_plus), probe_k, probe_t,
                            float(np.sqrt(res.fun)))


@dataclass(frozen=True)
class OccupationProfile:
    """Site occupations ``G_jj`` of the ring and their spread per sublattice."""

    values: np.ndarray
    spread: float


def k_occupations(params: SshParams, k: float, times) -> np.ndarray:
    """Unit-filling ``(G_kA, G_kB)`` per time, shape ``(T, 2)``.

    Uses the closed equation of motion when gain and loss balance and the
    normal modes of the block otherwise.
    """
    if params.gamma_minus == 0:
        states = eom_evolve(params, k, TildeCorrelation.unit_filling(), times)
        return np.array([g_k_from_tilde(s) for s in states])
    return adjoint_k_occupations(params, k, times)


def real_space_occupations_pbc(params: SshParams, t: float) -> OccupationProfile:
    """Site occupations of the ring at time ``t`` from unit filling, as a Brillouin-zone average."""
    per_k = np.array([k_occupations(params, k, [t])[0] for k in k_grid(params.n_cells)])
    # G_{j,A(B)} = (1/n_cells) sum_k G_{k,A(B)}; the phases exp(ik(j-j)) cancel on the diagonal
    mean = per_k.mean(axis=0)
    values = np.tile(mean, params.n_cells)
    spread = max(np.ptp(values[0::2]), np.ptp(values[1::2]))
    return OccupationProfile(values, float(spread))
