"""Dirac to Majorana conversion.

Majorana operators are ``w_{2m-1} = d_m + d_m^dag`` and
``w_{2m} = i (d_m - d_m^dag)``; in zero-based arrays the pair for mode ``m``
sits at indices ``2m`` and ``2m+1``. The Hamiltonian becomes
``H = sum_jk w_j H_jk w_k + trace_shift`` and each jump operator becomes
``L = sum_j l_j w_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import HamiltonianSpec, JumpOperatorSpec, ModelSpec, SshParams

VALIDATION_TOL = 1e-10


@dataclass(frozen=True)
class MajoranaForm:
    H: np.ndarray
    M: np.ndarray
    trace_shift: float

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        M = np.asarray(self.M, dtype=complex)
        if H.shape != M.shape or H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] % 2:
            raise ValueError("H and M must be matching square matrices of even size")
        if np.abs(H + H.T).max() > VALIDATION_TOL or np.abs(H + H.conj()).max() > VALIDATION_TOL:
            raise ValueError("H must be antisymmetric and purely imaginary")
        if np.abs(M - M.conj().T).max() > VALIDATION_TOL:
            raise ValueError("M must be Hermitian")
        if M.size and np.linalg.eigvalsh(M).min() < -VALIDATION_TOL:
            raise ValueError("M must be positive semidefinite")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "M", M)

    @property
    def n_modes(self) -> int:
        return self.H.shape[0] // 2


def dirac_to_majorana_h(h: HamiltonianSpec | np.ndarray) -> tuple[np.ndarray, float]:
    """Return ``(H, trace_shift)`` for the quadratic Hamiltonian ``h``.

    ``d_m^dag d_n`` expands to ``(w_{2m-1} - i w_{2m})(w_{2n-1} + i w_{2n}) / 4``;
    the diagonal terms ``d_m^dag d_m = (1 - i w_{2m-1} w_{2m}) / 2`` leave the
    constant ``Tr(h) / 2``.
    """
    if not isinstance(h, HamiltonianSpec):
        h = HamiltonianSpec(h)
    h = h.h
    n = h.shape[0]
    anti = (h - h.T) / 8
    sym = (h + h.T) / 8
    H = np.empty((2 * n, 2 * n), dtype=complex)
    H[0::2, 0::2] = anti
    H[0::2, 1::2] = -1j * sym
    H[1::2, 0::2] = 1j * sym
    H[1::2, 1::2] = anti
    return H, float(np.trace(h).real) / 2


def jump_to_majorana(j: JumpOperatorSpec) -> np.ndarray:
    l = np.empty(2 * j.n_modes, dtype=complex)
    l[0::2] = (j.c_minus + j.c_plus) / 2
    l[1::2] = -1j * (j.c_minus - j.c_plus) / 2
    return l


def bath_matrix(jumps, n_modes: int | None = None) -> np.ndarray:
    """``M = sum_mu l_mu l_mu^dag``; ``n_modes`` fixes the size when ``jumps`` is empty."""
    jumps = [np.asarray(l, dtype=complex) for l in jumps]
    if not jumps:
        if n_modes is None:
            raise ValueError("n_modes is required for an empty jump list")
        return np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    L = np.stack(jumps)
    return L.T @ L.conj()


def general_bath_matrices(params: SshParams) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form loss and gain bath matrices, block diagonal in cells."""

    def block(rate, theta, phi, sign):
        c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
        sc = np.sin(theta) * np.cos(theta)
        cp, sp = np.cos(phi) * sc, np.sin(phi) * sc
        # the gain block is the loss block with every sin(phi) and i flipped
        sp = sign * sp
        sym = np.array([
            [c2, 0, cp, sp],
            [0, c2, -sp, cp],
            [cp, -sp, s2, 0],
            [sp, cp, 0, s2],
        ])
        anti = np.array([
            [0, c2, -sp, cp],
            [-c2, 0, -cp, -sp],
            [sp, cp, 0, s2],
            [-cp, sp, -s2, 0],
        ])
        return rate / 4 * (sym + sign * 1j * anti)

    bl = block(params.gamma_l, params.theta, params.phi, +1)
    bg = block(params.gamma_g, params.theta_p, params.phi_p, -1)
    eye = np.eye(params.n_cells)
    return np.kron(eye, bl), np.kron(eye, bg)


def majorana_form(model: ModelSpec) -> MajoranaForm:
    H, shift = dirac_to_majorana_h(model.hamiltonian)
    M = bath_matrix([jump_to_majorana(j) for j in model.jumps], model.n_modes)
    return MajoranaForm(H, M, shift)
