"""Brute-force reference implementations for small systems.

Physical space: Jordan-Wigner operators on ``2**N`` dimensional Fock space and
the Lindblad superoperator acting on column-stacked density matrices,
``vec(A X B) = (B^T kron A) vec(X)``.

Adjoint space: the ``2**(2N)`` Majorana monomials ``P_alpha = w_1^a1 ... w_2N^a2N``
ordered lexicographically in ``alpha`` (``alpha_1`` most significant). An
operator ``X`` has coordinates ``x_alpha = Tr(P_alpha^dag X) / 2**N``, so the
left vacuum ``(1|`` is the first unit vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg as sla

from .errors import SizeLimit
from .majorana import MajoranaForm
from .model import JumpOperatorSpec, ModelSpec
from .thirdq import RapidityDecomposition

MAX_PHYSICAL_MODES = 4
MAX_ADJOINT_MODES = 3


def _check_size(n: int, limit: int, what: str):
    if n > limit:
        raise SizeLimit(f"{what} is limited to {limit} modes, got {n}", module="oracle")


def dirac_operators(n_modes: int) -> list[np.ndarray]:
    """Annihilation operators ``d_m`` with Jordan-Wigner strings."""
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    return [reduce(np.kron, [z] * m + [a] + [eye] * (n_modes - m - 1)) for m in range(n_modes)]


def majorana_operators(n_modes: int) -> list[np.ndarray]:
    out = []
    for d in dirac_operators(n_modes):
        out += [d + d.conj().T, 1j * (d - d.conj().T)]
    return out


def hamiltonian_operator(h: np.ndarray) -> np.ndarray:
    d = dirac_operators(h.shape[0])
    dim = 2 ** h.shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for m, n in zip(*np.nonzero(h)):
        out += h[m, n] * d[m].conj().T @ d[n]
    return out


def jump_operator(j: JumpOperatorSpec) -> np.ndarray:
    d = dirac_operators(j.n_modes)
    return sum(cm * dm + cp * dm.conj().T for cm, cp, dm in zip(j.c_minus, j.c_plus, d))


@dataclass(frozen=True)
class DenseLindbladian:
    dim: int
    superop: np.ndarray


def build_dense_lindbladian(model: ModelSpec) -> DenseLindbladian:
    _check_size(model.n_modes, MAX_PHYSICAL_MODES, "dense Lindbladian")
    dim = 2 ** model.n_modes
    eye = np.eye(dim)
    H = hamiltonian_operator(model.hamiltonian.h)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for j in model.jumps:
        Lo = jump_operator(j)
        LdL = Lo.conj().T @ Lo
        L += 2 * np.kron(Lo.conj(), Lo) - np.kron(eye, LdL) - np.kron(LdL.T, eye)
    return DenseLindbladian(dim, L)


def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def _unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return v.reshape((dim, dim), order="F")


def dense_evolve(model: ModelSpec, rho0: np.ndarray, t: float) -> np.ndarray:
    lind = build_dense_lindbladian(model)
    return _unvec(sla.expm(lind.superop * t) @ _vec(rho0), lind.dim)


def dense_steady_state(model: ModelSpec) -> np.ndarray:
    """Null vector of the superoperator, normalized to unit trace."""
    lind = build_dense_lindbladian(model)
    _, _, vh = np.linalg.svd(lind.superop)
    rho = _unvec(vh[-1].conj(), lind.dim)
    rho = rho / np.trace(rho)
    return (rho + rho.conj().T) / 2


def fock_state(occupations) -> np.ndarray:
    """Density matrix of the Fock state with the given 0/1 occupations."""
    occ = [int(x) for x in occupations]
    index = int("".join("1" if o else "0" for o in occ), 2)
    rho = np.zeros((2 ** len(occ),) * 2, dtype=complex)
    rho[index, index] = 1.0
    return rho


def gaussian_density_matrix(G: np.ndarray) -> np.ndarray:
    """Number-conserving Gaussian state with ``<d_m^dag d_n> = G`` (Hermitian, ``0 <= G <= 1``)."""
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    _check_size(n, MAX_PHYSICAL_MODES, "dense Gaussian state")
    occ, U = np.linalg.eigh(G)
    if occ.min() < -1e-10 or occ.max() > 1 + 1e-10:
        raise ValueError("correlation matrix eigenvalues must lie in [0, 1]")
    d = dirac_operators(n)
    dim = 2 ** n
    eye = np.eye(dim)
    rho = eye.astype(complex)
    for j in range(n):
        # f_j = sum_m U[m, j] d_m has <f_i^dag f_j> = occ_j delta_ij
        f = sum(U[m, j] * d[m] for m in range(n))
        num = f.conj().T @ f
        p = float(np.clip(occ[j], 0.0, 1.0))
        rho = rho @ (p * num + (1 - p) * (eye - num))
    return rho / np.trace(rho)


def correlation_matrix(rho: np.ndarray) -> np.ndarray:
    """``G_mn = Tr(d_m^dag d_n rho)``."""
    n = int(np.log2(rho.shape[0]))
    d = dirac_operators(n)
    return np.array([[np.trace(dm.conj().T @ dn @ rho) for dn in d] for dm in d])


def majorana_covariance(rho: np.ndarray) -> np.ndarray:
    """``<w_m w_n>`` for a density matrix."""
    n = int(np.log2(rho.shape[0]))
    w = majorana_operators(n)
    return np.array([[np.trace(wm @ wn @ rho) for wn in w] for wm in w])


@dataclass(frozen=True)
class DenseAdjointSpace:
    n_modes: int
    dim: int
    C_ops: tuple
    Cd_ops: tuple

    @property
    def alphas(self) -> list[tuple[int, ...]]:
        return list(itertools.product((0, 1), repeat=2 * self.n_modes))

    @property
    def A_ops(self) -> list[np.ndarray]:
        out = []
        for c, cd in zip(self.C_ops, self.Cd_ops):
            out += [(c + cd) / np.sqrt(2), 1j * (c - cd) / np.sqrt(2)]
        return out

    @property
    def parity(self) -> np.ndarray:
        return np.diag([(-1.0) ** sum(a) for a in self.alphas])

    @property
    def left_vacuum(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[0] = 1.0
        return e

    def monomials(self) -> list[np.ndarray]:
        w = majorana_operators(self.n_modes)
        eye = np.eye(2 ** self.n_modes, dtype=complex)
        return [reduce(lambda x, y: x @ y, [w[j] for j, a in enumerate(al) if a], eye)
                for al in self.alphas]

    def coordinate_maps(self) -> tuple[np.ndarray, np.ndarray]:
        """``(U, Uinv)`` mapping column-stacked operators to adjoint coordinates and back."""
        P = self.monomials()
        dim_phys = 2 ** self.n_modes
        U = np.array([_vec(p.conj()) for p in P]) / dim_phys
        Uinv = np.array([_vec(p) for p in P]).T
        return U, Uinv

    def to_adjoint(self, X: np.ndarray) -> np.ndarray:
        U, _ = self.coordinate_maps()
        return U @ _vec(X)

    def from_adjoint(self, x: np.ndarray) -> np.ndarray:
        _, Uinv = self.coordinate_maps()
        return _unvec(Uinv @ x, 2 ** self.n_modes)

    def superoperator(self, model: ModelSpec) -> np.ndarray:
        U, Uinv = self.coordinate_maps()
        return U @ build_dense_lindbladian(model).superop @ Uinv

    def left_multiplication(self, op: np.ndarray) -> np.ndarray:
        U, Uinv = self.coordinate_maps()
        return U @ np.kron(np.eye(op.shape[0]), op) @ Uinv


def dense_adjoint_build(n_modes: int) -> DenseAdjointSpace:
    """Adjoint fermions ``C_m |P_alpha) = (-1)^(alpha_1+...+alpha_{m-1}) |P_{alpha - e_m})``."""
    _check_size(n_modes, MAX_ADJOINT_MODES, "dense adjoint space")
    k = 2 * n_modes
    dim = 2 ** k
    alphas = list(itertools.product((0, 1), repeat=k))
    index = {a: i for i, a in enumerate(alphas)}
    C = []
    for m in range(k):
        Cm = np.zeros((dim, dim))
        for a in alphas:
            if a[m]:
                b = a[:m] + (0,) + a[m + 1:]
                Cm[index[b], index[a]] = (-1.0) ** sum(a[:m])
        C.append(Cm.astype(complex))
    return DenseAdjointSpace(n_modes, dim, tuple(C), tuple(c.T for c in C))


def lplus_from_formula(space: DenseAdjointSpace, F: MajoranaForm) -> np.ndarray:
    """``-2 C^dag (2iH + M + M^T) C + 2 C^dag (M - M^T) (C^dag)^T`` as a dense matrix."""
    D = 2j * F.H + F.M + F.M.T
    P = F.M - F.M.T
    C, Cd = space.C_ops, space.Cd_ops
    k = len(C)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for i in range(k):
        for j in range(k):
            if D[i, j]:
                out += -2 * D[i, j] * Cd[i] @ C[j]
            if P[i, j]:
                out += 2 * P[i, j] * Cd[i] @ Cd[j]
    return out


def mode_operators(space: DenseAdjointSpace, dec: RapidityDecomposition):
    """Explicit ``(B_m, B~_m)`` matrices built from the rows of ``V``."""
    A = np.array(space.A_ops)
    B = np.tensordot(dec.b_rows, A, axes=1)
    Bt = np.tensordot(dec.bt_rows, A, axes=1)
    return list(B), list(Bt)
