"""Physical model definitions: quadratic Hamiltonians and linear jump operators.

Sites are ordered (cell 1 A, cell 1 B, cell 2 A, cell 2 B, ...). Energies are
in units of the inter-cell hopping ``t2`` and angles are in radians.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12


class BoundaryCondition(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class HamiltonianSpec:
    """Single-particle matrix ``h`` of ``H = sum_mn d_m^dag h_mn d_n``."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
            raise ValueError(f"h must be a non-empty square matrix, got shape {h.shape}")
        if np.abs(h - h.conj().T).max() > HERMITICITY_TOL:
            raise ValueError("h is not Hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def n_modes(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class JumpOperatorSpec:
    """Coefficients of ``L = sum_m c_minus[m] d_m + c_plus[m] d_m^dag``."""

    c_minus: np.ndarray
    c_plus: np.ndarray

    def __post_init__(self):
        cm = np.array(self.c_minus, dtype=complex).ravel()
        cp = np.array(self.c_plus, dtype=complex).ravel()
        if cm.shape != cp.shape:
            raise ValueError("c_minus and c_plus must have the same length")
        cm.setflags(write=False)
        cp.setflags(write=False)
        object.__setattr__(self, "c_minus", cm)
        object.__setattr__(self, "c_plus", cp)

    @property
    def n_modes(self) -> int:
        return self.c_minus.shape[0]

    @property
    def is_loss(self) -> bool:
        return not np.any(self.c_plus)

    @property
    def is_gain(self) -> bool:
        return not np.any(self.c_minus)


@dataclass(frozen=True)
class ModelSpec:
    hamiltonian: HamiltonianSpec
    jumps: tuple[JumpOperatorSpec, ...] = ()
    boundary: BoundaryCondition = BoundaryCondition.OPEN

    def __post_init__(self):
        jumps = tuple(self.jumps)
        n = self.hamiltonian.n_modes
        for j in jumps:
            if j.n_modes != n:
                raise ValueError(f"jump vector length {j.n_modes} does not match {n} modes")
        object.__setattr__(self, "jumps", jumps)

    @property
    def n_modes(self) -> int:
        return self.hamiltonian.n_modes

    @property
    def conserves_particle_number(self) -> bool:
        """True when every jump is a pure loss or a pure gain."""
        return all(j.is_loss or j.is_gain for j in self.jumps)


@dataclass(frozen=True)
class SshParams:
    """Parameters of the dissipative SSH chain.

    The default angles give the standard loss ``sqrt(gamma_l/2)(d_A - i d_B)``
    and gain ``sqrt(gamma_g/2)(d_A^dag + i d_B^dag)`` per cell.
    """

    n_cells: int
    t1: float
    t2: float = 1.0
    gamma_l: float = 0.0
    gamma_g: float = 0.0
    theta: float = np.pi / 4
    phi: float = -np.pi / 2
    theta_p: float = np.pi / 4
    phi_p: float = np.pi / 2

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells}")
        if self.gamma_l < 0 or self.gamma_g < 0:
            raise ValueError("rates must be non-negative")
        values = (self.t1, self.t2, self.gamma_l, self.gamma_g,
                  self.theta, self.phi, self.theta_p, self.phi_p)
        if not all(np.isfinite(v) for v in values):
            raise ValueError("parameters must be finite")

    @property
    def n_modes(self) -> int:
        return 2 * self.n_cells

    @property
    def gamma_plus(self) -> float:
        return self.gamma_l + self.gamma_g

    @property
    def gamma_minus(self) -> float:
        return self.gamma_l - self.gamma_g


def build_ssh_hamiltonian(params: SshParams,
                          bc: BoundaryCondition = BoundaryCondition.OPEN) -> HamiltonianSpec:
    if params.n_cells < 1:
        raise ValueError("n_cells must be at least 1")
    n = params.n_modes
    h = np.zeros((n, n), dtype=complex)
    for i in range(params.n_cells):
        a, b = 2 * i, 2 * i + 1
        h[a, b] += params.t1
        h[b, a] += params.t1
        if i + 1 < params.n_cells:
            h[b, b + 1] += params.t2
            h[b + 1, b] += params.t2
    if bc is BoundaryCondition.PERIODIC:
        # with a single cell the wrap bond doubles up with the intra-cell bond
        h[n - 1, 0] += params.t2
        h[0, n - 1] += params.t2
    return HamiltonianSpec(h)


def _cell_vector(n_modes: int, cell: int, a: complex, b: complex) -> np.ndarray:
    v = np.zeros(n_modes, dtype=complex)
    v[2 * cell] = a
    v[2 * cell + 1] = b
    return v


def build_general_jumps(params: SshParams) -> list[JumpOperatorSpec]:
    """One loss and one gain jump per cell, in that order."""
    n = params.n_modes
    zero = np.zeros(n, dtype=complex)
    sl, sg = np.sqrt(params.gamma_l), np.sqrt(params.gamma_g)
    loss_a = sl * np.cos(params.theta)
    loss_b = sl * np.exp(1j * params.phi) * np.sin(params.theta)
    gain_a = sg * np.cos(params.theta_p)
    gain_b = sg * np.exp(1j * params.phi_p) * np.sin(params.theta_p)
    jumps = []
    for cell in range(params.n_cells):
        jumps.append(JumpOperatorSpec(_cell_vector(n, cell, loss_a, loss_b), zero))
        jumps.append(JumpOperatorSpec(zero, _cell_vector(n, cell, gain_a, gain_b)))
    return jumps


def build_standard_jumps(n_cells: int, gamma_l: float, gamma_g: float) -> list[JumpOperatorSpec]:
    return build_general_jumps(SshParams(n_cells=n_cells, t1=0.0, gamma_l=gamma_l, gamma_g=gamma_g))


def ssh_model(params: SshParams, bc: BoundaryCondition = BoundaryCondition.OPEN) -> ModelSpec:
    """Hamiltonian plus the general cellular jumps described by ``params``."""
    return ModelSpec(build_ssh_hamiltonian(params, bc), tuple(build_general_jumps(params)), bc)
