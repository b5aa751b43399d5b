"""Third-quantization core.

In the even-parity sector the Liouvillian is

    L+ = -2 C^dag D C + 2 C^dag P (C^dag)^T

with the drift ``D = 2iH + M + M^T`` and the pump ``P = M - M^T``. Equivalently ``L+ = sum_ab A_a T_ab A_b - T0`` with
the antisymmetric 4N x 4N structure matrix ``T``; its spectrum is ``{+beta,
-beta}`` where the rapidities ``beta`` are the eigenvalues of ``D``.

Array conventions (zero-based): Majorana index ``j`` in ``0..2N-1``; adjoint
Majorana ``A_{2j} = (C_j + C_j^dag)/sqrt2`` and ``A_{2j+1} = i(C_j - C_j^dag)/sqrt2``.
Row ``2m`` of ``V`` holds mode ``B_m`` and row ``2m+1`` holds ``B~_m``, so that
``B_m = sum_a V[2m, a] A_a``.

Two decomposition routes are provided:

``"drift"`` (default)
    Diagonalize ``D`` after a diagonal similarity that equalizes ``|D_ij|`` and
    ``|D_ji|``. For skin-effect models the eigenvectors of ``D`` are
    exponentially localized and a plain eigensolver loses their tails; after
    the gauge they are extended and every component is accurate. The right
    eigenvectors ``g`` give ``B~ = g^T C^dag``; the left eigenvectors ``a`` give
    ``B = a^T C + (Y a)^T C^dag`` where ``Y`` solves ``D Y + Y D^T = 2P``.

``"pairing"``
    Diagonalize ``T`` directly, match ``lambda`` with ``-lambda``, and normalize
    each pair under the bilinear form. Accurate for small or weakly non-normal
    models only; kept as an independent check.

Degenerate eigenvalues are resolved with the particle-number superoperator
when the model conserves particle number, which makes every mode carry a
definite charge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NormalizationFailure, PairingFailure, UnsupportedRegime
from .majorana import MajoranaForm

PAIRING_TOL = 1e-8
CONDITION_LIMIT = 1e6
NORMALIZATION_FLOOR = 1e-12
ZERO_MODE_TOL = 1e-9
CLUSTER_TOL = 1e-7
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class StructureMatrix:
    T: np.ndarray
    T0: complex

    def __post_init__(self):
        T = np.asarray(self.T, dtype=complex)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] % 4:
            raise ValueError(f"T must be square with size divisible by 4, got {T.shape}")
        if np.abs(T + T.T).max() > 1e-12 * max(1.0, np.abs(T).max()):
            raise ValueError("T must be antisymmetric")
        object.__setattr__(self, "T", T)

    @property
    def n_modes(self) -> int:
        return self.T.shape[0] // 4

    def majorana_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """Recover ``(H, M)`` from the block layout of ``T``."""
        M = self.T[0::2, 1::2] / 2j
        H = (self.T[0::2, 0::2] + self.T[1::2, 1::2]) / -4j
        return H, M


@dataclass(frozen=True)
class RapidityDecomposition:
    """Normal modes of the even-sector Liouvillian.

    ``betas[m]`` has non-negative real part; ``V[2m]`` is ``B_m`` and
    ``V[2m+1]`` is ``B~_m`` in the adjoint Majorana basis.
    """

    betas: np.ndarray
    V: np.ndarray
    zero_mode_flags: np.ndarray
    T0: complex = 0.0

    @property
    def n_modes(self) -> int:
        return self.V.shape[0] // 4

    @property
    def b_rows(self) -> np.ndarray:
        return self.V[0::2]

    @property
    def bt_rows(self) -> np.ndarray:
        return self.V[1::2]

    @property
    def has_zero_modes(self) -> bool:
        return bool(np.any(self.zero_mode_flags))

    def regauged(self, scale) -> "RapidityDecomposition":
        """Rescale ``B_m`` by ``scale[m]`` and ``B~_m`` by ``1/scale[m]``."""
        s = np.broadcast_to(np.asarray(scale, dtype=complex), self.betas.shape)
        V = self.V.copy()
        V[0::2] *= s[:, None]
        V[1::2] /= s[:, None]
        return RapidityDecomposition(self.betas, V, self.zero_mode_flags, self.T0)


def build_structure_matrix(F: MajoranaForm) -> StructureMatrix:
    H, M = F.H, F.M
    n2 = H.shape[0]
    T = np.empty((2 * n2, 2 * n2), dtype=complex)
    T[0::2, 0::2] = -2j * H + M - M.T
    T[0::2, 1::2] = 2j * M
    T[1::2, 0::2] = -2j * M.T
    T[1::2, 1::2] = -2j * H - M + M.T
    return StructureMatrix(T, 2 * np.trace(M))


def build_drift_matrix(F: MajoranaForm) -> np.ndarray:
    return 2j * F.H + F.M + F.M.T


def charge_matrix(n_modes: int) -> np.ndarray:
    """``q`` with ``ad_N = 4 C^dag q C`` for the particle number ``N = sum d^dag d``."""
    q = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    idx = np.arange(n_modes)
    q[2 * idx, 2 * idx + 1] = -0.25j
    q[2 * idx + 1, 2 * idx] = 0.25j
    return q


def charge_structure_matrix(n_modes: int) -> np.ndarray:
    """Structure matrix of ``ad_N`` in the adjoint Majorana basis."""
    q = charge_matrix(n_modes)
    TN = np.zeros((4 * n_modes, 4 * n_modes), dtype=complex)
    TN[0::2, 0::2] = 2 * q
    TN[1::2, 1::2] = 2 * q
    return TN


def balancing_gauge(D: np.ndarray) -> np.ndarray:
    """Positive weights ``s`` making ``|s_i D_ij / s_j|`` as symmetric as possible.

    Solves ``log s_i - log s_j = log|D_ji| / 2 - log|D_ij| / 2`` over all pairs
    where both entries are non-negligible, in the least-squares sense. On a
    chain (a tree) the solution is exact.
    """
    n = D.shape[0]
    mag = np.abs(D)
    floor = 1e-14 * max(mag.max(), 1e-300)
    iu, ju = np.triu_indices(n, 1)
    ok = (mag[iu, ju] > floor) & (mag[ju, iu] > floor)
    iu, ju = iu[ok], ju[ok]
    if iu.size == 0:
        return np.ones(n)
    R = np.zeros((iu.size, n))
    rows = np.arange(iu.size)
    R[rows, iu] = 1.0
    R[rows, ju] = -1.0
    rhs = 0.5 * (np.log(mag[ju, iu]) - np.log(mag[iu, ju]))
    x = np.linalg.lstsq(R, rhs, rcond=None)[0]
    return np.exp(x - x.mean())


def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group indices of numerically coincident values (single linkage)."""
    close = np.abs(values[:, None] - values[None, :]) <= tol
    n_groups, labels = connected_components(csr_matrix(close), directed=False)
    return [np.flatnonzero(labels == k) for k in range(n_groups)]


def _biorthonormalize(left: np.ndarray, right: np.ndarray, charge: np.ndarray | None,
                      values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Make ``left @ right = I`` cluster by cluster, diagonalizing ``charge`` inside clusters."""
    left, right = left.copy(), right.copy()
    scale = max(1.0, np.abs(values).max())
    for idx in _clusters(values, tol * scale):
        Lc, Rc = left[idx], right[:, idx]
        gram = Lc @ Rc
        if np.linalg.svd(gram, compute_uv=False).min() < NORMALIZATION_FLOOR:
            raise NormalizationFailure(
                f"left/right eigenvectors are (nearly) orthogonal near {values[idx[0]]:.6g}",
                module="thirdq", tolerance=NORMALIZATION_FLOOR)
        Lc = np.linalg.solve(gram, Lc)
        if charge is not None and idx.size > 1:
            nu, W = np.linalg.eig(Lc @ charge @ Rc)
            Rc = Rc @ W
            Lc = np.linalg.solve(W, Lc)
        left[idx], right[:, idx] = Lc, Rc
    return left, right


def _is_charge_symmetric(D: np.ndarray, P: np.ndarray, q: np.ndarray) -> bool:
    scale = max(1.0, np.abs(D).max(), np.abs(P).max())
    return (np.abs(D @ q - q @ D).max() < 1e-12 * scale
            and np.abs(P @ q - q @ P).max() < 1e-12 * scale)


def _decompose_drift(H: np.ndarray, M: np.ndarray, T0: complex) -> RapidityDecomposition:
    D = 2j * H + M + M.T
    P = M - M.T
    n2 = D.shape[0]
    q = charge_matrix(n2 // 2)
    symmetric = _is_charge_symmetric(D, P, q)

    s = balancing_gauge(D)
    Dg = (s[:, None] * D) / s[None, :]
    betas, vl, vr = sla.eig(Dg, left=True, right=True)
    left = vl.conj().T          # rows: a^T Dg = beta a^T
    right = vr                  # columns: Dg g = beta g
    qg = (s[:, None] * q) / s[None, :] if symmetric else None
    left, right = _biorthonormalize(left, right, qg, betas, CLUSTER_TOL)

    kappa = np.linalg.norm(left, axis=1) * np.linalg.norm(right, axis=0)
    if kappa.max() > CONDITION_LIMIT:
        raise NormalizationFailure(
            f"eigenvalue condition number {kappa.max():.2e} (near-defective drift matrix)",
            module="thirdq", tolerance=CONDITION_LIMIT)
    # balance each pair so that |a| = |g| in the gauge basis, then undo the gauge
    norm = np.sqrt(np.linalg.norm(left, axis=1) / np.linalg.norm(right, axis=0))
    left /= norm[:, None]
    right *= norm[None, :]
    a = left * s[None, :]
    g = right / s[:, None]
    betas = np.einsum("mi,ij,jm->m", left, Dg, right)

    if np.any(betas.real < -1e-10 * max(1.0, np.abs(betas).max())):
        raise UnsupportedRegime("drift matrix has an eigenvalue with negative real part",
                                module="thirdq", tolerance=1e-10)

    if np.abs(P).max() <= 1e-14 * max(1.0, np.abs(D).max()):
        Y = np.zeros_like(D)
    else:
        sums = betas[:, None] + betas[None, :]
        if np.abs(sums).min() < ZERO_MODE_TOL:
            raise UnsupportedRegime(
                "pump term present with pairs of zero modes; the normal modes are not unique",
                module="thirdq", tolerance=ZERO_MODE_TOL)
        Y = sla.solve_sylvester(D, D.T, 2 * P)

    c_coeff = a                       # B_m: coefficients on C
    cd_coeff = a @ Y.T                # B_m: coefficients on C^dag
    V = np.empty((2 * n2, 2 * n2), dtype=complex)
    V[0::2, 0::2] = (c_coeff + cd_coeff) / SQRT2
    V[0::2, 1::2] = -1j * (c_coeff - cd_coeff) / SQRT2
    V[1::2, 0::2] = g.T / SQRT2
    V[1::2, 1::2] = 1j * g.T / SQRT2

    order = np.lexsort((betas.imag, betas.real))
    betas = betas[order]
    rows = np.empty(2 * n2, dtype=int)
    rows[0::2] = 2 * order
    rows[1::2] = 2 * order + 1
    V = V[rows]
    return RapidityDecomposition(betas, V, np.abs(betas.real) < ZERO_MODE_TOL, T0)


def _bilinear_gram_schmidt(X: np.ndarray) -> np.ndarray:
    """Columns ``e`` with ``e_i . e_j = delta_ij`` under the bilinear form."""
    out = []
    for v in X.T:
        v = v.copy()
        for e in out:
            v = v - (e @ v) * e
        nrm = v @ v
        if abs(nrm) < NORMALIZATION_FLOOR * max(1.0, np.vdot(v, v).real):
            raise NormalizationFailure("isotropic vector in a zero-rapidity eigenspace",
                                       module="thirdq", tolerance=NORMALIZATION_FLOOR)
        out.append(v / np.sqrt(nrm))
    return np.array(out).T


def _decompose_pairing(T: np.ndarray, T0: complex) -> RapidityDecomposition:
    n4 = T.shape[0]
    lam, X = np.linalg.eig(T)
    scale = max(1.0, np.abs(T).max())
    tol = PAIRING_TOL * scale
    groups = _clusters(lam, tol)
    centers = [lam[g].mean() for g in groups]
    TN = charge_structure_matrix(n4 // 4)
    symmetric = np.abs(T @ TN - TN @ T).max() < 1e-12 * scale

    def charge_basis(Xc):
        if not symmetric or Xc.shape[1] == 1:
            return Xc
        R = np.linalg.lstsq(Xc, TN @ Xc, rcond=None)[0]
        _, W = np.linalg.eig(R)
        return Xc @ W

    plus_rows, minus_rows, betas, zero = [], [], [], []
    used = set()
    for gi, g in enumerate(groups):
        if gi in used:
            continue
        c = centers[gi]
        dist = [abs(centers[h] + c) for h in range(len(groups))]
        partner = int(np.argmin(dist))
        if dist[partner] > tol * max(1, len(g)) or len(groups[partner]) != len(g):
            raise PairingFailure(f"eigenvalue {c:.6g} has no partner of opposite sign",
                                 module="thirdq", tolerance=PAIRING_TOL)
        used.update({gi, partner})
        if partner == gi:
            # zero eigenvalues: split the eigenspace into isotropic pairs
            E = _bilinear_gram_schmidt(charge_basis(X[:, g]))
            for k in range(0, E.shape[1], 2):
                p = (E[:, k] + 1j * E[:, k + 1]) / SQRT2
                m = (E[:, k] - 1j * E[:, k + 1]) / SQRT2
                plus_rows.append(p)
                minus_rows.append(m)
                betas.append(0.0)
                zero.append(True)
            continue
        first, second = (g, groups[partner])
        if centers[gi].real < 0 or (abs(centers[gi].real) <= ZERO_MODE_TOL and centers[gi].imag < 0):
            first, second = second, first
        Xp = charge_basis(X[:, first])
        Xm = charge_basis(X[:, second])
        gram = Xp.T @ Xm
        if np.linalg.svd(gram, compute_uv=False).min() < NORMALIZATION_FLOOR:
            raise NormalizationFailure("bilinear normalization vanishes (defective structure matrix)",
                                       module="thirdq", tolerance=NORMALIZATION_FLOOR)
        Xm = Xm @ np.linalg.inv(gram)          # now Xp^T Xm = I
        for k in range(Xp.shape[1]):
            p, m = Xp[:, k], Xm[:, k]
            plus_rows.append(p)
            minus_rows.append(m)
            beta = m @ T @ p
            betas.append(beta)
            zero.append(abs(beta.real) < ZERO_MODE_TOL)

    betas = np.array(betas, dtype=complex)
    order = np.lexsort((betas.imag, betas.real))
    V = np.empty((n4, n4), dtype=complex)
    V[0::2] = np.array(plus_rows)[order]
    V[1::2] = np.array(minus_rows)[order]
    return RapidityDecomposition(betas[order], V, np.array(zero)[order], T0)


def rapidity_decompose(S: StructureMatrix, method: str = "drift") -> RapidityDecomposition:
    """Paired normal-mode decomposition of the structure matrix."""
    if method == "drift":
        H, M = S.majorana_blocks()
        return _decompose_drift(H, M, S.T0)
    if method == "pairing":
        return _decompose_pairing(S.T, S.T0)
    raise ValueError(f"unknown method {method!r}")


def decompose(F: MajoranaForm, method: str = "drift") -> RapidityDecomposition:
    return rapidity_decompose(build_structure_matrix(F), method)


def liouvillian_eigenvalues(dec: RapidityDecomposition, max_modes: int = 20) -> np.ndarray:
    """All ``-2 sum beta_m nu_m`` when ``2N <= max_modes``, else the generators ``-2 beta_m``."""
    b = -2 * dec.betas
    if b.size > max_modes:
        return b
    bits = (np.arange(2 ** b.size)[:, None] >> np.arange(b.size)[::-1]) & 1
    return bits @ b


def left_vacuum_residual(dec: RapidityDecomposition) -> float:
    """Largest ``|V[2m+1, 2j] + i V[2m+1, 2j+1]|`` over decaying modes."""
    bt = dec.bt_rows[~dec.zero_mode_flags]
    if bt.size == 0:
        return 0.0
    return float(np.abs(bt[:, 0::2] + 1j * bt[:, 1::2]).max())
