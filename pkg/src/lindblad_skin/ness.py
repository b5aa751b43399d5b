"""Steady-state occupations and single-normal-mode excitation profiles.

The occupation of site ``m`` acts on adjoint vectors as left multiplication by
``d_m^dag d_m = 1/2 - i A_a A_b`` with ``a = 4m`` and ``b = 4m + 2`` (zero-based
adjoint Majorana indices of ``w_{2m}`` and ``w_{2m+1}``). Expanding
``A_a = sum_j V[2j+1, a] B_j + V[2j, a] B~_j`` and using ``(1|B~ = 0`` and
``B|NESS) = 0`` reduces every expectation value to the contraction
``(1|B_i B~_j|NESS) = delta_ij``.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedRegime
from .majorana import majorana_form
from .model import ModelSpec
from .thirdq import RapidityDecomposition


def site_adjoint_indices(n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Adjoint Majorana columns ``(a, b)`` representing ``w_{2m} w_{2m+1}`` per site."""
    a = 4 * np.arange(n_modes)
    return a, a + 2


def _require_unique_ness(dec: RapidityDecomposition):
    if dec.has_zero_modes:
        raise UnsupportedRegime("zero-rapidity modes make the steady state initial-state dependent",
                                module="ness", tolerance=1e-9)


def ness_occupations(dec: RapidityDecomposition, model: ModelSpec | None = None) -> np.ndarray:
    """Site occupations ``G_mm`` in the steady state.

    When gain and loss balance on every jump pair (no pump term) the steady
    state is the identity and every occupation is exactly 1/2. Otherwise
    ``G_m = 1/2 - i sum_j V[2j+1, a] V[2j, b]``.
    """
    _require_unique_ness(dec)
    n = dec.n_modes
    if model is not None and _pump_free(model):
        return np.full(n, 0.5)
    a, b = site_adjoint_indices(n)
    s = np.einsum("ja,ja->a", dec.bt_rows[:, a], dec.b_rows[:, b])
    return 0.5 + (-1j * s).real


def _pump_free(model: ModelSpec) -> bool:
    M = majorana_form(model).M
    return np.abs(M - M.T).max() <= 1e-14 * max(1.0, np.abs(M).max())


def all_mode_deltas(dec: RapidityDecomposition) -> np.ndarray:
    """Matrix ``delta[n, m]`` of occupation changes when mode ``n`` is excited.

    ``delta[n, m] = -i (V[2n, a] V[2n+1, b] - V[2n, b] V[2n+1, a])``; complex in
    general inside degenerate eigenspaces, real for non-degenerate modes.
    """
    a, b = site_adjoint_indices(dec.n_modes)
    B, Bt = dec.b_rows, dec.bt_rows
    return -1j * (B[:, a] * Bt[:, b] - B[:, b] * Bt[:, a])


def single_mode_delta(dec: RapidityDecomposition, n: int) -> np.ndarray:
    """Occupation difference profile for the single excitation ``B~_n |NESS)``."""
    if not 0 <= n < dec.betas.size:
        raise IndexError(f"mode index {n} out of range 0..{dec.betas.size - 1}")
    return all_mode_deltas(dec)[n]


def mode_report(dec: RapidityDecomposition) -> list[tuple[int, complex, np.ndarray, float]]:
    """``(mode, beta, delta profile, profile sum)`` sorted by decreasing ``|Re beta|``."""
    deltas = all_mode_deltas(dec)
    order = sorted(range(dec.betas.size), key=lambda n: (-abs(dec.betas[n].real), n))
    return [(n, dec.betas[n], deltas[n], complex(deltas[n].sum()).real) for n in order]
