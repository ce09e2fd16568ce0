"""Gaussian two-form field samples and their dual pairings.

A sample holds real coefficients indexed ``[slot][alpha][k]``. The time slots
(0,1), (0,2), (0,3) are expressed on the orthonormal basis of range(d_0), the
spatial slots (1,2), (1,3), (2,3) on the monomial basis. Every coefficient is
an independent N(0, 1/kappa^2) variate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .bargmann import SLOT_INDEX, FockWorkspace, psi, xi_sign
from .errors import ConfigError, WilsonLabError
from .lie import Representation

N_SLOTS = 6
TIME_SLOTS = 3
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class WienerConfig:
    kappa: float
    workspace: FockWorkspace
    lie_dim: int
    seed: int = 0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if int(self.lie_dim) != self.lie_dim or self.lie_dim < 1:
            raise ConfigError("lie_dim must be a positive integer")
        if not 0 <= int(self.seed) <= _MASK64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def n_coeffs(self) -> int:
        return N_SLOTS * self.lie_dim * self.workspace.dim


@dataclass(frozen=True)
class FieldSample:
    coeffs: np.ndarray  # (6, N, dim)
    workspace: FockWorkspace
    kappa: float

    def __add__(self, other: "FieldSample") -> "FieldSample":
        if other.workspace is not self.workspace:
            raise WilsonLabError("cannot add samples from different workspaces")
        return FieldSample(self.coeffs + other.coeffs, self.workspace, self.kappa)


def standard_normals(seed: int, index: int, count: int) -> np.ndarray:
    """``count`` N(0,1) draws from the Philox stream keyed by (seed, index).

    Position j of the stream is the flat coefficient index j, so any coefficient
    is reproducible from (seed, index, j) alone.
    """
    bg = np.random.Philox(key=(int(seed) & _MASK64) | (int(index) << 64))
    raw = bg.random_raw(count)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


def sample_field(config: WienerConfig, sample_index: int) -> FieldSample:
    shape = (N_SLOTS, config.lie_dim, config.workspace.dim)
    z = standard_normals(config.seed, sample_index, config.n_coeffs).reshape(shape)
    return FieldSample(z / config.kappa, config.workspace, config.kappa)


def sample_batch(config: WienerConfig, start: int, count: int) -> np.ndarray:
    """Coefficients of samples ``start .. start+count-1`` stacked as (S, 6, N, dim)."""
    out = np.empty((count, N_SLOTS, config.lie_dim, config.workspace.dim))
    for s in range(count):
        out[s] = standard_normals(config.seed, start + s, config.n_coeffs).reshape(out.shape[1:])
    out /= config.kappa
    return out


def field_from_potential(workspace: FockWorkspace, potential: np.ndarray, kappa: float = 1.0) -> FieldSample:
    """Deterministic field ``B = d A`` from a polynomial potential.

    ``potential`` has shape (3, N, dim): spatial components A_1, A_2, A_3 on the
    monomial basis. The time slots receive ``d_0 A_i`` in range coordinates, the
    spatial slots ``d_i A_j - d_j A_i`` truncated to degree D.
    """
    a = np.asarray(potential)
    if a.ndim != 3 or a.shape[0] != 3 or a.shape[2] != workspace.dim:
        raise ConfigError(f"potential must have shape (3, N, {workspace.dim}), got {a.shape}")
    out = np.zeros((N_SLOTS,) + a.shape[1:], dtype=a.dtype)
    d = [workspace.d_op_matrix(k) for k in range(4)]
    for i in range(3):
        out[i] = workspace.to_range((d[0] @ a[i].T).T)
    for (p, q), slot in SLOT_INDEX.items():
        if p == 0:
            continue
        full = (d[p] @ a[q - 1].T).T - (d[q] @ a[p - 1].T).T
        out[slot] = full[:, : workspace.dim]
    return FieldSample(out, workspace, kappa)


def _check_slot(a: int, b: int) -> int:
    if (a, b) not in SLOT_INDEX:
        raise ConfigError(f"({a}, {b}) is not a two-form slot; need 0 <= a < b <= 3")
    return SLOT_INDEX[(a, b)]


def pair_xi(sample: FieldSample, a: int, b: int, gamma: int, w, tail_eps: float | None = None) -> complex:
    """``(B, xi_ab(w) E^gamma)``; time slots pair with the range projection of xi."""
    slot = _check_slot(a, b)
    ws = sample.workspace
    if tail_eps is not None:
        ws.check_tail(w, tail_eps)
    if a == 0:
        dual = ws.xi_range(w)[0]
    else:
        dual = ws.chi(w)[0]
    dual = xi_sign(a, b) * psi(w, ws.c_tilde) * dual
    return complex(sample.coeffs[slot, gamma] @ np.conj(dual))


def pair_pi(sample: FieldSample, i: int, alpha: int, w) -> complex:
    """``(B, psi_w zeta(w) dx^0 ^ dx^i E^alpha)``: psi_w A_{i,alpha}(w) when B = dA."""
    if i not in (1, 2, 3):
        raise ConfigError(f"spatial index must be 1, 2 or 3, got {i}")
    ws = sample.workspace
    dual = psi(w, ws.c_tilde) * ws.zeta_range(w)[0]
    return complex(sample.coeffs[i - 1, alpha] @ np.conj(dual))


def nu_pairings(coeffs: np.ndarray, nu) -> np.ndarray:
    """Real pairings ``g_alpha`` of time-slot coefficients (..., 6, N, dim) with nu."""
    return np.einsum("...jak,jk->...a", coeffs[..., :TIME_SLOTS, :, :], nu.range_coeffs)


def pair_nu(sample: FieldSample, nu, rep: Representation) -> np.ndarray:
    """``sum_alpha g_alpha rho(E^alpha)``, a skew-Hermitian matrix."""
    if nu.degree != sample.workspace.degree or nu.range_coeffs.shape[1] != sample.workspace.dim:
        raise WilsonLabError("nu was built on a different workspace than the sample")
    if not np.isclose(nu.kappa, sample.kappa):
        raise WilsonLabError(f"nu built at kappa={nu.kappa}, sample drawn at kappa={sample.kappa}")
    g = nu_pairings(sample.coeffs, nu)
    return np.einsum("a,aij->ij", g, rep.images)
