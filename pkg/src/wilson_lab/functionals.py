"""Interaction functionals Y1, Y2, Y3 and the Yang-Mills density on field samples.

The w-integrals against the Gaussian measure on C^4 are Monte Carlo sums over
one shared grid of nodes. All duals at the nodes and at their conjugates are
computed once per grid and reused for every sample.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bargmann import SLOT_INDEX, FockWorkspace, psi, xi_sign
from .errors import ConfigError
from .sampler import TIME_SLOTS, FieldSample, WienerConfig, sample_batch

SPATIAL_SLOTS = ((1, 2), (1, 3), (2, 3))
DEFAULT_CHUNK = 64


@dataclass(frozen=True)
class WGrid:
    nodes: np.ndarray  # (n, 4) complex
    weights: np.ndarray  # (n,)
    seed: int


def make_wgrid(n_nodes: int, seed: int = 0) -> WGrid:
    """i.i.d. nodes of the standard Gaussian measure on C^4, equal weights."""
    if int(n_nodes) != n_nodes or n_nodes < 1:
        raise ConfigError(f"n_nodes must be a positive integer, got {n_nodes}")
    rng = np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 64) - 1) | (1 << 127)))
    re = rng.normal(scale=np.sqrt(0.5), size=(n_nodes, 4))
    im = rng.normal(scale=np.sqrt(0.5), size=(n_nodes, 4))
    return WGrid(re + 1j * im, np.full(n_nodes, 1.0 / n_nodes), int(seed))


@dataclass(frozen=True)
class YValues:
    y1: complex
    y2: complex
    y3: float
    y_density: float
    combined: float = float("nan")


class GridDuals:
    """Dual vectors of a workspace at every grid node and its conjugate.

    Arrays have shape (n_nodes, dim). ``zeta_*`` are in range coordinates and
    include ``psi``; ``xi_*`` are the monomial coefficients of ``psi chi``.
    """

    def __init__(self, workspace: FockWorkspace, grid: WGrid, tail_eps: float | None = None):
        self.workspace = workspace
        self.grid = grid
        w, wb = grid.nodes, np.conj(grid.nodes)
        tails = workspace.tail(w)
        self.max_tail = float(tails.max())
        self.mean_tail = float(np.sum(grid.weights * tails))
        if tail_eps is not None:
            workspace.check_tail(w, tail_eps)
        ps = psi(w, workspace.c_tilde)[:, None]
        self.zeta_w = ps * workspace.zeta_range(w)
        self.zeta_wb = ps * workspace.zeta_range(wb)
        self.xi_w = ps * workspace.chi(w)
        self.xi_wb = ps * workspace.chi(wb)
        self.signs = np.array([xi_sign(a, b) for a, b in SPATIAL_SLOTS], dtype=float)
        # contiguous (dim, 2n) real blocks [Re | Im] so the pairings run as one BLAS call
        self._zeta_mat = self._stack(self.zeta_w, self.zeta_wb)
        self._xi_mat = self._stack(self.xi_w, self.xi_wb)

    @staticmethod
    def _stack(dw: np.ndarray, dwb: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(np.concatenate([dw.real, dw.imag, dwb.real, dwb.imag]).T)

    def _pair(self, coeffs: np.ndarray, mat: np.ndarray):
        """Pair real coeffs (S, 3, N, dim) with conj of the node duals at w and w-bar."""
        lead = coeffs.shape[:-1]
        n = len(self.grid.weights)
        out = (np.ascontiguousarray(coeffs).reshape(-1, coeffs.shape[-1]) @ mat).reshape(lead + (4, n))
        at_w = out[..., 0, :] - 1j * out[..., 1, :]
        at_wb = out[..., 2, :] - 1j * out[..., 3, :]
        return at_w, at_wb

    def pairings(self, coeffs: np.ndarray):
        """pi and xi pairings of a (S, 6, N, dim) coefficient block, each (S, 3, N, n)."""
        if np.iscomplexobj(coeffs):
            raise ConfigError("field coefficients must be real")
        pi_w, pi_wb = self._pair(coeffs[:, :TIME_SLOTS], self._zeta_mat)
        xi_w, xi_wb = self._pair(coeffs[:, [SLOT_INDEX[ab] for ab in SPATIAL_SLOTS]], self._xi_mat)
        sg = self.signs[None, :, None, None]
        return pi_w, pi_wb, sg * xi_w, sg * xi_wb


def accumulate(duals: GridDuals, coeffs: np.ndarray, sc: np.ndarray, kappa: float, backend=None):
    pi_w, pi_wb, xi_w, xi_wb = duals.pairings(coeffs)
    return kernels.y_accumulate(pi_w, pi_wb, xi_w, xi_wb, sc, duals.grid.weights, kappa, backend=backend)


def y_density(y1, y2, y3):
    return np.exp(-0.5 * np.real(y1 + y2 + y3))


def y_terms(sample: FieldSample, grid, sc: np.ndarray, kappa: float, backend=None) -> YValues:
    """Y1, Y2, Y3 and the density for one sample; ``grid`` may be a WGrid or GridDuals."""
    duals = grid if isinstance(grid, GridDuals) else GridDuals(sample.workspace, grid)
    y1, y2, y3, comb = accumulate(duals, sample.coeffs[None], np.asarray(sc), kappa, backend)
    y3r = float(y3[0].real)
    return YValues(complex(y1[0]), complex(y2[0]), y3r, float(y_density(y1, y2, y3)[0]), float(comb[0]))


def y_terms_batch(coeffs: np.ndarray, duals: GridDuals, sc: np.ndarray, kappa: float,
                  chunk: int = DEFAULT_CHUNK, backend=None):
    """Vectorized Y terms for (S, 6, N, dim) coefficients; returns y1, y2, y3, density, combined."""
    parts = [accumulate(duals, coeffs[i:i + chunk], sc, kappa, backend) for i in range(0, len(coeffs), chunk)]
    y1, y2, y3, comb = (np.concatenate(x) for x in zip(*parts))
    return y1, y2, y3.real, y_density(y1, y2, y3), comb


def n_workers() -> int:
    try:
        return max(1, int(os.environ.get("WILSON_LAB_THREADS", "1")))
    except ValueError:
        raise ConfigError("WILSON_LAB_THREADS must be an integer") from None


def map_chunks(fn, n_samples: int, chunk: int):
    """Apply ``fn(start, count)`` over consecutive sample chunks, results in index order."""
    starts = list(range(0, n_samples, chunk))
    jobs = [(s, min(chunk, n_samples - s)) for s in starts]
    workers = n_workers()
    if workers == 1 or len(jobs) == 1:
        return [fn(s, c) for s, c in jobs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def sample_y_values(config: WienerConfig, duals: GridDuals, sc: np.ndarray, n_samples: int,
                    chunk: int = DEFAULT_CHUNK, extra=None):
    """Draw ``n_samples`` fields and evaluate their Y terms chunk by chunk.

    ``extra(coeffs)`` may compute further per-sample quantities on each chunk;
    its outputs are concatenated and returned after the Y arrays.
    """
    def work(start, count):
        coeffs = sample_batch(config, start, count)
        out = accumulate(duals, coeffs, sc, config.kappa)
        return out + ((extra(coeffs),) if extra is not None else ())

    parts = map_chunks(work, n_samples, chunk)
    cols = [np.concatenate(x) for x in zip(*parts)]
    y1, y2, y3, comb = cols[:4]
    return (y1, y2, y3.real, y_density(y1, y2, y3), comb, *cols[4:])


def batch_mean_se(values: np.ndarray, n_batches: int = 20) -> float:
    """Standard error of the mean from contiguous batch means."""
    values = np.asarray(values)
    b = min(n_batches, len(values))
    if b < 2:
        return float("nan")
    means = np.array([m.mean(axis=0) for m in np.array_split(values, b)])
    return float(np.sqrt(np.sum(np.abs(means - means.mean(axis=0)) ** 2) / (b * (b - 1))))


def max_moment_order(c_tilde: float) -> float:
    """Largest p for which the moment bound on the density is finite: 1/(2 c_tilde^2)."""
    return 1.0 / (2.0 * c_tilde**2)


def density_moment(config: WienerConfig, grid, sc: np.ndarray, n_samples: int, p: float = 1.0,
                   chunk: int = DEFAULT_CHUNK):
    """Monte Carlo estimate of ``E[Y^p]`` with its standard error."""
    pmax = max_moment_order(config.workspace.c_tilde)
    if not 1 <= p < pmax:
        raise ConfigError(f"moment order p must satisfy 1 <= p < {pmax:.6g}, got {p}")
    duals = grid if isinstance(grid, GridDuals) else GridDuals(config.workspace, grid)
    dens = sample_y_values(config, duals, sc, n_samples, chunk)[3]
    vals = dens**p
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))


__all__ = [
    "WGrid", "YValues", "GridDuals", "make_wgrid", "y_terms", "y_terms_batch",
    "sample_y_values", "density_moment", "batch_mean_se",
]
