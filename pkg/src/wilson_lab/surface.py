"""Flat rectangular Wilson surfaces, their Jacobians, area, and the nu vector."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf

from .bargmann import DEFAULT_C_TILDE, DEFAULT_TAIL_EPS, FockWorkspace, psi
from .errors import ConfigError, WilsonLabError

PAIRS = tuple((a, b) for a in range(4) for b in range(a + 1, 4))


def _complement(a: int, b: int) -> tuple[int, int]:
    c, d = (x for x in range(4) if x not in (a, b))
    return c, d


@dataclass(frozen=True)
class RectSurface:
    """Rectangle ``sigma(s, t) = origin + s (0, a) + t (T, 0, 0, 0)`` on the unit square."""

    a: tuple[float, float, float]
    T: float
    origin: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != 3:
            raise ConfigError("spatial edge a must have 3 components")
        if not np.linalg.norm(a) > 0:
            raise ConfigError("spatial edge a must be non-zero")
        if not self.T > 0:
            raise ConfigError(f"temporal edge T must be positive, got {self.T}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "origin", tuple(float(x) for x in self.origin))

    @property
    def a_norm(self) -> float:
        return float(np.linalg.norm(self.a))

    @property
    def area(self) -> float:
        return self.a_norm * self.T

    def sigma(self, s, t) -> np.ndarray:
        s = np.asarray(s, dtype=float)[..., None]
        t = np.asarray(t, dtype=float)[..., None]
        return np.asarray(self.origin) + s * np.array([0.0, *self.a]) + t * np.array([self.T, 0, 0, 0])

    def tangents(self, s, t):
        shape = np.broadcast(np.asarray(s), np.asarray(t)).shape
        ds = np.broadcast_to(np.array([0.0, *self.a]), shape + (4,))
        dt = np.broadcast_to(np.array([self.T, 0.0, 0.0, 0.0]), shape + (4,))
        return ds, dt

    def max_abs_sigma(self) -> float:
        corners = self.sigma(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1]))
        return float(np.max(np.linalg.norm(corners, axis=1)))

    def swapped(self) -> "GeneralSurface":
        """The same rectangle parametrized as ``sigma(t, s)``."""
        return GeneralSurface(
            sigma=lambda s, t: self.sigma(t, s),
            tangents=lambda s, t: tuple(reversed(self.tangents(t, s))),
        )


@dataclass(frozen=True)
class GeneralSurface:
    """Any parametrized surface given by ``sigma(s, t)`` and its two tangent fields."""

    sigma: Callable
    tangents: Callable

    def max_abs_sigma(self, order: int = 33) -> float:
        g = np.linspace(0, 1, order)
        s, t = np.meshgrid(g, g, indexing="ij")
        return float(np.max(np.linalg.norm(self.sigma(s, t), axis=-1)))


@dataclass(frozen=True)
class SurfaceQuadrature:
    nodes: np.ndarray  # (n, 2) points (s, t) in the unit square
    weights: np.ndarray  # (n,), positive, sum 1


def gauss_legendre_1d(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre_square(order: int) -> SurfaceQuadrature:
    x, w = gauss_legendre_1d(order)
    s, t = np.meshgrid(x, x, indexing="ij")
    return SurfaceQuadrature(np.column_stack([s.ravel(), t.ravel()]), np.outer(w, w).ravel())


def default_order(surface, kappa: float) -> int:
    """Per-axis Gauss-Legendre order resolving the exp(-kappa^2 |ds|^2 / 8) kernel."""
    if isinstance(surface, RectSurface):
        scale = max(surface.a_norm, surface.T)
    else:
        scale = surface.max_abs_sigma()
    return max(16, math.ceil(4 * kappa * scale))


def jacobians(surface, s: float, t: float) -> dict[tuple[int, int], np.ndarray]:
    """``J_ab = [[sigma'_a, sigma_dot_a], [sigma'_b, sigma_dot_b]]`` for every a < b."""
    ds, dt = surface.tangents(np.asarray(s, float), np.asarray(t, float))
    out = {}
    for a, b in PAIRS:
        out[(a, b)] = np.stack(
            [np.stack([ds[..., a], dt[..., a]], -1), np.stack([ds[..., b], dt[..., b]], -1)], -2
        )
    return out


def abs_det(j: np.ndarray) -> np.ndarray:
    return np.abs(j[..., 0, 0] * j[..., 1, 1] - j[..., 0, 1] * j[..., 1, 0])


def rho_ab(surface, s, t, a: int, b: int) -> np.ndarray:
    """Density ``|J_ab| / sqrt(det[J_ab^T J_ab + J_cd^T J_cd])``, zero where |J_ab| = 0."""
    if not (0 <= a < b <= 3):
        raise ConfigError(f"need 0 <= a < b <= 3, got ({a}, {b})")
    jac = jacobians(surface, s, t)
    jab = jac[(a, b)]
    jcd = jac[_complement(a, b)]
    num = abs_det(jab)
    gram = np.swapaxes(jab, -1, -2) @ jab + np.swapaxes(jcd, -1, -2) @ jcd
    den2 = gram[..., 0, 0] * gram[..., 1, 1] - gram[..., 0, 1] * gram[..., 1, 0]
    if np.any((num > 0) & ~(den2 > 0)):
        raise WilsonLabError("degenerate surface: vanishing normalization with non-zero |J_ab|")
    return np.where(num > 0, num / np.sqrt(np.where(den2 > 0, den2, 1.0)), 0.0)


def area(surface, quadrature: SurfaceQuadrature | None = None) -> float:
    q = quadrature or gauss_legendre_square(4)
    s, t = q.nodes[:, 0], q.nodes[:, 1]
    jac = jacobians(surface, s, t)
    total = 0.0
    for a, b in PAIRS:
        total += float(q.weights @ (rho_ab(surface, s, t, a, b) * abs_det(jac[(a, b)])))
    return total


def time_jacobians(surface, s, t) -> np.ndarray:
    """``|J_0j|`` for j = 1, 2, 3; shape (..., 3)."""
    jac = jacobians(surface, s, t)
    return np.stack([abs_det(jac[(0, j)]) for j in (1, 2, 3)], -1)


# --------------------------------------------------------------------------- nu


@dataclass(frozen=True)
class NuVector:
    """Dual vector of the surface functional, one coefficient row per slot (0, j).

    The vector is the same for every Lie index alpha. ``range_coeffs`` is its
    projection onto range(d_0) in range coordinates; that projection is what a
    sampled field actually pairs with.
    """

    kappa: float
    per_alpha_coeffs: np.ndarray  # (3, dim) workspace coefficients for slots (0,1), (0,2), (0,3)
    range_coeffs: np.ndarray  # (3, dim)
    norm_sq_over_kappa_sq: float
    projected_norm_sq_over_kappa_sq: float
    degree: int
    tail: float


def nu_coeffs(surface, kappa: float, workspace: FockWorkspace,
              quadrature: SurfaceQuadrature | None = None,
              tail_eps: float = DEFAULT_TAIL_EPS, coarse_tol: float | None = None) -> NuVector:
    """Build ``nu`` on a truncated Fock workspace.

    The net prefactor is ``kappa^2/4`` applied to ``xi_{0j}`` at ``kappa sigma / 2``.
    """
    if not kappa > 0:
        raise ConfigError("kappa must be positive")
    q = quadrature or gauss_legendre_square(default_order(surface, kappa))
    s, t = q.nodes[:, 0], q.nodes[:, 1]
    pts = 0.5 * kappa * surface.sigma(s, t)
    tail = workspace.check_tail(pts, tail_eps)
    jac = time_jacobians(surface, s, t)  # (n, 3)
    kern = psi(pts, workspace.c_tilde)[:, None] * workspace.chi(pts)  # (n, dim)
    coeffs = 0.25 * kappa**2 * np.einsum("n,nj,nk->jk", q.weights, jac, kern)
    if not np.all(np.isreal(pts)):
        raise ConfigError("surface must lie in R^4")
    coeffs = coeffs.real
    xr = workspace.xi_range(pts) * psi(pts, workspace.c_tilde)[:, None]
    range_coeffs = 0.25 * kappa**2 * np.einsum("n,nj,nk->jk", q.weights, jac, xr).real
    norm = float(np.sum(coeffs**2)) / kappa**2
    pnorm = float(np.sum(range_coeffs**2)) / kappa**2
    if coarse_tol is None:
        coarse_tol = max(1e-6, 10 * tail_eps)
    ref = nu_norm_kernel(surface, kappa, c_tilde=workspace.c_tilde)
    if abs(norm - ref) > coarse_tol * max(1.0, ref):
        raise WilsonLabError(
            f"surface quadrature too coarse: truncated |nu|^2/kappa^2 = {norm:.10g} vs kernel {ref:.10g}"
        )
    return NuVector(kappa, coeffs, range_coeffs, norm, pnorm, workspace.degree, tail)


def g_closed_form(beta: float) -> float:
    """``int_0^1 int_0^1 exp(-beta^2 (s - s')^2 / 8) ds ds'`` via the error function."""
    c = beta * beta / 8.0
    if c < 1e-8:
        return 1.0 - c / 6.0
    return math.sqrt(math.pi / c) * erf(math.sqrt(c)) - (1.0 - math.exp(-c)) / c


def _g_quad(beta: float, order: int) -> float:
    x, w = gauss_legendre_1d(order)
    return float(w @ np.exp(-(beta**2) * (x[:, None] - x[None, :]) ** 2 / 8.0) @ w)


def nu_norm_closed_form(surface: RectSurface, kappa: float, c_tilde: float = DEFAULT_C_TILDE) -> float:
    """Exact ``|nu|^2/kappa^2`` for a flat rectangle."""
    return (kappa**2 / 16.0) * c_tilde**2 * surface.area**2 * \
        g_closed_form(kappa * surface.a_norm) * g_closed_form(kappa * surface.T)


def nu_norm_kernel(surface, kappa: float, quadrature: SurfaceQuadrature | None = None,
                   c_tilde: float = DEFAULT_C_TILDE) -> float:
    """Truncation-free ``|nu|^2/kappa^2`` by quadrature of the exact kernel.

    Rectangles use the separated 1-D form with the default per-axis order;
    other surfaces, or an explicit ``quadrature``, use the tensorized 4-D sum.
    """
    if not kappa > 0:
        raise ConfigError("kappa must be positive")
    if quadrature is None and isinstance(surface, RectSurface):
        order = default_order(surface, kappa)
        g = _g_quad(kappa * surface.a_norm, order) * _g_quad(kappa * surface.T, order)
        jsq = sum((x * surface.T) ** 2 for x in surface.a)
        return (kappa**2 / 16.0) * c_tilde**2 * jsq * g
    q = quadrature or gauss_legendre_square(default_order(surface, kappa))
    s, t = q.nodes[:, 0], q.nodes[:, 1]
    pts = surface.sigma(s, t)
    jac = time_jacobians(surface, s, t)
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    kern = np.exp(-(kappa**2) * d2 / 8.0)
    wj = q.weights[:, None] * jac  # (n, 3)
    return float((kappa**2 / 16.0) * c_tilde**2 * np.einsum("nj,nm,mj->", wj, kern, wj))


def nu_norm_limit(surface, c_tilde: float = DEFAULT_C_TILDE) -> float:
    """Large-kappa limit of ``|nu|^2/kappa^2``: area/4 at the default c_tilde."""
    return 2.0 * math.pi * c_tilde**2 * area(surface) / 4.0
