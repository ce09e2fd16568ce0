"""Orthonormal bases of su(n) and so(n), structure constants and Casimirs.

The inner product on the algebra is ``<A, B> = -Tr[AB]``; every basis built
here is orthonormal for it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisError, ConfigError

ORTHO_TOL = 1e-12
REP_TOL = 1e-10
SCALAR_TOL = 1e-10


@dataclass(frozen=True)
class LieBasis:
    group_kind: str
    n: int
    generators: np.ndarray  # (dim_g, n, n) complex

    @property
    def dim_g(self) -> int:
        return self.generators.shape[0]

    def gram(self) -> np.ndarray:
        """Matrix of ``-Tr[E^a E^b]``."""
        g = self.generators
        return -np.einsum("aij,bji->ab", g, g).real

    def check(self) -> None:
        g = self.generators
        skew = np.max(np.abs(g + np.conj(np.transpose(g, (0, 2, 1)))))
        if skew > ORTHO_TOL:
            raise BasisError(f"generators not skew-Hermitian (max dev {skew:.3g})")
        dev = np.max(np.abs(self.gram() - np.eye(self.dim_g)))
        if dev > ORTHO_TOL:
            raise BasisError(f"generators not orthonormal under -Tr (max dev {dev:.3g})")


@dataclass(frozen=True)
class Representation:
    images: np.ndarray  # (dim_g, dim_rep, dim_rep) complex
    c_rho: float

    @property
    def dim_rep(self) -> int:
        return self.images.shape[1]


@dataclass(frozen=True)
class CasimirOperator:
    matrix: np.ndarray
    scalar: float | None


def build_su_basis(n: int) -> LieBasis:
    """Generalized Gell-Mann basis of su(n), scaled by ``-i/sqrt(2)``.

    Ordering: for each pair j<k the symmetric then antisymmetric generator,
    followed by the n-1 diagonal ones. For n=2 this gives ``-i sigma_a/sqrt(2)``
    in x, y, z order.
    """
    if int(n) != n or n < 2:
        raise ConfigError(f"su(n) needs integer n >= 2, got {n}")
    n = int(n)
    lams = []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            lams.extend([s, a])
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[np.arange(l), np.arange(l)] = 1.0
        d[l, l] = -l
        lams.append(d * np.sqrt(2.0 / (l * (l + 1))))
    gens = np.array(lams) * (-1j / np.sqrt(2.0))
    basis = LieBasis("su", n, gens)
    basis.check()
    return basis


def build_so_basis(n: int) -> LieBasis:
    """Basis ``(e_j e_k^T - e_k e_j^T)/sqrt(2)`` of so(n), j<k."""
    if int(n) != n or n < 3:
        raise ConfigError(f"so(n) needs integer n >= 3, got {n}")
    n = int(n)
    gens = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = 1.0
            e[k, j] = -1.0
            gens.append(e / np.sqrt(2.0))
    basis = LieBasis("so", n, np.array(gens))
    basis.check()
    return basis


def build_basis(group_kind: str, n: int) -> LieBasis:
    if group_kind == "su":
        return build_su_basis(n)
    if group_kind == "so":
        return build_so_basis(n)
    raise ConfigError(f"unknown group kind {group_kind!r}; expected 'su' or 'so'")


def structure_constants(basis: LieBasis) -> np.ndarray:
    """Return ``c[g, a, b] = -Tr[E^g [E^a, E^b]]`` as a real array."""
    basis.check()
    e = basis.generators
    prod = np.einsum("aij,bjk->abik", e, e)
    comm = prod - np.transpose(prod, (1, 0, 2, 3))
    c = -np.einsum("gki,abik->gab", e, comm)
    return np.ascontiguousarray(c.real)


def standard_rep(basis: LieBasis) -> Representation:
    return Representation(images=basis.generators.copy(), c_rho=1.0)


def trivial_rep(basis: LieBasis, dim: int = 1) -> Representation:
    """The zero representation on C^dim; its Wilson loop is identically ``dim``."""
    return Representation(images=np.zeros((basis.dim_g, dim, dim), dtype=complex), c_rho=0.0)


def representation_constant(basis: LieBasis, images: np.ndarray) -> float:
    """Fit ``C`` in ``Tr[rho(E^a) rho(E^b)] = C Tr[E^a E^b]`` and verify it."""
    tr_rho = np.einsum("aij,bji->ab", images, images)
    tr_e = np.einsum("aij,bji->ab", basis.generators, basis.generators)
    c = float(np.real(np.vdot(tr_e, tr_rho) / np.vdot(tr_e, tr_e)))
    dev = np.max(np.abs(tr_rho - c * tr_e))
    if dev > REP_TOL:
        raise BasisError(f"trace form of representation is not proportional (dev {dev:.3g})")
    return c


def casimir(rep: Representation, require_scalar: bool = True) -> CasimirOperator:
    """Quadratic Casimir ``-sum_a rho(E^a)^2`` with scalar detection."""
    imgs = rep.images
    mat = -np.einsum("aij,ajk->ik", imgs, imgs)
    d = mat.shape[0]
    lam = float(np.real(np.trace(mat))) / d
    dev = np.max(np.abs(mat - lam * np.eye(d)))
    if dev < SCALAR_TOL:
        return CasimirOperator(matrix=mat, scalar=lam)
    if require_scalar:
        raise BasisError(f"Casimir is not scalar (max off-scalar deviation {dev:.3g})")
    return CasimirOperator(matrix=mat, scalar=None)


def jacobi_residual(c: np.ndarray) -> float:
    """Max violation of the Jacobi identity written in structure constants."""
    t = np.einsum("mab,nmg->abgn", c, c)
    total = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(total)))


def casimir_formula(group_kind: str, n: int) -> float:
    """Closed-form Casimir scalar of the standard representation."""
    if group_kind == "su":
        return n - 1.0 / n
    if group_kind == "so":
        return (n - 1) / 2.0
    raise ConfigError(f"unknown group kind {group_kind!r}")
