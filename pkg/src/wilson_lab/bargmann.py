"""Truncated Segal-Bargmann (Fock) space over C^4.

Coefficients are taken with respect to the orthonormal monomials
``e_k = z^k / sqrt(k!)`` (multi-index ``k = (k0, k1, k2, k3)``), so the Fock
inner product is the plain sesquilinear sum ``sum_k f_k conj(g_k)``.

The operator ``d_a`` acts as ``(a - a^dagger)/2`` on the ``z_a`` ladder.  Because
``d_0`` only touches ``z_0`` it is block diagonal: one 1-D block per
``(k1, k2, k3)``, of size ``(n+2) x (n+1)`` with ``n = D - (k1+k2+k3)``.  All
range-of-``d_0`` machinery (QR, the dual ``zeta(w)``, projections) works block by
block.

Vectors living in range(d_0) are often carried in *range coordinates*: the
coefficients on the orthonormal columns of the block QR factor, indexed like
the domain basis.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.stats import poisson

from .errors import ConditioningError, ConfigError, TailBoundError

DEFAULT_C_TILDE = 1.0 / np.sqrt(2.0 * np.pi)
DEFAULT_TAIL_EPS = 1e-6
ZETA_COND_MAX = 1e12
MAX_AUTO_DEGREE = 80

# (a, b) pairs of the six standard two-forms dx^a ^ dx^b, in storage order.
TWO_FORM_SLOTS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
SLOT_INDEX = {ab: i for i, ab in enumerate(TWO_FORM_SLOTS)}


def multi_indices(max_degree: int) -> np.ndarray:
    """All 4-multi-indices of total degree <= max_degree, graded lexicographic."""
    out = []
    for d in range(max_degree + 1):
        for k0 in range(d, -1, -1):
            for k1 in range(d - k0, -1, -1):
                for k2 in range(d - k0 - k1, -1, -1):
                    out.append((k0, k1, k2, d - k0 - k1 - k2))
    idx = np.array(out, dtype=np.int64).reshape(-1, 4)
    # ascending in (|k|, k0, k1, k2, k3)
    order = np.lexsort((idx[:, 3], idx[:, 2], idx[:, 1], idx[:, 0], idx.sum(axis=1)))
    return idx[order]


def _ladder_1d(n: int) -> np.ndarray:
    """d on one variable, degree <= n -> degree <= n+1, normalized monomials."""
    m = np.zeros((n + 2, n + 1))
    p = np.arange(n + 1)
    m[p[1:] - 1, p[1:]] = np.sqrt(p[1:]) / 2.0
    m[p + 1, p] = -np.sqrt(p + 1) / 2.0
    return m


def _as_points(w) -> np.ndarray:
    pts = np.asarray(w, dtype=complex)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != 4:
        raise ConfigError(f"kernel points must have 4 complex coordinates, got shape {pts.shape}")
    return pts


def psi(w, c_tilde: float = DEFAULT_C_TILDE):
    """Renormalization factor ``c_tilde * exp(-|w|^2 / 2)``; vectorized over points."""
    pts = np.asarray(w, dtype=complex)
    val = c_tilde * np.exp(-0.5 * np.sum(np.abs(pts) ** 2, axis=-1))
    return float(val) if np.ndim(val) == 0 else val


def tail_mass(abs_w_sq, degree: int, c_tilde: float = DEFAULT_C_TILDE):
    """Squared norm of ``psi_w chi_w`` discarded above total degree ``degree``."""
    return c_tilde**2 * poisson.sf(degree, np.asarray(abs_w_sq, dtype=float))


def choose_degree(max_abs_w: float, tail_eps: float = DEFAULT_TAIL_EPS,
                  c_tilde: float = DEFAULT_C_TILDE, max_degree: int = MAX_AUTO_DEGREE) -> int:
    """Smallest D whose discarded kernel mass at ``|w| = max_abs_w`` is <= tail_eps."""
    lam = float(max_abs_w) ** 2
    for d in range(max_degree + 1):
        if tail_mass(lam, d, c_tilde) <= tail_eps:
            return max(d, 1)
    raise TailBoundError(
        f"|w| = {max_abs_w:.4g} needs degree > {max_degree} for tail {tail_eps:g}; "
        "reduce kappa or the surface size"
    )


def feasible_abs_w(degree: int, tail_eps: float, c_tilde: float = DEFAULT_C_TILDE) -> float:
    """Largest |w| (to 1e-3) whose tail at ``degree`` stays below ``tail_eps``."""
    lo, hi = 0.0, np.sqrt(degree + 1.0) + 1.0
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if tail_mass(mid**2, degree, c_tilde) <= tail_eps:
            lo = mid
        else:
            hi = mid
    return lo


class FockWorkspace:
    """Monomial basis of degree <= D with the ``d_a`` operators and dual evaluators."""

    def __init__(self, degree: int, c_tilde: float = DEFAULT_C_TILDE):
        if int(degree) != degree or degree < 1:
            raise ConfigError(f"degree must be an integer >= 1, got {degree}")
        if not c_tilde > 0:
            raise ConfigError("c_tilde must be positive")
        self.degree = D = int(degree)
        self.c_tilde = float(c_tilde)
        self.basis = multi_indices(D)
        self.codomain_basis = multi_indices(D + 1)
        self.dim = len(self.basis)
        self.codim = len(self.codomain_basis)
        self._cod_index = {tuple(k): i for i, k in enumerate(self.codomain_basis)}

        # one QR per block size n = 0..D
        self._q, self._r, self._rinv = [], [], []
        self.block_singular_min = np.empty(D + 1)
        self.block_condition = np.empty(D + 1)
        for n in range(D + 1):
            q, r = np.linalg.qr(_ladder_1d(n))
            s = np.linalg.svd(r, compute_uv=False)
            self._q.append(q)
            self._r.append(r)
            self._rinv.append(np.linalg.solve(r, np.eye(n + 1)))
            self.block_singular_min[n] = s[-1]
            self.block_condition[n] = (s[0] / s[-1]) ** 2
        self.zeta_condition = float(self.block_condition.max())
        if self.zeta_condition > ZETA_COND_MAX:
            raise ConditioningError(
                f"normal-equation condition number {self.zeta_condition:.3g} exceeds {ZETA_COND_MAX:g}"
            )

        k0 = self.basis[:, 0]
        rest = self.basis[:, 1:].sum(axis=1)
        self._block_n = D - rest
        offsets = np.concatenate([[0], np.cumsum(np.arange(1, D + 2))])
        self._flat = offsets[self._block_n] + k0

    def __repr__(self) -> str:
        return f"FockWorkspace(degree={self.degree}, dim={self.dim})"

    @property
    def smallest_singular_value(self) -> float:
        return float(self.block_singular_min.min())

    # ------------------------------------------------------------------ operators
    def d_op_matrix(self, a: int) -> sparse.csr_matrix:
        """Sparse matrix of ``d_a``: domain (degree <= D) -> codomain (degree <= D+1)."""
        if a not in (0, 1, 2, 3):
            raise ConfigError(f"axis must be 0..3, got {a}")
        return self._d_ops[a]

    @cached_property
    def _d_ops(self):
        ops = []
        for a in range(4):
            rows, cols, vals = [], [], []
            for j, k in enumerate(self.basis):
                p = k[a]
                up = k.copy()
                up[a] += 1
                rows.append(self._cod_index[tuple(up)])
                cols.append(j)
                vals.append(-np.sqrt(p + 1) / 2.0)
                if p > 0:
                    dn = k.copy()
                    dn[a] -= 1
                    rows.append(self._cod_index[tuple(dn)])
                    cols.append(j)
                    vals.append(np.sqrt(p) / 2.0)
            ops.append(sparse.csr_matrix((vals, (rows, cols)), shape=(self.codim, self.dim)))
        return ops

    @cached_property
    def d0_range_basis(self) -> sparse.csr_matrix:
        """Orthonormal basis of range(d_0) as a (codim x dim) sparse matrix.

        Column j spans the same block as domain index j.
        """
        rows, cols, vals = [], [], []
        block_cols: dict[tuple, list] = {}
        for j, k in enumerate(self.basis):
            block_cols.setdefault(tuple(k[1:]), []).append((k[0], j))
        for rest, members in block_cols.items():
            n = self.degree - sum(rest)
            q = self._q[n]
            for p, j in members:
                for pp in range(n + 2):
                    rows.append(self._cod_index[(pp, *rest)])
                    cols.append(j)
                    vals.append(q[pp, p])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(self.codim, self.dim))

    def embed(self, f: np.ndarray) -> np.ndarray:
        """Zero-pad domain coefficients into the codomain basis."""
        out = np.zeros(f.shape[:-1] + (self.codim,), dtype=f.dtype)
        out[..., : self.dim] = f  # graded order: degree <= D comes first
        return out

    # ---------------------------------------------------------------- evaluators
    def _powers(self, pts: np.ndarray, max_p: int) -> np.ndarray:
        """``conj(w_a)^p / sqrt(p!)`` for p <= max_p; shape (n_pts, 4, max_p+1)."""
        out = np.empty(pts.shape[:1] + (4, max_p + 1), dtype=complex)
        out[:, :, 0] = 1.0
        wc = np.conj(pts)
        for p in range(1, max_p + 1):
            out[:, :, p] = out[:, :, p - 1] * wc / np.sqrt(p)
        return out

    def _rest_factor(self, pw: np.ndarray) -> np.ndarray:
        b = self.basis
        return pw[:, 1, b[:, 1]] * pw[:, 2, b[:, 2]] * pw[:, 3, b[:, 3]]

    def chi(self, w) -> np.ndarray:
        """Coefficients of ``chi_w = exp(conj(w).z)`` truncated at degree D; (n_pts, dim)."""
        pts = _as_points(w)
        pw = self._powers(pts, self.degree)
        return pw[:, 0, self.basis[:, 0]] * self._rest_factor(pw)

    def evaluate(self, f: np.ndarray, w) -> np.ndarray:
        """Value of the polynomial with coefficients ``f`` at the points ``w``."""
        return np.conj(self.chi(w)) @ np.asarray(f).T if np.ndim(f) > 1 else np.conj(self.chi(w)) @ f

    def _assemble(self, pts: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
        pw = self._powers(pts, self.degree)
        p0 = pw[:, 0, :]
        cat = np.concatenate([p0[:, : n + 1] @ mats[n] for n in range(self.degree + 1)], axis=1)
        return cat[:, self._flat] * self._rest_factor(pw)

    def zeta_range(self, w) -> np.ndarray:
        """``zeta(w)`` in range coordinates (without ``psi``); shape (n_pts, dim)."""
        return self._assemble(_as_points(w), self._rinv)

    def xi_range(self, w) -> np.ndarray:
        """Projection of the truncated ``chi_w`` onto range(d_0), range coordinates."""
        qtop = [q[: n + 1, :] for n, q in enumerate(self._q)]
        return self._assemble(_as_points(w), qtop)

    def from_range(self, coeffs: np.ndarray) -> np.ndarray:
        """Map range coordinates to codomain coefficients."""
        q = self.d0_range_basis
        return (q @ np.asarray(coeffs).T).T

    def to_range(self, codomain_coeffs: np.ndarray) -> np.ndarray:
        """Orthogonal projection of codomain coefficients, in range coordinates."""
        q = self.d0_range_basis
        return (q.T @ np.asarray(codomain_coeffs).T).T

    def tail(self, w) -> np.ndarray:
        pts = _as_points(w)
        return tail_mass(np.sum(np.abs(pts) ** 2, axis=1), self.degree, self.c_tilde)

    def check_tail(self, w, tail_eps: float) -> float:
        """Raise ``TailBoundError`` if any point of ``w`` discards more than tail_eps."""
        t = float(np.max(self.tail(w)))
        if t > tail_eps:
            r = float(np.sqrt(np.max(np.sum(np.abs(_as_points(w)) ** 2, axis=1))))
            raise TailBoundError(
                f"degree {self.degree} discards kernel mass {t:.3g} > {tail_eps:g} at |w| = {r:.4g}; "
                f"this degree supports |w| <= {feasible_abs_w(self.degree, tail_eps, self.c_tilde):.4g}, "
                f"or use degree {choose_degree(r, tail_eps, self.c_tilde)}"
            )
        return t


# ---------------------------------------------------------------------------
# Module-level operations


def d_op_matrix(workspace: FockWorkspace, a: int) -> sparse.csr_matrix:
    return workspace.d_op_matrix(a)


def chi_coeffs(workspace: FockWorkspace, w) -> np.ndarray:
    """Truncated reproducing kernel at a single point (1-D array)."""
    return workspace.chi(w)[0]


def fock_inner(f, g) -> complex:
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ConfigError(f"coefficient vectors differ in length: {f.shape} vs {g.shape}")
    return complex(np.sum(f * np.conj(g)))


def xi_sign(a: int, b: int) -> int:
    return -1 if (a * b) % 2 else 1


def xi_coeffs(workspace: FockWorkspace, a: int, b: int, w):
    """``psi_w chi_w`` coefficients and the slot sign ``(-1)^(ab)``."""
    if not (0 <= a < b <= 3):
        raise ConfigError(f"two-form slot needs 0 <= a < b <= 3, got ({a}, {b})")
    pts = _as_points(w)
    return psi(pts[0], workspace.c_tilde) * workspace.chi(pts)[0], xi_sign(a, b)


def zeta_coeffs(workspace: FockWorkspace, w, with_psi: bool = False) -> np.ndarray:
    """Minimum-norm ``zeta(w)`` in range(d_0), codomain coefficients (degree <= D+1)."""
    pts = _as_points(w)
    z = workspace.from_range(workspace.zeta_range(pts))[0]
    if with_psi:
        z = z * psi(pts[0], workspace.c_tilde)
    return z


def kernel_xi_inner(a, b, u, c, d, v, c_tilde: float = DEFAULT_C_TILDE) -> complex:
    """Exact ``<xi_ab(u), xi_cd(v)>`` without truncation."""
    if (a, b) != (c, d):
        return 0.0
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    val = psi(u, c_tilde) * psi(v, c_tilde) * np.exp(np.sum(np.conj(u) * v))
    return complex(val) if np.iscomplexobj(val) and abs(np.imag(val)) > 0 else float(np.real(val))
