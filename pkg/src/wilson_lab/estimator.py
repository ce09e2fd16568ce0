"""Monte Carlo Wilson-loop estimator, closed forms, oracles and the quark potential."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bargmann import DEFAULT_TAIL_EPS, FockWorkspace, choose_degree
from .errors import ConfigError, WilsonLabError
from .functionals import GridDuals, batch_mean_se, map_chunks, sample_y_values, accumulate, y_density
from .lie import Representation, build_basis, casimir, standard_rep
from .sampler import WienerConfig, nu_pairings, sample_batch
from .surface import nu_coeffs


@dataclass
class EstimateResult:
    kappa: float
    n_samples: int
    trace_estimate: complex
    std_error: float
    free_field_estimate: complex
    free_field_std_error: float
    paper_closed_form: float
    oracle_value: float | None
    area: float
    v_kernel: float
    v_measured: float
    mean_density: float
    mean_density_se: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def oracle_minus_paper(self) -> float | None:
        if self.oracle_value is None:
            return None
        return self.oracle_value - self.paper_closed_form


# ------------------------------------------------------------------ closed forms


def _hermitian_expm(h: np.ndarray, scale: complex) -> np.ndarray:
    """``exp(scale * h)`` for Hermitian ``h``."""
    lam, vec = np.linalg.eigh(h)
    return (vec * np.exp(scale * lam)) @ vec.conj().T


def free_field_closed_form(rep: Representation, v: float) -> np.ndarray:
    """``exp[(v/2) sum_a rho(E^a)^2]``: the Gaussian average computed as if the
    generators commuted."""
    if v < 0:
        raise ConfigError("variance v must be non-negative")
    sq = np.einsum("aij,ajk->ik", rep.images, rep.images)
    return _hermitian_expm(-sq, -0.5 * v)


def exact_su2_free_field(v: float) -> float:
    """``E[Tr exp(sum_a G_a E^a)]`` for su(2) standard and G_a i.i.d. N(0, v).

    The trace is ``2 cos(|G|/sqrt 2)``; averaging over the chi-3 radius gives
    ``2 (1 - v/2) exp(-v/4)``.
    """
    if v < 0:
        raise ConfigError("variance v must be non-negative")
    return 2.0 * (1.0 - 0.5 * v) * math.exp(-0.25 * v)


def area_law_limit(rep: Representation, area: float) -> np.ndarray:
    """``exp[-(area/8) C(rho)]`` with C the quadratic Casimir operator."""
    if area < 0:
        raise ConfigError("area must be non-negative")
    cas = casimir(rep, require_scalar=False).matrix
    return _hermitian_expm(cas, -area / 8.0)


def is_su2_standard(rep: Representation) -> bool:
    """True for a 2-dim representation of a 3-dim algebra with Casimir 3/2."""
    if rep.images.shape != (3, 2, 2):
        return False
    cas = casimir(rep, require_scalar=False)
    return cas.scalar is not None and abs(cas.scalar - 1.5) < 1e-10


# ------------------------------------------------------------------ Monte Carlo


def wilson_traces(m: np.ndarray) -> np.ndarray:
    """``Tr exp(M)`` for a stack of skew-Hermitian matrices (..., n, n)."""
    lam = np.linalg.eigvalsh(1j * m)
    return np.sum(np.exp(-1j * lam), axis=-1)


def wilson_matrices(m: np.ndarray) -> np.ndarray:
    """``exp(M)`` for skew-Hermitian M via the eigendecomposition of iM; unitary."""
    lam, vec = np.linalg.eigh(1j * m)
    return (vec * np.exp(-1j * lam)[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))


def auto_workspace(surface, kappa: float, degree="auto", tail_eps: float = DEFAULT_TAIL_EPS,
                   c_tilde: float | None = None) -> FockWorkspace:
    kw = {} if c_tilde is None else {"c_tilde": c_tilde}
    if degree == "auto":
        degree = choose_degree(0.5 * kappa * surface.max_abs_sigma(), tail_eps, **kw)
    return FockWorkspace(int(degree), **kw)


def ratio_se(num: np.ndarray, den: np.ndarray, n_batches: int = 20) -> float:
    """Batch-means standard error of ``sum num / sum den``."""
    b = min(n_batches, len(den))
    if b < 2:
        return float("nan")
    r = np.array([n.sum() / d.sum() for n, d in zip(np.array_split(num, b), np.array_split(den, b))])
    return float(np.sqrt(np.sum(np.abs(r - r.mean()) ** 2) / (b * (b - 1))))


def _setup(surface, kappa, n_samples, grid, workspace, degree, tail_eps, c_tilde):
    if not kappa > 0:
        raise ConfigError("kappa must be positive")
    if int(n_samples) != n_samples or n_samples < 2:
        raise ConfigError("n_samples must be an integer >= 2")
    ws = workspace or auto_workspace(surface, kappa, degree, tail_eps, c_tilde)
    nu = nu_coeffs(surface, kappa, ws, tail_eps=tail_eps)
    duals = None if grid is None else (grid if isinstance(grid, GridDuals) else GridDuals(ws, grid))
    return ws, nu, duals


def _diagnostics(ws: FockWorkspace, nu, duals) -> dict:
    d = {
        "degree": ws.degree,
        "dim": ws.dim,
        "surface_tail": nu.tail,
        "v_measured": nu.projected_norm_sq_over_kappa_sq,
        "v_kernel": nu.norm_sq_over_kappa_sq,
        "zeta_condition": ws.zeta_condition,
        "smallest_singular_value": ws.smallest_singular_value,
    }
    if duals is not None:
        d["grid_max_tail"] = duals.max_tail
        d["grid_mean_tail"] = duals.mean_tail
    return d


def _sample_arrays(config, nu, rep, duals, sc, n_samples, chunk, unit_density):
    """Per-sample nu pairings, Wilson traces and densities."""
    def work(start, count):
        coeffs = sample_batch(config, start, count)
        g = nu_pairings(coeffs, nu)
        tr = wilson_traces(np.einsum("sa,aij->sij", g, rep.images))
        if unit_density:
            return g, tr, np.ones(count)
        y1, y2, y3, _ = accumulate(duals, coeffs, sc, config.kappa)
        return g, tr, y_density(y1, y2, y3)

    parts = map_chunks(work, n_samples, chunk)
    return tuple(np.concatenate(x) for x in zip(*parts))


def wilson_mc(surface, kappa: float, rep: Representation, sc: np.ndarray, n_samples: int,
              grid, seed: int = 0, *, degree="auto", tail_eps: float = DEFAULT_TAIL_EPS,
              workspace: FockWorkspace | None = None, c_tilde: float | None = None,
              unit_density: bool = False, n_batches: int = 20, chunk: int = 64) -> EstimateResult:
    """Self-normalized estimate of ``E[Tr J Y] / E[Y]`` over Gaussian field samples.

    With ``unit_density`` the density is forced to 1 and the estimate reduces to
    the plain mean of ``Tr J``. ``grid`` may be None in that case.
    """
    if not unit_density and grid is None:
        raise ConfigError("a w-grid is required unless the density is forced to 1")
    ws, nu, duals = _setup(surface, kappa, n_samples, grid, workspace, degree, tail_eps, c_tilde)
    config = WienerConfig(kappa, ws, rep.images.shape[0], seed)
    g, tr, dens = _sample_arrays(config, nu, rep, duals, sc, n_samples, chunk, unit_density)
    if not np.all(np.isfinite(dens)) or np.any(dens <= 0):
        raise WilsonLabError("non-finite or non-positive density encountered")

    v_meas = nu.projected_norm_sq_over_kappa_sq
    v_kern = nu.norm_sq_over_kappa_sq
    closed = float(np.real(np.trace(free_field_closed_form(rep, v_meas))))
    oracle = exact_su2_free_field(v_meas) if is_su2_standard(rep) else None
    diag = _diagnostics(ws, nu, duals)
    diag.update({
        "seed": int(seed),
        "n_w_nodes": None if duals is None else len(duals.grid.weights),
        "unit_density": bool(unit_density),
        "paper_closed_form_kernel_v": float(np.real(np.trace(free_field_closed_form(rep, v_kern)))),
        "oracle_kernel_v": exact_su2_free_field(v_kern) if oracle is not None else None,
        "area_law_limit": float(np.real(np.trace(area_law_limit(rep, surface.area)))),
        "g_empirical_var": float(np.mean(g**2)),
    })
    return EstimateResult(
        kappa=float(kappa),
        n_samples=int(n_samples),
        trace_estimate=complex(np.sum(tr * dens) / np.sum(dens)),
        std_error=ratio_se(tr * dens, dens, n_batches),
        free_field_estimate=complex(tr.mean()),
        free_field_std_error=float(np.std(tr) / np.sqrt(len(tr))),
        paper_closed_form=closed,
        oracle_value=oracle,
        area=surface.area,
        v_kernel=v_kern,
        v_measured=v_meas,
        mean_density=float(dens.mean()),
        mean_density_se=float(dens.std(ddof=1) / np.sqrt(len(dens))),
        diagnostics=diag,
    )


def free_field_mc(rep: Representation, v: float, n_draws: int, seed: int = 0, chunk: int = 100_000):
    """Plain MC of ``Tr exp(sum_a G_a rho(E^a))`` with G_a i.i.d. N(0, v)."""
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    total, total_sq, done = 0.0 + 0j, 0.0, 0
    while done < n_draws:
        c = min(chunk, n_draws - done)
        g = rng.normal(scale=math.sqrt(v), size=(c, rep.images.shape[0]))
        tr = wilson_traces(np.einsum("sa,aij->sij", g, rep.images))
        total += tr.sum()
        total_sq += float(np.sum(np.abs(tr) ** 2))
        done += c
    mean = total / n_draws
    var = (total_sq - n_draws * abs(mean) ** 2) / (n_draws - 1)
    return complex(mean), float(math.sqrt(var / n_draws))


# ------------------------------------------------------------------ potential


@dataclass(frozen=True)
class PotentialTable:
    group_kind: str
    n: int
    casimir: float
    rows: tuple  # ((R, V), ...)
    slope: float
    fit_residual: float
    log_ratio_residual: float


def potential(group_kind: str, n: int, r_values, t: float = 1.0) -> PotentialTable:
    """Quark potential ``V(R) = (R/8) C`` of the standard representation.

    ``log_ratio_residual`` compares against ``-log[W(R, T+1) / W(R, T)]`` built
    from the area-law Wilson loop at the given T.
    """
    r = np.asarray(list(r_values), dtype=float)
    if r.size == 0 or np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ConfigError("R values must be finite and non-negative")
    rep = standard_rep(build_basis(group_kind, n))
    cas = casimir(rep, require_scalar=True).scalar
    v = r * cas / 8.0

    def wloop(area):
        return float(np.real(np.trace(area_law_limit(rep, area))))

    v_log = np.array([-math.log(wloop(x * (t + 1)) / wloop(x * t)) for x in r])
    slope = float(np.dot(r, v) / np.dot(r, r)) if np.any(r > 0) else cas / 8.0
    return PotentialTable(
        group_kind, int(n), float(cas), tuple(zip(r.tolist(), v.tolist())), slope,
        float(np.max(np.abs(v - slope * r))), float(np.max(np.abs(v - v_log))),
    )


# ------------------------------------------------------------------ probes


@dataclass
class ProbeResult:
    kappa: float
    matrix: np.ndarray
    min_eigenvalue: float
    min_eigenvalue_se: float
    magnitude: float
    magnitude_se: float
    fourth_moment: float
    fourth_moment_se: float
    diagnostics: dict = field(default_factory=dict)


def positivity_probe(surface, kappa: float, rep: Representation, sc: np.ndarray, n_samples: int,
                     grid, seed: int = 0, *, degree="auto", tail_eps: float = DEFAULT_TAIL_EPS,
                     workspace: FockWorkspace | None = None, c_tilde: float | None = None,
                     n_batches: int = 20, chunk: int = 64) -> ProbeResult:
    """Estimate ``E[(B, nu)^2 (Y - 1)]`` and the smallest eigenvalue of its Hermitian part.

    Also reports ``E[|(B, nu)|^4]`` with the Frobenius norm, the fourth-moment bound.
    """
    ws, nu, duals = _setup(surface, kappa, n_samples, grid, workspace, degree, tail_eps, c_tilde)
    config = WienerConfig(kappa, ws, rep.images.shape[0], seed)

    def extra(coeffs):
        return nu_pairings(coeffs, nu)

    out = sample_y_values(config, duals, sc, n_samples, chunk, extra=extra)
    dens, g = out[3], out[5]
    m = np.einsum("sa,aij->sij", g, rep.images)
    m2 = m @ m
    contrib = m2 * (dens - 1.0)[:, None, None]
    est = contrib.mean(axis=0)

    def summarize(block):
        mat = block.mean(axis=0)
        herm = 0.5 * (mat + mat.conj().T)
        return np.linalg.eigvalsh(herm)[0], np.linalg.norm(mat)

    b = min(n_batches, n_samples)
    stats = np.array([summarize(x) for x in np.array_split(contrib, b)])
    mins, mags = stats[:, 0], stats[:, 1]
    lam_min, mag = summarize(contrib)
    q4 = np.sum(np.abs(m) ** 2, axis=(1, 2)) ** 2
    return ProbeResult(
        kappa=float(kappa),
        matrix=est,
        min_eigenvalue=float(lam_min),
        min_eigenvalue_se=float(mins.std(ddof=1) / math.sqrt(b)),
        magnitude=float(mag),
        magnitude_se=float(mags.std(ddof=1) / math.sqrt(b)),
        fourth_moment=float(q4.mean()),
        fourth_moment_se=float(batch_mean_se(q4, n_batches)),
        diagnostics=_diagnostics(ws, nu, duals),
    )
