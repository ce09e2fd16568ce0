"""Fast invariant checks run by ``wilson-lab selftest``."""
from __future__ import annotations

import math
import time

import numpy as np

from .bargmann import DEFAULT_C_TILDE, FockWorkspace, choose_degree, kernel_xi_inner, psi
from .estimator import exact_su2_free_field, potential, wilson_matrices
from .functionals import GridDuals, make_wgrid, y_terms_batch
from .lie import build_basis, casimir, casimir_formula, jacobi_residual, standard_rep, structure_constants
from .sampler import WienerConfig, field_from_potential, pair_pi, sample_batch, sample_field
from .surface import RectSurface, area, nu_norm_closed_form, nu_norm_kernel


def check_algebra():
    worst = 0.0
    for kind, ns in (("su", (2, 3, 4)), ("so", (3, 4, 5))):
        for n in ns:
            c = casimir(standard_rep(build_basis(kind, n))).matrix
            worst = max(worst, float(np.max(np.abs(c - casimir_formula(kind, n) * np.eye(n)))))
    return worst < 1e-10, f"max Casimir deviation {worst:.2e}"


def check_structure_constants():
    c = structure_constants(build_basis("su", 2))
    eps = np.zeros((3, 3, 3))
    for (i, j, k), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                         ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[i, j, k] = s
    dev = float(np.max(np.abs(c - math.sqrt(2) * eps)))
    jac = jacobi_residual(structure_constants(build_basis("su", 3)))
    return dev < 1e-12 and jac < 1e-12, f"su(2) dev {dev:.2e}, su(3) Jacobi {jac:.2e}"


def check_kernel_norm():
    w = np.array([1.2, 0.3j, -0.5, 0.4 + 0.2j])
    exact = kernel_xi_inner(0, 1, w, 0, 1, w).real
    ws = FockWorkspace(choose_degree(float(np.linalg.norm(w)), 1e-10))
    trunc = float(np.sum(np.abs(psi(w) * ws.chi(w)[0]) ** 2))
    ok = abs(exact - DEFAULT_C_TILDE**2) < 1e-14 and abs(trunc - exact) < 1e-8
    return ok, f"kernel {exact:.15f}, truncated {trunc:.15f}"


def check_nu_norm():
    r = RectSurface((1.0, 0.0, 0.0), 1.0)
    vals = [float(nu_norm_kernel(r, k)) for k in (16, 32, 64)]
    dev = max(abs(v - nu_norm_closed_form(r, k)) for v, k in zip(vals, (16, 32, 64)))
    ok = dev < 1e-8 and vals[0] < vals[1] < vals[2] < 0.25
    return ok, f"values {vals}, oracle dev {dev:.2e}"


def check_area():
    r = RectSurface((0.3, -0.4, 1.2), 0.7)
    a1, a2 = area(r), area(r.swapped())
    return abs(a1 - r.a_norm * r.T) < 1e-10 and abs(a1 - a2) < 1e-10, f"area {a1:.15f}, swapped {a2:.15f}"


def check_defining_property():
    ws = FockWorkspace(6)
    a = np.random.default_rng(0).normal(size=(3, 2, ws.dim))
    f = field_from_potential(ws, a)
    w = np.array([0.2 + 0.1j, -0.3, 0.1j, 0.4])
    got = pair_pi(f, 2, 1, w)
    want = psi(w) * ws.evaluate(a[1, 1], w)[0]
    return abs(got - want) < 1e-8, f"|pi - psi A(w)| = {abs(got - want):.2e}"


def check_combined_square():
    b = build_basis("su", 2)
    ws = FockWorkspace(6)
    duals = GridDuals(ws, make_wgrid(64, 3))
    cfg = WienerConfig(4.0, ws, 3, 11)
    y1, y2, y3, dens, comb = y_terms_batch(sample_batch(cfg, 0, 8), duals, structure_constants(b), 4.0)
    dev = float(np.max(np.abs(y1 + y2 + y3 - comb)))
    ok = dev < 1e-8 and np.all(y3 >= 0) and np.max(np.abs(y1 - np.conj(y2))) < 1e-10 and np.all(dens > 0)
    return bool(ok), f"identity dev {dev:.2e}"


def check_determinism():
    cfg = WienerConfig(2.0, FockWorkspace(4), 3, 5)
    same = np.array_equal(sample_field(cfg, 7).coeffs, sample_batch(cfg, 5, 4)[2])
    return same, "sample stream reproducible by (seed, index)"


def check_unitarity():
    rep = standard_rep(build_basis("su", 3))
    g = np.random.default_rng(1).normal(size=(50, 8))
    u = wilson_matrices(np.einsum("sa,aij->sij", g, rep.images))
    dev = float(np.max(np.abs(np.conj(np.swapaxes(u, 1, 2)) @ u - np.eye(3))))
    return dev < 1e-10, f"max |U^H U - I| = {dev:.2e}"


def check_oracle_expansion():
    v = 1e-4
    dev = abs(exact_su2_free_field(v) - 2 * math.exp(-0.75 * v))
    return dev < 1e-7, f"oracle vs commuting form at v=1e-4: {dev:.2e}"


def check_potential():
    t = potential("su", 3, [0, 1, 2, 3])
    return abs(t.rows[3][1] - 1.0) < 1e-12 and t.fit_residual < 1e-12, f"V_su3(3) = {t.rows[3][1]!r}"


CHECKS = [
    ("algebra", check_algebra),
    ("structure-constants", check_structure_constants),
    ("kernel-norm", check_kernel_norm),
    ("nu-norm", check_nu_norm),
    ("area", check_area),
    ("defining-property", check_defining_property),
    ("combined-square", check_combined_square),
    ("determinism", check_determinism),
    ("unitarity", check_unitarity),
    ("oracle-expansion", check_oracle_expansion),
    ("potential", check_potential),
]


def run_selftest():
    rows = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, do not abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append({"check": name, "passed": bool(ok), "seconds": time.perf_counter() - t0, "detail": detail})
    return rows
