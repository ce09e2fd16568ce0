"""Acceptance criteria 1-11.

Each test prints one ``PASS``/``FAIL`` line and then asserts. Run with

    python3 -m pytest tests/test_acceptance.py -v

or directly as a script (``python3 tests/test_acceptance.py``) for the summary lines alone.
"""
import csv
import io
import itertools
import math
import sys
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from conftest import CRITERION_LINES
from wilson_lab.bargmann import FockWorkspace, choose_degree, kernel_xi_inner, xi_coeffs
from wilson_lab.cli import main as cli_main
from wilson_lab.estimator import auto_workspace, exact_su2_free_field, free_field_mc, potential
from wilson_lab.functionals import GridDuals, batch_mean_se, make_wgrid, sample_y_values
from wilson_lab.lie import build_basis, casimir, standard_rep, structure_constants
from wilson_lab.records import read_jsonl
from wilson_lab.sampler import WienerConfig
from wilson_lab.surface import RectSurface, nu_norm_closed_form, nu_norm_kernel

pytestmark = pytest.mark.acceptance

CRIT8_ARGS = ["wilson", "--group", "su", "--n", "2", "--kappa", "4", "--ax", "0.5", "--t", "0.5",
              "--samples", "10000", "--w-nodes", "512", "--seed", "0"]
_cache = {}


def report(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    print(line)
    CRITERION_LINES.append(line)
    return ok


def run_wilson_cli(extra=(), out=None):
    buf = io.StringIO()
    argv = list(CRIT8_ARGS) + list(extra) + (["--out", out] if out else [])
    with redirect_stdout(buf):
        code = cli_main(argv)
    assert code == 0
    return buf.getvalue(), list(csv.DictReader(io.StringIO(buf.getvalue())))


def criterion8_run(tmp_dir):
    if "c8" not in _cache:
        t0 = time.perf_counter()
        text, rows = run_wilson_cli(out=str(tmp_dir / "crit8.jsonl"))
        _cache["c8"] = (text, rows[0], time.perf_counter() - t0, read_jsonl(str(tmp_dir / "crit8.jsonl"))[0])
    return _cache["c8"]


def test_criterion_1_algebra_exactness():
    t0 = time.perf_counter()
    dev = 0.0
    for kind, ns, want in (("su", (2, 3, 4), lambda n: 1 / n - n), ("so", (3, 4, 5), lambda n: (1 - n) / 2)):
        for n in ns:
            e = build_basis(kind, n).generators
            s = np.einsum("aij,ajk->ik", e, e)
            dev = max(dev, float(np.max(np.abs(s - want(n) * np.eye(n)))))
            dev = max(dev, abs(casimir(standard_rep(build_basis(kind, n))).scalar + want(n)))
    dt = time.perf_counter() - t0
    ok = dev < 1e-10 and dt < 1
    assert report(1, ok, f"max deviation {dev:.2e} (< 1e-10), {dt:.3f} s")


def test_criterion_2_structure_constants():
    t0 = time.perf_counter()
    e = build_basis("su", 2).generators
    c = structure_constants(build_basis("su", 2))
    # brute force: c[g, a, b] = -Tr(E^g [E^a, E^b]) with explicit loops
    eps = np.zeros((3, 3, 3))
    for i, j, k in itertools.permutations(range(3)):
        eps[i, j, k] = np.linalg.det(np.eye(3)[[i, j, k]])
    brute = np.zeros((3, 3, 3))
    for g, a, b in itertools.product(range(3), repeat=3):
        brute[g, a, b] = -np.trace(e[g] @ (e[a] @ e[b] - e[b] @ e[a])).real
    dev = max(float(np.max(np.abs(c - math.sqrt(2) * eps))), float(np.max(np.abs(brute - math.sqrt(2) * eps))))
    dt = time.perf_counter() - t0
    ok = dev < 1e-12 and dt < 1
    assert report(2, ok, f"max |c - sqrt2 eps| {dev:.2e} (< 1e-12), {dt:.3f} s")


def test_criterion_3_kernel_norms():
    t0 = time.perf_counter()
    slots = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    rng = np.random.default_rng(3)
    kern_dev = trunc_dev = 0.0
    for r in (0.0, 0.5, 1.0, 1.5, 2.0):
        for _ in range(4):
            z = rng.normal(size=4) + 1j * rng.normal(size=4)
            w = r * z / np.linalg.norm(z)
            # automatic degree from the Poisson tail rule with a 1e-9 budget
            ws = FockWorkspace(choose_degree(r, 1e-9))
            for a, b in slots:
                kern_dev = max(kern_dev, abs(kernel_xi_inner(a, b, w, a, b, w) - 1 / (2 * math.pi)))
                coeffs, _ = xi_coeffs(ws, a, b, w)
                trunc_dev = max(trunc_dev, abs(np.sum(np.abs(coeffs) ** 2) - 1 / (2 * math.pi)))
    dt = time.perf_counter() - t0
    ok = kern_dev < 1e-14 and trunc_dev < 1e-8 and dt < 5
    assert report(3, ok, f"kernel deviation {kern_dev:.1e}, truncated {trunc_dev:.2e} (< 1e-8), {dt:.2f} s")


def test_criterion_4_nu_norm_convergence():
    t0 = time.perf_counter()
    s = RectSurface((1.0, 0.0, 0.0), 1.0)
    vals = [nu_norm_kernel(s, k) for k in (16, 32, 64)]
    closed = [nu_norm_closed_form(s, k) for k in (16, 32, 64)]
    dev_closed = max(abs(a - b) for a, b in zip(vals, closed))
    rel = (0.25 - vals[-1]) / 0.25
    dt = time.perf_counter() - t0
    ok = vals[0] < vals[1] < vals[2] < 0.25 and dev_closed < 1e-8 and 0 <= rel < 0.08 and dt < 10
    assert report(4, ok, f"values {', '.join(f'{v:.6f}' for v in vals)}; closed-form dev {dev_closed:.1e}; "
                         f"{100 * rel:.2f}% below 0.25 at kappa 64; {dt:.2f} s")


def test_criterion_5_combined_square():
    t0 = time.perf_counter()
    basis = build_basis("su", 2)
    s = RectSurface((0.5, 0.0, 0.0), 0.5)
    ws = auto_workspace(s, 4.0)
    duals = GridDuals(ws, make_wgrid(256, 0))
    y1, y2, y3, _, comb = sample_y_values(WienerConfig(4.0, ws, 3, 0), duals, structure_constants(basis), 100)
    dev = float(np.max(np.abs(y1 + y2 + y3 - comb)))
    dt = time.perf_counter() - t0
    ok = dev < 1e-8 and dt < 120
    assert report(5, ok, f"max |Y1+Y2+Y3 - combined| {dev:.2e} over 100 samples (< 1e-8), {dt:.1f} s")


@pytest.mark.slow
def test_criterion_6_density_moments():
    t0 = time.perf_counter()
    sc = structure_constants(build_basis("su", 2))
    ws = FockWorkspace(12)  # fixed so that only kappa changes between the two runs
    duals = GridDuals(ws, make_wgrid(512, 0))
    bound = (1 - 2 / math.pi) ** -3
    stats = {}
    for k in (4.0, 8.0):
        dens = sample_y_values(WienerConfig(k, ws, 3, 0), duals, sc, 10_000)[3]
        stats[k] = (dens.mean(), batch_mean_se(dens), (dens**2).mean(), batch_mean_se(dens**2))
    dt = time.perf_counter() - t0
    in_band = all(abs(m - 1) <= 5 * se for m, se, _, _ in stats.values())
    trend = abs(stats[8.0][0] - 1) < abs(stats[4.0][0] - 1)
    second = all(m2 <= bound + 3 * se2 for _, _, m2, se2 in stats.values())
    ok = in_band and trend and second and dt < 600
    detail = "; ".join(f"kappa {k:g}: E[Y]={m:.5f}+-{se:.1e} ({(m - 1) / se:+.0f} SE), E[Y^2]={m2:.4f}"
                       for k, (m, se, m2, _) in stats.items())
    assert report(6, ok, f"{detail}; band {in_band}, trend {trend}, second moment <= {bound:.2f} {second}; "
                         f"{dt:.0f} s")


def test_criterion_7_free_field_oracle():
    t0 = time.perf_counter()
    rep = standard_rep(build_basis("su", 2))
    est, se = free_field_mc(rep, 0.1, 1_000_000, seed=0)
    want = exact_su2_free_field(0.1)
    dt = time.perf_counter() - t0
    ok = abs(est.real - want) < 3 * se and se < 2e-3 and dt < 60
    assert report(7, ok, f"{est.real:.6f} +- {se:.1e} vs {want:.6f} ({(est.real - want) / se:+.2f} SE), {dt:.1f} s")


@pytest.mark.slow
def test_criterion_8_full_estimator(tmp_path_factory):
    _, row, dt, record = criterion8_run(tmp_path_factory.mktemp("c8"))
    est, se, oracle = float(row["estimate"]), float(row["std_error"]), float(row["oracle"])
    recorded = record["results"][0]["oracle_minus_paper"]
    ok = abs(est - oracle) < 3 * se and dt < 1800 and recorded is not None
    assert report(8, ok, f"{est:.6f} +- {se:.1e} vs oracle {oracle:.6f} at v={float(row['v_measured']):.5f} "
                         f"({(est - oracle) / se:+.2f} SE); oracle - closed form {recorded:.2e} recorded; {dt:.0f} s")


@pytest.mark.slow
def test_criterion_9_interaction_trend(tmp_path_factory):
    _, row4, _, _ = criterion8_run(tmp_path_factory.mktemp("c8"))
    _, rows2 = run_wilson_cli(["--kappa", "2"])
    gap = {k: abs(float(r["estimate"]) - float(r["unweighted_estimate"])) for k, r in ((2, rows2[0]), (4, row4))}
    ok = gap[4] < gap[2]
    assert report(9, ok, f"|weighted - unweighted| {gap[2]:.3e} at kappa 2 -> {gap[4]:.3e} at kappa 4")


def test_criterion_10_potential_linearity():
    t0 = time.perf_counter()
    r = [0.0, 1.0, 2.0, 3.0]
    tables = {name: potential(kind, n, r) for name, kind, n in (("SU(2)", "su", 2), ("SU(3)", "su", 3),
                                                                 ("SO(3)", "so", 3))}
    want = {"SU(2)": 3 / 16, "SU(3)": 1 / 3, "SO(3)": 1 / 8}
    slope_dev = max(abs(t.slope - want[k]) for k, t in tables.items())
    lin = max(t.fit_residual for t in tables.values())
    v3 = tables["SU(3)"].rows[-1][1]
    dt = time.perf_counter() - t0
    ok = slope_dev < 1e-12 and lin < 1e-12 and abs(v3 - 1) < 1e-12 and dt < 1
    assert report(10, ok, f"slope deviation {slope_dev:.1e}, linearity residual {lin:.1e}, "
                          f"V_SU(3)(3) = {v3!r}, {dt:.3f} s")


@pytest.mark.slow
def test_criterion_11_determinism(tmp_path_factory):
    text1, _, _, _ = criterion8_run(tmp_path_factory.mktemp("c8"))
    text2, _ = run_wilson_cli()
    ok = text1 == text2
    n = len(list(csv.DictReader(io.StringIO(text1)))[0])
    assert report(11, ok, f"repeat of criterion 8 run: {n} CSV fields {'identical' if ok else 'differ'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
