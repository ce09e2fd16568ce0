import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from wilson_lab.bargmann import FockWorkspace
from wilson_lab.errors import ConfigError
from wilson_lab.estimator import (area_law_limit, exact_su2_free_field, free_field_closed_form, free_field_mc,
                                  is_su2_standard, positivity_probe, potential, ratio_se, wilson_matrices,
                                  wilson_mc, wilson_traces)
from wilson_lab.functionals import make_wgrid
from wilson_lab.lie import build_basis, standard_rep, trivial_rep
from wilson_lab.surface import RectSurface

SMALL = RectSurface((0.2, 0.0, 0.0), 0.2)


def chi3_average(fn, v):
    """E[fn(|G|)] for G ~ N(0, v I_3) by quadrature over the radial density."""
    s = math.sqrt(v)
    val, _ = integrate.quad(lambda r: fn(r) * stats.chi.pdf(r / s, 3) / s, 0, 40 * s)
    return val


@pytest.mark.parametrize("v", [0.01, 0.1, 0.7, 2.0])
def test_su2_oracle_against_radial_quadrature(v):
    want = chi3_average(lambda r: 2 * math.cos(r / math.sqrt(2)), v)
    assert exact_su2_free_field(v) == pytest.approx(want, abs=1e-10)


def test_closed_forms_for_su2():
    b = build_basis("su", 2)
    rep = standard_rep(b)
    assert is_su2_standard(rep)
    assert not is_su2_standard(standard_rep(build_basis("su", 3)))
    v = 0.3
    assert np.trace(free_field_closed_form(rep, v)).real == pytest.approx(2 * math.exp(-0.75 * v), abs=1e-14)
    assert np.trace(area_law_limit(rep, 1.0)).real == pytest.approx(2 * math.exp(-3 / 16), abs=1e-14)
    # the two forms agree to first order in v
    assert abs(exact_su2_free_field(1e-4) - 2 * math.exp(-0.75e-4)) < 1e-8
    with pytest.raises(ConfigError):
        free_field_closed_form(rep, -1.0)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_exponentials_are_unitary_and_traces_bounded(g):
    rep = standard_rep(build_basis("su", 2))
    m = np.einsum("a,aij->ij", np.array(g), rep.images)
    u = wilson_matrices(m)
    assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)
    assert abs(np.linalg.det(u) - 1) < 1e-12
    tr = wilson_traces(m)
    assert abs(tr - np.trace(u)) < 1e-12 and abs(tr) <= 2 + 1e-12
    assert tr == pytest.approx(2 * math.cos(np.linalg.norm(g) / math.sqrt(2)), abs=1e-12)


def test_free_field_mc_su2_and_so3():
    v = 0.5
    su2 = standard_rep(build_basis("su", 2))
    est, se = free_field_mc(su2, v, 200_000, seed=3)
    assert abs(est.real - exact_su2_free_field(v)) < 3 * se
    so3 = standard_rep(build_basis("so", 3))
    est, se = free_field_mc(so3, v, 200_000, seed=3)
    # rotation angle |G|/sqrt 2, trace 1 + 2 cos
    assert abs(est.real - (1 + exact_su2_free_field(v))) < 3 * se
    assert abs(est.imag) < 1e-12


def test_trivial_rep_gives_exact_dimension(su2):
    b, _, sc = su2
    r = wilson_mc(SMALL, 2.0, trivial_rep(b, 3), sc, 40, make_wgrid(16, 0), seed=1)
    assert r.trace_estimate == pytest.approx(3, abs=1e-14) and r.free_field_estimate == 3
    assert r.oracle_value is None


def test_unit_density_is_plain_mean(su2):
    _, rep, sc = su2
    r = wilson_mc(SMALL, 2.0, rep, sc, 200, None, seed=2, unit_density=True)
    assert r.trace_estimate == pytest.approx(r.free_field_estimate, abs=1e-14)
    assert r.mean_density == 1.0
    with pytest.raises(ConfigError):
        wilson_mc(SMALL, 2.0, rep, sc, 200, None)


def test_small_run_is_deterministic_and_sane(su2):
    _, rep, sc = su2
    grid = make_wgrid(32, 0)
    a = wilson_mc(SMALL, 2.0, rep, sc, 120, grid, seed=5)
    b = wilson_mc(SMALL, 2.0, rep, sc, 120, grid, seed=5)
    assert a.trace_estimate == b.trace_estimate and a.std_error == b.std_error
    assert abs(a.trace_estimate) <= 2
    assert abs(a.trace_estimate.imag) < 1e-12
    assert 0 < a.v_measured <= a.v_kernel
    assert a.area == pytest.approx(0.04)
    assert a.oracle_minus_paper == pytest.approx(a.oracle_value - a.paper_closed_form)


def test_estimator_input_validation(su2):
    _, rep, sc = su2
    with pytest.raises(ConfigError):
        wilson_mc(SMALL, 0.0, rep, sc, 10, make_wgrid(4, 0))
    with pytest.raises(ConfigError):
        wilson_mc(SMALL, 1.0, rep, sc, 1, make_wgrid(4, 0))


def test_ratio_se_on_constant_ratio():
    den = np.linspace(1, 2, 100)
    assert ratio_se(3 * den, den) == pytest.approx(0.0, abs=1e-14)
    x = np.random.default_rng(0).normal(size=10_000)
    assert ratio_se(x, np.ones_like(x)) == pytest.approx(0.01, rel=0.4)


@pytest.mark.parametrize("kind,n,slope", [("su", 2, 3 / 16), ("su", 3, 1 / 3), ("so", 3, 1 / 8)])
def test_potential_slopes(kind, n, slope):
    t = potential(kind, n, [0, 1, 2, 3])
    assert t.slope == pytest.approx(slope, abs=1e-14)
    assert t.fit_residual < 1e-14 and t.log_ratio_residual < 1e-12
    assert t.rows[0] == (0.0, 0.0)


def test_su3_potential_at_three():
    assert potential("su", 3, [3]).rows[0][1] == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ConfigError):
        potential("su", 2, [-1])


def test_probe_trivial_rep_is_zero(su2):
    b, _, sc = su2
    p = positivity_probe(SMALL, 2.0, trivial_rep(b), sc, 40, make_wgrid(16, 0),
                         workspace=FockWorkspace(4))
    assert np.all(p.matrix == 0) and p.fourth_moment == 0


def test_probe_fourth_moment_matches_gaussian_formula(su2):
    # orthonormal basis: |M|_F^2 = sum_a g_a^2, so E|M|^4 = (3^2 + 2*3) v^2
    _, rep, sc = su2
    p = positivity_probe(SMALL, 2.0, rep, sc, 4000, make_wgrid(8, 0), workspace=FockWorkspace(4))
    v = p.diagnostics["v_measured"]
    assert p.fourth_moment == pytest.approx(15 * v**2, rel=0.1)
    assert np.isfinite(p.min_eigenvalue)
