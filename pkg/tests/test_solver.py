import json
import math

import numpy as np
import pytest

from hopfsoliton.errors import MeshMismatch, NonConvergence, SingularJacobian, WindowTooNarrow
from hopfsoliton.profiles import ModelParams, RadialProfile, constant_profile
from hopfsoliton.solver import (
    SolverConfig,
    _newton_step,
    action_gradient_scaling,
    discrete_action,
    el_residual,
    initial_guess,
    make_mesh,
    newton_solve,
    tail_slope,
)


def mesh_for(r_c=50.0, n=2000):
    return make_mesh(r_c, n)


def test_config_validation():
    for bad in (dict(r_c=-1.0), dict(n=50), dict(lam=0.0), dict(guess="zero"), dict(mesh="log")):
        with pytest.raises(ValueError):
            SolverConfig(**bad).validate()


def test_meshes():
    r = make_mesh(50.0, 2000)
    assert len(r) == 2002 and r[0] == 0.0 and r[-1] == 50.0
    np.testing.assert_allclose(np.diff(r), 50.0 / 2001)
    g = make_mesh(50.0, 500, "graded")
    assert g[0] == 0.0 and g[-1] == 50.0 and np.all(np.diff(np.diff(g)) > 0)


def test_initial_guesses():
    r = mesh_for()
    rational = initial_guess("rational", np.array([0.0, 1.0, 2.0, 3.0]))
    assert rational.f_nodes[1] == 0.5 and rational.g_nodes[1] == 0.5
    for kind in ("rational", "tanh"):
        prof = initial_guess(kind, r)
        assert prof.f_nodes[0] == 0.0 and prof.g_nodes[0] == 0.0
        Rf, Rg = el_residual(prof)
        assert max(np.max(np.abs(Rf)), np.max(np.abs(Rg))) > 1e-2


def test_trivial_residuals():
    r = mesh_for(10.0, 200)
    for value in (1.0, 0.0):
        Rf, Rg = el_residual(constant_profile(value, value), ModelParams(), mesh=r)
        assert np.max(np.abs(Rf)) == 0.0 and np.max(np.abs(Rg)) == 0.0


def test_residual_against_continuous_operator():
    # smooth test functions: the flux form is second-order accurate
    def residual_exact(r, lam=1.0):
        f, fp, fpp = np.tanh(r) ** 2, 2 * np.tanh(r) / np.cosh(r) ** 2, None
        t, s = np.tanh(r), 1 / np.cosh(r) ** 2
        fpp = 2 * s**2 - 4 * t**2 * s
        g, gp = t**3, 3 * t**2 * s
        gpp = 6 * t * s**2 - 6 * t**3 * s
        Rf = fpp + 3 * fp / r - 8 * f * (1 - g) ** 2 / r**2 - 4 * lam * f * (f**2 - 1)
        Rg = gpp + gp / r + f**2 * (1 - g) - 4 * (1 - g) * (2 * g - g**2) / r**2
        return Rf, Rg

    errs = []
    for n in (199, 399):
        r = make_mesh(10.0, n)
        prof = RadialProfile(r, np.tanh(r) ** 2, np.tanh(r) ** 3)
        Rf, Rg = el_residual(prof)
        ef, eg = residual_exact(r[1:-1])
        sel = r[1:-1] > 1.0
        errs.append(max(np.max(np.abs(Rf - ef)[sel]), np.max(np.abs(Rg - eg)[sel])))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_mesh_mismatch():
    prof = initial_guess("tanh", make_mesh(10.0, 200))
    with pytest.raises(MeshMismatch):
        el_residual(prof, mesh=make_mesh(10.0, 300))
    with pytest.raises(MeshMismatch):
        el_residual(constant_profile(1.0, 1.0))


def five_point_derivative(fun, x0, h):
    # exact for polynomials of degree <= 4
    return (fun(x0 - 2 * h) - 8 * fun(x0 - h) + 8 * fun(x0 + h) - fun(x0 + 2 * h)) / (12 * h)


@pytest.mark.parametrize("mesh_kind", ["uniform", "graded"])
def test_residual_is_scaled_gradient_of_discrete_action(mesh_kind):
    r = make_mesh(20.0, 150, mesh_kind)
    rng = np.random.default_rng(3)
    f = np.tanh(r) + 0.05 * rng.normal(size=r.size)
    g = np.tanh(r) ** 2 + 0.05 * rng.normal(size=r.size)
    f[0] = g[0] = 0.0
    f[-1] = g[-1] = 1.0
    params = ModelParams(1.3)
    Rf, Rg = el_residual(RadialProfile(r, f, g), params)
    sf, sg = action_gradient_scaling(r)
    for i in (1, 2, 7, 40, 120, 149):
        def s_of_f(v):
            ff = f.copy()
            ff[i] = v
            return discrete_action(RadialProfile(r, ff, g), params)

        def s_of_g(v):
            gg = g.copy()
            gg[i] = v
            return discrete_action(RadialProfile(r, f, gg), params)

        df = five_point_derivative(s_of_f, f[i], 1e-2)
        dg = five_point_derivative(s_of_g, g[i], 1e-2)
        assert df == pytest.approx(-sf[i - 1] * Rf[i - 1], rel=1e-8, abs=1e-10)
        assert dg == pytest.approx(-sg[i - 1] * Rg[i - 1], rel=1e-8, abs=1e-10)


def test_default_solve(solution):
    rep = solution
    assert rep.converged and rep.residual_norm <= 1e-10 and rep.iterations <= 100
    prof = rep.profile
    assert prof.satisfies_boundary_conditions(0.0)
    assert rep.monotonicity["bounded"]
    assert rep.monotonicity["f_tail_monotone"] and rep.monotonicity["g_tail_monotone"]
    assert np.all(prof.f_nodes >= 0) and np.all(prof.g_nodes <= 1 + 1e-6)
    assert rep.s_f == pytest.approx(2.0, rel=0.05)
    assert rep.s_g == pytest.approx(2 * math.sqrt(2), rel=0.05)
    Rf, Rg = el_residual(prof)
    assert max(np.max(np.abs(Rf)), np.max(np.abs(Rg))) == rep.residual_norm


def test_residual_history_never_increases(solution):
    h = np.array(solution.history)
    assert np.all(np.diff(h) <= 0)
    tanh = newton_solve(SolverConfig(guess="tanh"))
    assert np.all(np.diff(tanh.history) <= 0)


def test_independent_of_initial_guess(solution):
    other = newton_solve(SolverConfig(guess="tanh"))
    assert np.max(np.abs(other.profile.f_nodes - solution.profile.f_nodes)) < 1e-8
    assert np.max(np.abs(other.profile.g_nodes - solution.profile.g_nodes)) < 1e-8


def test_mesh_convergence_of_action():
    actions = [newton_solve(SolverConfig(n=n)).discrete_action for n in (249, 499, 999, 1999)]
    d = np.diff(actions)
    ratios = d[:-1] / d[1:]
    for q in ratios:
        assert q == pytest.approx(4.0, rel=0.3)


def test_cutoff_stability(solution):
    wide = newton_solve(SolverConfig(r_c=100.0, n=3999))
    r = np.linspace(0.0, 10.0, 501)
    assert np.max(np.abs(wide.profile.f(r) - solution.profile.f(r))) < 1e-4
    assert np.max(np.abs(wide.profile.g(r) - solution.profile.g(r))) < 1e-4


def test_graded_mesh_converges():
    rep = newton_solve(SolverConfig(mesh="graded"))
    assert rep.converged
    assert rep.action == pytest.approx(32.545, abs=1e-3)


def test_nonconvergence_returns_best_iterate():
    with pytest.raises(NonConvergence) as info:
        newton_solve(SolverConfig(max_iter=1))
    rep = info.value.report
    assert not rep.converged and rep.iterations == 1
    assert rep.residual_norm <= rep.history[0]
    rep2 = newton_solve(SolverConfig(max_iter=1), raise_on_failure=False)
    assert rep2.residual_norm == rep.residual_norm


def test_singular_system_is_reported():
    ab = np.zeros((5, 4))
    with pytest.raises(SingularJacobian):
        _newton_step(ab, np.ones(4), np.ones(4))


def test_report_json_keys(solution):
    data = json.loads(solution.to_json())
    for key in ("residual_norm", "iterations", "action", "s_f", "s_g", "tail_slope", "converged"):
        assert key in data


def test_tail_slope_of_constant_profile():
    one = constant_profile(1.0, 1.0)
    assert tail_slope(one, (50.0, 200.0), r_start=1.0) == pytest.approx(8.0, abs=1e-8)


def test_tail_slope_window_checks(solution):
    with pytest.raises(WindowTooNarrow):
        tail_slope(solution, (20.0, 20.0))
    with pytest.warns(UserWarning):
        core = tail_slope(solution, (0.5, 4.0))
    assert abs(core - 8.0) > 0.5
