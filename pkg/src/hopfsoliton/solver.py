"""Damped Newton relaxation for the radial Euler-Lagrange equations.

    f'' + 3 f'/r - 8 f (1-g)^2 / r^2 - 4 lam f (f^2 - 1) = 0
    g'' +   g'/r + f^2 (1-g) - 4 (1-g)(2g - g^2) / r^2  = 0

with f(0) = g(0) = 0 and f(r_c) = g(r_c) = 1. The second-order operators
are discretised in flux form, (r^3 f')' / r^3 and (r g')' / r, so that the
residual is exactly the gradient of a discrete action (see
:func:`discrete_action`).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solveh_banded

from .ansatz import action_total
from .errors import CutoffExceedsMesh, MeshMismatch, NonConvergence, SingularJacobian, WindowTooNarrow
from .profiles import ModelParams, RadialProfile

S_F_EXACT = 2.0
S_G_EXACT = 2.0 * math.sqrt(2.0)
ASYMPTOTIC_RADIUS = 10.0


@dataclass(frozen=True)
class SolverConfig:
    r_c: float = 50.0
    n: int = 2000  # interior nodes
    lam: float = 1.0
    tol: float = 1e-10
    max_iter: int = 100
    max_halvings: int = 10
    guess: str = "rational"
    mesh: str = "uniform"
    grading: float = 3.0
    fit_radius: float = 0.25

    def validate(self):
        if not self.r_c > 0:
            raise ValueError("r_c must be positive")
        if self.n < 100:
            raise ValueError("need at least 100 interior nodes")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.tol > 0 or self.max_iter < 1:
            raise ValueError("tolerance and iteration cap must be positive")
        if self.guess not in GUESSES:
            raise ValueError(f"unknown initial guess {self.guess!r}")
        if self.mesh not in ("uniform", "graded"):
            raise ValueError(f"unknown mesh kind {self.mesh!r}")
        return self

    @property
    def params(self):
        return ModelParams(self.lam)


def make_mesh(r_c, n, kind="uniform", grading=3.0):
    """n interior nodes plus the two end points 0 and r_c."""
    s = np.linspace(0.0, 1.0, n + 2)
    if kind == "uniform":
        r = r_c * s
    elif kind == "graded":
        # fine near the origin, coarse in the tail
        r = r_c * np.expm1(grading * s) / np.expm1(grading)
    else:
        raise ValueError(f"unknown mesh kind {kind!r}")
    r[0], r[-1] = 0.0, r_c
    return r


GUESSES = {
    "rational": lambda r: r / (1.0 + r),
    "tanh": np.tanh,
}


def initial_guess(kind, mesh):
    """f = g = r/(1+r) or tanh(r) with the end values pinned to the boundary conditions."""
    if kind not in GUESSES:
        raise ValueError(f"unknown initial guess {kind!r}")
    mesh = np.asarray(mesh, dtype=float)
    v = GUESSES[kind](mesh)
    v[0] = 0.0
    v[-1] = 1.0
    return RadialProfile(mesh, v.copy(), v.copy())


# ---------------------------------------------------------------------------
# residual, Jacobian and discrete action


def _nodal(prof, mesh):
    if hasattr(prof, "f_nodes"):
        if mesh is not None:
            mesh = np.asarray(mesh, dtype=float)
            if mesh.shape != prof.r.shape or not np.allclose(mesh, prof.r, rtol=0, atol=1e-12 * max(1.0, mesh[-1])):
                raise MeshMismatch("profile is not defined on the solver mesh")
        return prof.r, prof.f_nodes, prof.g_nodes
    if mesh is None:
        raise MeshMismatch("analytic profiles need an explicit mesh")
    mesh = np.asarray(mesh, dtype=float)
    return mesh, np.asarray(prof.f(mesh), float), np.asarray(prof.g(mesh), float)


def _geometry(r):
    h = np.diff(r)
    rm = 0.5 * (r[1:] + r[:-1])
    w = 0.5 * (h[1:] + h[:-1])  # dual cell widths of interior nodes
    return h, rm, w


def _residual_arrays(r, f, g, lam):
    h, rm, w = _geometry(r)
    ri, fi, gi = r[1:-1], f[1:-1], g[1:-1]
    flux_f = rm**3 * np.diff(f) / h
    flux_g = rm * np.diff(g) / h
    one_g = 1.0 - gi
    Rf = np.diff(flux_f) / (w * ri**3) - 8.0 * fi * one_g**2 / ri**2 - 4.0 * lam * fi * (fi**2 - 1.0)
    Rg = np.diff(flux_g) / (w * ri) + fi**2 * one_g - 4.0 * one_g * (2.0 * gi - gi**2) / ri**2
    return Rf, Rg


def el_residual(prof, params=ModelParams(), mesh=None):
    """Per-node residuals (R_f, R_g) of both equations at the interior nodes."""
    r, f, g = _nodal(prof, mesh)
    if r[0] != 0.0:
        raise MeshMismatch("solver meshes start at r = 0")
    return _residual_arrays(r, f, g, params.lam)


def _interleave(a, b):
    out = np.empty(2 * len(a))
    out[0::2] = a
    out[1::2] = b
    return out


def _jacobian_banded(r, f, g, lam):
    """Banded (l = u = 2) Jacobian of the interleaved residual (Rf_1, Rg_1, Rf_2, ...)."""
    h, rm, w = _geometry(r)
    ri, fi, gi = r[1:-1], f[1:-1], g[1:-1]
    n = len(ri)
    cf_lo = rm[:-1] ** 3 / h[:-1] / (w * ri**3)
    cf_hi = rm[1:] ** 3 / h[1:] / (w * ri**3)
    cg_lo = rm[:-1] / h[:-1] / (w * ri)
    cg_hi = rm[1:] / h[1:] / (w * ri)
    one_g = 1.0 - gi
    dRf_df = -(cf_lo + cf_hi) - 8.0 * one_g**2 / ri**2 - 4.0 * lam * (3.0 * fi**2 - 1.0)
    dRf_dg = 16.0 * fi * one_g / ri**2
    dRg_dg = -(cg_lo + cg_hi) - fi**2 - 4.0 * (-(2.0 * gi - gi**2) + one_g * (2.0 - 2.0 * gi)) / ri**2
    dRg_df = 2.0 * fi * one_g

    ab = np.zeros((5, 2 * n))
    # ab[2 + row - col, col] = J[row, col]
    ab[2, 0::2] = dRf_df
    ab[2, 1::2] = dRg_dg
    ab[1, 1::2] = dRf_dg  # row 2k, col 2k+1
    ab[3, 0::2] = dRg_df  # row 2k+1, col 2k
    ab[0, 2::2] = cf_hi[:-1]
    ab[0, 3::2] = cg_hi[:-1]
    ab[4, 0:-2:2] = cf_lo[1:]  # row 2k+2, col 2k
    ab[4, 1:-2:2] = cg_lo[1:]
    return ab


def discrete_action(prof, params=ModelParams(), mesh=None):
    """Action whose nodal gradient is -w r^3 R_f (f-rows) and -8 w r R_g (g-rows).

    Kinetic terms use midpoint fluxes; potential terms use trapezoid weights.
    The r = 0 end contributes its limiting value 0.
    """
    r, f, g = _nodal(prof, mesh)
    h, rm, _ = _geometry(r)
    kinetic = np.sum(0.5 * rm**3 * np.diff(f) ** 2 / h + 4.0 * rm * np.diff(g) ** 2 / h)
    weights = np.empty_like(r)
    weights[0] = 0.5 * h[0]
    weights[-1] = 0.5 * h[-1]
    weights[1:-1] = 0.5 * (h[1:] + h[:-1])
    pot = np.zeros_like(r)
    pos = r > 0
    rp, fp, gp = r[pos], f[pos], g[pos]
    pot[pos] = 4 * rp * fp**2 * (1 - gp) ** 2 + 8 * (2 * gp - gp**2) ** 2 / rp + params.lam * rp**3 * (fp**2 - 1) ** 2
    return float(kinetic + np.sum(weights * pot))


def action_gradient_scaling(r):
    """Row factors (w r^3, 8 w r) linking the action gradient to the residuals."""
    _, _, w = _geometry(np.asarray(r, dtype=float))
    ri = r[1:-1]
    return w * ri**3, 8.0 * w * ri


# ---------------------------------------------------------------------------
# diagnostics


def fit_small_r_exponent(r, values, r_lo, r_hi):
    """Least-squares slope of ln(values) against ln(r) over r_lo <= r <= r_hi."""
    sel = (r >= r_lo) & (r <= r_hi) & (values > 0)
    if np.count_nonzero(sel) < 3:
        return float("nan")
    return float(np.polyfit(np.log(r[sel]), np.log(values[sel]), 1)[0])


def small_r_exponents(prof, fit_radius=0.25):
    """Exponents s_f, s_g fitted from the third node out to ``fit_radius``.

    On coarse meshes the window is widened to hold at least four nodes.
    """
    r = prof.r
    r_lo = r[2]
    r_hi = max(fit_radius, r[min(5, len(r) - 1)])
    return (
        fit_small_r_exponent(r, prof.f_nodes, r_lo, r_hi),
        fit_small_r_exponent(r, prof.g_nodes, r_lo, r_hi),
    )


def monotonicity(prof, overshoot=1e-6):
    f, g = prof.f_nodes, prof.g_nodes
    tail = prof.r >= min(ASYMPTOTIC_RADIUS, 0.5 * prof.r_max)
    return {
        "f_monotone": bool(np.all(np.diff(f) >= 0)),
        "g_monotone": bool(np.all(np.diff(g) >= 0)),
        "f_tail_monotone": bool(np.all(np.diff(f[tail]) >= 0)),
        "g_tail_monotone": bool(np.all(np.diff(g[tail]) >= 0)),
        "bounded": bool(
            np.all(f >= -overshoot) and np.all(g >= -overshoot) and np.all(f <= 1 + overshoot) and np.all(g <= 1 + overshoot)
        ),
        "f_max": float(np.max(f)),
        "g_max": float(np.max(g)),
    }


def tail_slope(source, window, params=None, r_start=0.0, n_points=16):
    """Least-squares slope of S(r) against ln r for r in ``window``.

    ``source`` is a :class:`SolveReport` or a profile; for bare profiles pass
    ``params`` (default lam = 1).
    """
    prof = getattr(source, "profile", source)
    if params is None:
        params = getattr(source, "params", ModelParams())
    r_a, r_b = (float(v) for v in window)
    if not (r_b > r_a > r_start) or math.log(r_b / r_a) < 1e-6:
        raise WindowTooNarrow(f"window [{r_a}, {r_b}] is empty or degenerate")
    r_max = getattr(prof, "r_max", np.inf)
    if r_b > r_max * (1 + 1e-12):
        raise CutoffExceedsMesh(f"window end {r_b} exceeds the profile mesh end {r_max}")
    if r_a < ASYMPTOTIC_RADIUS:
        warnings.warn("tail window starts inside the core; slope is diagnostic only", stacklevel=2)
    radii = np.geomspace(r_a, r_b, n_points)
    n_quad = None
    if not hasattr(prof, "r"):
        n_quad = 20000
    actions = np.array([action_total(prof, params, r_c=rc, r_start=r_start, n_quad=n_quad) for rc in radii])
    return float(np.polyfit(np.log(radii), actions, 1)[0])


# ---------------------------------------------------------------------------
# Newton iteration


@dataclass(frozen=True)
class SolveReport:
    profile: RadialProfile
    residual_norm: float
    iterations: int
    action: float
    discrete_action: float
    s_f: float
    s_g: float
    tail_slope: float
    monotonicity: dict
    converged: bool
    history: tuple = ()
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def params(self):
        return self.config.params

    def to_dict(self):
        return {
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "action": self.action,
            "discrete_action": self.discrete_action,
            "s_f": self.s_f,
            "s_g": self.s_g,
            "tail_slope": self.tail_slope,
            "converged": self.converged,
            "monotonicity": self.monotonicity,
            "history": list(self.history),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _report_window(r_c):
    if r_c <= ASYMPTOTIC_RADIUS * 1.01:
        return None
    return (max(ASYMPTOTIC_RADIUS, 0.25 * r_c), r_c)


def _build_report(config, r, f, g, norm, iterations, converged, history):
    prof = RadialProfile(r, f, g)
    params = config.params
    s_f, s_g = small_r_exponents(prof, config.fit_radius)
    window = _report_window(config.r_c)
    slope = tail_slope(prof, window, params) if window else float("nan")
    return SolveReport(
        profile=prof,
        residual_norm=float(norm),
        iterations=iterations,
        action=action_total(prof, params),
        discrete_action=discrete_action(prof, params),
        s_f=s_f,
        s_g=s_g,
        tail_slope=slope,
        monotonicity=monotonicity(prof),
        converged=converged,
        history=tuple(history),
        config=config,
    )


def _hessian_upper(ab, row_scale):
    """Upper banded storage of the action Hessian H = -diag(row_scale) J."""
    hb = np.zeros((3, ab.shape[1]))
    cols = np.arange(ab.shape[1])
    for k in range(3):
        rows = cols + k - 2
        ok = rows >= 0
        hb[k, ok] = -row_scale[rows[ok]] * ab[k, ok]
    return hb


def _newton_step(ab, row_scale, res, max_shift=1e10):
    """Newton step J du = -R, with a diagonal shift where the Hessian is indefinite.

    Away from positive curvature the unshifted step can climb the action
    toward grid-scale collapsed-core solutions; the shifted step is a
    descent direction for the discrete action.
    """
    hb = _hessian_upper(ab, row_scale)
    grad = -row_scale * res
    shift = 0.0
    while True:
        h = hb.copy()
        h[2] += shift * np.abs(hb[2])
        try:
            step = solveh_banded(h, -grad)
            break
        except LinAlgError:
            shift = 1e-3 if shift == 0.0 else 10.0 * shift
            if shift > max_shift:
                raise SingularJacobian("no positive-definite shift of the Jacobian found") from None
    if not np.all(np.isfinite(step)):
        raise SingularJacobian("non-finite Newton step")
    return step, grad, shift


def newton_solve(config=SolverConfig(), initial=None, raise_on_failure=True):
    """Solve the boundary value problem; returns a :class:`SolveReport`.

    Each iteration solves the banded Newton system and backtracks (halving
    up to ``max_halvings`` times) until the residual infinity-norm does not
    grow and the discrete action satisfies an Armijo decrease.

    ``initial`` optionally replaces the named initial guess with a profile on
    the solver mesh. On failure :class:`NonConvergence` carries the best
    iterate in ``.report`` (or the report is returned with
    ``converged=False`` when ``raise_on_failure`` is false).
    """
    config.validate()
    r = make_mesh(config.r_c, config.n, config.mesh, config.grading)
    start = initial if initial is not None else initial_guess(config.guess, r)
    _, f, g = _nodal(start, r)
    f, g = f.copy(), g.copy()
    f[0] = g[0] = 0.0
    f[-1] = g[-1] = 1.0
    params = config.params
    lam = config.lam
    row_scale = _interleave(*action_gradient_scaling(r))

    def evaluate(f, g):
        Rf, Rg = _residual_arrays(r, f, g, lam)
        res = _interleave(Rf, Rg)
        return res, float(np.max(np.abs(res))), discrete_action(RadialProfile(r, f, g), params)

    res, norm, act = evaluate(f, g)
    history = [norm]
    iterations = 0
    converged = norm <= config.tol
    failure = None
    while not converged and iterations < config.max_iter:
        ab = _jacobian_banded(r, f, g, lam)
        try:
            step, grad, _ = _newton_step(ab, row_scale, res)
        except SingularJacobian as exc:
            raise SingularJacobian(f"iteration {iterations}: {exc}") from exc
        slope = float(grad @ step)
        slack = 64 * np.finfo(float).eps * abs(act)
        t = 1.0
        accepted = False
        for _ in range(config.max_halvings + 1):
            f_try = f.copy()
            g_try = g.copy()
            f_try[1:-1] += t * step[0::2]
            g_try[1:-1] += t * step[1::2]
            res_try, norm_try, act_try = evaluate(f_try, g_try)
            if np.isfinite(norm_try) and norm_try <= norm and act_try <= act + 1e-4 * t * slope + slack:
                accepted = True
                break
            t *= 0.5
        iterations += 1
        if not accepted:
            failure = f"line search stalled at residual {norm:.3e}"
            break
        f, g, res, norm, act = f_try, g_try, res_try, norm_try, act_try
        history.append(norm)
        converged = norm <= config.tol
    if not converged and failure is None:
        failure = f"no convergence in {config.max_iter} iterations (residual {norm:.3e})"
    report = _build_report(config, r, f, g, norm, iterations, converged, history)
    if not converged and raise_on_failure:
        raise NonConvergence(failure, report)
    return report
