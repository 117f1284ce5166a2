"""Verification suite: algebraic identities and analytic-vs-numeric field checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import ansatz
from .algebra import pauli_completeness, pauli_epsilon_product
from .hopf import omega2_pullback, tangent_basis
from .profiles import constant_profile, smooth_test_profile

IDENTITY_TOL = 1e-8
FD_REL_TOL = 1e-6
THETA_TOL = 1e-10
FORM_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.max_residual) and self.max_residual < self.tolerance)

    def row(self):
        return f"{self.name:<28s} {self.max_residual:11.3e} {self.tolerance:9.1e}  {'PASS' if self.passed else 'FAIL'}"


def random_points(n, seed=0, r_min=0.5, r_max=5.0):
    """Seeded points in R^4 with isotropic directions and radii uniform in [r_min, r_max]."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(n, 4))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u * rng.uniform(r_min, r_max, size=(n, 1))


def pauli_checks():
    p1 = max(abs(l - r) for l, r in (pauli_completeness(*idx) for idx in itertools.product((1, 2), repeat=4)))
    p2 = max(
        abs(l - r)
        for l, r in (pauli_epsilon_product(a, *idx) for a in (1, 2, 3) for idx in itertools.product((1, 2), repeat=4))
    )
    return [CheckResult("pauli_completeness", float(p1), IDENTITY_TOL), CheckResult("pauli_epsilon_product", float(p2), IDENTITY_TOL)]


def m_identity_checks(points):
    worst = {}
    for x in points:
        for name, res in ansatz.identity_residuals(x).items():
            worst[name] = max(worst.get(name, 0.0), res)
    return [CheckResult(f"m_{name}", val, IDENTITY_TOL) for name, val in worst.items()]


def contraction_checks(points, prof):
    r = np.linalg.norm(points, axis=1)
    f, g, fp, gp = prof.f(r), prof.g(r), prof.df(r), prof.dg(r)
    kin = ansatz.kinetic_contraction(points, prof)
    kin_exact = 8 * f**2 * (1 - g) ** 2 / r**2 + fp**2
    fs = ansatz.field_strength_analytic(points, prof)
    mixed = ansatz.mixed_square(fs)
    mixed_exact = 4 * (2 * g - g**2) ** 2 / r**4 + gp**2 / r**2
    return [
        CheckResult("kinetic_contraction", float(np.max(np.abs(kin - kin_exact))), IDENTITY_TOL),
        CheckResult("mixed_field_square", float(np.max(np.abs(mixed - mixed_exact))), IDENTITY_TOL),
    ]


def field_strength_relative_error(x, prof, h_rel=1e-5):
    """max |F_analytic - F_fd| / max |F_analytic| at one point, step h = h_rel * r."""
    r = float(np.linalg.norm(x))
    fa = ansatz.field_strength_analytic(x, prof).F
    fn = ansatz.field_strength_numeric(x, prof, h_rel * r).F
    return float(np.max(np.abs(fa - fn)) / np.max(np.abs(fa)))


def field_strength_checks(points, prof, max_points=200):
    worst = max(field_strength_relative_error(x, prof) for x in points[:max_points])
    return [CheckResult("field_strength_fd", worst, FD_REL_TOL)]


def theta_checks(points, prof):
    fwf, _ = ansatz.theta_densities(points, prof)
    return [CheckResult("theta_density_zero", float(np.max(np.abs(fwf))), THETA_TOL)]


def boundary_form_residual(points, prof, radius):
    """max |F_unbroken(R u)(R t, R s) + omega2(u)(t, s)| over tangent pairs of the unit sphere."""
    u = points / np.linalg.norm(points, axis=1, keepdims=True)
    worst = 0.0
    for ui in u:
        F = ansatz.boundary_u1(radius * ui, prof).F_unbroken * radius**2
        w = omega2_pullback(ui).matrix
        basis = tangent_basis(ui)
        diff = basis.T @ (F + w) @ basis
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def boundary_checks(points, prof=None, radius=None):
    """The unbroken field strength on a sphere where g = 1 against -omega2."""
    if prof is None:
        prof, radius = constant_profile(1.0, 1.0), 1.0
    elif radius is None:
        radius = prof.r_max
    return [CheckResult("boundary_F_minus_omega2", boundary_form_residual(points, prof, radius), FORM_TOL)]


def run_checks(n_points=1000, seed=0, prof=None):
    """All checks; profile-dependent ones use ``prof`` or a smooth analytic test profile."""
    test_prof = prof if prof is not None else smooth_test_profile()
    r_hi = 5.0 if prof is None else min(5.0, 0.9 * prof.r_max)
    pts = random_points(n_points, seed, r_min=0.5, r_max=r_hi)
    results = pauli_checks()
    results += m_identity_checks(pts)
    results += contraction_checks(pts, test_prof)
    results += field_strength_checks(pts, test_prof)
    results += theta_checks(pts, test_prof)
    results += boundary_checks(pts[: min(len(pts), 200)])
    return results
