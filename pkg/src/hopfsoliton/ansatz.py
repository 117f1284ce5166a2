"""Scalar triplet and gauge field of the Hopf-soliton ansatz.

    phi^a = f(r) m^a,   A^a_k = -i d_k m^a g(r),   Abar^a_k = i dbar_k m^a g(r),

with m^a = zbar sigma^a z / r^2 and d_k = d/dz_k, dbar_k = d/dzbar_k.
Complex-index arrays use the basis order (z1, z2) for holomorphic and
(zbar1, zbar2) for antiholomorphic slots; real-index arrays run over
(x1, x2, x3, x4). Every function accepts a single point of shape (4,) or a
stack (..., 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .algebra import COMPLEX_STRUCTURE, EPS3, EPS4, HOPF_QUADRATIC, PAULI, TO_REAL, to_complex
from .errors import BoundaryNotAsymptotic, CutoffExceedsMesh, OriginSingular
from .hopf import integrate_chart
from .profiles import ModelParams

R_MIN = 1e-8
DELTA2 = np.eye(2)


def _radius(x, r_min=R_MIN):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r < r_min):
        raise OriginSingular(f"r = {np.min(r):.3g} is below r_min = {r_min:g}")
    return x, r


# ---------------------------------------------------------------------------
# the vacuum map and its derivatives


def m_field(x):
    """m^a = zbar_i sigma^a_ij z_j / r^2, shape (..., 3)."""
    x, r = _radius(x)
    z = to_complex(x)
    return np.einsum("...i,aij,...j->...a", z.conj(), PAULI, z).real / (r**2)[..., None]


def m_derivatives(x):
    """(d_k m^a, dbar_k m^a), each of shape (..., 2, 3)."""
    x, r = _radius(x)
    z = to_complex(x)
    r2 = (r**2)[..., None, None]
    m = m_field(x)[..., None, :]
    dbar = np.einsum("akj,...j->...ka", PAULI, z) / r2 - z[..., :, None] * m / r2
    d = np.einsum("ajk,...j->...ka", PAULI, z.conj()) / r2 - z.conj()[..., :, None] * m / r2
    return d, dbar


def m_mixed_second(x):
    """d_i dbar_j m^a, shape (..., 2, 2, 3)."""
    x, r = _radius(x)
    z = to_complex(x)
    zb = z.conj()
    r2 = (r**2)[..., None, None, None]
    m = m_field(x)[..., None, None, :]
    sig_ji = np.broadcast_to(np.transpose(PAULI, (2, 1, 0)), z.shape[:-1] + (2, 2, 3))
    sz = np.einsum("ajk,...k->...ja", PAULI, z)  # (sigma^a z)_j
    zs = np.einsum("...k,aki->...ia", zb, PAULI)  # (zbar sigma^a)_i
    return (
        sig_ji / r2
        - zb[..., :, None, None] * sz[..., None, :, :] / r2**2
        - zs[..., :, None, :] * z[..., None, :, None] / r2**2
        + 2.0 * m * zb[..., :, None, None] * z[..., None, :, None] / r2**2
        - m * DELTA2[:, :, None] / r2
    )


def m_jets_real(x):
    """m, d_mu m and d_mu d_nu m in real coordinates.

    Built from m^a = x.M^a.x / r^2, independently of the complex formulas.
    Shapes (..., 3), (..., 4, 3), (..., 4, 4, 3).
    """
    x, r = _radius(x)
    r2 = r**2
    Mx = np.einsum("amn,...n->...ma", HOPF_QUADRATIC, x)
    m = np.einsum("...m,...ma->...a", x, Mx) / r2[..., None]
    dm = 2.0 * Mx / r2[..., None, None] - 2.0 * x[..., :, None] * m[..., None, :] / r2[..., None, None]
    rr = r2[..., None, None, None]
    xx = x[..., :, None, None] * x[..., None, :, None]
    ddm = (
        2.0 * np.transpose(HOPF_QUADRATIC, (1, 2, 0)) / rr
        - 4.0 * (Mx[..., :, None, :] * x[..., None, :, None] + Mx[..., None, :, :] * x[..., :, None, None]) / rr**2
        + 8.0 * m[..., None, None, :] * xx / rr**2
        - 2.0 * m[..., None, None, :] * np.eye(4)[:, :, None] / rr
    )
    return m, dm, ddm


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldSample:
    x: np.ndarray
    r: np.ndarray
    m: np.ndarray
    phi: np.ndarray
    A: np.ndarray  # real index, (..., 4, 3)
    A_hol: np.ndarray  # A^a_k, (..., 2, 3)
    A_antihol: np.ndarray  # Abar^a_k, (..., 2, 3)


def complex_to_real_vector(v_hol, v_antihol):
    """Real-index components of a covector from its (z, zbar) components."""
    v = np.concatenate([v_hol, v_antihol], axis=-2)
    return np.einsum("mp,...pa->...ma", TO_REAL, v)


def complex_to_real_two_form(f_cplx):
    """Real-index F_mu,nu from the full (4, 4) complex-basis array."""
    return np.einsum("mp,nq,...pqa->...mna", TO_REAL, TO_REAL, f_cplx)


def eval_fields(x, prof):
    x, r = _radius(x)
    m = m_field(x)
    d, dbar = m_derivatives(x)
    g = prof.g(r)[..., None, None]
    A_hol = -1j * d * g
    A_antihol = 1j * dbar * g
    A = complex_to_real_vector(A_hol, A_antihol)
    phi = prof.f(r)[..., None] * m
    return FieldSample(x, r, m, phi, A.real, A_hol, A_antihol)


def gauge_field_real_route(x, prof):
    """A^a_mu = g J_mu,nu d_nu m^a with J the complex structure (oracle route)."""
    x, r = _radius(x)
    _, dm, _ = m_jets_real(x)
    return prof.g(r)[..., None, None] * np.einsum("mn,...na->...ma", COMPLEX_STRUCTURE, dm)


def covariant_derivative(x, prof):
    """(D_k phi^a, Dbar_k phi^a), each (..., 2, 3)."""
    x, r = _radius(x)
    z = to_complex(x)
    m = m_field(x)[..., None, :]
    d, dbar = m_derivatives(x)
    f = prof.f(r)[..., None, None]
    g = prof.g(r)[..., None, None]
    fp = prof.df(r)[..., None, None]
    rr = r[..., None, None]
    D_bar = dbar * f * (1 - g) + m * z[..., :, None] / (2 * rr) * fp
    D = d * f * (1 - g) + m * z.conj()[..., :, None] / (2 * rr) * fp
    return D, D_bar


def covariant_derivative_numeric(x, prof, h=None):
    """Central-difference d_mu phi plus eps A phi at a single point; real index (4, 3)."""
    x, r = _radius(x)
    if x.ndim != 1:
        raise ValueError("numeric derivatives take a single point")
    h = 1e-5 * float(r) if h is None else h
    _radius(x, R_MIN + h)
    dphi = np.array(
        [(eval_fields(x + h * e, prof).phi - eval_fields(x - h * e, prof).phi) / (2 * h) for e in np.eye(4)]
    )
    s = eval_fields(x, prof)
    return dphi + np.einsum("abc,mb,c->ma", EPS3, s.A, s.phi)


def kinetic_contraction(x, prof):
    """4 Dbar_k phi^a D_k phi^a (real part)."""
    D, D_bar = covariant_derivative(x, prof)
    val = 4.0 * np.einsum("...ka,...ka->...", D_bar, D)
    return val.real


@dataclass(frozen=True)
class FieldStrengthSample:
    F: np.ndarray  # real index (..., 4, 4, 3)
    F_hol: np.ndarray  # F^a_{ij}
    F_mixed: np.ndarray  # F^a_{i jbar}
    F_antihol: np.ndarray  # F^a_{ibar jbar}
    C: np.ndarray  # coefficient of g' in F^a_{i jbar}


def _assemble_complex(F_hol, F_mixed, F_antihol):
    top = np.concatenate([F_hol, F_mixed], axis=-2)
    bottom = np.concatenate([-np.swapaxes(F_mixed, -2, -3), F_antihol], axis=-2)
    return np.concatenate([top, bottom], axis=-3)


def field_strength_analytic(x, prof):
    x, r = _radius(x)
    z = to_complex(x)
    zb = z.conj()
    m = m_field(x)
    d, dbar = m_derivatives(x)
    g = prof.g(r)[..., None, None, None]
    gp = prof.dg(r)[..., None, None, None]
    rr = r[..., None, None, None]
    r2 = rr**2
    P = 2j * (r2 * DELTA2[:, :, None] - zb[..., :, None, None] * z[..., None, :, None]) / r2**2
    C = 1j * (zb[..., :, None, None] * dbar[..., None, :, :] + z[..., None, :, None] * d[..., :, None, :]) / (2 * rr)
    F_mixed = P * m[..., None, None, :] * (g * g - 2 * g) + C * gp
    hol = zb[..., :, None, None] * d[..., None, :, :]
    F_hol = -1j * (hol - np.swapaxes(hol, -2, -3)) * gp / (2 * rr)
    anti = z[..., :, None, None] * dbar[..., None, :, :]
    F_antihol = 1j * (anti - np.swapaxes(anti, -2, -3)) * gp / (2 * rr)
    F = complex_to_real_two_form(_assemble_complex(F_hol, F_mixed, F_antihol))
    return FieldStrengthSample(F.real, F_hol, F_mixed, F_antihol, C)


def field_strength_numeric(x, prof, h=None):
    """F = dA - dA + eps A A from central differences of the real-index A."""
    x, r = _radius(x)
    if x.ndim != 1:
        raise ValueError("numeric derivatives take a single point")
    h = 1e-5 * float(r) if h is None else h
    _radius(x, R_MIN + h)
    dA = np.array(
        [(eval_fields(x + h * e, prof).A - eval_fields(x - h * e, prof).A) / (2 * h) for e in np.eye(4)]
    )
    A = eval_fields(x, prof).A
    F = dA - np.swapaxes(dA, 0, 1) + np.einsum("abc,mb,nc->mna", EPS3, A, A)
    return FieldStrengthSample(F, None, None, None, None)


def complex_field_strength_closed_forms(x, prof):
    """Closed forms of the six independent complex-index components.

    Keys '12', '1b2b', '11b', '12b', '21b', '22b'; each value has shape (..., 3).
    """
    x, r = _radius(x)
    z = to_complex(x)
    zb = z.conj()
    r = r[..., None]
    g = prof.g(r)
    gp = prof.dg(r)
    m = m_field(x)
    y = r**2 * m  # zbar sigma^a z
    y3 = y[..., 2:3]
    s2 = PAULI[1]
    ss = np.einsum("aij,jk->aik", PAULI, s2)  # sigma^a sigma^2
    delta = np.array([1.0, 1j, 0.0])
    e3 = np.array([0.0, 0.0, 1.0])
    z1, z2 = z[..., 0:1], z[..., 1:2]
    b = 2 * g - g * g
    return {
        "12": -np.einsum("...i,aij,...j->...a", zb, ss, zb) * gp / (2 * r**3),
        "1b2b": -np.einsum("...i,aij,...j->...a", z, ss.conj(), z) * gp / (2 * r**3),
        "11b": -2j * abs(z2) ** 2 * m * b / r**4 + 1j * (r**4 * e3 - y * y3) / (2 * r**5) * gp,
        "12b": 2j * z1.conj() * z2 * m * b / r**4 + 1j * (r**4 * delta - 2 * z1.conj() * z2 * y) / (2 * r**5) * gp,
        "21b": 2j * z2.conj() * z1 * m * b / r**4
        + 1j * (r**4 * delta.conj() - 2 * z2.conj() * z1 * y) / (2 * r**5) * gp,
        "22b": -2j * abs(z1) ** 2 * m * b / r**4 - 1j * (r**4 * e3 - y * y3) / (2 * r**5) * gp,
    }


def mixed_square(fs):
    """sum_ij F^a_{ibar j} F^a_{i jbar} = sum |F^a_{i jbar}|^2."""
    return np.einsum("...ija,...ija->...", fs.F_mixed, fs.F_mixed.conj()).real


def holomorphic_square(fs):
    """sum_ij F^a_{ibar jbar} F^a_{ij}."""
    return np.einsum("...ija,...ija->...", fs.F_antihol, fs.F_hol).real


def pointwise_lagrangian(x, prof, params=ModelParams()):
    """1/2 D_mu phi D_mu phi + 1/4 F F + V from real-index fields, with terms separated."""
    x, r = _radius(x)
    D, D_bar = covariant_derivative(x, prof)
    D_real = complex_to_real_vector(D, D_bar).real
    F = field_strength_analytic(x, prof).F
    phi = eval_fields(x, prof).phi
    kinetic = 0.5 * np.einsum("...ma,...ma->...", D_real, D_real)
    gauge = 0.25 * np.einsum("...mna,...mna->...", F, F)
    potential = params.lam * (np.einsum("...a,...a->...", phi, phi) - params.v**2) ** 2
    return kinetic, gauge, potential


# ---------------------------------------------------------------------------
# radial action


def action_density_terms(r, prof, params=ModelParams()):
    """r^3 times the kinetic, gauge and potential parts of the radial integrand."""
    r = np.asarray(r, dtype=float)
    if np.any(r < R_MIN):
        raise OriginSingular("action density requested below r_min")
    f, g, fp, gp = prof.f(r), prof.g(r), prof.df(r), prof.dg(r)
    kinetic = 4 * r * f**2 * (1 - g) ** 2 + 0.5 * r**3 * fp**2
    gauge = 8 * (2 * g - g**2) ** 2 / r + 4 * r * gp**2
    potential = params.lam * r**3 * (f**2 - 1) ** 2
    return kinetic, gauge, potential


def action_density(r, prof, params=ModelParams()):
    kinetic, gauge, potential = action_density_terms(r, prof, params)
    return kinetic + gauge + potential


def action_total(prof, params=ModelParams(), r_c=None, r_start=0.0, n_quad=None):
    """Composite Simpson quadrature of the radial action density over [r_start, r_c].

    The r -> 0 end contributes the density's limit, 0, for profiles with
    f(0) = g(0) = 0.
    """
    r_max = getattr(prof, "r_max", np.inf)
    if r_c is None:
        r_c = r_max
    if r_c > r_max * (1 + 1e-12):
        raise CutoffExceedsMesh(f"cutoff {r_c} exceeds the profile mesh end {r_max}")
    if n_quad is None:
        mesh = getattr(prof, "r", None)
        if mesh is not None:
            n_quad = 2 * max(1, int(np.count_nonzero((mesh > r_start) & (mesh <= r_c))))
        else:
            n_quad = 4000
    n_quad += n_quad % 2
    rq = np.linspace(r_start, r_c, n_quad + 1)
    dens = np.zeros_like(rq)
    inside = rq >= R_MIN
    dens[inside] = action_density(rq[inside], prof, params)
    return float(simpson(dens, x=rq))


# ---------------------------------------------------------------------------
# unbroken U(1) at the boundary


@dataclass(frozen=True)
class BoundaryU1Sample:
    zeta: np.ndarray  # z_i / r, (..., 2)
    A1: np.ndarray  # A^a_mu phi^a / |phi|
    A2: np.ndarray  # -i (zetabar d zeta - d zetabar zeta)
    A: np.ndarray  # A1 + A2
    F: np.ndarray  # curl of A, (..., 4, 4)
    F_unbroken: np.ndarray  # phihat^a F^a_mu,nu of the ansatz


_DZ = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]])  # d z_i / d x_mu


def _curl(dA):
    """dA[..., mu, nu] = d_mu A_nu  ->  d_mu A_nu - d_nu A_mu."""
    return dA - np.swapaxes(dA, -1, -2)


def _u1_parts(x, prof):
    """A1, d_mu A1_nu, A2, d_mu A2_nu and phihat (None without a profile)."""
    x, r = _radius(x)
    z = to_complex(x)
    rr = r[..., None]
    zeta = z / rr
    dzeta = np.broadcast_to(_DZ.T, x.shape + (2,)) / rr[..., None]
    dzeta = dzeta - zeta[..., None, :] * (x / rr**2)[..., :, None]  # (..., mu, i)
    A2 = 2.0 * np.imag(np.einsum("...i,...mi->...m", zeta.conj(), dzeta))
    Jx = np.einsum("mn,...n->...m", COMPLEX_STRUCTURE, x)
    r2 = (r**2)[..., None, None]
    dA2 = 2.0 * COMPLEX_STRUCTURE.T / r2 - 4.0 * x[..., :, None] * Jx[..., None, :] / r2**2
    if prof is None:
        return zeta, np.zeros_like(A2), np.zeros_like(dA2), A2, dA2, None
    fields = eval_fields(x, prof)
    sign = np.where(prof.f(r) < 0, -1.0, 1.0)[..., None]
    phihat = sign * fields.m
    A1 = np.einsum("...ma,...a->...m", fields.A, phihat)
    m, dm, ddm = m_jets_real(x)
    g = prof.g(r)[..., None, None]
    gp = prof.dg(r)[..., None, None]
    Jdm = np.einsum("nk,...ka->...na", COMPLEX_STRUCTURE, dm)
    Jddm = np.einsum("nk,...mka->...mna", COMPLEX_STRUCTURE, ddm)
    dA1 = sign[..., None] * (
        gp * (x / rr)[..., :, None] * np.einsum("...na,...a->...n", Jdm, m)[..., None, :]
        + g * (np.einsum("...mna,...a->...mn", Jddm, m) + np.einsum("...na,...ma->...mn", Jdm, dm))
    )
    return zeta, A1, dA1, A2, dA2, phihat


def boundary_u1(x, prof=None):
    """Potential and field strength of the unbroken U(1).

    With ``prof=None`` only the asymptotic piece A2 is used (A1 = 0) and
    ``F_unbroken`` is not available (None).
    """
    x, _ = _radius(x)
    zeta, A1, dA1, A2, dA2, phihat = _u1_parts(x, prof)
    F_unbroken = None
    if prof is not None:
        F_unbroken = np.einsum("...mna,...a->...mn", field_strength_analytic(x, prof).F, phihat)
    return BoundaryU1Sample(zeta, A1, A2, A1 + A2, _curl(dA1) + _curl(dA2), F_unbroken)


def area_form_field_strength(x, prof=None):
    """d A1 + eps_abc phihat^a d phihat^b d phihat^c, shape (..., 4, 4)."""
    x, r = _radius(x)
    m, dm, _ = m_jets_real(x)
    topo = np.einsum("abc,...a,...mb,...nc->...mn", EPS3, m, dm, dm)
    if prof is None:
        return topo
    _, _, dA1, _, _, _ = _u1_parts(x, prof)
    sign = np.where(prof.f(r) < 0, -1.0, 1.0)[..., None, None]
    return _curl(dA1) + sign * topo


def boundary_F_explicit(x):
    """Closed-form boundary components 4 (x3^2 + x4^2) / r^4 etc. as a (..., 4, 4) array."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    r4 = np.sum(x**2, axis=-1) ** 2
    F = np.zeros(x.shape[:-1] + (4, 4))
    F[..., 0, 1] = 4 * (x3**2 + x4**2) / r4
    F[..., 0, 2] = F[..., 1, 3] = 4 * (x1 * x4 - x2 * x3) / r4
    F[..., 2, 3] = 4 * (x1**2 + x2**2) / r4
    F[..., 0, 3] = -4 * (x1 * x3 + x2 * x4) / r4
    F[..., 1, 2] = 4 * (x1 * x3 + x2 * x4) / r4
    return F - np.swapaxes(F, -1, -2)


ASYMPTOTIC_TOL = 1e-3


def boundary_hopf_terms(prof, grid, R, workers=1):
    """CS integral of the unbroken U(1) over the radius-R sphere, split into pieces.

    Returns a dict with the full value ``total``, the pure asymptotic value
    ``pure`` (A2 alone) and ``cross`` = total - pure.
    """
    if prof is not None and abs(float(prof.g(R)) - 1.0) >= ASYMPTOTIC_TOL:
        raise BoundaryNotAsymptotic(f"|g(R) - 1| = {abs(float(prof.g(R)) - 1.0):.3g} at R = {R}")

    def density_for(profile):
        def density(eta, xi1, xi2):
            x = grid.embed(eta, xi1, xi2, radius=R)
            jac = grid.jacobian(eta, xi1, xi2, radius=R)
            s = boundary_u1(x, profile)
            a = np.einsum("...m,...mk->...k", s.A, jac)
            f = np.einsum("...mk,...mn,...nl->...kl", jac, s.F, jac)
            return np.einsum("mnl,...m,...nl->...", EPS3, a, f)

        return density

    norm = 32.0 * math.pi**2
    pure = integrate_chart(grid, density_for(None), workers) / norm
    total = pure if prof is None else integrate_chart(grid, density_for(prof), workers) / norm
    return {"total": total, "pure": pure, "cross": total - pure}


def boundary_hopf_number(prof, grid, R, workers=1):
    return boundary_hopf_terms(prof, grid, R, workers)["total"]


def theta_densities(x, prof):
    """(eps F^a F^a, eps calF calF) with eps the 4-index Levi-Civita symbol."""
    F = field_strength_analytic(x, prof).F
    fwf = np.einsum("mnlr,...mna,...lra->...", EPS4, F, F)
    calF = boundary_u1(x, prof).F
    curly = np.einsum("mnlr,...mn,...lr->...", EPS4, calF, calF)
    return fwf, curly


# ---------------------------------------------------------------------------
# identities of the vacuum map


def verify_m_identities(x):
    """Both sides of the derivative identities of m^a at a single point.

    Returns ``{name: (lhs, rhs)}``; compare with :func:`identity_residuals`.
    """
    x, r = _radius(x)
    z = to_complex(x)
    zb = z.conj()
    r2 = float(r) ** 2
    m = m_field(x)
    d, dbar = m_derivatives(x)
    dd_bar = m_mixed_second(x)
    proj = (r2 * DELTA2 - np.outer(zb, z)) / r2**2
    eps_m = lambda v: np.einsum("abc,b,...c->...a", EPS3, m, v)  # noqa: E731
    return {
        "dm_hol_complex_structure": (d, -1j * eps_m(d)),
        "dm_antihol_complex_structure": (dbar, 1j * eps_m(dbar)),
        "z_eigenvector": (z, np.einsum("a,aij,j->i", m, PAULI, z)),
        "zbar_eigenvector": (zb, np.einsum("j,a,aji->i", zb, m, PAULI)),
        "dm_hol_null": (np.einsum("ia,ja->ij", d, d), np.zeros((2, 2))),
        "dm_antihol_null": (np.einsum("ia,ja->ij", dbar, dbar), np.zeros((2, 2))),
        "dm_mixed_metric": (np.einsum("ia,ja->ij", d, dbar), 2.0 * proj),
        "dm_trace": (np.einsum("ia,ia->", d, dbar), 2.0 / r2),
        "m_cross_mixed_second_zero": (eps_m(dd_bar), np.zeros((2, 2, 3))),
        "mixed_second_along_m": (dd_bar, -2.0 * proj[:, :, None] * m),
        "m_dm_dm_hol_zero": (np.einsum("abc,a,ib,jc->ij", EPS3, m, d, d), np.zeros((2, 2))),
        "m_dm_dm_antihol_zero": (np.einsum("abc,a,ib,jc->ij", EPS3, m, dbar, dbar), np.zeros((2, 2))),
    }


def identity_residuals(x):
    return {k: float(np.max(np.abs(np.asarray(l) - np.asarray(rr)))) for k, (l, rr) in verify_m_identities(x).items()}
