"""The Hopf map S^3 -> S^2, its pulled-back forms and three routes to its invariant.

Quadratures on S^3 use Hopf coordinates

    z1 = cos(eta) exp(i xi1),   z2 = sin(eta) exp(i xi2),

with eta in [0, pi/2] and xi1, xi2 in [0, 2 pi). Oriented chart densities
are taken with respect to d(xi1) ^ d(eta) ^ d(xi2): that ordering agrees
with the orientation S^3 inherits as the boundary of the unit ball, while
(eta, xi1, xi2) is opposite to it.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import EPS3, OneForm4, S2Point, TwoForm4, to_real, wedge_density
from .errors import CurvesIntersect, NotOnSphere, PoleOnCurve, ResolutionTooLow

SPHERE_TOL = 1e-9
S3_VOLUME = 2.0 * math.pi**2
MIN_CELLS = 8


def _check_on_sphere(x, tol=SPHERE_TOL):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError("expected points with 4 coordinates")
    dev = np.abs(np.linalg.norm(x, axis=-1) - 1.0)
    if np.any(dev > tol):
        raise NotOnSphere(f"point deviates from the unit 3-sphere by {dev.max():.3g}")
    return x


def hopf_map_unchecked(x):
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    return np.stack(
        [2 * (x1 * x3 + x2 * x4), 2 * (x1 * x4 - x2 * x3), x1**2 + x2**2 - x3**2 - x4**2],
        axis=-1,
    )


def hopf_map(x):
    """Image on S^2 of a point (or stack of points) on S^3."""
    return hopf_map_unchecked(_check_on_sphere(x))


def hopf_map_jacobian(x):
    """d y^a / d x_mu, shape (..., 3, 4)."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    rows = [
        np.stack([x3, x4, x1, x2], axis=-1),
        np.stack([x4, -x3, -x2, x1], axis=-1),
        np.stack([x1, x2, -x3, -x4], axis=-1),
    ]
    return 2.0 * np.stack(rows, axis=-2)


def omega2_pullback(x):
    """The pulled-back area form, simplified on S^3 to 4 (dx1^dx2 + dx3^dx4)."""
    x = _check_on_sphere(x)
    four = np.full(x.shape[:-1], 4.0)
    zero = np.zeros(x.shape[:-1])
    return TwoForm4.from_components(four, zero, zero, zero, zero, four)


def omega2_unsimplified(x):
    """Pullback of the S^2 area form before using sum x_i^2 = 1 and x.dx = 0."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = np.moveaxis(x, -1, 0)
    p = x1 * x4 - x2 * x3
    q = x1 * x3 + x2 * x4
    return TwoForm4.from_components(
        4 * (x3**2 + x4**2), 4 * p, -4 * q, 4 * q, 4 * p, 4 * (x1**2 + x2**2)
    )


def omega1(x):
    """The primitive 2 (x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3)."""
    x = _check_on_sphere(x)
    return OneForm4(_omega1_components(x))


def _omega1_components(x):
    x1, x2, x3, x4 = np.moveaxis(np.asarray(x, dtype=float), -1, 0)
    return 2.0 * np.stack([-x2, x1, -x4, x3], axis=-1)


def tangent_basis(x):
    """Three orthonormal vectors spanning the tangent space of S^3 at x."""
    x = np.asarray(x, dtype=float)
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(4)]))
    return q[:, 1:4]


# ---------------------------------------------------------------------------
# S^3 quadrature grid


@dataclass(frozen=True)
class S3Grid:
    """Uniform cell grid in Hopf coordinates.

    ``swap=True`` exchanges the roles of xi1 and xi2 in the embedding, which
    reverses orientation.
    """

    n_eta: int = 64
    n_xi1: int = 64
    n_xi2: int = 64
    swap: bool = False

    @classmethod
    def cube(cls, n, swap=False):
        return cls(n, n, n, swap)

    def check_resolution(self, minimum=MIN_CELLS):
        low = min(self.n_eta, self.n_xi1, self.n_xi2)
        if low < minimum:
            raise ResolutionTooLow(f"grid needs at least {minimum} cells per dimension, got {low}")

    @property
    def d_eta(self):
        return 0.5 * math.pi / self.n_eta

    @property
    def d_xi1(self):
        return 2.0 * math.pi / self.n_xi1

    @property
    def d_xi2(self):
        return 2.0 * math.pi / self.n_xi2

    def eta_nodes(self):
        return (np.arange(self.n_eta) + 0.5) * self.d_eta

    def xi1_nodes(self):
        return (np.arange(self.n_xi1) + 0.5) * self.d_xi1

    def xi2_nodes(self):
        return (np.arange(self.n_xi2) + 0.5) * self.d_xi2

    def eta_weights(self):
        # exact integral of cos(eta) sin(eta) over each eta cell
        edges = np.arange(self.n_eta + 1) * self.d_eta
        s2 = np.sin(edges) ** 2
        return 0.5 * np.diff(s2)

    def cell_weights(self):
        """Volume of every cell, shape (n_eta, n_xi1, n_xi2)."""
        w = self.eta_weights() * self.d_xi1 * self.d_xi2
        return np.broadcast_to(w[:, None, None], (self.n_eta, self.n_xi1, self.n_xi2))

    def total_weight(self):
        return float(np.sum(self.eta_weights()) * self.n_xi1 * self.d_xi1 * self.n_xi2 * self.d_xi2)

    def complex_embedding(self, eta, xi1, xi2):
        """(z, dz/du) with u ordered (xi1, eta, xi2); shapes (..., 2) and (..., 2, 3)."""
        eta, xi1, xi2 = np.broadcast_arrays(eta, xi1, xi2)
        c, s = np.cos(eta), np.sin(eta)
        phase_a, phase_b = (xi2, xi1) if self.swap else (xi1, xi2)
        e_a, e_b = np.exp(1j * phase_a), np.exp(1j * phase_b)
        z = np.stack([c * e_a, s * e_b], axis=-1)
        zero = np.zeros_like(e_a)
        dz1_dxi_a = 1j * c * e_a
        dz2_dxi_b = 1j * s * e_b
        # columns: d/dxi1, d/deta, d/dxi2
        if self.swap:
            row1 = [zero, -s * e_a, dz1_dxi_a]
            row2 = [dz2_dxi_b, c * e_b, zero]
        else:
            row1 = [dz1_dxi_a, -s * e_a, zero]
            row2 = [zero, c * e_b, dz2_dxi_b]
        dz = np.stack([np.stack(row1, axis=-1), np.stack(row2, axis=-1)], axis=-2)
        return z, dz

    def embed(self, eta, xi1, xi2, radius=1.0):
        z, _ = self.complex_embedding(eta, xi1, xi2)
        return radius * to_real(z)

    def jacobian(self, eta, xi1, xi2, radius=1.0):
        """dx_mu/du_k, shape (..., 4, 3), u ordered (xi1, eta, xi2)."""
        _, dz = self.complex_embedding(eta, xi1, xi2)
        jac = np.empty(dz.shape[:-2] + (4, 3))
        jac[..., 0::2, :] = dz.real
        jac[..., 1::2, :] = dz.imag
        return radius * jac

    def mesh(self, eta_slice=slice(None)):
        eta = self.eta_nodes()[eta_slice]
        return np.meshgrid(eta, self.xi1_nodes(), self.xi2_nodes(), indexing="ij")


def integrate_chart(grid, density, workers=1):
    """Integrate an oriented chart density over S^3.

    ``density(eta, xi1, xi2)`` receives meshgrid blocks and returns the
    coefficient of d(xi1)^d(eta)^d(xi2). The midpoint value of
    density / (cos eta sin eta) is multiplied by the exact cell volume.
    Row sums are formed per eta slice and reduced in a fixed order, so the
    result does not depend on ``workers``.
    """
    grid.check_resolution()
    w_eta = grid.eta_weights() * grid.d_xi1 * grid.d_xi2
    eta_all = grid.eta_nodes()
    jac_vol = np.cos(eta_all) * np.sin(eta_all)

    def block(indices):
        sl = slice(indices[0], indices[-1] + 1)
        eta, xi1, xi2 = grid.mesh(sl)
        rho = density(eta, xi1, xi2)
        return [float(np.sum(rho[k])) for k in range(rho.shape[0])]

    chunks = np.array_split(np.arange(grid.n_eta), max(1, min(workers, grid.n_eta)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, chunks))
    else:
        parts = [block(c) for c in chunks]
    row_sums = np.array([s for part in parts for s in part])
    return math.fsum(row_sums / jac_vol * w_eta)


_MAPS = ("hopf", "constant")


def _check_map(kind):
    if kind not in _MAPS:
        raise ValueError(f"unknown map {kind!r}; choose from {_MAPS}")


def hopf_invariant_forms(grid, kind="hopf", workers=1):
    """(1/16 pi^2) * integral of omega1 ^ omega2, pulled back to the chart."""
    _check_map(kind)

    def density(eta, xi1, xi2):
        if kind == "constant":
            return np.zeros(eta.shape)
        x = grid.embed(eta, xi1, xi2)
        jac = grid.jacobian(eta, xi1, xi2)
        a = OneForm4(_omega1_components(x)).pullback(jac)
        f = omega2_pullback(x).pullback(jac)
        return 0.5 * wedge_density(a, f)

    return integrate_chart(grid, density, workers) / (16.0 * math.pi**2)


def chart_fields(grid, eta, xi1, xi2, kind="hopf"):
    """Chart components of the CS potential and field strength.

    Returns ``(A, F_area, F_complex)`` where ``A_k = -i (zbar dz - dzbar z)``,
    ``F_area = eps y dy dy`` and ``F_complex = -2i (dzbar_k dz_l - dzbar_l dz_k)``.
    """
    _check_map(kind)
    z, dz = grid.complex_embedding(eta, xi1, xi2)
    if kind == "constant":
        shape = np.shape(eta)
        return np.zeros(shape + (3,)), np.zeros(shape + (3, 3)), np.zeros(shape + (3, 3))
    a = 2.0 * np.imag(np.einsum("...i,...ik->...k", z.conj(), dz))
    x = to_real(z)
    y = hopf_map_unchecked(x)
    dy = np.einsum("...am,...mk->...ak", hopf_map_jacobian(x), grid.jacobian(eta, xi1, xi2))
    f_area = np.einsum("ijk,...i,...jm,...kn->...mn", EPS3, y, dy, dy)
    prod = np.einsum("...ik,...il->...kl", dz.conj(), dz)
    f_cplx = -2j * (prod - np.swapaxes(prod, -1, -2))
    return a, f_area, f_cplx.real


def hopf_invariant_cs(grid, kind="hopf", workers=1, gauge_gradient: Callable | None = None):
    """(1/32 pi^2) * integral of eps A F in Hopf coordinates.

    ``gauge_gradient(x)`` may return the ambient gradient of a smooth
    function chi; its pullback is added to A.
    """

    def density(eta, xi1, xi2):
        a, f, _ = chart_fields(grid, eta, xi1, xi2, kind)
        if gauge_gradient is not None:
            x = grid.embed(eta, xi1, xi2)
            a = a + OneForm4(gauge_gradient(x)).pullback(grid.jacobian(eta, xi1, xi2))
        return wedge_density(a, f)

    return integrate_chart(grid, density, workers) / (32.0 * math.pi**2)


# ---------------------------------------------------------------------------
# fibres and linking


@dataclass(frozen=True)
class FiberCurve:
    base: S2Point
    phi: np.ndarray
    points: np.ndarray
    spinor: tuple = field(default=(1.0 + 0j, 0j))

    def closed_points(self):
        """Samples with the phi = 2 pi point appended."""
        z1, z2 = self.spinor
        end = to_real(np.array([z1, z2]) * np.exp(2j * math.pi))
        return np.vstack([self.points, end])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["phi", "x1", "x2", "x3", "x4"])
            for p, pt in zip(self.phi, self.points):
                writer.writerow([f"{p:.17g}"] + [f"{v:.17g}" for v in pt])


def preimage_circle(y, n_samples=512):
    """Fibre over ``y``: (z1 e^{i phi}, z2 e^{i phi}) for phi in [0, 2 pi)."""
    y = np.asarray(y, dtype=float).reshape(3)
    if abs(np.linalg.norm(y) - 1.0) > SPHERE_TOL:
        raise NotOnSphere("base point must lie on the unit 2-sphere")
    if n_samples < 16:
        raise ValueError("need at least 16 samples per fibre")
    theta = math.acos(min(1.0, max(-1.0, y[2])))
    azim = math.atan2(y[1], y[0])
    z1 = complex(math.cos(theta / 2))
    z2 = math.sin(theta / 2) * complex(math.cos(azim), math.sin(azim))
    phi = 2.0 * math.pi * np.arange(n_samples) / n_samples
    phase = np.exp(1j * phi)
    pts = to_real(np.stack([z1 * phase, z2 * phase], axis=-1))
    return FiberCurve(S2Point.from_array(y), phi, pts, (z1, z2))


def _projection_basis(pole):
    q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)]))
    basis = q[:, 1:4].copy()
    # orientation preserving: (outward normal at the antipode, B) is positive
    if np.linalg.det(np.column_stack([-pole, basis])) < 0:
        basis[:, 2] = -basis[:, 2]
    return basis


def stereographic_projection(points, pole=(0.0, 0.0, 0.0, -1.0)):
    """Project points of S^3 to R^3 from ``pole``.

    Coordinates are taken in an orthonormal basis B of the plane orthogonal
    to the pole with det[-pole, B] = +1, so the projection preserves the
    orientation S^3 has as the boundary of the unit ball. For the default
    pole this is (x1, x2, -x3) / (1 + x4) up to a rotation.
    """
    pole = np.asarray(pole, dtype=float)
    pole = pole / np.linalg.norm(pole)
    pts = np.asarray(points, dtype=float)
    dot = pts @ pole
    if np.any(1.0 - dot <= 0.0):
        raise PoleOnCurve("a point coincides with the projection pole")
    flat = (pts - dot[..., None] * pole) / (1.0 - dot)[..., None]
    return flat @ _projection_basis(pole)


def gauss_linking_r3(curve1, curve2, min_distance=1e-6):
    """Gauss double integral for two closed polylines in R^3 (midpoint rule).

    Inputs are (n, 3) arrays of samples; the closing segment back to the
    first sample is added automatically.
    """
    c1 = np.asarray(curve1, dtype=float)
    c2 = np.asarray(curve2, dtype=float)
    d1 = np.roll(c1, -1, axis=0) - c1
    d2 = np.roll(c2, -1, axis=0) - c2
    m1 = c1 + 0.5 * d1
    m2 = c2 + 0.5 * d2
    sep = m1[:, None, :] - m2[None, :, :]
    dist = np.linalg.norm(sep, axis=-1)
    vertex_dist = np.linalg.norm(c1[:, None, :] - c2[None, :, :], axis=-1)
    if min(dist.min(), vertex_dist.min()) <= min_distance:
        raise CurvesIntersect(f"curves come within {min(dist.min(), vertex_dist.min()):.3g}")
    cross = np.cross(d1[:, None, :], d2[None, :, :])
    integrand = np.einsum("ijk,ijk->ij", sep, cross) / dist**3
    return float(np.sum(integrand) / (4.0 * math.pi))


DEFAULT_POLE = np.array([0.0, 0.0, 0.0, -1.0])
POLE_CLEARANCE = 1e-3


def _min_dist(points, pole):
    return float(np.min(np.linalg.norm(points - pole, axis=-1)))


def choose_pole(curves, clearance=POLE_CLEARANCE):
    """Default pole, rotated towards x1, then x2, then x3 until clear of all curves."""
    pts = np.vstack([c.points if isinstance(c, FiberCurve) else np.asarray(c) for c in curves])
    if _min_dist(pts, DEFAULT_POLE) > clearance:
        return DEFAULT_POLE.copy()
    for axis in (0, 1, 2):
        for k in range(1, 8):
            angle = k * math.pi / 16
            pole = math.cos(angle) * DEFAULT_POLE + math.sin(angle) * np.eye(4)[axis]
            if _min_dist(pts, pole) > max(clearance, 0.25):
                return pole
    raise PoleOnCurve("could not find a projection pole clear of the curves")


def gauss_linking(c1, c2, pole=None):
    """Linking number of two fibres after stereographic projection to R^3."""
    if pole is None:
        pole = choose_pole([c1, c2])
    else:
        pole = np.asarray(pole, dtype=float)
        pole = pole / np.linalg.norm(pole)
        for c in (c1, c2):
            if _min_dist(c.points, pole) <= 1e-6:
                raise PoleOnCurve("projection pole lies on a curve")
    p1 = stereographic_projection(c1.points, pole)
    p2 = stereographic_projection(c2.points, pole)
    return gauss_linking_r3(p1, p2)


# ---------------------------------------------------------------------------
# deformed (rotating-plane) map


def _default_profile(r):
    return 2.0 * np.arctan2(1.0, r)


def _default_profile_deriv(r):
    return -2.0 / (1.0 + np.asarray(r, dtype=float) ** 2)


def _default_rotation(t):
    return 2.0 * math.pi * np.asarray(t, dtype=float)


def _default_rotation_deriv(t):
    return np.full(np.shape(t), 2.0 * math.pi)


@dataclass(frozen=True)
class DeformedMapSpec:
    """Radial profile f_d, rotation schedule a(t) and quadrature settings.

    The radial quadrature is Gauss-Legendre in u = arctan(r) on
    [0, arctan(r_max)]; angle and x3 use the midpoint rule.
    """

    profile: Callable = _default_profile
    profile_deriv: Callable = _default_profile_deriv
    rotation: Callable = _default_rotation
    rotation_deriv: Callable = _default_rotation_deriv
    r_max: float = 2000.0
    n_r: int = 256
    n_theta: int = 256
    n_x3: int = 64

    def validate(self, tol=1e-3):
        if abs(float(self.profile(0.0)) - math.pi) > 1e-12:
            raise ValueError("profile must satisfy f(0) = pi")
        if abs(float(self.profile(self.r_max))) > tol:
            raise ValueError(f"f(r_max) = {float(self.profile(self.r_max)):.3g} is not close to 0")
        if abs(float(self.rotation(0.0))) > 1e-12 or abs(float(self.rotation(1.0)) - 2 * math.pi) > 1e-12:
            raise ValueError("rotation schedule must run from 0 to 2 pi")

    def check_resolution(self, minimum=MIN_CELLS):
        low = min(self.n_r, self.n_theta, self.n_x3)
        if low < minimum:
            raise ResolutionTooLow(f"need at least {minimum} nodes per dimension, got {low}")


def deformed_map(x1, x2, x3, spec=DeformedMapSpec()):
    """The rotating-plane map R^2 x [0, 1] -> S^2."""
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    r = np.hypot(x1, x2)
    f = spec.profile(r)
    a = spec.rotation(x3)
    # sin(f)/r is finite at r = 0 because f(0) = pi
    with np.errstate(invalid="ignore", divide="ignore"):
        s_over_r = np.where(r > 0, np.sin(f) / np.where(r > 0, r, 1.0), 0.0)
    ca, sa = np.cos(a), np.sin(a)
    y = np.stack([s_over_r * (x1 * ca - x2 * sa), s_over_r * (x1 * sa + x2 * ca), np.cos(f)], axis=-1)
    return y


def deformed_fields(x1, x2, x3, spec=DeformedMapSpec()):
    """Potential and field strength of the deformed map at points with r > 0.

    F is the pulled-back area form. The potential is taken in the gauge
    regular at r = 0,

        A = -(1 + cos f) (x1 dx2 - x2 dx1) / r^2 - a'(x3) cos f dx3,

    whose curl is F away from the axis.
    """
    x1, x2, x3 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3)))
    r = np.hypot(x1, x2)
    f = spec.profile(r)
    fp = spec.profile_deriv(r)
    ap = spec.rotation_deriv(x3)
    sf, cf = np.sin(f), np.cos(f)
    base = sf * fp / r
    F = np.zeros(r.shape + (3, 3))
    F[..., 0, 1] = base
    F[..., 1, 2] = x2 * base * ap
    F[..., 2, 0] = -x1 * base * ap
    F = F - np.swapaxes(F, -1, -2)
    A = np.stack([x2 * (1 + cf) / r**2, -x1 * (1 + cf) / r**2, -ap * cf], axis=-1)
    return A, F


def deformed_invariant(spec=DeformedMapSpec(), workers=1):
    """Signed (1/16 pi^2) * integral of eps A F over R^2 x [0, 1]."""
    spec.check_resolution()
    u_max = math.atan(spec.r_max)
    nodes, wts = np.polynomial.legendre.leggauss(spec.n_r)
    u = 0.5 * u_max * (nodes + 1.0)
    r = np.tan(u)
    w_r = 0.5 * u_max * wts * (1.0 + r**2) * r  # dr/du times the polar Jacobian
    d_theta = 2.0 * math.pi / spec.n_theta
    theta = (np.arange(spec.n_theta) + 0.5) * d_theta
    d_x3 = 1.0 / spec.n_x3
    x3_nodes = (np.arange(spec.n_x3) + 0.5) * d_x3
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    x1, x2 = rr * np.cos(tt), rr * np.sin(tt)

    def slab(x3):
        A, F = deformed_fields(x1, x2, np.full(x1.shape, x3), spec)
        dens = wedge_density(A, F)
        return math.fsum(np.sum(dens, axis=1) * w_r)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            slabs = list(pool.map(slab, x3_nodes))
    else:
        slabs = [slab(t) for t in x3_nodes]
    return math.fsum(slabs) * d_theta * d_x3 / (16.0 * math.pi**2)


def deformed_invariant_reduced(spec=DeformedMapSpec()):
    """Closed-form 1D reduction over the same box: (a(1)-a(0))/(2 pi) * (cos f(0) - cos f(r_max)) / 2."""
    turns = (float(spec.rotation(1.0)) - float(spec.rotation(0.0))) / (2.0 * math.pi)
    return turns * 0.5 * (math.cos(float(spec.profile(0.0))) - math.cos(float(spec.profile(spec.r_max))))
