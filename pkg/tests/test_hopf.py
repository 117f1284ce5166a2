import math

import numpy as np
import pytest

from hopfsoliton.errors import CurvesIntersect, NotOnSphere, PoleOnCurve, ResolutionTooLow
from hopfsoliton.hopf import (
    DeformedMapSpec,
    S3Grid,
    chart_fields,
    choose_pole,
    deformed_fields,
    deformed_invariant,
    deformed_invariant_reduced,
    deformed_map,
    gauss_linking,
    gauss_linking_r3,
    hopf_invariant_cs,
    hopf_invariant_forms,
    hopf_map,
    hopf_map_jacobian,
    omega1,
    omega2_pullback,
    omega2_unsimplified,
    preimage_circle,
    stereographic_projection,
    tangent_basis,
)


def random_s3(rng, n):
    x = rng.normal(size=(n, 4))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def hopf_oracle(x):
    z1, z2 = complex(x[0], x[1]), complex(x[2], x[3])
    w = z1.conjugate() * z2
    return np.array([2 * w.real, 2 * w.imag, abs(z1) ** 2 - abs(z2) ** 2])


def test_hopf_map_values_and_norm(rng):
    np.testing.assert_allclose(hopf_map([1.0, 0, 0, 0]), [0, 0, 1])
    np.testing.assert_allclose(hopf_map([0, 0, 1.0, 0]), [0, 0, -1])
    pts = random_s3(rng, 200)
    y = hopf_map(pts)
    np.testing.assert_allclose(np.linalg.norm(y, axis=1), 1.0, atol=1e-14)
    for x, yy in zip(pts[:20], y[:20]):
        np.testing.assert_allclose(yy, hopf_oracle(x), atol=1e-15)


def test_hopf_map_rejects_points_off_sphere():
    with pytest.raises(NotOnSphere):
        hopf_map([1.0, 0.1, 0, 0])


def test_hopf_map_jacobian_against_finite_differences(rng):
    x = random_s3(rng, 1)[0]
    h = 1e-6
    fd = np.column_stack([(hopf_oracle(x + h * e) - hopf_oracle(x - h * e)) / (2 * h) for e in np.eye(4)])
    np.testing.assert_allclose(hopf_map_jacobian(x), fd, atol=1e-8)


def test_pulled_back_area_form_on_tangent_vectors(rng):
    # omega2(u, v) = y . (dy u x dy v) for tangent vectors of S^3
    for x in random_s3(rng, 20):
        basis = tangent_basis(x)
        J = hopf_map_jacobian(x)
        y = hopf_oracle(x)
        for i in range(3):
            for j in range(3):
                u, v = basis[:, i], basis[:, j]
                expected = y @ np.cross(J @ u, J @ v)
                assert omega2_pullback(x).bilinear(u, v) == pytest.approx(expected, abs=1e-12)
                assert omega2_unsimplified(x).bilinear(u, v) == pytest.approx(expected, abs=1e-12)


def test_omega1_is_a_primitive_of_omega2(rng):
    # omega1 = 2 (x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3); its exterior derivative by central differences
    x = random_s3(rng, 1)[0]
    h = 1e-6

    def lin(p):
        return 2.0 * np.array([-p[1], p[0], -p[3], p[2]])

    np.testing.assert_allclose(np.asarray(omega1(x), dtype=float), lin(x), atol=1e-15)
    d = np.array([(lin(x + h * e) - lin(x - h * e)) / (2 * h) for e in np.eye(4)])
    np.testing.assert_allclose(d - d.T, omega2_pullback(x).matrix, atol=1e-8)


def test_grid_weights_sum_to_sphere_volume():
    for n in (8, 17, 64):
        grid = S3Grid.cube(n)
        assert abs(grid.total_weight() - 2 * math.pi**2) < 1e-10


def test_grid_resolution_check():
    with pytest.raises(ResolutionTooLow):
        hopf_invariant_forms(S3Grid.cube(4))


def test_embedding_lies_on_sphere_and_jacobian_matches_fd():
    grid = S3Grid.cube(8)
    eta, xi1, xi2 = 0.4, 1.3, 2.2
    x = grid.embed(np.array(eta), np.array(xi1), np.array(xi2))
    assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-15)
    jac = grid.jacobian(np.array(eta), np.array(xi1), np.array(xi2))
    h = 1e-6
    cols = []
    for d in ((0, 1, 0), (1, 0, 0), (0, 0, 1)):  # columns ordered (xi1, eta, xi2)
        plus = grid.embed(np.array(eta + h * d[0]), np.array(xi1 + h * d[1]), np.array(xi2 + h * d[2]))
        minus = grid.embed(np.array(eta - h * d[0]), np.array(xi1 - h * d[1]), np.array(xi2 - h * d[2]))
        cols.append((plus - minus) / (2 * h))
    np.testing.assert_allclose(jac, np.column_stack(cols), atol=1e-9)
    # the chart frame is positively oriented with the outward normal first
    assert np.linalg.det(np.column_stack([x, jac])) > 0


@pytest.mark.parametrize("n", [16, 32])
def test_invariant_routes_agree(n):
    grid = S3Grid.cube(n)
    forms = hopf_invariant_forms(grid)
    cs = hopf_invariant_cs(grid)
    assert forms == pytest.approx(1.0, abs=1e-9)
    assert cs == pytest.approx(forms, abs=1e-10)


def test_orientation_reversal_and_constant_map():
    swapped = S3Grid.cube(16, swap=True)
    assert hopf_invariant_forms(swapped) == pytest.approx(-1.0, abs=1e-9)
    assert hopf_invariant_cs(swapped) == pytest.approx(-1.0, abs=1e-9)
    assert hopf_invariant_forms(S3Grid.cube(16), kind="constant") == 0.0
    assert hopf_invariant_cs(S3Grid.cube(16), kind="constant") == 0.0


def test_workers_do_not_change_result():
    grid = S3Grid.cube(24)
    assert hopf_invariant_forms(grid, workers=1) == hopf_invariant_forms(grid, workers=4)
    assert hopf_invariant_cs(grid, workers=1) == hopf_invariant_cs(grid, workers=3)


def test_cs_invariant_under_gauge_shift():
    grid = S3Grid.cube(32)

    def grad_chi(x):
        # chi = x1 x3 + sin(x2) + x4^2
        return np.stack([x[..., 2], np.cos(x[..., 1]), x[..., 0], 2 * x[..., 3]], axis=-1)

    assert hopf_invariant_cs(grid, gauge_gradient=grad_chi) == pytest.approx(hopf_invariant_cs(grid), abs=1e-9)


def test_chart_field_routes_agree():
    grid = S3Grid.cube(8)
    eta, xi1, xi2 = grid.mesh(slice(2, 4))
    _, f_area, f_cplx = chart_fields(grid, eta, xi1, xi2)
    np.testing.assert_allclose(f_area, f_cplx, atol=1e-13)


def test_preimage_circle_maps_to_base_point(rng):
    y = rng.normal(size=3)
    y /= np.linalg.norm(y)
    curve = preimage_circle(y, 64)
    np.testing.assert_allclose(hopf_map(curve.points), np.tile(y, (64, 1)), atol=1e-14)
    assert curve.closed_points().shape == (65, 4)
    np.testing.assert_allclose(curve.closed_points()[-1], curve.points[0], atol=1e-15)
    with pytest.raises(NotOnSphere):
        preimage_circle([0, 0, 2.0])


def test_stereographic_projection_sends_antipode_to_origin():
    out = stereographic_projection(np.array([[0.0, 0, 0, 1.0]]))
    np.testing.assert_allclose(out, 0.0, atol=1e-15)
    with pytest.raises(PoleOnCurve):
        stereographic_projection(np.array([[0.0, 0, 0, -1.0]]))


def test_gauss_linking_of_planar_hopf_link():
    # unit circle in the xy-plane and a unit circle in the xz-plane through its centre offset
    t = 2 * np.pi * np.arange(400) / 400
    c1 = np.column_stack([np.cos(t), np.sin(t), 0 * t])
    c2 = np.column_stack([1 + np.cos(t), 0 * t, np.sin(t)])
    lk = gauss_linking_r3(c1, c2)
    assert abs(abs(lk) - 1.0) < 1e-3
    assert gauss_linking_r3(c2, c1) == pytest.approx(lk, abs=1e-12)
    assert gauss_linking_r3(c1, c2[::-1]) == pytest.approx(-lk, abs=1e-3)
    far = c2 + np.array([5.0, 0, 0])
    assert abs(gauss_linking_r3(c1, far)) < 1e-3
    with pytest.raises(CurvesIntersect):
        gauss_linking_r3(c1, c1)


def test_fibres_link_once():
    c1 = preimage_circle([0, 0, 1.0])
    c2 = preimage_circle([0, 0, -1.0])
    assert gauss_linking(c1, c2) == pytest.approx(1.0, abs=1e-3)
    c3 = preimage_circle([1.0, 0, 0], 1024)
    c4 = preimage_circle([0, 1.0, 0], 1024)
    assert gauss_linking(c3, c4) == pytest.approx(1.0, abs=1e-3)


def test_pole_selection_avoids_curves():
    c = preimage_circle([0, 0, -1.0])  # passes through (0, 0, 0, -1)
    pole = choose_pole([c])
    assert np.min(np.linalg.norm(c.points - pole, axis=1)) > 0.25
    with pytest.raises(PoleOnCurve):
        gauss_linking(c, preimage_circle([0, 0, 1.0]), pole=[0, 0, 0, -1.0])


def test_deformed_map_lands_on_sphere(rng):
    x1, x2, x3 = rng.normal(size=(3, 50))
    y = deformed_map(x1, x2, rng.uniform(size=50))
    np.testing.assert_allclose(np.linalg.norm(y, axis=-1), 1.0, atol=1e-14)
    np.testing.assert_allclose(deformed_map(0.0, 0.0, 0.3), [0, 0, -1], atol=1e-15)


def test_deformed_fields_against_finite_differences():
    spec = DeformedMapSpec()
    p = np.array([0.7, -0.4, 0.35])
    h = 1e-6

    def y_at(q):
        return deformed_map(q[0], q[1], q[2], spec)

    dy = np.column_stack([(y_at(p + h * e) - y_at(p - h * e)) / (2 * h) for e in np.eye(3)])
    area = np.array([[y_at(p) @ np.cross(dy[:, i], dy[:, j]) for j in range(3)] for i in range(3)])
    A, F = deformed_fields(*p, spec)
    np.testing.assert_allclose(F, area, atol=1e-8)

    def A_at(q):
        return deformed_fields(q[0], q[1], q[2], spec)[0]

    dA = np.array([(A_at(p + h * e) - A_at(p - h * e)) / (2 * h) for e in np.eye(3)])
    np.testing.assert_allclose(dA - dA.T, F, atol=1e-7)


def test_deformed_invariant_small_grid_matches_reduction():
    spec = DeformedMapSpec(n_r=128, n_theta=64, n_x3=8)
    value = deformed_invariant(spec, workers=2)
    assert value == pytest.approx(deformed_invariant_reduced(spec), abs=1e-9)
    assert abs(abs(value) - 1.0) < 1e-4
    with pytest.raises(ResolutionTooLow):
        deformed_invariant(DeformedMapSpec(n_x3=4))
