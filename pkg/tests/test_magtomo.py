import math

import numpy as np
import pytest

from l1recovery.errors import SingularKernelError, UnsupportedSizeError
from l1recovery.magtomo import forward as FW
from l1recovery.magtomo import geometry as G
from l1recovery.magtomo import wavelets as W
from oracles import dipole_normal_field


# -- geometry --

def test_map_examples():
    r = 0.09
    np.testing.assert_allclose(G.cubed_sphere_map(0.0, 0.0, r), [0, 0, r])
    np.testing.assert_allclose(G.cubed_sphere_map(math.pi / 4, 0.0, r), [r / math.sqrt(2), 0, r / math.sqrt(2)],
                               rtol=1e-15)
    ang = np.random.default_rng(0).uniform(-1.4, 1.4, size=(500, 2))
    p = G.cubed_sphere_map(ang[:, 0], ang[:, 1], r)
    np.testing.assert_allclose(np.linalg.norm(p, axis=1), r, rtol=1e-12)


def test_tangent_vectors_match_finite_differences():
    xi, eta, r, h = 0.3, -0.7, 0.09, 1e-6
    e_xi, e_eta, sg = G.tangent_vectors(np.array(xi), np.array(eta), r)
    fd_xi = (G.cubed_sphere_map(xi + h, eta, r) - G.cubed_sphere_map(xi - h, eta, r)) / (2 * h)
    fd_eta = (G.cubed_sphere_map(xi, eta + h, r) - G.cubed_sphere_map(xi, eta - h, r)) / (2 * h)
    np.testing.assert_allclose(e_xi, fd_xi, rtol=1e-8)
    np.testing.assert_allclose(e_eta, fd_eta, rtol=1e-8)
    assert sg == pytest.approx(np.linalg.norm(np.cross(e_xi, e_eta)), rel=1e-12)


def test_patch_grid():
    grid = G.PatchGrid(64)
    xi, eta = grid.centers()
    assert xi.shape == (64, 64)
    assert np.all(np.abs(grid.axis) < grid.half_width)
    np.testing.assert_allclose(np.linalg.norm(grid.points(), axis=-1), grid.r_mid, rtol=1e-12)
    # the six faces of a cube tile the sphere; each spans pi/4 per side, this one pi/3
    assert 1 / 6 < grid.solid_angle_fraction() < 0.3
    full = G.PatchGrid(32, half_width=math.pi / 4)
    assert full.solid_angle_fraction() == pytest.approx(1 / 6, rel=1e-3)


def test_sensors():
    grid = G.PatchGrid(16)
    s = G.random_sensors(grid, 300, seed=2)
    assert s.count == 300
    np.testing.assert_allclose(np.linalg.norm(s.positions, axis=1), 0.1, rtol=1e-12)
    np.testing.assert_allclose(s.normals * 0.1, s.positions, rtol=1e-12)
    assert np.all(np.abs(s.angles) <= grid.half_width)
    np.testing.assert_array_equal(G.random_sensors(grid, 300, seed=2).positions, s.positions)


def test_constant_stream_has_no_current():
    grid = G.PatchGrid(16)
    J = G.stream_to_current(np.full((16, 16), 3.7), grid)
    assert np.abs(J.vectors).max() <= 1e-12


def test_current_is_tangential_and_divergence_free():
    grid = G.PatchGrid(32)
    F = np.random.default_rng(1).standard_normal((32, 32))
    J = G.stream_to_current(F, grid)
    jn = np.linalg.norm(J.vectors)
    assert np.linalg.norm(G.radial_component(J, grid)) <= 1e-12 * jn
    div = G.surface_divergence(J, grid)
    assert np.linalg.norm(div) * grid.r_mid <= 1e-8 * jn


def test_point_stream_circulates_locally():
    grid = G.PatchGrid(16)
    F = np.zeros((16, 16))
    F[7, 9] = 1.0
    J = G.stream_to_current(F, grid)
    nz = np.argwhere(np.linalg.norm(J.vectors, axis=-1) > 0)
    assert np.abs(nz - [7, 9]).max() <= 1


def test_stream_shape_checked():
    with pytest.raises(ValueError):
        G.stream_to_current(np.zeros((4, 5)), G.PatchGrid(4))


# -- Biot-Savart --

def test_dipole_oracle():
    # a small Gaussian stream bump is a current loop; far away it is a dipole.
    # The loop sits on a curved cap, so its effective center lies slightly
    # below the apex; keep it narrow so that offset stays well under 1%.
    grid = G.PatchGrid(64)
    xi, eta = grid.centers()
    F = np.exp(-(xi**2 + eta**2) / (2 * (0.75 * grid.spacing) ** 2))
    area = grid.cell_areas()
    rhat = grid.points() / grid.r_mid
    moment = grid.thickness * np.einsum("ij,ij,ijk->k", F, area, rhat)
    center = np.array([0, 0, grid.r_mid])
    radii = np.geomspace(0.1, 1.0, 12)
    dirs = np.array([[0, 0, 1.0], [0.3, 0.1, 1.0], [-0.2, 0.4, 1.0]])
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pos = center + (radii[:, None, None] * dirs[None]).reshape(-1, 3)
    normals = np.repeat(dirs[None], len(radii), axis=0).reshape(-1, 3)
    sensors = G.SensorSet(pos, normals)
    got = FW.forward_stream(F, grid, sensors)
    want = dipole_normal_field(moment, center, pos, normals)
    rel = np.abs(got - want) / np.abs(want)
    assert rel.max() <= 0.01
    assert len(radii) >= 10


def test_forward_is_linear():
    grid = G.PatchGrid(8)
    sensors = G.random_sensors(grid, 25, seed=1)
    rng = np.random.default_rng(3)
    F1, F2 = rng.standard_normal((2, 8, 8))
    lhs = FW.forward_stream(2 * F1 - 3 * F2, grid, sensors)
    rhs = 2 * FW.forward_stream(F1, grid, sensors) - 3 * FW.forward_stream(F2, grid, sensors)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(lhs).max())


def test_sensor_inside_shell_rejected():
    grid = G.PatchGrid(8)
    p = grid.points()[3, 4][None] * 1.01
    sensors = G.SensorSet(p, p / np.linalg.norm(p))
    with pytest.raises(SingularKernelError):
        FW.forward_stream(np.zeros((8, 8)), grid, sensors)


def test_stream_matrix_matches_direct_quadrature():
    grid = G.PatchGrid(16)
    sensors = G.random_sensors(grid, 40, seed=5)
    F = np.random.default_rng(6).standard_normal((16, 16))
    M = FW.stream_matrix(grid, sensors)
    direct = FW.forward_stream(F, grid, sensors)
    np.testing.assert_allclose(M @ F.ravel(), direct, rtol=1e-10, atol=1e-10 * np.abs(direct).max())


def test_design_matrix_composition():
    grid = G.PatchGrid(16)
    sensors = G.random_sensors(grid, 30, seed=7)
    A = FW.build_design_matrix(grid, sensors)
    assert A.shape == (30, 256)
    F = np.random.default_rng(8).standard_normal((16, 16))
    direct = FW.forward_stream(F, grid, sensors)
    assert np.linalg.norm(A @ FW.coefficients_of(F) - direct) <= 1e-10 * np.linalg.norm(direct)
    # column j is the response to the j-th synthesis function
    e = np.zeros(256)
    e[37] = 1.0
    col = FW.forward_stream(W.cdf42_inverse(e.reshape(16, 16)), grid, sensors)
    np.testing.assert_allclose(A[:, 37], col, rtol=1e-10, atol=1e-10 * np.abs(col).max())


# -- wavelets --

@pytest.mark.parametrize("n", [2, 4, 16, 64])
def test_wavelet_roundtrip(n):
    x = np.random.default_rng(n).standard_normal((n, n))
    np.testing.assert_allclose(W.cdf42_inverse(W.cdf42_forward(x)), x, atol=1e-10)


def test_wavelet_constant_has_no_details():
    c = W.cdf42_forward(np.full((32, 32), 2.5))
    assert c[0, 0] == pytest.approx(2.5)
    c[0, 0] = 0
    assert np.abs(c).max() <= 1e-12


def test_wavelet_sparse_model_roundtrip():
    rng = np.random.default_rng(4)
    c = np.zeros(64 * 64)
    c[rng.choice(c.size, 60, replace=False)] = rng.uniform(-1, 1, 60)
    c = c.reshape(64, 64)
    np.testing.assert_allclose(W.cdf42_forward(W.cdf42_inverse(c)), c, atol=1e-12)


def test_wavelet_1d_linear_interior_details_vanish():
    x = np.arange(16, dtype=float)
    c = W.forward_1d(x)
    details = c[8:]
    # the predict stencil reaches two samples right, so the last two feel the boundary
    assert np.abs(details[1:-2]).max() <= 1e-12


def test_wavelet_size_checked():
    with pytest.raises(UnsupportedSizeError):
        W.cdf42_forward(np.zeros((12, 12)))


def test_synthesis_matrix_columns():
    S = W.synthesis_matrix(8)
    rng = np.random.default_rng(0)
    c = rng.standard_normal((8, 8))
    np.testing.assert_allclose(S @ c.ravel(), W.cdf42_inverse(c).ravel(), atol=1e-12)


def test_coefficient_levels():
    lev = W.coefficient_levels(8)
    assert lev[0, 0] == 0
    assert lev[1, 0] == lev[0, 1] == lev[1, 1] == 1
    assert lev[7, 7] == 3
    assert np.count_nonzero(lev == 3) == 48


def test_adjoint_consistency():
    grid = G.PatchGrid(16)
    A = FW.build_design_matrix(grid, G.random_sensors(grid, 30, seed=9))
    rng = np.random.default_rng(10)
    x, y = rng.standard_normal(256), rng.standard_normal(30)
    lhs, rhs = (A @ x) @ y, x @ (A.T @ y)
    assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(A @ x) * np.linalg.norm(y)


def test_renders():
    from l1recovery.magtomo import render

    grid = G.PatchGrid(16)
    xi, eta = grid.centers()
    F = np.exp(-(xi**2 + eta**2) / 0.1)
    svg = render.field_svg(F, G.stream_to_current(F, grid), title="bump")
    assert svg.startswith("<svg") and svg.count("<rect") == 256 and "<path" in svg
    ppm = render.field_ppm(F, cell=2)
    assert ppm.startswith(b"P6\n32 32\n255\n") and len(ppm) == len(b"P6\n32 32\n255\n") + 32 * 32 * 3
    assert render.field_ppm(np.zeros((4, 4)))  # flat field does not divide by zero
