"""Cubed-sphere patch, stream-function currents and sensor placement.

A patch of the sphere is parametrized by two angles ``xi, eta`` in
``[-pi/3, pi/3]``::

    (x, y, z) = r / s * (tan xi, tan eta, 1),   s = sqrt(1 + tan^2 xi + tan^2 eta)

Coordinate lines are great circles, equally spaced in angle.  Tangent
vectors ``e_xi = dp/dxi``, ``e_eta = dp/deta`` and the area factor
``sqrt(g) = |e_xi x e_eta| = r^2 (1 + X^2)(1 + Y^2) / s^3`` (``X = tan xi``,
``Y = tan eta``) are evaluated analytically.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ..seeding import make_rng

R_INNER = 0.089
R_OUTER = 0.090
SENSOR_RADIUS = 0.1
HALF_WIDTH = math.pi / 3
MU0_OVER_4PI = 1e-7


def cubed_sphere_map(xi, eta, r):
    """Point(s) of the sphere of radius ``r`` at angles ``(xi, eta)``."""
    X = np.tan(xi)
    Y = np.tan(eta)
    s = np.sqrt(1.0 + X * X + Y * Y)
    return np.stack(np.broadcast_arrays(r * X / s, r * Y / s, r / s), axis=-1)


def tangent_vectors(xi, eta, r):
    """``(e_xi, e_eta, sqrt_g)`` at the given angles."""
    X = np.tan(xi)
    Y = np.tan(eta)
    s2 = 1.0 + X * X + Y * Y
    s = np.sqrt(s2)
    s3 = s2 * s
    cx = 1.0 + X * X
    cy = 1.0 + Y * Y
    # d/dX of (X, Y, 1)/s is ((1 + Y^2), -X Y, -X) / s^3, times dX/dxi = 1 + X^2
    e_xi = r * cx[..., None] * np.stack(np.broadcast_arrays(cy, -X * Y, -X), axis=-1) / s3[..., None]
    e_eta = r * cy[..., None] * np.stack(np.broadcast_arrays(-X * Y, cx, -Y), axis=-1) / s3[..., None]
    sqrt_g = r * r * cx * cy / s3
    return e_xi, e_eta, sqrt_g


@dataclass(frozen=True, eq=False)
class PatchGrid:
    resolution: int = 64
    half_width: float = HALF_WIDTH
    r_inner: float = R_INNER
    r_outer: float = R_OUTER

    @property
    def r_mid(self):
        return 0.5 * (self.r_inner + self.r_outer)

    @property
    def thickness(self):
        return self.r_outer - self.r_inner

    @property
    def spacing(self):
        return 2.0 * self.half_width / self.resolution

    @property
    def axis(self):
        """Cell-center angles along either coordinate."""
        h = self.spacing
        return -self.half_width + (np.arange(self.resolution) + 0.5) * h

    def centers(self):
        """``(xi, eta)`` arrays of shape (N, N); first index runs over xi."""
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def points(self, r=None):
        xi, eta = self.centers()
        return cubed_sphere_map(xi, eta, self.r_mid if r is None else r)

    def frame(self):
        xi, eta = self.centers()
        return tangent_vectors(xi, eta, self.r_mid)

    def cell_areas(self, r=None):
        """Midpoint-rule areas of the cells on the sphere of radius ``r``."""
        xi, eta = self.centers()
        _, _, sg = tangent_vectors(xi, eta, self.r_mid if r is None else r)
        return sg * self.spacing**2

    def solid_angle_fraction(self, refine=4):
        """Fraction of the full sphere covered by the patch (midpoint quadrature)."""
        fine = PatchGrid(self.resolution * refine, self.half_width, self.r_inner, self.r_outer)
        return float(fine.cell_areas(1.0).sum() / (4.0 * math.pi))


@dataclass(frozen=True, eq=False)
class SensorSet:
    positions: np.ndarray
    normals: np.ndarray
    angles: np.ndarray = field(default=None)

    @property
    def count(self):
        return len(self.positions)


def random_sensors(grid, count=1000, seed=0, radius=SENSOR_RADIUS):
    """Sensors uniform in ``(xi, eta)`` over the patch, on the sphere of ``radius``."""
    rng = make_rng(seed, 0x5E)
    ang = rng.uniform(-grid.half_width, grid.half_width, size=(count, 2))
    pos = cubed_sphere_map(ang[:, 0], ang[:, 1], radius)
    normals = pos / np.linalg.norm(pos, axis=1, keepdims=True)
    return SensorSet(pos, normals, ang)


# -- discrete surface calculus ----------------------------------------------

def difference_matrix(n, h):
    """1-D derivative: centered inside, one-sided at both ends."""
    d = np.zeros((n, n))
    if n == 1:
        return d
    i = np.arange(1, n - 1)
    d[i, i + 1] = 0.5 / h
    d[i, i - 1] = -0.5 / h
    d[0, 0], d[0, 1] = -1.0 / h, 1.0 / h
    d[-1, -2], d[-1, -1] = -1.0 / h, 1.0 / h
    return d


@dataclass(frozen=True, eq=False)
class CurrentField:
    """Tangential current density on the mid-surface.

    ``flux_xi = sqrt(g) J^xi`` and ``flux_eta = sqrt(g) J^eta`` are the
    contravariant components weighted by the area factor; ``vectors`` holds
    the Cartesian 3-vectors (shape (N, N, 3)).
    """
    flux_xi: np.ndarray
    flux_eta: np.ndarray
    vectors: np.ndarray


def stream_to_current(F, grid):
    """``J = curl(F r_hat) = (dF/deta e_xi - dF/dxi e_eta) / sqrt(g)``."""
    F = np.asarray(F, dtype=float)
    N = grid.resolution
    if F.shape != (N, N):
        raise ValueError(f"stream function must be {N}x{N}, got {F.shape}")
    D = difference_matrix(N, grid.spacing)
    dF_dxi = D @ F
    dF_deta = F @ D.T
    e_xi, e_eta, sg = grid.frame()
    vec = (dF_deta[..., None] * e_xi - dF_dxi[..., None] * e_eta) / sg[..., None]
    return CurrentField(dF_deta, -dF_dxi, vec)


def surface_divergence(J, grid):
    """Discrete ``div J = (d_xi(sqrt(g) J^xi) + d_eta(sqrt(g) J^eta)) / sqrt(g)``.

    Uses the same 1-D difference operator as ``stream_to_current``; since the
    two axis operators commute, the divergence of any discrete curl vanishes
    up to rounding.
    """
    D = difference_matrix(grid.resolution, grid.spacing)
    _, _, sg = grid.frame()
    return (D @ J.flux_xi + J.flux_eta @ D.T) / sg


def radial_component(J, grid):
    rhat = grid.points() / grid.r_mid
    return np.einsum("ijk,ijk->ij", J.vectors, rhat)
