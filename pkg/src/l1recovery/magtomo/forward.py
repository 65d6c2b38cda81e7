"""Biot-Savart forward map from shell currents to normal field at sensors.

    B(r) = mu0 / (4 pi) * integral_V J(r') x (r - r') / |r - r'|^3 dV'

The shell is thin, so the integral collapses onto the mid-surface: each cell
contributes at its center with weight ``area * thickness`` (midpoint rule).
The radial variation of J across the shell is ignored.
"""
import numpy as np

from ..errors import SingularKernelError
from .geometry import MU0_OVER_4PI, difference_matrix, stream_to_current
from .wavelets import cdf42_forward, synthesis_matrix

MIN_DISTANCE = 0.005


def _kernel(grid, sensors, min_distance=MIN_DISTANCE):
    """``(d x n) / |d|^3`` for every sensor/cell pair, with ``d = r_s - r_c``.

    Shape (S, N, N, 3).
    """
    pts = grid.points()
    d = sensors.positions[:, None, None, :] - pts[None]
    dist = np.linalg.norm(d, axis=-1)
    closest = float(dist.min()) if dist.size else np.inf
    if closest < min_distance:
        raise SingularKernelError(f"sensor within {closest:.4g} m of the current shell")
    cross = np.cross(d, sensors.normals[:, None, None, :])
    return cross / dist[..., None] ** 3


def biot_savart_normal(J, grid, sensors, min_distance=MIN_DISTANCE):
    """Normal component of B at each sensor, for the current field ``J``."""
    k = _kernel(grid, sensors, min_distance)
    w = grid.cell_areas() * grid.thickness
    # (J x d) . n = J . (d x n)
    return MU0_OVER_4PI * np.einsum("sijk,ijk,ij->s", k, J.vectors, w)


def stream_matrix(grid, sensors, min_distance=MIN_DISTANCE):
    """Dense (S, N^2) map from the stream function (row-major) to normal B."""
    N = grid.resolution
    k = _kernel(grid, sensors, min_distance)
    e_xi, e_eta, _ = grid.frame()
    # weight/sqrt(g) = h^2 * thickness: the area factor cancels
    scale = MU0_OVER_4PI * grid.spacing**2 * grid.thickness
    p_xi = np.einsum("sijk,ijk->sij", k, e_xi)
    p_eta = np.einsum("sijk,ijk->sij", k, e_eta)
    D = difference_matrix(N, grid.spacing)
    # B = p_xi . (F D^T) - p_eta . (D F), rearranged onto F
    M = p_xi @ D - np.einsum("il,sij->slj", D, p_eta)
    return scale * M.reshape(len(sensors.positions), N * N)


def build_design_matrix(grid, sensors, min_distance=MIN_DISTANCE):
    """(S, N^2) matrix acting on CDF 4-2 coefficients of the stream function.

    Column ``j`` is the normal field produced by the stream function whose
    only nonzero wavelet coefficient is number ``j`` (row-major Mallat layout).
    """
    M = stream_matrix(grid, sensors, min_distance)
    return M @ synthesis_matrix(grid.resolution)


def forward_stream(F, grid, sensors):
    """Normal B for a stream function, via the explicit current field."""
    return biot_savart_normal(stream_to_current(F, grid), grid, sensors)


def coefficients_of(F):
    return cdf42_forward(F).ravel()
