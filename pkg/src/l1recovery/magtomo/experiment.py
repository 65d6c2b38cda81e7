"""Sparse magnetic tomography toy problem: l1 (FISTA) against l2 (CG).

A stream function with a few nonzero CDF 4-2 coefficients generates a
divergence-free current on the patch; the normal field is recorded at random
sensors above it, 10% Gaussian noise is added, and the model is recovered
with both penalties, each tuned so the residual equals the noise norm.
"""
import functools
import time
from dataclasses import dataclass, field

import numpy as np

from .. import problem_gen
from ..seeding import make_rng, sample_without_replacement
from ..solvers import fista_discrepancy, ridge_discrepancy, spectral_norm_sq
from .forward import build_design_matrix
from .geometry import PatchGrid, random_sensors
from .wavelets import cdf42_inverse


@dataclass
class TomoSetup:
    grid: PatchGrid
    sensors: object
    matrix: np.ndarray
    lipschitz: float
    sensor_seed: int


@functools.lru_cache(maxsize=4)
def tomo_setup(resolution=64, sensor_count=1000, sensor_seed=0):
    """Geometry, sensors and the design matrix (cached per argument tuple)."""
    grid = PatchGrid(resolution)
    sensors = random_sensors(grid, sensor_count, sensor_seed)
    A = build_design_matrix(grid, sensors)
    A.setflags(write=False)
    return TomoSetup(grid, sensors, A, 1.01 * spectral_norm_sq(A), sensor_seed)


@dataclass
class TomoReport:
    seed: int
    nonzeros: int
    epsilon: float
    l1_error: float
    l2_error: float
    l1_field_error: float
    l2_field_error: float
    l1_lambda: float
    l2_lambda: float
    l1_status: str
    l2_status: str
    fista_iterations: int
    cg_iterations: int
    seconds: float
    fields: dict = field(default_factory=dict, repr=False)

    def row(self):
        return (self.seed, self.l1_error, self.l2_error, self.l1_field_error, self.l2_field_error,
                self.l1_lambda, self.l2_lambda, self.l1_status, self.l2_status,
                self.fista_iterations, self.cg_iterations)


REPORT_COLUMNS = ["seed", "l1_error", "l2_error", "l1_field_error", "l2_field_error",
                  "l1_lambda", "l2_lambda", "l1_status", "l2_status", "fista_iterations", "cg_iterations"]


def sparse_model(n_coeffs, nonzeros, seed):
    """Wavelet coefficient vector with ``nonzeros`` uniform entries at uniform positions."""
    rng = make_rng(seed, 0x3D)
    x = np.zeros(n_coeffs)
    idx = sample_without_replacement(rng, n_coeffs, nonzeros)
    x[idx] = problem_gen.draw_values(rng, nonzeros)
    return x


def run_tomo_experiment(seed, setup=None, nonzeros=60, epsilon=0.1,
                        fista_tol=1e-6, fista_max_iter=20000, discrepancy_rtol=1e-3):
    """One realization. ``*_error`` compares wavelet coefficients of F,
    ``*_field_error`` compares F itself on the grid."""
    t0 = time.perf_counter()
    setup = setup or tomo_setup()
    A = setup.matrix
    N = setup.grid.resolution
    c0 = sparse_model(A.shape[1], nonzeros, seed)
    clean = A @ c0
    eta = make_rng(seed, 0xE7).standard_normal(A.shape[0])
    eta *= epsilon * np.linalg.norm(clean) / np.linalg.norm(eta)
    y = clean + eta
    target = float(np.linalg.norm(eta))

    l1 = fista_discrepancy(A, y, target, rtol=discrepancy_rtol, lipschitz=setup.lipschitz,
                           tol=fista_tol, max_iter=fista_max_iter, restart=True)
    l2 = ridge_discrepancy(A, y, target, r_min=0.0)

    F0 = cdf42_inverse(c0.reshape(N, N))
    F1 = cdf42_inverse(l1.x.reshape(N, N))
    F2 = cdf42_inverse(l2.x.reshape(N, N))
    rel = problem_gen.relative_error
    return TomoReport(
        seed=seed, nonzeros=nonzeros, epsilon=epsilon,
        l1_error=rel(l1.x, c0), l2_error=rel(l2.x, c0),
        l1_field_error=rel(F1, F0), l2_field_error=rel(F2, F0),
        l1_lambda=l1.lam, l2_lambda=l2.lambda2,
        l1_status=l1.status.value, l2_status=l2.status.value,
        fista_iterations=l1.work, cg_iterations=l2.cg_iterations,
        seconds=time.perf_counter() - t0,
        fields={"input": F0, "l1": F1, "l2": F2},
    )
