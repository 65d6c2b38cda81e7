"""Monte Carlo sweeps over the (delta, rho) plane.

``delta = m / n`` is the ratio of measurements to unknowns and ``rho = k / m``
the number of nonzeros per measurement.  At every grid point, fresh matrices,
sparse signals and noise are drawn, the l1 problem is solved along its
homotopy path with the residual target set to the noise norm, and the mean
relative error ``||x_hat - x0|| / ||x0||`` is recorded.
"""
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import ensembles, problem_gen
from .ensembles import SpectrumSpec
from .solvers import Status, lasso_path

EPSILON_LEVELS = (0.02, 0.05, 0.10, 0.20, 0.50)


def equispaced(count, start, stop=1.0):
    return [float(v) for v in np.linspace(start, stop, count)]


@dataclass(frozen=True)
class PhaseGridSpec:
    delta_values: tuple = tuple(equispaced(40, 0.025))
    rho_values: tuple = tuple(equispaced(40, 0.025))
    n: int = 800
    trials: int = 100
    epsilon: float = 0.1
    ensemble: SpectrumSpec = field(default_factory=SpectrumSpec)
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "delta_values", tuple(float(v) for v in self.delta_values))
        object.__setattr__(self, "rho_values", tuple(float(v) for v in self.rho_values))
        for name in ("delta_values", "rho_values"):
            vals = getattr(self, name)
            if not vals or any(not 0 < v <= 1 for v in vals):
                raise ValueError(f"{name} must be nonempty and lie in (0, 1]")
        if self.n < 2 or self.trials < 1:
            raise ValueError("need n >= 2 and trials >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")

    def config(self):
        d = asdict(self)
        d["ensemble"] = {"kind": int(self.ensemble.kind), "kappa": self.ensemble.kappa, "s1": self.ensemble.s1}
        return d


PRESETS = {
    "mini": dict(delta_values=equispaced(10, 0.1), rho_values=equispaced(10, 0.1), n=200, trials=20),
    # the sparse corner where the e = 2 eps contours live
    "mini-sparse": dict(delta_values=equispaced(10, 0.1), rho_values=equispaced(10, 0.05, 0.5), n=200, trials=20),
    "paper": dict(n=800, trials=100),
}


def preset(name, **overrides):
    kw = dict(PRESETS[name])
    kw.update(overrides)
    return PhaseGridSpec(**kw)


@dataclass
class CellStat:
    delta: float
    rho: float
    m: int
    k: int
    mean_error: float
    std_error: float
    trial_count: int
    failure_count: int
    errors: tuple = ()
    # worst |residual - ||eta||| / ||y|| over converged trials
    max_discrepancy_gap: float = 0.0


@dataclass
class LevelCurve:
    level: float
    polyline: np.ndarray  # (p, 2) array of (delta, rho)


def _grid_key(values, v):
    """Index of ``v`` in ``values``; off-grid values map to their float bits."""
    for i, w in enumerate(values):
        if w == v:
            return i
    return (1 << 40) + struct.unpack("<q", struct.pack("<d", float(v)))[0]


def trial_seed(spec, di, ri, t):
    """Seed tuple for one trial; independent of epsilon and of the ensemble, so
    cells run at different noise levels or spectra see matched draws."""
    return (spec.base_seed, di, ri, t)


def run_trial(spec, m, k, seed):
    """One draw: returns ``(relative_error, status, discrepancy_gap)`` where the
    gap is ``| ||K x - y|| - ||eta|| | / ||y||``."""
    parent = ensembles.gen_parent(spec.n, spec.ensemble, (seed, 0))
    K = ensembles.subsample_rows(parent, m, (seed, 1))
    x0 = problem_gen.gen_signal(spec.n, k, (seed, 2))
    inst = problem_gen.synthesize(K, x0, spec.epsilon, (seed, 3))
    _, sol = lasso_path(K.entries, inst.data, target_residual=inst.noise_norm, record=False)
    gap = abs(sol.residual_norm - inst.noise_norm) / np.linalg.norm(inst.data)
    return problem_gen.relative_error(sol.x, x0), sol.status, float(gap)


def run_cell(spec, delta, rho):
    """Aggregate ``spec.trials`` trials at one grid point."""
    m, k = problem_gen.sweep_sizes(spec.n, delta, rho)
    di = _grid_key(spec.delta_values, delta)
    ri = _grid_key(spec.rho_values, rho)
    errors = []
    failures = 0
    worst = 0.0
    with threadpool_limits(limits=1):
        for t in range(spec.trials):
            try:
                e, status, gap = run_trial(spec, m, k, trial_seed(spec, di, ri, t))
            except (ValueError, np.linalg.LinAlgError):
                # instance could not be built or solved; not part of the mean
                continue
            if status != Status.CONVERGED:
                failures += 1
            else:
                worst = max(worst, gap)
            errors.append(e)
    arr = np.array(errors)
    mean = float(arr.sum() / arr.size) if arr.size else math.nan
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return CellStat(float(delta), float(rho), m, k, mean, std, len(errors), failures, tuple(errors), worst)


def _cell_task(args):
    spec, delta, rho = args
    return run_cell(spec, delta, rho)


def run_sweep(spec, threads=1):
    """All cells of the grid, as a ``len(delta) x len(rho)`` nested list.

    Results do not depend on ``threads``: every trial has its own seed and
    every cell sums its trials in trial order.
    """
    tasks = [(spec, d, r) for d in spec.delta_values for r in spec.rho_values]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(_cell_task, tasks))
    else:
        cells = [_cell_task(t) for t in tasks]
    nr = len(spec.rho_values)
    return [cells[i * nr:(i + 1) * nr] for i in range(len(spec.delta_values))]


def mean_error_grid(grid):
    return np.array([[c.mean_error for c in row] for row in grid])


SWEEP_COLUMNS = ["delta", "rho", "m", "k", "trials", "failures", "mean_error", "std_error"]


def sweep_rows(grid):
    return [
        (c.delta, c.rho, c.m, c.k, c.trial_count, c.failure_count, c.mean_error, c.std_error)
        for row in grid
        for c in row
    ]


def extract_level_curve(grid, level):
    """Level set ``mean_error == level`` as (delta, rho) polylines.

    Marching squares with linear interpolation along cell edges; the grid
    index space is mapped back to (delta, rho) by piecewise-linear
    interpolation of the axis values.
    """
    from skimage.measure import find_contours

    values = mean_error_grid(grid)
    deltas = np.array([row[0].delta for row in grid])
    rhos = np.array([c.rho for c in grid[0]])
    if values.size == 0 or not np.isfinite(values).all():
        return []
    if not values.min() < level < values.max() and not (values == level).any():
        return []
    if values.shape[0] < 2 or values.shape[1] < 2:
        return []
    curves = []
    for contour in find_contours(values, level):
        d = np.interp(contour[:, 0], np.arange(len(deltas)), deltas)
        r = np.interp(contour[:, 1], np.arange(len(rhos)), rhos)
        curves.append(LevelCurve(float(level), np.column_stack([d, r])))
    return curves


def bilinear(grid, delta, rho):
    """Bilinear interpolation of the mean-error grid at (delta, rho)."""
    values = mean_error_grid(grid)
    deltas = np.array([row[0].delta for row in grid])
    rhos = np.array([c.rho for c in grid[0]])
    fi = np.interp(delta, deltas, np.arange(len(deltas)))
    fj = np.interp(rho, rhos, np.arange(len(rhos)))
    i0 = min(int(fi), len(deltas) - 2)
    j0 = min(int(fj), len(rhos) - 2)
    a, b = fi - i0, fj - j0
    v = values
    return float(
        (1 - a) * (1 - b) * v[i0, j0] + a * (1 - b) * v[i0 + 1, j0]
        + (1 - a) * b * v[i0, j0 + 1] + a * b * v[i0 + 1, j0 + 1]
    )


def level_crossing_rho(grid, level):
    """For each delta row, the smallest rho where the error first reaches
    ``level`` (linear interpolation between rho samples).

    ``nan`` when the error stays below ``level`` over the whole row, ``0`` when
    it is already above at the first sample.
    """
    values = mean_error_grid(grid)
    rhos = np.array([c.rho for c in grid[0]])
    out = []
    for row in values:
        above = np.flatnonzero(row >= level)
        if above.size == 0:
            out.append(math.nan)
        elif above[0] == 0:
            out.append(0.0)
        else:
            j = above[0]
            f = (level - row[j - 1]) / (row[j] - row[j - 1])
            out.append(float(rhos[j - 1] + f * (rhos[j] - rhos[j - 1])))
    return np.array(out)


def contour_rows(curves):
    return [(cid, p[0], p[1]) for cid, c in enumerate(curves) for p in c.polyline]


# -- SVG heatmap ----------------------------------------------------------------

_ANCHORS = np.array([
    [0.267, 0.005, 0.329],
    [0.230, 0.322, 0.546],
    [0.128, 0.567, 0.551],
    [0.369, 0.789, 0.383],
    [0.993, 0.906, 0.144],
])


def _color(t):
    t = min(max(t, 0.0), 1.0) * (len(_ANCHORS) - 1)
    i = min(int(t), len(_ANCHORS) - 2)
    c = _ANCHORS[i] + (t - i) * (_ANCHORS[i + 1] - _ANCHORS[i])
    return "#%02x%02x%02x" % tuple(int(round(255 * v)) for v in c)


def heatmap_svg(grid, curves=(), vmin=0.0, vmax=None, title=""):
    """Standalone SVG: delta on the horizontal axis, rho vertical (upwards)."""
    values = mean_error_grid(grid)
    deltas = np.array([row[0].delta for row in grid])
    rhos = np.array([c.rho for c in grid[0]])
    if vmax is None:
        finite = values[np.isfinite(values)]
        vmax = float(finite.max()) if finite.size else 1.0
    vmax = max(vmax, vmin + 1e-12)
    W = H = 400
    left, top, bar = 60, 30, 30
    nd, nr = values.shape
    cw, ch = W / nd, H / nr
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + W + bar + 70}" height="{top + H + 50}">',
        f'<text x="{left + W / 2}" y="18" text-anchor="middle" font-size="13">{title}</text>',
    ]
    for i in range(nd):
        for j in range(nr):
            v = values[i, j]
            col = "#ffffff" if not np.isfinite(v) else _color((v - vmin) / (vmax - vmin))
            x = left + i * cw
            y = top + H - (j + 1) * ch
            out.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{cw:.3f}" height="{ch:.3f}" fill="{col}"/>')

    def px(d, r):
        fx = np.interp(d, deltas, np.arange(nd))
        fy = np.interp(r, rhos, np.arange(nr))
        return left + (fx + 0.5) * cw, top + H - (fy + 0.5) * ch

    for c in curves:
        pts = " ".join("%.3f,%.3f" % px(d, r) for d, r in c.polyline)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#000000" stroke-width="1.5"/>')
    out.append(f'<rect x="{left}" y="{top}" width="{W}" height="{H}" fill="none" stroke="#000000"/>')
    for i in range(nd):
        if nd <= 10 or i % max(1, nd // 8) == 0 or i == nd - 1:
            out.append(f'<text x="{left + (i + 0.5) * cw:.2f}" y="{top + H + 14}" text-anchor="middle" font-size="9">{deltas[i]:.3g}</text>')
    for j in range(nr):
        if nr <= 10 or j % max(1, nr // 8) == 0 or j == nr - 1:
            out.append(f'<text x="{left - 4}" y="{top + H - (j + 0.5) * ch + 3:.2f}" text-anchor="end" font-size="9">{rhos[j]:.3g}</text>')
    out.append(f'<text x="{left + W / 2}" y="{top + H + 34}" text-anchor="middle" font-size="12">delta = m/n</text>')
    out.append(f'<text x="16" y="{top + H / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {top + H / 2})">rho = k/m</text>')
    steps = 50
    bx = left + W + 10
    for s in range(steps):
        y = top + H - (s + 1) * H / steps
        out.append(f'<rect x="{bx}" y="{y:.3f}" width="{bar - 10}" height="{H / steps + 0.5:.3f}" fill="{_color((s + 0.5) / steps)}"/>')
    out.append(f'<text x="{bx + bar}" y="{top + H}" font-size="9">{vmin:.3g}</text>')
    out.append(f'<text x="{bx + bar}" y="{top + 8}" font-size="9">{vmax:.3g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
