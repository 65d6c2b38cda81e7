"""Solvers for the l1-penalized least-squares functional

    F(x) = ||K x - y||^2 + 2 lam ||x||_1

and for its l2-penalized (Tikhonov) counterpart.

``lasso_path`` follows the exact piecewise-linear homotopy path from
``lam0 = ||K^T y||_inf`` downwards and stops where the residual norm reaches a
prescribed target (discrepancy principle).  ``fista`` solves at a fixed
``lam``; ``fista_discrepancy`` wraps it in a monotone search over ``lam``.
``ridge_discrepancy`` does the same for the Tikhonov problem, using conjugate
gradients on the normal equations.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, cg


class Status(str, Enum):
    CONVERGED = "Converged"
    TARGET_UNREACHABLE = "TargetUnreachable"
    MAX_ITERATIONS = "MaxIterations"
    DEGENERATE_PATH = "DegeneratePath"


@dataclass
class PathBreakpoint:
    lam: float
    x: np.ndarray
    residual_norm: float
    active_set: list
    signs: list

    def __post_init__(self):
        self.active_set = [int(j) for j in self.active_set]
        self.signs = [float(s) for s in self.signs]


@dataclass
class LassoPath:
    breakpoints: list = field(default_factory=list)

    def __len__(self):
        return len(self.breakpoints)

    @property
    def lambdas(self):
        return np.array([b.lam for b in self.breakpoints])

    @property
    def residual_norms(self):
        return np.array([b.residual_norm for b in self.breakpoints])


@dataclass
class Solution:
    x: np.ndarray
    lam: float
    residual_norm: float
    status: Status
    work: int
    info: dict = field(default_factory=dict)

    def summary(self):
        out = {
            "lambda": float(self.lam),
            "residual_norm": float(self.residual_norm),
            "status": self.status.value,
            "work": int(self.work),
            "nonzeros": int(np.count_nonzero(self.x)),
        }
        out.update(self.info)
        return out


@dataclass
class RidgeSolution:
    x: np.ndarray
    lambda2: float
    residual_norm: float
    cg_iterations: int
    status: Status = Status.CONVERGED
    outer_iterations: int = 0


def soft_threshold(v, tau):
    """Elementwise ``sign(v) * max(|v| - tau, 0)``."""
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def l1_objective(K, y, x, lam):
    r = K @ x - y
    return float(r @ r + 2.0 * lam * np.abs(x).sum())


def kkt_violation(K, y, x, lam):
    """Largest relative breach of the optimality conditions at ``lam``.

    Returns ``(off, on)``: ``off`` is ``max(|c_i| / lam - 1, 0)`` over all i,
    ``on`` is ``max |c_i - lam sign(x_i)| / lam`` over the support, with
    ``c = K^T (y - K x)``.
    """
    c = K.T @ (y - K @ x)
    if lam <= 0:
        return float(np.abs(c).max()), 0.0
    off = max(float(np.abs(c).max()) / lam - 1.0, 0.0)
    supp = np.flatnonzero(x)
    on = float(np.abs(c[supp] - lam * np.sign(x[supp])).max()) / lam if supp.size else 0.0
    return off, on


# -- homotopy -----------------------------------------------------------------

_TIE_RTOL = 1e-10
_COND_LIMIT = 1e12


class _ActiveSolve:
    """Solves with the Gram matrix ``G = KA^T KA`` of the active columns.

    Works from a QR factorization of ``KA`` rather than from ``G`` itself, so
    the conditioning seen is that of ``KA``.  Falls back to a truncated
    pseudo-inverse when ``cond(G) > 1e12``.
    """

    def __init__(self, KA):
        self.degenerate = False
        self.q, self.r = scipy.linalg.qr(KA, mode="economic", check_finite=False)
        diag = np.abs(np.diag(self.r))
        cheap = diag.max() / diag.min() if diag.size and diag.min() > 0 else np.inf
        # |diag R| ratio underestimates cond(KA); confirm with an SVD when close
        if KA.shape[1] > KA.shape[0] or cheap**2 > _COND_LIMIT * 1e-4:
            u, sv, vt = np.linalg.svd(KA, full_matrices=False)
            if sv.size < KA.shape[1] or sv[-1] ** 2 <= sv[0] ** 2 / _COND_LIMIT:
                keep = sv > 1e-6 * sv[0]
                self.pinv_g = (vt[keep].T / sv[keep] ** 2) @ vt[keep]
                self.pinv_k = (vt[keep].T / sv[keep]) @ u[:, keep].T
                self.degenerate = True

    def gram_solve(self, b):
        """``G^{-1} b``."""
        if self.degenerate:
            return self.pinv_g @ b
        w = scipy.linalg.solve_triangular(self.r, b, trans="T", check_finite=False)
        return scipy.linalg.solve_triangular(self.r, w, check_finite=False)

    def lstsq(self, y):
        """``G^{-1} KA^T y`` without forming ``KA^T y``."""
        if self.degenerate:
            return self.pinv_k @ y
        return scipy.linalg.solve_triangular(self.r, self.q.T @ y, check_finite=False)


def _crossing(r, u, target):
    """Smallest ``g >= 0`` with ``||r - g u|| = target`` (or None)."""
    uu = u @ u
    if uu == 0:
        return None
    ru = r @ u
    c = r @ r - target * target
    disc = ru * ru - uu * c
    if disc < 0:
        disc = 0.0
    # numerically stable smaller root of uu g^2 - 2 ru g + c = 0
    if ru > 0:
        return c / (ru + math.sqrt(disc))
    return (ru - math.sqrt(disc)) / uu if c <= 0 else None


def lasso_path(K, y, target_residual=None, min_lambda=None, max_steps=None, record=True):
    """Homotopy (LARS with the lasso modification) for ``||Kx - y||^2 + 2 lam ||x||_1``.

    Exactly one of ``target_residual`` (stop where ``||K x - y||`` equals it)
    or ``min_lambda`` (stop at that penalty) should be given; with neither the
    path runs to ``lam = 0``.

    Returns ``(LassoPath, Solution)``.  The solution status is
    ``TargetUnreachable`` when the target lies below the smallest residual the
    path attains, ``DegeneratePath`` when an active Gram matrix had condition
    number above 1e12 (a pseudo-inverse was used, the minimizer is then one of
    several), ``MaxIterations`` when ``max_steps`` events were processed.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = K.shape
    ynorm = float(np.linalg.norm(y))
    if max_steps is None:
        max_steps = 20 * min(m, n) + 100
    path = LassoPath()
    x = np.zeros(n)
    c = K.T @ y
    lam = float(np.abs(c).max()) if n else 0.0
    lam0 = lam

    if target_residual is not None:
        if target_residual < 0 or target_residual > ynorm * (1 + 1e-12):
            raise ValueError(f"target residual {target_residual} outside [0, ||y||={ynorm}]")
        stop_res = min(float(target_residual), ynorm)
    else:
        stop_res = None
    floor = 0.0 if min_lambda is None else max(float(min_lambda), 0.0)
    tol_res = 1e-6 * ynorm

    if lam == 0:
        raise ValueError("K^T y vanishes; the path is trivial")

    active = list(np.flatnonzero(np.abs(c) >= lam * (1 - _TIE_RTOL)))
    signs = list(np.sign(c[active]))
    if record:
        path.breakpoints.append(PathBreakpoint(lam, x.copy(), ynorm, list(active), list(signs)))

    def done(status, lam_, x_, steps, degenerate):
        res = float(np.linalg.norm(K @ x_ - y))
        if degenerate and status == Status.CONVERGED:
            status = Status.DEGENERATE_PATH
        info = {"lambda0": lam0, "breakpoints": steps, "degenerate": bool(degenerate)}
        return path, Solution(x_, lam_, res, status, steps, info)

    if (stop_res is not None and stop_res >= ynorm) or lam <= floor:
        return done(Status.CONVERGED, max(lam, floor) if stop_res is None else lam, x, 0, False)

    degenerate = False
    skip = []
    steps = 0
    while True:
        if steps >= max_steps:
            return done(Status.MAX_ITERATIONS, lam, x, steps, degenerate)
        idx = np.array(active, dtype=int)
        s = np.array(signs, dtype=float)
        KA = K[:, idx]
        solve = _ActiveSolve(KA)
        degenerate |= solve.degenerate
        d = solve.gram_solve(s)
        xa = solve.lstsq(y) - lam * d
        x = np.zeros(n)
        x[idx] = xa
        r = y - KA @ xa
        u = KA @ d
        c = K.T @ r
        a = K.T @ u

        # event search: largest admissible decrease g of lam
        gmax = lam - floor
        tiny = 1e-14 * lam0
        with np.errstate(divide="ignore", invalid="ignore"):
            gp = (lam - c) / (1.0 - a)
            gm = (lam + c) / (1.0 + a)
            gl = -xa / d
        inactive = np.ones(n, dtype=bool)
        inactive[idx] = False
        gp = np.where(inactive & (gp > tiny) & np.isfinite(gp), gp, np.inf)
        gm = np.where(inactive & (gm > tiny) & np.isfinite(gm), gm, np.inf)
        # a variable that just left sits at c_j = lam * s_j; block only its
        # immediate re-entry with the same sign
        for j, sj in skip:
            if sj > 0:
                gp[j] = np.inf
            else:
                gm[j] = np.inf
        gl = np.where((gl > tiny) & np.isfinite(gl), gl, np.inf)
        g_in = min(gp.min(initial=np.inf), gm.min(initial=np.inf))
        g_out = gl.min(initial=np.inf)
        g = min(g_in, g_out)
        hit_floor = g >= gmax * (1 - _TIE_RTOL)
        if hit_floor:
            g = gmax

        if stop_res is not None:
            end_res = float(np.linalg.norm(r - g * u))
            if end_res <= stop_res:
                gc = _crossing(r, u, stop_res)
                gc = g if gc is None else min(max(gc, 0.0), g)
                x[idx] = xa + gc * d
                return done(Status.CONVERGED, lam - gc, x, steps, degenerate)

        steps += 1
        lam_new = lam - g
        x[idx] = xa + g * d
        if hit_floor:
            lam = lam_new if min_lambda is not None else 0.0
            res = float(np.linalg.norm(y - K @ x))
            if record:
                path.breakpoints.append(PathBreakpoint(lam, x.copy(), res, list(active), list(signs)))
            if stop_res is None:
                return done(Status.CONVERGED, lam, x, steps, degenerate)
            if abs(res - stop_res) <= tol_res:
                return done(Status.CONVERGED, lam, x, steps, degenerate)
            return done(Status.TARGET_UNREACHABLE, lam, x, steps, degenerate)

        thresh = g * (1 + _TIE_RTOL)
        leaving = set(idx[gl <= thresh].tolist()) if g_out <= thresh else set()
        entering_p = np.flatnonzero(gp <= thresh) if g_in <= thresh else []
        entering_m = np.flatnonzero(gm <= thresh) if g_in <= thresh else []
        keep = [(j, sj) for j, sj in zip(active, signs) if j not in leaving]
        for j in leaving:
            x[j] = 0.0
        new = [(int(j), 1.0) for j in entering_p] + [(int(j), -1.0) for j in entering_m if j not in set(entering_p)]
        active = [j for j, _ in keep] + [j for j, _ in new]
        signs = [sj for _, sj in keep] + [sj for _, sj in new]
        skip = [(j, sj) for j, sj in zip(idx.tolist(), s) if j in leaving]
        lam = lam_new
        if record:
            res = float(np.linalg.norm(y - K @ x))
            path.breakpoints.append(PathBreakpoint(lam, x.copy(), res, list(active), list(signs)))
        if not active:
            # everything left the model; restart the search from x = 0
            c = K.T @ y
            active = list(np.flatnonzero(np.abs(c) >= lam * (1 - _TIE_RTOL)))
            signs = list(np.sign(c[active]))


# -- FISTA ----------------------------------------------------------------------

def spectral_norm_sq(K, rtol=1e-6, max_iter=1000, seed=0):
    """``||K||_2^2`` by power iteration on ``K^T K``."""
    K = np.asarray(K)
    v = np.random.Generator(np.random.PCG64(seed)).standard_normal(K.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = K.T @ (K @ v)
        new = float(np.linalg.norm(w))
        if new == 0:
            return 0.0
        v = w / new
        if abs(new - est) <= rtol * new:
            return new
        est = new
    return est


def fista(K, y, lam, max_iter=10000, tol=1e-10, x0=None, lipschitz=None, restart=False):
    """Fast iterative soft-thresholding at fixed ``lam``.

    Minimizes ``||Kx - y||^2 + 2 lam ||x||_1`` with step ``1/L``,
    ``L >= ||K||^2``.  Stops when the relative change of the iterate drops
    below ``tol``.  ``restart=True`` resets the momentum whenever it points
    uphill (gradient-based adaptive restart).
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if lipschitz is None:
        lipschitz = 1.01 * spectral_norm_sq(K)
    L = float(lipschitz)
    Kty = K.T @ y
    thr = lam / L
    x = np.zeros(K.shape[1]) if x0 is None else np.array(x0, dtype=float)
    z = x.copy()
    t = 1.0
    status = Status.MAX_ITERATIONS
    it = 0
    for it in range(1, max_iter + 1):
        grad = K.T @ (K @ z) - Kty
        x_new = soft_threshold(z - grad / L, thr)
        step = x_new - x
        if restart and step @ (z - x_new) > 0:
            t = 1.0
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * step
        t = t_new
        x = x_new
        nx = np.linalg.norm(x)
        if np.linalg.norm(step) <= tol * max(nx, 1e-300):
            status = Status.CONVERGED
            break
        if nx == 0 and not step.any():
            status = Status.CONVERGED
            break
    res = float(np.linalg.norm(K @ x - y))
    return Solution(x, float(lam), res, status, it, {"lipschitz": L, "tol": tol, "max_iter": max_iter})


def fista_discrepancy(K, y, target_residual, rtol=1e-3, max_outer=60, lipschitz=None, **fista_kw):
    """FISTA with ``lam`` tuned so that ``||K x - y||`` matches a target.

    The residual of the minimizer is nondecreasing in ``lam``; the search runs
    bisection on ``log lam`` until the target is bracketed tightly, then
    secant steps, warm-starting every inner solve from the previous one.
    Stops when the residual is within ``rtol * ||y||`` of the target.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    ynorm = float(np.linalg.norm(y))
    if lipschitz is None:
        lipschitz = 1.01 * spectral_norm_sq(K)
    lam_max = float(np.abs(K.T @ y).max())
    if target_residual >= ynorm:
        return Solution(np.zeros(K.shape[1]), lam_max, ynorm, Status.CONVERGED, 0, {"outer": 0})

    total = [0]
    cache = {}

    def evaluate(loglam, warm):
        sol = fista(K, y, math.exp(loglam), x0=warm, lipschitz=lipschitz, **fista_kw)
        total[0] += sol.work
        cache[loglam] = sol
        return sol.residual_norm - target_residual, sol

    hi = math.log(lam_max)
    g_hi = ynorm - target_residual
    lo = hi - math.log(10.0)
    warm = None
    g_lo, sol = evaluate(lo, warm)
    warm = sol.x
    while g_lo > 0:
        hi, g_hi = lo, g_lo
        lo -= math.log(10.0)
        if lo < hi - 40 * math.log(10.0):
            sol.status = Status.TARGET_UNREACHABLE
            sol.info.update(outer=len(cache), inner_total=total[0])
            return sol
        g_lo, sol = evaluate(lo, warm)
        warm = sol.x
    best = sol
    outer = 0
    # Illinois-modified regula falsi on log lam, starting with bisection
    side = 0
    for outer in range(max_outer):
        if abs(best.residual_norm - target_residual) <= rtol * ynorm:
            break
        if hi - lo > math.log(4.0):
            mid = 0.5 * (lo + hi)
        else:
            mid = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
        g_mid, sol = evaluate(mid, best.x)
        if abs(g_mid) < abs(best.residual_norm - target_residual):
            best = sol
        if g_mid > 0:
            hi, g_hi = mid, g_mid
            if side == 1:
                g_lo *= 0.5
            side = 1
        else:
            lo, g_lo = mid, g_mid
            if side == -1:
                g_hi *= 0.5
            side = -1
    converged = abs(best.residual_norm - target_residual) <= rtol * ynorm
    inner_ok = best.status == Status.CONVERGED
    status = Status.CONVERGED if converged else Status.MAX_ITERATIONS
    best.info.update(outer=len(cache), inner_total=total[0], inner_converged=inner_ok)
    return Solution(best.x, best.lam, best.residual_norm, status, total[0], best.info)


# -- Tikhonov -----------------------------------------------------------------

def ridge_solve(K, y, lambda2, x0=None, rtol=1e-10, maxiter=None):
    """``argmin ||Kx - y||^2 + lambda2 ||x||^2`` by CG on the normal equations."""
    K = np.asarray(K, dtype=float)
    n = K.shape[1]
    op = LinearOperator((n, n), matvec=lambda v: K.T @ (K @ v) + lambda2 * v, dtype=float)
    b = K.T @ y
    count = [0]

    def cb(_):
        count[0] += 1

    x, info = cg(op, b, x0=x0, rtol=rtol, atol=0.0, maxiter=maxiter or 10 * n, callback=cb)
    return x, count[0], info


def _ridge_dual(G, y, lambda2, z0=None, rtol=1e-10):
    # (K K^T + lambda2 I) z = y, then x = K^T z; same minimizer, m x m system
    m = G.shape[0]
    op = LinearOperator((m, m), matvec=lambda v: G @ v + lambda2 * v, dtype=float)
    count = [0]

    def cb(_):
        count[0] += 1

    z, info = cg(op, y, x0=z0, rtol=rtol, atol=0.0, maxiter=10 * m, callback=cb)
    return z, count[0], info


def ridge_discrepancy(K, y, target_residual, rtol=1e-6, max_outer=200, r_min=None):
    """Tikhonov solution whose residual norm equals ``target_residual``.

    ``lambda2`` is located by bisection on ``log lambda2`` followed by
    secant steps; each evaluation is a warm-started CG solve.  Wide
    matrices (fewer rows than columns) run CG on the row-space system
    ``(K K^T + lambda2 I) z = y`` and return ``x = K^T z``.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    ynorm = float(np.linalg.norm(y))
    if r_min is None:
        xls = np.linalg.lstsq(K, y, rcond=None)[0]
        r_min = float(np.linalg.norm(K @ xls - y))
    if target_residual <= r_min:
        return RidgeSolution(np.zeros(K.shape[1]), np.inf, ynorm, 0, Status.TARGET_UNREACHABLE)
    if target_residual >= ynorm:
        return RidgeSolution(np.zeros(K.shape[1]), np.inf, ynorm, 0, Status.CONVERGED)
    norm2 = spectral_norm_sq(K)
    cg_total = [0]
    warm = [None]

    wide = K.shape[0] < K.shape[1]
    G = K @ K.T if wide else None

    def g(loglam):
        if wide:
            z, it, _ = _ridge_dual(G, y, math.exp(loglam), z0=warm[0])
            warm[0] = z
            x = K.T @ z
        else:
            x, it, _ = ridge_solve(K, y, math.exp(loglam), x0=warm[0])
            warm[0] = x
        cg_total[0] += it
        return float(np.linalg.norm(K @ x - y)) - target_residual, x

    # walk down from ||K||^2 one decade at a time so every CG solve is
    # warm-started from a nearby, better-conditioned system
    hi = math.log(norm2)
    g_hi, x_hi = g(hi)
    while g_hi < 0:
        hi += math.log(10.0)
        g_hi, x_hi = g(hi)
    floor = math.log(norm2 * np.finfo(float).eps ** 2)
    lo, g_lo, x_lo = hi, g_hi, x_hi
    while g_lo > 0:
        if lo < floor:
            return RidgeSolution(x_lo, math.exp(lo), g_lo + target_residual, cg_total[0],
                                 Status.TARGET_UNREACHABLE)
        hi, g_hi, x_hi = lo, g_lo, x_lo
        lo -= math.log(10.0)
        g_lo, x_lo = g(lo)
    best = (lo, g_lo, x_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi, x_hi)
    side = 0
    outer = 0
    for outer in range(1, max_outer + 1):
        if abs(best[1]) <= rtol * ynorm:
            break
        if hi - lo > math.log(2.0):
            mid = 0.5 * (lo + hi)
        else:
            mid = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
        g_mid, x_mid = g(mid)
        if abs(g_mid) < abs(best[1]):
            best = (mid, g_mid, x_mid)
        if g_mid > 0:
            hi, g_hi = mid, g_mid
            if side == 1:
                g_lo *= 0.5
            side = 1
        else:
            lo, g_lo = mid, g_mid
            if side == -1:
                g_hi *= 0.5
            side = -1
    loglam, gval, x = best
    status = Status.CONVERGED if abs(gval) <= rtol * ynorm else Status.MAX_ITERATIONS
    return RidgeSolution(x, math.exp(loglam), gval + target_residual, cg_total[0], status, outer)
