"""Condition numbers of column submatrices, the quantity restricted-isometry
arguments bound.

If every 2k-column submatrix of K satisfies
``(1 - d) ||z||^2 <= ||K z||^2 <= (1 + d) ||z||^2`` with ``d < 4 / (6 + sqrt 7)``,
its condition number is below ``sqrt((1 + d) / (1 - d))`` at that threshold,
which simplifies to ``sqrt((10 + sqrt 7) / (2 + sqrt 7))``.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import ensembles
from .errors import UnsupportedSizeError
from .seeding import make_rng, sample_without_replacement


@dataclass
class SubmatrixConditionReport:
    columns_per_sample: int
    samples: int
    mean_kappa: float
    max_kappa: float
    min_kappa: float
    seed: int
    infinite_count: int = 0

    def row(self):
        return (self.columns_per_sample, self.samples, self.mean_kappa, self.max_kappa,
                self.min_kappa, self.infinite_count)


REPORT_COLUMNS = ["columns", "samples", "mean", "max", "min", "infinite_count"]


def rip_delta_threshold():
    return 4.0 / (6.0 + math.sqrt(7.0))


def rip_bound_constant():
    """Largest 2k-column condition number compatible with the RIP threshold."""
    return math.sqrt((10.0 + math.sqrt(7.0)) / (2.0 + math.sqrt(7.0)))


def condition_number(a):
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0 or s[-1] <= s[0] * np.finfo(float).eps * max(a.shape):
        return math.inf
    return float(s[0] / s[-1])


def sample_condition_numbers(K, columns, samples, seed, batch=512):
    """Condition numbers of ``samples`` random ``columns``-column submatrices.

    Column subsets are drawn uniformly without replacement, independently per
    sample.  Singular submatrices give ``kappa = inf``; they are counted in
    ``infinite_count`` and left out of the mean.
    """
    K = np.asarray(getattr(K, "entries", K), dtype=float)
    n = K.shape[1]
    if not 1 <= columns <= n:
        raise ValueError(f"need 1 <= columns <= {n}, got {columns}")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = make_rng(seed, 0xC0)
    kappas = np.empty(samples)
    tol = np.finfo(float).eps * max(K.shape[0], columns)
    for start in range(0, samples, batch):
        stop = min(start + batch, samples)
        idx = np.stack([sample_without_replacement(rng, n, columns) for _ in range(start, stop)])
        s = np.linalg.svd(K[:, idx].transpose(1, 0, 2), compute_uv=False)
        lo, hi = s[:, -1], s[:, 0]
        if columns > K.shape[0]:
            lo = np.zeros_like(lo)
        with np.errstate(divide="ignore"):
            kappas[start:stop] = np.where(lo > hi * tol, hi / lo, np.inf)
    finite = kappas[np.isfinite(kappas)]
    inf_count = int(samples - finite.size)
    if finite.size:
        mean, mx, mn = float(finite.sum() / finite.size), float(finite.max()), float(finite.min())
    else:
        mean = mx = mn = math.inf
    return SubmatrixConditionReport(columns, samples, mean, mx, mn, seed, inf_count)


def ensemble_condition_numbers(n, m, spec, columns, samples, seed, parents=1):
    """Submatrix condition numbers for ``m x n`` draws of an ensemble.

    One parent matrix and row subset per report by default; ``parents > 1``
    splits the samples over that many independent draws and pools them.
    """
    if parents < 1 or parents > samples:
        raise ValueError("need 1 <= parents <= samples")
    share = [samples // parents + (p < samples % parents) for p in range(parents)]
    total = 0.0
    finite = 0
    mx, mn = -math.inf, math.inf
    for p, count in enumerate(share):
        K = ensembles.subsample_rows(ensembles.gen_parent(n, spec, (seed, p, 0)), m, (seed, p, 1))
        rep = sample_condition_numbers(K, columns, count, (seed, p, 2))
        k = count - rep.infinite_count
        if k:
            total += rep.mean_kappa * k
            finite += k
            mx, mn = max(mx, rep.max_kappa), min(mn, rep.min_kappa)
    mean = total / finite if finite else math.inf
    if not finite:
        mx = mn = math.inf
    return SubmatrixConditionReport(columns, samples, mean, mx, mn, seed, samples - finite)


def hadamard(order):
    """Sylvester Hadamard matrix of a power-of-two order."""
    if order < 1 or order & (order - 1):
        raise UnsupportedSizeError(f"Sylvester construction needs a power of 2, got {order}")
    h = np.ones((1, 1))
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def identity_hadamard_matrix(order):
    """``[I | H / sqrt(order)]``: two orthonormal bases side by side."""
    h = hadamard(order) / math.sqrt(order)
    return np.hstack([np.eye(order), h])
