"""Random measurement matrices with prescribed singular spectra.

Three laws are supported for the n x n parent matrix:

* ``TYPE1``: the i.i.d. standard normal matrix itself;
* ``TYPE2``: geometric decay, ``s_i = s1 * kappa**((1 - i) / (n - 1))``;
* ``TYPE3``: Gaussian-shaped decay, ``s_i = s1 * kappa**((1 - i**2) / (n**2 - 1))``;

with ``i = 1..n``.  For the last two, the singular vectors are those of a
fresh Gaussian matrix.  Measurement matrices are made of ``m`` distinct rows
of the parent, so their spectra change with ``m``.
"""
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import InvalidDimensionError
from .seeding import make_rng, sample_without_replacement


class SpectrumKind(IntEnum):
    TYPE1 = 1
    TYPE2 = 2
    TYPE3 = 3


@dataclass(frozen=True)
class SpectrumSpec:
    kind: SpectrumKind = SpectrumKind.TYPE1
    kappa: float = 1.0
    s1: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        if not self.s1 > 0:
            raise ValueError(f"s1 must be positive, got {self.s1}")
        if self.kind != SpectrumKind.TYPE1 and not self.kappa > 1:
            raise ValueError(f"kappa must exceed 1 for {self.kind.name}, got {self.kappa}")

    def label(self):
        if self.kind == SpectrumKind.TYPE1:
            return "type1"
        return f"type{int(self.kind)}(kappa={self.kappa:g})"


@dataclass(frozen=True, eq=False)
class ParentMatrix:
    entries: np.ndarray
    spec: SpectrumSpec
    seed: int

    @property
    def n(self):
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    entries: np.ndarray
    row_indices: np.ndarray
    parent_spec: SpectrumSpec = field(default_factory=SpectrumSpec)

    @property
    def shape(self):
        return self.entries.shape


def spectrum_law(n, spec):
    """Prescribed singular values ``s_1 >= ... >= s_n`` for TYPE2/TYPE3."""
    i = np.arange(1, n + 1, dtype=float)
    if spec.kind == SpectrumKind.TYPE2:
        expo = (1.0 - i) / (n - 1)
    elif spec.kind == SpectrumKind.TYPE3:
        expo = (1.0 - i**2) / (n**2 - 1.0)
    else:
        raise ValueError("TYPE1 has no prescribed spectrum")
    return spec.s1 * np.power(float(spec.kappa), expo)


def gen_parent(n, spec, seed):
    """Draw an n x n parent matrix following ``spec``.

    Deterministic in ``(n, spec, seed)``.
    """
    if n < 2:
        raise InvalidDimensionError(f"parent matrix needs n >= 2, got {n}")
    rng = make_rng(seed)
    g = rng.standard_normal((n, n))
    if spec.kind == SpectrumKind.TYPE1:
        return ParentMatrix(g, spec, seed)
    u, _, vt = np.linalg.svd(g)
    s = spectrum_law(n, spec)
    a = (u * s) @ vt
    # reconstruction sanity: U S V^T must reproduce itself at working precision
    resid = np.linalg.norm(u.T @ a @ vt.T - np.diag(s)) / s[0]
    if resid > 1e-10 * n:
        raise RuntimeError(f"SVD-based construction lost accuracy ({resid:.2e})")
    return ParentMatrix(a, spec, seed)


def subsample_rows(parent, m, seed):
    """Keep ``m`` distinct rows of ``parent``, chosen uniformly, in draw order."""
    n = parent.entries.shape[0]
    if not 1 <= m <= n:
        raise InvalidDimensionError(f"need 1 <= m <= n={n}, got m={m}")
    rows = sample_without_replacement(make_rng(seed), n, m)
    return MeasurementMatrix(parent.entries[rows].copy(), rows, parent.spec)


def singular_spectrum(matrix, normalize=False):
    """Singular values in descending order, optionally divided by the largest."""
    a = getattr(matrix, "entries", matrix)
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if normalize and s[0] > 0:
        s = s / s[0]
    return s


def mean_normalized_spectrum(n, m, spec, repeats, seed):
    """Average of per-matrix normalized spectra of ``repeats`` m x n draws.

    Each matrix is normalized by its own largest singular value before
    averaging.
    """
    acc = np.zeros(min(m, n))
    for r in range(repeats):
        parent = gen_parent(n, spec, (seed, r, 0))
        k = subsample_rows(parent, m, (seed, r, 1))
        acc += singular_spectrum(k, normalize=True)
    return acc / repeats


def spectrum_rows(values):
    """Rows ``(index, singular_value, normalized_value)`` for CSV export."""
    values = np.asarray(values, dtype=float)
    top = values[0] if values.size and values[0] > 0 else 1.0
    return [(i, float(v), float(v / top)) for i, v in enumerate(values)]
