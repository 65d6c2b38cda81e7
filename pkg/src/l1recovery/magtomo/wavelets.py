"""Two-dimensional CDF 4-2 wavelet transform by lifting.

The 1-D step splits a signal into even samples ``s`` and odd samples ``d``,
then

    predict:  d[i] -= 9/16 (s[i] + s[i+1]) - 1/16 (s[i-1] + s[i+2])
    update:   s[i] += 1/4 (d[i-1] + d[i])

i.e. the analysis wavelet kills cubics (4 vanishing moments) and the update
gives the scaling function 2.  Signals are extended by whole-sample symmetric
reflection at both ends.  The inverse undoes the two lifting steps in reverse
order, so reconstruction is exact up to rounding whatever the extension.

The 2-D transform is separable (rows then columns) and recursive on the
low-low band down to a single coefficient; coefficients are stored in the
usual Mallat layout, coarse band in the top-left corner.
"""
import numpy as np

from ..errors import UnsupportedSizeError


def _reflect(j, length):
    """Whole-sample symmetric reflection of sample indices into ``[0, length)``."""
    if length == 1:
        return np.zeros_like(j)
    period = 2 * (length - 1)
    j = np.mod(j, period)
    return np.where(j >= length, period - j, j)


def _lift_indices(length):
    half = length // 2
    i = np.arange(half)
    even = lambda k: _reflect(2 * k, length) // 2  # noqa: E731
    odd = lambda k: (_reflect(2 * k + 1, length) - 1) // 2  # noqa: E731
    return even(i - 1), even(i + 1), even(i + 2), odd(i - 1)


def forward_1d(x, axis=0):
    """One analysis level along ``axis``: returns ``concat(s, d)``."""
    x = np.moveaxis(np.asarray(x, dtype=float), axis, 0)
    length = x.shape[0]
    sm1, sp1, sp2, dm1 = _lift_indices(length)
    s = x[0::2].copy()
    d = x[1::2].copy()
    d -= 9.0 / 16.0 * (s + s[sp1]) - 1.0 / 16.0 * (s[sm1] + s[sp2])
    s += 0.25 * (d[dm1] + d)
    return np.moveaxis(np.concatenate([s, d], axis=0), 0, axis)


def inverse_1d(c, axis=0):
    c = np.moveaxis(np.asarray(c, dtype=float), axis, 0)
    length = c.shape[0]
    half = length // 2
    sm1, sp1, sp2, dm1 = _lift_indices(length)
    s = c[:half].copy()
    d = c[half:].copy()
    s -= 0.25 * (d[dm1] + d)
    d += 9.0 / 16.0 * (s + s[sp1]) - 1.0 / 16.0 * (s[sm1] + s[sp2])
    x = np.empty_like(c)
    x[0::2] = s
    x[1::2] = d
    return np.moveaxis(x, 0, axis)


def _check(field):
    n = field.shape[0]
    if field.ndim < 2 or field.shape[1] != n or n < 2 or n & (n - 1):
        raise UnsupportedSizeError(f"need a square power-of-two field, got shape {field.shape[:2]}")
    return n


def cdf42_forward(field, levels=None):
    """Full-depth 2-D analysis of an (N, N[, batch...]) array, N a power of 2."""
    out = np.array(field, dtype=float)
    n = _check(out)
    depth = int(np.log2(n)) if levels is None else levels
    size = n
    for _ in range(depth):
        block = out[:size, :size]
        block = forward_1d(block, axis=0)
        block = forward_1d(block, axis=1)
        out[:size, :size] = block
        size //= 2
    return out


def cdf42_inverse(coeffs, levels=None):
    out = np.array(coeffs, dtype=float)
    n = _check(out)
    depth = int(np.log2(n)) if levels is None else levels
    size = n >> (depth - 1) if depth else n
    for _ in range(depth):
        block = out[:size, :size]
        block = inverse_1d(block, axis=1)
        block = inverse_1d(block, axis=0)
        out[:size, :size] = block
        size *= 2
    return out


def coefficient_levels(n):
    """Scale index of every coefficient in the Mallat layout (0 = coarsest)."""
    lev = np.zeros((n, n), dtype=int)
    size = 1
    level = 0
    while size < n:
        level += 1
        lev[:2 * size, :2 * size][np.maximum.outer(np.arange(2 * size), np.arange(2 * size)) >= size] = level
        size *= 2
    return lev


def synthesis_matrix(n, chunk=512):
    """Dense (n^2, n^2) matrix whose column j is the field of coefficient j."""
    total = n * n
    W = np.empty((total, total))
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        basis = np.zeros((total, stop - start))
        basis[np.arange(start, stop), np.arange(stop - start)] = 1.0
        W[:, start:stop] = cdf42_inverse(basis.reshape(n, n, -1)).reshape(total, -1)
    return W
