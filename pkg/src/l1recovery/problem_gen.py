"""Sparse ground truths and noisy synthetic data."""
from dataclasses import dataclass

import numpy as np

from .ensembles import MeasurementMatrix, SpectrumKind, SpectrumSpec
from .errors import DegenerateSignalError, InvalidSparsityError, UndefinedErrorError
from .seeding import as_words, make_rng, sample_without_replacement

# nonzero values are drawn on [-VALUE_RANGE, VALUE_RANGE] and redrawn below the floor
VALUE_RANGE = 1.0
VALUE_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class SparseSignal:
    n: int
    support: np.ndarray
    values: np.ndarray

    @property
    def k(self):
        return len(self.support)

    @property
    def dense_view(self):
        x = np.zeros(self.n)
        x[self.support] = self.values
        return x


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    matrix: MeasurementMatrix
    signal: SparseSignal
    noise: np.ndarray
    data: np.ndarray
    epsilon: float
    seed: object = None

    @property
    def noise_norm(self):
        return float(np.linalg.norm(self.noise))

    def realized_epsilon(self):
        clean = self.matrix.entries @ self.signal.dense_view
        return float(np.linalg.norm(self.data - clean) / np.linalg.norm(clean))


def draw_values(rng, k, low=VALUE_FLOOR, scale=VALUE_RANGE):
    """``k`` values uniform on ``[-scale, scale]`` with ``|v| >= low``."""
    v = rng.uniform(-scale, scale, size=k)
    small = np.abs(v) < low
    while small.any():
        v[small] = rng.uniform(-scale, scale, size=int(small.sum()))
        small = np.abs(v) < low
    return v


def gen_signal(n, k, seed):
    """k-sparse vector of length n: uniform support, uniform values."""
    if not 1 <= k <= n:
        raise InvalidSparsityError(f"need 1 <= k <= n={n}, got k={k}")
    rng = make_rng(seed)
    support = sample_without_replacement(rng, n, k)
    return SparseSignal(n, support, draw_values(rng, k))


def synthesize(K, x0, epsilon, seed):
    """Data ``y = K x0 + eta`` with Gaussian ``eta`` scaled to ``||eta|| = epsilon ||K x0||``."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    if not isinstance(K, MeasurementMatrix):
        K = MeasurementMatrix(np.asarray(K, dtype=float), np.arange(len(K)), SpectrumSpec())
    clean = K.entries @ x0.dense_view
    clean_norm = np.linalg.norm(clean)
    m = clean.shape[0]
    if epsilon == 0:
        eta = np.zeros(m)
    else:
        if clean_norm == 0:
            raise DegenerateSignalError("K x0 = 0, noise level is undefined")
        eta = make_rng(seed).standard_normal(m)
        eta *= epsilon * clean_norm / np.linalg.norm(eta)
    return ProblemInstance(K, x0, eta, clean + eta, float(epsilon), seed)


def relative_error(x_hat, x0):
    """``||x_hat - x0|| / ||x0||``."""
    ref = x0.dense_view if isinstance(x0, SparseSignal) else np.asarray(x0, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != ref.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {ref.shape}")
    norm = np.linalg.norm(ref)
    if norm == 0:
        raise UndefinedErrorError("ground truth is identically zero")
    return float(np.linalg.norm(x_hat - ref) / norm)


def sweep_sizes(n, delta, rho):
    """Rows and nonzeros for a (delta, rho) grid point."""
    m = max(1, int(round(delta * n)))
    k = max(1, int(round(rho * m)))
    return m, k


def save_instance(path, inst):
    """Write everything needed to replay a trial to an ``.npz`` bundle."""
    spec = inst.matrix.parent_spec
    seed = np.asarray(as_words(inst.seed) if inst.seed is not None else [], dtype=np.uint64)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            matrix=inst.matrix.entries,
            row_indices=np.asarray(inst.matrix.row_indices),
            spectrum=np.array([int(spec.kind), spec.kappa, spec.s1]),
            n=np.array(inst.signal.n),
            support=inst.signal.support,
            values=inst.signal.values,
            noise=inst.noise,
            data=inst.data,
            epsilon=np.array(inst.epsilon),
            seed=seed,
            value_convention=np.array([-VALUE_RANGE, VALUE_RANGE, VALUE_FLOOR]),
        )


def load_instance(path):
    with np.load(path) as z:
        kind, kappa, s1 = z["spectrum"]
        spec = SpectrumSpec(SpectrumKind(int(kind)), float(kappa), float(s1))
        K = MeasurementMatrix(z["matrix"], z["row_indices"], spec)
        sig = SparseSignal(int(z["n"]), z["support"], z["values"])
        seed = tuple(int(s) for s in z["seed"]) or None
        return ProblemInstance(K, sig, z["noise"], z["data"], float(z["epsilon"]), seed)
