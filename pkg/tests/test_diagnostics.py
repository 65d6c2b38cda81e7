import math

import numpy as np
import pytest

from l1recovery import diagnostics as D
from l1recovery.errors import UnsupportedSizeError


def test_rip_bound_constant():
    c = D.rip_bound_constant()
    assert round(c, 4) == 1.6498
    assert c**2 == pytest.approx((10 + math.sqrt(7)) / (2 + math.sqrt(7)), abs=1e-15)
    assert c > 1


def test_bound_follows_from_delta_threshold():
    d = D.rip_delta_threshold()
    assert d == pytest.approx(4 / (6 + math.sqrt(7)))
    assert math.sqrt((1 + d) / (1 - d)) == pytest.approx(D.rip_bound_constant(), rel=1e-14)


def test_identity_columns_are_perfectly_conditioned():
    rep = D.sample_condition_numbers(np.eye(16), 1, 200, seed=3)
    assert rep.min_kappa == rep.max_kappa == rep.mean_kappa == 1.0
    rep = D.sample_condition_numbers(np.eye(16), 5, 200, seed=3)
    assert rep.max_kappa == pytest.approx(1.0, abs=1e-12)


def test_report_invariants_and_determinism():
    K = np.random.default_rng(0).standard_normal((30, 90))
    a = D.sample_condition_numbers(K, 6, 500, seed=4)
    b = D.sample_condition_numbers(K, 6, 500, seed=4)
    assert a == b
    assert 1 <= a.min_kappa <= a.mean_kappa <= a.max_kappa
    assert a.infinite_count == 0


def test_kappa_invariant_under_sign_flips_and_permutations():
    rng = np.random.default_rng(1)
    sub = rng.standard_normal((12, 5))
    base = D.condition_number(sub)
    flipped = sub * rng.choice([-1.0, 1.0], size=5)
    assert D.condition_number(flipped) == pytest.approx(base, rel=1e-12)
    assert D.condition_number(sub[:, rng.permutation(5)]) == pytest.approx(base, rel=1e-12)
    q, _ = np.linalg.qr(sub)
    assert D.condition_number(q) == pytest.approx(1.0, abs=1e-12)


def test_rank_deficient_samples_reported():
    K = np.hstack([np.eye(4), np.eye(4)])
    rep = D.sample_condition_numbers(K, 2, 400, seed=0)
    assert rep.infinite_count > 0
    assert math.isfinite(rep.mean_kappa)
    assert rep.samples == 400


def test_hadamard_order2():
    expected = np.array([[1, 0, 1, 1], [0, 1, 1, -1]]) / np.array([1, 1, math.sqrt(2), math.sqrt(2)])
    np.testing.assert_allclose(D.identity_hadamard_matrix(2), expected, atol=1e-15)


@pytest.mark.parametrize("order", [1, 4, 32, 128])
def test_identity_hadamard_unit_columns(order):
    K = D.identity_hadamard_matrix(order)
    assert K.shape == (order, 2 * order)
    np.testing.assert_allclose(np.linalg.norm(K, axis=0), 1.0, atol=1e-15)
    H = D.hadamard(order)
    np.testing.assert_array_equal(H @ H.T, order * np.eye(order))


def test_non_power_of_two():
    with pytest.raises(UnsupportedSizeError):
        D.identity_hadamard_matrix(12)


def test_hadamard128_statistics():
    rep = D.sample_condition_numbers(D.identity_hadamard_matrix(128), 12, 10_000, seed=1)
    assert rep.mean_kappa == pytest.approx(1.4216, abs=0.02)
    assert rep.max_kappa <= 1.7495 + 1e-4
